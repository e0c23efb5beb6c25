//! Load a bundled scenario (or a JSON file given as the first argument) and
//! print its layout.

use coop_route::scenario::bundled_names;
use coop_route::Scenario;

pub fn main() {
    let scenario = match std::env::args().nth(1) {
        Some(path) => Scenario::from_file(&path).expect("scenario file"),
        None => Scenario::bundled("scenario1").expect("bundled scenario"),
    };
    let (jx, jy) = scenario.junction().to_km();
    println!(
        "{}: {} targets, {} depots, junction ({jx:.2}, {jy:.2}) km",
        scenario.name,
        scenario.targets.len(),
        scenario.depots.len()
    );
    for (i, b) in scenario.branches.iter().enumerate() {
        println!("  branch {i}: {:.2} km", b.length() / 1000.0);
    }
    for d in &scenario.depots {
        let (x, y) = d.position.to_km();
        println!(
            "  depot {} at ({x:.2}, {y:.2}) km, UGV recharge: {}",
            d.id + 1,
            d.ugv_rechargeable
        );
    }
    println!("bundled: {:?}", bundled_names().collect::<Vec<_>>());
}
