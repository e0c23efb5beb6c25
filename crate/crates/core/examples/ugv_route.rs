//! Decode a UGV parameter set and drive it over the road network.

use coop_route::ugv::{build_ugv_route, UgvParams};
use coop_route::Scenario;

pub fn main() {
    let scenario = Scenario::bundled("scenario1").expect("bundled scenario");
    let params = UgvParams {
        start_depot: 0,
        stop1_s: 0.0,
        stop2_s: 1.0,
        wait1: 20,
        wait2: 20,
    };
    let route = build_ugv_route(&scenario, &params).expect("route");
    println!(
        "{:.1} min, {:.2} MJ of {:.2} MJ, covers {} of {} targets",
        route.total_time / 60.0,
        route.energy / 1e6,
        scenario.ugv_spec.fuel_capacity / 1e6,
        route.covered_targets.len(),
        scenario.targets.len()
    );
    for w in [route.stop1(), route.stop2()] {
        let (x, y) = route.stop_position(w).to_km();
        println!("stop at ({x:.2}, {y:.2}) km open {:.0}..{:.0} s", w.open, w.close);
    }
    print!("{}", route.to_csv());
}
