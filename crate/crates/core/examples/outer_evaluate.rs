//! Score one 7-gene unit vector end to end.

use coop_route::outer::OuterProblem;
use coop_route::vrp::InnerConfig;
use coop_route::Scenario;

pub fn main() {
    let problem = OuterProblem::new(
        Scenario::bundled("scenario1").expect("bundled scenario"),
        InnerConfig::default().deterministic(),
    );
    for unit in [[0.1, 0.2, 0.5, 0.3, 0.5, 0.4, 0.4], [0.9, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5]] {
        let ev = problem.evaluate(&unit);
        match &ev.infeasibility {
            None => println!(
                "{:?}: UGV {:.1} min, UAV {:.1} min, gap {:.2} min",
                ev.params, ev.ugv_min, ev.uav_min, ev.fitness
            ),
            Some(why) => println!("{:?}: infeasible ({why}), penalty {:.0}", ev.params, ev.fitness),
        }
    }
}
