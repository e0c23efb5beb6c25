//! A short A-Teams run with a small population.

use coop_route::ateams::{run_ateams, ATeamsConfig};
use coop_route::outer::OuterProblem;
use coop_route::vrp::InnerConfig;
use coop_route::Scenario;

pub fn main() {
    let problem = OuterProblem::new(
        Scenario::bundled("scenario1").expect("bundled scenario"),
        InnerConfig::default().deterministic(),
    );
    let cfg = ATeamsConfig {
        capacity: 10,
        improver_rounds_budget: 3,
        deterministic: true,
        ..ATeamsConfig::default()
    };
    let run = run_ateams(&problem, &cfg).expect("feasible start");
    print!("{}", run.trace.to_csv(false));
    println!(
        "best gap {:.2} min from {:?} ({} evaluations, {} rounds)",
        run.best.fitness, run.best.provenance, run.evaluations, run.rounds
    );
    println!("{:?}", run.best.params);
}
