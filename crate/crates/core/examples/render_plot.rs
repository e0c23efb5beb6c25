//! Evaluate a parameter set and write the report and route plot.

use coop_route::outer::OuterProblem;
use coop_route::report::{render_plot, RunReport};
use coop_route::ugv::{encode_params, UgvParams};
use coop_route::vrp::{InnerConfig, UavPlan};
use coop_route::Scenario;

pub fn main() {
    let scenario = Scenario::bundled("scenario2").expect("bundled scenario");
    let problem = OuterProblem::new(scenario.clone(), InnerConfig::default().deterministic());
    let params = UgvParams {
        start_depot: 1,
        stop1_s: 0.95,
        stop2_s: 0.95,
        wait1: 23,
        wait2: 24,
    };
    let ev = problem.evaluate(&encode_params(&params, scenario.depots.len()));
    let report = RunReport::new(&scenario, &ev, "manual", 0, "manual", 1, 0, None);
    print!("{}", report.to_json());

    let (Some(route), Some(graph)) = (&ev.ugv_route, &ev.graph) else {
        return;
    };
    let plan = ev.plan.clone().unwrap_or_else(|| UavPlan::empty(graph));
    let out = std::env::temp_dir().join("coop_route_routes.svg");
    std::fs::write(&out, render_plot(&scenario, route, graph, &plan)).expect("write svg");
    println!("plot written to {}", out.display());
}
