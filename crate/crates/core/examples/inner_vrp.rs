//! Solve the UAV routing problem left over by a fixed UGV route.

use coop_route::ugv::{build_ugv_route, UgvParams};
use coop_route::vrp::{build_routing_graph, check_feasible, construct_initial, evaluate_plan, improve, InnerConfig};
use coop_route::Scenario;

pub fn main() {
    let scenario = Scenario::bundled("scenario3").expect("bundled scenario");
    let params = UgvParams {
        start_depot: 2,
        stop1_s: 0.7,
        stop2_s: 0.2,
        wait1: 20,
        wait2: 40,
    };
    let route = build_ugv_route(&scenario, &params).expect("route");
    let graph = build_routing_graph(&scenario, &route);
    println!("{} targets left for the UAV", graph.targets().len());

    let initial = match construct_initial(&graph) {
        Ok(p) => p,
        Err(f) => {
            println!("construction failed: {f}");
            return;
        }
    };
    let (plan, stats) = improve(&graph, &initial, &InnerConfig::default().deterministic());
    println!(
        "flight {:.1} min -> {:.1} min after {} feasibility checks, {} local optima",
        initial.cost / 60.0,
        plan.cost / 60.0,
        stats.evaluations,
        stats.local_optima
    );
    assert!(check_feasible(&graph, &plan).is_empty());
    let m = evaluate_plan(&graph, &plan).expect("feasible plan");
    println!(
        "completion {:.1} min, {:.1} kJ, {} sorties, recharges: {} on UGV, {} at depots",
        m.travel_s / 60.0,
        m.energy_j / 1e3,
        plan.sorties(&graph).len(),
        m.recharges_on_ugv,
        m.recharges_on_depot
    );
}
