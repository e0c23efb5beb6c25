//! The outer objective: decode a genome, drive the UGV, solve the inner
//! UAV problem and score the completion-time gap.

use std::fmt;

use serde::Serialize;

use crate::report::outer_objective;
use crate::scenario::Scenario;
use crate::ugv::{
    build_ugv_route_with_radius, decode_params, UgvParams, UgvRoute, UnitVector, DEFAULT_COVERAGE_RADIUS_M,
};
use crate::vrp::{
    build_routing_graph, check_feasible, construct_initial, evaluate_plan, improve, ConstructionFailure, InnerConfig,
    RoutingGraph, UavMetrics, UavPlan, Violation,
};

/// Fitness penalty per target left uncovered by an infeasible evaluation, minutes.
pub const UNCOVERED_PENALTY_MIN: f64 = 100.0;

/// What an outer evaluation reports to the optimizers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assessment {
    /// Minutes; lower is better. Infeasible points carry the penalty value.
    pub fitness: f64,
    pub feasible: bool,
    pub params: UgvParams,
    pub uncovered: usize,
    pub note: Option<String>,
}

/// Anything the outer optimizers can score. Implementations must be pure.
pub trait Evaluator: Sync {
    fn depot_count(&self) -> usize;
    fn assess(&self, unit: &UnitVector) -> Assessment;
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Infeasibility {
    UgvEnergy { used_j: f64, capacity_j: f64 },
    UgvHorizon { time_s: f64, horizon_s: f64 },
    Unreachable { targets: Vec<usize> },
    PlanViolations { violations: Vec<String> },
    Route { message: String },
}

impl fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UgvEnergy { used_j, capacity_j } => {
                write!(
                    f,
                    "UGV energy {:.2} MJ exceeds capacity {:.2} MJ",
                    used_j / 1e6,
                    capacity_j / 1e6
                )
            }
            Self::UgvHorizon { time_s, horizon_s } => {
                write!(f, "UGV route takes {time_s:.0} s, beyond the {horizon_s:.0} s horizon")
            }
            Self::Unreachable { targets } => write!(f, "unreachable targets {targets:?}"),
            Self::PlanViolations { violations } => write!(f, "plan violations: {}", violations.join("; ")),
            Self::Route { message } => write!(f, "{message}"),
        }
    }
}

impl Infeasibility {
    /// Short category label used when tallying failure causes.
    pub fn category(&self) -> &'static str {
        match self {
            Self::UgvEnergy { .. } => "ugv energy",
            Self::UgvHorizon { .. } => "ugv horizon",
            Self::Unreachable { .. } => "unreachable target",
            Self::PlanViolations { .. } => "plan violation",
            Self::Route { .. } => "route",
        }
    }
}

/// Everything produced by one outer evaluation.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub unit: UnitVector,
    pub params: UgvParams,
    pub ugv_route: Option<UgvRoute>,
    pub graph: Option<RoutingGraph>,
    pub plan: Option<UavPlan>,
    pub uav: Option<UavMetrics>,
    pub ugv_min: f64,
    pub uav_min: f64,
    pub fitness: f64,
    pub infeasibility: Option<Infeasibility>,
    pub uncovered: usize,
}

impl Evaluation {
    pub fn feasible(&self) -> bool {
        self.infeasibility.is_none()
    }

    pub fn assessment(&self) -> Assessment {
        Assessment {
            fitness: self.fitness,
            feasible: self.feasible(),
            params: self.params,
            uncovered: self.uncovered,
            note: self.infeasibility.as_ref().map(|i| i.category().to_string()),
        }
    }
}

/// The scenario-backed outer problem.
#[derive(Debug, Clone)]
pub struct OuterProblem {
    pub scenario: Scenario,
    pub inner: InnerConfig,
    pub coverage_radius: f64,
}

impl OuterProblem {
    pub fn new(scenario: Scenario, inner: InnerConfig) -> Self {
        Self {
            scenario,
            inner,
            coverage_radius: DEFAULT_COVERAGE_RADIUS_M,
        }
    }

    pub fn infeasible_fitness(&self, uncovered: usize) -> f64 {
        self.scenario.horizon / 60.0 + UNCOVERED_PENALTY_MIN * uncovered as f64
    }

    pub fn evaluate(&self, unit: &UnitVector) -> Evaluation {
        let clamped = unit.map(|u| if u.is_nan() { 0.0 } else { u.clamp(0.0, 1.0) });
        let params = decode_params(&clamped, self.scenario.depots.len()).expect("clamped genome decodes");
        let mut ev = Evaluation {
            unit: clamped,
            params,
            ugv_route: None,
            graph: None,
            plan: None,
            uav: None,
            ugv_min: 0.0,
            uav_min: 0.0,
            fitness: self.infeasible_fitness(0),
            infeasibility: None,
            uncovered: 0,
        };
        let route = match build_ugv_route_with_radius(&self.scenario, &params, self.coverage_radius) {
            Ok(r) => r,
            Err(e) => {
                ev.infeasibility = Some(Infeasibility::Route { message: e.to_string() });
                return ev;
            }
        };
        ev.ugv_min = route.total_time / 60.0;
        let graph = build_routing_graph(&self.scenario, &route);
        let failure = if !route.within_fuel(&self.scenario.ugv_spec) {
            Some(Infeasibility::UgvEnergy {
                used_j: route.energy,
                capacity_j: self.scenario.ugv_spec.fuel_capacity,
            })
        } else if route.total_time > self.scenario.horizon {
            Some(Infeasibility::UgvHorizon {
                time_s: route.total_time,
                horizon_s: self.scenario.horizon,
            })
        } else {
            None
        };
        ev.ugv_route = Some(route);
        if let Some(f) = failure {
            ev.infeasibility = Some(f);
            ev.graph = Some(graph);
            return ev;
        }

        match construct_initial(&graph) {
            Err(ConstructionFailure { unreachable, .. }) => {
                ev.uncovered = unreachable.len();
                ev.fitness = self.infeasible_fitness(ev.uncovered);
                let targets = unreachable.iter().map(|&v| graph.vertices[v].source).collect();
                ev.infeasibility = Some(Infeasibility::Unreachable { targets });
            }
            Ok(initial) => {
                let (plan, _) = improve(&graph, &initial, &self.inner);
                match evaluate_plan(&graph, &plan) {
                    Ok(m) => {
                        ev.uav_min = m.travel_s / 60.0;
                        ev.fitness = outer_objective(ev.ugv_min, ev.uav_min);
                        ev.uav = Some(m);
                    }
                    Err(v) => {
                        ev.infeasibility = Some(Infeasibility::PlanViolations {
                            violations: v.iter().map(Violation::to_string).collect(),
                        });
                    }
                }
                ev.plan = Some(plan);
            }
        }
        ev.graph = Some(graph);
        ev
    }

    /// Re-checks a finished evaluation from scratch: the plan must pass every
    /// constraint and cover exactly the targets the UGV leaves behind.
    pub fn verify(&self, ev: &Evaluation) -> Vec<String> {
        let mut problems = Vec::new();
        let (Some(route), Some(graph)) = (&ev.ugv_route, &ev.graph) else {
            return vec!["evaluation has no route".into()];
        };
        let plan = ev.plan.clone().unwrap_or_else(|| UavPlan::empty(graph));
        problems.extend(check_feasible(graph, &plan).iter().map(Violation::to_string));
        let by_uav = plan.tour.iter().filter(|&&v| !graph.is_recharge(v)).count();
        if by_uav + route.covered_targets.len() != self.scenario.targets.len() {
            problems.push(format!(
                "coverage mismatch: uav {by_uav} + ugv {} != {}",
                route.covered_targets.len(),
                self.scenario.targets.len()
            ));
        }
        problems
    }
}

impl Evaluator for OuterProblem {
    fn depot_count(&self) -> usize {
        self.scenario.depots.len()
    }

    fn assess(&self, unit: &UnitVector) -> Assessment {
        self.evaluate(unit).assessment()
    }
}
