//! Inner level: energy-, time-window- and dropped-visit-constrained UAV routing.
//!
//! Constraints are evaluated directly on vertex sequences. Sub-tours cannot
//! occur because a plan is a single path from the start vertex to the end
//! vertex, so no big-M linearization is needed.

pub mod construct;
pub mod energy;
pub mod gls;
pub mod graph;
pub mod moves;
pub mod plan;

pub use construct::{construct_initial, targets_beyond_range, ConstructionFailure};
pub use energy::{edge_energy, recharge_time, uav_power, RechargeModel};
pub use gls::{guided_local_search, improve, local_search, GlsState, InnerConfig, SearchStats};
pub use graph::{build_routing_graph, RoutingGraph, Vertex, VertexKind};
pub use moves::{neighborhood, Operator, OPERATORS};
pub use plan::{check_feasible, evaluate_plan, quick_feasible, Rule, UavMetrics, UavPlan, Violation};
