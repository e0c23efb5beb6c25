//! Cooperative routing of an energy-limited UAV that recharges on a slow UGV
//! driving a road network.
//!
//! The inner level ([`vrp`]) routes the UAV over the targets the UGV does not
//! reach; the outer level tunes the seven UGV route parameters with a genetic
//! algorithm ([`ga`]), a Nelder-Mead simplex ([`nelder_mead`]) or an
//! asynchronous-teams combination of both ([`ateams`]).

pub mod ateams;
pub mod cli;
pub mod error;
pub mod ga;
pub mod geometry;
pub mod nelder_mead;
pub mod outer;
pub mod report;
pub mod scenario;
pub mod ugv;
pub mod vrp;

pub use error::{Error, Result};
pub use geometry::{Point2D, Polyline};
pub use scenario::{load_scenario, Scenario};
