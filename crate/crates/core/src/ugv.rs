//! Ground-vehicle route heuristic: the 7-gene parameter encoding, route
//! construction along the road tree, coverage and energy accounting.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{segment_projection, Point2D, Polyline};
use crate::scenario::{Scenario, VehicleSpec};

/// Length of the normalized outer genome.
pub const GENOME_LEN: usize = 7;
pub type UnitVector = [f64; GENOME_LEN];

pub const WAIT_MIN_MINUTES: u32 = 2;
pub const WAIT_MAX_MINUTES: u32 = 50;

/// Targets closer than this to the driven path count as visited by the UGV.
pub const DEFAULT_COVERAGE_RADIUS_M: f64 = 50.0;

/// Genome slots. Slots 2 and 4 are reserved padding and decode to nothing.
pub mod gene {
    pub const DEPOT: usize = 0;
    pub const STOP1: usize = 1;
    pub const STOP1_PAD: usize = 2;
    pub const STOP2: usize = 3;
    pub const STOP2_PAD: usize = 4;
    pub const WAIT1: usize = 5;
    pub const WAIT2: usize = 6;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UgvParams {
    /// Zero-based depot index.
    pub start_depot: usize,
    pub stop1_s: f64,
    pub stop2_s: f64,
    /// minutes
    pub wait1: u32,
    /// minutes
    pub wait2: u32,
}

impl UgvParams {
    pub fn validate(&self, depot_count: usize) -> Result<()> {
        if self.start_depot >= depot_count {
            return Err(Error::Config(format!(
                "start depot {} does not exist",
                self.start_depot + 1
            )));
        }
        for (what, v) in [("stop1_s", self.stop1_s), ("stop2_s", self.stop2_s)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfRange {
                    what,
                    value: v,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
        }
        for (what, w) in [("wait1", self.wait1), ("wait2", self.wait2)] {
            if !(WAIT_MIN_MINUTES..=WAIT_MAX_MINUTES).contains(&w) {
                return Err(Error::OutOfRange {
                    what,
                    value: f64::from(w),
                    lo: f64::from(WAIT_MIN_MINUTES),
                    hi: f64::from(WAIT_MAX_MINUTES),
                });
            }
        }
        Ok(())
    }
}

fn wait_span() -> f64 {
    f64::from(WAIT_MAX_MINUTES - WAIT_MIN_MINUTES)
}

/// Maps a unit-hypercube genome onto the parameter ranges.
pub fn decode_params(vector: &[f64], depot_count: usize) -> Result<UgvParams> {
    if vector.len() != GENOME_LEN {
        return Err(Error::Config(format!(
            "genome must have {GENOME_LEN} entries, got {}",
            vector.len()
        )));
    }
    if depot_count == 0 {
        return Err(Error::Config("no depots to start from".into()));
    }
    for &v in vector {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::OutOfRange {
                what: "genome component",
                value: v,
                lo: 0.0,
                hi: 1.0,
            });
        }
    }
    let depot = ((vector[gene::DEPOT] * depot_count as f64).floor() as usize).min(depot_count - 1);
    let wait = |u: f64| (f64::from(WAIT_MIN_MINUTES) + u * wait_span()).round() as u32;
    Ok(UgvParams {
        start_depot: depot,
        stop1_s: vector[gene::STOP1],
        stop2_s: vector[gene::STOP2],
        wait1: wait(vector[gene::WAIT1]),
        wait2: wait(vector[gene::WAIT2]),
    })
}

/// Inverse of [`decode_params`]; depots map to the middle of their interval
/// and the pad slots to 0.5.
pub fn encode_params(params: &UgvParams, depot_count: usize) -> UnitVector {
    let mut v = [0.5; GENOME_LEN];
    v[gene::DEPOT] = (params.start_depot as f64 + 0.5) / depot_count as f64;
    v[gene::STOP1] = params.stop1_s;
    v[gene::STOP2] = params.stop2_s;
    v[gene::WAIT1] = f64::from(params.wait1 - WAIT_MIN_MINUTES) / wait_span();
    v[gene::WAIT2] = f64::from(params.wait2 - WAIT_MIN_MINUTES) / wait_span();
    v
}

/// Electrical draw of the ground vehicle at speed `v` (m/s), in watts.
pub fn ugv_power(v: f64) -> Result<f64> {
    if !(v >= 0.0) {
        return Err(Error::OutOfRange {
            what: "ugv speed",
            value: v,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    Ok(464.8 * v + 356.3)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WaypointKind {
    Depot,
    Road,
    Stop1,
    Stop2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Waypoint {
    pub position: Point2D,
    pub arrive: f64,
    pub depart: f64,
    pub kind: WaypointKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StopWindow {
    pub waypoint: usize,
    pub open: f64,
    pub close: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct UgvRoute {
    pub waypoints: Vec<Waypoint>,
    pub stop_windows: Vec<StopWindow>,
    pub covered_targets: BTreeSet<usize>,
    /// seconds
    pub total_time: f64,
    /// J
    pub energy: f64,
    pub driving_time: f64,
    pub waiting_time: f64,
}

impl UgvRoute {
    pub fn start(&self) -> Point2D {
        self.waypoints[0].position
    }

    pub fn stop1(&self) -> &StopWindow {
        &self.stop_windows[0]
    }

    pub fn stop2(&self) -> &StopWindow {
        &self.stop_windows[1]
    }

    pub fn stop_position(&self, w: &StopWindow) -> Point2D {
        self.waypoints[w.waypoint].position
    }

    pub fn path(&self) -> Polyline {
        Polyline::new(self.waypoints.iter().map(|w| w.position).collect())
    }

    /// Over-capacity routes are flagged here rather than rejected on construction.
    pub fn within_fuel(&self, spec: &VehicleSpec) -> bool {
        self.energy <= spec.fuel_capacity
    }

    /// Targets within `radius` meters of the driven path.
    pub fn covered_within(&self, targets: &[Point2D], radius: f64) -> BTreeSet<usize> {
        covered_by_path(&self.waypoints, targets, radius)
    }

    /// CSV trace: one row per waypoint arrival and, at waits, one per departure.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_s,x_km,y_km,state\n");
        for w in &self.waypoints {
            let (x, y) = w.position.to_km();
            let state = if w.depart > w.arrive { "wait" } else { "drive" };
            let _ = writeln!(out, "{:.1},{x:.4},{y:.4},{state}", w.arrive);
            if w.depart > w.arrive {
                let _ = writeln!(out, "{:.1},{x:.4},{y:.4},drive", w.depart);
            }
        }
        out
    }
}

fn covered_by_path(waypoints: &[Waypoint], targets: &[Point2D], radius: f64) -> BTreeSet<usize> {
    targets
        .iter()
        .enumerate()
        .filter(|(_, t)| {
            if waypoints.len() == 1 {
                return waypoints[0].position.dist(**t) <= radius;
            }
            waypoints
                .windows(2)
                .any(|w| segment_projection(**t, w[0].position, w[1].position).0 <= radius)
        })
        .map(|(i, _)| i)
        .collect()
}

/// Energy drawn over a route: drive power while moving, idle power while waiting.
pub fn ugv_energy(route: &UgvRoute, spec: &VehicleSpec) -> f64 {
    let drive = ugv_power(spec.speed).unwrap_or(0.0) * route.driving_time;
    let idle = ugv_power(0.0).unwrap_or(0.0) * route.waiting_time;
    drive + idle
}

/// Road vertices closer than this to a neighbouring waypoint are merged into it.
const MERGE_TOLERANCE_M: f64 = 1.0;

/// Builds depot → stop1 (wait) → stop2 (wait) → depot along the road tree.
pub fn build_ugv_route(scenario: &Scenario, params: &UgvParams) -> Result<UgvRoute> {
    build_ugv_route_with_radius(scenario, params, DEFAULT_COVERAGE_RADIUS_M)
}

pub fn build_ugv_route_with_radius(scenario: &Scenario, params: &UgvParams, coverage_radius: f64) -> Result<UgvRoute> {
    params.validate(scenario.depots.len())?;
    let speed = scenario.ugv_spec.speed;
    let depot = scenario.depots[params.start_depot].position;
    let stop1 = scenario.stop_point(&scenario.stop_region_1, params.stop1_s);
    let stop2 = scenario.stop_point(&scenario.stop_region_2, params.stop2_s);
    let legs = [
        (
            scenario.road_path(depot, stop1)?,
            WaypointKind::Stop1,
            f64::from(params.wait1) * 60.0,
        ),
        (
            scenario.road_path(stop1, stop2)?,
            WaypointKind::Stop2,
            f64::from(params.wait2) * 60.0,
        ),
        (scenario.road_path(stop2, depot)?, WaypointKind::Depot, 0.0),
    ];

    let mut waypoints = vec![Waypoint {
        position: depot,
        arrive: 0.0,
        depart: 0.0,
        kind: WaypointKind::Depot,
    }];
    let mut stop_windows = Vec::with_capacity(2);
    let mut clock = 0.0;
    let mut driving = 0.0;
    for (path, end_kind, wait) in legs {
        let pts = path.points();
        let mut prev = waypoints.last().unwrap().position;
        for (i, p) in pts.iter().enumerate().skip(1) {
            let dt = prev.dist(*p) / speed;
            clock += dt;
            driving += dt;
            prev = *p;
            let near_end = pts[pts.len() - 1].dist(*p) < MERGE_TOLERANCE_M;
            let near_last = waypoints.last().unwrap().position.dist(*p) < MERGE_TOLERANCE_M;
            if i + 1 < pts.len() && !near_end && !near_last {
                waypoints.push(Waypoint {
                    position: *p,
                    arrive: clock,
                    depart: clock,
                    kind: WaypointKind::Road,
                });
            }
        }
        let arrive = clock;
        clock += wait;
        waypoints.push(Waypoint {
            position: prev,
            arrive,
            depart: clock,
            kind: end_kind,
        });
        if end_kind != WaypointKind::Depot {
            stop_windows.push(StopWindow {
                waypoint: waypoints.len() - 1,
                open: arrive,
                close: clock,
            });
        }
    }

    let waiting = f64::from(params.wait1 + params.wait2) * 60.0;
    let covered_targets = covered_by_path(&waypoints, &scenario.targets, coverage_radius);
    let mut route = UgvRoute {
        waypoints,
        stop_windows,
        covered_targets,
        total_time: clock,
        energy: 0.0,
        driving_time: driving,
        waiting_time: waiting,
    };
    route.energy = ugv_energy(&route, &scenario.ugv_spec);
    Ok(route)
}
