//! Run reports, the completion-gap objective and the SVG route plot.

use std::fmt::Write as _;

use serde::Serialize;

use crate::geometry::Point2D;
use crate::outer::Evaluation;
use crate::scenario::Scenario;
use crate::ugv::UgvRoute;
use crate::vrp::{uav_power, RoutingGraph, UavPlan, VertexKind};

/// Gap between the UGV and UAV completion times, minutes.
pub fn outer_objective(ugv_total_min: f64, uav_total_min: f64) -> f64 {
    (ugv_total_min - uav_total_min).abs()
}

#[derive(Debug, Clone, Serialize)]
pub struct UgvSummary {
    pub travel_min: f64,
    pub energy_mj: f64,
    pub targets: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct UavSummary {
    pub travel_min: f64,
    pub energy_kj: f64,
    pub recharges_on_ugv: usize,
    pub recharges_on_depot: usize,
    pub targets: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamSummary {
    /// 1-based, as depots are numbered in the scenario figures.
    pub start_depot: usize,
    pub stop1_km: [f64; 2],
    pub stop2_km: [f64; 2],
    pub wait1_min: u32,
    pub wait2_min: u32,
    pub unit_vector: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub mode: String,
    pub seed: u64,
    pub provenance: String,
    pub feasible: bool,
    pub objective_min: f64,
    pub total_time_min: f64,
    pub total_targets: usize,
    pub ugv: UgvSummary,
    pub uav: UavSummary,
    pub params: ParamSummary,
    pub evaluations: usize,
    pub rounds: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub infeasibility: Option<String>,
    /// Omitted in deterministic runs so reports compare byte for byte.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_s: Option<f64>,
}

/// Rounds to a fixed number of decimals so reports do not carry float noise.
fn r(x: f64, places: i32) -> f64 {
    let k = 10f64.powi(places);
    (x * k).round() / k
}

impl RunReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        scenario: &Scenario,
        ev: &Evaluation,
        mode: &str,
        seed: u64,
        provenance: &str,
        evaluations: usize,
        rounds: usize,
        wall_clock_s: Option<f64>,
    ) -> Self {
        let ugv_targets = ev.ugv_route.as_ref().map_or(0, |u| u.covered_targets.len());
        let energy_mj = ev.ugv_route.as_ref().map_or(0.0, |u| u.energy / 1e6);
        let uav = ev.uav.unwrap_or_default();
        let stop_km = |k: usize| {
            ev.ugv_route.as_ref().map_or([f64::NAN; 2], |u| {
                let (x, y) = u.stop_position(&u.stop_windows[k]).to_km();
                [r(x, 4), r(y, 4)]
            })
        };
        Self {
            scenario: scenario.name.clone(),
            mode: mode.to_string(),
            seed,
            provenance: provenance.to_string(),
            feasible: ev.feasible(),
            objective_min: r(ev.fitness, 6),
            total_time_min: r(ev.ugv_min.max(ev.uav_min), 6),
            total_targets: scenario.targets.len(),
            ugv: UgvSummary {
                travel_min: r(ev.ugv_min, 6),
                energy_mj: r(energy_mj, 6),
                targets: ugv_targets,
            },
            uav: UavSummary {
                travel_min: r(ev.uav_min, 6),
                energy_kj: r(uav.energy_j / 1e3, 6),
                recharges_on_ugv: uav.recharges_on_ugv,
                recharges_on_depot: uav.recharges_on_depot,
                targets: uav.targets_visited,
            },
            params: ParamSummary {
                start_depot: ev.params.start_depot + 1,
                stop1_km: stop_km(0),
                stop2_km: stop_km(1),
                wait1_min: ev.params.wait1,
                wait2_min: ev.params.wait2,
                unit_vector: ev.unit.iter().map(|u| r(*u, 9)).collect(),
            },
            evaluations,
            rounds,
            infeasibility: ev.infeasibility.as_ref().map(|i| i.to_string()),
            wall_clock_s: wall_clock_s.map(|w| r(w, 3)),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Radius the UAV can fly out and back on a full charge, meters.
pub fn range_radius(scenario: &Scenario) -> f64 {
    let v = scenario.uav_spec.speed;
    let p = uav_power(v).unwrap_or(f64::NAN);
    scenario.uav_spec.fuel_capacity * v / (2.0 * p)
}

const PX_PER_KM: f64 = 36.0;
const MARGIN_PX: f64 = 24.0;

struct Frame {
    min_x: f64,
    max_y: f64,
    width: f64,
    height: f64,
}

impl Frame {
    fn fit(points: impl Iterator<Item = Point2D>) -> Self {
        let (mut lo_x, mut lo_y, mut hi_x, mut hi_y) =
            (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            lo_x = lo_x.min(p.x);
            lo_y = lo_y.min(p.y);
            hi_x = hi_x.max(p.x);
            hi_y = hi_y.max(p.y);
        }
        if !lo_x.is_finite() {
            (lo_x, lo_y, hi_x, hi_y) = (0.0, 0.0, 1000.0, 1000.0);
        }
        Self {
            min_x: lo_x,
            max_y: hi_y,
            width: (hi_x - lo_x) / 1000.0 * PX_PER_KM + 2.0 * MARGIN_PX,
            height: (hi_y - lo_y) / 1000.0 * PX_PER_KM + 2.0 * MARGIN_PX,
        }
    }

    fn xy(&self, p: Point2D) -> (f64, f64) {
        (
            MARGIN_PX + (p.x - self.min_x) / 1000.0 * PX_PER_KM,
            MARGIN_PX + (self.max_y - p.y) / 1000.0 * PX_PER_KM,
        )
    }

    fn points(&self, ps: impl Iterator<Item = Point2D>) -> String {
        ps.map(|p| {
            let (x, y) = self.xy(p);
            format!("{x:.1},{y:.1}")
        })
        .collect::<Vec<_>>()
        .join(" ")
    }
}

/// SVG figure: roads, UGV path, targets colored by the vehicle that covers
/// them (UAV red, UGV blue), depots, UAV tour, crosses where the UAV
/// recharges on the UGV and light range circles around the recharge points.
pub fn render_plot(scenario: &Scenario, ugv_route: &UgvRoute, graph: &RoutingGraph, plan: &UavPlan) -> String {
    let frame = Frame::fit(
        scenario
            .branches
            .iter()
            .flat_map(|b| b.points().iter().copied())
            .chain(scenario.targets.iter().copied())
            .chain(scenario.depots.iter().map(|d| d.position)),
    );
    let radius_px = range_radius(scenario) / 1000.0 * PX_PER_KM;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="0 0 {:.0} {:.0}">"#,
        frame.width, frame.height, frame.width, frame.height
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);

    let mut centers = vec![ugv_route.start()];
    for &v in &plan.tour {
        if graph.vertices[v].kind == VertexKind::UgvStop {
            centers.push(graph.vertices[v].position);
        }
    }
    for c in &centers {
        let (x, y) = frame.xy(*c);
        let _ = writeln!(
            s,
            r##"<circle class="range" cx="{x:.1}" cy="{y:.1}" r="{radius_px:.1}" fill="#add8e6" fill-opacity="0.15" stroke="#87ceeb"/>"##
        );
    }
    for b in &scenario.branches {
        let _ = writeln!(
            s,
            r##"<polyline class="road" points="{}" fill="none" stroke="#999999" stroke-width="4"/>"##,
            frame.points(b.points().iter().copied())
        );
    }
    let _ = writeln!(
        s,
        r##"<polyline class="ugv-path" points="{}" fill="none" stroke="#1f4fd1" stroke-width="1.5" stroke-dasharray="6 3"/>"##,
        frame.points(ugv_route.waypoints.iter().map(|w| w.position))
    );
    if plan.tour.len() > 1 {
        let _ = writeln!(
            s,
            r##"<polyline class="uav-path" points="{}" fill="none" stroke="#d62728" stroke-width="1"/>"##,
            frame.points(plan.tour.iter().map(|&v| graph.vertices[v].position))
        );
    }
    let by_uav: Vec<usize> = plan
        .tour
        .iter()
        .filter(|&&v| graph.vertices[v].kind == VertexKind::Target)
        .map(|&v| graph.vertices[v].source)
        .collect();
    for (i, t) in scenario.targets.iter().enumerate() {
        let (x, y) = frame.xy(*t);
        let (class, color) = if by_uav.contains(&i) {
            ("target-uav", "#d62728")
        } else if ugv_route.covered_targets.contains(&i) {
            ("target-ugv", "#1f4fd1")
        } else {
            ("target-missed", "#000000")
        };
        let _ = writeln!(
            s,
            r#"<circle class="{class}" cx="{x:.1}" cy="{y:.1}" r="3" fill="{color}"/>"#
        );
    }
    for d in &scenario.depots {
        let (x, y) = frame.xy(d.position);
        let _ = writeln!(
            s,
            r#"<rect class="depot" x="{:.1}" y="{:.1}" width="10" height="10" fill="black"><title>Depot {}</title></rect>"#,
            x - 5.0,
            y - 5.0,
            d.id + 1
        );
    }
    for c in centers.iter().skip(1) {
        let (x, y) = frame.xy(*c);
        let _ = writeln!(
            s,
            r##"<path class="cross" d="M{:.1},{:.1} L{:.1},{:.1} M{:.1},{:.1} L{:.1},{:.1}" stroke="#d62728" stroke-width="3"/>"##,
            x - 6.0,
            y - 6.0,
            x + 6.0,
            y + 6.0,
            x - 6.0,
            y + 6.0,
            x + 6.0,
            y - 6.0
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_completion_gives_zero() {
        assert_eq!(outer_objective(87.5, 87.5), 0.0);
        assert_eq!(outer_objective(10.0, 25.0), 15.0);
    }

    #[test]
    fn range_radius_of_bundled_uav() {
        let s = Scenario::bundled("scenario1").unwrap();
        assert!((range_radius(&s) - 7245.4).abs() < 1.0);
    }
}
