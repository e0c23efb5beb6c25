//! UAV plans as a single "giant tour" `0 … m` whose recharge vertices split it
//! into sorties, with forward schedule propagation and direct constraint checks.

use std::fmt;
use std::fmt::Write as _;

use serde::Serialize;

use super::graph::{RoutingGraph, VertexKind};

const FUEL_EPS: f64 = 1e-6;
const TIME_EPS: f64 = 1e-6;

/// A candidate aerial route and its propagated schedule.
///
/// All per-visit vectors are parallel to `tour`. At intermediate recharge
/// vertices `fuel_at` is the level on departure (always the capacity) while
/// `arrival_fuel` is what the UAV landed with; `service_at` there covers any
/// idle time before the window opens plus the recharge itself.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UavPlan {
    pub tour: Vec<usize>,
    pub time_at: Vec<f64>,
    pub service_at: Vec<f64>,
    pub fuel_at: Vec<f64>,
    pub arrival_fuel: Vec<f64>,
    /// Intermediate recharge vertices the plan does not use.
    pub dropped: Vec<usize>,
    /// Total UAV travel seconds, Σ c_ij over the tour.
    pub cost: f64,
}

impl UavPlan {
    pub fn empty(graph: &RoutingGraph) -> Self {
        Self::from_tour(graph, Vec::new())
    }

    pub fn from_tour(graph: &RoutingGraph, tour: Vec<usize>) -> Self {
        let s = propagate(graph, &tour);
        let mut used = vec![false; graph.len()];
        for &v in &tour {
            if v < used.len() {
                used[v] = true;
            }
        }
        let dropped = graph.intermediate_recharge().filter(|&d| !used[d]).collect();
        Self {
            cost: tour_cost(graph, &tour),
            tour,
            time_at: s.time_at,
            service_at: s.service_at,
            fuel_at: s.fuel_at,
            arrival_fuel: s.arrival_fuel,
            dropped,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.tour.is_empty()
    }

    /// The tour split at recharge vertices; neighbouring sorties share their
    /// boundary vertex.
    pub fn sorties<'a>(&'a self, graph: &RoutingGraph) -> Vec<&'a [usize]> {
        let mut out = Vec::new();
        let mut begin = 0;
        for (k, &v) in self.tour.iter().enumerate().skip(1) {
            if graph.is_recharge(v) {
                out.push(&self.tour[begin..=k]);
                begin = k;
            }
        }
        out
    }

    /// Arrival time at the end vertex (0 for the empty plan).
    pub fn completion_time(&self) -> f64 {
        self.time_at.last().copied().unwrap_or(0.0)
    }

    pub fn to_csv(&self, graph: &RoutingGraph) -> String {
        let mut out = String::from("sortie,seq,vertex_kind,x_km,y_km,t_s,fuel_j,service_s\n");
        let mut pos = 0;
        for (s, sortie) in self.sorties(graph).iter().enumerate() {
            for (seq, &v) in sortie.iter().enumerate() {
                let k = pos + seq;
                let vert = &graph.vertices[v];
                let (x, y) = vert.position.to_km();
                let kind = match vert.kind {
                    VertexKind::Start => "start",
                    VertexKind::UgvStop => "ugv_stop",
                    VertexKind::Depot => "depot",
                    VertexKind::End => "end",
                    VertexKind::Target => "target",
                };
                let (fuel, service) = if seq == 0 {
                    (self.fuel_at[k], self.service_at[k])
                } else if seq + 1 == sortie.len() {
                    (self.arrival_fuel[k], 0.0)
                } else {
                    (self.fuel_at[k], self.service_at[k])
                };
                let t = if seq == 0 {
                    self.time_at[k] + self.service_at[k]
                } else {
                    self.time_at[k]
                };
                let _ = writeln!(out, "{s},{seq},{kind},{x:.4},{y:.4},{t:.1},{fuel:.1},{service:.1}");
            }
            pos += sortie.len() - 1;
        }
        out
    }
}

pub(crate) fn tour_cost(graph: &RoutingGraph, tour: &[usize]) -> f64 {
    let n = graph.len();
    tour.windows(2)
        .map(|w| {
            if w[0] < n && w[1] < n {
                graph.cost(w[0], w[1])
            } else {
                f64::NAN
            }
        })
        .sum()
}

struct Schedule {
    time_at: Vec<f64>,
    service_at: Vec<f64>,
    fuel_at: Vec<f64>,
    arrival_fuel: Vec<f64>,
}

/// Service at an intermediate recharge vertex: idle until the window opens,
/// then recharge from `arrival_fuel`.
#[inline]
fn recharge_service(graph: &RoutingGraph, v: usize, arrive: f64, arrival_fuel: f64) -> (f64, f64) {
    let idle = (graph.vertices[v].window.0 - arrive).max(0.0);
    (idle, graph.recharge.recharge_time_clamped(arrival_fuel))
}

fn propagate(graph: &RoutingGraph, tour: &[usize]) -> Schedule {
    let n = tour.len();
    let mut s = Schedule {
        time_at: Vec::with_capacity(n),
        service_at: Vec::with_capacity(n),
        fuel_at: Vec::with_capacity(n),
        arrival_fuel: Vec::with_capacity(n),
    };
    let q = graph.capacity;
    for (k, &v) in tour.iter().enumerate() {
        if v >= graph.len() {
            // Unknown vertex: keep vectors parallel; check_feasible reports it.
            s.time_at.push(f64::NAN);
            s.service_at.push(0.0);
            s.fuel_at.push(f64::NAN);
            s.arrival_fuel.push(f64::NAN);
            continue;
        }
        if k == 0 {
            s.time_at.push(0.0);
            s.service_at.push(0.0);
            s.fuel_at.push(q);
            s.arrival_fuel.push(q);
            continue;
        }
        let u = tour[k - 1];
        let c = if u < graph.len() { graph.cost(u, v) } else { f64::NAN };
        let arrive = s.time_at[k - 1] + s.service_at[k - 1] + c;
        let fuel = s.fuel_at[k - 1] - graph.power * c;
        s.time_at.push(arrive);
        s.arrival_fuel.push(fuel);
        match graph.vertices[v].kind {
            VertexKind::UgvStop | VertexKind::Depot => {
                let (idle, charge) = recharge_service(graph, v, arrive, fuel);
                s.service_at.push(idle + charge);
                s.fuel_at.push(q);
            }
            _ => {
                s.service_at.push(0.0);
                s.fuel_at.push(fuel);
            }
        }
    }
    s
}

/// The rule a plan breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// Every target visited exactly once.
    TargetCoverage,
    /// Optional recharge stops used at most once.
    OptionalStopReuse,
    /// The tour leaves the start vertex once and finishes at the end vertex.
    StartEnd,
    /// Fuel stays within `[0, Q]`.
    FuelBounds,
    /// Fuel is reset to `Q` on departure from a recharge vertex.
    Refuel,
    /// Visits respect vertex time windows.
    TimeWindow,
    /// Two recharge vertices may not be visited back to back.
    ConsecutiveRecharge,
    /// Vertex id not in the graph.
    UnknownVertex,
    /// Stored schedule disagrees with forward propagation.
    Schedule,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::TargetCoverage => "target coverage (flow conservation)",
            Rule::OptionalStopReuse => "optional recharge stop used more than once",
            Rule::StartEnd => "start/end vertex",
            Rule::FuelBounds => "fuel bounds",
            Rule::Refuel => "refuel to capacity",
            Rule::TimeWindow => "time window",
            Rule::ConsecutiveRecharge => "consecutive recharge stops",
            Rule::UnknownVertex => "unknown vertex",
            Rule::Schedule => "schedule propagation",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub rule: Rule,
    pub vertex: Option<usize>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.vertex {
            Some(v) => write!(f, "{} at vertex {v}: {}", self.rule, self.detail),
            None => write!(f, "{}: {}", self.rule, self.detail),
        }
    }
}

/// Every rule the plan breaks; empty iff feasible.
pub fn check_feasible(graph: &RoutingGraph, plan: &UavPlan) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |rule, vertex, detail: String| out.push(Violation { rule, vertex, detail });
    let tour = &plan.tour;
    let n = graph.len();
    let end = graph.end();

    if let Some(&bad) = tour.iter().find(|&&v| v >= n) {
        push(Rule::UnknownVertex, Some(bad), format!("graph has {n} vertices"));
        return out;
    }

    let mut seen = vec![0usize; n];
    for &v in tour {
        seen[v] += 1;
    }
    for t in graph.targets() {
        match seen[t] {
            1 => {}
            0 => push(Rule::TargetCoverage, Some(t), "target not visited".into()),
            k => push(Rule::TargetCoverage, Some(t), format!("target visited {k} times")),
        }
    }
    if tour.is_empty() {
        return out;
    }

    if tour[0] != 0 {
        push(
            Rule::StartEnd,
            Some(tour[0]),
            "tour must start at the start vertex".into(),
        );
    }
    if *tour.last().unwrap() != end {
        push(
            Rule::StartEnd,
            tour.last().copied(),
            "tour must finish at the end vertex".into(),
        );
    }
    if seen[0] > 1 || seen[end] > 1 {
        push(Rule::StartEnd, None, "start or end vertex visited mid-tour".into());
    }
    for d in graph.intermediate_recharge() {
        if seen[d] > 1 {
            push(Rule::OptionalStopReuse, Some(d), format!("used {} times", seen[d]));
        }
    }
    for w in tour.windows(2) {
        if graph.is_recharge(w[0]) && graph.is_recharge(w[1]) {
            push(
                Rule::ConsecutiveRecharge,
                Some(w[1]),
                format!("arc {} -> {} joins two recharge vertices", w[0], w[1]),
            );
        }
    }

    let s = propagate(graph, tour);
    let q = graph.capacity;
    for (k, &v) in tour.iter().enumerate() {
        let vert = &graph.vertices[v];
        let arrival = s.arrival_fuel[k];
        if arrival < -FUEL_EPS || arrival > q + FUEL_EPS {
            push(
                Rule::FuelBounds,
                Some(v),
                format!("fuel {arrival:.1} J outside [0, {q:.1}]"),
            );
        }
        let (lo, hi) = vert.window;
        let t = s.time_at[k];
        match vert.kind {
            VertexKind::UgvStop | VertexKind::Depot => {
                let done = t + s.service_at[k];
                if t > hi + TIME_EPS || done > hi + TIME_EPS {
                    push(
                        Rule::TimeWindow,
                        Some(v),
                        format!("arrive {t:.1} s, recharged {done:.1} s, window [{lo:.1}, {hi:.1}]"),
                    );
                }
            }
            _ => {
                if t < lo - TIME_EPS || t > hi + TIME_EPS {
                    push(
                        Rule::TimeWindow,
                        Some(v),
                        format!("arrive {t:.1} s, window [{lo:.1}, {hi:.1}]"),
                    );
                }
            }
        }
        if k + 1 < tour.len() && vert.is_recharge() && plan.fuel_at.get(k) != Some(&q) {
            push(Rule::Refuel, Some(v), "departure fuel is not the capacity".into());
        }
    }

    let same = |a: &[f64], b: &[f64]| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-6);
    if !(same(&plan.time_at, &s.time_at)
        && same(&plan.service_at, &s.service_at)
        && same(&plan.fuel_at, &s.fuel_at)
        && (plan.cost - tour_cost(graph, tour)).abs() <= 1e-6)
    {
        push(
            Rule::Schedule,
            None,
            "stored times, fuel or cost differ from propagation".into(),
        );
    }
    out
}

/// Fast feasibility test for tours produced by the move operators, which
/// preserve target coverage and stop uniqueness by construction.
pub fn quick_feasible(graph: &RoutingGraph, tour: &[usize]) -> bool {
    let Some((&first, _)) = tour.split_first() else {
        return graph.targets().is_empty();
    };
    let end = graph.end();
    if first != 0 || *tour.last().unwrap() != end {
        return false;
    }
    let q = graph.capacity;
    let (mut t, mut service, mut fuel) = (0.0, 0.0, q);
    let last = tour.len() - 1;
    for k in 1..tour.len() {
        let (u, v) = (tour[k - 1], tour[k]);
        let (ru, rv) = (graph.is_recharge(u), graph.is_recharge(v));
        if ru && rv {
            return false;
        }
        let c = graph.cost(u, v);
        t += service + c;
        fuel -= graph.power * c;
        if fuel < -FUEL_EPS {
            return false;
        }
        let vert = &graph.vertices[v];
        if t > vert.window.1 + TIME_EPS {
            return false;
        }
        service = 0.0;
        if rv {
            if v == 0 || (v == end) != (k == last) {
                return false;
            }
            if v != end {
                let (idle, charge) = recharge_service(graph, v, t, fuel);
                service = idle + charge;
                if t + service > vert.window.1 + TIME_EPS {
                    return false;
                }
                fuel = q;
            }
        }
    }
    true
}

/// Table-style summary of a feasible plan.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct UavMetrics {
    /// Completion time including service, seconds.
    pub travel_s: f64,
    /// Pure flight time, seconds.
    pub flight_s: f64,
    pub energy_j: f64,
    pub targets_visited: usize,
    pub recharges_on_ugv: usize,
    pub recharges_on_depot: usize,
}

pub fn evaluate_plan(graph: &RoutingGraph, plan: &UavPlan) -> Result<UavMetrics, Vec<Violation>> {
    let violations = check_feasible(graph, plan);
    if !violations.is_empty() {
        return Err(violations);
    }
    let mut m = UavMetrics {
        travel_s: plan.completion_time(),
        flight_s: plan.cost,
        energy_j: plan.tour.windows(2).map(|w| graph.arc_energy(w[0], w[1])).sum(),
        ..UavMetrics::default()
    };
    for &v in &plan.tour {
        match graph.vertices[v].kind {
            VertexKind::Target => m.targets_visited += 1,
            VertexKind::UgvStop => m.recharges_on_ugv += 1,
            VertexKind::Depot => m.recharges_on_depot += 1,
            _ => {}
        }
    }
    Ok(m)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::geometry::Point2D;
    use crate::vrp::graph::Vertex;

    /// Start/end at the origin, stop at (3 km, 0) open during `window`,
    /// a free depot at (0, 3 km), and targets at the given x positions (km) on y = 0.
    pub(crate) fn toy(window: (f64, f64), targets_km: &[f64]) -> RoutingGraph {
        let h = 20_000.0;
        let v = |x: f64, y: f64, kind, window| Vertex {
            position: Point2D::from_km(x, y),
            kind,
            source: 0,
            window,
        };
        let mut vs = vec![
            v(0.0, 0.0, VertexKind::Start, (0.0, h)),
            v(3.0, 0.0, VertexKind::UgvStop, window),
            v(0.0, 3.0, VertexKind::Depot, (0.0, h)),
            v(0.0, 0.0, VertexKind::End, (0.0, h)),
        ];
        for &x in targets_km {
            vs.push(v(x, 0.0, VertexKind::Target, (0.0, h)));
        }
        RoutingGraph::new(vs, 287_700.0, 10.0, h)
    }

    #[test]
    fn empty_plan_on_empty_graph() {
        let g = toy((0.0, 1.0), &[]);
        let p = UavPlan::empty(&g);
        assert!(check_feasible(&g, &p).is_empty());
        assert_eq!(evaluate_plan(&g, &p).unwrap(), UavMetrics::default());
        assert!(quick_feasible(&g, &[]));
    }

    #[test]
    fn out_and_back_metrics() {
        let g = toy((0.0, 1.0), &[1.0]);
        let p = UavPlan::from_tour(&g, vec![0, 4, 3]);
        let m = evaluate_plan(&g, &p).unwrap();
        assert!((m.travel_s - 200.0).abs() < 1e-9);
        assert!((m.energy_j - 39_708.0).abs() < 1e-6);
        assert_eq!(m.targets_visited, 1);
        assert_eq!((m.recharges_on_ugv, m.recharges_on_depot), (0, 0));
    }

    #[test]
    fn endurance_exceeded_is_fuel_violation() {
        // 8 km out and back is 1600 s of flight, beyond the ~1449 s endurance.
        let g = toy((0.0, 1.0), &[8.0]);
        let p = UavPlan::from_tour(&g, vec![0, 4, 3]);
        let v = check_feasible(&g, &p);
        assert!(v.iter().any(|v| v.rule == Rule::FuelBounds), "{v:?}");
        assert!(!quick_feasible(&g, &p.tour));
    }

    #[test]
    fn late_stop_arrival_is_window_violation() {
        let g = toy((0.0, 150.0), &[1.0, 2.0]);
        // 0 -> target (100 s) -> stop (200 s) arrives at 300 s > 150 s.
        let p = UavPlan::from_tour(&g, vec![0, 4, 1, 5, 3]);
        let v = check_feasible(&g, &p);
        assert!(v.iter().any(|v| v.rule == Rule::TimeWindow), "{v:?}");
        assert!(!quick_feasible(&g, &p.tour));
    }

    #[test]
    fn early_arrival_idles_until_window_opens() {
        let g = toy((1000.0, 5000.0), &[1.0, 2.0]);
        let p = UavPlan::from_tour(&g, vec![0, 4, 1, 5, 3]);
        // Arrive at the stop after 300 s, idle 700 s, then top up.
        let charge = g.recharge.recharge_time_clamped(287_700.0 - 300.0 * g.power);
        assert!((p.service_at[2] - (700.0 + charge)).abs() < 1e-9);
        assert!(check_feasible(&g, &p).is_empty());
        assert_eq!(p.fuel_at[2], g.capacity);
        assert!(quick_feasible(&g, &p.tour));
    }

    #[test]
    fn consecutive_recharge_and_reuse_detected() {
        let g = toy((0.0, 20_000.0), &[1.0]);
        let p = UavPlan::from_tour(&g, vec![0, 4, 1, 2, 3]);
        let v = check_feasible(&g, &p);
        assert!(v.iter().any(|v| v.rule == Rule::ConsecutiveRecharge));
        assert!(!quick_feasible(&g, &p.tour));
        let p = UavPlan::from_tour(&g, vec![0, 4, 1, 4, 1, 3]);
        let rules: Vec<_> = check_feasible(&g, &p).into_iter().map(|v| v.rule).collect();
        assert!(rules.contains(&Rule::OptionalStopReuse));
        assert!(rules.contains(&Rule::TargetCoverage));
    }

    #[test]
    fn missing_target_and_bad_endpoints() {
        let g = toy((0.0, 20_000.0), &[1.0, 2.0]);
        let p = UavPlan::from_tour(&g, vec![0, 4, 3]);
        assert!(check_feasible(&g, &p).iter().any(|v| v.rule == Rule::TargetCoverage));
        let p = UavPlan::from_tour(&g, vec![2, 4, 5, 3]);
        assert!(check_feasible(&g, &p).iter().any(|v| v.rule == Rule::StartEnd));
        let p = UavPlan::from_tour(&g, vec![0, 4, 99, 3]);
        assert!(check_feasible(&g, &p).iter().any(|v| v.rule == Rule::UnknownVertex));
    }

    #[test]
    fn tampered_fuel_breaks_refuel_rule() {
        let g = toy((0.0, 20_000.0), &[1.0, 2.0]);
        let mut p = UavPlan::from_tour(&g, vec![0, 4, 1, 5, 3]);
        p.fuel_at[2] = 1000.0;
        let rules: Vec<_> = check_feasible(&g, &p).into_iter().map(|v| v.rule).collect();
        assert!(rules.contains(&Rule::Refuel));
        assert!(rules.contains(&Rule::Schedule));
    }

    #[test]
    fn sorties_split_on_recharge() {
        let g = toy((0.0, 20_000.0), &[1.0, 2.0]);
        let p = UavPlan::from_tour(&g, vec![0, 4, 1, 5, 3]);
        let s = p.sorties(&g);
        assert_eq!(s, vec![&[0, 4, 1][..], &[1, 5, 3][..]]);
        assert_eq!(p.dropped, vec![2]);
        let csv = p.to_csv(&g);
        assert_eq!(csv.lines().count(), 7);
    }
}
