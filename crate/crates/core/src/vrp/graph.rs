use serde::Serialize;

use crate::geometry::Point2D;
use crate::scenario::Scenario;
use crate::ugv::UgvRoute;

use super::energy::{uav_power, RechargeModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKind {
    Start,
    UgvStop,
    Depot,
    End,
    Target,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Vertex {
    pub position: Point2D,
    pub kind: VertexKind,
    /// Depot id, stop number (1/2) or scenario target index.
    pub source: usize,
    pub window: (f64, f64),
}

impl Vertex {
    pub fn is_recharge(&self) -> bool {
        self.kind != VertexKind::Target
    }
}

/// Vertices `0..=end` are recharge nodes (start, UGV stops, depots, end copy of
/// the start); vertices after `end` are the mandatory targets.
#[derive(Debug, Clone)]
pub struct RoutingGraph {
    pub vertices: Vec<Vertex>,
    /// Travel seconds, row-major `n × n`.
    cost: Vec<f64>,
    /// J
    pub capacity: f64,
    /// s
    pub horizon: f64,
    /// m/s
    pub speed: f64,
    /// W at cruise speed.
    pub power: f64,
    pub recharge: RechargeModel,
}

impl RoutingGraph {
    /// Builds the graph from raw parts; the cost matrix is Euclidean distance
    /// divided by `speed`.
    pub fn new(vertices: Vec<Vertex>, capacity: f64, speed: f64, horizon: f64) -> Self {
        let n = vertices.len();
        let mut cost = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let c = vertices[i].position.dist(vertices[j].position) / speed;
                cost[i * n + j] = c;
                cost[j * n + i] = c;
            }
        }
        let recharge = RechargeModel {
            capacity,
            ..RechargeModel::default()
        };
        Self {
            vertices,
            cost,
            capacity,
            horizon,
            speed,
            power: uav_power(speed).expect("uav cruise speed within model range"),
            recharge,
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    #[inline]
    pub fn cost(&self, i: usize, j: usize) -> f64 {
        self.cost[i * self.vertices.len() + j]
    }

    #[inline]
    pub fn arc_energy(&self, i: usize, j: usize) -> f64 {
        self.power * self.cost(i, j)
    }

    /// Index of the end vertex `m`.
    pub fn end(&self) -> usize {
        self.vertices
            .iter()
            .rposition(|v| v.kind == VertexKind::End)
            .expect("graph has an end vertex")
    }

    #[inline]
    pub fn is_recharge(&self, v: usize) -> bool {
        self.vertices[v].is_recharge()
    }

    pub fn targets(&self) -> std::ops::Range<usize> {
        (self.end() + 1)..self.vertices.len()
    }

    /// Recharge vertices the UAV may use mid-mission (excludes start and end).
    pub fn intermediate_recharge(&self) -> std::ops::Range<usize> {
        1..self.end()
    }

    pub fn mean_arc_cost(&self) -> f64 {
        let n = self.len();
        if n < 2 {
            return 0.0;
        }
        self.cost.iter().sum::<f64>() / (n * (n - 1)) as f64
    }

    /// One-way radius reachable with a safe return on a full charge.
    pub fn endurance_radius(&self) -> f64 {
        self.capacity / self.power * self.speed / 2.0
    }
}

/// Builds the inner routing graph for a UGV route: targets the UGV does not
/// cover, plus the start depot, both UGV stops, every fixed depot and the end.
pub fn build_routing_graph(scenario: &Scenario, ugv_route: &UgvRoute) -> RoutingGraph {
    let horizon = scenario.horizon;
    let open = (0.0, horizon);
    let start = ugv_route.start();
    let start_depot = scenario
        .depots
        .iter()
        .find(|d| d.position.dist(start) < 1e-6)
        .map_or(0, |d| d.id);
    let mut vertices = vec![Vertex {
        position: start,
        kind: VertexKind::Start,
        source: start_depot,
        window: open,
    }];
    for (k, w) in ugv_route.stop_windows.iter().enumerate() {
        vertices.push(Vertex {
            position: ugv_route.stop_position(w),
            kind: VertexKind::UgvStop,
            source: k + 1,
            window: (w.open, w.close),
        });
    }
    for d in &scenario.depots {
        vertices.push(Vertex {
            position: d.position,
            kind: VertexKind::Depot,
            source: d.id,
            window: open,
        });
    }
    vertices.push(Vertex {
        position: start,
        kind: VertexKind::End,
        source: start_depot,
        window: open,
    });
    for (i, t) in scenario.targets.iter().enumerate() {
        if !ugv_route.covered_targets.contains(&i) {
            vertices.push(Vertex {
                position: *t,
                kind: VertexKind::Target,
                source: i,
                window: open,
            });
        }
    }
    RoutingGraph::new(
        vertices,
        scenario.uav_spec.fuel_capacity,
        scenario.uav_spec.speed,
        horizon,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn line_graph() -> RoutingGraph {
        let v = |x: f64, kind, source| Vertex {
            position: Point2D::new(x, 0.0),
            kind,
            source,
            window: (0.0, 10_000.0),
        };
        RoutingGraph::new(
            vec![
                v(0.0, VertexKind::Start, 0),
                v(0.0, VertexKind::End, 0),
                v(1000.0, VertexKind::Target, 0),
                v(2500.0, VertexKind::Target, 1),
            ],
            287_700.0,
            10.0,
            10_000.0,
        )
    }

    #[test]
    fn cost_matrix_is_symmetric_metric() {
        let g = line_graph();
        assert_eq!(g.cost(0, 0), 0.0);
        assert_eq!(g.cost(0, 2), 100.0);
        assert_eq!(g.cost(2, 0), 100.0);
        assert_eq!(g.end(), 1);
        assert_eq!(g.targets(), 2..4);
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    assert!(g.cost(i, k) <= g.cost(i, j) + g.cost(j, k) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn endurance_radius_is_about_7_25_km() {
        assert!((line_graph().endurance_radius() - 7245.4).abs() < 1.0);
    }
}
