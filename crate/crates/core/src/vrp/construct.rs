use serde::Serialize;

use super::graph::RoutingGraph;
use super::plan::{quick_feasible, tour_cost, UavPlan};

/// Greedy construction could not place every target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstructionFailure {
    /// Target vertices that were never reached, in index order.
    pub unreachable: Vec<usize>,
    /// Targets that no recharge-to-recharge sortie can reach at all.
    pub beyond_range: Vec<usize>,
    pub partial_tour: Vec<usize>,
}

impl std::fmt::Display for ConstructionFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "unreachable target vertices {:?}", self.unreachable)?;
        if !self.beyond_range.is_empty() {
            write!(f, " ({:?} beyond range of every recharge node)", self.beyond_range)?;
        }
        Ok(())
    }
}

/// Targets for which no sortie between two recharge vertices is short enough.
pub fn targets_beyond_range(graph: &RoutingGraph) -> Vec<usize> {
    let end = graph.end();
    let budget = graph.capacity / graph.power;
    graph
        .targets()
        .filter(|&t| {
            let mut out = (0..end).map(|d| graph.cost(d, t)).fold(f64::INFINITY, f64::min);
            let back = (1..=end).map(|d| graph.cost(t, d)).fold(f64::INFINITY, f64::min);
            out += back;
            out > budget
        })
        .collect()
}

#[derive(Clone, Copy)]
struct State {
    vertex: usize,
    /// departure time from `vertex`
    depart: f64,
    fuel: f64,
}

/// Path-cheapest-arc construction: from the start vertex keep appending the
/// nearest feasible unvisited target; when none is safely reachable, divert
/// to the nearest usable recharge vertex. Ties go to the lowest index.
/// Falls back to [`cheapest_insertion`] when the greedy walk strands a target.
pub fn construct_initial(graph: &RoutingGraph) -> Result<UavPlan, ConstructionFailure> {
    match cheapest_arc(graph) {
        Ok(plan) => Ok(plan),
        Err(failure) => cheapest_insertion(graph)
            .map(|t| UavPlan::from_tour(graph, t))
            .ok_or(failure),
    }
}

/// Grows `start → end` by the feasible target insertion of least added
/// flight time. When no target fits, tries inserting a target together with
/// an unused recharge vertex. `None` if some target can never be placed.
pub fn cheapest_insertion(graph: &RoutingGraph) -> Option<Vec<usize>> {
    let end = graph.end();
    let mut tour = vec![0, end];
    let mut unplaced: Vec<usize> = graph.targets().collect();
    if unplaced.is_empty() {
        return Some(Vec::new());
    }
    let mut cand = Vec::with_capacity(graph.len() + 2);
    while !unplaced.is_empty() {
        let base = tour_cost(graph, &tour);
        let mut best: Option<(f64, usize, Vec<usize>)> = None;
        let consider = |cand: &[usize], k: usize, best: &mut Option<(f64, usize, Vec<usize>)>| {
            let delta = tour_cost(graph, cand) - base;
            if best.as_ref().is_some_and(|(b, _, _)| delta >= *b) || !quick_feasible(graph, cand) {
                return;
            }
            *best = Some((delta, k, cand.to_vec()));
        };
        for (k, &t) in unplaced.iter().enumerate() {
            for p in 1..tour.len() {
                cand.clear();
                cand.extend_from_slice(&tour[..p]);
                cand.push(t);
                cand.extend_from_slice(&tour[p..]);
                consider(&cand, k, &mut best);
            }
        }
        if best.is_none() {
            let unused: Vec<usize> = graph.intermediate_recharge().filter(|d| !tour.contains(d)).collect();
            for (k, &t) in unplaced.iter().enumerate() {
                for &d in &unused {
                    for p in 1..tour.len() {
                        for q in 1..=tour.len() {
                            cand.clear();
                            cand.extend_from_slice(&tour[..p]);
                            cand.push(t);
                            cand.extend_from_slice(&tour[p..]);
                            cand.insert(q, d);
                            consider(&cand, k, &mut best);
                        }
                    }
                }
            }
        }
        let (_, k, next) = best?;
        unplaced.swap_remove(k);
        tour = next;
    }
    Some(tour)
}

fn cheapest_arc(graph: &RoutingGraph) -> Result<UavPlan, ConstructionFailure> {
    let targets: Vec<usize> = graph.targets().collect();
    if targets.is_empty() {
        return Ok(UavPlan::empty(graph));
    }
    let beyond_range = targets_beyond_range(graph);
    let end = graph.end();
    let n = graph.len();
    let mut visited = vec![false; n];
    let mut remaining = targets.len();
    let mut tour = vec![0];
    let mut st = State {
        vertex: 0,
        depart: 0.0,
        fuel: graph.capacity,
    };

    let fail = |visited: &[bool], tour: Vec<usize>| ConstructionFailure {
        unreachable: graph.targets().filter(|&t| !visited[t]).collect(),
        beyond_range: beyond_range.clone(),
        partial_tour: tour,
    };

    while remaining > 0 {
        let mut best: Option<(f64, usize)> = None;
        for &j in &targets {
            if visited[j] {
                continue;
            }
            let c = graph.cost(st.vertex, j);
            if best.is_some_and(|(bc, _)| c >= bc) {
                continue;
            }
            let arrive = st.depart + c;
            let fuel = st.fuel - graph.power * c;
            if fuel < 0.0 || arrive > graph.vertices[j].window.1 {
                continue;
            }
            let at_j = State {
                vertex: j,
                depart: arrive,
                fuel,
            };
            let safe = if remaining == 1 {
                reach(graph, at_j, end).is_some()
            } else {
                graph
                    .intermediate_recharge()
                    .chain(std::iter::once(end))
                    .any(|d| !visited[d] && reach(graph, at_j, d).is_some())
            };
            if safe {
                best = Some((c, j));
            }
        }
        match best {
            Some((c, j)) => {
                st = State {
                    vertex: j,
                    depart: st.depart + c,
                    fuel: st.fuel - graph.power * c,
                };
                visited[j] = true;
                remaining -= 1;
                tour.push(j);
            }
            None => {
                if graph.is_recharge(st.vertex) {
                    return Err(fail(&visited, tour));
                }
                let mut best: Option<(f64, usize, State)> = None;
                for d in graph.intermediate_recharge() {
                    if visited[d] {
                        continue;
                    }
                    let c = graph.cost(st.vertex, d);
                    if best.as_ref().is_some_and(|(bc, _, _)| c >= *bc) {
                        continue;
                    }
                    if let Some(next) = reach(graph, st, d) {
                        best = Some((c, d, next));
                    }
                }
                let Some((_, d, next)) = best else {
                    return Err(fail(&visited, tour));
                };
                visited[d] = true;
                tour.push(d);
                st = next;
            }
        }
    }
    tour.push(end);
    Ok(UavPlan::from_tour(graph, tour))
}

/// State after flying from `st` to recharge vertex `d` and servicing there,
/// if fuel and the window allow it.
fn reach(graph: &RoutingGraph, st: State, d: usize) -> Option<State> {
    let c = graph.cost(st.vertex, d);
    let arrive = st.depart + c;
    let fuel = st.fuel - graph.power * c;
    let (lo, hi) = graph.vertices[d].window;
    if fuel < 0.0 || arrive > hi {
        return None;
    }
    if d == graph.end() {
        return Some(State {
            vertex: d,
            depart: arrive,
            fuel,
        });
    }
    let done = arrive.max(lo) + graph.recharge.recharge_time_clamped(fuel);
    (done <= hi).then_some(State {
        vertex: d,
        depart: done,
        fuel: graph.capacity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vrp::plan::check_feasible;
    use crate::vrp::plan::tests::toy;

    #[test]
    fn empty_target_set() {
        let g = toy((0.0, 1.0), &[]);
        let p = construct_initial(&g).unwrap();
        assert!(p.is_empty());
        assert_eq!(p.cost, 0.0);
    }

    #[test]
    fn collinear_targets_nearest_first() {
        // Targets listed out of order; greedy visits them by distance.
        let g = toy((0.0, 1.0), &[2.0, 0.5, 1.2]);
        let p = construct_initial(&g).unwrap();
        assert_eq!(p.tour, vec![0, 5, 6, 4, 3]);
        assert!(check_feasible(&g, &p).is_empty());
        assert_eq!(p.sorties(&g).len(), 1);
    }

    #[test]
    fn target_beyond_endurance_radius_fails() {
        // 7.5 km from the start/end, 4.5 km from the stop, ~8.1 km from the depot:
        // place it on the negative axis so every recharge node is > 7.25 km away.
        let g = toy((0.0, 20_000.0), &[1.0, -7.5]);
        let err = construct_initial(&g).unwrap_err();
        assert_eq!(err.unreachable, vec![5]);
        assert_eq!(err.beyond_range, vec![5]);
        assert!(err.to_string().contains('5'));
    }

    #[test]
    fn diverts_to_recharge_when_needed() {
        // 6 km and 6.5 km targets need a top-up at the stop (3 km) in between.
        let g = toy((0.0, 20_000.0), &[6.0, 6.5, -5.0]);
        let p = construct_initial(&g).unwrap();
        assert!(check_feasible(&g, &p).is_empty(), "{:?}", check_feasible(&g, &p));
        assert!(p.tour.iter().any(|&v| (1..3).contains(&v)));
    }

    #[test]
    fn insertion_rescues_stranded_greedy_walk() {
        use crate::geometry::Point2D;
        use crate::vrp::graph::{Vertex, VertexKind};
        // Nearest-first runs A, B, C and is 16 km long; A, C, B fits in 14.4 km.
        let h = 20_000.0;
        let v = |x, y, kind| Vertex {
            position: Point2D::from_km(x, y),
            kind,
            source: 0,
            window: (0.0, h),
        };
        let g = RoutingGraph::new(
            vec![
                v(0.0, 0.0, VertexKind::Start),
                v(0.0, 0.0, VertexKind::End),
                v(2.0, 0.0, VertexKind::Target),
                v(-2.0, 0.0, VertexKind::Target),
                v(0.0, 4.8, VertexKind::Target),
            ],
            287_700.0,
            10.0,
            h,
        );
        assert!(cheapest_arc(&g).is_err());
        let p = construct_initial(&g).unwrap();
        assert!(check_feasible(&g, &p).is_empty());
        assert_eq!(p.tour.len(), 5);
    }
}
