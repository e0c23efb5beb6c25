//! Best-improvement local search and guided local search over arc features.

use std::time::{Duration, Instant};

use super::construct::{construct_initial, ConstructionFailure};
use super::graph::RoutingGraph;
use super::moves::{visit, OPERATORS};
use super::plan::{quick_feasible, tour_cost, UavPlan};

#[derive(Debug, Clone, PartialEq)]
pub struct InnerConfig {
    /// Absolute penalty factor; `None` means `lambda_factor × mean arc cost`.
    pub lambda: Option<f64>,
    pub lambda_factor: f64,
    /// Feasibility checks allowed per solve.
    pub max_evaluations: usize,
    /// Penalization rounds allowed per solve.
    pub max_penalty_rounds: usize,
    /// Wall-clock cap; ignored when `None` (deterministic runs).
    pub time_limit: Option<Duration>,
}

impl Default for InnerConfig {
    fn default() -> Self {
        Self {
            lambda: None,
            lambda_factor: 0.1,
            max_evaluations: 20_000,
            max_penalty_rounds: 50,
            time_limit: Some(Duration::from_secs(2)),
        }
    }
}

impl InnerConfig {
    pub fn deterministic(mut self) -> Self {
        self.time_limit = None;
        self
    }

    pub fn resolved_lambda(&self, graph: &RoutingGraph) -> f64 {
        self.lambda
            .unwrap_or_else(|| self.lambda_factor * graph.mean_arc_cost())
    }
}

/// Penalty counters over undirected arcs.
#[derive(Debug, Clone)]
pub struct GlsState {
    pub lambda: f64,
    n: usize,
    penalties: Vec<u32>,
}

impl GlsState {
    pub fn new(graph: &RoutingGraph, lambda: f64) -> Self {
        let n = graph.len();
        Self {
            lambda,
            n,
            penalties: vec![0; n * n],
        }
    }

    #[inline]
    fn key(&self, i: usize, j: usize) -> usize {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        a * self.n + b
    }

    pub fn penalty(&self, i: usize, j: usize) -> u32 {
        self.penalties[self.key(i, j)]
    }

    pub fn penalize(&mut self, i: usize, j: usize) {
        let k = self.key(i, j);
        self.penalties[k] += 1;
    }

    /// `O(x) + λ Σ p_a c_a` over the arcs `a` of `tour`.
    pub fn augmented_cost(&self, graph: &RoutingGraph, tour: &[usize]) -> f64 {
        let mut base = 0.0;
        let mut pen = 0.0;
        for w in tour.windows(2) {
            let c = graph.cost(w[0], w[1]);
            base += c;
            let p = self.penalty(w[0], w[1]);
            if p > 0 {
                pen += f64::from(p) * c;
            }
        }
        base + self.lambda * pen
    }

    /// Increments the penalty of every tour arc with maximal utility
    /// `c_a / (1 + p_a)`. Returns the penalized arcs.
    pub fn penalize_max_utility(&mut self, graph: &RoutingGraph, tour: &[usize]) -> Vec<(usize, usize)> {
        let util = |s: &Self, i, j| graph.cost(i, j) / (1.0 + f64::from(s.penalty(i, j)));
        let best = tour
            .windows(2)
            .map(|w| util(self, w[0], w[1]))
            .fold(f64::NEG_INFINITY, f64::max);
        if !(best > 0.0) {
            return Vec::new();
        }
        let mut hit: Vec<(usize, usize)> = tour
            .windows(2)
            .filter(|w| util(self, w[0], w[1]) >= best)
            .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
            .collect();
        hit.sort_unstable();
        hit.dedup();
        for &(i, j) in &hit {
            self.penalize(i, j);
        }
        hit
    }
}

struct Budget {
    used: usize,
    max: usize,
    deadline: Option<Instant>,
}

impl Budget {
    fn new(cfg: &InnerConfig) -> Self {
        Self {
            used: 0,
            max: cfg.max_evaluations,
            deadline: cfg.time_limit.map(|d| Instant::now() + d),
        }
    }

    fn exhausted(&self) -> bool {
        if self.used >= self.max {
            return true;
        }
        match self.deadline {
            Some(d) if self.used.is_multiple_of(64) => Instant::now() >= d,
            _ => false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchStats {
    pub evaluations: usize,
    pub local_optima: usize,
    pub penalized_arcs: usize,
}

/// Descends on the augmented cost until no operator improves it. Keeps
/// `best` updated whenever an accepted tour lowers the true cost.
fn descend(
    graph: &RoutingGraph,
    tour: &mut Vec<usize>,
    gls: &GlsState,
    budget: &mut Budget,
    best: &mut (f64, Vec<usize>),
) {
    loop {
        let mut improved = false;
        for op in OPERATORS {
            if budget.exhausted() {
                return;
            }
            let current = gls.augmented_cost(graph, tour);
            let mut chosen: Option<(f64, Vec<usize>)> = None;
            visit(graph, tour, op, &mut |cand| {
                let aug = gls.augmented_cost(graph, cand);
                if aug >= current - 1e-9 || chosen.as_ref().is_some_and(|(b, _)| aug >= *b) {
                    return;
                }
                if budget.exhausted() {
                    return;
                }
                budget.used += 1;
                if quick_feasible(graph, cand) {
                    chosen = Some((aug, cand.to_vec()));
                }
            });
            if let Some((_, t)) = chosen {
                *tour = t;
                improved = true;
                let c = tour_cost(graph, tour);
                if c < best.0 - 1e-9 {
                    *best = (c, tour.clone());
                }
            }
        }
        if !improved {
            return;
        }
    }
}

/// Plain best-improvement local search (no penalties) from `plan`.
pub fn local_search(graph: &RoutingGraph, plan: &UavPlan, cfg: &InnerConfig) -> UavPlan {
    let mut cfg = cfg.clone();
    cfg.lambda = Some(0.0);
    improve(graph, plan, &cfg).0
}

/// Guided local search from `plan` under `cfg`.
pub fn improve(graph: &RoutingGraph, plan: &UavPlan, cfg: &InnerConfig) -> (UavPlan, SearchStats) {
    let mut stats = SearchStats {
        evaluations: 0,
        local_optima: 0,
        penalized_arcs: 0,
    };
    if plan.tour.len() < 3 {
        return (plan.clone(), stats);
    }
    let lambda = cfg.resolved_lambda(graph);
    let mut gls = GlsState::new(graph, lambda);
    let mut budget = Budget::new(cfg);
    let mut tour = plan.tour.clone();
    let mut best = (plan.cost, tour.clone());
    loop {
        descend(graph, &mut tour, &gls, &mut budget, &mut best);
        stats.local_optima += 1;
        if lambda == 0.0 || budget.exhausted() || stats.local_optima > cfg.max_penalty_rounds {
            break;
        }
        stats.penalized_arcs += gls.penalize_max_utility(graph, &tour).len();
    }
    stats.evaluations = budget.used;
    (UavPlan::from_tour(graph, best.1), stats)
}

/// Construct with path-cheapest-arc, then run guided local search.
pub fn guided_local_search(graph: &RoutingGraph, cfg: &InnerConfig) -> Result<UavPlan, ConstructionFailure> {
    let initial = construct_initial(graph)?;
    Ok(improve(graph, &initial, cfg).0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vrp::plan::check_feasible;
    use crate::vrp::plan::tests::toy;

    #[test]
    fn single_penalty_adds_lambda_times_cost() {
        let g = toy((0.0, 20_000.0), &[1.0, 2.5]);
        let mut s = GlsState::new(&g, 0.7);
        let tour = [0, 4, 5, 3];
        let before = s.augmented_cost(&g, &tour);
        assert_eq!(before, tour_cost(&g, &tour));
        s.penalize(5, 4);
        let after = s.augmented_cost(&g, &tour);
        assert_eq!(after - before, 0.7 * g.cost(4, 5));
    }

    #[test]
    fn max_utility_arc_is_penalized() {
        let g = toy((0.0, 20_000.0), &[1.0, 2.5]);
        let mut s = GlsState::new(&g, 1.0);
        // Arcs: 0-4 (100 s), 4-5 (150 s), 5-3 (250 s).
        assert_eq!(s.penalize_max_utility(&g, &[0, 4, 5, 3]), vec![(3, 5)]);
        // Utility of 3-5 halves to 125 s, so 4-5 (150 s) is next.
        assert_eq!(s.penalize_max_utility(&g, &[0, 4, 5, 3]), vec![(4, 5)]);
    }

    #[test]
    fn lambda_zero_equals_plain_local_search() {
        let g = toy((0.0, 20_000.0), &[2.0, -1.0, 1.0, 3.5, -2.5]);
        let init = construct_initial(&g).unwrap();
        let cfg = InnerConfig {
            lambda: Some(0.0),
            ..InnerConfig::default().deterministic()
        };
        let (a, _) = improve(&g, &init, &cfg);
        let b = local_search(&g, &init, &InnerConfig::default().deterministic());
        assert_eq!(a, b);
    }

    #[test]
    fn gls_never_worse_than_construction() {
        let g = toy((600.0, 3000.0), &[6.0, 6.5, -5.0, 1.0, 4.0, 5.5]);
        let init = construct_initial(&g).unwrap();
        let out = guided_local_search(&g, &InnerConfig::default().deterministic()).unwrap();
        assert!(out.cost <= init.cost + 1e-9);
        assert!(check_feasible(&g, &out).is_empty());
    }
}
