//! Move operators over the giant tour.
//!
//! Every operator keeps the multiset of target visits intact. Only Relocate
//! and Exchange may change which recharge vertices are in use.

use serde::Serialize;

use super::graph::RoutingGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Operator {
    /// Reverse a contiguous stretch of the tour.
    TwoOpt,
    /// Move a block of up to three consecutive targets within its sortie.
    OrOpt,
    /// Move one visit into another sortie; insert or drop an optional stop.
    Relocate,
    /// Swap two visits; swap a used optional stop for a dropped one.
    Exchange,
    /// Swap the tail ends of two sorties.
    Cross,
}

/// Fixed sweep order used by the local search.
pub const OPERATORS: [Operator; 5] = [
    Operator::TwoOpt,
    Operator::OrOpt,
    Operator::Relocate,
    Operator::Exchange,
    Operator::Cross,
];

pub const OR_OPT_MAX_BLOCK: usize = 3;

/// All candidate tours one application of `op` away from `tour`, in a fixed order.
pub fn neighborhood(graph: &RoutingGraph, tour: &[usize], op: Operator) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    visit(graph, tour, op, &mut |c| out.push(c.to_vec()));
    out
}

/// Calls `f` with each candidate of `op`. The slice is only valid during the call.
pub fn visit(graph: &RoutingGraph, tour: &[usize], op: Operator, f: &mut dyn FnMut(&[usize])) {
    if tour.len() < 3 {
        return;
    }
    let bounds: Vec<usize> = (0..tour.len()).filter(|&k| graph.is_recharge(tour[k])).collect();
    let mut buf = Vec::with_capacity(tour.len() + 1);
    match op {
        Operator::TwoOpt => two_opt(tour, &mut buf, f),
        Operator::OrOpt => or_opt(tour, &bounds, &mut buf, f),
        Operator::Relocate => relocate(graph, tour, &bounds, &mut buf, f),
        Operator::Exchange => exchange(graph, tour, &mut buf, f),
        Operator::Cross => cross(tour, &bounds, &mut buf, f),
    }
}

fn dropped(graph: &RoutingGraph, tour: &[usize]) -> Vec<usize> {
    graph.intermediate_recharge().filter(|d| !tour.contains(d)).collect()
}

fn two_opt(tour: &[usize], buf: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    let last = tour.len() - 1;
    for i in 1..last {
        for j in (i + 1)..last {
            buf.clear();
            buf.extend_from_slice(tour);
            buf[i..=j].reverse();
            f(buf);
        }
    }
}

fn or_opt(tour: &[usize], bounds: &[usize], buf: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    for w in bounds.windows(2) {
        let (a, b) = (w[0], w[1]);
        for i in (a + 1)..b {
            for len in 1..=OR_OPT_MAX_BLOCK {
                if i + len > b {
                    break;
                }
                // Insert before position p of the tour with the block removed.
                for p in (a + 1)..=(b - len) {
                    if p == i {
                        continue;
                    }
                    buf.clear();
                    buf.extend_from_slice(&tour[..i]);
                    buf.extend_from_slice(&tour[i + len..]);
                    buf.splice(p..p, tour[i..i + len].iter().copied());
                    f(buf);
                }
            }
        }
    }
}

fn sortie_of(bounds: &[usize], pos: usize) -> usize {
    bounds.partition_point(|&b| b < pos)
}

fn relocate(graph: &RoutingGraph, tour: &[usize], bounds: &[usize], buf: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    let last = tour.len() - 1;
    for i in 1..last {
        let v = tour[i];
        let home = sortie_of(bounds, i);
        let is_stop = graph.is_recharge(v);
        // Insert before position p of the reduced tour (length last).
        for p in 1..last {
            if p == i {
                continue;
            }
            // Map p back to the original tour to find the destination sortie.
            let orig = if p < i { p } else { p + 1 };
            if !is_stop && sortie_of(bounds, orig) == home {
                continue;
            }
            buf.clear();
            buf.extend_from_slice(&tour[..i]);
            buf.extend_from_slice(&tour[i + 1..]);
            buf.insert(p, v);
            f(buf);
        }
        if is_stop {
            buf.clear();
            buf.extend_from_slice(&tour[..i]);
            buf.extend_from_slice(&tour[i + 1..]);
            f(buf);
        }
    }
    for d in dropped(graph, tour) {
        for p in 1..=last {
            buf.clear();
            buf.extend_from_slice(tour);
            buf.insert(p, d);
            f(buf);
        }
    }
}

fn exchange(graph: &RoutingGraph, tour: &[usize], buf: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    let last = tour.len() - 1;
    for i in 1..last {
        for j in (i + 1)..last {
            buf.clear();
            buf.extend_from_slice(tour);
            buf.swap(i, j);
            f(buf);
        }
    }
    let unused = dropped(graph, tour);
    for i in 1..last {
        if !graph.is_recharge(tour[i]) {
            continue;
        }
        for &d in &unused {
            buf.clear();
            buf.extend_from_slice(tour);
            buf[i] = d;
            f(buf);
        }
    }
}

fn cross(tour: &[usize], bounds: &[usize], buf: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    let sorties = bounds.len() - 1;
    for sa in 0..sorties {
        let (a0, a1) = (bounds[sa], bounds[sa + 1]);
        for sb in (sa + 1)..sorties {
            let (b0, b1) = (bounds[sb], bounds[sb + 1]);
            // Keep tour[a0..=i] and tour[b0..=j]; swap the tails before a1 and b1.
            for i in a0..a1 {
                for j in b0..b1 {
                    if i + 1 == a1 && j + 1 == b1 {
                        continue;
                    }
                    buf.clear();
                    buf.extend_from_slice(&tour[..=i]);
                    buf.extend_from_slice(&tour[j + 1..b1]);
                    buf.extend_from_slice(&tour[a1..=j]);
                    buf.extend_from_slice(&tour[i + 1..a1]);
                    buf.extend_from_slice(&tour[b1..]);
                    f(buf);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vrp::plan::tests::toy;

    fn targets_sorted(g: &RoutingGraph, t: &[usize]) -> Vec<usize> {
        let mut v: Vec<usize> = t.iter().copied().filter(|&x| !g.is_recharge(x)).collect();
        v.sort_unstable();
        v
    }

    #[test]
    fn two_opt_reverses_segment() {
        let g = toy((0.0, 1.0), &[1.0, 2.0, 3.0, 4.0]);
        // [0, a, b, c, d, m] with a..d = 4..7, m = 3
        let tour = [0, 4, 5, 6, 7, 3];
        let cands = neighborhood(&g, &tour, Operator::TwoOpt);
        assert!(cands.contains(&vec![0, 6, 5, 4, 7, 3]));
        assert_eq!(cands.len(), 6);
    }

    #[test]
    fn or_opt_blocks_at_most_three() {
        let g = toy((0.0, 1.0), &[1.0, 2.0, 3.0, 4.0, 5.0]);
        let tour = [0, 4, 5, 6, 7, 8, 3];
        // Every tour reachable by moving a block of <= 3 interior visits.
        let mut allowed = std::collections::HashSet::new();
        for i in 1..tour.len() - 1 {
            for len in 1..=OR_OPT_MAX_BLOCK {
                if i + len > tour.len() - 1 {
                    break;
                }
                let mut rest: Vec<usize> = tour[..i].to_vec();
                rest.extend_from_slice(&tour[i + len..]);
                for p in 1..rest.len() {
                    let mut c = rest.clone();
                    c.splice(p..p, tour[i..i + len].iter().copied());
                    allowed.insert(c);
                }
            }
        }
        let cands = neighborhood(&g, &tour, Operator::OrOpt);
        assert!(!cands.is_empty());
        for c in cands {
            assert!(allowed.contains(&c), "{c:?}");
            assert_ne!(c, tour.to_vec());
        }
        // Swapping two 4-blocks needs a block longer than three.
        let g = toy((0.0, 1.0), &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
        let tour = [0, 4, 5, 6, 7, 8, 9, 10, 11, 3];
        let swapped = vec![0, 8, 9, 10, 11, 4, 5, 6, 7, 3];
        assert!(!neighborhood(&g, &tour, Operator::OrOpt).contains(&swapped));
    }

    #[test]
    fn exchange_swaps_one_each_way() {
        let g = toy((0.0, 20_000.0), &[1.0, 2.0, 3.0, 4.0]);
        let tour = [0, 4, 5, 1, 6, 7, 3];
        for c in neighborhood(&g, &tour, Operator::Exchange) {
            let diff = tour.iter().zip(&c).filter(|(a, b)| a != b).count();
            assert!(diff == 2 || diff == 1, "{c:?}");
            assert_eq!(targets_sorted(&g, &c), vec![4, 5, 6, 7]);
        }
    }

    #[test]
    fn every_operator_preserves_targets() {
        let g = toy((0.0, 20_000.0), &[1.0, 2.0, 3.0, 4.0, 5.0]);
        let tour = [0, 4, 5, 1, 6, 7, 2, 8, 3];
        for op in OPERATORS {
            let cands = neighborhood(&g, &tour, op);
            assert!(!cands.is_empty(), "{op:?}");
            for c in cands {
                assert_eq!(targets_sorted(&g, &c), vec![4, 5, 6, 7, 8], "{op:?} {c:?}");
                assert_eq!(c[0], 0);
                assert_eq!(*c.last().unwrap(), 3);
            }
        }
    }

    #[test]
    fn relocate_can_insert_and_drop_stops() {
        let g = toy((0.0, 20_000.0), &[1.0, 2.0]);
        let with_stop = [0, 4, 1, 5, 3];
        let cands = neighborhood(&g, &with_stop, Operator::Relocate);
        assert!(cands.contains(&vec![0, 4, 5, 3]));
        assert!(cands.contains(&vec![0, 4, 1, 2, 5, 3]) || cands.iter().any(|c| c.contains(&2)));
    }

    #[test]
    fn cross_swaps_tails() {
        let g = toy((0.0, 20_000.0), &[1.0, 2.0, 3.0, 4.0]);
        let tour = [0, 4, 5, 1, 6, 7, 3];
        let cands = neighborhood(&g, &tour, Operator::Cross);
        // Tail [5] of the first sortie swapped with tail [7] of the second.
        assert!(cands.contains(&vec![0, 4, 7, 1, 6, 5, 3]));
        for c in &cands {
            assert_eq!(c.len(), tour.len());
        }
    }
}
