//! Nelder-Mead simplex search inside a box.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NmConfig {
    /// Reflection.
    pub alpha: f64,
    /// Expansion.
    pub beta: f64,
    /// Contraction.
    pub gamma: f64,
    /// Shrink.
    pub delta: f64,
    /// Initial edge length as a fraction of each axis range.
    pub init_scale: f64,
    pub max_iters: usize,
    pub diameter_tol: f64,
}

impl Default for NmConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 2.0,
            gamma: 0.5,
            delta: 0.5,
            init_scale: 0.1,
            max_iters: 200,
            diameter_tol: 1e-8,
        }
    }
}

impl NmConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.alpha > 0.0
            && self.beta > 1.0
            && self.gamma > 0.0
            && self.gamma < 1.0
            && self.delta > 0.0
            && self.delta < 1.0
            && self.init_scale > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(
                "need alpha > 0, beta > 1, 0 < gamma < 1, 0 < delta < 1, init_scale > 0".into(),
            ))
        }
    }
}

/// Axis-aligned search box. Infinite bounds are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Bounds {
    pub fn unit(dims: usize) -> Self {
        Self {
            lo: vec![0.0; dims],
            hi: vec![1.0; dims],
        }
    }

    pub fn unbounded(dims: usize) -> Self {
        Self {
            lo: vec![f64::NEG_INFINITY; dims],
            hi: vec![f64::INFINITY; dims],
        }
    }

    pub fn dims(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dims()
            && x.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(v, (l, h))| (l..=h).contains(&v))
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for (v, (l, h)) in x.iter_mut().zip(self.lo.iter().zip(&self.hi)) {
            *v = v.clamp(*l, *h);
        }
    }

    fn range(&self, i: usize) -> f64 {
        let r = self.hi[i] - self.lo[i];
        if r.is_finite() {
            r
        } else {
            1.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Reflect,
    Expand,
    OutsideContract,
    InsideContract,
    Shrink,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexState {
    /// Sorted ascending by value.
    pub vertices: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub evals: usize,
}

impl SimplexState {
    pub fn best(&self) -> (&[f64], f64) {
        (&self.vertices[0], self.values[0])
    }

    /// Largest pairwise distance between vertices.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max(dist(a, b));
            }
        }
        d
    }

    fn sort(&mut self) {
        let mut idx: Vec<usize> = (0..self.values.len()).collect();
        idx.sort_by(|&a, &b| self.values[a].total_cmp(&self.values[b]));
        self.vertices = idx.iter().map(|&i| self.vertices[i].clone()).collect();
        self.values = idx.iter().map(|&i| self.values[i]).collect();
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn eval(f: &mut dyn FnMut(&[f64]) -> f64, x: &[f64], evals: &mut usize) -> f64 {
    *evals += 1;
    let v = f(x);
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Vertex 0 is `x0`; vertex `i` steps `init_scale × range` along axis `i`.
/// A step that clamps to nothing is redrawn inward at half scale.
pub fn nm_init(
    x0: &[f64],
    bounds: &Bounds,
    cfg: &NmConfig,
    objective: &mut dyn FnMut(&[f64]) -> f64,
) -> Result<SimplexState> {
    cfg.validate()?;
    if !bounds.contains(x0) {
        return Err(Error::Config(format!("start point {x0:?} lies outside the box")));
    }
    let n = x0.len();
    let mut vertices = vec![x0.to_vec()];
    for i in 0..n {
        let step = cfg.init_scale * bounds.range(i);
        let mut v = x0.to_vec();
        v[i] = (x0[i] + step).clamp(bounds.lo[i], bounds.hi[i]);
        if (v[i] - x0[i]).abs() < 1e-12 * step.max(1.0) {
            v[i] = (x0[i] - 0.5 * step).clamp(bounds.lo[i], bounds.hi[i]);
        }
        vertices.push(v);
    }
    let mut evals = 0;
    let values = vertices.iter().map(|v| eval(objective, v, &mut evals)).collect();
    let mut s = SimplexState {
        vertices,
        values,
        evals,
    };
    s.sort();
    Ok(s)
}

/// One Nelder-Mead iteration. Returns the branch taken and any newly accepted points.
pub fn nm_step(
    state: &mut SimplexState,
    bounds: &Bounds,
    cfg: &NmConfig,
    objective: &mut dyn FnMut(&[f64]) -> f64,
) -> (StepKind, Vec<(Vec<f64>, f64)>) {
    let n = state.vertices.len() - 1;
    let dims = state.vertices[0].len();
    let mut centroid = vec![0.0; dims];
    for v in &state.vertices[..n] {
        for (c, x) in centroid.iter_mut().zip(v) {
            *c += x / n as f64;
        }
    }
    let worst = state.vertices[n].clone();
    let point = |t: f64, from: &[f64]| {
        // centroid + t (from - centroid)
        let mut p: Vec<f64> = centroid.iter().zip(from).map(|(c, x)| c + t * (x - c)).collect();
        bounds.clamp(&mut p);
        p
    };
    let f1 = state.values[0];
    let fn_ = state.values[n - 1];
    let fw = state.values[n];
    let mut evals = state.evals;

    let xr = point(-cfg.alpha, &worst);
    let fr = eval(objective, &xr, &mut evals);
    let (kind, accepted) = if fr < f1 {
        let xe = point(cfg.beta, &xr);
        let fe = eval(objective, &xe, &mut evals);
        if fe < fr {
            (StepKind::Expand, Some((xe, fe)))
        } else {
            (StepKind::Reflect, Some((xr, fr)))
        }
    } else if fr < fn_ {
        (StepKind::Reflect, Some((xr, fr)))
    } else if fr < fw {
        let xoc = point(cfg.gamma, &xr);
        let foc = eval(objective, &xoc, &mut evals);
        if foc <= fr {
            (StepKind::OutsideContract, Some((xoc, foc)))
        } else {
            (StepKind::Shrink, None)
        }
    } else {
        let xic = point(-cfg.gamma, &xr);
        let fic = eval(objective, &xic, &mut evals);
        if fic < fw {
            (StepKind::InsideContract, Some((xic, fic)))
        } else {
            (StepKind::Shrink, None)
        }
    };

    let mut new_points = Vec::new();
    match accepted {
        Some((x, f)) => {
            state.vertices[n] = x.clone();
            state.values[n] = f;
            new_points.push((x, f));
        }
        None => {
            let best = state.vertices[0].clone();
            for i in 1..=n {
                let mut x: Vec<f64> = best
                    .iter()
                    .zip(&state.vertices[i])
                    .map(|(b, v)| b + cfg.delta * (v - b))
                    .collect();
                bounds.clamp(&mut x);
                let f = eval(objective, &x, &mut evals);
                state.vertices[i] = x.clone();
                state.values[i] = f;
                new_points.push((x, f));
            }
        }
    }
    state.evals = evals;
    state.sort();
    (kind, new_points)
}

#[derive(Debug, Clone)]
pub struct NmResult {
    pub best_x: Vec<f64>,
    pub best_f: f64,
    /// Every point that entered the simplex, in order, with its value.
    pub accepted: Vec<(Vec<f64>, f64)>,
    pub iterations: usize,
    pub evals: usize,
}

/// Iterates until the simplex diameter drops below `diameter_tol` or
/// `max_iters` steps have run.
pub fn nm_optimize(
    objective: &mut dyn FnMut(&[f64]) -> f64,
    x0: &[f64],
    bounds: &Bounds,
    cfg: &NmConfig,
) -> Result<NmResult> {
    let mut state = nm_init(x0, bounds, cfg, objective)?;
    let mut accepted: Vec<(Vec<f64>, f64)> = state
        .vertices
        .iter()
        .cloned()
        .zip(state.values.iter().copied())
        .collect();
    let mut iterations = 0;
    while iterations < cfg.max_iters && state.diameter() >= cfg.diameter_tol {
        let (_, pts) = nm_step(&mut state, bounds, cfg, objective);
        accepted.extend(pts);
        iterations += 1;
    }
    let (x, f) = state.best();
    Ok(NmResult {
        best_x: x.to_vec(),
        best_f: f,
        accepted,
        iterations,
        evals: state.evals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|u| (u - 0.5) * (u - 0.5)).sum()
    }

    #[test]
    fn init_in_unit_square() {
        let s = nm_init(&[0.5, 0.5], &Bounds::unit(2), &NmConfig::default(), &mut sphere).unwrap();
        let mut v = s.vertices.clone();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let want = [[0.5, 0.5], [0.5, 0.6], [0.6, 0.5]];
        for (a, b) in v.iter().zip(want) {
            assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12, "{v:?}");
        }
    }

    #[test]
    fn init_at_corner_steps_inward() {
        let s = nm_init(&[1.0, 1.0], &Bounds::unit(2), &NmConfig::default(), &mut sphere).unwrap();
        assert!(s.vertices.iter().any(|v| (v[0] - 0.95).abs() < 1e-12 && v[1] == 1.0));
        assert!(s.vertices.iter().any(|v| v[0] == 1.0 && (v[1] - 0.95).abs() < 1e-12));
        assert!(s.diameter() > 0.0);
    }

    #[test]
    fn rejects_start_outside_box() {
        assert!(nm_init(&[1.5], &Bounds::unit(1), &NmConfig::default(), &mut sphere).is_err());
    }

    #[test]
    fn one_dimensional_hand_trace() {
        let mut f = |x: &[f64]| x[0] * x[0];
        let mut s = SimplexState {
            vertices: vec![vec![1.0], vec![2.0]],
            values: vec![1.0, 4.0],
            evals: 0,
        };
        let (kind, pts) = nm_step(&mut s, &Bounds::unbounded(1), &NmConfig::default(), &mut f);
        assert_eq!(kind, StepKind::Reflect);
        assert_eq!(pts, vec![(vec![0.0], 0.0)]);
        assert_eq!(s.vertices, vec![vec![0.0], vec![1.0]]);
        assert_eq!(s.evals, 2);
    }

    #[test]
    fn constant_function_shrinks() {
        let mut f = |_: &[f64]| 3.0;
        let mut s = nm_init(&[0.5, 0.5], &Bounds::unit(2), &NmConfig::default(), &mut f).unwrap();
        for _ in 0..5 {
            let d = s.diameter();
            let (kind, _) = nm_step(&mut s, &Bounds::unit(2), &NmConfig::default(), &mut f);
            assert_eq!(kind, StepKind::Shrink);
            assert!((s.diameter() - 0.5 * d).abs() < 1e-12);
        }
    }

    #[test]
    fn optimum_start_never_worsens() {
        let r = nm_optimize(&mut sphere, &[0.5; 3], &Bounds::unit(3), &NmConfig::default()).unwrap();
        assert_eq!(r.best_f, 0.0);
    }
}
