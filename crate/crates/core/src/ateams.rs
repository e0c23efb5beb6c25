//! Asynchronous teams: a shared sorted population fed by a constructor,
//! improved by GA and Nelder-Mead agents and pruned by a destroyer.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::sync::Mutex;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ga::{breed, Chromosome, GaConfig};
use crate::nelder_mead::{nm_optimize, Bounds, NmConfig};
use crate::outer::{Assessment, Evaluator};
use crate::ugv::{UgvParams, UnitVector, GENOME_LEN};

/// Two members closer than this in unit space (max-norm) are duplicates.
pub const DUPLICATE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Constructor,
    Ga,
    Nm,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Constructor => "constructor",
            Self::Ga => "ga",
            Self::Nm => "nm",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Solution {
    pub params: UgvParams,
    pub unit: UnitVector,
    pub fitness: f64,
    pub feasible: bool,
    pub provenance: Provenance,
    pub eval_count_at_birth: usize,
}

impl Solution {
    pub fn from_assessment(unit: UnitVector, a: &Assessment, provenance: Provenance, born: usize) -> Self {
        Self {
            params: a.params,
            unit,
            fitness: a.fitness,
            feasible: a.feasible,
            provenance,
            eval_count_at_birth: born,
        }
    }

    fn distance(&self, other: &UnitVector) -> f64 {
        self.unit
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Population {
    members: Vec<Solution>,
    capacity: usize,
}

impl Population {
    pub fn new(capacity: usize) -> Self {
        Self {
            members: Vec::new(),
            capacity,
        }
    }

    pub fn members(&self) -> &[Solution] {
        &self.members
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn best(&self) -> Option<&Solution> {
        self.members.first()
    }

    pub fn best_fitness(&self) -> f64 {
        self.best().map_or(f64::INFINITY, |s| s.fitness)
    }

    pub fn mean_fitness(&self) -> f64 {
        if self.members.is_empty() {
            return f64::NAN;
        }
        self.members.iter().map(|s| s.fitness).sum::<f64>() / self.members.len() as f64
    }

    /// Lists every broken population invariant.
    pub fn check_invariants(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.members.len() > self.capacity {
            out.push(format!(
                "size {} exceeds capacity {}",
                self.members.len(),
                self.capacity
            ));
        }
        for (i, s) in self.members.iter().enumerate() {
            if !s.feasible || !s.fitness.is_finite() {
                out.push(format!("member {i} is infeasible"));
            }
            if i > 0 && self.members[i - 1].fitness > s.fitness {
                out.push(format!("members {} and {i} out of order", i - 1));
            }
            if let Some(j) = self.members[..i]
                .iter()
                .position(|o| o.distance(&s.unit) <= DUPLICATE_TOL)
            {
                out.push(format!("members {j} and {i} are duplicates"));
            }
        }
        out
    }
}

/// Destroyer: drops infeasible and duplicate candidates, merges, sorts and
/// truncates to capacity.
pub fn destroy_and_merge(pop: &mut Population, candidates: Vec<Solution>) -> usize {
    let mut admitted = 0;
    for c in candidates {
        if !c.feasible || !c.fitness.is_finite() {
            continue;
        }
        if pop.members.iter().any(|m| m.distance(&c.unit) <= DUPLICATE_TOL) {
            continue;
        }
        let at = pop.members.partition_point(|m| m.fitness <= c.fitness);
        if at >= pop.capacity {
            continue;
        }
        pop.members.insert(at, c);
        pop.members.truncate(pop.capacity);
        admitted += 1;
    }
    admitted
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ATeamsConfig {
    pub capacity: usize,
    pub improver_rounds_budget: usize,
    pub stall_window: usize,
    pub stall_tol: f64,
    pub seed: u64,
    /// Run the GA and NM agents at the same time.
    pub parallel_improvers: bool,
    /// Merge agent results in a fixed order (GA, then NM) instead of arrival order.
    pub deterministic: bool,
    pub threads: usize,
    /// Random draws allowed per population slot when constructing.
    pub draw_cap_factor: usize,
    pub ga: GaConfig,
    pub nm: NmConfig,
}

impl Default for ATeamsConfig {
    fn default() -> Self {
        Self {
            capacity: 30,
            improver_rounds_budget: 30,
            stall_window: 5,
            stall_tol: 1e-3,
            seed: 0,
            parallel_improvers: true,
            deterministic: false,
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
            draw_cap_factor: 50,
            ga: GaConfig::default(),
            nm: NmConfig {
                max_iters: 10,
                ..NmConfig::default()
            },
        }
    }
}

impl ATeamsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.capacity < 2 {
            return Err(Error::Config("capacity must be at least 2".into()));
        }
        if self.stall_window == 0 {
            return Err(Error::Config("stall_window must be at least 1".into()));
        }
        if self.threads == 0 {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        if self.ga.bits_per_param == 0 || self.ga.bits_per_param > 32 {
            return Err(Error::Config("bits_per_param must be between 1 and 32".into()));
        }
        self.nm.validate()
    }
}

/// Counts every call that reaches the wrapped evaluator.
pub struct Counted<'a, E: ?Sized> {
    inner: &'a E,
    calls: AtomicUsize,
}

impl<'a, E: Evaluator + ?Sized> Counted<'a, E> {
    pub fn new(inner: &'a E) -> Self {
        Self {
            inner,
            calls: AtomicUsize::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }
}

impl<E: Evaluator + ?Sized> Evaluator for Counted<'_, E> {
    fn depot_count(&self) -> usize {
        self.inner.depot_count()
    }

    fn assess(&self, unit: &UnitVector) -> Assessment {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.assess(unit)
    }
}

fn round_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Candidate batch produced by one agent.
#[derive(Debug, Clone)]
pub struct AgentOutput {
    pub agent: Provenance,
    pub candidates: Vec<Solution>,
    pub evals: usize,
}

/// Constructor: seeded random draws, evaluated in parallel batches, until the
/// population is full or `draw_cap_factor × capacity` draws are spent.
pub fn construct_population<E: Evaluator + ?Sized>(evaluator: &E, cfg: &ATeamsConfig) -> Result<(Population, usize)> {
    let mut rng = round_rng(cfg.seed, 0);
    let cap = cfg.draw_cap_factor * cfg.capacity;
    let mut pop = Population::new(cfg.capacity);
    let mut draws = 0;
    let mut causes: HashMap<String, usize> = HashMap::new();
    while pop.len() < cfg.capacity && draws < cap {
        let batch = cfg.capacity.min(cap - draws);
        let units: Vec<UnitVector> = (0..batch).map(|_| std::array::from_fn(|_| rng.gen())).collect();
        let results: Vec<Assessment> = units.par_iter().map(|u| evaluator.assess(u)).collect();
        let mut cands = Vec::new();
        for (u, a) in units.into_iter().zip(&results) {
            draws += 1;
            if a.feasible {
                cands.push(Solution::from_assessment(u, a, Provenance::Constructor, draws));
            } else {
                *causes
                    .entry(a.note.clone().unwrap_or_else(|| "unknown".into()))
                    .or_default() += 1;
            }
        }
        destroy_and_merge(&mut pop, cands);
    }
    if pop.is_empty() {
        let (cause, n) = causes
            .into_iter()
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
            .unwrap_or_else(|| ("no draws".into(), 0));
        return Err(Error::Infeasible(format!(
            "{draws} random draws failed; most common violation: {cause} ({n} draws)"
        )));
    }
    Ok((pop, draws))
}

/// GA agent: one generation bred from the current members; offspring only.
pub fn improver_ga_round<E: Evaluator + ?Sized>(
    pop: &Population,
    cfg: &ATeamsConfig,
    evaluator: &E,
    round: usize,
) -> Result<AgentOutput> {
    let mut rng = round_rng(cfg.seed, 2 * round as u64 + 1);
    let bits = cfg.ga.bits_per_param;
    let parents: Vec<Chromosome> = pop
        .members()
        .iter()
        .map(|s| Chromosome {
            fitness: Some(s.fitness),
            ..Chromosome::encode(&s.unit, bits)
        })
        .collect();
    let count = pop.capacity().saturating_sub(cfg.ga.elite_count);
    let offspring = breed(&parents, count, &cfg.ga, &mut rng)?;
    let units: Vec<UnitVector> = offspring
        .iter()
        .map(|c| {
            let x = c.decode(bits);
            std::array::from_fn(|i| x[i])
        })
        .collect();
    let assessed: Vec<Assessment> = units.par_iter().map(|u| evaluator.assess(u)).collect();
    let candidates = units
        .into_iter()
        .zip(&assessed)
        .enumerate()
        .map(|(k, (u, a))| Solution::from_assessment(u, a, Provenance::Ga, k + 1))
        .collect();
    Ok(AgentOutput {
        agent: Provenance::Ga,
        candidates,
        evals: assessed.len(),
    })
}

/// NM agent: a short simplex run from the current best over the six
/// continuous coordinates, depot held at the incumbent's value. Every point
/// accepted into the simplex is returned as a candidate.
pub fn improver_nm_round<E: Evaluator + ?Sized>(
    pop: &Population,
    cfg: &ATeamsConfig,
    evaluator: &E,
) -> Result<AgentOutput> {
    let Some(best) = pop.best() else {
        return Ok(AgentOutput {
            agent: Provenance::Nm,
            candidates: Vec::new(),
            evals: 0,
        });
    };
    if cfg.nm.max_iters == 0 {
        return Ok(AgentOutput {
            agent: Provenance::Nm,
            candidates: Vec::new(),
            evals: 0,
        });
    }
    let depot_u = best.unit[0];
    let lift = |x: &[f64]| -> UnitVector { std::array::from_fn(|i| if i == 0 { depot_u } else { x[i - 1] }) };
    let cache: Mutex<Vec<(UnitVector, Assessment)>> = Mutex::new(Vec::new());
    let mut objective = |x: &[f64]| {
        let u = lift(x);
        let a = evaluator.assess(&u);
        let f = a.fitness;
        cache.lock().expect("cache lock").push((u, a));
        f
    };
    let x0: Vec<f64> = best.unit[1..].to_vec();
    let result = nm_optimize(&mut objective, &x0, &Bounds::unit(GENOME_LEN - 1), &cfg.nm)?;
    let cache = cache.into_inner().expect("cache lock");
    let mut candidates = Vec::new();
    for (x, _) in &result.accepted {
        let u = lift(x);
        if let Some(k) = cache.iter().position(|(cu, _)| *cu == u) {
            candidates.push(Solution::from_assessment(u, &cache[k].1, Provenance::Nm, k + 1));
        }
    }
    Ok(AgentOutput {
        agent: Provenance::Nm,
        candidates,
        evals: cache.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub round: usize,
    pub agent: Provenance,
    pub evals: usize,
    pub best_min: f64,
    pub mean_min: f64,
    pub wall_s: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunTrace {
    pub rows: Vec<TraceRow>,
}

impl RunTrace {
    pub fn total_evals(&self) -> usize {
        self.rows.iter().map(|r| r.evals).sum()
    }

    pub fn evals_by_agent(&self, agent: Provenance) -> usize {
        self.rows.iter().filter(|r| r.agent == agent).map(|r| r.evals).sum()
    }

    /// CSV with a header row. `wall_s` is left blank when `with_wall` is false.
    pub fn to_csv(&self, with_wall: bool) -> String {
        let mut s = String::from("round,agent,evals,best_min,mean_min,wall_s\n");
        for r in &self.rows {
            let wall = if with_wall {
                format!("{:.3}", r.wall_s)
            } else {
                String::new()
            };
            s.push_str(&format!(
                "{},{},{},{:.6},{:.6},{}\n",
                r.round,
                r.agent.as_str(),
                r.evals,
                r.best_min,
                r.mean_min,
                wall
            ));
        }
        s
    }
}

#[derive(Debug, Clone)]
pub struct ATeamsRun {
    pub best: Solution,
    pub population: Population,
    pub trace: RunTrace,
    pub rounds: usize,
    pub evaluations: usize,
}

/// Full A-Teams loop on a dedicated pool of `cfg.threads` workers.
pub fn run_ateams<E: Evaluator + ?Sized>(evaluator: &E, cfg: &ATeamsConfig) -> Result<ATeamsRun> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| run_in_pool(evaluator, cfg, &pool))
}

fn run_in_pool<E: Evaluator + ?Sized>(
    evaluator: &E,
    cfg: &ATeamsConfig,
    pool: &rayon::ThreadPool,
) -> Result<ATeamsRun> {
    let start = Instant::now();
    let counted = Counted::new(evaluator);
    let (mut pop, _) = construct_population(&counted, cfg)?;
    let mut trace = RunTrace::default();
    let row = |trace: &mut RunTrace, round, agent, evals, pop: &Population| {
        trace.rows.push(TraceRow {
            round,
            agent,
            evals,
            best_min: pop.best_fitness(),
            mean_min: pop.mean_fitness(),
            wall_s: start.elapsed().as_secs_f64(),
        })
    };
    row(&mut trace, 0, Provenance::Constructor, counted.calls(), &pop);
    let mut best_by_round = vec![pop.best_fitness()];
    let mut rounds = 0;

    for round in 1..=cfg.improver_rounds_budget {
        let snapshot = pop.clone();
        let base = counted.calls();
        let stamp = |mut out: AgentOutput| {
            for c in &mut out.candidates {
                c.eval_count_at_birth += base;
            }
            out
        };
        let ga = || improver_ga_round(&snapshot, cfg, &counted, round);
        let nm = || improver_nm_round(&snapshot, cfg, &counted);
        if !cfg.parallel_improvers {
            for out in [ga()?, nm()?] {
                let out = stamp(out);
                destroy_and_merge(&mut pop, out.candidates);
                row(&mut trace, round, out.agent, out.evals, &pop);
            }
        } else if cfg.deterministic {
            let (g, n) = pool.join(ga, nm);
            for out in [g?, n?] {
                let out = stamp(out);
                destroy_and_merge(&mut pop, out.candidates);
                row(&mut trace, round, out.agent, out.evals, &pop);
            }
        } else {
            let (tx, rx) = mpsc::channel();
            let (ga, nm) = (&ga, &nm);
            let failed = std::thread::scope(|s| {
                let tx_ga = tx.clone();
                s.spawn(move || tx_ga.send(pool.install(ga)));
                s.spawn(move || tx.send(pool.install(nm)));
                let mut failed = None;
                for out in rx.iter() {
                    match out {
                        Ok(out) => {
                            let out = stamp(out);
                            destroy_and_merge(&mut pop, out.candidates);
                            row(&mut trace, round, out.agent, out.evals, &pop);
                        }
                        Err(e) => failed = Some(e),
                    }
                }
                failed
            });
            if let Some(e) = failed {
                return Err(e);
            }
        }
        rounds = round;
        best_by_round.push(pop.best_fitness());
        if round >= cfg.stall_window && best_by_round[round - cfg.stall_window] - best_by_round[round] < cfg.stall_tol {
            break;
        }
    }

    let best = pop.best().cloned().expect("constructed population is nonempty");
    Ok(ATeamsRun {
        best,
        population: pop,
        evaluations: counted.calls(),
        trace,
        rounds,
    })
}
