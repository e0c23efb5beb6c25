//! Binary-encoded genetic algorithm over the unit hypercube.
//!
//! Each parameter is stored as a fixed-width unsigned integer, so a genome
//! of `d` parameters is a `d × bits_per_param` bit string.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaConfig {
    pub pop_size: usize,
    pub bits_per_param: usize,
    pub mutation_prob: f64,
    /// Probability that a selected pair is recombined rather than copied.
    pub crossover_prob: f64,
    pub elite_count: usize,
    pub max_generations: usize,
    /// Stop once the best value improves by less than `stall_tol` over this many generations.
    pub stall_generations: usize,
    pub stall_tol: f64,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            pop_size: 30,
            bits_per_param: 10,
            mutation_prob: 0.01,
            crossover_prob: 1.0,
            elite_count: 2,
            max_generations: 100,
            stall_generations: 5,
            stall_tol: 1e-3,
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.pop_size < 2 || !self.pop_size.is_multiple_of(2) {
            return bad("pop_size must be even and at least 2");
        }
        if !(1..=32).contains(&self.bits_per_param) {
            return bad("bits_per_param must be between 1 and 32");
        }
        if !(0.0..=1.0).contains(&self.mutation_prob) || !(0.0..=1.0).contains(&self.crossover_prob) {
            return bad("probabilities must lie in [0, 1]");
        }
        if self.elite_count >= self.pop_size {
            return bad("elite_count must be smaller than pop_size");
        }
        if self.stall_generations == 0 {
            return bad("stall_generations must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Chromosome {
    pub bits: Vec<bool>,
    pub fitness: Option<f64>,
}

impl Chromosome {
    /// Quantizes each coordinate of `x` (clamped to [0, 1]) to `bits_per_param` bits.
    pub fn encode(x: &[f64], bits_per_param: usize) -> Self {
        let max = levels(bits_per_param);
        let mut bits = Vec::with_capacity(x.len() * bits_per_param);
        for &u in x {
            let k = (u.clamp(0.0, 1.0) * max as f64).round() as u64;
            for b in (0..bits_per_param).rev() {
                bits.push((k >> b) & 1 == 1);
            }
        }
        Self { bits, fitness: None }
    }

    pub fn decode(&self, bits_per_param: usize) -> Vec<f64> {
        let max = levels(bits_per_param) as f64;
        self.bits
            .chunks(bits_per_param)
            .map(|chunk| chunk.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b)) as f64 / max)
            .collect()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn popcount(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    fn score(&self) -> f64 {
        self.fitness.unwrap_or(f64::INFINITY)
    }
}

fn levels(bits_per_param: usize) -> u64 {
    (1u64 << bits_per_param) - 1
}

/// Latin hypercube sample: `n` points in `[0, 1)^dims`, one per stratum per axis.
pub fn lhs_sample<R: Rng>(n: usize, dims: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut points = vec![vec![0.0; dims]; n];
    let mut strata: Vec<usize> = (0..n).collect();
    for d in 0..dims {
        strata.shuffle(rng);
        for (p, &k) in points.iter_mut().zip(&strata) {
            p[d] = (k as f64 + rng.gen::<f64>()) / n as f64;
        }
    }
    points
}

/// Two passes of permutation tournaments. Each pass shuffles the population
/// and compares consecutive individuals; the fitter of each pair wins.
/// Winners of the two passes are zipped into parent pairs.
pub fn select_unbiased<R: Rng>(pop: &[Chromosome], rng: &mut R) -> Result<Vec<(usize, usize)>> {
    if pop.iter().any(|c| c.fitness.is_none()) {
        return Err(Error::Config("selection needs an evaluated population".into()));
    }
    if pop.len() < 2 {
        return Ok(vec![(0, 0); pop.len()]);
    }
    let pass = |rng: &mut R| {
        let mut order: Vec<usize> = (0..pop.len()).collect();
        order.shuffle(rng);
        if order.len() % 2 == 1 {
            let last = order[order.len() - 1];
            let mut other = rng.gen_range(0..pop.len() - 1);
            if other >= last {
                other += 1;
            }
            order.push(other);
        }
        order
            .chunks(2)
            .map(|p| {
                if pop[p[1]].score() < pop[p[0]].score() {
                    p[1]
                } else {
                    p[0]
                }
            })
            .collect::<Vec<_>>()
    };
    let first = pass(rng);
    let second = pass(rng);
    Ok(first.into_iter().zip(second).collect())
}

/// Swaps `a[k1..k2]` with `b[k1..k2]`.
pub fn crossover_at(a: &Chromosome, b: &Chromosome, k1: usize, k2: usize) -> Result<(Chromosome, Chromosome)> {
    if a.len() != b.len() {
        return Err(Error::Config(format!(
            "chromosome lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if k1 > k2 || k2 > a.len() {
        return Err(Error::Config(format!("bad cut points {k1}..{k2}")));
    }
    let mut c1 = a.bits.clone();
    let mut c2 = b.bits.clone();
    c1[k1..k2].copy_from_slice(&b.bits[k1..k2]);
    c2[k1..k2].copy_from_slice(&a.bits[k1..k2]);
    Ok((
        Chromosome {
            bits: c1,
            fitness: None,
        },
        Chromosome {
            bits: c2,
            fitness: None,
        },
    ))
}

/// Two-point crossover with cut points drawn uniformly, `k1 < k2`.
pub fn crossover_2pt<R: Rng>(a: &Chromosome, b: &Chromosome, rng: &mut R) -> Result<(Chromosome, Chromosome)> {
    if a.len() != b.len() {
        return crossover_at(a, b, 0, 0);
    }
    let n = a.len();
    if n == 0 {
        return crossover_at(a, b, 0, 0);
    }
    let k1 = rng.gen_range(0..n);
    let k2 = rng.gen_range(k1 + 1..=n);
    crossover_at(a, b, k1, k2)
}

/// Flips each bit independently with probability `p`.
pub fn mutate<R: Rng>(c: &Chromosome, p: f64, rng: &mut R) -> Chromosome {
    let bits = c.bits.iter().map(|&b| if rng.gen_bool(p) { !b } else { b }).collect();
    Chromosome { bits, fitness: None }
}

/// Produces `count` unevaluated offspring from an evaluated population.
pub fn breed<R: Rng>(pop: &[Chromosome], count: usize, cfg: &GaConfig, rng: &mut R) -> Result<Vec<Chromosome>> {
    let mut out = Vec::with_capacity(count);
    if pop.is_empty() {
        return Ok(out);
    }
    while out.len() < count {
        for (i, j) in select_unbiased(pop, rng)? {
            let (c1, c2) = if rng.gen_bool(cfg.crossover_prob) {
                crossover_2pt(&pop[i], &pop[j], rng)?
            } else {
                (pop[i].clone(), pop[j].clone())
            };
            for c in [c1, c2] {
                if out.len() < count {
                    out.push(mutate(&c, cfg.mutation_prob, rng));
                }
            }
        }
    }
    Ok(out)
}

/// Evaluates every unevaluated chromosome, in parallel.
pub fn evaluate_all<F>(pop: &mut [Chromosome], bits_per_param: usize, objective: &F)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    pop.par_iter_mut().filter(|c| c.fitness.is_none()).for_each(|c| {
        let f = objective(&c.decode(bits_per_param));
        c.fitness = Some(if f.is_nan() { f64::INFINITY } else { f });
    });
}

pub fn sort_by_fitness(pop: &mut [Chromosome]) {
    pop.sort_by(|a, b| a.score().total_cmp(&b.score()));
}

/// One generation: elites carried over, the rest bred and evaluated.
pub fn ga_generation<F, R>(pop: &[Chromosome], cfg: &GaConfig, objective: &F, rng: &mut R) -> Result<Vec<Chromosome>>
where
    F: Fn(&[f64]) -> f64 + Sync,
    R: Rng,
{
    let mut sorted = pop.to_vec();
    sort_by_fitness(&mut sorted);
    let elite = cfg.elite_count.min(sorted.len());
    let mut next: Vec<Chromosome> = sorted[..elite].to_vec();
    next.extend(breed(&sorted, sorted.len() - elite, cfg, rng)?);
    evaluate_all(&mut next, cfg.bits_per_param, objective);
    sort_by_fitness(&mut next);
    Ok(next)
}

#[derive(Debug, Clone, Serialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub best: f64,
    pub mean: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone)]
pub struct GaRun {
    pub best_x: Vec<f64>,
    pub best_f: f64,
    pub population: Vec<Chromosome>,
    pub history: Vec<GenerationStats>,
    pub evaluations: usize,
}

fn stats(generation: usize, pop: &[Chromosome], evaluations: usize) -> GenerationStats {
    let best = pop.iter().map(Chromosome::score).fold(f64::INFINITY, f64::min);
    let mean = pop.iter().map(Chromosome::score).sum::<f64>() / pop.len() as f64;
    GenerationStats {
        generation,
        best,
        mean,
        evaluations,
    }
}

/// Builds an LHS population of `cfg.pop_size` chromosomes, unevaluated.
pub fn initial_population<R: Rng>(cfg: &GaConfig, dims: usize, rng: &mut R) -> Vec<Chromosome> {
    lhs_sample(cfg.pop_size, dims, rng)
        .iter()
        .map(|x| Chromosome::encode(x, cfg.bits_per_param))
        .collect()
}

/// Runs the GA from an LHS start until `max_generations` or the stall rule fires.
pub fn run_ga<F>(cfg: &GaConfig, dims: usize, objective: &F) -> Result<GaRun>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pop = initial_population(cfg, dims, &mut rng);
    evaluate_all(&mut pop, cfg.bits_per_param, objective);
    sort_by_fitness(&mut pop);
    let mut evaluations = pop.len();
    let mut history = vec![stats(0, &pop, evaluations)];
    for g in 1..=cfg.max_generations {
        let next = ga_generation(&pop, cfg, objective, &mut rng)?;
        evaluations += next.len() - cfg.elite_count.min(next.len());
        pop = next;
        history.push(stats(g, &pop, evaluations));
        if g >= cfg.stall_generations {
            let then = history[g - cfg.stall_generations].best;
            if then - history[g].best < cfg.stall_tol {
                break;
            }
        }
    }
    Ok(GaRun {
        best_x: pop[0].decode(cfg.bits_per_param),
        best_f: pop[0].score(),
        population: pop,
        history,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn evaluated(values: &[f64]) -> Vec<Chromosome> {
        values
            .iter()
            .map(|&f| Chromosome {
                bits: vec![false; 4],
                fitness: Some(f),
            })
            .collect()
    }

    #[test]
    fn encode_decode_round_trip() {
        let x = [0.0, 1.0, 0.5, 0.123];
        let c = Chromosome::encode(&x, 10);
        assert_eq!(c.len(), 40);
        for (a, b) in x.iter().zip(c.decode(10)) {
            assert!((a - b).abs() <= 0.5 / 1023.0 + 1e-12);
        }
    }

    #[test]
    fn lhs_quartiles() {
        let pts = lhs_sample(4, 1, &mut rng(3));
        let mut q: Vec<usize> = pts.iter().map(|p| (p[0] * 4.0) as usize).collect();
        q.sort_unstable();
        assert_eq!(q, vec![0, 1, 2, 3]);
        let one = lhs_sample(1, 3, &mut rng(0));
        assert!(one[0].iter().all(|u| (0.0..1.0).contains(u)));
    }

    #[test]
    fn pair_of_two_picks_fitter() {
        let pop = evaluated(&[5.0, 1.0]);
        for s in 0..20 {
            assert_eq!(select_unbiased(&pop, &mut rng(s)).unwrap(), vec![(1, 1)]);
        }
    }

    #[test]
    fn selection_rejects_unevaluated() {
        let mut pop = evaluated(&[1.0, 2.0]);
        pop[0].fitness = None;
        assert!(select_unbiased(&pop, &mut rng(0)).is_err());
    }

    #[test]
    fn crossover_boundaries() {
        let a = Chromosome {
            bits: vec![true; 8],
            fitness: None,
        };
        let b = Chromosome {
            bits: vec![false; 8],
            fitness: None,
        };
        let (c1, c2) = crossover_at(&a, &b, 0, 8).unwrap();
        assert_eq!((c1.bits, c2.bits), (b.bits.clone(), a.bits.clone()));
        let (c1, c2) = crossover_2pt(&a, &a, &mut rng(1)).unwrap();
        assert_eq!((c1.bits, c2.bits), (a.bits.clone(), a.bits.clone()));
        let short = Chromosome {
            bits: vec![true; 3],
            fitness: None,
        };
        assert!(crossover_2pt(&a, &short, &mut rng(1)).is_err());
    }

    #[test]
    fn mutation_extremes() {
        let c = Chromosome::encode(&[0.3, 0.9], 10);
        assert_eq!(mutate(&c, 0.0, &mut rng(0)).bits, c.bits);
        let flipped = mutate(&c, 1.0, &mut rng(0));
        assert!(flipped.bits.iter().zip(&c.bits).all(|(a, b)| a != b));
    }

    #[test]
    fn all_elites_keep_population() {
        let cfg = GaConfig {
            pop_size: 4,
            elite_count: 4,
            ..GaConfig::default()
        };
        let f = |x: &[f64]| x.iter().sum::<f64>();
        let mut pop: Vec<Chromosome> = lhs_sample(4, 2, &mut rng(0))
            .iter()
            .map(|x| Chromosome::encode(x, 10))
            .collect();
        evaluate_all(&mut pop, 10, &f);
        sort_by_fitness(&mut pop);
        assert_eq!(ga_generation(&pop, &cfg, &f, &mut rng(9)).unwrap(), pop);
    }

    #[test]
    fn config_validation() {
        assert!(GaConfig::default().validate().is_ok());
        assert!(GaConfig {
            pop_size: 7,
            ..GaConfig::default()
        }
        .validate()
        .is_err());
        assert!(GaConfig {
            elite_count: 30,
            ..GaConfig::default()
        }
        .validate()
        .is_err());
        assert!(GaConfig {
            mutation_prob: 1.5,
            ..GaConfig::default()
        }
        .validate()
        .is_err());
    }
}
