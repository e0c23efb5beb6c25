//! Command-line front end shared by the `coop-route` binary and tests.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Parser, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ateams::{construct_population, run_ateams, ATeamsConfig, Provenance, RunTrace, TraceRow};
use crate::error::{Error, Result};
use crate::ga::{evaluate_all, ga_generation, initial_population, sort_by_fitness, GaConfig};
use crate::nelder_mead::{nm_init, nm_step, Bounds, NmConfig};
use crate::outer::{Evaluation, Evaluator, OuterProblem};
use crate::report::{render_plot, RunReport};
use crate::scenario::Scenario;
use crate::ugv::{UnitVector, GENOME_LEN};
use crate::vrp::{InnerConfig, UavPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Conventional two-level optimization: GA over the UGV parameters.
    Ga,
    /// GA and Nelder-Mead agents cooperating over a shared population.
    Ateams,
    /// Nelder-Mead from the best of a random feasible population.
    Nm,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Ga => "ga",
            Self::Ateams => "ateams",
            Self::Nm => "nm",
        }
    }
}

#[derive(Debug, Clone, Parser)]
#[command(name = "coop-route", version, about = "Cooperative UAV/UGV route optimization")]
pub struct CliOptions {
    /// Scenario JSON file, or the name of a bundled scenario.
    #[arg(long)]
    pub scenario: String,
    #[arg(long, value_enum, default_value_t = Mode::Ateams)]
    pub mode: Mode,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 30)]
    pub pop_size: usize,
    /// A-Teams rounds, GA generations or NM iterations (mode dependent).
    #[arg(long)]
    pub budget_rounds: Option<usize>,
    #[arg(long, default_value_t = 2.0)]
    pub inner_time_limit_s: f64,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Fixed merge order, no inner time limit, no wall-clock fields in outputs.
    #[arg(long)]
    pub deterministic: bool,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

impl CliOptions {
    pub fn budget(&self) -> usize {
        self.budget_rounds.unwrap_or(match self.mode {
            Mode::Ateams => 30,
            Mode::Ga => 50,
            Mode::Nm => 200,
        })
    }

    pub fn thread_count(&self) -> usize {
        self.threads
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }

    pub fn inner_config(&self) -> InnerConfig {
        let cfg = InnerConfig::default();
        if self.deterministic {
            cfg.deterministic()
        } else {
            InnerConfig {
                time_limit: Some(Duration::from_secs_f64(self.inner_time_limit_s.max(0.0))),
                ..cfg
            }
        }
    }
}

/// Resolves `--scenario`: an existing file wins, otherwise a bundled name.
pub fn resolve_scenario(arg: &str) -> Result<Scenario> {
    let path = Path::new(arg);
    if path.is_file() {
        return Scenario::from_file(path);
    }
    let stem = path.file_name().and_then(|n| n.to_str()).unwrap_or(arg);
    match Scenario::bundled(stem) {
        Ok(s) => Ok(s),
        Err(_) => Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("scenario file not found: {arg}"),
        ))),
    }
}

/// Everything a run produces before it is written to disk.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub scenario: Scenario,
    pub evaluation: Evaluation,
    pub provenance: Provenance,
    pub trace: RunTrace,
    pub evaluations: usize,
    pub rounds: usize,
    pub wall_clock_s: f64,
}

impl RunOutcome {
    pub fn report(&self, opts: &CliOptions) -> RunReport {
        RunReport::new(
            &self.scenario,
            &self.evaluation,
            opts.mode.as_str(),
            opts.seed,
            self.provenance.as_str(),
            self.evaluations,
            self.rounds,
            (!opts.deterministic).then_some(self.wall_clock_s),
        )
    }
}

fn to_unit(x: &[f64]) -> UnitVector {
    std::array::from_fn(|i| x[i])
}

/// Runs the selected optimizer without touching the file system.
pub fn execute(opts: &CliOptions) -> Result<RunOutcome> {
    if opts.pop_size < 2 {
        return Err(Error::Config("--pop-size must be at least 2".into()));
    }
    if opts.mode == Mode::Ga && !opts.pop_size.is_multiple_of(2) {
        return Err(Error::Config("--pop-size must be even in ga mode".into()));
    }
    let threads = opts.thread_count();
    if threads == 0 {
        return Err(Error::Config("--threads must be at least 1".into()));
    }
    let scenario = resolve_scenario(&opts.scenario)?;
    let problem = OuterProblem::new(scenario.clone(), opts.inner_config());
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let start = Instant::now();
    let ateams = ATeamsConfig {
        capacity: opts.pop_size,
        improver_rounds_budget: opts.budget(),
        seed: opts.seed,
        deterministic: opts.deterministic,
        threads,
        ga: GaConfig {
            pop_size: opts.pop_size,
            seed: opts.seed,
            ..GaConfig::default()
        },
        ..ATeamsConfig::default()
    };

    let (unit, provenance, trace, evaluations, rounds) = match opts.mode {
        Mode::Ateams => {
            let run = run_ateams(&problem, &ateams)?;
            (
                run.best.unit,
                run.best.provenance,
                run.trace,
                run.evaluations,
                run.rounds,
            )
        }
        Mode::Ga => pool.install(|| run_ga_mode(&problem, &ateams.ga, opts.budget(), start))?,
        Mode::Nm => pool.install(|| run_nm_mode(&problem, &ateams, opts.budget(), start))?,
    };
    let evaluation = problem.evaluate(&unit);
    Ok(RunOutcome {
        scenario,
        evaluation,
        provenance,
        trace,
        evaluations,
        rounds,
        wall_clock_s: start.elapsed().as_secs_f64(),
    })
}

type ModeResult = Result<(UnitVector, Provenance, RunTrace, usize, usize)>;

fn run_ga_mode(problem: &OuterProblem, cfg: &GaConfig, generations: usize, start: Instant) -> ModeResult {
    let cfg = GaConfig {
        max_generations: generations,
        ..cfg.clone()
    };
    cfg.validate()?;
    let objective = |x: &[f64]| problem.assess(&to_unit(x)).fitness;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pop = initial_population(&cfg, GENOME_LEN, &mut rng);
    evaluate_all(&mut pop, cfg.bits_per_param, &objective);
    sort_by_fitness(&mut pop);
    let mut trace = RunTrace::default();
    let row = |trace: &mut RunTrace, round, evals, pop: &[crate::ga::Chromosome]| {
        let fit: Vec<f64> = pop.iter().filter_map(|c| c.fitness).collect();
        trace.rows.push(TraceRow {
            round,
            agent: if round == 0 {
                Provenance::Constructor
            } else {
                Provenance::Ga
            },
            evals,
            best_min: fit.iter().copied().fold(f64::INFINITY, f64::min),
            mean_min: fit.iter().sum::<f64>() / fit.len() as f64,
            wall_s: start.elapsed().as_secs_f64(),
        });
    };
    row(&mut trace, 0, pop.len(), &pop);
    let mut evaluations = pop.len();
    let mut best = vec![pop[0].fitness.unwrap_or(f64::INFINITY)];
    let mut rounds = 0;
    for g in 1..=cfg.max_generations {
        pop = ga_generation(&pop, &cfg, &objective, &mut rng)?;
        let evals = pop.len() - cfg.elite_count;
        evaluations += evals;
        row(&mut trace, g, evals, &pop);
        rounds = g;
        best.push(pop[0].fitness.unwrap_or(f64::INFINITY));
        if g >= cfg.stall_generations && best[g - cfg.stall_generations] - best[g] < cfg.stall_tol {
            break;
        }
    }
    Ok((
        to_unit(&pop[0].decode(cfg.bits_per_param)),
        Provenance::Ga,
        trace,
        evaluations,
        rounds,
    ))
}

fn run_nm_mode(problem: &OuterProblem, cfg: &ATeamsConfig, iterations: usize, start: Instant) -> ModeResult {
    let (pop, draws) = construct_population(problem, cfg)?;
    let best = pop.best().expect("constructed population is nonempty").clone();
    let mut trace = RunTrace::default();
    trace.rows.push(TraceRow {
        round: 0,
        agent: Provenance::Constructor,
        evals: draws,
        best_min: pop.best_fitness(),
        mean_min: pop.mean_fitness(),
        wall_s: start.elapsed().as_secs_f64(),
    });
    let depot_u = best.unit[0];
    let lift = |x: &[f64]| -> UnitVector { std::array::from_fn(|i| if i == 0 { depot_u } else { x[i - 1] }) };
    let mut objective = |x: &[f64]| problem.assess(&lift(x)).fitness;
    let nm = NmConfig::default();
    let bounds = Bounds::unit(GENOME_LEN - 1);
    let mut state = nm_init(&best.unit[1..], &bounds, &nm, &mut objective)?;
    let mut seen = 0;
    let mut rounds = 0;
    for it in 1..=iterations {
        if state.diameter() < nm.diameter_tol {
            break;
        }
        nm_step(&mut state, &bounds, &nm, &mut objective);
        trace.rows.push(TraceRow {
            round: it,
            agent: Provenance::Nm,
            evals: state.evals - seen,
            best_min: state.values[0],
            mean_min: state.values.iter().sum::<f64>() / state.values.len() as f64,
            wall_s: start.elapsed().as_secs_f64(),
        });
        seen = state.evals;
        rounds = it;
    }
    let unit = if state.values[0] <= best.fitness {
        lift(&state.vertices[0])
    } else {
        best.unit
    };
    Ok((unit, Provenance::Nm, trace, draws + state.evals, rounds))
}

/// Writes report.json, ugv_route.csv, uav_plan.csv, fitness_trace.csv and routes.svg.
pub fn write_outputs(outcome: &RunOutcome, opts: &CliOptions) -> Result<()> {
    let dir = &opts.out;
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.json"), outcome.report(opts).to_json())?;
    std::fs::write(dir.join("fitness_trace.csv"), outcome.trace.to_csv(!opts.deterministic))?;
    let ev = &outcome.evaluation;
    let route_csv = ev
        .ugv_route
        .as_ref()
        .map_or_else(|| "t_s,x_km,y_km,state\n".to_string(), |r| r.to_csv());
    std::fs::write(dir.join("ugv_route.csv"), route_csv)?;
    match (&ev.ugv_route, &ev.graph) {
        (Some(route), Some(graph)) => {
            let plan = ev.plan.clone().unwrap_or_else(|| UavPlan::empty(graph));
            std::fs::write(dir.join("uav_plan.csv"), plan.to_csv(graph))?;
            std::fs::write(
                dir.join("routes.svg"),
                render_plot(&outcome.scenario, route, graph, &plan),
            )?;
        }
        _ => {
            std::fs::write(
                dir.join("uav_plan.csv"),
                "sortie,seq,vertex_kind,x_km,y_km,t_s,fuel_j,service_s\n",
            )?;
        }
    }
    Ok(())
}

/// Parses `args` (including the program name), runs, writes outputs and
/// returns the process exit code: 0 feasible, 2 infeasible, 1 usage or I/O error.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let opts = match CliOptions::try_parse_from(args) {
        Ok(o) => o,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let outcome = match execute(&opts) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return match e {
                Error::Infeasible(_) => 2,
                _ => 1,
            };
        }
    };
    if let Err(e) = write_outputs(&outcome, &opts) {
        eprintln!("error: {e}");
        return 1;
    }
    if outcome.evaluation.feasible() {
        0
    } else {
        if let Some(i) = &outcome.evaluation.infeasibility {
            eprintln!("infeasible: {i}");
        }
        2
    }
}
