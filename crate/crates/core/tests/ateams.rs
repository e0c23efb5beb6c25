use coop_route::ateams::{construct_population, improver_nm_round, run_ateams, ATeamsConfig, Counted, Provenance};
use coop_route::outer::{Assessment, Evaluator};
use coop_route::ugv::{decode_params, UnitVector};

/// Convex bowl in minutes, feasible everywhere except a thin slab.
struct Bowl;

impl Evaluator for Bowl {
    fn depot_count(&self) -> usize {
        3
    }

    fn assess(&self, unit: &UnitVector) -> Assessment {
        let fitness = 100.0 * unit[1..].iter().map(|u| (u - 0.3).powi(2)).sum::<f64>();
        Assessment {
            fitness,
            feasible: !(0.95..=1.0).contains(&unit[6]),
            params: decode_params(unit, 3).unwrap(),
            uncovered: 0,
            note: None,
        }
    }
}

fn cfg() -> ATeamsConfig {
    ATeamsConfig {
        capacity: 10,
        improver_rounds_budget: 6,
        threads: 2,
        deterministic: true,
        ..ATeamsConfig::default()
    }
}

#[test]
fn nm_improver_strictly_improves_on_a_bowl() {
    let cfg = cfg();
    let (pop, _) = construct_population(&Bowl, &cfg).unwrap();
    let out = improver_nm_round(&pop, &cfg, &Bowl).unwrap();
    assert_eq!(out.agent, Provenance::Nm);
    let best = out.candidates.iter().map(|c| c.fitness).fold(f64::INFINITY, f64::min);
    assert!(best < pop.best_fitness(), "{best} vs {}", pop.best_fitness());
}

#[test]
fn trace_evaluations_match_counted_calls() {
    let counted = Counted::new(&Bowl);
    let run = run_ateams(&counted, &cfg()).unwrap();
    assert_eq!(run.trace.total_evals(), counted.calls());
    assert_eq!(run.evaluations, counted.calls());
    let by_agent: usize = [Provenance::Constructor, Provenance::Ga, Provenance::Nm]
        .iter()
        .map(|&a| run.trace.evals_by_agent(a))
        .sum();
    assert_eq!(by_agent, counted.calls());
}

#[test]
fn best_never_worsens_across_rounds() {
    let run = run_ateams(&Bowl, &cfg()).unwrap();
    let best: Vec<f64> = run.trace.rows.iter().map(|r| r.best_min).collect();
    assert!(best.windows(2).all(|w| w[1] <= w[0]));
    assert!(run.population.check_invariants().is_empty());
    assert!(run.best.fitness < 1.0);
}

#[test]
fn infinite_tolerance_stops_after_one_window() {
    let cfg = ATeamsConfig {
        stall_window: 1,
        stall_tol: f64::INFINITY,
        ..cfg()
    };
    let run = run_ateams(&Bowl, &cfg).unwrap();
    assert_eq!(run.rounds, 1);
}

#[test]
fn serial_and_parallel_improvers_agree_when_deterministic() {
    let parallel = run_ateams(&Bowl, &cfg()).unwrap();
    let serial = run_ateams(
        &Bowl,
        &ATeamsConfig {
            parallel_improvers: false,
            ..cfg()
        },
    )
    .unwrap();
    assert_eq!(parallel.population, serial.population);
    assert_eq!(parallel.evaluations, serial.evaluations);
}

#[test]
fn same_seed_same_result() {
    let a = run_ateams(&Bowl, &cfg()).unwrap();
    let b = run_ateams(&Bowl, &ATeamsConfig { threads: 1, ..cfg() }).unwrap();
    assert_eq!(a.population, b.population);
    let c = run_ateams(&Bowl, &ATeamsConfig { seed: 1, ..cfg() }).unwrap();
    assert_ne!(a.population, c.population);
}

#[test]
fn nothing_feasible_is_an_infeasible_error() {
    struct Never;
    impl Evaluator for Never {
        fn depot_count(&self) -> usize {
            3
        }
        fn assess(&self, unit: &UnitVector) -> Assessment {
            Assessment {
                fitness: 1e6,
                feasible: false,
                params: decode_params(unit, 3).unwrap(),
                uncovered: 1,
                note: Some("unreachable target".into()),
            }
        }
    }
    let cfg = ATeamsConfig {
        capacity: 2,
        draw_cap_factor: 5,
        ..cfg()
    };
    let err = run_ateams(&Never, &cfg).unwrap_err();
    assert!(matches!(err, coop_route::Error::Infeasible(_)));
    assert!(err.to_string().contains("unreachable target"));
}
