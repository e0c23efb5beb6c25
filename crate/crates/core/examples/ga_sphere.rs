//! The genetic algorithm on an analytic surrogate.

use coop_route::ga::{run_ga, GaConfig};

pub fn main() {
    let sphere = |x: &[f64]| x.iter().map(|u| (u - 0.5).powi(2)).sum::<f64>();
    let cfg = GaConfig {
        max_generations: 30,
        stall_generations: 30,
        ..GaConfig::default()
    };
    let run = run_ga(&cfg, 7, &sphere).expect("valid config");
    for g in run.history.iter().step_by(5) {
        println!("gen {:>3}: best {:.5} mean {:.5}", g.generation, g.best, g.mean);
    }
    println!(
        "best {:.6} at {:?} after {} evaluations",
        run.best_f, run.best_x, run.evaluations
    );
}
