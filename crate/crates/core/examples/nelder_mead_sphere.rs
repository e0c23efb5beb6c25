//! Nelder-Mead in the unit box from a corner start.

use coop_route::nelder_mead::{nm_optimize, Bounds, NmConfig};

pub fn main() {
    let mut sphere = |x: &[f64]| x.iter().map(|u| (u - 0.5).powi(2)).sum::<f64>();
    let r = nm_optimize(&mut sphere, &[1.0; 6], &Bounds::unit(6), &NmConfig::default()).expect("valid start");
    println!(
        "{} iterations, {} evaluations, best {:.2e}",
        r.iterations, r.evals, r.best_f
    );
    println!("x = {:?}", r.best_x);
}
