//! Every crate example runs to completion.

#[path = "../examples/ateams_run.rs"]
mod ateams_run;

#[path = "../examples/ga_sphere.rs"]
mod ga_sphere;

#[path = "../examples/inner_vrp.rs"]
mod inner_vrp;

#[path = "../examples/load_scenario.rs"]
mod load_scenario;

#[path = "../examples/nelder_mead_sphere.rs"]
mod nelder_mead_sphere;

#[path = "../examples/outer_evaluate.rs"]
mod outer_evaluate;

#[path = "../examples/physics.rs"]
mod physics;

#[path = "../examples/render_plot.rs"]
mod render_plot;

#[path = "../examples/ugv_route.rs"]
mod ugv_route;

#[test]
fn ateams_run_runs() {
    ateams_run::main();
}

#[test]
fn ga_sphere_runs() {
    ga_sphere::main();
}

#[test]
fn inner_vrp_runs() {
    inner_vrp::main();
}

#[test]
fn load_scenario_runs() {
    load_scenario::main();
}

#[test]
fn nelder_mead_sphere_runs() {
    nelder_mead_sphere::main();
}

#[test]
fn outer_evaluate_runs() {
    outer_evaluate::main();
}

#[test]
fn physics_runs() {
    physics::main();
}

#[test]
fn render_plot_runs() {
    render_plot::main();
}

#[test]
fn ugv_route_runs() {
    ugv_route::main();
}
