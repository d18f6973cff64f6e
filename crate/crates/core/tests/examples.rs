#[allow(dead_code)]
mod cli_session {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/cli_session.rs"));
}

#[allow(dead_code)]
mod construct_lattice {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/construct_lattice.rs"));
}

#[allow(dead_code)]
mod construct_poly_lattice {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/construct_poly_lattice.rs"));
}

#[allow(dead_code)]
mod convergence_experiment {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/convergence_experiment.rs"));
}

#[allow(dead_code)]
mod finite_fields {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/finite_fields.rs"));
}

#[allow(dead_code)]
mod kernel_vs_oracle {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/kernel_vs_oracle.rs"));
}

#[allow(dead_code)]
mod number_theory {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/number_theory.rs"));
}

#[allow(dead_code)]
mod poly_points {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/poly_points.rs"));
}

#[allow(dead_code)]
mod random_n_example {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/random_n_example.rs"));
}

#[allow(dead_code)]
mod shifted_tent_points {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/shifted_tent_points.rs"));
}

#[allow(dead_code)]
mod walsh_functions {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/walsh_functions.rs"));
}

#[allow(dead_code)]
mod worst_case_bound {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/worst_case_bound.rs"));
}

#[test]
fn cli_session_runs() {
    cli_session::run_example().expect("cli_session example should run");
}

#[test]
fn construct_lattice_runs() {
    construct_lattice::run_example().expect("construct_lattice example should run");
}

#[test]
fn construct_poly_lattice_runs() {
    construct_poly_lattice::run_example().expect("construct_poly_lattice example should run");
}

#[test]
fn convergence_experiment_runs() {
    convergence_experiment::run_example().expect("convergence_experiment example should run");
}

#[test]
fn finite_fields_runs() {
    finite_fields::run_example().expect("finite_fields example should run");
}

#[test]
fn kernel_vs_oracle_runs() {
    kernel_vs_oracle::run_example().expect("kernel_vs_oracle example should run");
}

#[test]
fn number_theory_runs() {
    number_theory::run_example().expect("number_theory example should run");
}

#[test]
fn poly_points_runs() {
    poly_points::run_example().expect("poly_points example should run");
}

#[test]
fn random_n_example_runs() {
    random_n_example::run_example().expect("random_n_example example should run");
}

#[test]
fn shifted_tent_points_runs() {
    shifted_tent_points::run_example().expect("shifted_tent_points example should run");
}

#[test]
fn walsh_functions_runs() {
    walsh_functions::run_example().expect("walsh_functions example should run");
}

#[test]
fn worst_case_bound_runs() {
    worst_case_bound::run_example().expect("worst_case_bound example should run");
}
