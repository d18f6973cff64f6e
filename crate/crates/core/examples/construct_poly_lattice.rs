// Randomized CBC construction of a polynomial lattice rule over F_2.

use rqmc::cbc::{construct_poly_lattice, RandomSource};
use rqmc::korobov::{default_lambda_grid, SpaceParams, Weights};
use rqmc::walsh::{criterion_walsh_kernel, walsh_d_star};

pub fn run_example() -> rqmc::Result<()> {
    let params = SpaceParams::new(2.0, Weights::Poly(2.0), 5)?;
    let (b, m, tau) = (2, 10, 0.5);
    let (rule, trace) = construct_poly_lattice(&params, b, m, tau, &mut RandomSource::new(11))?;

    println!("p = {} (one of {} irreducibles of degree {m})", rule.p.to_coeff_string(), trace.modulus_pool);
    for (j, q) in rule.q.iter().enumerate() {
        println!("  q_{} = {}", j + 1, q.to_coeff_string());
    }
    let e = criterion_walsh_kernel(&params, &rule)?.sqrt();
    let bound = walsh_d_star(&params, b, m, tau, &default_lambda_grid(params.alpha))?;
    println!("e = {e:.4e}, bound {:.4e} at lambda {:.2}", bound.value, bound.lambda);
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
