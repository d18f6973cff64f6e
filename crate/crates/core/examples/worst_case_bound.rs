// Worst-case error bound for any rule the randomized CBC can return,
// minimized over a grid of lambda values.

use rqmc::cbc::{construct_lattice, RandomSource};
use rqmc::korobov::{criterion_kernel, d_star, default_lambda_grid, wce_bound, SpaceParams, Weights};

pub fn run_example() -> rqmc::Result<()> {
    let params = SpaceParams::new(2.0, Weights::Poly(2.0), 5)?;
    let (m, tau) = (1021, 0.5);

    for lambda in [0.5, 1.0, 1.5, 1.9] {
        println!("lambda {lambda:.2}: bound {:.4e}", wce_bound(&params, m, tau, lambda)?);
    }
    let best = d_star(&params, m, tau, &default_lambda_grid(params.alpha))?;
    println!("minimum {:.4e} at lambda {:.2} (assumption holds: {})", best.value, best.lambda, best.assumption_holds);

    for seed in 0..5 {
        let (rule, _) = construct_lattice(&params, m, tau, &mut RandomSource::new(seed))?;
        let e = criterion_kernel(&params, &rule)?.sqrt();
        println!("seed {seed}: N = {:>4}, e = {e:.4e}", rule.n);
        assert!(e <= best.value);
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
