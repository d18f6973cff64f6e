// Prime pools, Bernoulli polynomials and the Korobov kernel weight.

use rqmc::numtheory::{bernoulli_value, korobov_kernel_weight, primes_in_half_open_range, riemann_zeta};

pub fn run_example() -> rqmc::Result<()> {
    for m in [10, 100, 1000] {
        let pool = primes_in_half_open_range(m);
        println!("|P_{m}| = {}, smallest {:?}", pool.len(), pool.primes.first());
    }
    println!("zeta(2) = {}, zeta(3) = {}", riemann_zeta(2.0)?, riemann_zeta(3.0)?);
    println!("B_2(1/3) = {}, B_4(1/3) = {}", bernoulli_value(2, 1.0 / 3.0)?, bernoulli_value(4, 1.0 / 3.0)?);
    // closed form for integer alpha, series otherwise
    for alpha in [1.0, 1.5, 2.0] {
        println!("omega_alpha={alpha}(0.25) = {:.10}", korobov_kernel_weight(alpha, 0.25)?);
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
