// Why the number of points is drawn at random: a single cosine defeats any
// fixed N, but its error averages away over the prime pool.

use std::f64::consts::PI;

use rqmc::korobov::LatticeRule;
use rqmc::numtheory::primes_in_half_open_range;
use rqmc::pointset::{integrate, lattice_points};

pub fn run_example() -> rqmc::Result<()> {
    let pool = primes_in_half_open_range(40);
    println!("P_40 = {:?}", pool.primes);
    for &n_tilde in &pool.primes {
        let nt = n_tilde as f64;
        let g = |x: &[f64]| 2f64.sqrt() * (2.0 * PI * nt * x[0]).cos() / (nt * nt);
        let mut errors = Vec::new();
        for &n in &pool.primes {
            let ps = lattice_points(&LatticeRule::new(n, vec![1])?)?;
            errors.push(integrate(g, &ps).abs());
        }
        let avg = errors.iter().sum::<f64>() / errors.len() as f64;
        println!(
            "N~ = {n_tilde}: worst {:.3e}, average {avg:.3e}, sqrt2/(|P| N~^2) = {:.3e}",
            errors.iter().cloned().fold(0.0, f64::max),
            2f64.sqrt() / (pool.len() as f64 * nt * nt)
        );
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
