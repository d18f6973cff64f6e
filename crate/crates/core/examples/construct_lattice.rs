// Randomized CBC construction of a rank-1 lattice rule.
//
// ```bash
// cargo run --example construct_lattice
// ```

use rqmc::cbc::{construct_lattice, RandomSource};
use rqmc::document::{Provenance, RuleDocument};
use rqmc::korobov::{criterion_kernel, SpaceParams, Weights};

pub fn run_example() -> rqmc::Result<()> {
    let params = SpaceParams::new(2.0, Weights::Poly(2.0), 6)?;
    let mut rng = RandomSource::new(7);
    let (rule, trace) = construct_lattice(&params, 509, 0.5, &mut rng)?;

    println!("N = {} drawn from {} primes", rule.n, trace.modulus_pool);
    println!("z = {:?}", rule.z);
    for (l, (count, crit)) in trace.candidate_counts.iter().zip(&trace.criteria).enumerate() {
        println!("  dim {:>2}: kept {count:>3} candidates, e^2 = {crit:.3e}", l + 1);
    }
    assert_eq!(criterion_kernel(&params, &rule)?, trace.final_criterion);

    let provenance = Provenance { seed: 7, tau: 0.5, alpha: 2.0, weights: Weights::Poly(2.0) };
    let doc = RuleDocument::lattice(&rule, Some(509), provenance, None);
    println!("{}", doc.to_json()?);
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
