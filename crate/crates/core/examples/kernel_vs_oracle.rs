// The closed-form lattice criterion against a direct sum over the dual
// lattice inside a box, with the analytic bound on what the box misses.

use rqmc::korobov::{criterion_kernel, criterion_oracle, oracle_tail_bound, LatticeRule, SpaceParams, Weights};

pub fn run_example() -> rqmc::Result<()> {
    let params = SpaceParams::new(1.0, Weights::List(vec![1.0, 0.7]), 2)?;
    let rule = LatticeRule::new(13, vec![1, 5])?;
    let kernel = criterion_kernel(&params, &rule)?;
    for kmax in [25, 50, 100, 200] {
        let oracle = criterion_oracle(&params, &rule, kmax)?;
        let tail = oracle_tail_bound(&params, kmax)?;
        println!("kmax {kmax:>3}: oracle {oracle:.8}, kernel - oracle {:.2e} <= tail {tail:.2e}", kernel - oracle);
        assert!((kernel - oracle).abs() <= tail);
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
