// Lattice points, a random shift and the tent transform, used to estimate
// an integral.

use rqmc::cbc::{construct_lattice, RandomSource};
use rqmc::experiment::Integrand;
use rqmc::korobov::{SpaceParams, Weights};
use rqmc::pointset::{integrate, lattice_points, random_shift, tent, write_points};

pub fn run_example() -> rqmc::Result<()> {
    let params = SpaceParams::new(2.0, Weights::Poly(2.0), 3)?;
    let mut rng = RandomSource::new(3);
    let (rule, _) = construct_lattice(&params, 31, 0.5, &mut rng)?;
    let points = lattice_points(&rule)?;

    let shifted = random_shift(&points, &mut rng);
    let tented = tent(&shifted);
    println!("first five of {} tented points:", tented.len());
    let mut buf = Vec::new();
    write_points(&tented, &mut buf)?;
    for line in String::from_utf8_lossy(&buf).lines().take(5) {
        println!("  {line}");
    }

    let f = Integrand::F1;
    for (label, ps) in [("plain", &points), ("shifted", &shifted), ("shifted+tent", &tented)] {
        let err = integrate(|x| f.eval(x), ps) - f.integral();
        println!("{label:>13}: error {err:+.3e}");
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
