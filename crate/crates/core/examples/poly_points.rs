// Polynomial lattice points at finite and infinite digit precision, the
// exact rational value of a point, and a random digital shift.

use rqmc::cbc::RandomSource;
use rqmc::gfpoly::GFPoly;
use rqmc::pointset::{digital_shift, poly_lattice_points, poly_point_exact, write_digits, Precision};
use rqmc::walsh::PolyLatticeRule;

pub fn run_example() -> rqmc::Result<()> {
    // p = 1 + x + x^3, q = (1, 1 + x)
    let p = GFPoly::parse(2, "1,1,0,1")?;
    let rule = PolyLatticeRule::new(p, vec![GFPoly::one(2), GFPoly::parse(2, "1,1")?])?;

    let exact = poly_point_exact(&rule, 1, 0)?;
    println!("1/p has period {} and value {}", exact.period, exact.exact()?);

    let inf = poly_lattice_points(&rule, Precision::Infinite)?;
    let three = poly_lattice_points(&rule, Precision::Finite(3))?;
    for n in 0..inf.len() {
        println!("n = {n}: {:?} vs 3 digits {:?}", inf.point(n), three.point(n));
    }

    let shifted = digital_shift(&inf, &mut RandomSource::new(5), 8)?;
    let mut buf = Vec::new();
    write_digits(&shifted, &mut buf)?;
    print!("digitally shifted:\n{}", String::from_utf8_lossy(&buf));
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
