// Polynomial arithmetic over F_b, irreducible moduli and Laurent expansions.

use rqmc::gfpoly::{enumerate_monic_irreducibles, expansion_period, is_irreducible, laurent_expand, GFPoly};

pub fn run_example() -> rqmc::Result<()> {
    let a = GFPoly::parse(3, "2,0,1")?; // 2 + x^2
    let c = GFPoly::parse(3, "1,1")?; // 1 + x
    let (quot, rem) = a.mul(&c)?.add(&GFPoly::one(3))?.div_rem(&c)?;
    println!("((2 + x^2)(1 + x) + 1) / (1 + x) = {} rem {}", quot.to_coeff_string(), rem.to_coeff_string());
    println!("2 + x^2 irreducible over F_3: {}", is_irreducible(&a));

    for m in 1..=5 {
        println!("monic irreducibles of degree {m} over F_2: {}", enumerate_monic_irreducibles(2, m)?.len());
    }

    let p = GFPoly::parse(2, "1,1,0,0,1")?; // 1 + x + x^4
    let v = GFPoly::parse(2, "0,1")?;
    println!("x / (1 + x + x^4) = 0.{:?}... period {}", laurent_expand(&v, &p, 16)?, expansion_period(&v, &p)?);
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
