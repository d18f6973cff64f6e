// A small variance-decay experiment comparing Monte Carlo with randomized
// lattice and polynomial lattice rules.

use rqmc::experiment::{run_experiment, write_summary_csv, ExperimentConfig, Integrand, Method};

pub fn run_example() -> rqmc::Result<()> {
    let sizes = vec![32, 64, 128, 256, 512];
    for method in [Method::Mc, Method::LatticeShiftTent, Method::PolyLatticeDigitalShift] {
        let config = ExperimentConfig::new(method, vec![Integrand::F1], 4, sizes.clone(), 16, 1);
        let out = run_experiment(&config, None)?;
        let res = &out.results[0];
        let mut buf = Vec::new();
        write_summary_csv(&res.summary, &mut buf)?;
        print!("{}", String::from_utf8_lossy(&buf));
        match res.slope {
            Some(s) => println!("fitted slope {s:.2}\n"),
            None => println!("fitted slope n/a\n"),
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
