// Base-b Walsh functions, their discrete orthogonality, and the weight
// sigma that turns the Walsh criterion into a finite sum.

use rqmc::walsh::{mu, sigma_weight, walsh_eval_real, WalshIndex};

pub fn run_example() -> rqmc::Result<()> {
    let b = 3;
    // wal_k with k < 27 is constant on each cell [j/27, (j+1)/27); sample the midpoints.
    let grid: Vec<f64> = (0..27).map(|j| (j as f64 + 0.5) / 27.0).collect();
    for k in 0..4u64 {
        let values = grid
            .iter()
            .map(|&x| walsh_eval_real(&WalshIndex::new(vec![k], b), &[x]))
            .collect::<rqmc::Result<Vec<_>>>()?;
        println!("wal_{k} on cells 0, 9, 18: {:.3} {:.3} {:.3}", values[0], values[9], values[18]);
        for l in 0..4u64 {
            let mut inner = num_complex::Complex64::new(0.0, 0.0);
            for (&x, v) in grid.iter().zip(&values) {
                inner += v * walsh_eval_real(&WalshIndex::new(vec![l], b), &[x])?.conj();
            }
            inner /= grid.len() as f64;
            assert!((inner.re - if k == l { 1.0 } else { 0.0 }).abs() < 1e-12 && inner.im.abs() < 1e-12);
        }
    }

    println!("mu(k) for k = 0..10 in base 2: {:?}", (0..10).map(|k| mu(k, 2)).collect::<Vec<_>>());
    for r in [None, Some(1), Some(2), Some(5)] {
        println!("sigma(alpha = 1, b = 2, first nonzero digit {r:?}) = {}", sigma_weight(1.0, 2, r)?);
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
