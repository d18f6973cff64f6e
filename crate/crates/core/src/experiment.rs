//! Variance-decay experiments: test integrands, the Monte Carlo baseline,
//! randomized lattice and polynomial lattice estimators, replication
//! statistics and rate fitting.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::cbc::{construct_lattice, construct_poly_lattice, RandomSource};
use crate::error::{Result, RqmcError};
use crate::korobov::{SpaceParams, Weights};
use crate::pointset::{
    default_shift_digits, digital_shift, integrate, lattice_points, poly_lattice_points, random_shift, tent,
    PointSet, Precision,
};
use crate::sum::CompensatedSum;

/// Test integrands on `[0,1]^s`, each with integral 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Integrand {
    /// `prod_j (1 + B_2(x_j) / j^2) - 1`
    F1,
    /// `prod_j (1 + B_4(x_j) / j^4) - 1`
    F2,
    /// `prod_j (1 + (|4 x_j - 2| - 1) / j^2) - 1`
    F3,
    /// `1`, with integral 1.
    Const1,
}

impl Integrand {
    pub fn name(self) -> &'static str {
        match self {
            Integrand::F1 => "f1",
            Integrand::F2 => "f2",
            Integrand::F3 => "f3",
            Integrand::Const1 => "const1",
        }
    }

    pub fn integral(self) -> f64 {
        match self {
            Integrand::Const1 => 1.0,
            _ => 0.0,
        }
    }

    /// Evaluates the product form as `prod - 1` without cancellation.
    pub fn eval(self, x: &[f64]) -> f64 {
        let factor: fn(f64, f64) -> f64 = match self {
            Integrand::F1 => |t, j| (t * (t - 1.0) + 1.0 / 6.0) / (j * j),
            Integrand::F2 => |t, j| {
                let u = t * (t - 1.0);
                (u * u - 1.0 / 30.0) / (j * j * j * j)
            },
            Integrand::F3 => |t, j| ((4.0 * t - 2.0).abs() - 1.0) / (j * j),
            Integrand::Const1 => return 1.0,
        };
        let mut eta = 0.0;
        for (i, &t) in x.iter().enumerate() {
            let a = factor(t, (i + 1) as f64);
            eta = eta * (1.0 + a) + a;
        }
        eta
    }

    /// Smoothness and weights used for the lattice constructions with this integrand.
    pub fn default_space(self) -> (f64, Weights) {
        match self {
            Integrand::F2 => (4.0, Weights::Poly(4.0)),
            _ => (2.0, Weights::Poly(2.0)),
        }
    }
}

impl fmt::Display for Integrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Integrand {
    type Err = RqmcError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f1" => Ok(Integrand::F1),
            "f2" => Ok(Integrand::F2),
            "f3" => Ok(Integrand::F3),
            "const1" => Ok(Integrand::Const1),
            _ => Err(RqmcError::Parse(format!("unknown integrand {s:?} (f1, f2, f3, const1)"))),
        }
    }
}

/// Estimator used in an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    Mc,
    LatticeShiftTent,
    LatticeShift,
    PolyLatticeDigitalShift,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Mc => "mc",
            Method::LatticeShiftTent => "rand-lattice-shift-tent",
            Method::LatticeShift => "rand-lattice-shift",
            Method::PolyLatticeDigitalShift => "rand-polylattice-digital-shift",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = RqmcError;

    fn from_str(s: &str) -> Result<Self> {
        [Method::Mc, Method::LatticeShiftTent, Method::LatticeShift, Method::PolyLatticeDigitalShift]
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                RqmcError::Parse(format!(
                    "unknown method {s:?} (mc, rand-lattice-shift-tent, rand-lattice-shift, rand-polylattice-digital-shift)"
                ))
            })
    }
}

/// Parses `a..bxr` (geometric, factor `r`) or a comma-separated list.
pub fn parse_sizes(text: &str) -> Result<Vec<u64>> {
    let bad = || RqmcError::Parse(format!("bad size schedule {text:?}"));
    let num = |t: &str| t.trim().parse::<u64>().map_err(|_| bad());
    if let Some((lo, rest)) = text.split_once("..") {
        let (hi, factor) = rest.split_once('x').ok_or_else(bad)?;
        let (lo, hi, factor) = (num(lo)?, num(hi)?, num(factor)?);
        if lo == 0 || factor < 2 || hi < lo {
            return Err(bad());
        }
        let mut out = vec![lo];
        while let Some(next) = out.last().unwrap().checked_mul(factor).filter(|&v| v <= hi) {
            out.push(next);
        }
        Ok(out)
    } else {
        text.split(',').map(num).collect()
    }
}

/// Full description of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub method: Method,
    pub integrands: Vec<Integrand>,
    pub dim: usize,
    pub alpha: f64,
    pub weights: Weights,
    pub tau: f64,
    /// `M` for lattice methods, `b^m` for polynomial lattices, `n` for Monte Carlo.
    pub sizes: Vec<u64>,
    pub replications: usize,
    pub seed: u64,
    /// Base of the polynomial lattice method.
    pub base: u32,
}

impl ExperimentConfig {
    /// Defaults: `tau = 1/2`, base 2, smoothness and weights from the first integrand.
    pub fn new(method: Method, integrands: Vec<Integrand>, dim: usize, sizes: Vec<u64>, replications: usize, seed: u64) -> Self {
        let (alpha, weights) = integrands.first().map_or((2.0, Weights::Poly(2.0)), |f| f.default_space());
        Self { method, integrands, dim, alpha, weights, tau: 0.5, sizes, replications, seed, base: 2 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.integrands.is_empty() {
            return Err(RqmcError::Domain("no integrand given".into()));
        }
        if self.replications < 2 {
            return Err(RqmcError::Domain(format!("R = {} but variance needs R >= 2", self.replications)));
        }
        if self.sizes.is_empty() || self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(RqmcError::Domain("size schedule must be non-empty and strictly increasing".into()));
        }
        if self.method == Method::PolyLatticeDigitalShift {
            for &size in &self.sizes {
                poly_degree(size, self.base)?;
            }
        }
        if self.method != Method::Mc {
            SpaceParams::new(self.alpha, self.weights.clone(), self.dim)?;
        }
        Ok(())
    }
}

/// `m` with `b^m = size`.
fn poly_degree(size: u64, b: u32) -> Result<usize> {
    let mut m = 0;
    let mut v = 1u64;
    while v < size {
        v = v.saturating_mul(b as u64);
        m += 1;
    }
    if v != size || m == 0 {
        return Err(RqmcError::Domain(format!("size {size} is not a positive power of {b}")));
    }
    Ok(m)
}

/// One replication at one size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub method: Method,
    pub integrand: Integrand,
    pub size: u64,
    pub rep: usize,
    pub n_points: u64,
    pub estimate: f64,
}

/// Sample variance over the replications at one size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub method: Method,
    pub integrand: Integrand,
    pub size: u64,
    pub variance: f64,
    pub replications: usize,
}

/// Records, summary and fitted slope for one integrand.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegrandResult {
    pub integrand: Integrand,
    pub records: Vec<ExperimentRecord>,
    pub summary: Vec<SummaryRow>,
    /// `None` when fewer than four sizes were run or a variance vanished.
    pub slope: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentOutput {
    pub config: ExperimentConfig,
    pub results: Vec<IntegrandResult>,
}

/// Equal-weight average of `f` at `n` i.i.d. uniform points.
pub fn mc_estimate<F: Fn(&[f64]) -> f64>(f: F, s: usize, n: u64, rng: &mut RandomSource) -> Result<f64> {
    Ok(mc_many(&[&f], s, n, rng)?[0])
}

type Integrands<'a> = &'a [&'a dyn Fn(&[f64]) -> f64];

fn mc_many(fs: Integrands<'_>, s: usize, n: u64, rng: &mut RandomSource) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(RqmcError::Domain("Monte Carlo needs n >= 1".into()));
    }
    let mut acc = vec![CompensatedSum::new(); fs.len()];
    let mut x = vec![0.0; s];
    for _ in 0..n {
        for xj in x.iter_mut() {
            *xj = rng.uniform();
        }
        for (a, f) in acc.iter_mut().zip(fs) {
            a.add(f(&x));
        }
    }
    Ok(acc.iter().map(|a| a.value() / n as f64).collect())
}

/// Point-set randomization applied after a lattice construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeRandomization {
    None,
    Shift,
    ShiftTent,
}

/// One draw of the randomized lattice estimator: construct `(N, z)` with a
/// fresh draw, randomize the points, average `f`. Returns the estimate and `N`.
pub fn randomized_lattice_estimate<F: Fn(&[f64]) -> f64>(
    f: F,
    params: &SpaceParams,
    m: u64,
    tau: f64,
    randomization: LatticeRandomization,
    rng: &mut RandomSource,
) -> Result<(f64, u64)> {
    let (est, n) = lattice_many(&[&f], params, m, tau, randomization, rng)?;
    Ok((est[0], n))
}

fn lattice_many(
    fs: Integrands<'_>,
    params: &SpaceParams,
    m: u64,
    tau: f64,
    randomization: LatticeRandomization,
    rng: &mut RandomSource,
) -> Result<(Vec<f64>, u64)> {
    let (rule, _) = construct_lattice(params, m, tau, rng)?;
    let plain = lattice_points(&rule)?;
    let ps = match randomization {
        LatticeRandomization::None => plain,
        LatticeRandomization::Shift => random_shift(&plain, rng),
        LatticeRandomization::ShiftTent => tent(&random_shift(&plain, rng)),
    };
    Ok((average_all(fs, &ps), rule.n))
}

/// One draw of the randomized polynomial lattice estimator: construct
/// `(p, q)` with a fresh draw, apply a random digital shift to the
/// infinite-precision points, average `f`.
pub fn randomized_poly_estimate<F: Fn(&[f64]) -> f64>(
    f: F,
    params: &SpaceParams,
    b: u32,
    m: usize,
    tau: f64,
    rng: &mut RandomSource,
) -> Result<(f64, u64)> {
    let (est, n) = poly_many(&[&f], params, b, m, tau, rng)?;
    Ok((est[0], n))
}

fn poly_many(
    fs: Integrands<'_>,
    params: &SpaceParams,
    b: u32,
    m: usize,
    tau: f64,
    rng: &mut RandomSource,
) -> Result<(Vec<f64>, u64)> {
    let (rule, _) = construct_poly_lattice(params, b, m, tau, rng)?;
    let plain = poly_lattice_points(&rule, Precision::Infinite)?;
    let ps = digital_shift(&plain, rng, default_shift_digits(b).max(m))?;
    Ok((average_all(fs, &ps), rule.n_points()))
}

fn average_all(fs: Integrands<'_>, ps: &PointSet) -> Vec<f64> {
    fs.iter().map(|f| integrate(f, ps)).collect()
}

/// `(1/(R-1)) sum_r (I_r - mean)^2`.
pub fn sample_variance(estimates: &[f64]) -> Result<f64> {
    let r = estimates.len();
    if r < 2 {
        return Err(RqmcError::Domain(format!("variance needs at least 2 values, got {r}")));
    }
    let mean = estimates.iter().copied().collect::<CompensatedSum>().value() / r as f64;
    let ss = estimates.iter().map(|&e| (e - mean) * (e - mean)).collect::<CompensatedSum>().value();
    Ok(ss / (r - 1) as f64)
}

/// Least-squares slope of `log(variance)` against `log(size)`.
pub fn fit_rate(sizes: &[f64], variances: &[f64]) -> Result<f64> {
    if sizes.len() != variances.len() {
        return Err(RqmcError::DimensionMismatch { expected: sizes.len(), got: variances.len() });
    }
    if sizes.len() < 4 {
        return Err(RqmcError::Domain(format!("slope fit needs at least 4 sizes, got {}", sizes.len())));
    }
    if let Some(v) = variances.iter().find(|&&v| !(v > 0.0)) {
        return Err(RqmcError::Domain(format!("nonpositive variance {v}")));
    }
    if let Some(v) = sizes.iter().find(|&&v| !(v > 0.0)) {
        return Err(RqmcError::Domain(format!("nonpositive size {v}")));
    }
    let xs: Vec<f64> = sizes.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = variances.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// Stream of the `rep`-th replication at the `size_index`-th size.
pub fn replication_source(seed: u64, size_index: usize, rep: usize) -> RandomSource {
    RandomSource::with_stream(seed, ((size_index as u64) << 32) | rep as u64)
}

fn replicate(config: &ExperimentConfig, params: Option<&SpaceParams>, size_index: usize, rep: usize) -> Result<(Vec<f64>, u64)> {
    let fs: Vec<Box<dyn Fn(&[f64]) -> f64>> = config
        .integrands
        .iter()
        .map(|&f| Box::new(move |x: &[f64]| f.eval(x)) as Box<dyn Fn(&[f64]) -> f64>)
        .collect();
    let refs: Vec<&dyn Fn(&[f64]) -> f64> = fs.iter().map(|b| b.as_ref()).collect();
    let mut rng = replication_source(config.seed, size_index, rep);
    let size = config.sizes[size_index];
    let params = || params.expect("space parameters for lattice methods");
    match config.method {
        Method::Mc => Ok((mc_many(&refs, config.dim, size, &mut rng)?, size)),
        Method::LatticeShiftTent => lattice_many(&refs, params(), size, config.tau, LatticeRandomization::ShiftTent, &mut rng),
        Method::LatticeShift => lattice_many(&refs, params(), size, config.tau, LatticeRandomization::Shift, &mut rng),
        Method::PolyLatticeDigitalShift => {
            poly_many(&refs, params(), config.base, poly_degree(size, config.base)?, config.tau, &mut rng)
        }
    }
}

/// Runs every `(size, replication)` job, in parallel on `threads` workers
/// (all available cores when `None`). Each job draws from its own stream,
/// so the output does not depend on the thread count.
pub fn run_experiment(config: &ExperimentConfig, threads: Option<usize>) -> Result<ExperimentOutput> {
    config.validate()?;
    let params = match config.method {
        Method::Mc => None,
        _ => Some(SpaceParams::new(config.alpha, config.weights.clone(), config.dim)?),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| RqmcError::Domain(format!("thread pool: {e}")))?;
    let jobs: Vec<(usize, usize)> = (0..config.sizes.len())
        .flat_map(|i| (0..config.replications).map(move |r| (i, r)))
        .collect();
    let outcomes: Vec<Result<(Vec<f64>, u64)>> =
        pool.install(|| jobs.par_iter().map(|&(i, r)| replicate(config, params.as_ref(), i, r)).collect());

    let mut results: Vec<IntegrandResult> = config
        .integrands
        .iter()
        .map(|&integrand| IntegrandResult { integrand, records: Vec::new(), summary: Vec::new(), slope: None })
        .collect();
    for (&(i, rep), outcome) in jobs.iter().zip(outcomes) {
        let (estimates, n_points) = outcome?;
        for (res, estimate) in results.iter_mut().zip(estimates) {
            res.records.push(ExperimentRecord {
                method: config.method,
                integrand: res.integrand,
                size: config.sizes[i],
                rep,
                n_points,
                estimate,
            });
        }
    }
    for res in &mut results {
        for &size in &config.sizes {
            let est: Vec<f64> = res.records.iter().filter(|r| r.size == size).map(|r| r.estimate).collect();
            res.summary.push(SummaryRow {
                method: config.method,
                integrand: res.integrand,
                size,
                variance: sample_variance(&est)?,
                replications: est.len(),
            });
        }
        let sizes: Vec<f64> = res.summary.iter().map(|r| r.size as f64).collect();
        let vars: Vec<f64> = res.summary.iter().map(|r| r.variance).collect();
        res.slope = fit_rate(&sizes, &vars).ok();
    }
    Ok(ExperimentOutput { config: config.clone(), results })
}

/// `method,size,rep,n_points,estimate`
pub fn write_records_csv<W: Write>(records: &[ExperimentRecord], mut out: W) -> Result<()> {
    writeln!(out, "method,size,rep,n_points,estimate")?;
    for r in records {
        writeln!(out, "{},{},{},{},{:e}", r.method, r.size, r.rep, r.n_points, r.estimate)?;
    }
    Ok(())
}

/// `method,size,variance,R`
pub fn write_summary_csv<W: Write>(summary: &[SummaryRow], mut out: W) -> Result<()> {
    writeln!(out, "method,size,variance,R")?;
    for r in summary {
        writeln!(out, "{},{},{:e},{}", r.method, r.size, r.variance, r.replications)?;
    }
    Ok(())
}

/// Whitespace-separated `size variance log2(size) log2(variance)` rows for gnuplot.
pub fn write_loglog<W: Write>(summary: &[SummaryRow], slope: Option<f64>, mut out: W) -> Result<()> {
    if let Some(first) = summary.first() {
        writeln!(out, "# {} {}", first.method, first.integrand)?;
    }
    match slope {
        Some(s) => writeln!(out, "# fitted slope {s:.4}")?,
        None => writeln!(out, "# fitted slope n/a")?,
    }
    writeln!(out, "# size variance log2_size log2_variance")?;
    for r in summary {
        writeln!(out, "{} {:e} {:.6} {:.6}", r.size, r.variance, (r.size as f64).log2(), r.variance.log2())?;
    }
    Ok(())
}

/// Writes `<prefix>_<integrand>_records.csv`, `_summary.csv` and `_loglog.dat`
/// into `dir`, returning the paths written.
pub fn write_outputs(output: &ExperimentOutput, dir: &Path, prefix: &str) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for res in &output.results {
        let stem = format!("{prefix}_{}", res.integrand);
        let records = dir.join(format!("{stem}_records.csv"));
        write_records_csv(&res.records, std::io::BufWriter::new(std::fs::File::create(&records)?))?;
        let summary = dir.join(format!("{stem}_summary.csv"));
        write_summary_csv(&res.summary, std::io::BufWriter::new(std::fs::File::create(&summary)?))?;
        let loglog = dir.join(format!("{stem}_loglog.dat"));
        write_loglog(&res.summary, res.slope, std::io::BufWriter::new(std::fs::File::create(&loglog)?))?;
        paths.extend([records, summary, loglog]);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::primes_in_half_open_range;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn integrand_examples() {
        let v = Integrand::F1.eval(&[0.5, 0.5]);
        assert!((v + 59.0 / 576.0).abs() < 1e-15);
        assert_eq!(Integrand::F3.eval(&[0.0]), 1.0);
        assert_eq!(Integrand::Const1.eval(&[0.3, 0.2]), 1.0);
        assert!((Integrand::F2.eval(&[0.0]) + 1.0 / 30.0).abs() < 1e-15);
        assert_eq!("f2".parse::<Integrand>().unwrap(), Integrand::F2);
        assert!("f4".parse::<Integrand>().is_err());
    }

    #[test]
    fn integrands_have_zero_mean() {
        // each factor integrates to 1: midpoint rule on a fine grid, one coordinate at a time
        for f in [Integrand::F1, Integrand::F2, Integrand::F3] {
            let n = 20000;
            let mean: f64 = (0..n).map(|i| f.eval(&[(i as f64 + 0.5) / n as f64])).sum::<f64>() / n as f64;
            assert!(mean.abs() < 1e-8, "{f}: {mean}");
        }
    }

    #[test]
    fn method_names_round_trip() {
        for m in ["mc", "rand-lattice-shift-tent", "rand-lattice-shift", "rand-polylattice-digital-shift"] {
            assert_eq!(m.parse::<Method>().unwrap().name(), m);
        }
        assert!("sobol".parse::<Method>().is_err());
    }

    #[test]
    fn size_schedules() {
        assert_eq!(parse_sizes("256..16384x2").unwrap(), vec![256, 512, 1024, 2048, 4096, 8192, 16384]);
        assert_eq!(parse_sizes("10,20,40").unwrap(), vec![10, 20, 40]);
        assert!(parse_sizes("1..8x1").is_err());
        assert!(parse_sizes("a,b").is_err());
    }

    #[test]
    fn variance_examples() {
        assert_eq!(sample_variance(&[3.0; 5]).unwrap(), 0.0);
        assert_eq!(sample_variance(&[0.0, 2.0]).unwrap(), 2.0);
        assert!(sample_variance(&[1.0]).is_err());
    }

    proptest! {
        #[test]
        fn variance_shift_invariant(xs in proptest::collection::vec(-10.0f64..10.0, 2..30), c in -5.0f64..5.0) {
            let a = sample_variance(&xs).unwrap();
            let shifted: Vec<f64> = xs.iter().map(|x| x + c).collect();
            let b = sample_variance(&shifted).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
        }
    }

    #[test]
    fn rate_fits() {
        let sizes: Vec<f64> = (8..16).map(|k| 2f64.powi(k)).collect();
        for rate in [-3.0, -1.0] {
            let v: Vec<f64> = sizes.iter().map(|s| 5.0 * s.powf(rate)).collect();
            assert!((fit_rate(&sizes, &v).unwrap() - rate).abs() < 1e-12);
        }
        let mut rng = RandomSource::new(4);
        let noisy: Vec<f64> = sizes.iter().map(|s| s.powf(-2.0) * (1.0 + 0.3 * (rng.uniform() - 0.5))).collect();
        assert!((fit_rate(&sizes, &noisy).unwrap() + 2.0).abs() < 0.1);
        assert!(fit_rate(&sizes[..3], &noisy[..3]).is_err());
        let mut zero = noisy.clone();
        zero[2] = 0.0;
        assert!(fit_rate(&sizes, &zero).is_err());
    }

    #[test]
    fn constant_integrand_is_exact() {
        let p = SpaceParams::new(2.0, Weights::Poly(2.0), 3).unwrap();
        let mut rng = RandomSource::new(1);
        assert_eq!(mc_estimate(|_| 2.5, 3, 100, &mut rng).unwrap(), 2.5);
        for _ in 0..5 {
            let (e, n) = randomized_lattice_estimate(|_| 1.0, &p, 61, 0.5, LatticeRandomization::ShiftTent, &mut rng).unwrap();
            assert_eq!(e, 1.0);
            assert!(primes_in_half_open_range(61).contains(n));
            let (e, n) = randomized_poly_estimate(|_| 1.0, &p, 2, 5, 0.5, &mut rng).unwrap();
            assert_eq!((e, n), (1.0, 32));
        }
    }

    #[test]
    fn mc_reproducible() {
        let f = |x: &[f64]| Integrand::F1.eval(x);
        let a = mc_estimate(f, 4, 500, &mut RandomSource::new(7)).unwrap();
        let b = mc_estimate(f, 4, 500, &mut RandomSource::new(7)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_frequency_averaging_identity() {
        // s = 1: the construction always returns z = 1, so only the draw of N varies
        let p = SpaceParams::new(2.0, Weights::Const(1.0), 1).unwrap();
        let pool = primes_in_half_open_range(40);
        let n_tilde = 37.0;
        let g = |x: &[f64]| 2f64.sqrt() * (2.0 * PI * n_tilde * x[0]).cos() / (n_tilde * n_tilde);
        let reps = 4000;
        let mut rng = RandomSource::new(99);
        let draws: Vec<f64> = (0..reps)
            .map(|_| randomized_lattice_estimate(g, &p, 40, 0.5, LatticeRandomization::None, &mut rng).unwrap().0.abs())
            .collect();
        let mean = draws.iter().sum::<f64>() / reps as f64;
        let want = 2f64.sqrt() / (pool.len() as f64 * n_tilde * n_tilde);
        let stderr = sample_variance(&draws).unwrap().sqrt() / (reps as f64).sqrt();
        assert!((mean - want).abs() < 4.0 * stderr, "{mean} vs {want} (stderr {stderr})");
    }

    #[test]
    fn randomized_lattice_is_unbiased() {
        let p = SpaceParams::new(2.0, Weights::Poly(2.0), 20).unwrap();
        let f = |x: &[f64]| Integrand::F1.eval(x);
        let est: Vec<f64> = (0..1000)
            .map(|r| {
                let mut rng = replication_source(5, 0, r);
                randomized_lattice_estimate(f, &p, 127, 0.5, LatticeRandomization::ShiftTent, &mut rng).unwrap().0
            })
            .collect();
        let mean = est.iter().sum::<f64>() / est.len() as f64;
        let stderr = (sample_variance(&est).unwrap() / est.len() as f64).sqrt();
        assert!(mean.abs() <= 4.0 * stderr, "{mean} (stderr {stderr})");
    }

    #[test]
    fn config_validation() {
        let mut c = ExperimentConfig::new(Method::Mc, vec![Integrand::F1], 2, vec![8, 16], 2, 0);
        assert!(c.validate().is_ok());
        c.replications = 1;
        assert!(c.validate().is_err());
        c.replications = 3;
        c.sizes = vec![16, 8];
        assert!(c.validate().is_err());
        let mut p = ExperimentConfig::new(Method::PolyLatticeDigitalShift, vec![Integrand::F1], 2, vec![8, 24], 2, 0);
        assert!(p.validate().is_err());
        p.sizes = vec![8, 16];
        assert!(p.validate().is_ok());
    }

    #[test]
    fn outputs_are_thread_independent() {
        let mut c = ExperimentConfig::new(Method::LatticeShiftTent, vec![Integrand::F1, Integrand::F3], 4, vec![31, 61, 127, 251], 4, 3);
        c.tau = 0.5;
        let a = run_experiment(&c, Some(1)).unwrap();
        let b = run_experiment(&c, Some(3)).unwrap();
        assert_eq!(a, b);
        let mut ta = Vec::new();
        write_records_csv(&a.results[0].records, &mut ta).unwrap();
        let text = String::from_utf8(ta).unwrap();
        assert!(text.starts_with("method,size,rep,n_points,estimate\nrand-lattice-shift-tent,31,0,"));
        assert_eq!(text.lines().count(), 1 + 16);
        assert!(a.results[0].slope.is_some());
    }
}
