//! Command-line front end: `construct`, `bound`, `points`, `integrate`, `experiment`.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cbc::{construct_lattice, construct_poly_lattice, RandomSource};
use crate::document::{Provenance, Rule, RuleDocument};
use crate::error::{Result, RqmcError};
use crate::experiment::{parse_sizes, run_experiment, write_outputs, ExperimentConfig, Integrand, Method};
use crate::korobov::{default_lambda_grid, wce_bound, SpaceParams, Weights};
use crate::pointset::{
    default_shift_digits, digital_shift, integrate, lattice_points, poly_lattice_points, random_shift, tent,
    write_digits, write_points, PointSet, Precision,
};
use crate::walsh::walsh_wce_bound;

#[derive(Debug, Parser)]
#[command(name = "rqmc", version, about = "Randomized CBC lattice and polynomial lattice rules")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "RQMC_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Construct a rule by randomized CBC and print it as JSON.
    Construct(ConstructArgs),
    /// Print the worst-case error bound over a lambda grid.
    Bound(BoundArgs),
    /// Dump the points of a rule, optionally randomized.
    Points(PointsArgs),
    /// Average a test integrand over the points of a rule.
    Integrate(IntegrateArgs),
    /// Run a variance-decay experiment and write CSV files.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Lattice,
    Polylattice,
}

fn parse_tau(s: &str) -> std::result::Result<f64, String> {
    let t: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if t > 0.0 && t < 1.0 {
        Ok(t)
    } else {
        Err(format!("tau must lie in the open interval (0,1), got {t}"))
    }
}

fn parse_weights(s: &str) -> std::result::Result<Weights, String> {
    s.parse().map_err(|e: RqmcError| e.to_string())
}

/// Space and construction flags shared by several subcommands.
#[derive(Debug, Clone, Args)]
pub struct SpaceArgs {
    #[arg(long, value_enum, default_value = "lattice")]
    pub kind: Kind,
    /// Lattice size parameter: N is drawn from the primes in (ceil(M/2), M].
    #[arg(long = "M")]
    pub big_m: Option<u64>,
    /// Base of the polynomial lattice.
    #[arg(long, default_value_t = 2)]
    pub b: u32,
    /// Degree of the polynomial modulus (b^m points).
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub s: usize,
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    /// `poly:p`, `list:g1,g2,...` or `const:c`.
    #[arg(long, default_value = "poly:2", value_parser = parse_weights)]
    pub weights: Weights,
    #[arg(long, default_value = "0.5", value_parser = parse_tau)]
    pub tau: f64,
}

impl SpaceArgs {
    fn params(&self) -> Result<SpaceParams> {
        SpaceParams::new(self.alpha, self.weights.clone(), self.s)
    }

    fn need_big_m(&self) -> Result<u64> {
        self.big_m.ok_or_else(|| RqmcError::Parse("--M is required for --kind lattice".into()))
    }

    fn need_m(&self) -> Result<usize> {
        self.m.ok_or_else(|| RqmcError::Parse("--m is required for --kind polylattice".into()))
    }

    fn provenance(&self, seed: u64) -> Provenance {
        Provenance { seed, tau: self.tau, alpha: self.alpha, weights: self.weights.clone() }
    }

    /// Runs the construction these flags describe.
    fn construct(&self, seed: u64) -> Result<RuleDocument> {
        let params = self.params()?;
        let mut rng = RandomSource::new(seed);
        match self.kind {
            Kind::Lattice => {
                let m = self.need_big_m()?;
                let (rule, trace) = construct_lattice(&params, m, self.tau, &mut rng)?;
                Ok(RuleDocument::lattice(&rule, Some(m), self.provenance(seed), Some(trace)))
            }
            Kind::Polylattice => {
                let (rule, trace) = construct_poly_lattice(&params, self.b, self.need_m()?, self.tau, &mut rng)?;
                Ok(RuleDocument::poly_lattice(&rule, self.provenance(seed), Some(trace)))
            }
        }
    }
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    /// `a..b:step` or a comma list; default 41 points from 0.5 to alpha - 0.01.
    #[arg(long)]
    pub lambda_grid: Option<String>,
}

/// Where the rule comes from: a JSON file or construction flags.
#[derive(Debug, Args)]
pub struct RuleSource {
    /// Rule JSON written by `construct`.
    #[arg(long)]
    pub rule: Option<PathBuf>,
    #[command(flatten)]
    pub space: SpaceArgs,
    /// Seed of the construction and of any randomization.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl RuleSource {
    fn load(&self) -> Result<Rule> {
        match &self.rule {
            Some(path) => RuleDocument::read(path)?.rule(),
            None => self.space.construct(self.seed)?.rule(),
        }
    }
}

/// Point generation and randomization flags.
#[derive(Debug, Args)]
pub struct PointArgs {
    /// Digit precision of polynomial lattice points: a positive integer or `inf`.
    #[arg(long, default_value = "inf")]
    pub precision: String,
    /// Apply one uniform random shift.
    #[arg(long)]
    pub shift: bool,
    /// Apply the tent transform (after the shift, if any).
    #[arg(long)]
    pub tent: bool,
    /// Apply a random digital shift (polynomial lattices).
    #[arg(long)]
    pub digital_shift: bool,
    /// Depth of the digital shift; defaults to 53 digits in base 2.
    #[arg(long)]
    pub shift_digits: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PointsArgs {
    #[command(flatten)]
    pub source: RuleSource,
    #[command(flatten)]
    pub points: PointArgs,
    /// Print the carried digit strings instead of decimals.
    #[arg(long)]
    pub exact: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IntegrateArgs {
    #[command(flatten)]
    pub source: RuleSource,
    #[command(flatten)]
    pub points: PointArgs,
    /// Integrand: f1, f2, f3 or const1.
    #[arg(long = "f")]
    pub integrand: Integrand,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// mc, rand-lattice-shift-tent, rand-lattice-shift or rand-polylattice-digital-shift.
    #[arg(long)]
    pub method: Method,
    /// Comma-separated integrands sharing each replication's point set.
    #[arg(long = "f", value_delimiter = ',', required = true)]
    pub integrands: Vec<Integrand>,
    #[arg(long, default_value_t = 20)]
    pub s: usize,
    /// `a..bxr` or a comma list of sizes (M, b^m or n).
    #[arg(long)]
    pub sizes: String,
    #[arg(long = "R", default_value_t = 100)]
    pub replications: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Defaults to the first integrand's smoothness.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Defaults to the first integrand's weights.
    #[arg(long, value_parser = parse_weights)]
    pub weights: Option<Weights>,
    #[arg(long, default_value = "0.5", value_parser = parse_tau)]
    pub tau: f64,
    #[arg(long, default_value_t = 2)]
    pub b: u32,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// File name prefix; defaults to the method name.
    #[arg(long)]
    pub prefix: Option<String>,
}

/// `a..b:step` or `l1,l2,...`.
pub fn parse_lambda_grid(text: &str) -> Result<Vec<f64>> {
    let bad = || RqmcError::Parse(format!("bad lambda grid {text:?}"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
    if let Some((lo, rest)) = text.split_once("..") {
        let (hi, step) = rest.split_once(':').ok_or_else(bad)?;
        let (lo, hi, step) = (num(lo)?, num(hi)?, num(step)?);
        if !(step > 0.0) || hi < lo {
            return Err(bad());
        }
        let count = ((hi - lo) / step + 1e-9).floor() as usize;
        Ok((0..=count).map(|i| lo + i as f64 * step).collect())
    } else {
        text.split(',').map(num).collect()
    }
}

fn precision(text: &str) -> Result<Precision> {
    match text {
        "inf" | "infinite" => Ok(Precision::Infinite),
        t => t
            .parse()
            .map(Precision::Finite)
            .map_err(|_| RqmcError::Parse(format!("precision must be a positive integer or inf, got {t:?}"))),
    }
}

/// Points of `rule` with the requested randomizations, drawn from `seed`.
pub fn build_points(rule: &Rule, args: &PointArgs, seed: u64) -> Result<PointSet> {
    let mut rng = RandomSource::new(seed);
    let mut ps = match rule {
        Rule::Lattice(r) => lattice_points(r)?,
        Rule::PolyLattice(r) => poly_lattice_points(r, precision(&args.precision)?)?,
    };
    if args.digital_shift {
        let b = match rule {
            Rule::PolyLattice(r) => r.base,
            Rule::Lattice(_) => return Err(RqmcError::Domain("digital shift needs a polynomial lattice".into())),
        };
        ps = digital_shift(&ps, &mut rng, args.shift_digits.unwrap_or_else(|| default_shift_digits(b)))?;
    }
    if args.shift {
        ps = random_shift(&ps, &mut rng);
    }
    if args.tent {
        ps = tent(&ps);
    }
    Ok(ps)
}

fn emit(text: &str, path: Option<&PathBuf>, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| RqmcError::Io(format!("{}: {e}", p.display()))),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn cmd_bound(args: &BoundArgs, out: &mut dyn Write) -> Result<()> {
    let sp = &args.space;
    let params = sp.params()?;
    let grid = match &args.lambda_grid {
        Some(g) => parse_lambda_grid(g)?,
        None => default_lambda_grid(sp.alpha),
    };
    let bound = |l: f64| -> Result<f64> {
        match sp.kind {
            Kind::Lattice => wce_bound(&params, sp.need_big_m()?, sp.tau, l),
            Kind::Polylattice => walsh_wce_bound(&params, sp.b, sp.need_m()?, sp.tau, l),
        }
    };
    writeln!(out, "lambda bound")?;
    let mut best: Option<(f64, f64)> = None;
    for &l in &grid {
        let v = bound(l)?;
        writeln!(out, "{l:.4} {v:e}")?;
        if best.is_none_or(|(bv, _)| v < bv) {
            best = Some((v, l));
        }
    }
    let (v, l) = best.ok_or_else(|| RqmcError::Domain("empty lambda grid".into()))?;
    writeln!(out, "minimum {v:e} at lambda {l:.4}")?;
    let verdict = if v <= 1.0 { "holds" } else { "fails" };
    writeln!(out, "size assumption (minimum <= 1): {verdict}")?;
    Ok(())
}

fn cmd_experiment(args: &ExperimentArgs, threads: Option<usize>, out: &mut dyn Write) -> Result<()> {
    let sizes = parse_sizes(&args.sizes)?;
    let mut config = ExperimentConfig::new(args.method, args.integrands.clone(), args.s, sizes, args.replications, args.seed);
    if let Some(a) = args.alpha {
        config.alpha = a;
    }
    if let Some(w) = &args.weights {
        config.weights = w.clone();
    }
    config.tau = args.tau;
    config.base = args.b;
    let output = run_experiment(&config, threads)?;
    let prefix = args.prefix.clone().unwrap_or_else(|| args.method.name().to_string());
    for path in write_outputs(&output, &args.out_dir, &prefix)? {
        writeln!(out, "wrote {}", path.display())?;
    }
    for res in &output.results {
        match res.slope {
            Some(s) => writeln!(out, "{} {} slope {s:.4}", args.method, res.integrand)?,
            None => writeln!(out, "{} {} slope n/a (need >= 4 sizes with positive variance)", args.method, res.integrand)?,
        }
    }
    Ok(())
}

/// Executes a parsed command line, writing normal output to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    if let Some(n) = cli.threads {
        // a global pool may already exist when called twice in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match &cli.command {
        Command::Construct(a) => {
            let doc = a.space.construct(a.seed)?;
            emit(&(doc.to_json()? + "\n"), a.out.as_ref(), out)
        }
        Command::Bound(a) => cmd_bound(a, out),
        Command::Points(a) => {
            let rule = a.source.load()?;
            let ps = build_points(&rule, &a.points, a.source.seed)?;
            let mut buf = Vec::new();
            if a.exact {
                write_digits(&ps, &mut buf)?;
            } else {
                write_points(&ps, &mut buf)?;
            }
            emit(&String::from_utf8(buf).expect("ascii output"), a.out.as_ref(), out)
        }
        Command::Integrate(a) => {
            let rule = a.source.load()?;
            let ps = build_points(&rule, &a.points, a.source.seed)?;
            let f = a.integrand;
            writeln!(out, "{:?}", integrate(|x| f.eval(x), &ps))?;
            Ok(())
        }
        Command::Experiment(a) => cmd_experiment(a, cli.threads, out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Result<String> {
        let cli = Cli::try_parse_from(std::iter::once("rqmc").chain(args.iter().copied()))
            .map_err(|e| RqmcError::Parse(e.to_string()))?;
        let mut out = Vec::new();
        run(&cli, &mut out)?;
        Ok(String::from_utf8(out).unwrap())
    }

    #[test]
    fn construct_lattice_json() {
        let text = run_args(&[
            "construct", "--kind", "lattice", "--M", "127", "--s", "5", "--alpha", "2", "--weights", "poly:2",
            "--tau", "0.5", "--seed", "42",
        ])
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let n = v["N"].as_u64().unwrap();
        assert!((67..=127).contains(&n));
        assert!(crate::numtheory::primes_in_half_open_range(127).contains(n));
        assert_eq!(v["z"][0], 1);
        assert_eq!(v["z"].as_array().unwrap().len(), 5);
        assert_eq!(v["schema"], "rqmc/1");
    }

    #[test]
    fn construct_usage_errors() {
        assert!(run_args(&["construct", "--M", "127", "--tau", "1.0"]).is_err());
        assert!(run_args(&["construct", "--M", "127", "--weights", "bogus:1"]).is_err());
        assert!(run_args(&["construct", "--kind", "polylattice"]).is_err());
        for seed in ["1", "2", "3"] {
            let v: serde_json::Value =
                serde_json::from_str(&run_args(&["construct", "--M", "50", "--s", "1", "--seed", seed]).unwrap()).unwrap();
            assert_eq!(v["z"], serde_json::json!([1]));
        }
    }

    #[test]
    fn bound_report() {
        let a = run_args(&["bound", "--M", "100", "--s", "1", "--weights", "const:1", "--lambda-grid", "1"]).unwrap();
        let b = run_args(&["bound", "--M", "200", "--s", "1", "--weights", "const:1", "--lambda-grid", "1"]).unwrap();
        let val = |t: &str| -> f64 { t.lines().nth(1).unwrap().split_whitespace().nth(1).unwrap().parse().unwrap() };
        assert!((val(&a) / val(&b) - 2.0).abs() < 1e-12);
        let zero = run_args(&["bound", "--M", "100", "--s", "3", "--weights", "const:0"]).unwrap();
        assert!(zero.contains("minimum 0e0"));
        assert!(zero.contains("holds"));
        assert!(run_args(&["bound", "--M", "100", "--lambda-grid", "0.4..1:0.1"]).is_err());
        let poly = run_args(&["bound", "--kind", "polylattice", "--m", "8", "--weights", "const:1", "--lambda-grid", "1"]).unwrap();
        assert!((val(&poly) - 1.0 / 255.0).abs() < 1e-15);
    }

    #[test]
    fn lambda_grid_parsing() {
        let g = parse_lambda_grid("0.5..1.95:0.05").unwrap();
        assert_eq!(g.len(), 30);
        assert!((g[29] - 1.95).abs() < 1e-12);
        assert_eq!(parse_lambda_grid("1,1.5").unwrap(), vec![1.0, 1.5]);
        assert!(parse_lambda_grid("x").is_err());
    }

    #[test]
    fn round_trip_through_files() {
        let dir = tempfile::tempdir().unwrap();
        let rule = dir.path().join("rule.json");
        let rule_s = rule.to_str().unwrap();
        run_args(&["construct", "--M", "61", "--s", "3", "--seed", "5", "--out", rule_s]).unwrap();
        let file_est = run_args(&["integrate", "--rule", rule_s, "--f", "f1", "--shift", "--tent", "--seed", "9"]).unwrap();

        let params = SpaceParams::new(2.0, Weights::Poly(2.0), 3).unwrap();
        let (r, _) = construct_lattice(&params, 61, 0.5, &mut RandomSource::new(5)).unwrap();
        let mut rng = RandomSource::new(9);
        let ps = tent(&random_shift(&lattice_points(&r).unwrap(), &mut rng));
        let direct = integrate(|x| Integrand::F1.eval(x), &ps);
        assert_eq!(file_est.trim(), format!("{direct:?}"));

        let pts = run_args(&["points", "--rule", rule_s, "--shift", "--tent", "--seed", "9"]).unwrap();
        let parsed: Vec<f64> = pts.split_whitespace().map(|t| t.parse().unwrap()).collect();
        let from_dump = PointSet::from_coords(3, parsed).unwrap();
        assert_eq!(integrate(|x| Integrand::F1.eval(x), &from_dump), direct);

        assert_eq!(run_args(&["integrate", "--rule", rule_s, "--f", "const1"]).unwrap().trim(), "1.0");
        assert!(run_args(&["integrate", "--rule", "/nonexistent/rule.json", "--f", "f1"]).is_err());
    }

    #[test]
    fn poly_points_exact_dump() {
        let text = run_args(&["points", "--kind", "polylattice", "--m", "3", "--s", "1", "--exact", "--precision", "7"]).unwrap();
        assert_eq!(text.lines().count(), 8);
        assert!(text.lines().all(|l| l.starts_with("0.") && l.len() == 9));
        let shifted = run_args(&["integrate", "--kind", "polylattice", "--m", "4", "--s", "2", "--digital-shift", "--f", "const1"]).unwrap();
        assert_eq!(shifted.trim(), "1.0");
        assert!(run_args(&["points", "--M", "13", "--digital-shift"]).is_err());
    }

    #[test]
    fn experiment_writes_files() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path().to_str().unwrap();
        let text = run_args(&[
            "experiment", "--method", "mc", "--f", "f1,f3", "--s", "3", "--sizes", "64..512x2", "--R", "5", "--seed", "1",
            "--out-dir", d,
        ])
        .unwrap();
        assert!(text.contains("mc f1 slope"));
        let summary = std::fs::read_to_string(dir.path().join("mc_f3_summary.csv")).unwrap();
        assert!(summary.starts_with("method,size,variance,R\nmc,64,"));
        assert!(dir.path().join("mc_f1_loglog.dat").exists());
        assert!(run_args(&["experiment", "--method", "mc", "--f", "f1", "--sizes", "64", "--R", "1", "--out-dir", d]).is_err());
    }
}
