//! Weighted Korobov space machinery: the weight function `r_{alpha,gamma}`,
//! the squared worst-case error of a rank-1 lattice rule (kernel route and
//! truncated dual-lattice route), and the worst-case error bound certificate
//! for rules produced by the randomized CBC construction.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, RqmcError};
use crate::numtheory::{closed_form_alpha, korobov_kernel_weight, riemann_zeta, BernoulliPoly};
use crate::pointset::PointSet;
use crate::sum::CompensatedSum;

/// Coordinate weights `gamma_1, gamma_2, ...`, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum Weights {
    /// Explicit `gamma_1, ..., gamma_n`.
    List(Vec<f64>),
    /// `gamma_j = j^(-p)`.
    Poly(f64),
    /// `gamma_j = c`.
    Const(f64),
}

impl Weights {
    /// Weight of coordinate `j` (1-based).
    pub fn get(&self, j: usize) -> Option<f64> {
        assert!(j >= 1, "weights are indexed from 1");
        match self {
            Weights::List(v) => v.get(j - 1).copied(),
            Weights::Poly(p) => Some((j as f64).powf(-p)),
            Weights::Const(c) => Some(*c),
        }
    }

    /// `gamma_1, ..., gamma_s`, validated.
    pub fn first(&self, s: usize) -> Result<Vec<f64>> {
        (1..=s)
            .map(|j| {
                let g = self.get(j).ok_or_else(|| {
                    RqmcError::InvalidWeights(format!("{self} has no weight for coordinate {j}"))
                })?;
                if !(0.0..=1.0).contains(&g) {
                    return Err(RqmcError::InvalidWeights(format!("gamma_{j} = {g} outside [0,1]")));
                }
                Ok(g)
            })
            .collect()
    }
}

impl fmt::Display for Weights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weights::List(v) => {
                let parts: Vec<String> = v.iter().map(|g| g.to_string()).collect();
                write!(f, "list:{}", parts.join(","))
            }
            Weights::Poly(p) => write!(f, "poly:{p}"),
            Weights::Const(c) => write!(f, "const:{c}"),
        }
    }
}

impl FromStr for Weights {
    type Err = RqmcError;

    /// `poly:p`, `list:g1,g2,...` or `const:c`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| RqmcError::InvalidWeights(format!("{s:?}: {why}"));
        let (kind, rest) = s.split_once(':').ok_or_else(|| bad("expected kind:value"))?;
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad("not a number"));
        let w = match kind.trim() {
            "poly" => {
                let p = num(rest)?;
                if !(p >= 0.0) {
                    return Err(bad("exponent must be non-negative"));
                }
                Weights::Poly(p)
            }
            "const" => Weights::Const(num(rest)?),
            "list" => Weights::List(rest.split(',').map(num).collect::<Result<_>>()?),
            _ => return Err(bad("unknown kind")),
        };
        match &w {
            Weights::Const(c) if !(0.0..=1.0).contains(c) => Err(bad("weight outside [0,1]")),
            Weights::List(v) if v.is_empty() || v.iter().any(|g| !(0.0..=1.0).contains(g)) => {
                Err(bad("weights must be a non-empty list in [0,1]"))
            }
            _ => Ok(w),
        }
    }
}

impl Serialize for Weights {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Weights {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Smoothness, weights and dimension shared by every criterion and bound.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceParams {
    pub alpha: f64,
    pub weights: Weights,
    pub dim: usize,
    gammas: Vec<f64>,
}

impl SpaceParams {
    pub fn new(alpha: f64, weights: Weights, dim: usize) -> Result<Self> {
        if !(alpha > 0.5) || !alpha.is_finite() {
            return Err(RqmcError::Domain(format!("alpha = {alpha} must exceed 1/2")));
        }
        if dim == 0 {
            return Err(RqmcError::Domain("dimension must be at least 1".into()));
        }
        let gammas = weights.first(dim)?;
        Ok(Self { alpha, weights, dim, gammas })
    }

    /// `gamma_j` for `j = 1..=dim` as a 0-based slice.
    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn gamma(&self, j: usize) -> f64 {
        self.gammas[j - 1]
    }

    /// Same space restricted to the first `dim` coordinates.
    pub fn truncated(&self, dim: usize) -> Result<Self> {
        Self::new(self.alpha, self.weights.clone(), dim)
    }
}

/// Rank-1 lattice rule with `n` points and generating vector `z`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeRule {
    pub n: u64,
    pub z: Vec<u64>,
}

impl LatticeRule {
    pub fn new(n: u64, z: Vec<u64>) -> Result<Self> {
        let rule = Self { n, z };
        rule.validate()?;
        Ok(rule)
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(RqmcError::InvalidRule(format!("N = {} must be at least 2", self.n)));
        }
        if self.z.is_empty() {
            return Err(RqmcError::InvalidRule("empty generating vector".into()));
        }
        if let Some(&bad) = self.z.iter().find(|&&zj| zj == 0 || zj >= self.n) {
            return Err(RqmcError::InvalidRule(format!("z_j = {bad} outside 1..{}", self.n - 1)));
        }
        Ok(())
    }
}

/// `r_{alpha,gamma}(k) = prod_{j: k_j != 0} |k_j|^alpha / gamma_j`; the
/// empty product is 1 and a zero weight on a nonzero frequency gives `+inf`.
pub fn r_weight(params: &SpaceParams, k: &[i64]) -> Result<f64> {
    if k.len() != params.dim {
        return Err(RqmcError::DimensionMismatch { expected: params.dim, got: k.len() });
    }
    Ok(k.iter()
        .zip(params.gammas())
        .filter(|(&kj, _)| kj != 0)
        .map(|(&kj, &g)| if g == 0.0 { f64::INFINITY } else { (kj.unsigned_abs() as f64).powf(params.alpha) / g })
        .product())
}

/// `omega_alpha(i / n)` for `i = 0..n`, exactly symmetric under `i -> n - i`.
#[derive(Debug, Clone)]
pub struct KernelTable {
    pub n: u64,
    pub values: Vec<f64>,
}

impl KernelTable {
    pub fn new(alpha: f64, n: u64) -> Result<Self> {
        let len = n as usize;
        let mut values = vec![0.0; len];
        let closed = match closed_form_alpha(alpha) {
            Some(a) => Some((BernoulliPoly::new(2 * a)?, crate::numtheory::bernoulli_scale(a))),
            None => None,
        };
        for i in 0..=len / 2 {
            let t = i as f64 / n as f64;
            let w = match &closed {
                Some((b, scale)) => scale * b.eval(t),
                None => korobov_kernel_weight(alpha, t)?,
            };
            values[i] = w;
            if i != 0 {
                values[len - i] = w;
            }
        }
        Ok(Self { n, values })
    }
}

/// Squared worst-case error of a rank-1 lattice rule in the weighted Korobov
/// space, `-1 + (1/N) sum_n prod_j [1 + gamma_j^2 omega_alpha({n z_j / N})]`.
///
/// The product is carried as `eta = prod - 1` so the leading `-1` never
/// cancels against a sum of order one.
pub fn criterion_kernel(params: &SpaceParams, rule: &LatticeRule) -> Result<f64> {
    rule.validate()?;
    if rule.dim() != params.dim {
        return Err(RqmcError::DimensionMismatch { expected: params.dim, got: rule.dim() });
    }
    let table = KernelTable::new(params.alpha, rule.n)?;
    Ok(criterion_with_table(params, rule, &table))
}

pub(crate) fn criterion_with_table(params: &SpaceParams, rule: &LatticeRule, table: &KernelTable) -> f64 {
    let n = rule.n;
    let mut acc = CompensatedSum::new();
    for i in 0..n {
        let mut eta = 0.0;
        for (&zj, &g) in rule.z.iter().zip(params.gammas()) {
            let a = g * g * table.values[((i as u128 * zj as u128) % n as u128) as usize];
            eta = eta * (1.0 + a) + a;
        }
        acc.add(eta);
    }
    acc.value() / n as f64
}

/// Cost guard for the brute-force dual-lattice sum.
pub const ORACLE_MAX_DIM: usize = 3;

/// Squared worst-case error summed directly over the dual lattice
/// `{k : k . z = 0 mod N}` inside the box `0 < |k|_inf <= kmax`.
///
/// Misses exactly the dual vectors outside the box, see [`oracle_tail_bound`].
pub fn criterion_oracle(params: &SpaceParams, rule: &LatticeRule, kmax: u64) -> Result<f64> {
    rule.validate()?;
    let s = rule.dim();
    if s != params.dim {
        return Err(RqmcError::DimensionMismatch { expected: params.dim, got: s });
    }
    if s > ORACLE_MAX_DIM {
        return Err(RqmcError::CostGuard(format!("oracle limited to s <= {ORACLE_MAX_DIM}, got {s}")));
    }
    if kmax < rule.n {
        return Err(RqmcError::Domain(format!("kmax = {kmax} must be at least N = {}", rule.n)));
    }
    let kmax = kmax as i64;
    let n = rule.n as i64;
    // per-coordinate 1/r^2 contributions and residues k z_j mod N
    let inv_r2 = |j: usize, k: i64| -> f64 {
        if k == 0 {
            1.0
        } else {
            let g = params.gamma(j + 1);
            g * g / (k.unsigned_abs() as f64).powf(2.0 * params.alpha)
        }
    };
    let mut acc = CompensatedSum::new();
    let mut k = vec![-kmax; s];
    loop {
        let dot = k
            .iter()
            .zip(&rule.z)
            .fold(0i64, |acc, (&kj, &zj)| (acc + kj.rem_euclid(n) * zj as i64) % n);
        if dot == 0 && k.iter().any(|&kj| kj != 0) {
            let w: f64 = k.iter().enumerate().map(|(j, &kj)| inv_r2(j, kj)).product();
            acc.add(w);
        }
        // odometer
        let mut j = 0;
        loop {
            if j == s {
                return Ok(acc.value());
            }
            if k[j] < kmax {
                k[j] += 1;
                break;
            }
            k[j] = -kmax;
            j += 1;
        }
    }
}

/// `sum_{k outside [-kmax, kmax]^s} 1 / r(k)^2`, an upper bound on the part
/// of the dual-lattice sum that [`criterion_oracle`] leaves out.
pub fn oracle_tail_bound(params: &SpaceParams, kmax: u64) -> Result<f64> {
    let two_alpha = 2.0 * params.alpha;
    let full = 2.0 * riemann_zeta(two_alpha)?;
    let mut partial = CompensatedSum::new();
    for k in (1..=kmax).rev() {
        partial.add((k as f64).powf(-two_alpha));
    }
    let inside = 2.0 * partial.value();
    let tail = (full - inside).max(0.0);
    Ok(product_difference(params.gammas().iter().map(|g| (1.0 + g * g * inside, g * g * tail))))
}

/// `prod (a_j + t_j) - prod a_j` without cancellation.
pub(crate) fn product_difference(terms: impl Iterator<Item = (f64, f64)>) -> f64 {
    let (mut prod_a, mut diff) = (1.0, 0.0);
    for (a, t) in terms {
        diff = diff * (a + t) + prod_a * t;
        prod_a *= a;
    }
    diff
}

fn check_bound_inputs(alpha: f64, tau: f64, lambda: f64) -> Result<()> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(RqmcError::Domain(format!("tau = {tau} must lie in (0,1)")));
    }
    if !(lambda >= 0.5 && lambda < alpha) {
        return Err(RqmcError::Domain(format!("lambda = {lambda} outside [1/2, alpha = {alpha})")));
    }
    Ok(())
}

/// `sum_{u nonempty} gamma_u^{1/lambda} c^{|u|} = prod_j (1 + gamma_j^{1/lambda} c) - 1`.
pub(crate) fn subset_sum_product(gammas: &[f64], lambda: f64, c: f64) -> f64 {
    gammas
        .iter()
        .map(|g| (g.powf(1.0 / lambda) * c).ln_1p())
        .sum::<f64>()
        .exp_m1()
}

/// Worst-case error bound for any rule from the randomized CBC with
/// `N` drawn from the primes in `(ceil(M/2), M]`:
/// `(2 / ((1 - tau) M) * sum_{u} gamma_u^{1/lambda} (2 zeta(alpha/lambda))^{|u|})^lambda`.
pub fn wce_bound(params: &SpaceParams, m: u64, tau: f64, lambda: f64) -> Result<f64> {
    check_bound_inputs(params.alpha, tau, lambda)?;
    let c = 2.0 * riemann_zeta(params.alpha / lambda)?;
    let base = 2.0 / ((1.0 - tau) * m as f64) * subset_sum_product(params.gammas(), lambda, c);
    Ok(base.powf(lambda))
}

/// `n` equispaced values from `1/2` to `alpha - 0.01`.
pub fn default_lambda_grid(alpha: f64) -> Vec<f64> {
    const POINTS: usize = 41;
    let hi = alpha - 0.01;
    (0..POINTS)
        .map(|i| 0.5 + (hi - 0.5) * i as f64 / (POINTS - 1) as f64)
        .collect()
}

/// Minimum of a bound over a lambda grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DStar {
    pub value: f64,
    pub lambda: f64,
    /// Whether the minimum is at most one, the size condition for the randomized-error rate.
    pub assumption_holds: bool,
}

pub(crate) fn grid_minimum(grid: &[f64], f: impl Fn(f64) -> Result<f64>) -> Result<DStar> {
    if grid.is_empty() {
        return Err(RqmcError::Domain("empty lambda grid".into()));
    }
    let mut best: Option<(f64, f64)> = None;
    for &l in grid {
        let v = f(l)?;
        if best.is_none_or(|(bv, _)| v < bv) {
            best = Some((v, l));
        }
    }
    let (value, lambda) = best.expect("non-empty grid");
    Ok(DStar { value, lambda, assumption_holds: value <= 1.0 })
}

/// Grid stand-in for `D*_M = inf_lambda wce_bound(lambda)`.
pub fn d_star(params: &SpaceParams, m: u64, tau: f64, lambda_grid: &[f64]) -> Result<DStar> {
    grid_minimum(lambda_grid, |l| wce_bound(params, m, tau, l))
}

/// Squared worst-case error of an arbitrary equal-weight rule through the
/// reproducing kernel: `-1 + (1/N^2) sum_{x,y} prod_j [1 + gamma_j^2 omega({x_j - y_j})]`.
/// Quadratic in the number of points.
pub fn wce_squared_pointset(params: &SpaceParams, points: &PointSet) -> Result<f64> {
    if points.dim() != params.dim {
        return Err(RqmcError::DimensionMismatch { expected: params.dim, got: points.dim() });
    }
    let n = points.len();
    let mut acc = CompensatedSum::new();
    for a in 0..n {
        let x = points.point(a);
        for b in 0..n {
            let y = points.point(b);
            let mut eta = 0.0;
            for j in 0..params.dim {
                let mut d = x[j] - y[j];
                d -= d.floor();
                if d >= 1.0 {
                    d = 0.0;
                }
                let g = params.gammas()[j];
                let w = g * g * korobov_kernel_weight(params.alpha, d)?;
                eta = eta * (1.0 + w) + w;
            }
            acc.add(eta);
        }
    }
    Ok(acc.value() / (n as f64 * n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params(alpha: f64, w: &[f64]) -> SpaceParams {
        SpaceParams::new(alpha, Weights::List(w.to_vec()), w.len()).unwrap()
    }

    #[test]
    fn weights_parse_and_display() {
        let w: Weights = "poly:2".parse().unwrap();
        assert_eq!(w, Weights::Poly(2.0));
        assert_eq!(w.to_string(), "poly:2");
        assert_eq!(w.get(3), Some(1.0 / 9.0));
        let l: Weights = "list:0.5,0.25".parse().unwrap();
        assert_eq!(l.first(2).unwrap(), vec![0.5, 0.25]);
        assert!(l.first(3).is_err());
        assert_eq!("const:0.3".parse::<Weights>().unwrap().get(7), Some(0.3));
        for bad in ["poly", "list:", "list:2", "const:1.5", "exp:1", "poly:-1"] {
            assert!(bad.parse::<Weights>().is_err(), "{bad}");
        }
    }

    #[test]
    fn space_params_validation() {
        assert!(SpaceParams::new(0.5, Weights::Const(1.0), 2).is_err());
        assert!(SpaceParams::new(1.0, Weights::Const(1.0), 0).is_err());
        assert!(SpaceParams::new(1.0, Weights::List(vec![0.5]), 2).is_err());
    }

    #[test]
    fn r_weight_examples() {
        let p = params(2.0, &[0.5, 0.25]);
        assert_eq!(r_weight(&p, &[0, 0]).unwrap(), 1.0);
        assert_eq!(r_weight(&p, &[3, 0]).unwrap(), 18.0);
        assert_eq!(r_weight(&p, &[3, -2]).unwrap(), 288.0);
        assert!(r_weight(&p, &[1]).is_err());
        let z = params(2.0, &[0.0, 1.0]);
        assert_eq!(r_weight(&z, &[1, 0]).unwrap(), f64::INFINITY);
        assert_eq!(r_weight(&z, &[0, 2]).unwrap(), 4.0);
    }

    #[test]
    fn criterion_one_dimensional_closed_forms() {
        // dual lattice of (N=5, z=1) in 1D: multiples of 5
        let rule = LatticeRule::new(5, vec![1]).unwrap();
        let r1 = criterion_kernel(&params(1.0, &[1.0]), &rule).unwrap();
        assert!((r1 - PI * PI / 75.0).abs() < 1e-12, "{r1}");
        assert!((r1 - 0.131_594_725_347_858_1).abs() < 1e-12);
        let r2 = criterion_kernel(&params(2.0, &[1.0]), &rule).unwrap();
        assert!((r2 - PI.powi(4) / (45.0 * 625.0)).abs() < 1e-14);
        let zero = criterion_kernel(&params(2.0, &[0.0, 0.0]), &LatticeRule::new(7, vec![1, 3]).unwrap()).unwrap();
        assert_eq!(zero, 0.0);
    }

    #[test]
    fn oracle_one_dimensional_example() {
        let rule = LatticeRule::new(5, vec![1]).unwrap();
        let got = criterion_oracle(&params(1.0, &[1.0]), &rule, 50).unwrap();
        let expected: f64 = 2.0 * (1..=10).map(|k| 1.0 / (5.0 * k as f64).powi(2)).sum::<f64>();
        assert!((got - expected).abs() < 1e-15);
        assert!(criterion_oracle(&params(1.0, &[1.0]), &rule, 4).is_err());
        let four = params(1.0, &[1.0; 4]);
        assert!(criterion_oracle(&four, &LatticeRule::new(5, vec![1; 4]).unwrap(), 5).is_err());
    }

    #[test]
    fn kernel_oracle_agreement_small() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for &n in &[5u64, 7, 11] {
            for &alpha in &[1.0, 2.0] {
                for s in 1..=2usize {
                    let p = params(alpha, &[0.9, 0.6][..s]);
                    let z: Vec<u64> = (0..s).map(|_| rng.random_range(1..n)).collect();
                    let rule = LatticeRule::new(n, z).unwrap();
                    let k = criterion_kernel(&p, &rule).unwrap();
                    let o = criterion_oracle(&p, &rule, 200).unwrap();
                    let tail = oracle_tail_bound(&p, 200).unwrap();
                    assert!(k - o >= -1e-13 && k - o <= tail + 1e-13, "N={n} a={alpha}: {k} {o} {tail}");
                }
            }
        }
    }

    #[test]
    fn criterion_reflection_symmetry_and_positivity() {
        for n in 2..=13u64 {
            let p = params(2.0, &[1.0, 0.5]);
            for z1 in 1..n {
                for z2 in 1..n {
                    let a = criterion_kernel(&p, &LatticeRule::new(n, vec![z1, z2]).unwrap()).unwrap();
                    let b = criterion_kernel(&p, &LatticeRule::new(n, vec![n - z1, z2]).unwrap()).unwrap();
                    let c = criterion_kernel(&p, &LatticeRule::new(n, vec![z1, n - z2]).unwrap()).unwrap();
                    assert!((a - b).abs() <= 1e-13 * a.abs().max(1.0));
                    assert!((a - c).abs() <= 1e-13 * a.abs().max(1.0));
                    assert!(a >= -1e-15);
                }
            }
        }
    }

    #[test]
    fn kernel_table_is_symmetric() {
        for n in [2u64, 5, 8, 13] {
            let t = KernelTable::new(2.0, n).unwrap();
            for i in 1..n as usize {
                assert_eq!(t.values[i], t.values[n as usize - i]);
            }
        }
        let t = KernelTable::new(1.25, 9).unwrap();
        assert!((t.values[2] - korobov_kernel_weight(1.25, 2.0 / 9.0).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn non_integer_alpha_criterion_matches_oracle() {
        let p = params(1.5, &[1.0, 0.5]);
        let rule = LatticeRule::new(11, vec![1, 4]).unwrap();
        let k = criterion_kernel(&p, &rule).unwrap();
        let o = criterion_oracle(&p, &rule, 400).unwrap();
        let tail = oracle_tail_bound(&p, 400).unwrap();
        assert!(k - o >= -1e-9 && k - o <= tail + 1e-9);
    }

    #[test]
    fn wce_bound_examples() {
        let p = params(2.0, &[1.0]);
        let b = wce_bound(&p, 100, 0.5, 1.0).unwrap();
        assert!((b - 0.04 * PI * PI / 3.0).abs() < 1e-14);
        assert!((b - 0.131_594_725_347_858_1).abs() < 1e-12);
        let half = wce_bound(&p, 200, 0.5, 1.0).unwrap();
        assert!((half - b / 2.0).abs() < 1e-15);
        let zero = params(2.0, &[0.0, 0.0, 0.0]);
        for l in [0.5, 1.0, 1.9] {
            assert_eq!(wce_bound(&zero, 100, 0.5, l).unwrap(), 0.0);
        }
        assert!(wce_bound(&p, 100, 0.5, 2.0).is_err());
        assert!(wce_bound(&p, 100, 0.5, 0.4).is_err());
        assert!(wce_bound(&p, 100, 1.0, 1.0).is_err());
    }

    #[test]
    fn wce_bound_product_form_matches_subset_sum() {
        let p = SpaceParams::new(2.0, Weights::Poly(2.0), 6).unwrap();
        let lambda = 1.3;
        let c = 2.0 * riemann_zeta(2.0 / lambda).unwrap();
        let mut brute = 0.0;
        for mask in 1u32..(1 << 6) {
            let mut t = 1.0;
            for j in 0..6 {
                if mask & (1 << j) != 0 {
                    t *= p.gammas()[j].powf(1.0 / lambda) * c;
                }
            }
            brute += t;
        }
        let expected = (2.0 / (0.5 * 300.0) * brute).powf(lambda);
        let got = wce_bound(&p, 300, 0.5, lambda).unwrap();
        assert!((got - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn d_star_examples() {
        let p = params(2.0, &[1.0]);
        let single = d_star(&p, 100, 0.5, &[1.0]).unwrap();
        assert_eq!(single.value, wce_bound(&p, 100, 0.5, 1.0).unwrap());
        let grid = default_lambda_grid(2.0);
        assert_eq!(grid.len(), 41);
        assert_eq!(grid[0], 0.5);
        assert!((grid[40] - 1.99).abs() < 1e-12);
        let ds = d_star(&p, 100, 0.5, &grid).unwrap();
        for &l in &grid {
            assert!(ds.value <= wce_bound(&p, 100, 0.5, l).unwrap());
        }
        let small = d_star(&p, 4, 0.5, &grid).unwrap();
        assert!(!small.assumption_holds);
        assert!(small.value > 1.0);
        assert!(d_star(&p, 4, 0.5, &[]).is_err());
    }

    #[test]
    fn pointset_kernel_formula_matches_lattice_criterion() {
        let p = params(2.0, &[1.0, 0.7]);
        let rule = LatticeRule::new(11, vec![1, 3]).unwrap();
        let ps = crate::pointset::lattice_points(&rule).unwrap();
        let a = wce_squared_pointset(&p, &ps).unwrap();
        let b = criterion_kernel(&p, &rule).unwrap();
        assert!((a - b).abs() < 1e-12);
    }
}
