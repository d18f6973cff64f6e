//! Weighted Walsh space machinery for rank-1 polynomial lattice rules:
//! `mu(k)`, `r~_{alpha,gamma}`, base-`b` Walsh functions, the kernel weight
//! `varsigma`, the squared worst-case error (kernel and dual-sum routes) and
//! the worst-case error bound certificate.

use std::f64::consts::PI;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Result, RqmcError};
use crate::gfpoly::{digit_count, index_add, index_scale, is_irreducible, poly_mod_mul, GFPoly};
use crate::korobov::{grid_minimum, product_difference, subset_sum_product, DStar, SpaceParams};
use crate::sum::CompensatedSum;

/// Rank-1 polynomial lattice rule over `F_b` with modulus `p` of degree `m`
/// and generating vector `q` (each of degree below `m`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyLatticeRule {
    pub base: u32,
    pub m: usize,
    pub p: GFPoly,
    pub q: Vec<GFPoly>,
}

impl PolyLatticeRule {
    pub fn new(p: GFPoly, q: Vec<GFPoly>) -> Result<Self> {
        let m = p
            .degree()
            .filter(|&d| d >= 1)
            .ok_or_else(|| RqmcError::InvalidRule("modulus must have degree >= 1".into()))?;
        let rule = Self { base: p.base(), m, p, q };
        rule.validate()?;
        Ok(rule)
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    /// `b^m`.
    pub fn n_points(&self) -> u64 {
        (self.base as u64).pow(self.m as u32)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p.degree() != Some(self.m) {
            return Err(RqmcError::InvalidRule(format!("deg(p) must equal m = {}", self.m)));
        }
        if self.q.is_empty() {
            return Err(RqmcError::InvalidRule("empty generating vector".into()));
        }
        for qj in &self.q {
            if qj.base() != self.base {
                return Err(RqmcError::BaseMismatch(self.base, qj.base()));
            }
            if qj.degree().is_some_and(|d| d >= self.m) {
                return Err(RqmcError::InvalidRule(format!("deg({qj}) must be below m = {}", self.m)));
            }
        }
        Ok(())
    }

    /// Irreducible modulus different from `x`: the condition under which
    /// the infinite-precision points are purely periodic expansions.
    pub(crate) fn require_infinite_precision(&self) -> Result<()> {
        if !is_irreducible(&self.p) {
            return Err(RqmcError::InvalidRule(format!("modulus {} is reducible", self.p)));
        }
        if self.p.make_monic() == GFPoly::x(self.base) {
            return Err(RqmcError::InvalidRule("modulus p(x) = x is excluded".into()));
        }
        Ok(())
    }
}

/// Number of base-`b` digits of `k`, with `mu(0) = 0`.
pub fn mu(k: u64, b: u32) -> u32 {
    digit_count(k, b)
}

/// `r~(k) = prod_{j: k_j != 0} b^(alpha mu(k_j)) / gamma_j`; `+inf` when a zero weight meets a nonzero index.
pub fn r_tilde(params: &SpaceParams, b: u32, k: &[u64]) -> Result<f64> {
    if k.len() != params.dim {
        return Err(RqmcError::DimensionMismatch { expected: params.dim, got: k.len() });
    }
    Ok(k.iter()
        .zip(params.gammas())
        .filter(|(&kj, _)| kj != 0)
        .map(|(&kj, &g)| {
            if g == 0.0 {
                f64::INFINITY
            } else {
                (b as f64).powf(params.alpha * mu(kj, b) as f64) / g
            }
        })
        .product())
}

/// Walsh index vector with its base-`b` digit expansions cached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalshIndex {
    pub k: Vec<u64>,
    pub base: u32,
    digits: Vec<Vec<u32>>,
}

impl WalshIndex {
    pub fn new(k: Vec<u64>, base: u32) -> Self {
        let digits = k
            .iter()
            .map(|&kj| {
                let mut d = Vec::new();
                let mut v = kj;
                while v > 0 {
                    d.push((v % base as u64) as u32);
                    v /= base as u64;
                }
                d
            })
            .collect();
        Self { k, base, digits }
    }

    /// Digits needed from each coordinate of `x`: `max_j mu(k_j)`.
    pub fn precision(&self) -> usize {
        self.digits.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `sum_j sum_i kappa_{j,i} xi_{j,i+1} mod b`, the exponent of `omega_b`.
    pub fn exponent(&self, x_digits: &[&[u32]]) -> Result<u32> {
        if x_digits.len() != self.k.len() {
            return Err(RqmcError::DimensionMismatch { expected: self.k.len(), got: x_digits.len() });
        }
        let b = self.base as u64;
        let mut e = 0u64;
        for (kd, xd) in self.digits.iter().zip(x_digits) {
            for (i, &kappa) in kd.iter().enumerate() {
                if kappa == 0 {
                    continue;
                }
                let xi = *xd.get(i).ok_or_else(|| {
                    RqmcError::Domain(format!("need {} digits of x, got {}", kd.len(), xd.len()))
                })?;
                e = (e + kappa as u64 * xi as u64) % b;
            }
        }
        Ok(e as u32)
    }
}

/// `omega_b^e` on the unit circle, exact for `e = 0` and for `b = 2`.
pub fn root_of_unity(e: u32, b: u32) -> Complex64 {
    let e = e % b;
    match (e, b) {
        (0, _) => Complex64::new(1.0, 0.0),
        (1, 2) => Complex64::new(-1.0, 0.0),
        _ => Complex64::from_polar(1.0, 2.0 * PI * e as f64 / b as f64),
    }
}

/// `wal_k(x)` from exact base-`b` digit streams of each coordinate.
pub fn walsh_eval_digits(k: &WalshIndex, x_digits: &[&[u32]]) -> Result<Complex64> {
    Ok(root_of_unity(k.exponent(x_digits)?, k.base))
}

/// First `count` base-`b` digits of a real `x` in `[0, 1)`.
///
/// The digits are those of the double `x` exactly. For `b != 2` a double
/// usually stands in for a nearby real, so extraction is refused when `x`
/// lies within a few ulps of a `b`-adic boundary it is not exactly on: the
/// rounding of `x` would then decide the digit.
pub fn real_digits(x: f64, b: u32, count: usize) -> Result<Vec<u32>> {
    if !(0.0..1.0).contains(&x) {
        return Err(RqmcError::Domain(format!("{x} outside [0,1)")));
    }
    if x == 0.0 {
        return Ok(vec![0; count]);
    }
    if b == 2 {
        let mut y = x;
        return Ok((0..count)
            .map(|_| {
                y *= 2.0;
                let d = y.floor();
                y -= d;
                d as u32
            })
            .collect());
    }
    // x = mant / 2^shift exactly
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let (mant, shift) = if exp == 0 {
        (bits & ((1 << 52) - 1), 1074u32)
    } else {
        ((bits & ((1 << 52) - 1)) | (1 << 52), (1075 - exp) as u32)
    };
    let den = BigUint::one() << shift;
    let mut rem = BigUint::from(mant);
    let tol = 8.0 * (x.next_up() - x);
    let mut scale = 1.0;
    let mut digits = Vec::with_capacity(count);
    for _ in 0..count {
        rem *= b;
        let d = &rem >> shift;
        rem -= &d << shift;
        digits.push(d.to_u32().expect("digit below b"));
        scale /= b as f64;
        if !rem.is_zero() {
            let near = rem.clone().min(&den - &rem);
            let dist = BigRational::new(BigInt::from(near), BigInt::from(den.clone())).to_f64().unwrap_or(0.0) * scale;
            if dist < tol {
                return Err(RqmcError::Domain(format!(
                    "{x} is too close to a base-{b} digit boundary for exact digits"
                )));
            }
        }
    }
    Ok(digits)
}

/// `wal_k(x)` for real coordinates.
pub fn walsh_eval_real(k: &WalshIndex, x: &[f64]) -> Result<Complex64> {
    let prec = k.precision();
    let digits = x
        .iter()
        .map(|&xj| real_digits(xj, k.base, prec))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&[u32]> = digits.iter().map(Vec::as_slice).collect();
    walsh_eval_digits(k, &refs)
}

/// `varsigma(x) = sum_{k>=1} b^(-2 alpha mu(k)) wal_k(x)` in closed form,
/// depending only on the index `r` of the first nonzero digit of `x`
/// (`None` for `x = 0`):
/// `(b-1)/(b^{2a}-b)` at zero, else `(b-1)/(b^{2a}-b) - (b^{2a}-1)/(b^{(2a-1) r} (b^{2a}-b))`.
pub fn sigma_weight(alpha: f64, b: u32, first_nonzero: Option<u32>) -> Result<f64> {
    if !(alpha > 0.5) {
        return Err(RqmcError::Domain(format!("alpha = {alpha} must exceed 1/2")));
    }
    let bf = b as f64;
    let b2a = bf.powf(2.0 * alpha);
    let head = (bf - 1.0) / (b2a - bf);
    Ok(match first_nonzero {
        None => head,
        Some(0) => return Err(RqmcError::Domain("digit positions start at 1".into())),
        Some(r) => head - (b2a - 1.0) / (bf.powf((2.0 * alpha - 1.0) * r as f64) * (b2a - bf)),
    })
}

/// `varsigma` indexed by `mu` of a packed residue `v = n q mod p`:
/// entry 0 is the zero point, entry `a >= 1` has first nonzero digit `m + 1 - a`.
pub(crate) fn sigma_by_mu(alpha: f64, b: u32, m: usize) -> Result<Vec<f64>> {
    (0..=m)
        .map(|a| sigma_weight(alpha, b, (a > 0).then(|| (m + 1 - a) as u32)))
        .collect()
}

/// `mu(i)` for every packed polynomial index `i` below `b^m`.
pub(crate) fn mu_table(b: u32, m: usize) -> Vec<u8> {
    let size = (b as usize).pow(m as u32);
    let mut out = vec![0u8; size];
    let mut place = 1usize;
    for a in 1..=m {
        let hi = (place * b as usize).min(size);
        out[place..hi].fill(a as u8);
        place *= b as usize;
    }
    out
}

/// Packed residues `k(x) q(x) mod p(x)` for `k = 0..len`.
pub(crate) fn linear_residues(q: &GFPoly, p: &GFPoly, len: u64) -> Result<Vec<u64>> {
    let b = p.base() as u64;
    let x = GFPoly::x(p.base());
    let mut table = vec![0u64; len as usize];
    let mut cur = q.rem(p)?;
    let mut place = 1u64;
    while place < len {
        let basis = cur.index();
        for k in 1..b {
            let term = index_scale(basis, k as u32, p.base());
            let start = k * place;
            if start >= len {
                break;
            }
            for rest in 0..place.min(len - start) {
                table[(start + rest) as usize] = index_add(table[rest as usize], term, p.base());
            }
        }
        cur = poly_mod_mul(&cur, &x, p)?;
        place *= b;
    }
    Ok(table)
}

/// Squared worst-case error of an infinite-precision polynomial lattice
/// rule in the weighted Walsh space,
/// `-1 + (1/b^m) sum_x prod_j [1 + gamma_j^2 varsigma(x_j)]`.
///
/// Each coordinate of point `n` is `phi(v/p)` with `v = n q_j mod p`, and its
/// first nonzero digit sits at position `m - deg(v)`, so no digit expansion
/// is ever formed.
pub fn criterion_walsh_kernel(params: &SpaceParams, rule: &PolyLatticeRule) -> Result<f64> {
    rule.validate()?;
    rule.require_infinite_precision()?;
    if rule.dim() != params.dim {
        return Err(RqmcError::DimensionMismatch { expected: params.dim, got: rule.dim() });
    }
    let sig = sigma_by_mu(params.alpha, rule.base, rule.m)?;
    let mus = mu_table(rule.base, rule.m);
    let size = rule.n_points();
    let mut eta = vec![0.0f64; size as usize];
    for (qj, &g) in rule.q.iter().zip(params.gammas()) {
        let res = linear_residues(qj, &rule.p, size)?;
        let g2 = g * g;
        for (e, &r) in eta.iter_mut().zip(&res) {
            let a = g2 * sig[mus[r as usize] as usize];
            *e = *e * (1.0 + a) + a;
        }
    }
    Ok(eta.iter().copied().collect::<CompensatedSum>().value() / size as f64)
}

/// Cost guard: the oracle enumerates `kmax^s` index vectors.
const WALSH_ORACLE_MAX_TERMS: f64 = 5e8;

/// Squared worst-case error summed over the dual polynomial lattice
/// `{k : k(x) . q(x) = 0 mod p(x)}` inside `{0, ..., kmax - 1}^s \ {0}`.
pub fn criterion_walsh_oracle(params: &SpaceParams, rule: &PolyLatticeRule, kmax: u64) -> Result<f64> {
    rule.validate()?;
    let s = rule.dim();
    if s != params.dim {
        return Err(RqmcError::DimensionMismatch { expected: params.dim, got: s });
    }
    if s > crate::korobov::ORACLE_MAX_DIM || (kmax as f64).powi(s as i32) > WALSH_ORACLE_MAX_TERMS {
        return Err(RqmcError::CostGuard(format!("oracle over {kmax}^{s} indices refused")));
    }
    let b = rule.base;
    let residues = rule
        .q
        .iter()
        .map(|qj| linear_residues(qj, &rule.p, kmax))
        .collect::<Result<Vec<_>>>()?;
    let weights: Vec<Vec<f64>> = params
        .gammas()
        .iter()
        .map(|&g| {
            (0..kmax)
                .map(|k| {
                    if k == 0 {
                        1.0
                    } else {
                        g * g * (b as f64).powf(-2.0 * params.alpha * mu(k, b) as f64)
                    }
                })
                .collect()
        })
        .collect();
    let mut acc = CompensatedSum::new();
    let mut k = vec![0u64; s];
    loop {
        if k.iter().any(|&kj| kj != 0) {
            let sum = k
                .iter()
                .enumerate()
                .fold(0u64, |acc, (j, &kj)| index_add(acc, residues[j][kj as usize], b));
            if sum == 0 {
                acc.add(k.iter().enumerate().map(|(j, &kj)| weights[j][kj as usize]).product());
            }
        }
        let mut j = 0;
        loop {
            if j == s {
                return Ok(acc.value());
            }
            k[j] += 1;
            if k[j] < kmax {
                break;
            }
            k[j] = 0;
            j += 1;
        }
    }
}

/// `sum_{k >= 1} b^(-2 alpha mu(k))` restricted to `k < kmax`, and the full sum.
fn walsh_one_dim_sums(alpha: f64, b: u32, kmax: u64) -> (f64, f64) {
    let bf = b as f64;
    let full = (bf - 1.0) / (bf.powf(2.0 * alpha) - bf);
    let mut inside = 0.0;
    let mut lo = 1u64;
    let mut a = 1;
    while lo < kmax {
        let hi = lo.saturating_mul(b as u64).min(kmax);
        inside += (hi - lo) as f64 * bf.powf(-2.0 * alpha * a as f64);
        lo = lo.saturating_mul(b as u64);
        a += 1;
    }
    (inside, full)
}

/// Upper bound on the dual-sum mass outside `{0, ..., kmax - 1}^s`.
pub fn walsh_oracle_tail_bound(params: &SpaceParams, b: u32, kmax: u64) -> f64 {
    let (inside, full) = walsh_one_dim_sums(params.alpha, b, kmax);
    let tail = (full - inside).max(0.0);
    product_difference(params.gammas().iter().map(|g| (1.0 + g * g * inside, g * g * tail)))
}

/// Worst-case error bound for any rule from the randomized polynomial CBC:
/// `(1/((1-tau)(b^m-1)) sum_u gamma_u^{1/lambda} ((b-1)/(b^{alpha/lambda}-b))^{|u|})^lambda`.
pub fn walsh_wce_bound(params: &SpaceParams, b: u32, m: usize, tau: f64, lambda: f64) -> Result<f64> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(RqmcError::Domain(format!("tau = {tau} must lie in (0,1)")));
    }
    if !(lambda >= 0.5 && lambda < params.alpha) {
        return Err(RqmcError::Domain(format!(
            "lambda = {lambda} outside [1/2, alpha = {})",
            params.alpha
        )));
    }
    let bf = b as f64;
    let c = (bf - 1.0) / (bf.powf(params.alpha / lambda) - bf);
    let points = bf.powi(m as i32) - 1.0;
    let base = subset_sum_product(params.gammas(), lambda, c) / ((1.0 - tau) * points);
    Ok(base.powf(lambda))
}

/// Grid minimum of [`walsh_wce_bound`].
pub fn walsh_d_star(params: &SpaceParams, b: u32, m: usize, tau: f64, lambda_grid: &[f64]) -> Result<DStar> {
    grid_minimum(lambda_grid, |l| walsh_wce_bound(params, b, m, tau, l))
}

/// Per-lambda bound values, as reported by the CLI.
#[derive(Debug, Clone, Serialize)]
pub struct BoundRow {
    pub lambda: f64,
    pub bound: f64,
}
