//! Prime ranges, the Riemann zeta function, Bernoulli polynomials and the
//! one-dimensional Korobov kernel weight
//! `omega_alpha(t) = sum_{k != 0} exp(2 pi i k t) / |k|^(2 alpha)`.

use std::f64::consts::PI;

use num_rational::Rational64;

use crate::error::{Result, RqmcError};

/// All primes `N` with `ceil(M/2) < N <= M`, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeRange {
    pub m: u64,
    pub primes: Vec<u64>,
}

impl PrimeRange {
    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.primes.binary_search(&n).is_ok()
    }
}

const SEGMENT: u64 = 1 << 15;

/// Segmented sieve of Eratosthenes over `(ceil(M/2), M]`.
pub fn primes_in_half_open_range(m: u64) -> PrimeRange {
    let lo = m.div_ceil(2) + 1;
    if m < 2 || lo > m {
        return PrimeRange { m, primes: Vec::new() };
    }
    let base = small_primes(isqrt(m));
    let mut primes = Vec::new();
    let mut seg_lo = lo;
    let mut mark = vec![true; SEGMENT as usize];
    while seg_lo <= m {
        let seg_hi = (seg_lo + SEGMENT - 1).min(m);
        let len = (seg_hi - seg_lo + 1) as usize;
        mark[..len].fill(true);
        for &p in &base {
            if p * p > seg_hi {
                break;
            }
            let mut start = (seg_lo.div_ceil(p) * p).max(p * p);
            while start <= seg_hi {
                mark[(start - seg_lo) as usize] = false;
                start += p;
            }
        }
        for (i, &is_p) in mark[..len].iter().enumerate() {
            let n = seg_lo + i as u64;
            if is_p && n >= 2 {
                primes.push(n);
            }
        }
        seg_lo = seg_hi + 1;
    }
    PrimeRange { m, primes }
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn small_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(i, &p)| p.then_some(i as u64))
        .collect()
}

/// Lower edge of the zeta domain: arguments must exceed `1 + ZETA_DOMAIN_EPS`.
pub const ZETA_DOMAIN_EPS: f64 = 1e-9;

// B_2, B_4, ..., B_20
const BERNOULLI_NUMBERS: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Riemann zeta for real `x > 1`: a short direct sum plus the Euler-Maclaurin tail.
pub fn riemann_zeta(x: f64) -> Result<f64> {
    if !(x > 1.0 + ZETA_DOMAIN_EPS) {
        return Err(RqmcError::Domain(format!("zeta({x}) needs x > 1 + {ZETA_DOMAIN_EPS}")));
    }
    const K: f64 = 32.0;
    let mut head = 0.0;
    // small terms first
    for k in (1..32).rev() {
        head += (k as f64).powf(-x);
    }
    let k_pow = K.powf(-x);
    let mut tail = K * k_pow / (x - 1.0) + 0.5 * k_pow;
    // rising factorial x (x+1) ... (x+2j-2) / (2j)! times K^{-x-2j+1}
    let mut coef = x / 2.0 * k_pow / K;
    for (j, b2j) in BERNOULLI_NUMBERS.iter().enumerate() {
        let j = j as f64 + 1.0;
        tail += b2j * coef;
        coef *= (x + 2.0 * j - 1.0) * (x + 2.0 * j) / ((2.0 * j + 1.0) * (2.0 * j + 2.0)) / (K * K);
    }
    Ok(head + tail)
}

/// Bernoulli polynomial of even degree with exact rational coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliPoly {
    pub degree: u32,
    /// `coefficients[i]` multiplies `x^i`.
    pub coefficients: Vec<Rational64>,
}

impl BernoulliPoly {
    pub fn new(two_alpha: u32) -> Result<Self> {
        let r = |n: i64, d: i64| Rational64::new(n, d);
        let coefficients = match two_alpha {
            2 => vec![r(1, 6), r(-1, 1), r(1, 1)],
            4 => vec![r(-1, 30), r(0, 1), r(1, 1), r(-2, 1), r(1, 1)],
            6 => vec![r(1, 42), r(0, 1), r(-1, 2), r(0, 1), r(5, 2), r(-3, 1), r(1, 1)],
            8 => vec![
                r(-1, 30),
                r(0, 1),
                r(2, 3),
                r(0, 1),
                r(-7, 3),
                r(0, 1),
                r(14, 3),
                r(-4, 1),
                r(1, 1),
            ],
            _ => {
                return Err(RqmcError::Unsupported(format!(
                    "closed-form Bernoulli polynomial of degree {two_alpha}; supported: 2, 4, 6, 8"
                )))
            }
        };
        Ok(Self { degree: two_alpha, coefficients })
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + (*c.numer() as f64) / (*c.denom() as f64))
    }

    /// Exact value at a rational point.
    pub fn eval_exact(&self, x: Rational64) -> Rational64 {
        self.coefficients
            .iter()
            .rev()
            .fold(Rational64::from_integer(0), |acc, c| acc * x + c)
    }
}

/// `B_{2alpha}(x)` for `2alpha` in {2, 4, 6, 8} and `x` in `[0, 1]`.
pub fn bernoulli_value(two_alpha: u32, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(RqmcError::Domain(format!("Bernoulli argument {x} outside [0,1]")));
    }
    Ok(BernoulliPoly::new(two_alpha)?.eval(x))
}

/// Integer smoothness in {1, 2, 3, 4} if `alpha` is exactly one of them.
pub(crate) fn closed_form_alpha(alpha: f64) -> Option<u32> {
    [1u32, 2, 3, 4].into_iter().find(|&a| alpha == a as f64)
}

/// Largest truncation length accepted by the series path.
const MAX_SERIES_TERMS: u64 = 100_000_000;
const SERIES_TAIL: f64 = 1e-10;

/// `omega_alpha(t) = 2 sum_{k>=1} cos(2 pi k t) / k^(2 alpha)`.
///
/// Integer `alpha <= 4` uses the Bernoulli closed form
/// `(-1)^(alpha+1) (2 pi)^(2 alpha) / (2 alpha)! * B_{2 alpha}(t)`; other
/// values use the truncated cosine series with tail at most `1e-10`.
pub fn korobov_kernel_weight(alpha: f64, t: f64) -> Result<f64> {
    if !(alpha > 0.5) {
        return Err(RqmcError::Domain(format!("alpha = {alpha} must exceed 1/2")));
    }
    if !(0.0..1.0).contains(&t) {
        return Err(RqmcError::Domain(format!("kernel argument {t} outside [0,1)")));
    }
    if let Some(a) = closed_form_alpha(alpha) {
        return Ok(bernoulli_scale(a) * BernoulliPoly::new(2 * a)?.eval(t));
    }
    if t == 0.0 {
        return Ok(2.0 * riemann_zeta(2.0 * alpha)?);
    }
    let terms = series_terms(alpha, t)?;
    let mut acc = crate::sum::CompensatedSum::new();
    for k in (1..=terms).rev() {
        let kf = k as f64;
        acc.add((2.0 * PI * ((k as f64 * t) % 1.0)).cos() / kf.powf(2.0 * alpha));
    }
    Ok(2.0 * acc.value())
}

/// `(-1)^(alpha+1) (2 pi)^(2 alpha) / (2 alpha)!`
pub(crate) fn bernoulli_scale(alpha: u32) -> f64 {
    let sign = if alpha % 2 == 1 { 1.0 } else { -1.0 };
    let fact: f64 = (1..=2 * alpha).map(|i| i as f64).product();
    sign * (2.0 * PI).powi(2 * alpha as i32) / fact
}

// Smallest K whose tail bound on 2 sum_{k>K} is below SERIES_TAIL. Two bounds
// are available: the integral test 2 K^{1-2a} / (2a-1), and summation by parts
// 2 (K+1)^{-2a} / |sin(pi t)|.
fn series_terms(alpha: f64, t: f64) -> Result<u64> {
    let e = 2.0 * alpha;
    let by_integral = (2.0 / ((e - 1.0) * SERIES_TAIL)).powf(1.0 / (e - 1.0));
    let s = (PI * t).sin().abs();
    let by_parts = (2.0 / (s * SERIES_TAIL)).powf(1.0 / e);
    let k = by_integral.min(by_parts).ceil();
    if k > MAX_SERIES_TERMS as f64 {
        return Err(RqmcError::Unsupported(format!(
            "alpha = {alpha} is too close to 1/2 for the truncated kernel series at t = {t}"
        )));
    }
    Ok((k as u64).max(1))
}
