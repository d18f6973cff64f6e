//! Polynomials over the prime field `F_b`.
//!
//! Coefficients are stored densely in ascending order (`coeffs[i]` multiplies
//! `x^i`) with no trailing zeros, so the zero polynomial has no coefficients.
//! A polynomial of degree below `m` also has an integer *index*
//! `sum_i coeffs[i] * b^i`; that bijection is what the lattice constructions
//! enumerate over and is the canonical tie-break order.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Result, RqmcError};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GFPoly {
    base: u32,
    coeffs: Vec<u32>,
}

pub(crate) fn is_prime_u32(b: u32) -> bool {
    b >= 2 && (2..).take_while(|d: &u32| d * d <= b).all(|d| b % d != 0)
}

fn check_base(base: u32) -> Result<()> {
    if is_prime_u32(base) {
        Ok(())
    } else {
        Err(RqmcError::Domain(format!("base {base} is not prime")))
    }
}

impl GFPoly {
    /// Builds a polynomial, reducing coefficients mod `base` and stripping trailing zeros.
    pub fn new(base: u32, coeffs: Vec<u32>) -> Result<Self> {
        check_base(base)?;
        Ok(Self::from_raw(base, coeffs))
    }

    fn from_raw(base: u32, mut coeffs: Vec<u32>) -> Self {
        for c in coeffs.iter_mut() {
            *c %= base;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { base, coeffs }
    }

    pub fn zero(base: u32) -> Self {
        Self { base, coeffs: Vec::new() }
    }

    pub fn one(base: u32) -> Self {
        Self { base, coeffs: vec![1] }
    }

    /// The monomial `x`.
    pub fn x(base: u32) -> Self {
        Self { base, coeffs: vec![0, 1] }
    }

    pub fn monomial(base: u32, degree: usize) -> Self {
        let mut coeffs = vec![0; degree + 1];
        coeffs[degree] = 1;
        Self { base, coeffs }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u32 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// `None` stands for the degree of the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    pub fn leading(&self) -> u32 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    /// Inverse of [`GFPoly::index`].
    pub fn from_index(base: u32, mut index: u64) -> Self {
        let mut coeffs = Vec::new();
        while index > 0 {
            coeffs.push((index % base as u64) as u32);
            index /= base as u64;
        }
        Self { base, coeffs }
    }

    /// `sum_i coeffs[i] * b^i`.
    pub fn index(&self) -> u64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.base as u64 + c as u64)
    }

    /// Parses the ascending coefficient list format, e.g. `"1,1,0,1"` = `1 + x + x^3`.
    pub fn parse(base: u32, text: &str) -> Result<Self> {
        check_base(base)?;
        let text = text.trim();
        if text.is_empty() {
            return Ok(Self::zero(base));
        }
        let coeffs = text
            .split(',')
            .map(|t| {
                let c: u32 = t
                    .trim()
                    .parse()
                    .map_err(|_| RqmcError::Parse(format!("bad coefficient {t:?} in {text:?}")))?;
                if c >= base {
                    return Err(RqmcError::Parse(format!("coefficient {c} not in F_{base}")));
                }
                Ok(c)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_raw(base, coeffs))
    }

    /// Ascending coefficient list, `"0"` for the zero polynomial.
    pub fn to_coeff_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
    }

    fn same_base(&self, other: &Self) -> Result<()> {
        if self.base == other.base {
            Ok(())
        } else {
            Err(RqmcError::BaseMismatch(self.base, other.base))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_base(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| (self.coeff(i) + other.coeff(i)) % self.base).collect();
        Ok(Self::from_raw(self.base, coeffs))
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|&c| (self.base - c) % self.base).collect();
        Self::from_raw(self.base, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: u32) -> Self {
        let b = self.base as u64;
        let coeffs = self.coeffs.iter().map(|&c| ((c as u64 * k as u64) % b) as u32).collect();
        Self::from_raw(self.base, coeffs)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_base(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.base));
        }
        let b = self.base as u64;
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &c) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a as u64 * c as u64) % b;
            }
        }
        Ok(Self::from_raw(self.base, out.into_iter().map(|c| c as u32).collect()))
    }

    /// Quotient and remainder of division by a nonzero polynomial.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        self.same_base(divisor)?;
        let dd = divisor
            .degree()
            .ok_or_else(|| RqmcError::Domain("division by the zero polynomial".into()))?;
        let b = self.base as u64;
        let inv_lead = inv_mod(divisor.leading(), self.base) as u64;
        let mut rem: Vec<u64> = self.coeffs.iter().map(|&c| c as u64).collect();
        if rem.len() <= dd {
            return Ok((Self::zero(self.base), self.clone()));
        }
        let mut quot = vec![0u64; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = rem[i] % b;
            if c == 0 {
                continue;
            }
            let f = c * inv_lead % b;
            quot[i - dd] = f;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                let idx = i - dd + j;
                rem[idx] = (rem[idx] + b * b - f * d as u64 % b) % b;
            }
        }
        rem.truncate(dd);
        Ok((
            Self::from_raw(self.base, quot.into_iter().map(|c| c as u32).collect()),
            Self::from_raw(self.base, rem.into_iter().map(|c| c as u32).collect()),
        ))
    }

    pub fn rem(&self, modulus: &Self) -> Result<Self> {
        Ok(self.div_rem(modulus)?.1)
    }

    pub fn make_monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(inv_mod(self.leading(), self.base))
    }

    pub fn gcd(&self, other: &Self) -> Result<Self> {
        self.same_base(other)?;
        let (mut a, mut c) = (self.clone(), other.clone());
        while !c.is_zero() {
            let r = a.rem(&c)?;
            a = c;
            c = r;
        }
        Ok(a.make_monic())
    }

    /// `self^e mod modulus` by square-and-multiply.
    pub fn pow_mod(&self, mut e: u64, modulus: &Self) -> Result<Self> {
        let mut result = Self::one(self.base).rem(modulus)?;
        let mut sq = self.rem(modulus)?;
        while e > 0 {
            if e & 1 == 1 {
                result = poly_mod_mul(&result, &sq, modulus)?;
            }
            sq = poly_mod_mul(&sq, &sq, modulus)?;
            e >>= 1;
        }
        Ok(result)
    }
}

impl fmt::Debug for GFPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GFPoly<{}>[{}]", self.base, self.to_coeff_string())
    }
}

impl fmt::Display for GFPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "x")?,
                (1, c) => write!(f, "{c}x")?,
                (i, 1) => write!(f, "x^{i}")?,
                (i, c) => write!(f, "{c}x^{i}")?,
            }
        }
        Ok(())
    }
}

pub(crate) fn inv_mod(a: u32, b: u32) -> u32 {
    // b prime: a^(b-2)
    let (mut r, mut base, mut e) = (1u64, a as u64 % b as u64, b as u64 - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % b as u64;
        }
        base = base * base % b as u64;
        e >>= 1;
    }
    r as u32
}

/// `a * c mod p`.
pub fn poly_mod_mul(a: &GFPoly, c: &GFPoly, p: &GFPoly) -> Result<GFPoly> {
    a.same_base(p)?;
    a.mul(c)?.rem(p)
}

/// Largest degree tested by exhaustive trial division.
const EXHAUSTIVE_IRREDUCIBILITY_DEGREE: usize = 8;

/// Irreducibility over `F_b`: trial division by every monic polynomial of
/// degree up to half for small degrees, the Ben-Or test otherwise.
pub fn is_irreducible(p: &GFPoly) -> bool {
    match p.degree() {
        None | Some(0) => false,
        Some(1) => true,
        Some(d) if d <= EXHAUSTIVE_IRREDUCIBILITY_DEGREE => is_irreducible_trial(p),
        Some(_) => is_irreducible_ben_or(p),
    }
}

pub(crate) fn is_irreducible_trial(p: &GFPoly) -> bool {
    let Some(d) = p.degree() else { return false };
    if d == 0 {
        return false;
    }
    let b = p.base as u64;
    for deg in 1..=d / 2 {
        let start = b.pow(deg as u32);
        for idx in start..2 * start {
            let f = GFPoly::from_index(p.base, idx);
            if p.rem(&f).map(|r| r.is_zero()).unwrap_or(false) {
                return false;
            }
        }
    }
    true
}

/// `gcd(x^(b^i) - x, p) = 1` for `i = 1..=deg/2`.
pub(crate) fn is_irreducible_ben_or(p: &GFPoly) -> bool {
    let Some(d) = p.degree() else { return false };
    if d == 0 {
        return false;
    }
    let x = GFPoly::x(p.base);
    let mut power = x.clone();
    for _ in 1..=d / 2 {
        power = match power.pow_mod(p.base as u64, p) {
            Ok(v) => v,
            Err(_) => return false,
        };
        let g = power.sub(&x).and_then(|h| h.gcd(p));
        match g {
            Ok(g) if g.degree() == Some(0) => {}
            _ => return false,
        }
    }
    true
}

/// Every monic irreducible polynomial of degree `m`, in ascending index order.
pub fn enumerate_monic_irreducibles(b: u32, m: usize) -> Result<Vec<GFPoly>> {
    check_base(b)?;
    if m == 0 {
        return Err(RqmcError::Domain("degree m must be at least 1".into()));
    }
    let lead = (b as u64)
        .checked_pow(m as u32)
        .ok_or_else(|| RqmcError::CostGuard(format!("b^m overflows for b = {b}, m = {m}")))?;
    Ok((lead..2 * lead)
        .map(|idx| GFPoly::from_index(b, idx))
        .filter(is_irreducible)
        .collect())
}

fn check_proper_fraction(v: &GFPoly, p: &GFPoly) -> Result<usize> {
    v.same_base(p)?;
    let m = p
        .degree()
        .ok_or_else(|| RqmcError::Domain("denominator is the zero polynomial".into()))?;
    if let Some(dv) = v.degree() {
        if dv >= m {
            return Err(RqmcError::Domain(format!(
                "numerator degree {dv} must be below denominator degree {m}"
            )));
        }
    }
    Ok(m)
}

/// One step of long division: with remainder `r` (deg < m), `x r = u p + r'`.
/// Works on dense coefficient buffers of length `m`.
pub(crate) struct DigitStepper {
    base: u64,
    p: Vec<u64>,
    inv_lead: u64,
    state: Vec<u64>,
}

impl DigitStepper {
    pub(crate) fn new(v: &GFPoly, p: &GFPoly) -> Self {
        let m = p.degree().expect("nonzero modulus");
        let mut state = vec![0u64; m];
        for (i, &c) in v.coeffs.iter().enumerate() {
            state[i] = c as u64;
        }
        Self {
            base: p.base as u64,
            p: p.coeffs.iter().map(|&c| c as u64).collect(),
            inv_lead: inv_mod(p.leading(), p.base) as u64,
            state,
        }
    }

    pub(crate) fn state(&self) -> &[u64] {
        &self.state
    }

    /// Produces the next fractional Laurent digit.
    pub(crate) fn next_digit(&mut self) -> u32 {
        let b = self.base;
        let m = self.state.len();
        let top = self.state[m - 1];
        let u = top * self.inv_lead % b;
        // shift: x * r has coefficients state[i-1] at i, top at m
        for i in (1..m).rev() {
            self.state[i] = self.state[i - 1];
        }
        self.state[0] = 0;
        if u != 0 {
            for i in 0..m {
                self.state[i] = (self.state[i] + b * b - u * self.p[i] % b) % b;
            }
        }
        u as u32
    }
}

/// The first `count` fractional Laurent digits `u_1, ..., u_count` of `v / p`.
pub fn laurent_expand(v: &GFPoly, p: &GFPoly, count: usize) -> Result<Vec<u32>> {
    check_proper_fraction(v, p)?;
    let mut stepper = DigitStepper::new(v, p);
    Ok((0..count).map(|_| stepper.next_digit()).collect())
}

/// Eventually periodic digit stream of `v / p`: `digits` holds the
/// pre-period followed by exactly one period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentExpansion {
    pub base: u32,
    pub preperiod: usize,
    pub period: usize,
    pub digits: Vec<u32>,
}

impl LaurentExpansion {
    /// Digit `u_i` for `i >= 1`.
    pub fn digit(&self, i: usize) -> u32 {
        assert!(i >= 1, "digits are indexed from 1");
        let i = i - 1;
        if i < self.preperiod {
            self.digits[i]
        } else {
            self.digits[self.preperiod + (i - self.preperiod) % self.period]
        }
    }

    /// Index of the first nonzero digit, `None` for an all-zero stream.
    pub fn first_nonzero(&self) -> Option<usize> {
        self.digits.iter().position(|&d| d != 0).map(|i| i + 1)
    }
}

/// Full eventually-periodic expansion of `v / p` by cycle detection on the
/// long-division remainders. Cost is at most `b^deg(p)` steps.
pub fn expand_rational(v: &GFPoly, p: &GFPoly) -> Result<LaurentExpansion> {
    let m = check_proper_fraction(v, p)?;
    let limit = (p.base as u64).checked_pow(m as u32).filter(|&l| l <= 1 << 26).ok_or_else(|| {
        RqmcError::CostGuard(format!("expansion of a degree-{m} denominator over F_{}", p.base))
    })?;
    let mut stepper = DigitStepper::new(v, p);
    let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut digits = Vec::new();
    for step in 0..=limit as usize {
        if let Some(&first) = seen.get(stepper.state()) {
            return Ok(LaurentExpansion {
                base: p.base,
                preperiod: first,
                period: step - first,
                digits,
            });
        }
        seen.insert(stepper.state().to_vec(), step);
        digits.push(stepper.next_digit());
    }
    unreachable!("remainder states are bounded by b^m")
}

fn factor_u64(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Least period of the digit stream of `v / p` for irreducible `p != x`,
/// i.e. the multiplicative order of `x` modulo `p`.
pub fn expansion_period(v: &GFPoly, p: &GFPoly) -> Result<u64> {
    let m = check_proper_fraction(v, p)?;
    if v.is_zero() {
        return Err(RqmcError::Domain("numerator must be nonzero".into()));
    }
    if !is_irreducible(p) {
        return Err(RqmcError::Domain(format!("modulus {p} is reducible")));
    }
    let x = GFPoly::x(p.base);
    if p.make_monic() == x {
        return Err(RqmcError::Domain("modulus must differ from x".into()));
    }
    let group = (p.base as u64)
        .checked_pow(m as u32)
        .and_then(|q| q.checked_sub(1))
        .ok_or_else(|| RqmcError::CostGuard("b^m - 1 overflows".into()))?;
    let one = GFPoly::one(p.base);
    let mut order = group;
    for q in factor_u64(group) {
        while order % q == 0 && x.pow_mod(order / q, p)? == one {
            order /= q;
        }
    }
    Ok(order)
}

// ---------------------------------------------------------------------------
// Index arithmetic: polynomials of degree < m packed as base-b integers.

/// Digitwise addition mod `b` of two packed polynomials.
#[inline]
pub(crate) fn index_add(a: u64, c: u64, base: u32) -> u64 {
    if base == 2 {
        return a ^ c;
    }
    let b = base as u64;
    let (mut a, mut c) = (a, c);
    let (mut out, mut place) = (0u64, 1u64);
    while a > 0 || c > 0 {
        out += ((a % b + c % b) % b) * place;
        a /= b;
        c /= b;
        place *= b;
    }
    out
}

/// Packed `k * a` for a scalar `k` in `F_b`.
#[inline]
pub(crate) fn index_scale(a: u64, k: u32, base: u32) -> u64 {
    if base == 2 {
        return if k % 2 == 1 { a } else { 0 };
    }
    let b = base as u64;
    let mut a = a;
    let (mut out, mut place) = (0u64, 1u64);
    while a > 0 {
        out += ((a % b) * k as u64 % b) * place;
        a /= b;
        place *= b;
    }
    out
}

/// For `p` of degree `m` and `q` of degree `< m`, the packed residues of
/// `n(x) q(x) mod p(x)` for every `n` in `0..b^m`, built by linearity from
/// the basis `x^i q(x) mod p(x)`.
pub fn multiples_table(q: &GFPoly, p: &GFPoly) -> Result<Vec<u64>> {
    let m = check_proper_fraction(q, p)?;
    let b = p.base as u64;
    let size = b
        .checked_pow(m as u32)
        .filter(|&s| s <= 1 << 28)
        .ok_or_else(|| RqmcError::CostGuard(format!("b^m too large for m = {m}")))?;
    let mut basis = Vec::with_capacity(m);
    let mut cur = q.clone();
    let x = GFPoly::x(p.base);
    for _ in 0..m {
        basis.push(cur.index());
        cur = poly_mod_mul(&cur, &x, p)?;
    }
    let mut table = vec![0u64; size as usize];
    let mut place = 1u64;
    for &bi in &basis {
        // fill n in [place, b*place): n = k*place + rest
        for k in 1..b {
            let term = index_scale(bi, k as u32, p.base);
            for rest in 0..place {
                let n = k * place + rest;
                table[n as usize] = index_add(table[rest as usize], term, p.base);
            }
        }
        place *= b;
    }
    Ok(table)
}

/// Number of base-`b` digits of `k`, zero for `k = 0`.
#[inline]
pub fn digit_count(mut k: u64, base: u32) -> u32 {
    let mut a = 0;
    while k > 0 {
        k /= base as u64;
        a += 1;
    }
    a
}
