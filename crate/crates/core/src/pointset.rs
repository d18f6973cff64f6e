//! Quadrature nodes: rank-1 lattice points, random shift, tent transform,
//! polynomial lattice points at finite and infinite precision, and random
//! digital shift.

use std::io::Write;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::cbc::RandomSource;
use crate::error::{Result, RqmcError};
use crate::gfpoly::{expansion_period, DigitStepper, GFPoly};
use crate::korobov::LatticeRule;
use crate::sum::CompensatedSum;
use crate::walsh::{linear_residues, PolyLatticeRule};

/// How a point set was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Plain,
    Shifted,
    Tented,
    ShiftedTented,
    DigitalShifted,
}

/// Exact leading base-`b` digits of every coordinate, `count` per coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitTable {
    pub base: u32,
    pub count: usize,
    /// All digits past `count` are zero.
    pub terminating: bool,
    digits: Vec<u8>,
}

/// `n_points` points in dimension `dim`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
    provenance: Provenance,
    digits: Option<DigitTable>,
}

impl PointSet {
    /// Points from a flat row-major coordinate buffer.
    pub fn from_coords(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || coords.len() % dim != 0 {
            return Err(RqmcError::Domain(format!(
                "{} coordinates do not split into {dim}-vectors",
                coords.len()
            )));
        }
        Ok(Self { dim, coords, provenance: Provenance::Plain, digits: None })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn digit_table(&self) -> Option<&DigitTable> {
        self.digits.as_ref()
    }

    /// Leading digits of coordinate `j` of point `i`, when carried.
    pub fn digits(&self, i: usize, j: usize) -> Option<&[u8]> {
        self.digits.as_ref().map(|t| {
            let at = (i * self.dim + j) * t.count;
            &t.digits[at..at + t.count]
        })
    }
}

/// `x_n = ({n z_1 / N}, ..., {n z_s / N})` for `n = 0..N`, each coordinate
/// formed as `(n z_j mod N) / N` in integer arithmetic.
pub fn lattice_points(rule: &LatticeRule) -> Result<PointSet> {
    rule.validate()?;
    let n = rule.n;
    let mut coords = Vec::with_capacity(n as usize * rule.dim());
    for i in 0..n {
        for &zj in &rule.z {
            coords.push(((i as u128 * zj as u128) % n as u128) as f64 / n as f64);
        }
    }
    Ok(PointSet { dim: rule.dim(), coords, provenance: Provenance::Plain, digits: None })
}

/// `{x + delta}` componentwise, with the same `delta` for every point.
pub fn shift_by(ps: &PointSet, delta: &[f64]) -> Result<PointSet> {
    if delta.len() != ps.dim {
        return Err(RqmcError::DimensionMismatch { expected: ps.dim, got: delta.len() });
    }
    if let Some(bad) = delta.iter().find(|d| !(0.0..1.0).contains(*d)) {
        return Err(RqmcError::Domain(format!("shift component {bad} outside [0,1)")));
    }
    let coords = ps
        .coords
        .chunks_exact(ps.dim)
        .flat_map(|x| {
            x.iter().zip(delta).map(|(&xj, &dj)| {
                let y = xj + dj;
                let y = y - y.floor();
                if y >= 1.0 { 0.0 } else { y }
            })
        })
        .collect();
    Ok(PointSet { dim: ps.dim, coords, provenance: Provenance::Shifted, digits: None })
}

/// One uniform shift drawn from `rng` and applied to every point.
pub fn random_shift(ps: &PointSet, rng: &mut RandomSource) -> PointSet {
    let delta: Vec<f64> = (0..ps.dim).map(|_| rng.uniform()).collect();
    shift_by(ps, &delta).expect("shift drawn in [0,1)^s")
}

/// Tent map `1 - |2x - 1|`.
#[inline]
pub fn tent_map(x: f64) -> f64 {
    1.0 - (2.0 * x - 1.0).abs()
}

/// Componentwise tent map; output coordinates lie in `[0, 1]`.
pub fn tent(ps: &PointSet) -> PointSet {
    let provenance = match ps.provenance {
        Provenance::Shifted => Provenance::ShiftedTented,
        _ => Provenance::Tented,
    };
    PointSet {
        dim: ps.dim,
        coords: ps.coords.iter().map(|&x| tent_map(x)).collect(),
        provenance,
        digits: None,
    }
}

/// Digit precision `d` of a polynomial lattice point set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    Finite(usize),
    Infinite,
}

/// Default digital shift depth: 53 digits in base 2, `ceil(53 / log2 b)` otherwise.
pub fn default_shift_digits(b: u32) -> usize {
    if b == 2 {
        53
    } else {
        (53.0 / (b as f64).log2()).ceil() as usize
    }
}

/// Digits carried per coordinate beyond the leading zeros of `b^-m`:
/// enough that the dropped tail sits far below double resolution.
fn carried_digits(b: u32, m: usize) -> usize {
    m + (64.0 / (b as f64).log2()).ceil() as usize
}

/// First `count` digits of `v / p` for `v` packed as a base-`b` index.
fn residue_digits(v: u64, p: &GFPoly, count: usize) -> Vec<u8> {
    let b = p.base();
    let m = p.degree().expect("modulus has degree >= 1");
    if b == 2 && m < 64 {
        let pbits = p.index();
        let mut state = v;
        return (0..count)
            .map(|_| {
                let u = (state >> (m - 1)) & 1;
                state <<= 1;
                if u == 1 {
                    state ^= pbits;
                }
                u as u8
            })
            .collect();
    }
    let mut stepper = DigitStepper::new(&GFPoly::from_index(b, v), p);
    (0..count).map(|_| stepper.next_digit() as u8).collect()
}

/// Largest double below 1.
const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

/// Nearest double to `T = 0.d_1 d_2 ... d_L` in base `b`. For a
/// non-terminating stream the true value lies in `[T, T + b^-L)`, and the
/// result is `None` when the two ends of that bracket round differently.
fn digits_value(digits: &[u8], b: u32, terminating: bool) -> Option<f64> {
    let len = digits.len();
    let (lo, hi) = if b == 2 && len <= 127 {
        let int = digits.iter().fold(0u128, |acc, &d| (acc << 1) | d as u128);
        let scale = 2f64.powi(-(len as i32));
        ((int as f64) * scale, ((int + 1) as f64) * scale)
    } else {
        let bb = BigUint::from(b);
        let mut num = BigUint::zero();
        for &d in digits {
            num = num * &bb + BigUint::from(d);
        }
        let den = BigInt::from(bb.pow(len as u32));
        let lo = BigRational::new(BigInt::from(num.clone()), den.clone()).to_f64()?;
        let hi = BigRational::new(BigInt::from(num + 1u32), den).to_f64()?;
        (lo, hi)
    };
    if terminating || lo == hi {
        Some(lo.min(BELOW_ONE))
    } else {
        None
    }
}

/// Truncated value `T` by Horner from the least significant digit.
fn digits_horner(digits: &[u8], b: u32) -> f64 {
    let bf = b as f64;
    digits.iter().rev().fold(0.0, |acc, &d| (acc + d as f64) / bf).min(BELOW_ONE)
}

/// One coordinate of an infinite-precision polynomial lattice point:
/// `phi_inf(v / p)` for a residue `v = n q_j mod p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyPointExact {
    pub residue: GFPoly,
    pub modulus: GFPoly,
    /// Least period `k` of the digit stream; the pre-period is 0.
    pub period: u64,
    /// Position of the first nonzero digit, `m - deg(v)`; `None` for `v = 0`.
    pub first_nonzero: Option<usize>,
}

/// Refuse exact expansions longer than this many digits.
const EXACT_PERIOD_LIMIT: u64 = 1 << 22;

impl PolyPointExact {
    pub fn new(residue: GFPoly, modulus: GFPoly) -> Result<Self> {
        let m = modulus.degree().ok_or_else(|| RqmcError::Domain("zero modulus".into()))?;
        let rule = PolyLatticeRule::new(modulus.clone(), vec![GFPoly::one(modulus.base())])?;
        rule.require_infinite_precision()?;
        let residue = residue.rem(&modulus)?;
        let period = expansion_period(&GFPoly::one(modulus.base()), &modulus)?;
        let first_nonzero = residue.degree().map(|d| m - d);
        Ok(Self { residue, modulus, period, first_nonzero })
    }

    /// Digits `u_1, ..., u_count`.
    pub fn digits(&self, count: usize) -> Vec<u8> {
        residue_digits(self.residue.index(), &self.modulus, count)
    }

    /// `(first-k-digit integer) / (b^k - 1)`, reduced.
    pub fn exact(&self) -> Result<BigRational> {
        if self.residue.is_zero() {
            return Ok(BigRational::zero());
        }
        if self.period > EXACT_PERIOD_LIMIT {
            return Err(RqmcError::CostGuard(format!("period {} too long for an exact value", self.period)));
        }
        let b = BigUint::from(self.modulus.base());
        let mut num = BigUint::zero();
        for d in self.digits(self.period as usize) {
            num = num * &b + BigUint::from(d);
        }
        let den = b.pow(self.period as u32) - BigUint::one();
        Ok(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Nearest double.
    pub fn to_f64(&self) -> Result<f64> {
        let b = self.modulus.base();
        let m = self.modulus.degree().unwrap_or(0);
        if let Some(v) = digits_value(&self.digits(carried_digits(b, m)), b, false) {
            return Ok(v);
        }
        self.exact()?.to_f64().ok_or_else(|| RqmcError::Domain("value not representable".into()))
    }
}

/// Exact coordinate `j` (0-based) of the infinite-precision point with index `n`.
pub fn poly_point_exact(rule: &PolyLatticeRule, n: u64, j: usize) -> Result<PolyPointExact> {
    rule.validate()?;
    let qj = rule.q.get(j).ok_or(RqmcError::DimensionMismatch { expected: rule.dim(), got: j + 1 })?;
    let v = GFPoly::from_index(rule.base, n).mul(qj)?.rem(&rule.p)?;
    PolyPointExact::new(v, rule.p.clone())
}

/// Rank-1 polynomial lattice points `x_n = (phi_d(n q_j / p))_j`, with the
/// point index `n` read as the polynomial of its base-`b` digits.
///
/// Finite `d` keeps the first `d` Laurent digits. Infinite precision needs an
/// irreducible `p != x`, whose expansions are purely periodic; each value is
/// then the nearest double to `(first-k-digit integer) / (b^k - 1)`.
pub fn poly_lattice_points(rule: &PolyLatticeRule, precision: Precision) -> Result<PointSet> {
    rule.validate()?;
    let b = rule.base;
    if b > u8::MAX as u32 {
        return Err(RqmcError::Unsupported(format!("digit tables need b <= 255, got {b}")));
    }
    let count = match precision {
        Precision::Finite(0) => return Err(RqmcError::Domain("precision d must be positive".into())),
        Precision::Finite(d) => d,
        Precision::Infinite => {
            rule.require_infinite_precision()?;
            carried_digits(b, rule.m)
        }
    };
    let size = rule.n_points();
    let s = rule.dim();
    let residues = rule
        .q
        .iter()
        .map(|qj| linear_residues(qj, &rule.p, size))
        .collect::<Result<Vec<_>>>()?;
    let mut coords = Vec::with_capacity(size as usize * s);
    let mut digits = Vec::with_capacity(size as usize * s * count);
    for n in 0..size as usize {
        for res in &residues {
            let d = residue_digits(res[n], &rule.p, count);
            let value = match precision {
                Precision::Finite(_) => digits_value(&d, b, true).expect("terminating"),
                Precision::Infinite => match digits_value(&d, b, false) {
                    Some(v) => v,
                    None => PolyPointExact::new(GFPoly::from_index(b, res[n]), rule.p.clone())?.to_f64()?,
                },
            };
            coords.push(value);
            digits.extend_from_slice(&d);
        }
    }
    Ok(PointSet {
        dim: s,
        coords,
        provenance: Provenance::Plain,
        digits: Some(DigitTable { base: b, count, terminating: matches!(precision, Precision::Finite(_)), digits }),
    })
}

/// Digitwise addition mod `b` of `sigma[j]` to the leading digits of
/// coordinate `j` of every point; digits past `sigma[j].len()` are untouched.
pub fn digital_shift_by(ps: &PointSet, sigma: &[Vec<u8>]) -> Result<PointSet> {
    let table = ps
        .digits
        .as_ref()
        .ok_or_else(|| RqmcError::Domain("digital shift needs a point set with exact digits".into()))?;
    if sigma.len() != ps.dim {
        return Err(RqmcError::DimensionMismatch { expected: ps.dim, got: sigma.len() });
    }
    let b = table.base;
    for sj in sigma {
        if sj.len() > table.count {
            return Err(RqmcError::Domain(format!(
                "shift of {} digits exceeds the {} digits carried",
                sj.len(),
                table.count
            )));
        }
        if sj.iter().any(|&d| d as u32 >= b) {
            return Err(RqmcError::BaseMismatch(b, *sj.iter().max().unwrap() as u32 + 1));
        }
    }
    let mut digits = table.digits.clone();
    let mut coords = Vec::with_capacity(ps.coords.len());
    for (c, chunk) in digits.chunks_exact_mut(table.count).enumerate() {
        let j = c % ps.dim;
        for (d, &sd) in chunk.iter_mut().zip(&sigma[j]) {
            *d = ((*d as u32 + sd as u32) % b) as u8;
        }
        coords.push(digits_value(chunk, b, table.terminating).unwrap_or_else(|| digits_horner(chunk, b)));
    }
    Ok(PointSet {
        dim: ps.dim,
        coords,
        provenance: Provenance::DigitalShifted,
        digits: Some(DigitTable { base: b, count: table.count, terminating: table.terminating, digits }),
    })
}

/// Random digital shift of depth `d_shift`: `s * d_shift` uniform digits
/// drawn coordinate by coordinate, most significant first.
pub fn digital_shift(ps: &PointSet, rng: &mut RandomSource, d_shift: usize) -> Result<PointSet> {
    let table = ps
        .digits
        .as_ref()
        .ok_or_else(|| RqmcError::Domain("digital shift needs a point set with exact digits".into()))?;
    let b = table.base;
    let m = {
        let mut m = 0;
        let mut size = 1usize;
        while size < ps.len() {
            size *= b as usize;
            m += 1;
        }
        m
    };
    if d_shift < m {
        return Err(RqmcError::Domain(format!("d_shift = {d_shift} must be at least m = {m}")));
    }
    let sigma: Vec<Vec<u8>> = (0..ps.dim)
        .map(|_| (0..d_shift).map(|_| rng.pick_uniform(b as u64).expect("b >= 2") as u8).collect())
        .collect();
    digital_shift_by(ps, &sigma)
}

/// `(1/N) sum_x f(x)` with compensated summation.
pub fn integrate<F: Fn(&[f64]) -> f64>(f: F, ps: &PointSet) -> f64 {
    ps.iter().map(&f).collect::<CompensatedSum>().value() / ps.len() as f64
}

/// One point per line, coordinates with 17 significant digits.
pub fn write_points<W: Write>(ps: &PointSet, mut out: W) -> Result<()> {
    for x in ps.iter() {
        let line: Vec<String> = x.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

/// One point per line, each coordinate as its carried digit string `0.d1d2...`.
pub fn write_digits<W: Write>(ps: &PointSet, mut out: W) -> Result<()> {
    if ps.digits.is_none() {
        return Err(RqmcError::Domain("point set carries no digits".into()));
    }
    for i in 0..ps.len() {
        let line: Vec<String> = (0..ps.dim)
            .map(|j| {
                let d = ps.digits(i, j).expect("checked above");
                let body: String = d.iter().map(|&x| char::from_digit(x as u32, 36).unwrap_or('?')).collect();
                format!("0.{body}")
            })
            .collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}
