//! Randomized component-by-component constructions for rank-1 lattice rules
//! and rank-1 polynomial lattice rules, plus the seedable random source.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, RqmcError};
use crate::gfpoly::{enumerate_monic_irreducibles, GFPoly};
use crate::korobov::{KernelTable, LatticeRule, SpaceParams};
use crate::numtheory::primes_in_half_open_range;
use crate::sum::{BlockedSum, CompensatedSum, BLOCK};
use crate::walsh::{linear_residues, mu_table, sigma_by_mu, PolyLatticeRule};

/// Seedable ChaCha8 stream. Independent substreams of one seed are selected
/// with [`RandomSource::with_stream`].
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self { seed, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Substream `stream` of `seed`; streams never overlap.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Exactly uniform on `{0, ..., n-1}`: draws above the largest multiple
    /// of `n` are rejected.
    pub fn pick_uniform(&mut self, n: u64) -> Result<u64> {
        if n == 0 {
            return Err(RqmcError::Domain("cannot pick from an empty range".into()));
        }
        let zone = u64::MAX - (u64::MAX % n + 1) % n;
        loop {
            let x = self.rng.next_u64();
            if x <= zone {
                return Ok(x % n);
            }
        }
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Modulus chosen by a construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Modulus {
    Integer(u64),
    Polynomial(String),
}

/// Audit trail of one randomized CBC run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CbcTrace {
    pub modulus: Modulus,
    /// Number of modulus candidates the draw was made from.
    pub modulus_pool: usize,
    /// Candidate-set size per dimension (1 for the fixed first component).
    pub candidate_counts: Vec<u64>,
    /// Chosen component per dimension, as an integer (polynomials by index).
    pub components: Vec<u64>,
    /// Criterion of the rule truncated to the first `l` dimensions.
    pub criteria: Vec<f64>,
    pub final_criterion: f64,
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau < 1.0 {
        Ok(())
    } else {
        Err(RqmcError::Domain(format!("tau = {tau} must lie in (0,1)")))
    }
}

/// `ceil(tau * count)`, treating products within `1e-9` relative of an
/// integer as that integer so decimal inputs like `0.7 * 10` give 7.
pub fn candidate_count(tau: f64, count: u64) -> Result<u64> {
    check_tau(tau)?;
    let x = tau * count as f64;
    let r = x.round();
    let c = if (x - r).abs() <= 1e-9 * r.max(1.0) { r } else { x.ceil() };
    Ok((c as u64).clamp(1, count.max(1)))
}

/// Candidates sorted by `(criterion, component)`.
fn rank(scores: &mut [(f64, u64)]) {
    scores.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
}

/// Below this many points candidate scoring stays on the calling thread.
const PARALLEL_THRESHOLD: u64 = 2048;

/// `sum_n theta[n] omega[n z mod N]` over `n = 0..N`, folded onto
/// `n <= N/2` using `theta[n] = theta[N-n]` and `omega[i] = omega[N-i]`.
///
/// Four lanes walk `n = 1, 2, 3, 4 (mod 4)` with independent indices; each
/// block of [`BLOCK`] terms is summed plainly and the block totals are
/// accumulated with compensation.
fn folded_score(theta: &[f64], omega: &[f64], z: u64) -> f64 {
    let n = theta.len() as u64;
    let half = ((n - 1) / 2) as usize;
    let mulmod = |a: u64| ((a as u128 * z as u128) % n as u128) as u64;
    let z4 = mulmod(4);
    let mut id = [mulmod(1), mulmod(2), mulmod(3), mulmod(4)];
    let mut outer = CompensatedSum::new();
    let mut start = 1usize;
    while start <= half {
        let end = (start + BLOCK - 1).min(half);
        let mut lane = [0.0f64; 4];
        let mut i = start;
        while i + 3 <= end {
            for k in 0..4 {
                lane[k] += theta[i + k] * omega[id[k] as usize];
                id[k] += z4;
                if id[k] >= n {
                    id[k] -= n;
                }
            }
            i += 4;
        }
        for (k, lane_k) in lane.iter_mut().enumerate().take(end + 1 - i) {
            *lane_k += theta[i + k] * omega[id[k] as usize];
        }
        outer.add((lane[0] + lane[1]) + (lane[2] + lane[3]));
        start = end + 1;
    }
    let mut total = theta[0] * omega[0] + 2.0 * outer.value();
    if n.is_multiple_of(2) {
        let mid = n / 2;
        total += theta[mid as usize] * omega[mulmod(mid) as usize];
    }
    total
}

/// Randomized CBC for a rank-1 lattice rule.
///
/// Draws `N` uniformly from the primes in `(ceil(M/2), M]`, sets `z_1 = 1`,
/// and for each later coordinate keeps the `ceil(tau (N-1))` best components
/// by `(criterion, z)` and picks one of them uniformly.
pub fn construct_lattice(
    params: &SpaceParams,
    m: u64,
    tau: f64,
    rng: &mut RandomSource,
) -> Result<(LatticeRule, CbcTrace)> {
    check_tau(tau)?;
    let pool = primes_in_half_open_range(m);
    if pool.is_empty() {
        return Err(RqmcError::EmptyPrimeRange(m));
    }
    let n = pool.primes[rng.pick_uniform(pool.len() as u64)? as usize];
    let s = params.dim;
    let keep = candidate_count(tau, n - 1)?;
    let omega = KernelTable::new(params.alpha, n)?.values;
    let gammas = params.gammas();

    // eta[n] = prod_j (1 + gamma_j^2 omega(n z_j / N)) - 1 for the chosen prefix
    let g1 = gammas[0] * gammas[0];
    let mut eta: Vec<f64> = omega.iter().map(|&w| g1 * w).collect();
    let mut eta_sum = eta.iter().copied().collect::<CompensatedSum>().value();

    let mut z = vec![1u64];
    let mut trace = CbcTrace {
        modulus: Modulus::Integer(n),
        modulus_pool: pool.len(),
        candidate_counts: vec![1],
        components: vec![1],
        criteria: vec![eta_sum / n as f64],
        final_criterion: 0.0,
    };

    for &g in &gammas[1..s] {
        let g2 = g * g;
        let theta: Vec<f64> = eta.iter().map(|e| 1.0 + e).collect();
        let half = n / 2;
        let score = |zc: u64| (eta_sum + g2 * folded_score(&theta, &omega, zc)) / n as f64;
        let half_scores: Vec<f64> = if n >= PARALLEL_THRESHOLD {
            (1..=half).into_par_iter().map(score).collect()
        } else {
            (1..=half).map(score).collect()
        };
        // R(N - z) = R(z)
        let mut scores: Vec<(f64, u64)> = (1..n)
            .map(|zc| {
                let k = zc.min(n - zc);
                (half_scores[(k - 1) as usize], zc)
            })
            .collect();
        rank(&mut scores);
        let pick = scores[rng.pick_uniform(keep)? as usize];
        let zl = pick.1;
        for (i, e) in eta.iter_mut().enumerate() {
            let a = g2 * omega[((i as u128 * zl as u128) % n as u128) as usize];
            *e = *e * (1.0 + a) + a;
        }
        eta_sum = eta.iter().copied().collect::<CompensatedSum>().value();
        z.push(zl);
        trace.candidate_counts.push(keep);
        trace.components.push(zl);
        trace.criteria.push(eta_sum / n as f64);
    }
    trace.final_criterion = *trace.criteria.last().expect("s >= 1");
    Ok((LatticeRule::new(n, z)?, trace))
}

/// Monic irreducibles of degree `m` usable as moduli; `x` itself is left
/// out because its points have terminating expansions.
pub fn modulus_pool(b: u32, m: usize) -> Result<Vec<GFPoly>> {
    let x = GFPoly::x(b);
    Ok(enumerate_monic_irreducibles(b, m)?.into_iter().filter(|p| *p != x).collect())
}

/// Randomized CBC for a rank-1 polynomial lattice rule over `F_b` with
/// `b^m` points, scored by the varsigma-kernel criterion.
pub fn construct_poly_lattice(
    params: &SpaceParams,
    b: u32,
    m: usize,
    tau: f64,
    rng: &mut RandomSource,
) -> Result<(PolyLatticeRule, CbcTrace)> {
    check_tau(tau)?;
    if m < 1 {
        return Err(RqmcError::Domain("m must be at least 1".into()));
    }
    let size = (b as u64)
        .checked_pow(m as u32)
        .filter(|&v| v <= 1 << 24)
        .ok_or_else(|| RqmcError::CostGuard(format!("b^m = {b}^{m} points is beyond the supported range")))?;
    let pool = modulus_pool(b, m)?;
    if pool.is_empty() {
        return Err(RqmcError::Domain(format!("no admissible modulus of degree {m} over F_{b}")));
    }
    let p = pool[rng.pick_uniform(pool.len() as u64)? as usize].clone();
    let s = params.dim;
    let keep = candidate_count(tau, size - 1)?;
    let sig = sigma_by_mu(params.alpha, b, m)?;
    let mus = mu_table(b, m);
    let gammas = params.gammas();

    // q_1 = 1: residue of n(x) is n(x) itself
    let g1 = gammas[0] * gammas[0];
    let mut eta: Vec<f64> = mus.iter().map(|&a| g1 * sig[a as usize]).collect();
    let mut eta_sum = eta.iter().copied().collect::<CompensatedSum>().value();

    let mut q = vec![GFPoly::one(b)];
    let mut trace = CbcTrace {
        modulus: Modulus::Polynomial(p.to_coeff_string()),
        modulus_pool: pool.len(),
        candidate_counts: vec![1],
        components: vec![1],
        criteria: vec![eta_sum / size as f64],
        final_criterion: 0.0,
    };

    for &g in &gammas[1..s] {
        let g2 = g * g;
        let theta: Vec<f64> = eta.iter().map(|e| 1.0 + e).collect();
        let score = |qi: u64| -> Result<f64> {
            let res = linear_residues(&GFPoly::from_index(b, qi), &p, size)?;
            let mut acc = BlockedSum::default();
            for (t, &r) in theta.iter().zip(&res) {
                acc.add(t * sig[mus[r as usize] as usize]);
            }
            Ok((eta_sum + g2 * acc.value()) / size as f64)
        };
        let raw: Vec<Result<f64>> = if size >= PARALLEL_THRESHOLD {
            (1..size).into_par_iter().map(score).collect()
        } else {
            (1..size).map(score).collect()
        };
        let mut scores = raw
            .into_iter()
            .zip(1..size)
            .map(|(r, qi)| r.map(|v| (v, qi)))
            .collect::<Result<Vec<_>>>()?;
        rank(&mut scores);
        let qi = scores[rng.pick_uniform(keep)? as usize].1;
        let ql = GFPoly::from_index(b, qi);
        let res = linear_residues(&ql, &p, size)?;
        for (e, &r) in eta.iter_mut().zip(&res) {
            let a = g2 * sig[mus[r as usize] as usize];
            *e = *e * (1.0 + a) + a;
        }
        eta_sum = eta.iter().copied().collect::<CompensatedSum>().value();
        q.push(ql);
        trace.candidate_counts.push(keep);
        trace.components.push(qi);
        trace.criteria.push(eta_sum / size as f64);
    }
    trace.final_criterion = *trace.criteria.last().expect("s >= 1");
    Ok((PolyLatticeRule::new(p, q)?, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::korobov::{criterion_kernel, d_star, default_lambda_grid, Weights};
    use crate::walsh::criterion_walsh_kernel;

    fn params(alpha: f64, w: &[f64]) -> SpaceParams {
        SpaceParams::new(alpha, Weights::List(w.to_vec()), w.len()).unwrap()
    }

    #[test]
    fn pick_uniform_basics() {
        let mut r = RandomSource::new(1);
        for _ in 0..100 {
            assert_eq!(r.pick_uniform(1).unwrap(), 0);
        }
        assert!(r.pick_uniform(0).is_err());
        let a: Vec<u64> = (0..20).map(|_| RandomSource::new(9).pick_uniform(1000).unwrap()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let x = RandomSource::new(2).uniform();
        assert!((0.0..1.0).contains(&x));
        assert_ne!(
            RandomSource::with_stream(5, 0).next_u64(),
            RandomSource::with_stream(5, 1).next_u64()
        );
    }

    #[test]
    fn pick_uniform_chi_square() {
        let mut r = RandomSource::new(2024);
        let mut counts = [0u64; 7];
        let draws = 1_000_000u64;
        for _ in 0..draws {
            counts[r.pick_uniform(7).unwrap() as usize] += 1;
        }
        let e = draws as f64 / 7.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
        // upper 1e-3 quantile of chi-square with 6 degrees of freedom
        assert!(chi2 < 22.458, "chi2 = {chi2}");
    }

    #[test]
    fn candidate_count_rounding() {
        assert_eq!(candidate_count(0.05, 10).unwrap(), 1);
        assert_eq!(candidate_count(0.7, 10).unwrap(), 7);
        assert_eq!(candidate_count(0.5, 255).unwrap(), 128);
        assert_eq!(candidate_count(0.01, 4).unwrap(), 1);
        assert!(candidate_count(1.0, 10).is_err());
        assert!(candidate_count(0.0, 10).is_err());
    }

    #[test]
    fn one_dimensional_rules() {
        let p = params(2.0, &[1.0]);
        for seed in 0..10 {
            let (rule, trace) = construct_lattice(&p, 127, 0.5, &mut RandomSource::new(seed)).unwrap();
            assert_eq!(rule.z, vec![1]);
            assert!(rule.n > 64 && rule.n <= 127);
            assert_eq!(trace.candidate_counts, vec![1]);
            let (prule, _) = construct_poly_lattice(&p, 2, 5, 0.5, &mut RandomSource::new(seed)).unwrap();
            assert_eq!(prule.q, vec![GFPoly::one(2)]);
        }
    }

    #[test]
    fn lattice_errors() {
        let p = params(2.0, &[1.0, 0.5]);
        let mut r = RandomSource::new(0);
        assert!(construct_lattice(&p, 127, 1.0, &mut r).is_err());
        assert!(construct_lattice(&p, 1, 0.5, &mut r).is_err());
        assert!(construct_poly_lattice(&p, 2, 0, 0.5, &mut r).is_err());
    }

    #[test]
    fn lattice_trace_matches_direct_criterion() {
        let p = SpaceParams::new(2.0, Weights::Poly(2.0), 6).unwrap();
        for seed in 0..5 {
            let (rule, trace) = construct_lattice(&p, 257, 0.5, &mut RandomSource::new(seed)).unwrap();
            for l in 1..=6 {
                let sub = LatticeRule::new(rule.n, rule.z[..l].to_vec()).unwrap();
                let direct = criterion_kernel(&p.truncated(l).unwrap(), &sub).unwrap();
                assert!((direct - trace.criteria[l - 1]).abs() <= 1e-13 * direct.max(1e-3));
            }
            assert!(trace.criteria.windows(2).all(|w| w[1] >= w[0]));
            assert_eq!(trace.candidate_counts[1..], vec![candidate_count(0.5, rule.n - 1).unwrap(); 5]);
        }
    }

    #[test]
    fn even_point_count_folding() {
        // M = 3 gives N in {2, 3}; N = 2 exercises the middle term
        let p = params(1.0, &[1.0, 1.0]);
        for seed in 0..20 {
            let (rule, trace) = construct_lattice(&p, 3, 0.5, &mut RandomSource::new(seed)).unwrap();
            let direct = criterion_kernel(&p, &rule).unwrap();
            assert!((direct - trace.final_criterion).abs() < 1e-14);
        }
    }

    /// Independent greedy CBC: full search with the direct criterion.
    fn greedy_reference(p: &SpaceParams, n: u64) -> Vec<u64> {
        let mut z = vec![1u64];
        for l in 2..=p.dim {
            let sub = p.truncated(l).unwrap();
            let best = (1..n)
                .map(|c| {
                    let mut zz = z.clone();
                    zz.push(c);
                    (criterion_kernel(&sub, &LatticeRule::new(n, zz).unwrap()).unwrap(), c)
                })
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
                .unwrap();
            z.push(best.1);
        }
        z
    }

    #[test]
    fn degenerate_tau_is_greedy_cbc() {
        let p = params(2.0, &[1.0, 0.7, 0.4]);
        for seed in 0..10 {
            // M = 13 draws N from {11, 13}; tau = 0.05 keeps one candidate
            let (rule, trace) = construct_lattice(&p, 13, 0.05, &mut RandomSource::new(seed)).unwrap();
            assert_eq!(trace.candidate_counts, vec![1, 1, 1]);
            assert_eq!(rule.z, greedy_reference(&p, rule.n), "N = {}", rule.n);
        }
    }

    #[test]
    fn candidate_set_property() {
        let p = params(2.0, &[1.0, 0.7, 0.4]);
        for seed in 0..10 {
            let (rule, _) = construct_lattice(&p, 31, 0.3, &mut RandomSource::new(seed)).unwrap();
            let n = rule.n;
            let keep = candidate_count(0.3, n - 1).unwrap() as usize;
            for l in 2..=3 {
                let sub = p.truncated(l).unwrap();
                let mut scores: Vec<(f64, u64)> = (1..n)
                    .map(|c| {
                        let mut zz = rule.z[..l - 1].to_vec();
                        zz.push(c);
                        (criterion_kernel(&sub, &LatticeRule::new(n, zz).unwrap()).unwrap(), c)
                    })
                    .collect();
                scores.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                let inside = &scores[..keep];
                assert!(inside.iter().any(|&(_, c)| c == rule.z[l - 1]));
                let max_in = inside.iter().map(|s| s.0).fold(f64::MIN, f64::max);
                let min_out = scores[keep..].iter().map(|s| s.0).fold(f64::MAX, f64::min);
                assert!(max_in <= min_out + 1e-15);
            }
        }
    }

    #[test]
    fn determinism() {
        let p = SpaceParams::new(2.0, Weights::Poly(2.0), 5).unwrap();
        let a = construct_lattice(&p, 257, 0.5, &mut RandomSource::new(42)).unwrap();
        let b = construct_lattice(&p, 257, 0.5, &mut RandomSource::new(42)).unwrap();
        assert_eq!(a, b);
        let c = construct_poly_lattice(&p, 2, 7, 0.5, &mut RandomSource::new(42)).unwrap();
        let d = construct_poly_lattice(&p, 2, 7, 0.5, &mut RandomSource::new(42)).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn lattice_certificate_small() {
        let p = SpaceParams::new(2.0, Weights::Poly(2.0), 4).unwrap();
        let grid = default_lambda_grid(2.0);
        for seed in 0..5 {
            let (rule, _) = construct_lattice(&p, 101, 0.5, &mut RandomSource::new(seed)).unwrap();
            let crit = criterion_kernel(&p, &rule).unwrap();
            let ds = d_star(&p, 101, 0.5, &grid).unwrap();
            assert!(crit.sqrt() <= ds.value);
        }
    }

    #[test]
    fn poly_trace_matches_direct_criterion() {
        let p = SpaceParams::new(1.0, Weights::Poly(1.0), 4).unwrap();
        for (b, m) in [(2u32, 6usize), (3, 3)] {
            for seed in 0..4 {
                let (rule, trace) = construct_poly_lattice(&p, b, m, 0.5, &mut RandomSource::new(seed)).unwrap();
                assert_ne!(rule.p, GFPoly::x(b));
                for l in 1..=4 {
                    let sub = PolyLatticeRule::new(rule.p.clone(), rule.q[..l].to_vec()).unwrap();
                    let direct = criterion_walsh_kernel(&p.truncated(l).unwrap(), &sub).unwrap();
                    assert!((direct - trace.criteria[l - 1]).abs() <= 1e-13);
                }
                assert!(trace.criteria.windows(2).all(|w| w[1] >= w[0] - 1e-15));
                let keep = candidate_count(0.5, (b as u64).pow(m as u32) - 1).unwrap();
                assert!(trace.candidate_counts[1..].iter().all(|&c| c == keep));
            }
        }
    }

    #[test]
    fn degree_one_pool_excludes_x() {
        let pool = modulus_pool(2, 1).unwrap();
        assert_eq!(pool, vec![GFPoly::new(2, vec![1, 1]).unwrap()]);
        assert_eq!(modulus_pool(3, 1).unwrap().len(), 2);
        assert_eq!(candidate_count(0.5, 7).unwrap(), 4);
    }
}
