//! Finite-support discrete pmfs on the nonnegative integers: exact moments,
//! tails and MGF, the log-concavity and ultra log-concavity predicates,
//! convolution, and constructors for the test families used throughout the
//! crate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{log_binomial, log_factorial, log_sum_exp, KahanSum};

/// Absolute tolerance on `Σ p(n) = 1` accepted by the strict constructor.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Default relative tolerance for the log-concavity and ULC predicates.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

/// Log-weights more than this far below the peak are trimmed by
/// [`random_ulc`], keeping every stored mass (and pairwise products under
/// convolution) inside the normal f64 range.
const LOG_WEIGHT_FLOOR: f64 = 300.0;

const MAX_LOG_MGF: f64 = 709.782712893384; // ln(f64::MAX)

/// A probability mass function with contiguous support
/// `{offset, offset+1, ..., offset+len-1} ⊂ ℕ`.
///
/// Invariants (enforced at construction): every mass is strictly positive
/// and finite, the masses sum to 1 within [`NORMALIZATION_TOL`], and the
/// support lives on the nonnegative integers. Masses are stored normalized.
///
/// Serializes as `{"offset": int, "masses": [float, ...]}`; deserialization
/// re-validates all invariants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PmfRepr", into = "PmfRepr")]
pub struct DiscretePMF {
    offset: usize,
    masses: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct PmfRepr {
    offset: usize,
    masses: Vec<f64>,
}

impl TryFrom<PmfRepr> for DiscretePMF {
    type Error = Error;

    fn try_from(repr: PmfRepr) -> Result<Self> {
        DiscretePMF::new(repr.offset, repr.masses)
    }
}

impl From<DiscretePMF> for PmfRepr {
    fn from(pmf: DiscretePMF) -> Self {
        PmfRepr {
            offset: pmf.offset,
            masses: pmf.masses,
        }
    }
}

impl DiscretePMF {
    /// Strict constructor: requires the masses to already sum to 1 within
    /// [`NORMALIZATION_TOL`]. This is the validation path used for external
    /// input (JSON fixtures, CLI files). The accepted masses are stored
    /// renormalized.
    pub fn new(offset: usize, masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::EmptySupport);
        }
        let mut acc = KahanSum::new();
        for &w in &masses {
            acc.add(w);
        }
        let sum = acc.value();
        if !sum.is_finite() || (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { sum });
        }
        Self::from_weights(offset, masses)
    }

    /// Normalizing constructor: accepts arbitrary strictly positive finite
    /// weights and divides by their sum.
    pub fn from_weights(offset: usize, weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptySupport);
        }
        for (i, &w) in weights.iter().enumerate() {
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidMass {
                    index: offset + i,
                    value: w,
                });
            }
        }
        let mut acc = KahanSum::new();
        for &w in &weights {
            acc.add(w);
        }
        let sum = acc.value();
        let masses = weights.iter().map(|&w| w / sum).collect();
        Ok(Self { offset, masses })
    }

    /// Builds a pmf from log-weights via a max shift; all resulting masses
    /// must stay strictly positive (log-weights within ~700 of the peak).
    pub(crate) fn from_log_weights(offset: usize, log_weights: &[f64]) -> Result<Self> {
        if log_weights.is_empty() {
            return Err(Error::EmptySupport);
        }
        let m = log_weights
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = log_weights.iter().map(|&lw| (lw - m).exp()).collect();
        Self::from_weights(offset, weights)
    }

    /// The degenerate distribution concentrated at `k`.
    pub fn point_mass(k: usize) -> Self {
        Self {
            offset: k,
            masses: vec![1.0],
        }
    }

    /// Binomial(n, p) for `n ≥ 1` and `0 < p < 1` (computed via stable
    /// log-weights). Degenerate endpoints are rejected because they do not
    /// yield a pmf with contiguous strictly positive masses; use
    /// [`DiscretePMF::point_mass`] instead.
    pub fn binomial(n: usize, p: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("binomial requires n >= 1"));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::param(format!(
                "binomial requires 0 < p < 1, got p = {p}"
            )));
        }
        let log_p = p.ln();
        let log_q = (-p).ln_1p();
        let logw: Vec<f64> = (0..=n)
            .map(|k| log_binomial(n, k) + k as f64 * log_p + (n - k) as f64 * log_q)
            .collect();
        Self::from_log_weights(0, &logw)
    }

    /// Poisson(λ) conditioned on `[k, l]`: `p(n) ∝ λⁿ/n!`, computed via
    /// stable log-factorials.
    pub fn truncated_poisson(lambda: f64, k: usize, l: usize) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::param(format!(
                "truncated Poisson requires lambda > 0, got {lambda}"
            )));
        }
        if k > l {
            return Err(Error::param(format!(
                "truncated Poisson requires k <= l, got k = {k}, l = {l}"
            )));
        }
        let log_lambda = lambda.ln();
        let mut logw = Vec::with_capacity(l - k + 1);
        let mut log_fact = log_factorial(k);
        for n in k..=l {
            if n > k {
                log_fact += (n as f64).ln();
            }
            logw.push(n as f64 * log_lambda - log_fact);
        }
        Self::from_log_weights(k, &logw)
    }

    /// Smallest support point.
    pub fn offset(&self) -> usize {
        self.offset
    }

    /// Largest support point.
    pub fn max_support(&self) -> usize {
        self.offset + self.masses.len() - 1
    }

    /// Number of support points.
    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: support is never empty
    }

    /// The stored (normalized) masses, indexed from `offset`.
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// `P(X = n)`; zero outside the support.
    pub fn prob(&self, n: usize) -> f64 {
        if n < self.offset || n > self.max_support() {
            0.0
        } else {
            self.masses[n - self.offset]
        }
    }

    /// `E[X] = Σ n·p(n)`.
    pub fn mean(&self) -> f64 {
        let mut acc = KahanSum::new();
        for (i, &p) in self.masses.iter().enumerate() {
            acc.add((self.offset + i) as f64 * p);
        }
        acc.value()
    }

    /// `Var(X)`, computed as the centered second moment (two-pass) so the
    /// result is nonnegative even in floating point.
    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        let mut acc = KahanSum::new();
        for (i, &p) in self.masses.iter().enumerate() {
            let d = (self.offset + i) as f64 - mu;
            acc.add(d * d * p);
        }
        acc.value().max(0.0)
    }

    /// `ln E[e^{tX}]`, always finite for finite `t`.
    pub fn log_mgf(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        let logs: Vec<f64> = self
            .masses
            .iter()
            .enumerate()
            .map(|(i, &p)| t * (self.offset + i) as f64 + p.ln())
            .collect();
        log_sum_exp(&logs)
    }

    /// `E[e^{tX}] = Σ e^{tn} p(n)`, computed in log-sum-exp form. At `t = 0`
    /// this is exactly 1 by normalization. Signals an overflow when the log
    /// of the result exceeds the representable range.
    pub fn mgf(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(1.0);
        }
        let log_value = self.log_mgf(t);
        if log_value > MAX_LOG_MGF {
            return Err(Error::MgfOverflow { log_value });
        }
        Ok(log_value.exp())
    }

    /// Exact `P(X ≥ E[X] + t)` for `t ≥ 0`, summed from the far (top) end of
    /// the support toward the threshold to minimize cancellation.
    pub fn upper_tail(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        let x = self.mean() + t;
        if x > self.max_support() as f64 {
            return 0.0;
        }
        let from = (x.ceil().max(0.0) as usize).max(self.offset);
        let mut acc = KahanSum::new();
        for n in (from..=self.max_support()).rev() {
            acc.add(self.masses[n - self.offset]);
        }
        acc.value().min(1.0)
    }

    /// Exact `P(X ≤ E[X] − t)` for `t ≥ 0`, summed from the far (bottom) end
    /// of the support toward the threshold.
    pub fn lower_tail(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        let x = self.mean() - t;
        if x < self.offset as f64 {
            return 0.0;
        }
        let to = (x.floor() as usize).min(self.max_support());
        let mut acc = KahanSum::new();
        for n in self.offset..=to {
            acc.add(self.masses[n - self.offset]);
        }
        acc.value().min(1.0)
    }

    /// First interior support point violating `p(n)² ≥ p(n−1)p(n+1)` beyond
    /// the relative slack, if any.
    pub fn log_concavity_violation(&self, rel_tol: f64) -> Option<usize> {
        for i in 1..self.masses.len().saturating_sub(1) {
            let lhs = self.masses[i] * self.masses[i];
            let rhs = self.masses[i - 1] * self.masses[i + 1];
            if lhs < rhs - rel_tol * lhs {
                return Some(self.offset + i);
            }
        }
        None
    }

    /// Tests `p(n)² ≥ p(n−1)p(n+1)` at every interior point.
    pub fn is_log_concave(&self, rel_tol: f64) -> bool {
        self.log_concavity_violation(rel_tol).is_none()
    }

    /// First interior support point violating the ultra log-concavity
    /// inequality `n·p(n)² ≥ (n+1)·p(n−1)p(n+1)`, if any.
    ///
    /// The test runs in log domain on `q(n) = n!·p(n)` (checking
    /// `2·ln q(n) ≥ ln q(n−1) + ln q(n+1) − rel_tol`), which avoids factorial
    /// overflow for supports beyond ~170 and makes the slack relative.
    pub fn ulc_violation(&self, rel_tol: f64) -> Option<usize> {
        if self.masses.len() < 3 {
            return None;
        }
        let log_q: Vec<f64> = self
            .masses
            .iter()
            .enumerate()
            .map(|(i, &p)| p.ln() + log_factorial(self.offset + i))
            .collect();
        for i in 1..log_q.len() - 1 {
            if 2.0 * log_q[i] < log_q[i - 1] + log_q[i + 1] - rel_tol {
                return Some(self.offset + i);
            }
        }
        None
    }

    /// Tests log-concavity of `n!·p(n)`, i.e. log-concavity relative to the
    /// Poisson weights.
    pub fn is_ultra_log_concave(&self, rel_tol: f64) -> bool {
        self.ulc_violation(rel_tol).is_none()
    }

    /// The pmf of the sum of independent draws from `self` and `other`;
    /// support `[Ma+Mb, Na+Nb]`.
    ///
    /// Mass ranges of library-constructed pmfs are bounded so the pairwise
    /// products here never underflow; pathological hand-built inputs whose
    /// extreme masses multiply below the f64 range are not supported.
    pub fn convolve(&self, other: &DiscretePMF) -> DiscretePMF {
        let len = self.masses.len() + other.masses.len() - 1;
        let mut weights = vec![0.0f64; len];
        for (i, &a) in self.masses.iter().enumerate() {
            for (j, &b) in other.masses.iter().enumerate() {
                weights[i + j] += a * b;
            }
        }
        DiscretePMF::from_weights(self.offset + other.offset, weights)
            .expect("convolution of valid pmfs underflowed")
    }
}

/// A seeded pseudo-random ultra log-concave pmf, ULC by construction:
/// `q(n) = n!·p(n)` is `exp` of a random concave sequence on a random
/// subinterval `[k, l] ⊆ [0, max_support]`.
///
/// Endpoints are uniform on `[0, max_support]`, the initial slope of the
/// concave sequence is uniform on `[-1, 2]`, and its second differences are
/// uniform on `[-2, 0]`, producing both near-Poisson and strongly
/// sub-Poisson shapes. Entries falling more than 300 logs below the peak
/// mass are trimmed (the shape is unimodal, so the trimmed support stays
/// contiguous). Deterministic given `seed`.
pub fn random_ulc(seed: u64, max_support: usize) -> DiscretePMF {
    assert!(max_support >= 1, "max_support must be >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = rng.random_range(0..=max_support);
    let b = rng.random_range(0..=max_support);
    let (k, l) = (a.min(b), a.max(b));

    let len = l - k + 1;
    let mut log_q = Vec::with_capacity(len);
    let mut level = 0.0f64;
    let mut slope = rng.random_range(-1.0..=2.0);
    log_q.push(level);
    for _ in 1..len {
        level += slope;
        log_q.push(level);
        slope += rng.random_range(-2.0..=0.0);
    }

    let logw: Vec<f64> = log_q
        .iter()
        .enumerate()
        .map(|(i, &lq)| lq - log_factorial(k + i))
        .collect();
    let peak = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let keep: Vec<usize> = (0..len)
        .filter(|&i| logw[i] >= peak - LOG_WEIGHT_FLOOR)
        .collect();
    let (first, last) = (keep[0], *keep.last().unwrap());
    DiscretePMF::from_log_weights(k + first, &logw[first..=last])
        .expect("trimmed log-weights are within range by construction")
}

/// Smallest `L` such that a Poisson(λ) variable has `P(X > L) < budget`,
/// used to pick truncation points with a prescribed mass-loss budget.
pub fn poisson_support_bound(lambda: f64, budget: f64) -> usize {
    assert!(lambda > 0.0 && lambda.is_finite());
    assert!(budget > 0.0 && budget < 1.0);
    let log_lambda = lambda.ln();
    let mut log_term = -lambda;
    let mut log_cum = log_term;
    let mut n = 0usize;
    // tail mass 1 - e^{log_cum} = -expm1(log_cum)
    while -log_cum.exp_m1() >= budget {
        n += 1;
        log_term += log_lambda - (n as f64).ln();
        log_cum = log_add_exp(log_cum, log_term);
    }
    n
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if a >= b {
        a + (b - a).exp().ln_1p()
    } else {
        b + (a - b).exp().ln_1p()
    }
}

/// Total-variation distance `½ Σ |p(n) − q(n)|` over the union of supports.
pub fn total_variation(a: &DiscretePMF, b: &DiscretePMF) -> f64 {
    let lo = a.offset().min(b.offset());
    let hi = a.max_support().max(b.max_support());
    let mut acc = KahanSum::new();
    for n in lo..=hi {
        acc.add((a.prob(n) - b.prob(n)).abs());
    }
    0.5 * acc.value()
}
