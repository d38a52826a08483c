//! Tail-bound evaluators for ultra log-concave variables: the Bennett
//! function, the Poisson-type bounds and their sub-Gaussian/sub-exponential
//! weakenings, the `c`-log-concave comparison bound, a grid-based Chernoff
//! oracle, and the variance-vs-mean check.

use serde::{Deserialize, Serialize};

use crate::dist::{DiscretePMF, DEFAULT_REL_TOL};
use crate::error::{Error, Result};

/// Crossover between the series and closed-form branches of [`bennett_h`].
pub const H_SERIES_CROSSOVER: f64 = 1e-4;

/// Default number of grid points for [`chernoff_upper_oracle`].
pub const DEFAULT_CHERNOFF_GRID: usize = 10_000;

/// Default log-spaced grid range for [`chernoff_upper_oracle`].
pub const CHERNOFF_GRID_RANGE: (f64, f64) = (1e-6, 50.0);

/// Slack allowed on `Var(X) ≤ E[X]` in [`verify_variance`].
pub const VARIANCE_SLACK: f64 = 1e-12;

/// The Bennett function `h(x) = 2((1+x)log(1+x) − x)/x²` on `[-1, ∞)`,
/// with `h(-1) = 2` (by the limit) and `h(0) = 1`.
///
/// `h` decreases from 2 to 0 and satisfies `h(x) ≥ 1/(1+x)` for `x ≥ 0`;
/// `x·h(x)` is increasing. Uses the alternating series below
/// [`H_SERIES_CROSSOVER`] and the closed form above it; both branches carry
/// relative error near machine precision.
pub fn bennett_h(x: f64) -> Result<f64> {
    if !(x >= -1.0) {
        return Err(Error::domain(
            "bennett_h",
            format!("requires x >= -1, got {x}"),
        ));
    }
    Ok(h_raw(x))
}

/// `bennett_h` for arguments already validated to lie in `[-1, ∞)`.
fn h_raw(x: f64) -> f64 {
    debug_assert!(x >= -1.0);
    if x == -1.0 {
        2.0
    } else if x.abs() < H_SERIES_CROSSOVER {
        bennett_h_series(x)
    } else {
        bennett_h_closed_form(x)
    }
}

/// Series branch: `2·Σ_{k≥0} (−x)^k/((k+1)(k+2))`, truncated at machine
/// precision. Accurate for small `|x|`; exposed so the two branches can be
/// cross-checked on the crossover band.
pub fn bennett_h_series(x: f64) -> f64 {
    let mut sum = 0.0f64;
    let mut power = 1.0f64;
    for k in 0..60usize {
        let term = power / (((k + 1) * (k + 2)) as f64);
        sum += term;
        if term.abs() <= f64::EPSILON * sum.abs() * 0.25 {
            break;
        }
        power *= -x;
    }
    2.0 * sum
}

/// Closed-form branch of the Bennett function, `x > -1`, `x ≠ 0`.
///
/// For `|x| ≤ 0.5` the numerator `(1+x)log(1+x) − x` is evaluated through
/// the atanh form of the logarithm, `log(1+x) = 2·atanh(x/(2+x))`, which
/// rearranges to the cancellation-free
/// `x²/(2+x) + 2(1+x)·Σ_{j≥1} w^{2j+1}/(2j+1)` with `w = x/(2+x)`; the naive
/// evaluation loses `~eps/x` relative accuracy to cancellation. Larger `|x|`
/// uses `x·u + (u − x)` with `u = log1p(x)`, where `u − x` is exact by
/// Sterbenz and no cancellation remains.
pub fn bennett_h_closed_form(x: f64) -> f64 {
    debug_assert!(x > -1.0 && x != 0.0);
    if x.abs() <= 0.5 {
        let w = x / (2.0 + x);
        let w2 = w * w;
        let mut tail = 0.0f64;
        let mut power = w * w2;
        for j in 1..60usize {
            let term = power / ((2 * j + 1) as f64);
            tail += term;
            if term.abs() <= 1e-30 {
                break;
            }
            power *= w2;
        }
        let numerator = x * x / (2.0 + x) + 2.0 * (1.0 + x) * tail;
        2.0 * numerator / (x * x)
    } else {
        let u = x.ln_1p();
        2.0 * (x * u + (u - x)) / (x * x)
    }
}

fn require_positive(name: &'static str, what: &str, value: f64) -> Result<()> {
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::domain(
            name,
            format!("requires {what} > 0, got {value}"),
        ));
    }
    Ok(())
}

fn require_nonnegative(name: &'static str, what: &str, value: f64) -> Result<()> {
    if !(value >= 0.0) {
        return Err(Error::domain(
            name,
            format!("requires {what} >= 0, got {value}"),
        ));
    }
    Ok(())
}

/// Upper-tail bound `P(X − E[X] ≥ t) ≤ e^{−(t²/2μ)·h(t/μ)}` for a ULC
/// variable with mean `μ > 0` and `t ≥ 0`.
pub fn theorem1_upper(mu: f64, t: f64) -> Result<f64> {
    require_positive("theorem1_upper", "E[X]", mu)?;
    require_nonnegative("theorem1_upper", "t", t)?;
    let exponent = -(t * t / (2.0 * mu)) * h_raw(t / mu);
    Ok(exponent.exp().min(1.0))
}

/// Lower-tail bound `P(X − E[X] ≤ −t) ≤ e^{−(t²/2μ)·h(−t/μ)}` for
/// `0 ≤ t ≤ μ`; identically 0 for `t > μ` since `X ≥ 0`. At `t = μ` the
/// exponent reduces to `−μ` via `h(-1) = 2`.
pub fn theorem1_lower(mu: f64, t: f64) -> Result<f64> {
    require_positive("theorem1_lower", "E[X]", mu)?;
    require_nonnegative("theorem1_lower", "t", t)?;
    if t > mu {
        return Ok(0.0);
    }
    let exponent = -(t * t / (2.0 * mu)) * h_raw(-t / mu);
    Ok(exponent.exp().min(1.0))
}

/// Sub-Gaussian-with-linear-correction weakening of the upper tail:
/// `e^{−t²/(2(t+μ))}`.
pub fn corollary2_upper(mu: f64, t: f64) -> Result<f64> {
    require_positive("corollary2_upper", "E[X]", mu)?;
    require_nonnegative("corollary2_upper", "t", t)?;
    Ok((-(t * t) / (2.0 * (t + mu))).exp().min(1.0))
}

/// Sub-Gaussian weakening of the lower tail: `e^{−t²/(2μ)}`.
pub fn corollary2_lower(mu: f64, t: f64) -> Result<f64> {
    require_positive("corollary2_lower", "E[X]", mu)?;
    require_nonnegative("corollary2_lower", "t", t)?;
    Ok((-(t * t) / (2.0 * mu)).exp().min(1.0))
}

/// The `c`-log-concave comparison bound `e^{−(ct²/2)·h(ct)}`. Coincides
/// with [`theorem1_upper`] at `c = 1/μ` and is weaker for `c < 1/μ` because
/// `x·h(x)` is increasing.
pub fn johnson_bound(c: f64, t: f64) -> Result<f64> {
    require_positive("johnson_bound", "c", c)?;
    require_nonnegative("johnson_bound", "t", t)?;
    let exponent = -(c * t * t / 2.0) * h_raw(c * t);
    Ok(exponent.exp().min(1.0))
}

/// Numerical Chernoff bound on `P(X ≥ E[X] + t)`: minimizes
/// `e^{−s(E[X]+t)}·E[e^{sX}]` over a log-spaced grid of `grid_points` values
/// of `s` in [`CHERNOFF_GRID_RANGE`], then polishes the minimum by ternary
/// search between the bracketing grid neighbours (the objective is convex
/// in `s`).
///
/// This is an oracle for cross-checking the closed-form optimizer behind
/// [`theorem1_upper`]; the analytic optimum is never consulted. Every
/// evaluated `s` yields a valid bound, so the minimum is one too.
pub fn chernoff_upper_oracle(pmf: &DiscretePMF, t: f64, grid_points: usize) -> f64 {
    assert!(grid_points >= 2, "need at least two grid points");
    debug_assert!(t >= 0.0);
    let mean = pmf.mean();
    let objective = |s: f64| -s * (mean + t) + pmf.log_mgf(s);

    let (lo, hi) = CHERNOFF_GRID_RANGE;
    let log_ratio = (hi / lo).ln();
    let s_at = |i: usize| lo * (log_ratio * i as f64 / (grid_points - 1) as f64).exp();

    let mut best = f64::INFINITY;
    let mut best_idx = 0usize;
    for i in 0..grid_points {
        let value = objective(s_at(i));
        if value < best {
            best = value;
            best_idx = i;
        }
    }

    let mut a = s_at(best_idx.saturating_sub(1));
    let mut b = s_at((best_idx + 1).min(grid_points - 1));
    for _ in 0..100 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if objective(m1) <= objective(m2) {
            b = m2;
        } else {
            a = m1;
        }
    }
    best = best.min(objective(0.5 * (a + b)));
    best.exp().min(1.0)
}

/// Outcome of the variance-vs-mean check `Var(X) ≤ E[X]`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct VarianceReport {
    pub mean: f64,
    pub variance: f64,
    pub holds: bool,
}

/// Checks `Var(X) ≤ E[X]` (within [`VARIANCE_SLACK`]) for a ULC pmf;
/// rejects inputs that fail the ULC predicate at [`DEFAULT_REL_TOL`].
pub fn verify_variance(pmf: &DiscretePMF) -> Result<VarianceReport> {
    if let Some(index) = pmf.ulc_violation(DEFAULT_REL_TOL) {
        return Err(Error::NotUltraLogConcave { index });
    }
    let mean = pmf.mean();
    let variance = pmf.variance();
    Ok(VarianceReport {
        mean,
        variance,
        holds: variance <= mean + VARIANCE_SLACK,
    })
}

/// Which tail a [`TailBoundReport`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Upper,
    Lower,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Upper => write!(f, "upper"),
            Side::Lower => write!(f, "lower"),
        }
    }
}

/// The comparison bound evaluated at its own parameter `c`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct JohnsonBound {
    pub c: f64,
    pub value: f64,
}

/// All bounds at one threshold: the exact tail (when a pmf is available),
/// the main bound, its weakening, and optionally the comparison bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TailBoundReport {
    pub t: f64,
    pub side: Side,
    pub exact: Option<f64>,
    pub theorem1: f64,
    pub corollary2: f64,
    pub johnson: Option<JohnsonBound>,
}

impl TailBoundReport {
    /// Evaluates every bound for a variable of mean `mu` at threshold `t`.
    /// The comparison bound applies to the upper tail only and is skipped
    /// (left `None`) on lower-tail rows.
    pub fn compute(
        mu: f64,
        t: f64,
        side: Side,
        exact: Option<f64>,
        johnson_c: Option<f64>,
    ) -> Result<Self> {
        let (theorem1, corollary2) = match side {
            Side::Upper => (theorem1_upper(mu, t)?, corollary2_upper(mu, t)?),
            Side::Lower => (theorem1_lower(mu, t)?, corollary2_lower(mu, t)?),
        };
        let johnson = match (side, johnson_c) {
            (Side::Upper, Some(c)) => Some(JohnsonBound {
                c,
                value: johnson_bound(c, t)?,
            }),
            _ => None,
        };
        Ok(Self {
            t,
            side,
            exact,
            theorem1,
            corollary2,
            johnson,
        })
    }

    /// `exact − theorem1`; nonpositive whenever the bound holds.
    pub fn gap_theorem1(&self) -> Option<f64> {
        self.exact.map(|e| e - self.theorem1)
    }
}
