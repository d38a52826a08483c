//! The truncated-Poisson extremizer family `p(n) = C·pⁿ/n!` on `[k, l]`,
//! the partial exponential sums `Ψ_{K,L}`, and the numerical harness for the
//! MGF-domination argument: among ULC variables of fixed mean, these pmfs
//! are the extreme points at which `E[e^{tX}] ≤ e^{E[X](e^t − 1)}` needs to
//! be proven, and the proof reduces to `f(1) = f′(1) = 0` with `f″ ≥ 0` for
//! the function assembled below from `Ψ` ratios.

use serde::{Deserialize, Serialize};

use crate::dist::DiscretePMF;
use crate::error::{Error, Result};
use crate::numeric::{log_factorial, log_sum_exp, KahanSum};

/// Relative slack accepted by [`verify_mgf_domination`].
pub const MGF_DOMINATION_TOL: f64 = 1e-10;

/// Relative slack accepted by [`psi_log_concavity_check`].
pub const PSI_LOG_CONCAVITY_TOL: f64 = 1e-12;

/// Parameters `(p, k, l)` of the extremizer pmf `C·pⁿ/n!·1_{[k,l]}(n)`,
/// with `p > 0` and `0 ≤ k ≤ l`. The normalizer is `C = 1/Ψ_{k,l}(p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamsRepr")]
pub struct ExtremizerParams {
    p: f64,
    k: usize,
    l: usize,
}

#[derive(Deserialize)]
struct ParamsRepr {
    p: f64,
    k: usize,
    l: usize,
}

impl TryFrom<ParamsRepr> for ExtremizerParams {
    type Error = Error;

    fn try_from(repr: ParamsRepr) -> Result<Self> {
        ExtremizerParams::new(repr.p, repr.k, repr.l)
    }
}

impl ExtremizerParams {
    pub fn new(p: f64, k: usize, l: usize) -> Result<Self> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::param(format!(
                "extremizer requires p > 0, got {p}"
            )));
        }
        if k > l {
            return Err(Error::param(format!(
                "extremizer requires k <= l, got k = {k}, l = {l}"
            )));
        }
        Ok(Self { p, k, l })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }
}

/// `ln Ψ_{K,L}(x)` where `Ψ_{K,L}(x) = Σ_{n=K}^{L} xⁿ/n!`, with the
/// boundary conventions `Ψ_{K,L} = Ψ_{0,L}` for `K ≤ 0 ≤ L` and
/// `Ψ_{K,L} = 0` for `L < 0` (then the log is `-inf`). An empty range
/// `K > L ≥ 0` also sums to zero. Requires `x ≥ 0`.
///
/// Accumulates `n·ln x − ln n!` terms through log-sum-exp, so values stay
/// finite for `x` up to 100 and `L` up to 300 and far beyond.
pub fn log_psi(k: i64, l: i64, x: f64) -> f64 {
    debug_assert!(x >= 0.0, "psi requires x >= 0");
    if l < 0 {
        return f64::NEG_INFINITY;
    }
    let k_eff = k.max(0) as usize;
    let l = l as usize;
    if k_eff > l {
        return f64::NEG_INFINITY;
    }
    if x == 0.0 {
        // only the n = 0 term 0⁰/0! = 1 survives
        return if k_eff == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    let log_x = x.ln();
    let mut log_fact = log_factorial(k_eff);
    let mut logs = Vec::with_capacity(l - k_eff + 1);
    for n in k_eff..=l {
        if n > k_eff {
            log_fact += (n as f64).ln();
        }
        logs.push(n as f64 * log_x - log_fact);
    }
    log_sum_exp(&logs)
}

/// The partial exponential sum `Ψ_{K,L}(x)` under the conventions of
/// [`log_psi`].
pub fn psi(k: i64, l: i64, x: f64) -> f64 {
    log_psi(k, l, x).exp()
}

/// `Ψ_{K,L}(x)` by direct compensated summation of `xⁿ/n!` terms: the
/// cross-check path for moderate arguments (`x < 1`, `l < 30`), where no
/// scaling is needed.
pub fn psi_direct(k: i64, l: i64, x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if l < 0 {
        return 0.0;
    }
    let k_eff = k.max(0) as usize;
    let l = l as usize;
    if k_eff > l {
        return 0.0;
    }
    let mut term = 1.0f64;
    for n in 1..=k_eff {
        term *= x / n as f64;
    }
    let mut acc = KahanSum::new();
    acc.add(term);
    for n in (k_eff + 1)..=l {
        term *= x / n as f64;
        acc.add(term);
    }
    acc.value()
}

/// The extremizer pmf `p(n) = pⁿ/(n!·Ψ_{k,l}(p))` on `[k, l]`. Satisfies
/// the ULC inequality with equality at every interior point, and its mean
/// is `p·Ψ_{k−1,l−1}(p)/Ψ_{k,l}(p)`.
pub fn extremizer_pmf(params: &ExtremizerParams) -> Result<DiscretePMF> {
    let log_p = params.p.ln();
    let mut log_fact = log_factorial(params.k);
    let mut logw = Vec::with_capacity(params.l - params.k + 1);
    for n in params.k..=params.l {
        if n > params.k {
            log_fact += (n as f64).ln();
        }
        logw.push(n as f64 * log_p - log_fact);
    }
    DiscretePMF::from_log_weights(params.k, &logw)
}

/// `Ψ_{k−1,l−1}(x)/Ψ_{k,l}(x)`, the derivative ratio appearing in `f′`;
/// `E[X] = p·ratio(p)` for the extremizer pmf.
fn psi_ratio(k: i64, l: i64, x: f64) -> f64 {
    let num = log_psi(k - 1, l - 1, x);
    if num == f64::NEG_INFINITY {
        return 0.0;
    }
    (num - log_psi(k, l, x)).exp()
}

/// `f(y) = (p·Ψ_{k−1,l−1}(p)/Ψ_{k,l}(p))(y−1) − ln Ψ_{k,l}(yp) + ln Ψ_{k,l}(p)`,
/// the log-domain deficit of the Poisson MGF bound at `y = e^t`. The
/// domination argument shows `f ≥ 0` for all `y > 0`.
pub fn f_value(params: &ExtremizerParams, y: f64) -> f64 {
    debug_assert!(y > 0.0);
    let (p, k, l) = (params.p, params.k as i64, params.l as i64);
    p * psi_ratio(k, l, p) * (y - 1.0) - log_psi(k, l, y * p) + log_psi(k, l, p)
}

/// `f′(y) = p·Ψ_{k−1,l−1}(p)/Ψ_{k,l}(p) − p·Ψ_{k−1,l−1}(yp)/Ψ_{k,l}(yp)`.
pub fn f_prime(params: &ExtremizerParams, y: f64) -> f64 {
    debug_assert!(y > 0.0);
    let (p, k, l) = (params.p, params.k as i64, params.l as i64);
    p * psi_ratio(k, l, p) - p * psi_ratio(k, l, y * p)
}

/// `f″(y) = −p²·(Ψ_{k,l}·Ψ_{k−2,l−2} − Ψ²_{k−1,l−1})(yp)/Ψ²_{k,l}(yp)`,
/// nonnegative because the `Ψ` sums are log-concave in the index pair.
pub fn f_second(params: &ExtremizerParams, y: f64) -> f64 {
    debug_assert!(y > 0.0);
    let (p, k, l) = (params.p, params.k as i64, params.l as i64);
    let x = y * p;
    let lp0 = log_psi(k, l, x);
    let lp1 = log_psi(k - 1, l - 1, x);
    let lp2 = log_psi(k - 2, l - 2, x);
    -p * p * ((lp2 - lp0).exp() - (2.0 * (lp1 - lp0)).exp())
}

/// True iff `Ψ_{k,l}(x)·Ψ_{k−2,l−2}(x) ≤ Ψ²_{k−1,l−1}(x)` within
/// [`PSI_LOG_CONCAVITY_TOL`] relative slack: the log-concavity (in the
/// index pair) that makes `f″ ≥ 0`.
pub fn psi_log_concavity_check(k: usize, l: usize, x: f64) -> bool {
    assert!(k <= l, "requires k <= l");
    assert!(x > 0.0, "requires x > 0");
    let (k, l) = (k as i64, l as i64);
    let lhs = log_psi(k, l, x) + log_psi(k - 2, l - 2, x);
    if lhs == f64::NEG_INFINITY {
        return true;
    }
    lhs <= 2.0 * log_psi(k - 1, l - 1, x) + PSI_LOG_CONCAVITY_TOL
}

/// Default `t` grid for MGF checks: 41 evenly spaced points on `[-2, 2]`
/// plus `±5`, covering the Chernoff-relevant range of both tails.
pub fn default_t_grid() -> Vec<f64> {
    let mut grid = Vec::with_capacity(43);
    grid.push(-5.0);
    for i in 0..41 {
        grid.push(-2.0 + 4.0 * i as f64 / 40.0);
    }
    grid.push(5.0);
    grid
}

/// Result of checking `E[e^{tX}] ≤ e^{E[X](e^t − 1)}` over a `t` grid.
/// `worst_gap` is the largest value of `ln E[e^{tX}] − E[X](e^t − 1)`,
/// i.e. the relative excess of the MGF over the Poisson bound.
#[derive(Debug, Clone, Serialize)]
pub struct MgfDominationReport {
    pub params: ExtremizerParams,
    pub worst_gap: f64,
    pub holds: bool,
    pub grid: Vec<f64>,
}

/// Verifies the Poisson MGF bound for the extremizer pmf of `params` at
/// every `t` in `t_grid`, within [`MGF_DOMINATION_TOL`] relative slack.
pub fn verify_mgf_domination(
    params: &ExtremizerParams,
    t_grid: &[f64],
) -> Result<MgfDominationReport> {
    let pmf = extremizer_pmf(params)?;
    let mu = pmf.mean();
    let mut worst = f64::NEG_INFINITY;
    for &t in t_grid {
        worst = worst.max(pmf.log_mgf(t) - mu * t.exp_m1());
    }
    Ok(MgfDominationReport {
        params: *params,
        worst_gap: worst,
        holds: worst <= MGF_DOMINATION_TOL,
        grid: t_grid.to_vec(),
    })
}
