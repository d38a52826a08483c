//! Intrinsic-volume profiles of concrete convex bodies, the Wills
//! functional, and the induced integer random variable `Z_K` with
//! `P(Z_K = j) = V_j(K)/W(K)`.
//!
//! The intrinsic volumes `V_0, ..., V_n` are the normalized Steiner
//! coefficients of `vol(K + tB)`; they form an ultra log-concave sequence,
//! so `Z_K` inherits every ULC concentration bound: dimension-free
//! two-sided tails `P(|Z_K − E[Z_K]| ≥ t√n) ≤ 2e^{−t²/2}` for
//! `0 ≤ t ≤ √n`, and `Var(Z_K) ≤ E[Z_K]`.

use serde::{Deserialize, Serialize};

use crate::bounds::{corollary2_lower, corollary2_upper};
use crate::dist::{poisson_support_bound, total_variation, DiscretePMF};
use crate::error::{Error, Result};
use crate::numeric::{log_binomial, KahanSum};

/// Mass-loss budget used when representing the Poisson reference by a
/// finite truncation.
pub const POISSON_TRUNCATION_BUDGET: f64 = 1e-12;

/// A convex body with a computable intrinsic-volume profile.
///
/// Serializes as `{"box": {"sides": [...]}}`, `{"cube": {"r": ..., "n": ...}}`
/// or `{"ball": {"radius": ..., "n": ...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", try_from = "BodyRepr")]
pub enum ConvexBodySpec {
    /// Axis-aligned box with the given strictly positive side lengths.
    Box { sides: Vec<f64> },
    /// The scaled unit cube `r·[0,1]^n`.
    Cube { r: f64, n: usize },
    /// The Euclidean ball of the given radius in dimension `n`.
    Ball { radius: f64, n: usize },
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum BodyRepr {
    Box { sides: Vec<f64> },
    Cube { r: f64, n: usize },
    Ball { radius: f64, n: usize },
}

impl TryFrom<BodyRepr> for ConvexBodySpec {
    type Error = Error;

    fn try_from(repr: BodyRepr) -> Result<Self> {
        match repr {
            BodyRepr::Box { sides } => ConvexBodySpec::rectangular_box(sides),
            BodyRepr::Cube { r, n } => ConvexBodySpec::scaled_cube(r, n),
            BodyRepr::Ball { radius, n } => ConvexBodySpec::ball(radius, n),
        }
    }
}

impl ConvexBodySpec {
    pub fn rectangular_box(sides: Vec<f64>) -> Result<Self> {
        if sides.is_empty() {
            return Err(Error::param("box requires at least one side"));
        }
        for (i, &a) in sides.iter().enumerate() {
            if !(a > 0.0) || !a.is_finite() {
                return Err(Error::param(format!(
                    "box side {i} must be strictly positive, got {a}"
                )));
            }
        }
        Ok(ConvexBodySpec::Box { sides })
    }

    pub fn scaled_cube(r: f64, n: usize) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::param(format!("cube scale must be positive, got {r}")));
        }
        if n == 0 {
            return Err(Error::param("cube dimension must be >= 1"));
        }
        Ok(ConvexBodySpec::Cube { r, n })
    }

    pub fn ball(radius: f64, n: usize) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::param(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        if n == 0 {
            return Err(Error::param("ball dimension must be >= 1"));
        }
        Ok(ConvexBodySpec::Ball { radius, n })
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        match self {
            ConvexBodySpec::Box { sides } => sides.len(),
            ConvexBodySpec::Cube { n, .. } | ConvexBodySpec::Ball { n, .. } => *n,
        }
    }
}

/// The intrinsic volumes `V_0, ..., V_n` of a body, their total (the Wills
/// functional `W(K)`), and the normalized sequence `Ṽ_j = V_j/W(K)`.
///
/// For nonempty bodies `V_0 = 1`, every entry is positive for the supported
/// variants, and the normalized sequence is a ULC pmf on `{0, ..., n}`.
/// Raw volumes grow like `W(K)` (exponentially in `n` for large bodies), so
/// the normalized sequence is stored alongside and used for all pmf work.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntrinsicVolumeProfile {
    pub dim: usize,
    pub volumes: Vec<f64>,
    pub wills: f64,
    pub normalized: Vec<f64>,
}

/// `e_j(a_1, ..., a_n)` for `j = 0..=n` by the stable product recurrence
/// (all terms positive, no cancellation).
fn elementary_symmetric(sides: &[f64]) -> Vec<f64> {
    let n = sides.len();
    let mut e = vec![0.0f64; n + 1];
    e[0] = 1.0;
    for (count, &a) in sides.iter().enumerate() {
        for j in (1..=count + 1).rev() {
            e[j] += a * e[j - 1];
        }
    }
    e
}

/// `ln κ_m` for the unit-ball volumes `κ_m = π^{m/2}/Γ(m/2 + 1)`, via the
/// exact half-integer log-gamma recurrence `ln κ_m = ln κ_{m−2} + ln 2π − ln m`
/// (`κ_0 = 1`, `κ_1 = 2`). Returns the table for `m = 0..=n`.
fn ln_kappa_table(n: usize) -> Vec<f64> {
    let log_2pi = (2.0 * std::f64::consts::PI).ln();
    let mut table = vec![0.0f64; n + 1];
    if n >= 1 {
        table[1] = 2.0f64.ln();
    }
    for m in 2..=n {
        table[m] = table[m - 2] + log_2pi - (m as f64).ln();
    }
    table
}

/// Computes the intrinsic-volume profile of a body:
///
/// - box with sides `a_1..a_n`: `V_j = e_j(a_1, ..., a_n)`;
/// - scaled cube `r[0,1]^n`: `V_j = C(n,j)·r^j`, so the normalized profile
///   is the Binomial(n, r/(1+r)) pmf;
/// - ball of radius `R` in dimension `n`: `V_j = C(n,j)·(κ_n/κ_{n−j})·R^j`.
pub fn intrinsic_volumes(body: &ConvexBodySpec) -> IntrinsicVolumeProfile {
    let volumes = match body {
        ConvexBodySpec::Box { sides } => elementary_symmetric(sides),
        ConvexBodySpec::Cube { r, n } => {
            let mut binom = 1.0f64;
            let mut power = 1.0f64;
            let mut v = Vec::with_capacity(n + 1);
            for j in 0..=*n {
                v.push(binom * power);
                binom = binom * (n - j) as f64 / (j + 1) as f64;
                power *= r;
            }
            v
        }
        ConvexBodySpec::Ball { radius, n } => {
            let kappa = ln_kappa_table(*n);
            let log_r = radius.ln();
            (0..=*n)
                .map(|j| (log_binomial(*n, j) + kappa[*n] - kappa[*n - j] + j as f64 * log_r).exp())
                .collect()
        }
    };
    let mut acc = KahanSum::new();
    for &v in &volumes {
        acc.add(v);
    }
    let wills = acc.value();
    let normalized = volumes.iter().map(|&v| v / wills).collect();
    IntrinsicVolumeProfile {
        dim: body.dim(),
        volumes,
        wills,
        normalized,
    }
}

/// The pmf of the intrinsic volume random variable `Z_K` on `{0, ..., n}`:
/// `P(Z_K = j) = Ṽ_j(K)`. Trailing zero entries (degenerate top
/// coefficients) are trimmed to preserve contiguity; a zero anywhere else
/// is a malformed profile.
pub fn zk_pmf(profile: &IntrinsicVolumeProfile) -> Result<DiscretePMF> {
    let mut masses = profile.normalized.clone();
    while masses.last() == Some(&0.0) {
        masses.pop();
    }
    if masses.is_empty() {
        return Err(Error::EmptySupport);
    }
    if let Some(index) = masses.iter().position(|&m| m == 0.0) {
        return Err(Error::InteriorZero { index });
    }
    DiscretePMF::from_weights(0, masses)
}

/// One dimension-free concentration check at deviation `t√n`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Corollary6Report {
    pub t: f64,
    /// `t√n`, the absolute deviation tested.
    pub deviation: f64,
    /// Exact `P(|Z_K − E[Z_K]| ≥ t√n)`.
    pub exact: f64,
    /// `2·e^{−t²/2}`.
    pub bound: f64,
    pub holds: bool,
    /// Whether the upper tail is trivially empty because `n < t√n + E[Z_K]`
    /// (the variable never exceeds `n`).
    pub trivial_upper: bool,
}

/// Checks `P(|Z_K − E[Z_K]| ≥ t√n) ≤ 2e^{−t²/2}` exactly, for
/// `0 ≤ t ≤ √n`. Exercises the trivial branch of the proof: when
/// `n < t√n + E[Z_K]` the upper tail is 0 outright.
pub fn corollary6_check(profile: &IntrinsicVolumeProfile, t: f64) -> Result<Corollary6Report> {
    let sqrt_n = (profile.dim as f64).sqrt();
    if !(0.0..=sqrt_n).contains(&t) {
        return Err(Error::domain(
            "corollary6_check",
            format!("requires 0 <= t <= sqrt(n) = {sqrt_n}, got {t}"),
        ));
    }
    let zk = zk_pmf(profile)?;
    let mean = zk.mean();
    let deviation = t * sqrt_n;
    // the two one-sided events are disjoint except at deviation 0
    let exact = (zk.upper_tail(deviation) + zk.lower_tail(deviation)).min(1.0);
    let bound = 2.0 * (-t * t / 2.0).exp();
    Ok(Corollary6Report {
        t,
        deviation,
        exact,
        bound,
        holds: exact <= bound,
        trivial_upper: (profile.dim as f64) < deviation + mean,
    })
}

/// Tail bound `2e^{−(t²/(2(t+1)))√n}` available when `E[Z_K] ≤ √n`: the
/// small-central-intrinsic-volume regime where concentration sharpens with
/// the dimension.
pub fn small_mean_tail_bound(n: usize, t: f64) -> Result<f64> {
    let sqrt_n = (n as f64).sqrt();
    let dev = t * sqrt_n;
    // assemble from the two one-sided weakened bounds at mean = sqrt(n)
    Ok((corollary2_upper(sqrt_n, dev)? + corollary2_lower(sqrt_n, dev)?).min(2.0))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PoissonLimitEntry {
    pub n: usize,
    pub tv: f64,
}

/// Total-variation distances along the cube scaling that produces the
/// Poisson limit.
#[derive(Debug, Clone, Serialize)]
pub struct PoissonLimitReport {
    pub lambda: f64,
    pub entries: Vec<PoissonLimitEntry>,
    pub decreasing: bool,
}

/// For each `n`, scales the unit cube by `r = λ/(n−λ)` so that `Z_K` is
/// Binomial(n, λ/n), and reports its total-variation distance to the
/// (truncated) Poisson(λ); the distances decrease toward the limit.
pub fn poisson_limit_demo(lambda: f64, ns: &[usize]) -> Result<PoissonLimitReport> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::param(format!("lambda must be positive, got {lambda}")));
    }
    let reference = DiscretePMF::truncated_poisson(
        lambda,
        0,
        poisson_support_bound(lambda, POISSON_TRUNCATION_BUDGET),
    )?;
    let mut entries = Vec::with_capacity(ns.len());
    for &n in ns {
        if n as f64 <= lambda {
            return Err(Error::domain(
                "poisson_limit_demo",
                format!("requires n > lambda, got n = {n}, lambda = {lambda}"),
            ));
        }
        let r = lambda / (n as f64 - lambda);
        let profile = intrinsic_volumes(&ConvexBodySpec::scaled_cube(r, n)?);
        let zk = zk_pmf(&profile)?;
        entries.push(PoissonLimitEntry {
            n,
            tv: total_variation(&zk, &reference),
        });
    }
    let decreasing = entries.windows(2).all(|w| w[1].tv < w[0].tv);
    Ok(PoissonLimitReport {
        lambda,
        entries,
        decreasing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::DEFAULT_REL_TOL;

    #[test]
    fn kappa_table_matches_known_ball_volumes() {
        let table = ln_kappa_table(3);
        assert_eq!(table[0], 0.0);
        assert!((table[1].exp() - 2.0).abs() < 1e-15);
        assert!((table[2].exp() - std::f64::consts::PI).abs() < 1e-14);
        assert!((table[3].exp() - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-14);
    }

    #[test]
    fn unit_square_profile() {
        let profile = intrinsic_volumes(&ConvexBodySpec::scaled_cube(1.0, 2).unwrap());
        assert_eq!(profile.volumes, vec![1.0, 2.0, 1.0]);
        assert_eq!(profile.wills, 4.0);
        let zk = zk_pmf(&profile).unwrap();
        assert_eq!(zk.masses(), &[0.25, 0.5, 0.25]);
    }

    #[test]
    fn box_volumes_are_elementary_symmetric_polynomials() {
        let profile = intrinsic_volumes(&ConvexBodySpec::rectangular_box(vec![2.0, 3.0]).unwrap());
        assert_eq!(profile.volumes, vec![1.0, 5.0, 6.0]);
    }

    #[test]
    fn elementary_symmetric_matches_subset_enumeration() {
        // small integer sides keep both computations exact in f64
        for sides in [vec![1.0, 2.0], vec![1.0, 2.0, 3.0, 4.0], vec![2.0, 2.0, 3.0, 5.0, 7.0, 1.0]] {
            let n = sides.len();
            let fast = elementary_symmetric(&sides);
            let mut naive = vec![0.0f64; n + 1];
            for mask in 0u32..(1 << n) {
                let mut product = 1.0;
                for (i, &a) in sides.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        product *= a;
                    }
                }
                naive[mask.count_ones() as usize] += product;
            }
            assert_eq!(fast, naive, "sides {sides:?}");
        }
    }

    #[test]
    fn cube_profile_agrees_with_equal_sided_box() {
        let cube = intrinsic_volumes(&ConvexBodySpec::scaled_cube(0.7, 5).unwrap());
        let boxed = intrinsic_volumes(&ConvexBodySpec::rectangular_box(vec![0.7; 5]).unwrap());
        for (a, b) in cube.volumes.iter().zip(&boxed.volumes) {
            assert!((a - b).abs() <= 1e-13 * b.max(1.0));
        }
    }

    #[test]
    fn ball_profiles_in_low_dimension() {
        use std::f64::consts::PI;
        let disc = intrinsic_volumes(&ConvexBodySpec::ball(1.0, 2).unwrap());
        assert!((disc.volumes[0] - 1.0).abs() < 1e-15);
        assert!((disc.volumes[1] - PI).abs() < 1e-13);
        assert!((disc.volumes[2] - PI).abs() < 1e-13);

        let ball = intrinsic_volumes(&ConvexBodySpec::ball(2.0, 3).unwrap());
        // V_1 = 4R, V_2 = 2πR², V_3 = (4π/3)R³
        assert!((ball.volumes[1] - 8.0).abs() < 1e-12);
        assert!((ball.volumes[2] - 8.0 * PI).abs() < 1e-12);
        assert!((ball.volumes[3] - 32.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn profiles_normalize_and_are_ulc() {
        for body in [
            ConvexBodySpec::scaled_cube(0.2, 12).unwrap(),
            ConvexBodySpec::ball(1.5, 9).unwrap(),
            ConvexBodySpec::rectangular_box(vec![0.5, 4.0, 2.5, 1.0]).unwrap(),
        ] {
            let profile = intrinsic_volumes(&body);
            assert_eq!(profile.volumes[0], 1.0);
            let sum: f64 = profile.normalized.iter().sum();
            assert!((sum - 1.0).abs() <= 1e-12);
            let zk = zk_pmf(&profile).unwrap();
            assert!(zk.is_ultra_log_concave(DEFAULT_REL_TOL), "{body:?}");
        }
    }

    #[test]
    fn cube_zk_mean_and_variance() {
        for (r, n) in [(0.5f64, 8usize), (3.0, 14)] {
            let zk = zk_pmf(&intrinsic_volumes(&ConvexBodySpec::scaled_cube(r, n).unwrap())).unwrap();
            let expected = n as f64 * r / (1.0 + r);
            assert!((zk.mean() - expected).abs() < 1e-11);
            assert!(zk.variance() <= zk.mean() + 1e-12);
            assert!(zk.variance() < n as f64);
        }
    }

    #[test]
    fn zk_pmf_trims_trailing_zero_and_rejects_interior_zero() {
        let trailing = IntrinsicVolumeProfile {
            dim: 2,
            volumes: vec![1.0, 1.0, 0.0],
            wills: 2.0,
            normalized: vec![0.5, 0.5, 0.0],
        };
        let zk = zk_pmf(&trailing).unwrap();
        assert_eq!(zk.len(), 2);

        let interior = IntrinsicVolumeProfile {
            dim: 2,
            volumes: vec![1.0, 0.0, 1.0],
            wills: 2.0,
            normalized: vec![0.5, 0.0, 0.5],
        };
        assert!(matches!(zk_pmf(&interior), Err(Error::InteriorZero { index: 1 })));
    }

    #[test]
    fn box_degeneration_approaches_lower_dimensional_profile() {
        let thin = intrinsic_volumes(
            &ConvexBodySpec::rectangular_box(vec![2.0, 3.0, 1e-9]).unwrap(),
        );
        let flat = intrinsic_volumes(&ConvexBodySpec::rectangular_box(vec![2.0, 3.0]).unwrap());
        let mut padded = flat.volumes.clone();
        padded.push(0.0);
        for (a, b) in thin.volumes.iter().zip(&padded) {
            assert!((a - b).abs() < 1e-7, "{a} vs {b}");
        }
    }

    #[test]
    fn corollary6_at_zero_threshold_holds_trivially() {
        let profile = intrinsic_volumes(&ConvexBodySpec::scaled_cube(1.0, 4).unwrap());
        let report = corollary6_check(&profile, 0.0).unwrap();
        assert_eq!(report.exact, 1.0);
        assert_eq!(report.bound, 2.0);
        assert!(report.holds);
    }

    #[test]
    fn corollary6_on_small_cube_and_ball() {
        let cube = intrinsic_volumes(&ConvexBodySpec::scaled_cube(1.0, 4).unwrap());
        let report = corollary6_check(&cube, 1.0).unwrap();
        assert!(report.holds);
        assert!(report.exact <= 2.0 * (-0.5f64).exp());

        let ball = intrinsic_volumes(&ConvexBodySpec::ball(1.0, 10).unwrap());
        for t in [0.5, 1.0, 2.0] {
            assert!(corollary6_check(&ball, t).unwrap().holds, "t = {t}");
        }
    }

    #[test]
    fn corollary6_rejects_out_of_range_thresholds() {
        let profile = intrinsic_volumes(&ConvexBodySpec::scaled_cube(1.0, 4).unwrap());
        assert!(corollary6_check(&profile, -0.1).is_err());
        assert!(corollary6_check(&profile, 2.1).is_err());
    }

    #[test]
    fn poisson_limit_matches_binomial_halves_at_n_twice_lambda() {
        // lambda = 2, n = 4: r = 1, Z is Binomial(4, 1/2)
        let profile = intrinsic_volumes(&ConvexBodySpec::scaled_cube(1.0, 4).unwrap());
        let zk = zk_pmf(&profile).unwrap();
        let binom = DiscretePMF::binomial(4, 0.5).unwrap();
        for (a, b) in zk.masses().iter().zip(binom.masses()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn poisson_limit_distances_decrease() {
        let report = poisson_limit_demo(1.0, &[2, 10, 100]).unwrap();
        assert!(report.decreasing);
        assert!(report.entries[0].tv > 0.0);
    }

    #[test]
    fn poisson_limit_rejects_small_n() {
        assert!(poisson_limit_demo(2.0, &[2]).is_err());
        assert!(poisson_limit_demo(-1.0, &[5]).is_err());
    }

    #[test]
    fn body_validation_and_json() {
        assert!(ConvexBodySpec::rectangular_box(vec![1.0, 0.0]).is_err());
        assert!(ConvexBodySpec::scaled_cube(-1.0, 3).is_err());
        assert!(ConvexBodySpec::ball(1.0, 0).is_err());

        let body: ConvexBodySpec = serde_json::from_str(r#"{"cube": {"r": 1.5, "n": 3}}"#).unwrap();
        assert_eq!(body, ConvexBodySpec::scaled_cube(1.5, 3).unwrap());
        let body: ConvexBodySpec =
            serde_json::from_str(r#"{"box": {"sides": [1.0, 2.0]}}"#).unwrap();
        assert_eq!(body.dim(), 2);
        assert!(serde_json::from_str::<ConvexBodySpec>(r#"{"ball": {"radius": 0.0, "n": 2}}"#).is_err());
    }

    #[test]
    fn small_mean_bound_decays_with_dimension() {
        let b16 = small_mean_tail_bound(16, 1.0).unwrap();
        let b64 = small_mean_tail_bound(64, 1.0).unwrap();
        assert!(b64 < b16);
    }
}
