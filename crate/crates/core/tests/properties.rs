//! Cross-module invariants on randomized inputs, beyond what the acceptance
//! suite pins.

mod common;

use proptest::prelude::*;

use ulc_core::bounds::{johnson_bound, theorem1_upper};
use ulc_core::dist::{random_ulc, DiscretePMF, DEFAULT_REL_TOL};
use ulc_core::extremizers::default_t_grid;
use ulc_core::intrinsic::{
    corollary6_check, intrinsic_volumes, small_mean_tail_bound, zk_pmf, ConvexBodySpec,
};

proptest! {
    /// The ULC inequality is pointwise stronger than plain log-concavity.
    #[test]
    fn ulc_implies_log_concave(seed in any::<u64>(), max_support in 2usize..50) {
        let pmf = random_ulc(seed, max_support);
        prop_assert!(pmf.is_ultra_log_concave(DEFAULT_REL_TOL));
        prop_assert!(pmf.is_log_concave(DEFAULT_REL_TOL));
    }

    /// Sums of independent ULC variables stay ULC.
    #[test]
    fn convolution_preserves_ulc(seed_a in any::<u64>(), seed_b in any::<u64>()) {
        let a = random_ulc(seed_a, 30);
        let b = random_ulc(seed_b, 30);
        let sum = a.convolve(&b);
        prop_assert!(sum.is_ultra_log_concave(DEFAULT_REL_TOL));
        prop_assert!((sum.mean() - a.mean() - b.mean()).abs() < 1e-9);
    }

    /// The Poisson MGF bound holds for arbitrary ULC pmfs, not just the
    /// extremizer family: ln E[e^{tX}] ≤ E[X](e^t − 1).
    #[test]
    fn mgf_dominated_by_poisson_bound(seed in any::<u64>(), max_support in 1usize..40) {
        let pmf = random_ulc(seed, max_support);
        let mu = pmf.mean();
        for &t in &default_t_grid() {
            prop_assert!(
                pmf.log_mgf(t) - mu * t.exp_m1() <= 1e-10,
                "seed {} t {}", seed, t
            );
        }
    }

    /// At threshold 0 the two tails cover the whole space.
    #[test]
    fn tails_cover_space_at_zero(seed in any::<u64>()) {
        let pmf = random_ulc(seed, 25);
        prop_assert!(pmf.upper_tail(0.0) + pmf.lower_tail(0.0) >= 1.0 - 1e-12);
    }

    /// JSON round-trips re-validate and preserve values to rounding.
    #[test]
    fn pmf_json_round_trip(seed in any::<u64>()) {
        let pmf = random_ulc(seed, 20);
        let json = serde_json::to_string(&pmf).unwrap();
        let back: DiscretePMF = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back.offset(), pmf.offset());
        prop_assert_eq!(back.len(), pmf.len());
        for (a, b) in back.masses().iter().zip(pmf.masses()) {
            prop_assert!((a - b).abs() <= 4.0 * f64::EPSILON * b);
        }
    }
}

#[test]
fn johnson_bound_brackets_theorem1_for_truncated_poisson() {
    for (lambda, l) in [(1.0, 25usize), (4.0, 40)] {
        let pmf = DiscretePMF::truncated_poisson(lambda, 0, l).unwrap();
        let mu = pmf.mean();
        for i in 1..=20 {
            let t = 0.25 * mu * i as f64;
            let main = theorem1_upper(mu, t).unwrap();
            assert!((johnson_bound(1.0 / mu, t).unwrap() - main).abs() <= 1e-12);
            for frac in [0.2, 0.6, 0.95] {
                assert!(johnson_bound(frac / mu, t).unwrap() >= main - 1e-15);
            }
        }
    }
}

/// Bodies whose central intrinsic volume is at most √n enjoy the
/// dimension-dependent bound 2e^{−(t²/(2(t+1)))√n} on both tails.
#[test]
fn small_mean_regime_concentrates_with_dimension() {
    for n in [9usize, 16, 25, 36] {
        let sqrt_n = (n as f64).sqrt();
        // r/(1+r) = 1/(2√n) keeps the mean at √n/2 ≤ √n
        let ratio: f64 = 1.0 / (2.0 * sqrt_n);
        let r = ratio / (1.0 - ratio);
        let profile = intrinsic_volumes(&ConvexBodySpec::scaled_cube(r, n).unwrap());
        let zk = zk_pmf(&profile).unwrap();
        assert!(zk.mean() <= sqrt_n);
        for t in [0.5f64, 1.0, 2.0] {
            let t = t.min(sqrt_n);
            let deviation = t * sqrt_n;
            let exact = (zk.upper_tail(deviation) + zk.lower_tail(deviation)).min(1.0);
            let bound = 2.0 * (-t * t / (2.0 * (t + 1.0)) * sqrt_n).exp();
            assert!(exact <= bound, "n={n} t={t}: {exact} > {bound}");
            assert!(small_mean_tail_bound(n, t).unwrap() <= bound + 1e-15);
        }
    }
}

/// The dimension-free bound still holds alongside the small-mean one.
#[test]
fn corollary6_holds_in_the_small_mean_regime() {
    let profile = intrinsic_volumes(&ConvexBodySpec::scaled_cube(0.05, 25).unwrap());
    for t in [0.25, 1.0, 3.0] {
        assert!(corollary6_check(&profile, t).unwrap().holds);
    }
}

/// Box profiles match the Steiner-polynomial oracle in dimensions 1-3.
#[test]
fn box_profiles_match_steiner_oracle() {
    let cases: &[&[f64]] = &[
        &[2.0],
        &[1.0, 3.0],
        &[0.5, 2.0],
        &[1.0, 2.0, 3.0],
        &[0.4, 0.4, 5.0],
    ];
    for &sides in cases {
        let n = sides.len();
        let profile = intrinsic_volumes(&ConvexBodySpec::rectangular_box(sides.to_vec()).unwrap());
        let oracle =
            common::steiner_intrinsic_volumes(n, |t| common::box_minkowski_volume(sides, t));
        for (computed, expected) in profile.volumes.iter().zip(&oracle) {
            assert!(
                (computed - expected).abs() <= 1e-10 * expected.max(1.0),
                "sides {sides:?}: {computed} vs {expected}"
            );
        }
    }
}

/// The oracle itself is exercised against a case solvable by hand:
/// the unit square has V = (1, 2, 1).
#[test]
fn steiner_oracle_self_check() {
    let oracle = common::steiner_intrinsic_volumes(2, |t| common::box_minkowski_volume(&[1.0, 1.0], t));
    assert!((oracle[0] - 1.0).abs() < 1e-12);
    assert!((oracle[1] - 2.0).abs() < 1e-12);
    assert!((oracle[2] - 1.0).abs() < 1e-12);
}
