//! Concentration machinery for ultra log-concave (ULC) distributions on the
//! nonnegative integers.
//!
//! A pmf `p` with contiguous support is log-concave if `p(n)² ≥ p(n−1)p(n+1)`
//! for all interior `n`, and ultra log-concave if `n·p(n)² ≥ (n+1)·p(n−1)p(n+1)`,
//! i.e. `n!·p(n)` is log-concave. ULC variables satisfy Poisson-type tail
//! bounds driven by the Bennett function
//! `h(x) = 2((1+x)log(1+x) − x)/x²`, and their variance never exceeds their
//! mean. This crate provides:
//!
//! - [`dist`]: exact finite-support pmf arithmetic (moments, tails, MGF,
//!   convolution), the log-concavity/ULC predicates, and constructors for
//!   binomial, truncated Poisson, and seeded random ULC test families;
//! - [`bounds`]: the Bennett function, the ULC tail bounds and their
//!   sub-Gaussian/sub-exponential weakenings, the `c`-log-concave comparison
//!   bound, a grid-based Chernoff oracle, and the variance-vs-mean check;
//! - [`extremizers`]: the truncated-Poisson family `p(n) ∝ pⁿ/n!` on `[k,l]`
//!   that extremizes the MGF under a mean constraint, the partial exponential
//!   sums `Ψ_{K,L}`, and a numerical harness verifying the MGF-domination
//!   argument (`f(1) = f′(1) = 0`, `f″ ≥ 0`, `Ψ` log-concavity);
//! - [`intrinsic`]: intrinsic-volume profiles of boxes, scaled cubes, and
//!   Euclidean balls, the Wills functional, the induced integer random
//!   variable `Z_K`, and its dimension-free concentration checks.
//!
//! Everything is computed exactly (finite sums, no sampling), in log-domain
//! where overflow is a concern. All types are immutable after construction
//! and all operations are pure, so values can be shared freely across
//! threads.

pub mod bounds;
pub mod dist;
mod error;
pub mod extremizers;
pub mod intrinsic;
mod numeric;

pub use dist::DiscretePMF;
pub use error::{Error, Result};
