//! Numerical laboratory for central limit theorems of multiple Skorohod
//! integrals.
//!
//! * [`gaussian`]: exact Malliavin calculus on a finite-dimensional Gaussian
//!   space (derivative, divergence, multiple integrals, Ornstein-Uhlenbeck
//!   generator, Isserlis expectations).
//! * [`fbm`]: fractional Brownian motion covariances and exact path samplers.
//! * [`variations`]: weighted Hermite variations of fBm, their corrections,
//!   limit constants and the pathwise Skorohod decomposition.
//! * [`limits`]: limit-law samplers and distributional tests (two-sample
//!   Kolmogorov-Smirnov, conditional characteristic functions, exact
//!   fourth-moment quantities).
//! * [`suites`]: seeded verification suites producing [`report::TestReport`]s.

pub mod error;
pub mod fbm;
pub mod gaussian;
pub mod limits;
pub mod report;
pub mod rng;
pub mod stats;
pub mod suites;
pub mod variations;

pub use error::{Error, Result};
