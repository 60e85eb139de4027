//! Limit laws: mixed Gaussian samplers, distributional tests and exact
//! fourth-moment quantities.

pub mod brownian;
pub mod distribution;
pub mod mixture;
pub mod moments;

pub use brownian::{brownian_example_run, condition_a};
pub use distribution::{conditional_cf_test, ks_test, ks_two_sample, KsResult, CF_LAMBDAS, CF_THRESHOLD};
pub use mixture::{sample_mixture_limit, MixtureSample, MixtureSpec, DEFAULT_N_FINE};
pub use moments::{berry_esseen_check, chaos2_fourth_moment_exact, fourth_moment_bound, Chaos2Moments};
