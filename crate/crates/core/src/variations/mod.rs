//! Weighted Hermite variations of fBm and their limit constants.

pub mod an;
pub mod constants;
pub mod oracle;
pub mod regime;
pub mod result;
pub mod statistic;
pub mod weight;

pub use an::AnEvaluator;
pub use constants::{critical_upper_constant, sigma_hq, SigmaHq};
pub use regime::{classify_regime, RegimeLabel, RegimeSpec};
pub use result::{
    a_n_statistic, correction_term, decompose_gn, run_variation, weighted_variation, Moments, VariationResult,
    VariationRun, VariationSummary,
};
pub use statistic::{
    correction_constant, skorohod_weighted_closed_form, Decomposition, PathTerms, VariationEvaluator, MAX_Q,
};
pub use weight::WeightFunction;
