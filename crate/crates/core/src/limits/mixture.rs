//! Sampler for the mixed Gaussian limit `D + σ_{H,q} (∫_0^1 f(B_s)² ds)^{1/2} N`
//! with `N` standard normal independent of the fBm `B`, and an optional
//! drift `D = c ∫_0^1 f^{(q)}(B_s) ds`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fbm::covariance::FbmGrid;
use crate::fbm::sampler::{IncrementSampler, SamplingMethod};
use crate::rng::{stream, StreamTag};
use crate::variations::weight::WeightFunction;

pub const DEFAULT_N_FINE: usize = 4096;
pub const MIN_N_FINE: usize = 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub q: usize,
    pub hurst: f64,
    pub weight: WeightFunction,
    pub n_fine: usize,
    pub sigma: f64,
    /// Coefficient `c` of the drift `c ∫ f^{(q)}(B_s) ds`, if any.
    pub drift_constant: Option<f64>,
}

/// Per-replica output of [`sample_mixture_limit`].
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MixtureSample {
    pub values: Vec<f64>,
    /// `S² = σ² ∫ f(B_s)² ds`.
    pub conditional_variances: Vec<f64>,
    /// Drift `D` (zeros without a drift constant).
    pub drifts: Vec<f64>,
}

/// Left-endpoint Riemann sums `(1/n) Σ_k f(B_{k/n})²` and
/// `(1/n) Σ_k f^{(q)}(B_{k/n})` over `k = 0..n`.
pub fn path_functionals(levels: &[f64], f: &WeightFunction, q: usize) -> (f64, f64) {
    let n = levels.len() - 1;
    let mut d = vec![0.0; q + 1];
    let (mut sq, mut dq) = (0.0, 0.0);
    for &x in &levels[..n] {
        f.fill_derivatives(x, &mut d);
        sq += d[0] * d[0];
        dq += d[q];
    }
    (sq / n as f64, dq / n as f64)
}

/// `m` replicas; replica `i` uses fBm path `(seed, i)` and the normal
/// draw `(seed, i)` on a separate stream.
pub fn sample_mixture_limit(spec: &MixtureSpec, m: usize, seed: u64) -> Result<MixtureSample> {
    if spec.n_fine < MIN_N_FINE {
        return Err(Error::Parameter(format!(
            "n_fine must be >= {MIN_N_FINE}, got {}",
            spec.n_fine
        )));
    }
    spec.weight.validate()?;
    spec.weight.check_order(spec.q)?;
    if m == 0 {
        return Ok(MixtureSample::default());
    }
    let grid = FbmGrid::new(spec.hurst, spec.n_fine)?;
    let sampler = IncrementSampler::new(grid, SamplingMethod::default_for(spec.n_fine))?;
    let sigma_sq = spec.sigma * spec.sigma;
    let rows = sampler.map_paths(seed, m, |i, levels, _| {
        let (int_sq, int_dq) = path_functionals(levels, &spec.weight, spec.q);
        let s2 = sigma_sq * int_sq;
        let drift = spec.drift_constant.map_or(0.0, |c| c * int_dq);
        let z: f64 = stream(seed, StreamTag::MixtureNormal, i as u64).sample(StandardNormal);
        (drift + s2.sqrt() * z, s2, drift)
    });
    Ok(MixtureSample {
        values: rows.iter().map(|r| r.0).collect(),
        conditional_variances: rows.iter().map(|r| r.1).collect(),
        drifts: rows.iter().map(|r| r.2).collect(),
    })
}

/// `count` draws of `S·N` for a fixed conditional variance, using the same
/// normal streams as the mixture sampler.
pub fn conditional_draws(s2: f64, seed: u64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| {
            let z: f64 = stream(seed, StreamTag::MixtureNormal, i as u64).sample(StandardNormal);
            s2.sqrt() * z
        })
        .collect()
}
