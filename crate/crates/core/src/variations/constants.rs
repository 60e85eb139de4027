//! The variance constant `σ²_{H,q} = q! Σ_{r∈Z} ρ_H(r)^q`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fbm::covariance::rho_power_sum;
use crate::gaussian::hermite::factorial;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaHq {
    pub sigma: f64,
    pub sigma_sq: f64,
    /// Last lag included in the series.
    pub cutoff: u64,
}

/// `σ_{H,q}` with the lag series truncated once its tail bound is below
/// `tol`. Errors on a divergent series and on a non-positive result.
pub fn sigma_hq(hurst: f64, q: usize, tol: f64) -> Result<SigmaHq> {
    let s = rho_power_sum(hurst, q as u32, tol, false)?;
    let sigma_sq = factorial(q) * s.sum;
    if !(sigma_sq > 0.0) {
        return Err(Error::Parameter(format!(
            "variance constant is not positive for H={hurst}, q={q}: {sigma_sq}"
        )));
    }
    Ok(SigmaHq {
        sigma: sigma_sq.sqrt(),
        sigma_sq,
        cutoff: s.cutoff,
    })
}

/// Limit constant of `G_n / √(ln n)` at `H = 1 - 1/(2q)`:
/// `√(2/q!) (1-1/(2q))^{q/2} (1-1/q)^{q/2}`.
pub fn critical_upper_constant(q: usize) -> f64 {
    let qf = q as f64;
    (2.0 / factorial(q)).sqrt() * (1.0 - 1.0 / (2.0 * qf)).powf(qf / 2.0) * (1.0 - 1.0 / qf).powf(qf / 2.0)
}
