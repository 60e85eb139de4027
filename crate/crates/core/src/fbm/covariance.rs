//! Closed-form fBm covariances on the uniform grid `k/n` of `[0, 1]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hurst index and resolution; the horizon is `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FbmGrid {
    pub hurst: f64,
    pub n: usize,
}

impl FbmGrid {
    pub fn new(hurst: f64, n: usize) -> Result<Self> {
        if !(hurst > 0.0 && hurst < 1.0) {
            return Err(Error::Parameter(format!("Hurst index must lie in (0,1), got {hurst}")));
        }
        if n == 0 {
            return Err(Error::Parameter("n must be >= 1".into()));
        }
        Ok(FbmGrid { hurst, n })
    }

    /// `n^{-2H}`, the variance of one increment.
    pub fn increment_variance(&self) -> f64 {
        (self.n as f64).powf(-2.0 * self.hurst)
    }

    /// `Cov(ΔB_j, ΔB_k) = n^{-2H} ρ_H(k - j)` for lags `0..n`.
    pub fn increment_autocovariance(&self) -> Vec<f64> {
        let v = self.increment_variance();
        (0..self.n as i64).map(|r| v * rho(self.hurst, r)).collect()
    }
}

/// Correlation of unit-spaced fBm increments at lag `r`:
/// `ρ_H(r) = ½(|r+1|^{2H} - 2|r|^{2H} + |r-1|^{2H})`.
pub fn rho(hurst: f64, r: i64) -> f64 {
    let h2 = 2.0 * hurst;
    let ra = r.unsigned_abs();
    if ra < SERIES_FROM {
        let r = ra as f64;
        return 0.5 * ((r + 1.0).powf(h2) - 2.0 * r.powf(h2) + (r - 1.0).abs().powf(h2));
    }
    // The second difference cancels badly for large r; expand
    // (1+x)^a + (1-x)^a - 2 = 2 Σ_j C(a,2j) x^{2j} with x = 1/r instead.
    let r = ra as f64;
    let x2 = 1.0 / (r * r);
    let mut coeff = h2 * (h2 - 1.0) / 2.0;
    let mut pow = x2;
    let mut sum = 0.0;
    for j in 1..=8 {
        let term = coeff * pow;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
        let m = 2.0 * j as f64;
        coeff *= (h2 - m) * (h2 - m - 1.0) / ((m + 1.0) * (m + 2.0));
        pow *= x2;
    }
    r.powf(h2) * sum
}

const SERIES_FROM: u64 = 64;

/// `R_H(s, t) = E[B_s B_t] = ½(t^{2H} + s^{2H} - |t-s|^{2H})`.
pub fn cov_rh(hurst: f64, s: f64, t: f64) -> f64 {
    let h2 = 2.0 * hurst;
    0.5 * (t.powf(h2) + s.powf(h2) - (t - s).abs().powf(h2))
}

/// Grid inner products in the Hilbert space of the fBm, with
/// `ε_t = 1_{[0,t]}` and `∂_{k/n} = 1_{(k/n,(k+1)/n]}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridInner {
    /// `⟨ε_t, ∂_{k/n}⟩`.
    EpsDel { t: f64, k: usize },
    /// `α_{k,j} = ⟨ε_{k/n}, ∂_{j/n}⟩`.
    Alpha { k: usize, j: usize },
    /// `β_{k,j} = ⟨∂_{k/n}, ∂_{j/n}⟩ = n^{-2H} ρ_H(k - j)`.
    Beta { k: usize, j: usize },
}

/// `⟨ε_t, ∂_{k/n}⟩ = (2n^{2H})^{-1} [(k+1)^{2H} - k^{2H} - |k+1-nt|^{2H} + |k-nt|^{2H}]`,
/// without range checks.
#[inline]
pub fn eps_del(hurst: f64, n: usize, t: f64, k: usize) -> f64 {
    let h2 = 2.0 * hurst;
    let nf = n as f64;
    let kf = k as f64;
    let nt = nf * t;
    ((kf + 1.0).powf(h2) - kf.powf(h2) - (kf + 1.0 - nt).abs().powf(h2) + (kf - nt).abs().powf(h2))
        / (2.0 * nf.powf(h2))
}

/// `α_{k,k} = (2n^{2H})^{-1} [(k+1)^{2H} - k^{2H} - 1]`.
#[inline]
pub fn alpha_diag(hurst: f64, n: usize, k: usize) -> f64 {
    let h2 = 2.0 * hurst;
    let kf = k as f64;
    ((kf + 1.0).powf(h2) - kf.powf(h2) - 1.0) / (2.0 * (n as f64).powf(h2))
}

pub fn grid_inner(hurst: f64, n: usize, kind: GridInner) -> Result<f64> {
    let check = |name: &str, i: usize| {
        if i >= n {
            Err(Error::IndexRange(format!("{name}={i} not in 0..{n}")))
        } else {
            Ok(())
        }
    };
    match kind {
        GridInner::EpsDel { t, k } => {
            check("k", k)?;
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::IndexRange(format!("t={t} not in [0,1]")));
            }
            Ok(eps_del(hurst, n, t, k))
        }
        GridInner::Alpha { k, j } => {
            check("k", k)?;
            check("j", j)?;
            Ok(eps_del(hurst, n, k as f64 / n as f64, j))
        }
        GridInner::Beta { k, j } => {
            check("k", k)?;
            check("j", j)?;
            Ok((n as f64).powf(-2.0 * hurst) * rho(hurst, k as i64 - j as i64))
        }
    }
}

/// Largest lag summed by [`rho_power_sum`].
pub const SERIES_CAP: u64 = 1 << 27;

/// A truncated lag series over `Z` and the cutoff lag it used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LagSeries {
    pub sum: f64,
    pub cutoff: u64,
}

/// `Σ_{r∈Z} ρ_H(r)^q` (or `|ρ_H(r)|^q` when `absolute`), truncated at the
/// first `R` with tail bound `Σ_{r>R} C^q r^{q(2H-2)} < tol`, where
/// `C = 2|H(2H-1)|` doubles the asymptotic constant of `ρ_H`.
pub fn rho_power_sum(hurst: f64, q: u32, tol: f64, absolute: bool) -> Result<LagSeries> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(Error::Parameter(format!("Hurst index must lie in (0,1), got {hurst}")));
    }
    if q == 0 || !(tol > 0.0) {
        return Err(Error::Parameter("need q >= 1 and tol > 0".into()));
    }
    let p = q as f64 * (2.0 - 2.0 * hurst);
    if p <= 1.0 + 1e-12 {
        return Err(Error::DivergentSeries(format!(
            "sum of rho^q diverges for q={q}, H={hurst} (needs H < 1 - 1/(2q))"
        )));
    }
    let c = 2.0 * (hurst * (2.0 * hurst - 1.0)).abs();
    // Σ_{r>R} r^{-p} ≤ ∫_R^∞ x^{-p} dx = R^{1-p}/(p-1)
    let cq = c.powi(q as i32);
    let cutoff = if cq == 0.0 {
        1.0
    } else {
        (cq / ((p - 1.0) * tol)).powf(1.0 / (p - 1.0)).ceil().max(1.0)
    };
    if cutoff > SERIES_CAP as f64 {
        return Err(Error::Parameter(format!(
            "tolerance {tol} needs {cutoff:.3e} lags, above the cap {SERIES_CAP}"
        )));
    }
    let cutoff = cutoff as u64;
    // Smallest terms first, with compensation.
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for r in (1..=cutoff).rev() {
        let v = rho(hurst, r as i64).powi(q as i32);
        let v = if absolute { v.abs() } else { v };
        let t = sum + v;
        comp += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    Ok(LagSeries {
        sum: 1.0 + 2.0 * (sum + comp),
        cutoff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_examples() {
        for h in [0.1, 0.3, 0.5, 0.8] {
            assert_eq!(rho(h, 0), 1.0);
            assert_eq!(rho(h, 4), rho(h, -4));
        }
        assert_eq!(rho(0.5, 3), 0.0);
        assert!((rho(0.25, 1) - (2f64.sqrt() - 2.0) / 2.0).abs() < 1e-15);
        assert!((rho(0.25, 1) + 0.29289322).abs() < 1e-8);
    }

    #[test]
    fn rho_asymptotics() {
        // ρ_H(r) ~ H(2H-1) r^{2H-2}
        for h in [0.2, 0.4, 0.7] {
            let r = 10_000;
            let ratio = rho(h, r) / (h * (2.0 * h - 1.0) * (r as f64).powf(2.0 * h - 2.0));
            assert!((ratio - 1.0).abs() < 1e-4);
        }
    }

    #[test]
    fn cov_examples() {
        assert!((cov_rh(0.5, 0.3, 0.7) - 0.3).abs() < 1e-15);
        for h in [0.2, 0.5, 0.9] {
            let t: f64 = 0.37;
            assert!((cov_rh(h, t, t) - t.powf(2.0 * h)).abs() < 1e-15);
            assert_eq!(cov_rh(h, 0.2, 0.6), cov_rh(h, 0.6, 0.2));
        }
        assert!((cov_rh(0.25, 0.5, 1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn grid_inner_examples() {
        for (h, n) in [(0.2, 8), (0.45, 64)] {
            assert_eq!(grid_inner(h, n, GridInner::Alpha { k: 0, j: 0 }).unwrap(), 0.0);
            let b = grid_inner(h, n, GridInner::Beta { k: 3, j: 3 }).unwrap();
            assert!((b - (n as f64).powf(-2.0 * h)).abs() < 1e-15);
        }
        let a = grid_inner(0.25, 4, GridInner::Alpha { k: 1, j: 1 }).unwrap();
        assert!((a - (2f64.sqrt() - 2.0) / 4.0).abs() < 1e-15);
        assert!((a + 0.1464466).abs() < 1e-7);
        assert!(grid_inner(0.25, 4, GridInner::Beta { k: 4, j: 0 }).is_err());
        assert!(grid_inner(0.25, 4, GridInner::EpsDel { t: 1.5, k: 0 }).is_err());
    }

    #[test]
    fn inner_products_match_covariance_differences() {
        // ⟨ε_t, ∂_{k/n}⟩ = R(t, (k+1)/n) - R(t, k/n)
        let (h, n) = (0.3, 16);
        for k in 0..n {
            for &t in &[0.0, 0.13, 0.5, 0.97, 1.0] {
                let direct = cov_rh(h, t, (k + 1) as f64 / n as f64) - cov_rh(h, t, k as f64 / n as f64);
                assert!((direct - eps_del(h, n, t, k)).abs() < 1e-14);
            }
            assert!((alpha_diag(h, n, k) - eps_del(h, n, k as f64 / n as f64, k)).abs() < 1e-15);
        }
    }

    #[test]
    fn rho_series_matches_direct_formula_at_switch() {
        for h in [0.1, 0.3, 0.45, 0.7, 0.9] {
            for r in [64i64, 65, 100, 1000] {
                let rf = r as f64;
                let h2 = 2.0 * h;
                let direct = 0.5 * ((rf + 1.0).powf(h2) - 2.0 * rf.powf(h2) + (rf - 1.0).powf(h2));
                let series = rho(h, r);
                assert!((direct - series).abs() <= 1e-12 * rf.powf(h2), "H={h} r={r}");
            }
            // asymptotic H(2H-1) r^{2H-2}
            let r = 1_000_000i64;
            let asym = h * (2.0 * h - 1.0) * (r as f64).powf(2.0 * h - 2.0);
            assert!((rho(h, r) / asym - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn lag_series_brownian_and_divergence() {
        let s = rho_power_sum(0.5, 2, 1e-12, false).unwrap();
        assert_eq!(s.sum, 1.0);
        assert!(matches!(rho_power_sum(0.75, 2, 1e-10, false), Err(Error::DivergentSeries(_))));
        assert!(matches!(rho_power_sum(0.9, 3, 1e-10, false), Err(Error::DivergentSeries(_))));
    }

    #[test]
    fn lag_series_is_stable_under_halving_tol() {
        for (h, q) in [(0.25, 2), (0.3, 2), (0.1, 3), (0.4, 3)] {
            let a = rho_power_sum(h, q, 1e-10, false).unwrap();
            let b = rho_power_sum(h, q, 5e-11, false).unwrap();
            assert!((a.sum - b.sum).abs() <= 1e-10, "H={h} q={q}");
        }
    }
}
