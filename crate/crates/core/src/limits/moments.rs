//! Exact second and fourth moments of the quadratic variation
//! `G_n = n^{-1/2} Σ_k He_2(n^H ΔB_{k/n})` and the fourth-moment
//! Berry–Esseen bound for its standardization `F_n = G_n / σ_n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fbm::covariance::{rho, FbmGrid};
use crate::fbm::sampler::{IncrementSampler, SamplingMethod};
use crate::gaussian::hermite::hermite_monic;
use crate::report::TestReport;
use crate::stats::normal_cdf;

pub const MAX_EXACT_N: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chaos2Moments {
    /// `σ_n² = E[G_n²] = (2/n) tr(R²)`, `R_{jk} = ρ_H(j-k)`.
    pub variance: f64,
    /// `E[G_n⁴] = (12 tr(R²)² + 48 tr(R⁴)) / n²`.
    pub fourth_moment: f64,
    /// `E[F_n⁴] = 3 + 12 tr(R⁴) / tr(R²)²`.
    pub normalized_m4: f64,
}

/// `tr(R²)` and `tr(R⁴) = Σ_{i,j} (R²)_{ij}²` for the `n × n` Toeplitz
/// correlation matrix of unit-scaled increments.
///
/// Along each diagonal `j = i + d`, `(R²)_{i,i+d} = Σ_{m=-i}^{n-1-i} ρ(m) ρ(m-d)`
/// is a window of a prefix sum, so the whole computation is `O(n²)`.
pub fn correlation_traces(hurst: f64, n: usize) -> (f64, f64) {
    let rv: Vec<f64> = (0..n).map(|r| rho(hurst, r as i64)).collect();
    let tr2 = n as f64 + 2.0 * (1..n).map(|r| (n - r) as f64 * rv[r] * rv[r]).sum::<f64>();
    if hurst == 0.5 {
        return (tr2, n as f64);
    }
    let at = |m: i64| rv[m.unsigned_abs() as usize];
    let len = 2 * n - 1;
    let mut prefix = vec![0.0; len + 1];
    let mut tr4 = 0.0;
    for d in 0..n {
        // prefix[t] = Σ_{m=-(n-1)}^{-(n-1)+t-1} ρ(m) ρ(m-d), with ρ(m-d) = 0 out of range
        for t in 0..len {
            let m = t as i64 - (n as i64 - 1);
            let md = m - d as i64;
            let v = if md.unsigned_abs() < n as u64 { at(m) * at(md) } else { 0.0 };
            prefix[t + 1] = prefix[t] + v;
        }
        let mut diag = 0.0;
        for i in 0..n - d {
            // m ranges over [-i, n-1-i]
            let lo = n - 1 - i;
            let hi = lo + n;
            let c = prefix[hi] - prefix[lo];
            diag += c * c;
        }
        tr4 += if d == 0 { diag } else { 2.0 * diag };
    }
    (tr2, tr4)
}

pub fn chaos2_fourth_moment_exact(hurst: f64, n: usize) -> Result<Chaos2Moments> {
    FbmGrid::new(hurst, n)?;
    if n > MAX_EXACT_N {
        return Err(Error::Parameter(format!("exact moments support n <= {MAX_EXACT_N}, got {n}")));
    }
    let (tr2, tr4) = correlation_traces(hurst, n);
    let nf = n as f64;
    Ok(Chaos2Moments {
        variance: 2.0 * tr2 / nf,
        fourth_moment: (12.0 * tr2 * tr2 + 48.0 * tr4) / (nf * nf),
        normalized_m4: 3.0 + 12.0 * tr4 / (tr2 * tr2),
    })
}

/// `√((q-1)/(3q)) √|E F⁴ - 3|`.
pub fn fourth_moment_bound(q: usize, m4: f64) -> f64 {
    let qf = q as f64;
    ((qf - 1.0) / (3.0 * qf)).sqrt() * (m4 - 3.0).abs().sqrt()
}

/// `sup_z |F_m(z) - Φ(z)|` for the empirical CDF of `xs`.
pub fn sup_distance_to_normal(xs: &[f64]) -> f64 {
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let p = normal_cdf(x);
            ((i + 1) as f64 / m - p).max(p - i as f64 / m)
        })
        .fold(0.0, f64::max)
}

/// Simulates `F_n` on `m` fBm paths and checks the sup-distance to `Φ`
/// against the fourth-moment bound plus three MC errors, where the MC
/// error is `0.5/√m`, the largest standard deviation of an empirical CDF value.
pub fn berry_esseen_check(hurst: f64, n: usize, m: usize, seed: u64) -> Result<TestReport> {
    if !(hurst > 0.0 && hurst < 0.75) {
        return Err(Error::Parameter(format!("Berry-Esseen check needs 0 < H < 3/4, got {hurst}")));
    }
    if m == 0 {
        return Err(Error::EmptyInput("Berry-Esseen check needs m >= 1"));
    }
    let moments = chaos2_fourth_moment_exact(hurst, n)?;
    let bound = fourth_moment_bound(2, moments.normalized_m4);
    let grid = FbmGrid::new(hurst, n)?;
    let sampler = IncrementSampler::new(grid, SamplingMethod::default_for(n))?;
    let nh = (n as f64).powf(hurst);
    let scale = 1.0 / ((n as f64).sqrt() * moments.variance.sqrt());
    let xs = sampler.map_paths(seed, m, |_, _, inc| {
        inc.iter().map(|&d| hermite_monic(2, nh * d)).sum::<f64>() * scale
    });
    let observed = sup_distance_to_normal(&xs);
    let mc_error = 0.5 / (m as f64).sqrt();
    Ok(TestReport::new("berry_esseen", observed, bound + 3.0 * mc_error)
        .with_sizes([n, m])
        .with_seeds([seed])
        .detail("hurst", hurst)
        .detail("bound", bound)
        .detail("mc_error", mc_error)
        .detail("normalized_m4", moments.normalized_m4))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::calculus::isonormal;
    use crate::gaussian::{GaussianSpace, HilbertVec, PolyRv};
    use nalgebra::DMatrix;

    /// Moments by Wick's theorem on the span of the increments.
    fn wick_moments(hurst: f64, n: usize) -> (f64, f64) {
        let grid = FbmGrid::new(hurst, n).unwrap();
        let acv = grid.increment_autocovariance();
        let gram = DMatrix::from_fn(n, n, |i, j| acv[i.abs_diff(j)]);
        let space = GaussianSpace::new(gram).unwrap();
        let nh = (n as f64).powf(hurst);
        let mut g = PolyRv::zero(space.rank());
        for k in 0..n {
            let y = isonormal(&space, &HilbertVec::basis(n, k)).unwrap().scale(nh);
            let he2 = y.compose(&[-1.0, 0.0, 1.0]).unwrap();
            g = &g + &he2;
        }
        let g = g.scale(1.0 / (n as f64).sqrt());
        let g2 = g.checked_mul(&g).unwrap();
        let g4 = g2.checked_mul(&g2).unwrap();
        (g2.expectation().unwrap(), g4.expectation().unwrap())
    }

    #[test]
    fn brownian_four_increments() {
        let m = chaos2_fourth_moment_exact(0.5, 4).unwrap();
        assert!((m.normalized_m4 - 6.0).abs() < 1e-10);
        assert!((m.variance - 2.0).abs() < 1e-12);
    }

    #[test]
    fn matches_wick_oracle() {
        for h in [0.2, 0.4, 0.5, 0.7] {
            for n in 2..=6 {
                let m = chaos2_fourth_moment_exact(h, n).unwrap();
                let (v, m4) = wick_moments(h, n);
                assert!((m.variance - v).abs() < 1e-9, "H={h} n={n}");
                assert!((m.fourth_moment - m4).abs() < 1e-9, "H={h} n={n}");
            }
        }
    }

    #[test]
    fn general_path_agrees_with_brownian_shortcut() {
        // H slightly off 1/2 uses the O(n²) path and should be close to 3 + 12/n
        let m = chaos2_fourth_moment_exact(0.5 + 1e-9, 64).unwrap();
        assert!((m.normalized_m4 - (3.0 + 12.0 / 64.0)).abs() < 1e-6);
    }

    #[test]
    fn bound_coefficient() {
        assert!((fourth_moment_bound(2, 4.0) - (1.0f64 / 6.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sup_distance_of_quantiles_is_small() {
        let m = 1000;
        let xs: Vec<f64> = (0..m)
            .map(|i| statrs::distribution::ContinuousCDF::inverse_cdf(
                &statrs::distribution::Normal::standard(),
                (i as f64 + 0.5) / m as f64,
            ))
            .collect();
        assert!((sup_distance_to_normal(&xs) - 0.5 / m as f64).abs() < 1e-9);
    }
}
