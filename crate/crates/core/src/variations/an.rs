//! `A_n = n^{2qH-1} q! Σ_{l,j} β_{l,j}^q f(B_{l/n}) f(B_{j/n})
//!      = (q!/n) Σ_r ρ_H(r)^q Σ_l f_l f_{l+|r|}`.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::fbm::covariance::{rho, FbmGrid};
use crate::gaussian::hermite::factorial;
use crate::variations::weight::WeightFunction;

/// Lags with `|ρ_H(r)|^q` below this are dropped.
pub const LAG_CUTOFF: f64 = 1e-14;
/// Above this many lags the autocorrelation is computed by FFT.
const DIRECT_MAX_LAG: usize = 64;

pub struct AnEvaluator {
    n: usize,
    q: usize,
    /// `ρ_H(r)^q`, `r = 0..=cutoff`.
    weights: Vec<f64>,
    fft: Option<(Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>)>,
}

impl AnEvaluator {
    pub fn new(grid: FbmGrid, q: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::Parameter("q must be >= 1".into()));
        }
        let n = grid.n;
        let mut weights = vec![1.0];
        let mut last = 0;
        for r in 1..n {
            let w = rho(grid.hurst, r as i64).powi(q as i32);
            weights.push(w);
            if w.abs() >= LAG_CUTOFF {
                last = r;
            }
        }
        weights.truncate(last + 1);
        let fft = (last > DIRECT_MAX_LAG).then(|| {
            let len = (2 * n).next_power_of_two();
            let mut planner = FftPlanner::new();
            (planner.plan_fft_forward(len), planner.plan_fft_inverse(len))
        });
        Ok(AnEvaluator { n, q, weights, fft })
    }

    /// Number of lags kept beyond the diagonal.
    pub fn cutoff(&self) -> usize {
        self.weights.len() - 1
    }

    /// `A_n` for one path (`levels` has length `n + 1`; the last level is unused).
    pub fn evaluate(&self, levels: &[f64], f: &WeightFunction) -> f64 {
        let n = self.n;
        let fv: Vec<f64> = levels[..n].iter().map(|&x| f.eval(x)).collect();
        let corr = self.autocorrelation(&fv);
        let mut s = corr[0];
        for (r, w) in self.weights.iter().enumerate().skip(1) {
            s += 2.0 * w * corr[r];
        }
        factorial(self.q) * s / n as f64
    }

    /// `c_r = Σ_l f_l f_{l+r}` for `r = 0..=cutoff`.
    fn autocorrelation(&self, fv: &[f64]) -> Vec<f64> {
        let cutoff = self.cutoff();
        match &self.fft {
            None => (0..=cutoff)
                .map(|r| fv.iter().zip(&fv[r..]).map(|(a, b)| a * b).sum())
                .collect(),
            Some((fwd, inv)) => {
                let len = fwd.len();
                let mut buf = vec![Complex::new(0.0, 0.0); len];
                for (b, &x) in buf.iter_mut().zip(fv) {
                    b.re = x;
                }
                fwd.process(&mut buf);
                for b in buf.iter_mut() {
                    *b = Complex::new(b.norm_sqr(), 0.0);
                }
                inv.process(&mut buf);
                buf[..=cutoff].iter().map(|c| c.re / len as f64).collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbm::{sample_paths, SamplingMethod};

    #[test]
    fn brownian_constant_weight_gives_two() {
        let grid = FbmGrid::new(0.5, 128).unwrap();
        let ev = AnEvaluator::new(grid, 2).unwrap();
        let batch = sample_paths(grid, 3, 1, SamplingMethod::Cholesky).unwrap();
        for i in 0..3 {
            let a = ev.evaluate(batch.levels(i), &WeightFunction::constant(1.0));
            assert!((a - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fft_path_matches_double_sum() {
        let (h, q, n) = (0.3, 2, 256);
        let grid = FbmGrid::new(h, n).unwrap();
        let ev = AnEvaluator::new(grid, q).unwrap();
        assert!(ev.fft.is_some());
        let batch = sample_paths(grid, 1, 2, SamplingMethod::Cholesky).unwrap();
        let w = WeightFunction::cosine();
        let lv = batch.levels(0);
        let beta = |l: usize, j: usize| (n as f64).powf(-2.0 * h) * rho(h, l as i64 - j as i64);
        let mut s = 0.0;
        for l in 0..n {
            for j in 0..n {
                s += beta(l, j).powi(q as i32) * w.eval(lv[l]) * w.eval(lv[j]);
            }
        }
        let direct = (n as f64).powf(2.0 * q as f64 * h - 1.0) * 2.0 * s;
        let fast = ev.evaluate(lv, &w);
        assert!((fast - direct).abs() < 1e-10 * direct.abs().max(1.0), "{fast} vs {direct}");
    }

    #[test]
    fn constant_weight_approaches_series() {
        let (h, q) = (0.3, 2);
        let target = crate::variations::sigma_hq(h, q, 1e-12).unwrap().sigma_sq;
        let n = 1 << 14;
        let grid = FbmGrid::new(h, n).unwrap();
        let ev = AnEvaluator::new(grid, q).unwrap();
        let a = ev.evaluate(&vec![0.0; n + 1], &WeightFunction::constant(1.0));
        assert!((a / target - 1.0).abs() <= 0.02, "{a} vs {target}");
    }
}
