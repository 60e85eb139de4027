//! Per-path weighted Hermite variations, their correction term, and the
//! exact Skorohod decomposition
//! `G_n = δ^q(u_n) + Σ_{r=1}^{q-1} C(q,r) δ^{q-r}(v_n^{(r)}) + R_n`
//! with `u_n = n^{qH-1/2} Σ_k f(B_{k/n}) ∂_{k/n}^{⊗q}`.
//!
//! All formulas are written for monic Hermite polynomials; the scaled
//! normalization divides every component by `q!`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fbm::covariance::{alpha_diag, FbmGrid};
use crate::gaussian::hermite::{binomial, factorial, hermite_monic, Normalization};
use crate::variations::regime::{classify_regime, RegimeSpec};
use crate::variations::weight::WeightFunction;

/// Largest Hermite rank served by the variation statistics.
pub const MAX_Q: usize = 6;

/// `δ^p(g(B_a) ∂^{⊗p})` with `g = f^{(r)}`, `p = q - r`:
/// `Σ_j C(p,j) (-α)^j f^{(r+j)}(B_a) ‖∂‖^{p-j} He_{p-j}(ΔB/‖∂‖)`,
/// where `α = ⟨ε_a, ∂⟩`.
pub fn skorohod_weighted_closed_form(
    level: f64,
    increment: f64,
    alpha: f64,
    del_norm: f64,
    q: usize,
    f: &WeightFunction,
    r: usize,
) -> Result<f64> {
    if r > q {
        return Err(Error::Parameter(format!("need r <= q, got r={r}, q={q}")));
    }
    f.check_order(q)?;
    let mut d = vec![0.0; q + 1];
    f.fill_derivatives(level, &mut d);
    Ok(closed_form_with(&d, increment / del_norm, alpha, del_norm, q - r, r))
}

/// Closed form given precomputed derivatives `d[i] = f^{(i)}(B_a)` and the
/// standardized increment `x = ΔB/‖∂‖`.
#[inline]
fn closed_form_with(d: &[f64], x: f64, alpha: f64, del_norm: f64, p: usize, r: usize) -> f64 {
    let mut s = 0.0;
    let mut neg_alpha_pow = 1.0;
    for j in 0..=p {
        s += binomial(p, j) * neg_alpha_pow * d[r + j] * del_norm.powi((p - j) as i32) * hermite_monic(p - j, x);
        neg_alpha_pow *= -alpha;
    }
    s
}

/// Components of the decomposition of one path's `G_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    /// `δ^q(u_n)`.
    pub main: f64,
    /// `C(q,r) δ^{q-r}(v_n^{(r)})` for `r = 1..q-1`.
    pub middle: Vec<f64>,
    /// `R_n = n^{qH-1/2} Σ_k α_{k,k}^q f^{(q)}(B_{k/n})`.
    pub remainder: f64,
    /// `|G_n - main - Σ middle - remainder|`.
    pub residual: f64,
}

/// Everything computed for one path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathTerms {
    pub g_n: f64,
    pub correction: f64,
    /// `G_n - correction`.
    pub corrected: f64,
    pub renormalized: f64,
    pub decomposition: Option<Decomposition>,
}

/// Precomputed grid quantities for one `(grid, q, f, normalization)`.
#[derive(Debug, Clone)]
pub struct VariationEvaluator {
    pub grid: FbmGrid,
    pub q: usize,
    pub weight: WeightFunction,
    pub normalization: Normalization,
    pub regime: RegimeSpec,
    alpha: Vec<f64>,
}

impl VariationEvaluator {
    pub fn new(grid: FbmGrid, q: usize, weight: WeightFunction, normalization: Normalization) -> Result<Self> {
        if q == 0 || q > MAX_Q {
            return Err(Error::Parameter(format!("q must lie in 1..={MAX_Q}, got {q}")));
        }
        weight.validate()?;
        weight.check_order(q)?;
        let alpha = (0..grid.n).map(|k| alpha_diag(grid.hurst, grid.n, k)).collect();
        Ok(VariationEvaluator {
            grid,
            q,
            weight,
            normalization,
            regime: classify_regime(q, grid.hurst),
            alpha,
        })
    }

    /// `(-1)^q / 2^q` (monic) or `(-1)^q / (2^q q!)` (scaled).
    pub fn correction_constant(&self) -> f64 {
        correction_constant(self.q, self.normalization)
    }

    /// Evaluates one path given its levels (`n + 1`) and increments (`n`).
    pub fn evaluate(&self, levels: &[f64], increments: &[f64], decompose: bool) -> PathTerms {
        let n = self.grid.n;
        let q = self.q;
        let h = self.grid.hurst;
        let nf = n as f64;
        let nh = nf.powf(h);
        let del_norm = 1.0 / nh;
        let norm = self.normalization.factor(q);
        let mut d = vec![0.0; q + 1];

        let mut g = 0.0;
        let mut fq_sum = 0.0;
        let mut main = 0.0;
        let mut middle = vec![0.0; q.saturating_sub(1)];
        let mut remainder = 0.0;
        for k in 0..n {
            self.weight.fill_derivatives(levels[k], &mut d);
            let x = nh * increments[k];
            g += d[0] * hermite_monic(q, x);
            fq_sum += d[q];
            if decompose {
                let a = self.alpha[k];
                main += closed_form_with(&d, x, a, del_norm, q, 0);
                for r in 1..q {
                    middle[r - 1] += a.powi(r as i32) * closed_form_with(&d, x, a, del_norm, q - r, r);
                }
                remainder += a.powi(q as i32) * d[q];
            }
        }
        let g_n = g / nf.sqrt() * norm;
        let correction = self.correction_constant() * nf.powf(-0.5 - q as f64 * h) * fq_sum;
        let decomposition = decompose.then(|| {
            let pre = nf.powf(q as f64 * h - 0.5) * norm;
            let main = pre * main;
            let middle: Vec<f64> = middle
                .iter()
                .enumerate()
                .map(|(i, m)| pre * binomial(q, i + 1) * m)
                .collect();
            let remainder = pre * remainder;
            let residual = (g_n - main - middle.iter().sum::<f64>() - remainder).abs();
            Decomposition {
                main,
                middle,
                remainder,
                residual,
            }
        });
        PathTerms {
            g_n,
            correction,
            corrected: g_n - correction,
            renormalized: self.regime.renormalize(n, g_n),
            decomposition,
        }
    }
}

pub fn correction_constant(q: usize, normalization: Normalization) -> f64 {
    let c = (-0.5f64).powi(q as i32);
    match normalization {
        Normalization::Monic => c,
        Normalization::Scaled => c / factorial(q),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbm::{sample_paths, SamplingMethod};

    fn evaluator(h: f64, n: usize, q: usize, w: WeightFunction, norm: Normalization) -> VariationEvaluator {
        VariationEvaluator::new(FbmGrid::new(h, n).unwrap(), q, w, norm).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        let id = WeightFunction::monomial(1);
        let (b, db, a, dn) = (0.7, -0.3, 0.12, 0.5);
        let v = skorohod_weighted_closed_form(b, db, a, dn, 1, &id, 0).unwrap();
        assert!((v - (b * db - a)).abs() < 1e-15);
        let one = WeightFunction::constant(1.0);
        let v = skorohod_weighted_closed_form(b, db, a, dn, 3, &one, 0).unwrap();
        assert!((v - dn.powi(3) * hermite_monic(3, db / dn)).abs() < 1e-15);
        let cube = WeightFunction::monomial(3);
        let v = skorohod_weighted_closed_form(b, db, 0.0, dn, 2, &cube, 0).unwrap();
        assert!((v - b.powi(3) * dn * dn * hermite_monic(2, db / dn)).abs() < 1e-15);
        assert!(skorohod_weighted_closed_form(b, db, a, dn, 2, &cube, 3).is_err());
    }

    #[test]
    fn correction_constants() {
        assert_eq!(correction_constant(2, Normalization::Monic), 0.25);
        assert_eq!(correction_constant(3, Normalization::Monic), -0.125);
        assert_eq!(correction_constant(2, Normalization::Scaled), 0.125);
    }

    #[test]
    fn correction_of_square_weight() {
        let (h, n) = (0.3, 64);
        let ev = evaluator(h, n, 2, WeightFunction::monomial(2), Normalization::Monic);
        let batch = sample_paths(ev.grid, 2, 1, SamplingMethod::Cholesky).unwrap();
        let t = ev.evaluate(batch.levels(0), batch.increments(0), false);
        let expected = 0.5 * (n as f64).powf(0.5 - 2.0 * h);
        assert!((t.correction - expected).abs() < 1e-12);
        let lin = evaluator(h, n, 2, "poly:1,3".parse().unwrap(), Normalization::Monic);
        assert_eq!(lin.evaluate(batch.levels(1), batch.increments(1), false).correction, 0.0);
    }

    #[test]
    fn zero_increments() {
        let n = 16;
        let grid = FbmGrid::new(0.3, n).unwrap();
        let batch = crate::fbm::FbmPathBatch::from_increments(grid, 0, SamplingMethod::Cholesky, vec![0.0; n]).unwrap();
        let w: WeightFunction = "poly:2,1".parse().unwrap();
        for q in 1..=4 {
            let ev = VariationEvaluator::new(grid, q, w.clone(), Normalization::Monic).unwrap();
            let t = ev.evaluate(batch.levels(0), batch.increments(0), true);
            let expected = hermite_monic(q, 0.0) * 2.0 * n as f64 / (n as f64).sqrt();
            assert!((t.g_n - expected).abs() < 1e-12);
            assert!(t.decomposition.unwrap().residual < 1e-10);
        }
    }

    #[test]
    fn decomposition_residuals() {
        for q in 1..=3 {
            for (h, w) in [(0.3, "poly:0,0,1"), (0.15, "cos:1,1"), (0.45, "expq:0.5")] {
                let ev = evaluator(h, 64, q, w.parse().unwrap(), Normalization::Monic);
                let batch = sample_paths(ev.grid, 4, 7, SamplingMethod::Cholesky).unwrap();
                for i in 0..4 {
                    let t = ev.evaluate(batch.levels(i), batch.increments(i), true);
                    let d = t.decomposition.unwrap();
                    assert!(d.residual <= 1e-8, "q={q} H={h} {w}: {}", d.residual);
                    assert_eq!(d.middle.len(), q - 1);
                }
            }
        }
    }

    #[test]
    fn first_order_decomposition() {
        let ev = evaluator(0.3, 32, 1, WeightFunction::constant(1.0), Normalization::Monic);
        let batch = sample_paths(ev.grid, 1, 3, SamplingMethod::Cholesky).unwrap();
        let t = ev.evaluate(batch.levels(0), batch.increments(0), true);
        let d = t.decomposition.unwrap();
        assert!((d.main - t.g_n).abs() < 1e-12);
        assert_eq!(d.remainder, 0.0);
    }

    #[test]
    fn scaled_is_monic_over_factorial() {
        let w: WeightFunction = "cos:1,1".parse().unwrap();
        let m = evaluator(0.3, 64, 3, w.clone(), Normalization::Monic);
        let s = evaluator(0.3, 64, 3, w, Normalization::Scaled);
        let batch = sample_paths(m.grid, 1, 3, SamplingMethod::Cholesky).unwrap();
        let a = m.evaluate(batch.levels(0), batch.increments(0), true);
        let b = s.evaluate(batch.levels(0), batch.increments(0), true);
        assert!((a.g_n / 6.0 - b.g_n).abs() < 1e-14);
        assert!((a.correction / 6.0 - b.correction).abs() < 1e-14);
        assert!((a.corrected / 6.0 - b.corrected).abs() < 1e-14);
    }
}
