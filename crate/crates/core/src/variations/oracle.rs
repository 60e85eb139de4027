//! Cross-check of the pathwise closed form for `δ^p(g(B_a) ∂^{⊗p})` against
//! the symbolic Skorohod integral on the two-dimensional space spanned by
//! `ε_{k/n}` and `∂_{k/n}`.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::fbm::covariance::{alpha_diag, cov_rh};
use crate::gaussian::calculus::{isonormal, skorohod, PolyTensor};
use crate::gaussian::hermite::{binomial, hermite_coefficients};
use crate::gaussian::{GaussianSpace, HilbertVec, PolyRv, Tensor};
use crate::variations::statistic::skorohod_weighted_closed_form;
use crate::variations::weight::WeightFunction;

/// Coefficients of the `r`-th derivative of `Σ c_i x^i`.
pub fn polynomial_derivative(coeffs: &[f64], r: usize) -> Vec<f64> {
    if r >= coeffs.len() {
        return vec![0.0];
    }
    (r..coeffs.len())
        .map(|k| coeffs[k] * ((k - r + 1)..=k).map(|v| v as f64).product::<f64>())
        .collect()
}

/// Discrepancies between the closed form and the symbolic oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleComparison {
    /// Largest coefficient difference of the two polynomials.
    pub symbolic: f64,
    /// Largest pathwise difference over the shared draws.
    pub pathwise: f64,
    /// `|E[oracle]|` by Wick's theorem (zero for a divergence).
    pub expectation: f64,
}

/// Compares at grid point `k` for the polynomial weight `coeffs`, Hermite
/// rank `q` and order shift `r`, over `draws` shared Gaussian draws.
pub fn compare_closed_form<R: Rng>(
    hurst: f64,
    n: usize,
    k: usize,
    q: usize,
    r: usize,
    coeffs: &[f64],
    draws: usize,
    rng: &mut R,
) -> Result<OracleComparison> {
    let a = k as f64 / n as f64;
    let alpha = alpha_diag(hurst, n, k);
    let del_sq = (n as f64).powf(-2.0 * hurst);
    let gram = DMatrix::from_row_slice(2, 2, &[cov_rh(hurst, a, a), alpha, alpha, del_sq]);
    let space = GaussianSpace::new(gram)?;
    let x_level = isonormal(&space, &HilbertVec::basis(2, 0))?;
    let x_del = isonormal(&space, &HilbertVec::basis(2, 1))?;
    let p = q - r;

    let g = x_level.compose(&polynomial_derivative(coeffs, r))?;
    let u = PolyTensor::from_tensor(&g, &Tensor::power(&HilbertVec::basis(2, 1), p)?, &space)?;
    let oracle = skorohod(&u)?;

    // Same closed form, built symbolically.
    let d = del_sq.sqrt();
    let mut symbolic = PolyRv::zero(space.rank());
    for j in 0..=p {
        let gj = x_level.compose(&polynomial_derivative(coeffs, r + j))?;
        // d^{p-j} He_{p-j}(X(∂)/d)
        let he: Vec<f64> = hermite_coefficients(p - j)
            .iter()
            .enumerate()
            .map(|(i, c)| c * d.powi((p - j) as i32 - i as i32))
            .collect();
        let h = x_del.compose(&he)?;
        let term = gj.checked_mul(&h)?.scale(binomial(p, j) * (-alpha).powi(j as i32));
        symbolic = &symbolic + &term;
    }
    let sym_diff = (&symbolic - &oracle).max_abs_coeff();

    let f = WeightFunction::Polynomial {
        coefficients: coeffs.to_vec(),
    };
    let mut pathwise: f64 = 0.0;
    for _ in 0..draws {
        let z: Vec<f64> = (0..space.rank()).map(|_| rng.sample(StandardNormal)).collect();
        let raw = space.raw_values(&z);
        let closed = skorohod_weighted_closed_form(raw[0], raw[1], alpha, d, q, &f, r)?;
        pathwise = pathwise.max((closed - oracle.eval(&z)).abs());
    }
    Ok(OracleComparison {
        symbolic: sym_diff,
        pathwise,
        expectation: oracle.expectation()?.abs(),
    })
}
