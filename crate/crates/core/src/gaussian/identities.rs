//! Randomized checks of the Malliavin-calculus identities on small spaces.
//!
//! Every check returns an absolute error; callers compare against their
//! tolerance. Expectations are exact (Isserlis), so the errors measure
//! floating-point rounding only.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::Result;
use crate::gaussian::calculus::{
    derivative, derivative_tensor, isometry_norm, multiple_integral, ou_generator, ou_generator_chaos, skorohod,
    skorohod_partial, Basis, PolyTensor,
};
use crate::gaussian::hermite::{binomial, factorial};
use crate::gaussian::poly::{wick_expectation, Monomial, PolyRv};
use crate::gaussian::space::GaussianSpace;
use crate::gaussian::tensor::{canonical_indices, Tensor};
use crate::report::TestReport;
use crate::rng::{stream, StreamTag};

/// Random positive-definite Gram matrix of dimension `d` (random vectors'
/// Euclidean Gram, plus a small ridge).
pub fn random_space<R: Rng>(rng: &mut R, d: usize) -> Result<GaussianSpace> {
    let vs: Vec<Vec<f64>> = (0..d)
        .map(|_| (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
        .collect();
    let mut gram = DMatrix::from_fn(d, d, |i, j| vs[i].iter().zip(&vs[j]).map(|(a, b)| a * b).sum::<f64>());
    for i in 0..d {
        gram[(i, i)] += 0.1;
    }
    // Scale to unit average diagonal to keep coefficients O(1).
    let avg = gram.trace() / d as f64;
    GaussianSpace::new(gram / avg)
}

/// Random polynomial in `nvars` variables with total degree `<= degree`
/// and at most `max_terms` monomials.
pub fn random_poly<R: Rng>(rng: &mut R, nvars: usize, degree: usize, max_terms: usize) -> PolyRv {
    let nterms = rng.random_range(1..=max_terms);
    let terms: Vec<(Monomial, f64)> = (0..nterms)
        .map(|_| {
            let deg = rng.random_range(0..=degree);
            let mut m = vec![0u8; nvars];
            for _ in 0..deg {
                m[rng.random_range(0..nvars)] += 1;
            }
            (m, rng.random_range(-1.0..1.0))
        })
        .collect();
    PolyRv::from_terms(nvars, terms).expect("random polynomial within caps")
}

/// Random symmetric order-`q` tensor-valued functional with polynomial
/// entries of degree `<= degree`, in the orthonormal basis.
pub fn random_symmetric_field<R: Rng>(rng: &mut R, nvars: usize, q: usize, degree: usize) -> Result<PolyTensor> {
    let mut entries = vec![PolyRv::zero(nvars); nvars.pow(q as u32)];
    for idx in canonical_indices(nvars, q) {
        let value = random_poly(rng, nvars, degree, 3);
        let flat = idx.iter().fold(0, |acc, &i| acc * nvars + i);
        entries[flat] = value;
    }
    let u = PolyTensor::new(nvars, q, Basis::Orthonormal, nvars, entries)?;
    Ok(u.symmetrize())
}

/// Random symmetric deterministic tensor over the raw basis.
pub fn random_symmetric_tensor<R: Rng>(rng: &mut R, dim: usize, q: usize) -> Result<Tensor> {
    let mut t = Tensor::symmetric_zeros(dim, q)?;
    for idx in canonical_indices(dim, q) {
        t.set(&idx, rng.random_range(-1.0..1.0));
    }
    Ok(t)
}

/// `|E[F δ^q(u)] - E[⟨D^q F, u⟩]|`.
pub fn duality_error(f: &PolyRv, u: &PolyTensor) -> Result<f64> {
    let lhs = wick_expectation(&f.checked_mul(&skorohod(u)?)?)?;
    let rhs = wick_expectation(&derivative(f, u.order())?.inner(u)?)?;
    Ok((lhs - rhs).abs())
}

/// Largest coefficient of `F δ^q(u) - Σ_r C(q,r) δ^{q-r}(⟨D^r F, u⟩)`.
pub fn product_formula_error(f: &PolyRv, u: &PolyTensor) -> Result<f64> {
    let q = u.order();
    let lhs = f.checked_mul(&skorohod(u)?)?;
    let mut rhs = PolyRv::zero(f.nvars());
    for r in 0..=q {
        let paired = derivative(f, r)?.pair_leading(u)?;
        rhs += &skorohod(&paired)?.scale(binomial(q, r));
    }
    Ok((&lhs - &rhs).max_abs_coeff())
}

/// Largest coefficient of
/// `D^k δ^j(u) - Σ_i C(k,i) C(j,i) i! δ^{j-i}(D^{k-i} u)`, the right side
/// symmetrized over the `k` output slots.
pub fn commutation_error(u: &PolyTensor, k: usize) -> Result<f64> {
    let j = u.order();
    let lhs = derivative(&skorohod(u)?, k)?;
    let mut rhs = PolyTensor::zeros(u.dim(), k, Basis::Orthonormal, u.nvars())?;
    for i in 0..=j.min(k) {
        let term = skorohod_partial(&derivative_tensor(u, k - i)?, j - i)?;
        let w = binomial(k, i) * binomial(j, i) * factorial(i);
        rhs = rhs.add(&term.scale(w));
    }
    Ok(lhs.sub(&rhs.symmetrize()).max_abs_coeff())
}

/// Skorohod covariance by the contraction formula:
/// `E[δ^q(u) δ^q(v)] = Σ_i C(q,i)² i! E⟨D^{q-i}u, D^{q-i}v⟩`, where the
/// derivative slots of each side pair with `q - i` slots of the other.
pub fn skorohod_covariance(u: &PolyTensor, v: &PolyTensor) -> Result<f64> {
    let q = u.order();
    let mut total = 0.0;
    for i in 0..=q {
        let m = q - i;
        // slots: [D (m), A (i), B (m)] for u and [D' (m), A' (i), C' (m)] for v.
        let du = derivative_tensor(u, m)?;
        let dv = derivative_tensor(v, m)?;
        // reorder v to [C', A', D'] so that D↔C', A↔A', B↔D'.
        let perm: Vec<usize> = (m + i..m + i + m).chain(m..m + i).chain(0..m).collect();
        let paired = du.inner(&dv.permute(&perm))?;
        total += binomial(q, i).powi(2) * factorial(i) * wick_expectation(&paired)?;
    }
    Ok(total)
}

pub fn skorohod_covariance_error(u: &PolyTensor, v: &PolyTensor) -> Result<f64> {
    let direct = wick_expectation(&skorohod(u)?.checked_mul(&skorohod(v)?)?)?;
    Ok((direct - skorohod_covariance(u, v)?).abs())
}

/// `|E[I_q(f)²] - q! ‖f̃‖²|`.
pub fn isometry_error(f: &Tensor, space: &GaussianSpace) -> Result<f64> {
    let i = multiple_integral(f, space)?.value;
    let second = wick_expectation(&i.checked_mul(&i)?)?;
    Ok((second - isometry_norm(f, space)?).abs())
}

/// Largest coefficient of `-δ(DF) - (-Σ q J_q F)`.
pub fn generator_error(f: &PolyRv) -> Result<f64> {
    Ok((&ou_generator(f)? - &ou_generator_chaos(f)).max_abs_coeff())
}

/// Names of the checks in [`identity_instance`] order.
pub const IDENTITY_NAMES: [&str; 6] = [
    "duality",
    "product_formula",
    "commutation",
    "skorohod_covariance",
    "isometry",
    "generator",
];

/// Errors of all six identities on one random instance (`d ≤ 4`, `q ≤ 3`,
/// polynomial degree `≤ 5`), drawn from stream `(seed, index)`.
pub fn identity_instance(seed: u64, index: u64) -> Result<[f64; 6]> {
    let mut rng = stream(seed, StreamTag::Identities, index);
    let d = rng.random_range(1..=4);
    let q = rng.random_range(1..=3);
    let space = random_space(&mut rng, d)?;
    let r = space.rank();
    let f = random_poly(&mut rng, r, 5, 4);
    // field entries of degree ≤ 2 keep δ^q(u) within degree 5
    let u = random_symmetric_field(&mut rng, r, q, 2)?;
    let v = random_symmetric_field(&mut rng, r, q, 2)?;
    let k = rng.random_range(1..=2);
    let t = random_symmetric_tensor(&mut rng, d, q)?;
    Ok([
        duality_error(&f, &u)?,
        product_formula_error(&f, &u)?,
        commutation_error(&u, k)?,
        skorohod_covariance_error(&u, &v)?,
        isometry_error(&t, &space)?,
        generator_error(&f)?,
    ])
}

/// Runs `instances` random instances; one report per identity with the
/// largest error as statistic.
pub fn identity_suite(seed: u64, instances: usize, tol: f64) -> Result<Vec<TestReport>> {
    let errors: Vec<[f64; 6]> = (0..instances as u64)
        .into_par_iter()
        .map(|i| identity_instance(seed, i))
        .collect::<Result<_>>()?;
    Ok(IDENTITY_NAMES
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let worst = errors.iter().map(|e| e[j]).fold(0.0, f64::max);
            TestReport::new(*name, worst, tol)
                .with_sizes([instances])
                .with_seeds([seed])
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities_hold_on_a_few_instances() {
        let mut rng = stream(11, StreamTag::Identities, 0);
        for _ in 0..5 {
            let d = rng.random_range(1..=3);
            let space = random_space(&mut rng, d).unwrap();
            let r = space.rank();
            let f = random_poly(&mut rng, r, 4, 4);
            let q = rng.random_range(1..=2);
            let u = random_symmetric_field(&mut rng, r, q, 2).unwrap();
            let v = random_symmetric_field(&mut rng, r, q, 2).unwrap();
            assert!(duality_error(&f, &u).unwrap() < 1e-9);
            assert!(product_formula_error(&f, &u).unwrap() < 1e-9);
            assert!(commutation_error(&u, 2).unwrap() < 1e-9);
            assert!(skorohod_covariance_error(&u, &v).unwrap() < 1e-9);
            let t = random_symmetric_tensor(&mut rng, d, 3).unwrap();
            assert!(isometry_error(&t, &space).unwrap() < 1e-10);
            assert!(generator_error(&f).unwrap() < 1e-9);
        }
    }

    #[test]
    fn covariance_of_first_order_example() {
        // u = Z_1 e_0: δ(u) = Z_0 Z_1 has unit variance.
        let z1 = PolyRv::coord(2, 1);
        let u = PolyTensor::new(2, 1, Basis::Orthonormal, 2, vec![z1, PolyRv::zero(2)]).unwrap();
        assert!((skorohod_covariance(&u, &u).unwrap() - 1.0).abs() < 1e-15);
    }
}
