//! Finite-dimensional isonormal Gaussian model.
//!
//! A [`GaussianSpace`] is spanned by raw vectors `h_1..h_d` with Gram matrix
//! `G = (⟨h_i, h_j⟩)`. A pivoted Cholesky factor `L` (d×r, `L Lᵀ = G`)
//! expresses every raw vector in an orthonormal basis `e_1..e_r` of the
//! non-degenerate subspace, so that `X(h_i) = Σ_j L_ij Z_j` with `Z` i.i.d.
//! standard normal.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

pub const MAX_DIMENSION: usize = 64;
const SYMMETRY_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;
const PIVOT_TOL: f64 = 1e-12;

/// Coordinates of an element of the space in the raw basis.
#[derive(Debug, Clone, PartialEq)]
pub struct HilbertVec {
    pub coeffs: Vec<f64>,
}

impl HilbertVec {
    pub fn new(coeffs: Vec<f64>) -> Self {
        HilbertVec { coeffs }
    }

    /// The raw basis vector `h_i`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut coeffs = vec![0.0; dim];
        coeffs[i] = 1.0;
        HilbertVec { coeffs }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }
}

#[derive(Debug, Clone)]
pub struct GaussianSpace {
    gram: DMatrix<f64>,
    /// d×r factor with `factor * factorᵀ = gram`.
    factor: DMatrix<f64>,
    /// r×d map with `onb_transform * gram * onb_transformᵀ = I_r`.
    onb_transform: DMatrix<f64>,
}

impl GaussianSpace {
    pub fn new(gram: DMatrix<f64>) -> Result<Self> {
        let d = gram.nrows();
        if d == 0 || d != gram.ncols() {
            return Err(Error::Gram(format!("expected a non-empty square matrix, got {}x{}", d, gram.ncols())));
        }
        if d > MAX_DIMENSION {
            return Err(Error::Gram(format!("dimension {d} exceeds {MAX_DIMENSION}")));
        }
        for i in 0..d {
            for j in 0..i {
                if (gram[(i, j)] - gram[(j, i)]).abs() > SYMMETRY_TOL {
                    return Err(Error::Gram(format!("not symmetric at ({i},{j})")));
                }
            }
        }
        let eig = SymmetricEigen::new(gram.clone());
        let max_ev = eig.eigenvalues.max();
        let min_ev = eig.eigenvalues.min();
        if min_ev < -PSD_TOL * max_ev.abs().max(f64::MIN_POSITIVE) {
            return Err(Error::Gram(format!("negative eigenvalue {min_ev:e}")));
        }
        let factor = pivoted_cholesky(&gram);
        let ltl = factor.transpose() * &factor;
        let onb_transform = ltl
            .try_inverse()
            .ok_or_else(|| Error::Gram("singular reduced factor".into()))?
            * factor.transpose();
        Ok(GaussianSpace {
            gram,
            factor,
            onb_transform,
        })
    }

    pub fn identity(d: usize) -> Result<Self> {
        Self::new(DMatrix::identity(d, d))
    }

    /// Space whose raw basis has the given vectors' Euclidean Gram matrix.
    pub fn from_vectors(vectors: &[Vec<f64>]) -> Result<Self> {
        let d = vectors.len();
        let gram = DMatrix::from_fn(d, d, |i, j| {
            vectors[i].iter().zip(&vectors[j]).map(|(a, b)| a * b).sum()
        });
        Self::new(gram)
    }

    /// Raw dimension `d`.
    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    /// Dimension `r` of the non-degenerate subspace, i.e. the number of
    /// orthonormal coordinates.
    pub fn rank(&self) -> usize {
        self.factor.ncols()
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn factor(&self) -> &DMatrix<f64> {
        &self.factor
    }

    pub fn onb_transform(&self) -> &DMatrix<f64> {
        &self.onb_transform
    }

    fn check(&self, v: &HilbertVec) -> Result<()> {
        if v.dim() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: v.dim(),
            });
        }
        Ok(())
    }

    /// `uᵀ G v`.
    pub fn inner_product(&self, u: &HilbertVec, v: &HilbertVec) -> Result<f64> {
        self.check(u)?;
        self.check(v)?;
        let d = self.dim();
        let mut acc = 0.0;
        for i in 0..d {
            if u.coeffs[i] == 0.0 {
                continue;
            }
            let row: f64 = (0..d).map(|j| self.gram[(i, j)] * v.coeffs[j]).sum();
            acc += u.coeffs[i] * row;
        }
        Ok(acc)
    }

    /// Orthonormal coordinates `Lᵀ v` of a raw vector.
    pub fn orthonormal_coords(&self, v: &HilbertVec) -> Result<Vec<f64>> {
        self.check(v)?;
        let coords = self.factor.transpose() * DVector::from_column_slice(&v.coeffs);
        Ok(coords.iter().copied().collect())
    }

    /// Values `X(h_1..h_d)` of the raw basis for a draw `z` of the
    /// orthonormal coordinates.
    pub fn raw_values(&self, z: &[f64]) -> Vec<f64> {
        let z = DVector::from_column_slice(z);
        (&self.factor * z).iter().copied().collect()
    }
}

/// Cholesky with full diagonal pivoting; returns `L` (d×r) with `L Lᵀ = A`
/// in the original row order, stopping once the remaining pivots fall below
/// a relative tolerance.
fn pivoted_cholesky(a: &DMatrix<f64>) -> DMatrix<f64> {
    let d = a.nrows();
    let max_diag = (0..d).map(|i| a[(i, i)]).fold(0.0f64, f64::max);
    let tol = PIVOT_TOL * max_diag.max(f64::MIN_POSITIVE);
    let mut residual_diag: Vec<f64> = (0..d).map(|i| a[(i, i)]).collect();
    let mut used = vec![false; d];
    let mut cols: Vec<Vec<f64>> = Vec::new();
    loop {
        let pivot = (0..d)
            .filter(|&i| !used[i])
            .max_by(|&i, &j| residual_diag[i].total_cmp(&residual_diag[j]));
        let Some(p) = pivot else { break };
        if residual_diag[p] <= tol {
            break;
        }
        let piv = residual_diag[p].sqrt();
        let mut col = vec![0.0; d];
        for i in 0..d {
            if used[i] || i == p {
                continue;
            }
            let mut s = a[(i, p)];
            for c in &cols {
                s -= c[i] * c[p];
            }
            col[i] = s / piv;
        }
        col[p] = piv;
        used[p] = true;
        for i in 0..d {
            if !used[i] {
                residual_diag[i] -= col[i] * col[i];
            }
        }
        cols.push(col);
    }
    let r = cols.len();
    DMatrix::from_fn(d, r, |i, j| cols[j][i])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(d: usize, i: usize) -> HilbertVec {
        HilbertVec::basis(d, i)
    }

    #[test]
    fn inner_product_examples() {
        let id = GaussianSpace::identity(2).unwrap();
        assert_eq!(id.inner_product(&e(2, 0), &e(2, 0)).unwrap(), 1.0);
        assert_eq!(id.inner_product(&e(2, 0), &e(2, 1)).unwrap(), 0.0);
        let g = GaussianSpace::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0])).unwrap();
        assert_eq!(g.inner_product(&e(2, 0), &e(2, 1)).unwrap(), 0.5);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let id = GaussianSpace::identity(2).unwrap();
        let err = id.inner_product(&e(3, 0), &e(2, 0)).unwrap_err();
        assert!(err.to_string().contains("dimension"));
    }

    #[test]
    fn factor_reproduces_gram_and_transform_whitens() {
        let vs = vec![
            vec![1.0, 0.2, 0.0],
            vec![0.3, 1.0, 0.5],
            vec![1.3, 1.2, 0.5], // sum of the first two: rank deficient
            vec![0.0, 0.1, 2.0],
        ];
        let s = GaussianSpace::from_vectors(&vs).unwrap();
        assert_eq!(s.rank(), 3);
        let rebuilt = s.factor() * s.factor().transpose();
        assert!((rebuilt - s.gram()).abs().max() < 1e-12);
        let whitened = s.onb_transform() * s.gram() * s.onb_transform().transpose();
        assert!((whitened - DMatrix::identity(3, 3)).abs().max() < 1e-10);
    }

    #[test]
    fn rejects_asymmetric_and_indefinite() {
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0]);
        assert!(GaussianSpace::new(asym).is_err());
        let indefinite = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(GaussianSpace::new(indefinite).is_err());
    }
}
