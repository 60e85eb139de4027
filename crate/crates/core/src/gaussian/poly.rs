//! Polynomials in the orthonormal Gaussian coordinates `Z_1..Z_r`.

use std::collections::BTreeMap;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::gaussian::hermite::double_factorial;

pub const MAX_DEGREE: usize = 40;
/// Coefficients below this magnitude are dropped.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// Exponent vector over the orthonormal coordinates.
pub type Monomial = Vec<u8>;

/// A smooth cylindrical random variable: a polynomial in the orthonormal
/// coordinates of a [`GaussianSpace`](super::GaussianSpace).
#[derive(Debug, Clone, PartialEq)]
pub struct PolyRv {
    nvars: usize,
    terms: BTreeMap<Monomial, f64>,
    degree: usize,
}

fn total_degree(m: &Monomial) -> usize {
    m.iter().map(|&e| e as usize).sum()
}

impl PolyRv {
    pub fn zero(nvars: usize) -> Self {
        PolyRv {
            nvars,
            terms: BTreeMap::new(),
            degree: 0,
        }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p.finish()
    }

    /// The coordinate `Z_i`.
    pub fn coord(nvars: usize, i: usize) -> Self {
        let mut m = vec![0; nvars];
        m[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(m, 1.0);
        p.finish()
    }

    /// `Σ c_i Z_i`, i.e. `X(h)` for `h` with orthonormal coordinates `c`.
    pub fn linear(coeffs: &[f64]) -> Self {
        let nvars = coeffs.len();
        let mut p = Self::zero(nvars);
        for (i, &c) in coeffs.iter().enumerate() {
            let mut m = vec![0; nvars];
            m[i] = 1;
            p.add_term(m, c);
        }
        p.finish()
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs; repeated
    /// monomials are summed.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, f64)>) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            if m.len() != nvars {
                return Err(Error::Dimension {
                    expected: nvars,
                    got: m.len(),
                });
            }
            p.add_term(m, c);
        }
        let p = p.finish();
        if p.degree > MAX_DEGREE {
            return Err(Error::DegreeCap {
                degree: p.degree,
                cap: MAX_DEGREE,
            });
        }
        Ok(p)
    }

    fn add_term(&mut self, m: Monomial, c: f64) {
        *self.terms.entry(m).or_insert(0.0) += c;
    }

    /// Prunes tiny coefficients and refreshes the cached degree.
    fn finish(mut self) -> Self {
        self.terms.retain(|_, c| c.abs() >= PRUNE_THRESHOLD);
        self.degree = self.terms.keys().map(total_degree).max().unwrap_or(0);
        self
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coefficient(&self, m: &[u8]) -> f64 {
        self.terms.get(m).copied().unwrap_or(0.0)
    }

    /// Largest coefficient magnitude; 0 for the zero polynomial.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |acc, c| acc.max(c.abs()))
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut p = self.clone();
        for c in p.terms.values_mut() {
            *c *= s;
        }
        p.finish()
    }

    fn assert_compatible(&self, other: &Self) {
        assert_eq!(self.nvars, other.nvars, "polynomials over different spaces");
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.assert_compatible(other);
        let degree = self.degree + other.degree;
        if degree > MAX_DEGREE && !self.is_zero() && !other.is_zero() {
            return Err(Error::DegreeCap {
                degree,
                cap: MAX_DEGREE,
            });
        }
        let mut p = Self::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                p.add_term(m, ca * cb);
            }
        }
        Ok(p.finish())
    }

    pub fn pow(&self, k: usize) -> Result<Self> {
        let mut acc = Self::constant(self.nvars, 1.0);
        for _ in 0..k {
            acc = acc.checked_mul(self)?;
        }
        Ok(acc)
    }

    /// `g(self)` for the univariate polynomial `g(x) = Σ coeffs[i] x^i`.
    pub fn compose(&self, coeffs: &[f64]) -> Result<Self> {
        // Horner
        let mut acc = Self::zero(self.nvars);
        for &c in coeffs.iter().rev() {
            acc = acc.checked_mul(self)?;
            acc = &acc + &Self::constant(self.nvars, c);
        }
        Ok(acc)
    }

    /// Multiplication by the coordinate `Z_i`.
    pub fn mul_coord(&self, i: usize) -> Self {
        let mut p = Self::zero(self.nvars);
        for (m, &c) in &self.terms {
            let mut m = m.clone();
            m[i] += 1;
            p.add_term(m, c);
        }
        p.finish()
    }

    /// Partial derivative `∂/∂z_i`.
    pub fn partial(&self, i: usize) -> Self {
        let mut p = Self::zero(self.nvars);
        for (m, &c) in &self.terms {
            let e = m[i];
            if e == 0 {
                continue;
            }
            let mut m = m.clone();
            m[i] = e - 1;
            p.add_term(m, c * e as f64);
        }
        p.finish()
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        assert_eq!(z.len(), self.nvars);
        self.terms
            .iter()
            .map(|(m, c)| {
                c * m
                    .iter()
                    .zip(z)
                    .map(|(&e, &x)| x.powi(e as i32))
                    .product::<f64>()
            })
            .sum()
    }

    /// Exact expectation under i.i.d. standard normal coordinates, by
    /// Isserlis pairings: `E[Z^{2m}] = (2m-1)!!`, odd moments vanish.
    pub fn expectation(&self) -> Result<f64> {
        if self.degree > MAX_DEGREE {
            return Err(Error::DegreeCap {
                degree: self.degree,
                cap: MAX_DEGREE,
            });
        }
        let mut acc = 0.0;
        for (m, &c) in &self.terms {
            if m.iter().any(|e| e % 2 == 1) {
                continue;
            }
            let moment: f64 = m.iter().map(|&e| double_factorial(e as i64 - 1)).product();
            acc += c * moment;
        }
        Ok(acc)
    }
}

/// Exact expectation of a polynomial under the joint Gaussian law.
pub fn wick_expectation(f: &PolyRv) -> Result<f64> {
    f.expectation()
}

impl Add for &PolyRv {
    type Output = PolyRv;

    fn add(self, rhs: &PolyRv) -> PolyRv {
        self.assert_compatible(rhs);
        let mut p = self.clone();
        for (m, &c) in &rhs.terms {
            p.add_term(m.clone(), c);
        }
        p.finish()
    }
}

impl Sub for &PolyRv {
    type Output = PolyRv;

    fn sub(self, rhs: &PolyRv) -> PolyRv {
        self + &(-rhs)
    }
}

impl Neg for &PolyRv {
    type Output = PolyRv;

    fn neg(self) -> PolyRv {
        let mut p = self.clone();
        for c in p.terms.values_mut() {
            *c = -*c;
        }
        p
    }
}

impl Mul<f64> for &PolyRv {
    type Output = PolyRv;

    fn mul(self, s: f64) -> PolyRv {
        self.scale(s)
    }
}

impl AddAssign<&PolyRv> for PolyRv {
    fn add_assign(&mut self, rhs: &PolyRv) {
        *self = &*self + rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_moments() {
        let z = PolyRv::coord(1, 0);
        assert_eq!(z.pow(4).unwrap().expectation().unwrap(), 3.0);
        assert_eq!(z.pow(6).unwrap().expectation().unwrap(), 15.0);
        assert_eq!(z.pow(5).unwrap().expectation().unwrap(), 0.0);
    }

    #[test]
    fn correlated_fourth_moment() {
        // X = Z1, Y = rho Z1 + sqrt(1-rho^2) Z2, so E[X^2 Y^2] = 1 + 2 rho^2.
        let rho: f64 = 0.35;
        let x = PolyRv::linear(&[1.0, 0.0]);
        let y = PolyRv::linear(&[rho, (1.0 - rho * rho).sqrt()]);
        let f = x.pow(2).unwrap().checked_mul(&y.pow(2).unwrap()).unwrap();
        assert!((wick_expectation(&f).unwrap() - (1.0 + 2.0 * rho * rho)).abs() < 1e-14);
    }

    #[test]
    fn degree_cap() {
        let z = PolyRv::coord(1, 0);
        let z40 = z.pow(40).unwrap();
        assert!(z40.expectation().is_ok());
        let err = z40.checked_mul(&z).unwrap_err();
        assert!(err.to_string().contains("degree cap"));
    }

    #[test]
    fn pruning_and_degree_cache() {
        let a = PolyRv::linear(&[1.0, 2.0]);
        let b = PolyRv::linear(&[1.0, 2.0 + 1e-16]);
        let diff = &a - &b;
        assert!(diff.is_zero());
        assert_eq!(diff.degree(), 0);
        assert_eq!(a.pow(3).unwrap().degree(), 3);
    }

    #[test]
    fn partial_and_eval() {
        // F = Z0^2 Z1 + 3
        let f = PolyRv::from_terms(2, [(vec![2, 1], 1.0), (vec![0, 0], 3.0)]).unwrap();
        assert_eq!(f.eval(&[2.0, -1.0]), -1.0);
        let d0 = f.partial(0);
        assert_eq!(d0.eval(&[2.0, -1.0]), -4.0);
        let composed = PolyRv::coord(2, 1).compose(&[1.0, 0.0, 2.0]).unwrap();
        assert_eq!(composed.eval(&[0.0, 3.0]), 19.0);
    }
}
