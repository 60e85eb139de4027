//! Malliavin derivative, divergence, multiple integrals and the
//! Ornstein-Uhlenbeck generator on polynomial functionals.
//!
//! Tensor-valued functionals are [`PolyTensor`]s: dense arrays of
//! [`PolyRv`] entries indexed by orthonormal-basis multi-indices. In
//! `D^k u` the `k` new derivative slots come first, followed by the slots of
//! `u`; divergences act on the last slots.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::gaussian::hermite::{factorial, hermite_coefficients, monomial_to_hermite};
use crate::gaussian::poly::{Monomial, PolyRv};
use crate::gaussian::space::{GaussianSpace, HilbertVec};
use crate::gaussian::tensor::{dense_len, flat_index, permutations, unflatten, Tensor, MAX_ORDER};

/// Basis in which the slots of a [`PolyTensor`] are expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Orthonormal,
    Raw,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyTensor {
    dim: usize,
    order: usize,
    basis: Basis,
    nvars: usize,
    entries: Vec<PolyRv>,
}

impl PolyTensor {
    pub fn new(dim: usize, order: usize, basis: Basis, nvars: usize, entries: Vec<PolyRv>) -> Result<Self> {
        let len = dense_len(dim, order)?;
        if entries.len() != len {
            return Err(Error::Dimension {
                expected: len,
                got: entries.len(),
            });
        }
        if entries.iter().any(|e| e.nvars() != nvars) {
            return Err(Error::SpaceMismatch);
        }
        Ok(PolyTensor {
            dim,
            order,
            basis,
            nvars,
            entries,
        })
    }

    pub fn zeros(dim: usize, order: usize, basis: Basis, nvars: usize) -> Result<Self> {
        let len = dense_len(dim, order)?;
        Self::new(dim, order, basis, nvars, vec![PolyRv::zero(nvars); len])
    }

    /// Order-0 tensor holding `f`.
    pub fn scalar(f: PolyRv) -> Self {
        PolyTensor {
            dim: 0,
            order: 0,
            basis: Basis::Orthonormal,
            nvars: f.nvars(),
            entries: vec![f],
        }
    }

    /// `F · t` for a deterministic tensor `t`, expressed in the orthonormal
    /// basis of `space`.
    pub fn from_tensor(f: &PolyRv, t: &Tensor, space: &GaussianSpace) -> Result<Self> {
        if f.nvars() != space.rank() {
            return Err(Error::SpaceMismatch);
        }
        let coeffs = t.to_orthonormal(space)?;
        let entries = coeffs.iter().map(|&c| f.scale(c)).collect();
        Self::new(space.rank(), t.order(), Basis::Orthonormal, space.rank(), entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn entries(&self) -> &[PolyRv] {
        &self.entries
    }

    pub fn get(&self, idx: &[usize]) -> &PolyRv {
        &self.entries[flat_index(self.dim, idx)]
    }

    /// The single entry of an order-0 tensor.
    pub fn into_scalar(self) -> PolyRv {
        assert_eq!(self.order, 0);
        self.entries.into_iter().next().expect("order-0 tensor has one entry")
    }

    /// Rewrites a raw-basis tensor in the orthonormal basis of `space`.
    pub fn to_orthonormal(&self, space: &GaussianSpace) -> Result<Self> {
        if self.basis == Basis::Orthonormal {
            return Ok(self.clone());
        }
        if self.dim != space.dim() || self.nvars != space.rank() {
            return Err(Error::SpaceMismatch);
        }
        let factor = space.factor();
        let mut cur = self.entries.clone();
        let mut dims = vec![space.dim(); self.order];
        for slot in 0..self.order {
            let outer: usize = dims[..slot].iter().product();
            let inner: usize = dims[slot + 1..].iter().product();
            let (old_d, new_d) = (space.dim(), space.rank());
            let mut next = vec![PolyRv::zero(self.nvars); outer * new_d * inner];
            for a in 0..outer {
                for i in 0..old_d {
                    for j in 0..new_d {
                        let w = factor[(i, j)];
                        if w == 0.0 {
                            continue;
                        }
                        for b in 0..inner {
                            let src = &cur[(a * old_d + i) * inner + b];
                            if src.is_zero() {
                                continue;
                            }
                            let dst = &mut next[(a * new_d + j) * inner + b];
                            *dst += &src.scale(w);
                        }
                    }
                }
            }
            cur = next;
            dims[slot] = new_d;
        }
        Self::new(space.rank(), self.order, Basis::Orthonormal, self.nvars, cur)
    }

    /// Slot permutation: slot `t` of the result is slot `perm[t]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.order);
        let mut entries = vec![PolyRv::zero(self.nvars); self.entries.len()];
        let mut idx = vec![0; self.order];
        let mut src = vec![0; self.order];
        for (flat, slot) in entries.iter_mut().enumerate() {
            unflatten(self.dim, self.order, flat, &mut idx);
            for (t, &p) in perm.iter().enumerate() {
                src[p] = idx[t];
            }
            *slot = self.get(&src).clone();
        }
        PolyTensor {
            entries,
            ..self.clone()
        }
    }

    pub fn symmetrize(&self) -> Self {
        if self.order < 2 {
            return self.clone();
        }
        let perms = permutations(self.order);
        let mut acc = PolyTensor {
            entries: vec![PolyRv::zero(self.nvars); self.entries.len()],
            ..self.clone()
        };
        for p in &perms {
            acc = acc.add(&self.permute(p));
        }
        acc.scale(1.0 / perms.len() as f64)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.dim, self.order), (other.dim, other.order));
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        PolyTensor {
            entries,
            ..self.clone()
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        PolyTensor {
            entries: self.entries.iter().map(|e| e.scale(s)).collect(),
            ..self.clone()
        }
    }

    /// Largest coefficient magnitude over all entries.
    pub fn max_abs_coeff(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.max_abs_coeff()))
    }

    /// `⟨a, b⟩` over all slots.
    pub fn inner(&self, other: &Self) -> Result<PolyRv> {
        if (self.dim, self.order) != (other.dim, other.order) {
            return Err(Error::SpaceMismatch);
        }
        let mut acc = PolyRv::zero(self.nvars);
        for (a, b) in self.entries.iter().zip(&other.entries) {
            if a.is_zero() || b.is_zero() {
                continue;
            }
            acc += &a.checked_mul(b)?;
        }
        Ok(acc)
    }

    /// Pairs `self` (order `r`) with the first `r` slots of `other`,
    /// leaving the remaining slots of `other`.
    pub fn pair_leading(&self, other: &Self) -> Result<Self> {
        if self.order > other.order || (self.order > 0 && self.dim != other.dim) {
            return Err(Error::SpaceMismatch);
        }
        let s_len = self.entries.len();
        let rest = other.entries.len() / s_len;
        let mut entries = vec![PolyRv::zero(self.nvars); rest];
        for (s, a) in self.entries.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (b, slot) in entries.iter_mut().enumerate() {
                let y = &other.entries[s * rest + b];
                if !y.is_zero() {
                    *slot += &a.checked_mul(y)?;
                }
            }
        }
        Ok(PolyTensor {
            dim: other.dim,
            order: other.order - self.order,
            basis: other.basis,
            nvars: self.nvars,
            entries,
        })
    }
}

/// `X(h)` as a polynomial in the orthonormal coordinates.
pub fn isonormal(space: &GaussianSpace, h: &HilbertVec) -> Result<PolyRv> {
    Ok(PolyRv::linear(&space.orthonormal_coords(h)?))
}

/// `D^k F`: the order-`k` tensor of partial derivatives in the
/// orthonormal coordinates. `D^0 F = F`.
pub fn derivative(f: &PolyRv, k: usize) -> Result<PolyTensor> {
    derivative_tensor(&PolyTensor::scalar(f.clone()), k)
}

/// `D^k u` for a tensor-valued functional; derivative slots come first.
pub fn derivative_tensor(u: &PolyTensor, k: usize) -> Result<PolyTensor> {
    if u.basis != Basis::Orthonormal {
        return Err(Error::NotOrthonormal);
    }
    let r = u.nvars;
    let mut cur = u.clone();
    for _ in 0..k {
        let len = dense_len(r, cur.order + 1)?;
        let mut entries = Vec::with_capacity(len);
        for i in 0..r {
            entries.extend(cur.entries.iter().map(|e| e.partial(i)));
        }
        cur = PolyTensor {
            dim: r,
            order: cur.order + 1,
            basis: Basis::Orthonormal,
            nvars: r,
            entries,
        };
    }
    Ok(cur)
}

fn check_divergence_input(u: &PolyTensor) -> Result<()> {
    if u.basis != Basis::Orthonormal {
        return Err(Error::NotOrthonormal);
    }
    if u.order > 0 && u.dim != u.nvars {
        return Err(Error::SpaceMismatch);
    }
    Ok(())
}

/// One divergence on the last slot: `δ(Σ F_i e_i) = Σ (F_i Z_i - ∂_i F_i)`.
fn divergence_last_slot(u: &PolyTensor) -> Result<PolyTensor> {
    let r = u.dim;
    let rest = u.entries.len() / r;
    let mut entries = Vec::with_capacity(rest);
    for a in 0..rest {
        let mut acc = PolyRv::zero(u.nvars);
        for i in 0..r {
            let f = &u.entries[a * r + i];
            if f.is_zero() {
                continue;
            }
            acc += &(&f.mul_coord(i) - &f.partial(i));
        }
        if acc.degree() > crate::gaussian::poly::MAX_DEGREE {
            return Err(Error::DegreeCap {
                degree: acc.degree(),
                cap: crate::gaussian::poly::MAX_DEGREE,
            });
        }
        entries.push(acc);
    }
    Ok(PolyTensor {
        dim: u.dim,
        order: u.order - 1,
        basis: Basis::Orthonormal,
        nvars: u.nvars,
        entries,
    })
}

/// `δ^j` applied to the last `j` slots of `u`, leaving an order
/// `u.order() - j` tensor.
pub fn skorohod_partial(u: &PolyTensor, j: usize) -> Result<PolyTensor> {
    check_divergence_input(u)?;
    if j > u.order {
        return Err(Error::ContractionRange {
            r: j,
            p: u.order,
            q: u.order,
        });
    }
    let mut cur = u.clone();
    for _ in 0..j {
        cur = divergence_last_slot(&cur)?;
    }
    Ok(cur)
}

/// Multiple Skorohod integral `δ^q(u)` of an order-`q` tensor-valued
/// functional, iterated slot by slot.
pub fn skorohod(u: &PolyTensor) -> Result<PolyRv> {
    if u.order > MAX_ORDER {
        return Err(Error::OrderCap {
            order: u.order,
            cap: MAX_ORDER,
        });
    }
    Ok(skorohod_partial(u, u.order)?.into_scalar())
}

/// Result of [`multiple_integral`]; `symmetrized` flags an asymmetric input.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipleIntegral {
    pub value: PolyRv,
    pub symmetrized: bool,
}

/// `Π_j He_{m_j}(Z_j)` as a polynomial.
fn hermite_product(nvars: usize, multiplicities: &[u8]) -> PolyRv {
    let mut terms: Vec<(Monomial, f64)> = vec![(vec![0; nvars], 1.0)];
    for (var, &m) in multiplicities.iter().enumerate() {
        if m == 0 {
            continue;
        }
        let coeffs = hermite_coefficients(m as usize);
        let mut next = Vec::new();
        for (mono, c) in &terms {
            for (e, &a) in coeffs.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let mut mono = mono.clone();
                mono[var] += e as u8;
                next.push((mono, c * a));
            }
        }
        terms = next;
    }
    PolyRv::from_terms(nvars, terms).expect("Hermite product within caps")
}

/// `I_q(f)`: expands `f` in the orthonormal basis, where an orthonormal
/// multi-index with multiplicities `(m_1..m_r)` integrates to
/// `Π_j He_{m_j}(Z_j)`.
pub fn multiple_integral(f: &Tensor, space: &GaussianSpace) -> Result<MultipleIntegral> {
    let q = f.order();
    if q > MAX_ORDER {
        return Err(Error::OrderCap { order: q, cap: MAX_ORDER });
    }
    let symmetrized = !f.is_symmetric() && !f.check_symmetry(1e-12);
    let r = space.rank();
    if q == 0 {
        return Ok(MultipleIntegral {
            value: PolyRv::constant(r, f.get(&[])),
            symmetrized,
        });
    }
    let coeffs = f.to_orthonormal(space)?;
    let mut by_multiset: BTreeMap<Vec<u8>, f64> = BTreeMap::new();
    let mut idx = vec![0; q];
    for (flat, &c) in coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        unflatten(r, q, flat, &mut idx);
        let mut mult = vec![0u8; r];
        for &i in &idx {
            mult[i] += 1;
        }
        *by_multiset.entry(mult).or_insert(0.0) += c;
    }
    let mut value = PolyRv::zero(r);
    for (mult, c) in by_multiset {
        value += &hermite_product(r, &mult).scale(c);
    }
    Ok(MultipleIntegral { value, symmetrized })
}

/// Hermite-basis expansion: maps multiplicities `(k_1..k_r)` to the
/// coefficient of `Π_j He_{k_j}(Z_j)`.
pub fn hermite_expansion(f: &PolyRv) -> BTreeMap<Vec<u8>, f64> {
    let r = f.nvars();
    let mut out: BTreeMap<Vec<u8>, f64> = BTreeMap::new();
    for (mono, c) in f.terms() {
        let mut partial: Vec<(Vec<u8>, f64)> = vec![(vec![0; r], c)];
        for (var, &m) in mono.iter().enumerate() {
            if m == 0 {
                continue;
            }
            let a = monomial_to_hermite(m as usize);
            let mut next = Vec::new();
            for (ks, w) in &partial {
                for (k, &ak) in a.iter().enumerate() {
                    if ak == 0.0 {
                        continue;
                    }
                    let mut ks = ks.clone();
                    ks[var] = k as u8;
                    next.push((ks, w * ak));
                }
            }
            partial = next;
        }
        for (ks, w) in partial {
            *out.entry(ks).or_insert(0.0) += w;
        }
    }
    out
}

fn from_hermite_expansion(nvars: usize, expansion: &BTreeMap<Vec<u8>, f64>) -> PolyRv {
    let mut acc = PolyRv::zero(nvars);
    for (ks, &c) in expansion {
        acc += &hermite_product(nvars, ks).scale(c);
    }
    acc
}

/// Projection `J_q F` on the `q`-th Wiener chaos.
pub fn chaos_projection(f: &PolyRv, q: usize) -> PolyRv {
    let mut expansion = hermite_expansion(f);
    expansion.retain(|ks, _| ks.iter().map(|&k| k as usize).sum::<usize>() == q);
    from_hermite_expansion(f.nvars(), &expansion)
}

/// `LF = -δ(DF)`.
pub fn ou_generator(f: &PolyRv) -> Result<PolyRv> {
    Ok(-&skorohod(&derivative(f, 1)?)?)
}

/// `LF = -Σ_q q J_q F` through the Hermite expansion.
pub fn ou_generator_chaos(f: &PolyRv) -> PolyRv {
    let mut expansion = hermite_expansion(f);
    for (ks, c) in expansion.iter_mut() {
        *c *= -(ks.iter().map(|&k| k as f64).sum::<f64>());
    }
    from_hermite_expansion(f.nvars(), &expansion)
}

/// `E[I_q(f)^2] = q! ‖f̃‖²`.
pub fn isometry_norm(f: &Tensor, space: &GaussianSpace) -> Result<f64> {
    Ok(factorial(f.order()) * f.symmetrize()?.norm_sq(space)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn close(a: &PolyRv, b: &PolyRv, tol: f64) -> bool {
        (a - b).max_abs_coeff() <= tol
    }

    #[test]
    fn derivative_examples() {
        let s = GaussianSpace::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 2.0])).unwrap();
        let h = HilbertVec::new(vec![0.7, -0.4]);
        let x = isonormal(&s, &h).unwrap();
        let hc = s.orthonormal_coords(&h).unwrap();
        let f = x.pow(3).unwrap();
        let d1 = derivative(&f, 1).unwrap();
        let x2 = x.pow(2).unwrap();
        for i in 0..2 {
            assert!(close(d1.get(&[i]), &x2.scale(3.0 * hc[i]), 1e-13));
        }
        let d2 = derivative(&f, 2).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!(close(d2.get(&[i, j]), &x.scale(6.0 * hc[i] * hc[j]), 1e-13));
            }
        }
        let c = PolyRv::constant(2, 4.0);
        assert!(derivative(&c, 3).unwrap().entries().iter().all(|e| e.is_zero()));
    }

    #[test]
    fn skorohod_examples() {
        let s = GaussianSpace::identity(1).unwrap();
        let h = HilbertVec::basis(1, 0);
        let z = isonormal(&s, &h).unwrap();
        let u = PolyTensor::from_tensor(&PolyRv::constant(1, 1.0), &Tensor::outer(&[h.clone()]).unwrap(), &s).unwrap();
        assert!(close(&skorohod(&u).unwrap(), &z, 1e-15));
        let u = PolyTensor::from_tensor(&z, &Tensor::outer(&[h.clone()]).unwrap(), &s).unwrap();
        let expected = &z.pow(2).unwrap() - &PolyRv::constant(1, 1.0);
        assert!(close(&skorohod(&u).unwrap(), &expected, 1e-15));
        let u2 = PolyTensor::from_tensor(&PolyRv::constant(1, 1.0), &Tensor::power(&h, 2).unwrap(), &s).unwrap();
        assert!(close(&skorohod(&u2).unwrap(), &expected, 1e-15));
    }

    #[test]
    fn raw_basis_divergence_is_rejected() {
        let u = PolyTensor::zeros(2, 1, Basis::Raw, 2).unwrap();
        assert_eq!(skorohod(&u).unwrap_err(), Error::NotOrthonormal);
    }

    #[test]
    fn multiple_integral_examples() {
        let s = GaussianSpace::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0])).unwrap();
        let h = HilbertVec::new(vec![1.0, 2.0]);
        let x = isonormal(&s, &h).unwrap();
        let i1 = multiple_integral(&Tensor::outer(&[h.clone()]).unwrap(), &s).unwrap();
        assert!(close(&i1.value, &x, 1e-14));
        let c2 = s.inner_product(&h, &h).unwrap();
        let i2 = multiple_integral(&Tensor::power(&h, 2).unwrap(), &s).unwrap();
        let expected = &x.pow(2).unwrap() - &PolyRv::constant(2, c2);
        assert!(close(&i2.value, &expected, 1e-13));
        assert!(!i2.symmetrized);

        let id = GaussianSpace::identity(2).unwrap();
        let e = |i| HilbertVec::basis(2, i);
        let f = Tensor::outer(&[e(0), e(1)]).unwrap();
        let sym = multiple_integral(&f.symmetrize().unwrap(), &id).unwrap();
        let z0z1 = PolyRv::from_terms(2, [(vec![1, 1], 1.0)]).unwrap();
        assert!(close(&sym.value, &z0z1, 1e-15));
        let asym = multiple_integral(&f, &id).unwrap();
        assert!(asym.symmetrized);
        assert!(close(&asym.value, &z0z1, 1e-15));
    }

    #[test]
    fn generator_examples() {
        let z = PolyRv::coord(1, 0);
        let one = PolyRv::constant(1, 1.0);
        assert!(close(&ou_generator(&z).unwrap(), &z.scale(-1.0), 1e-15));
        let he2 = &z.pow(2).unwrap() - &one;
        assert!(close(&ou_generator(&he2).unwrap(), &he2.scale(-2.0), 1e-15));
        // L(Z^3) = -3 Z^3 + 6 Z
        let z3 = z.pow(3).unwrap();
        let expected = &z3.scale(-3.0) + &z.scale(6.0);
        assert!(close(&ou_generator(&z3).unwrap(), &expected, 1e-14));
        assert!(close(&ou_generator_chaos(&z3), &expected, 1e-14));
    }

    #[test]
    fn chaos_projection_of_cube() {
        let z = PolyRv::coord(1, 0);
        let z3 = z.pow(3).unwrap();
        let he3 = &z3 - &z.scale(3.0);
        assert!(close(&chaos_projection(&z3, 3), &he3, 1e-14));
        assert!(close(&chaos_projection(&z3, 1), &z.scale(3.0), 1e-14));
        assert!(chaos_projection(&z3, 2).is_zero());
    }
}
