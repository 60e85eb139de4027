//! Tensors over the raw basis of a Gaussian space.
//!
//! Symmetric tensors are stored on canonical (non-decreasing) multi-indices,
//! `C(d+q-1, q)` values; general tensors are dense row-major `d^q` arrays.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::gaussian::hermite::{binomial, factorial};
use crate::gaussian::space::{GaussianSpace, HilbertVec};

/// Order cap for tensors handed to the chaos machinery.
pub const MAX_ORDER: usize = 6;
/// Hard cap on stored entries for any dense intermediate.
pub const MAX_ENTRIES: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq)]
enum Storage {
    Dense(Vec<f64>),
    Symmetric(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    dim: usize,
    order: usize,
    storage: Storage,
}

pub(crate) fn dense_len(dim: usize, order: usize) -> Result<usize> {
    let mut n: usize = 1;
    for _ in 0..order {
        n = n.checked_mul(dim).filter(|&v| v <= MAX_ENTRIES).ok_or(Error::TensorSize {
            entries: usize::MAX,
        })?;
    }
    Ok(n)
}

pub(crate) fn flat_index(dim: usize, idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| acc * dim + i)
}

pub(crate) fn unflatten(dim: usize, order: usize, mut flat: usize, out: &mut [usize]) {
    for t in (0..order).rev() {
        out[t] = flat % dim;
        flat /= dim;
    }
}

/// Number of non-decreasing sequences of length `len` over `k` values.
fn multiset_count(k: usize, len: usize) -> usize {
    if len == 0 {
        return 1;
    }
    if k == 0 {
        return 0;
    }
    binomial(k + len - 1, len).round() as usize
}

/// Position of a non-decreasing multi-index in lexicographic order.
fn canonical_rank(dim: usize, sorted: &[usize]) -> usize {
    let q = sorted.len();
    let mut rank = 0;
    let mut lo = 0;
    for (t, &s) in sorted.iter().enumerate() {
        for v in lo..s {
            rank += multiset_count(dim - v, q - t - 1);
        }
        lo = s;
    }
    rank
}

/// All non-decreasing multi-indices of length `order`, in lexicographic order.
pub fn canonical_indices(dim: usize, order: usize) -> Vec<Vec<usize>> {
    fn rec(dim: usize, order: usize, lo: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == order {
            out.push(cur.clone());
            return;
        }
        for v in lo..dim {
            cur.push(v);
            rec(dim, order, v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, order, 0, &mut Vec::with_capacity(order), &mut out);
    out
}

/// All permutations of `0..k` (Heap's algorithm).
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut a: Vec<usize> = (0..k).collect();
    let mut out = vec![a.clone()];
    let mut c = vec![0; k];
    let mut i = 1;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Applies `m` (rows: new index, cols: old index) to one slot of a dense
/// row-major tensor. The slot's dimension changes from `m.ncols()` to
/// `m.nrows()`.
pub(crate) fn apply_to_slot(data: &[f64], dims: &[usize], slot: usize, m: &DMatrix<f64>) -> Vec<f64> {
    let outer: usize = dims[..slot].iter().product();
    let inner: usize = dims[slot + 1..].iter().product();
    let (new_d, old_d) = (m.nrows(), m.ncols());
    debug_assert_eq!(old_d, dims[slot]);
    let mut out = vec![0.0; outer * new_d * inner];
    for a in 0..outer {
        for j in 0..old_d {
            let src = &data[(a * old_d + j) * inner..(a * old_d + j + 1) * inner];
            if src.iter().all(|&x| x == 0.0) {
                continue;
            }
            for i in 0..new_d {
                let w = m[(i, j)];
                if w == 0.0 {
                    continue;
                }
                let dst = &mut out[(a * new_d + i) * inner..(a * new_d + i + 1) * inner];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += w * s;
                }
            }
        }
    }
    out
}

impl Tensor {
    pub fn zeros(dim: usize, order: usize) -> Result<Self> {
        Ok(Tensor {
            dim,
            order,
            storage: Storage::Dense(vec![0.0; dense_len(dim, order)?]),
        })
    }

    pub fn symmetric_zeros(dim: usize, order: usize) -> Result<Self> {
        if order > MAX_ORDER {
            return Err(Error::OrderCap { order, cap: MAX_ORDER });
        }
        Ok(Tensor {
            dim,
            order,
            storage: Storage::Symmetric(vec![0.0; multiset_count(dim, order)]),
        })
    }

    pub fn from_dense(dim: usize, order: usize, data: Vec<f64>) -> Result<Self> {
        let len = dense_len(dim, order)?;
        if data.len() != len {
            return Err(Error::Dimension {
                expected: len,
                got: data.len(),
            });
        }
        Ok(Tensor {
            dim,
            order,
            storage: Storage::Dense(data),
        })
    }

    pub fn scalar(c: f64) -> Self {
        Tensor {
            dim: 0,
            order: 0,
            storage: Storage::Dense(vec![c]),
        }
    }

    /// `h_1 ⊗ ... ⊗ h_q` (dense, not symmetrized).
    pub fn outer(vectors: &[HilbertVec]) -> Result<Self> {
        let Some(first) = vectors.first() else {
            return Ok(Self::scalar(1.0));
        };
        let dim = first.dim();
        let mut data = vec![1.0];
        for v in vectors {
            if v.dim() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: v.dim(),
                });
            }
            let mut next = Vec::with_capacity(data.len() * dim);
            for a in &data {
                next.extend(v.coeffs.iter().map(|b| a * b));
            }
            if next.len() > MAX_ENTRIES {
                return Err(Error::TensorSize { entries: next.len() });
            }
            data = next;
        }
        Tensor::from_dense(dim, vectors.len(), data)
    }

    /// `h^{⊗q}`, stored symmetrically.
    pub fn power(h: &HilbertVec, q: usize) -> Result<Self> {
        Tensor::outer(&vec![h.clone(); q])?.symmetrize()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_symmetric(&self) -> bool {
        matches!(self.storage, Storage::Symmetric(_))
    }

    /// Number of stored values.
    pub fn stored_len(&self) -> usize {
        match &self.storage {
            Storage::Dense(v) | Storage::Symmetric(v) => v.len(),
        }
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        assert_eq!(idx.len(), self.order);
        match &self.storage {
            Storage::Dense(v) => v[flat_index(self.dim, idx)],
            Storage::Symmetric(v) => {
                let mut s = idx.to_vec();
                s.sort_unstable();
                v[canonical_rank(self.dim, &s)]
            }
        }
    }

    /// Sets an entry; for symmetric storage this sets the whole orbit.
    pub fn set(&mut self, idx: &[usize], value: f64) {
        assert_eq!(idx.len(), self.order);
        match &mut self.storage {
            Storage::Dense(v) => v[flat_index(self.dim, idx)] = value,
            Storage::Symmetric(v) => {
                let mut s = idx.to_vec();
                s.sort_unstable();
                v[canonical_rank(self.dim, &s)] = value;
            }
        }
    }

    /// Full row-major array of `d^q` values.
    pub fn to_dense(&self) -> Result<Vec<f64>> {
        match &self.storage {
            Storage::Dense(v) => Ok(v.clone()),
            Storage::Symmetric(_) => {
                let len = dense_len(self.dim, self.order)?;
                let mut idx = vec![0; self.order];
                Ok((0..len)
                    .map(|flat| {
                        unflatten(self.dim, self.order, flat, &mut idx);
                        self.get(&idx)
                    })
                    .collect())
            }
        }
    }

    /// Symmetrization `f̃ = (1/q!) Σ_σ f∘σ`, stored canonically.
    pub fn symmetrize(&self) -> Result<Self> {
        if let Storage::Symmetric(_) = self.storage {
            return Ok(self.clone());
        }
        let mut out = Tensor::symmetric_zeros(self.dim, self.order)?;
        let perms = permutations(self.order);
        let norm = factorial(self.order);
        let mut permuted = vec![0; self.order];
        let Storage::Symmetric(values) = &mut out.storage else { unreachable!() };
        for (slot, idx) in canonical_indices(self.dim, self.order).into_iter().enumerate() {
            let mut acc = 0.0;
            for p in &perms {
                for (t, &pt) in p.iter().enumerate() {
                    permuted[t] = idx[pt];
                }
                acc += self.get(&permuted);
            }
            values[slot] = acc / norm;
        }
        Ok(out)
    }

    /// Checks permutation invariance of the stored values: every
    /// permutation for `q <= 4`, a fixed pseudo-random sample otherwise.
    pub fn check_symmetry(&self, tol: f64) -> bool {
        if self.order < 2 {
            return true;
        }
        let perms = if self.order <= 4 {
            permutations(self.order)
        } else {
            let mut state: u64 = 0x2545_F491_4F6C_DD1D;
            (0..64)
                .map(|_| {
                    let mut p: Vec<usize> = (0..self.order).collect();
                    for i in (1..p.len()).rev() {
                        state ^= state << 13;
                        state ^= state >> 7;
                        state ^= state << 17;
                        p.swap(i, (state % (i as u64 + 1)) as usize);
                    }
                    p
                })
                .collect()
        };
        let Ok(len) = dense_len(self.dim, self.order) else { return false };
        let mut idx = vec![0; self.order];
        let mut permuted = vec![0; self.order];
        for flat in 0..len {
            unflatten(self.dim, self.order, flat, &mut idx);
            let v = self.get(&idx);
            for p in &perms {
                for (t, &pt) in p.iter().enumerate() {
                    permuted[t] = idx[pt];
                }
                if (self.get(&permuted) - v).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    fn check_space(&self, space: &GaussianSpace) -> Result<()> {
        if self.order > 0 && self.dim != space.dim() {
            return Err(Error::SpaceMismatch);
        }
        Ok(())
    }

    /// `f ⊗_r g`: pairs the last `r` slots of `f` with the last `r` slots
    /// of `g` through the Gram matrix. With `symmetrize`, returns
    /// `f ⊗̃_r g`. For `r = p = q` the result is the scalar `⟨f, g⟩`.
    pub fn contract(&self, other: &Tensor, r: usize, space: &GaussianSpace, symmetrize: bool) -> Result<Tensor> {
        let (p, q) = (self.order, other.order);
        if r > p.min(q) {
            return Err(Error::ContractionRange { r, p, q });
        }
        self.check_space(space)?;
        other.check_space(space)?;
        let d = space.dim();
        let f = self.to_dense()?;
        let mut g = other.to_dense()?;
        let g_dims = vec![d; q];
        for slot in q - r..q {
            g = apply_to_slot(&g, &g_dims, slot, space.gram());
        }
        let s_len = dense_len(d, r)?;
        let a_len = dense_len(d, p - r)?;
        let b_len = dense_len(d, q - r)?;
        let out_len = a_len
            .checked_mul(b_len)
            .filter(|&n| n <= MAX_ENTRIES)
            .ok_or(Error::TensorSize { entries: usize::MAX })?;
        let mut out = vec![0.0; out_len];
        for a in 0..a_len {
            let fa = &f[a * s_len..(a + 1) * s_len];
            for b in 0..b_len {
                let gb = &g[b * s_len..(b + 1) * s_len];
                out[a * b_len + b] = fa.iter().zip(gb).map(|(x, y)| x * y).sum();
            }
        }
        let order = p + q - 2 * r;
        let t = if order == 0 {
            Tensor::scalar(out[0])
        } else {
            Tensor::from_dense(d, order, out)?
        };
        if symmetrize && order > 0 {
            t.symmetrize()
        } else {
            Ok(t)
        }
    }

    /// `⟨f, g⟩_{𝔥^{⊗q}}`.
    pub fn inner(&self, other: &Tensor, space: &GaussianSpace) -> Result<f64> {
        if self.order != other.order {
            return Err(Error::ContractionRange {
                r: self.order,
                p: self.order,
                q: other.order,
            });
        }
        Ok(self.contract(other, self.order, space, false)?.get(&[]))
    }

    pub fn norm_sq(&self, space: &GaussianSpace) -> Result<f64> {
        self.inner(self, space)
    }

    /// Coefficients in the orthonormal basis (dense over the rank `r`).
    pub fn to_orthonormal(&self, space: &GaussianSpace) -> Result<Vec<f64>> {
        self.check_space(space)?;
        let mut data = self.to_dense()?;
        let lt = space.factor().transpose();
        let mut dims = vec![space.dim(); self.order];
        for slot in 0..self.order {
            data = apply_to_slot(&data, &dims, slot, &lt);
            dims[slot] = space.rank();
        }
        Ok(data)
    }

    pub fn scale(&self, s: f64) -> Tensor {
        let mut t = self.clone();
        match &mut t.storage {
            Storage::Dense(v) | Storage::Symmetric(v) => v.iter_mut().for_each(|x| *x *= s),
        }
        t
    }

    /// Largest absolute difference between entries.
    pub fn max_abs_diff(&self, other: &Tensor) -> Result<f64> {
        if self.order != other.order || (self.order > 0 && self.dim != other.dim) {
            return Err(Error::SpaceMismatch);
        }
        let a = self.to_dense()?;
        let b = other.to_dense()?;
        Ok(a.iter().zip(&b).fold(0.0, |m, (x, y)| m.max((x - y).abs())))
    }
}
