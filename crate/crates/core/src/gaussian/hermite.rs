//! Probabilists' Hermite polynomials.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hermite normalization.
///
/// `Monic` is `He_q` with `He_{q+1} = x He_q - q He_{q-1}`; `Scaled` is
/// `He_q / q!`, the convention under which `q! H_q(X(h)) = I_q(h^{⊗q})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    #[default]
    Monic,
    Scaled,
}

impl Normalization {
    /// Factor mapping monic values to this normalization.
    pub fn factor(self, q: usize) -> f64 {
        match self {
            Normalization::Monic => 1.0,
            Normalization::Scaled => 1.0 / factorial(q),
        }
    }
}

impl std::str::FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "monic" => Ok(Normalization::Monic),
            "scaled" => Ok(Normalization::Scaled),
            other => Err(Error::Parameter(format!("unknown normalization '{other}'"))),
        }
    }
}

impl std::fmt::Display for Normalization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Normalization::Monic => "monic",
            Normalization::Scaled => "scaled",
        })
    }
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// `(n-1)!!` style product `n (n-2) (n-4) ...`; equals 1 for `n <= 0`.
pub fn double_factorial(n: i64) -> f64 {
    let mut acc = 1.0;
    let mut k = n;
    while k > 1 {
        acc *= k as f64;
        k -= 2;
    }
    acc
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Monic `He_q(x)` by the three-term recurrence.
pub fn hermite_monic(q: usize, x: f64) -> f64 {
    match q {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut prev, mut cur) = (1.0, x);
            for k in 1..q {
                let next = x * cur - k as f64 * prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Hermite polynomial of degree `q` in the requested normalization.
pub fn hermite_eval(q: i32, x: f64, normalization: Normalization) -> Result<f64> {
    if q < 0 {
        return Err(Error::Parameter(format!("Hermite degree must be >= 0, got {q}")));
    }
    let q = q as usize;
    Ok(hermite_monic(q, x) * normalization.factor(q))
}

/// Monomial coefficients `c[i]` with `He_q(x) = Σ c[i] x^i`.
pub fn hermite_coefficients(q: usize) -> Vec<f64> {
    let mut prev = vec![1.0];
    if q == 0 {
        return prev;
    }
    let mut cur = vec![0.0, 1.0];
    for k in 1..q {
        let mut next = vec![0.0; k + 2];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += c;
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= k as f64 * c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// Coefficients `a[k]` with `x^m = Σ a[k] He_k(x)`.
///
/// `a[k] = m! / (k! ((m-k)/2)! 2^{(m-k)/2})` when `m - k` is even, else 0.
pub fn monomial_to_hermite(m: usize) -> Vec<f64> {
    let mut out = vec![0.0; m + 1];
    let mut k = m % 2;
    while k <= m {
        let j = (m - k) / 2;
        out[k] = factorial(m) / (factorial(k) * factorial(j) * 2f64.powi(j as i32));
        k += 2;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        assert_eq!(hermite_eval(2, 3.0, Normalization::Monic).unwrap(), 8.0);
        assert_eq!(hermite_eval(3, 2.0, Normalization::Monic).unwrap(), 2.0);
        let scaled = hermite_eval(3, 2.0, Normalization::Scaled).unwrap();
        assert!((scaled - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn negative_degree_is_rejected() {
        assert!(hermite_eval(-1, 0.0, Normalization::Monic).is_err());
    }

    #[test]
    fn derivative_matches_recurrence_by_finite_differences() {
        let h = 1e-6;
        for q in 1..=8 {
            let mut x = -5.0;
            while x <= 5.0 {
                let fd = (hermite_monic(q, x + h) - hermite_monic(q, x - h)) / (2.0 * h);
                let exact = q as f64 * hermite_monic(q - 1, x);
                let scale = exact.abs().max(1.0);
                assert!((fd - exact).abs() / scale < 1e-5, "q={q} x={x}: {fd} vs {exact}");
                x += 0.25;
            }
        }
    }

    #[test]
    fn coefficients_agree_with_recurrence() {
        for q in 0..=10 {
            let c = hermite_coefficients(q);
            for &x in &[-2.5f64, -0.3, 0.0, 1.7] {
                let v: f64 = c.iter().enumerate().map(|(i, a)| a * x.powi(i as i32)).sum();
                assert!((v - hermite_monic(q, x)).abs() < 1e-9 * (1.0 + v.abs()));
            }
        }
    }

    #[test]
    fn monomial_expansion_inverts() {
        for m in 0..=9 {
            let a = monomial_to_hermite(m);
            for &x in &[-1.3f64, 0.4, 2.2] {
                let v: f64 = a.iter().enumerate().map(|(k, c)| c * hermite_monic(k, x)).sum();
                assert!((v - x.powi(m as i32)).abs() < 1e-9 * (1.0 + v.abs()));
            }
        }
    }
}
