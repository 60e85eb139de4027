//! Weight functions with closed-form derivatives.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Highest derivative order served (covers `2q` for `q ≤ 6`).
pub const MAX_DERIVATIVE_ORDER: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightFunction {
    /// `Σ_i c_i x^i`.
    Polynomial { coefficients: Vec<f64> },
    /// `a cos(b x)`.
    Cosine { a: f64, b: f64 },
    /// `exp(-c x²)`, `c ≥ 0`.
    ExpNegQuadratic { c: f64 },
}

impl WeightFunction {
    pub fn constant(c: f64) -> Self {
        WeightFunction::Polynomial { coefficients: vec![c] }
    }

    /// `x^k`.
    pub fn monomial(k: usize) -> Self {
        let mut coefficients = vec![0.0; k + 1];
        coefficients[k] = 1.0;
        WeightFunction::Polynomial { coefficients }
    }

    pub fn cosine() -> Self {
        WeightFunction::Cosine { a: 1.0, b: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = match self {
            WeightFunction::Polynomial { coefficients } => coefficients.iter().all(|c| c.is_finite()),
            WeightFunction::Cosine { a, b } => a.is_finite() && b.is_finite(),
            WeightFunction::ExpNegQuadratic { c } => {
                if *c < 0.0 {
                    return Err(Error::Parameter(format!("expq weight needs c >= 0, got {c}")));
                }
                c.is_finite()
            }
        };
        if finite {
            Ok(())
        } else {
            Err(Error::Parameter(format!("non-finite weight parameters in {self}")))
        }
    }

    /// Errors unless derivatives up to `order` are available.
    pub fn check_order(&self, order: usize) -> Result<()> {
        if order > MAX_DERIVATIVE_ORDER {
            return Err(Error::DerivativeOrder {
                order,
                max: MAX_DERIVATIVE_ORDER,
            });
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        match self {
            WeightFunction::Polynomial { coefficients } => coefficients.iter().all(|&c| c == 0.0),
            WeightFunction::Cosine { a, .. } => *a == 0.0,
            WeightFunction::ExpNegQuadratic { .. } => false,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut out = [0.0];
        self.fill_derivatives(x, &mut out);
        out[0]
    }

    pub fn derivative(&self, order: usize, x: f64) -> Result<f64> {
        self.check_order(order)?;
        let mut out = [0.0; MAX_DERIVATIVE_ORDER + 1];
        self.fill_derivatives(x, &mut out[..=order]);
        Ok(out[order])
    }

    /// Writes `f^{(i)}(x)` into `out[i]`. The caller checks the order.
    pub fn fill_derivatives(&self, x: f64, out: &mut [f64]) {
        match self {
            WeightFunction::Polynomial { coefficients } => {
                for (i, o) in out.iter_mut().enumerate() {
                    // Horner on Σ_{k≥i} c_k k!/(k-i)! x^{k-i}
                    let mut acc = 0.0;
                    for k in (i..coefficients.len()).rev() {
                        let falling: f64 = ((k - i + 1)..=k).map(|v| v as f64).product();
                        acc = acc * x + coefficients[k] * falling;
                    }
                    *o = acc;
                }
            }
            WeightFunction::Cosine { a, b } => {
                let (s, c) = (b * x).sin_cos();
                let mut bp = *a;
                // cos(bx + iπ/2) cycles through cos, -sin, -cos, sin
                for (i, o) in out.iter_mut().enumerate() {
                    *o = bp
                        * match i % 4 {
                            0 => c,
                            1 => -s,
                            2 => -c,
                            _ => s,
                        };
                    bp *= b;
                }
            }
            WeightFunction::ExpNegQuadratic { c } => {
                // d^i/dx^i e^{-c x²} = (-√c)^i H_i(√c x) e^{-c x²}, H_i physicists' Hermite
                let rc = c.sqrt();
                let y = rc * x;
                let e = (-c * x * x).exp();
                let (mut h_prev, mut h) = (0.0, 1.0);
                let mut pre = 1.0;
                for (i, o) in out.iter_mut().enumerate() {
                    *o = pre * h * e;
                    let next = 2.0 * y * h - 2.0 * i as f64 * h_prev;
                    h_prev = h;
                    h = next;
                    pre *= -rc;
                }
            }
        }
    }
}

impl fmt::Display for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightFunction::Polynomial { coefficients } => {
                let parts: Vec<String> = coefficients.iter().map(|c| c.to_string()).collect();
                write!(f, "poly:{}", parts.join(","))
            }
            WeightFunction::Cosine { a, b } => write!(f, "cos:{a},{b}"),
            WeightFunction::ExpNegQuadratic { c } => write!(f, "expq:{c}"),
        }
    }
}

impl FromStr for WeightFunction {
    type Err = Error;

    /// `poly:c0,c1,...`, `cos:a,b` or `expq:c`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parameter(format!("weight '{s}' should look like kind:params")))?;
        let nums = rest
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parameter(format!("bad number '{t}' in weight '{s}'")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let w = match (kind.trim(), nums.as_slice()) {
            ("poly", cs) if !cs.is_empty() => WeightFunction::Polynomial { coefficients: cs.to_vec() },
            ("cos", [a, b]) => WeightFunction::Cosine { a: *a, b: *b },
            ("expq", [c]) => WeightFunction::ExpNegQuadratic { c: *c },
            _ => return Err(Error::Parameter(format!("unrecognized weight '{s}'"))),
        };
        w.validate()?;
        Ok(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn finite_difference_check(w: &WeightFunction) {
        let h = 1e-5;
        for &x in &[-1.7, -0.3, 0.0, 0.4, 1.9] {
            for i in 0..6 {
                let fd = (w.derivative(i, x + h).unwrap() - w.derivative(i, x - h).unwrap()) / (2.0 * h);
                let exact = w.derivative(i + 1, x).unwrap();
                assert!(
                    (fd - exact).abs() <= 1e-5 * (1.0 + exact.abs()),
                    "{w} order {} at {x}: {fd} vs {exact}",
                    i + 1
                );
            }
        }
    }

    #[test]
    fn derivatives_agree_with_finite_differences() {
        finite_difference_check(&"poly:1,-2,0.5,0,3".parse().unwrap());
        finite_difference_check(&"cos:2,1.5".parse().unwrap());
        finite_difference_check(&"expq:0.7".parse().unwrap());
    }

    #[test]
    fn polynomial_derivatives() {
        let w = WeightFunction::monomial(4);
        assert_eq!(w.derivative(2, 2.0).unwrap(), 48.0);
        assert_eq!(w.derivative(4, 0.3).unwrap(), 24.0);
        assert_eq!(w.derivative(5, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["poly:1,0,2", "cos:1,1", "expq:0.5"] {
            let w: WeightFunction = s.parse().unwrap();
            assert_eq!(w.to_string(), s);
        }
        assert!("cos:1".parse::<WeightFunction>().is_err());
        assert!("expq:-1".parse::<WeightFunction>().is_err());
        assert!("sin:1,1".parse::<WeightFunction>().is_err());
    }

    #[test]
    fn order_cap() {
        let w = WeightFunction::cosine();
        assert!(matches!(w.derivative(13, 0.0), Err(Error::DerivativeOrder { .. })));
    }
}
