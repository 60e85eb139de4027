//! Which limit theorem applies to `G_n` for given `(q, H)`.

use serde::{Deserialize, Serialize};

/// Equality tolerance for the regime thresholds.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeLabel {
    /// `H < 1/(2q)`: `n^{qH-1/2} G_n` converges in L² to a Riemann integral.
    Lower,
    /// `H = 1/(2q)`: drift plus mixed Gaussian.
    CriticalLower,
    /// `1/(2q) < H < 1-1/(2q)`: stable convergence to a mixed Gaussian.
    MixedClt,
    /// `H = 1-1/(2q)`: mixed Gaussian after dividing by `√(ln n)`.
    CriticalUpper,
    /// `H > 1-1/(2q)`: Hermite-process limit after `n^{q(1-H)-1/2}`.
    Hermite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeSpec {
    pub q: usize,
    pub hurst: f64,
    pub label: RegimeLabel,
    pub lower_threshold: f64,
    pub upper_threshold: f64,
    pub scaling: String,
    pub predicted_limit: String,
}

impl RegimeSpec {
    /// Applies the regime's renormalization to a value of `G_n`.
    pub fn renormalize(&self, n: usize, g_n: f64) -> f64 {
        let nf = n as f64;
        let q = self.q as f64;
        match self.label {
            RegimeLabel::Lower => nf.powf(q * self.hurst - 0.5) * g_n,
            RegimeLabel::CriticalLower | RegimeLabel::MixedClt => g_n,
            RegimeLabel::CriticalUpper => g_n / nf.ln().sqrt(),
            RegimeLabel::Hermite => nf.powf(q * (1.0 - self.hurst) - 0.5) * g_n,
        }
    }
}

/// Classifies `(q, H)`; thresholds are compared with tolerance
/// [`BOUNDARY_TOL`], the lower one first.
pub fn classify_regime(q: usize, hurst: f64) -> RegimeSpec {
    let lo = 1.0 / (2.0 * q as f64);
    let hi = 1.0 - lo;
    let (label, scaling, predicted) = if (hurst - lo).abs() <= BOUNDARY_TOL {
        (
            RegimeLabel::CriticalLower,
            "G_n",
            "c_q ∫ f^(q)(B_s) ds + sigma_{H,q} ∫ f(B_s) dW_s",
        )
    } else if hurst < lo {
        (RegimeLabel::Lower, "n^(qH-1/2) G_n", "c_q ∫ f^(q)(B_s) ds (L2)")
    } else if (hurst - hi).abs() <= BOUNDARY_TOL {
        (
            RegimeLabel::CriticalUpper,
            "G_n / sqrt(ln n)",
            "sqrt(2/q!) (1-1/(2q))^(q/2) (1-1/q)^(q/2) ∫ f(B_s) dW_s",
        )
    } else if hurst < hi {
        (RegimeLabel::MixedClt, "G_n", "sigma_{H,q} ∫ f(B_s) dW_s")
    } else {
        (
            RegimeLabel::Hermite,
            "n^(q(1-H)-1/2) G_n",
            "∫ f(B_s) dZ^(q)_s (variance boundedness only)",
        )
    };
    RegimeSpec {
        q,
        hurst,
        label,
        lower_threshold: lo,
        upper_threshold: hi,
        scaling: scaling.to_string(),
        predicted_limit: predicted.to_string(),
    }
}
