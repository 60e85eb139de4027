//! Two-sample Kolmogorov–Smirnov test and the conditional characteristic
//! function test used to check stable convergence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::TestReport;
use crate::stats::pairwise_sum;

pub const KS_SERIES_TERMS: usize = 100;
pub const CF_LAMBDAS: [f64; 3] = [0.5, 1.0, 2.0];
/// Threshold of the conditional CF test, in MC standard errors.
pub const CF_THRESHOLD: f64 = 4.0;

/// `Q(λ) = 2 Σ_{k≥1} (-1)^{k-1} e^{-2k²λ²}`, the Kolmogorov survival
/// function, truncated at [`KS_SERIES_TERMS`] terms.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 0.2 {
        // the alternating series has not converged here; Q(0.2) > 1 - 1e-12
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=KS_SERIES_TERMS {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        s += if k % 2 == 1 { term } else { -term };
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// `λ` with `Q(λ) = alpha`, by bisection.
pub fn kolmogorov_critical(alpha: f64) -> f64 {
    let (mut lo, mut hi) = (0.2, 10.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_survival(mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    /// Critical value of the statistic at the requested level.
    pub critical: f64,
}

/// Sup-distance between the empirical CDFs of `a` and `b`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("two-sample KS needs non-empty samples"));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = if a[i].total_cmp(&b[j]).is_le() { a[i] } else { b[j] };
        while i < a.len() && a[i].total_cmp(&x).is_le() {
            i += 1;
        }
        while j < b.len() && b[j].total_cmp(&x).is_le() {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Two-sample KS with the asymptotic p-value, at level `alpha`.
pub fn ks_test(a: &[f64], b: &[f64], alpha: f64) -> Result<KsResult> {
    let statistic = ks_statistic(a, b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let ne = (na * nb / (na + nb)).sqrt();
    Ok(KsResult {
        statistic,
        p_value: kolmogorov_survival(ne * statistic),
        critical: kolmogorov_critical(alpha) / ne,
    })
}

/// [`ks_test`] at the 1% level as a report.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<TestReport> {
    ks_two_sample_named("ks_two_sample", a, b, 0.01)
}

pub fn ks_two_sample_named(name: &str, a: &[f64], b: &[f64], alpha: f64) -> Result<TestReport> {
    let r = ks_test(a, b, alpha)?;
    Ok(TestReport::new(name, r.statistic, r.critical)
        .with_sizes([a.len(), b.len()])
        .detail("p_value", r.p_value)
        .detail("alpha", alpha))
}

/// Bounded functionals `Z = g(S²)` used by the conditional CF test.
pub fn cf_functionals() -> [(&'static str, fn(f64) -> f64); 4] {
    [
        ("1", |_| 1.0),
        ("S2", |s| s),
        ("min(S2,1)", |s| s.min(1.0)),
        ("exp(-S2)", |s| (-s).exp()),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CfCell {
    pub lambda: f64,
    pub functional: String,
    pub discrepancy: f64,
    pub std_error: f64,
}

/// For each `λ` and `Z`, compares the MC mean of `e^{iλF} Z` with that of
/// `e^{iλD - λ²S²/2} Z` on the same replicas (`D = 0` without drift). The
/// statistic is the largest `|discrepancy| / standard error`, compared with
/// [`CF_THRESHOLD`].
pub fn conditional_cf_test(
    values: &[f64],
    s2: &[f64],
    drift: Option<&[f64]>,
    lambdas: &[f64],
) -> Result<TestReport> {
    let m = values.len();
    if s2.len() != m || drift.is_some_and(|d| d.len() != m) {
        return Err(Error::LengthMismatch(format!(
            "conditional CF test: {m} values, {} variances, {:?} drifts",
            s2.len(),
            drift.map(|d| d.len())
        )));
    }
    if m < 2 {
        return Err(Error::EmptyInput("conditional CF test needs at least two replicas"));
    }
    let mut cells = Vec::new();
    let mut worst: f64 = 0.0;
    let mut re = vec![0.0; m];
    let mut im = vec![0.0; m];
    for &lambda in lambdas {
        for (name, g) in cf_functionals() {
            for i in 0..m {
                let z = g(s2[i]);
                let d = drift.map_or(0.0, |d| d[i]);
                let damp = (-0.5 * lambda * lambda * s2[i]).exp();
                let (sf, cf) = (lambda * values[i]).sin_cos();
                let (sd, cd) = (lambda * d).sin_cos();
                re[i] = (cf - damp * cd) * z;
                im[i] = (sf - damp * sd) * z;
            }
            let mr = pairwise_sum(&re) / m as f64;
            let mi = pairwise_sum(&im) / m as f64;
            let vr = re.iter().map(|x| (x - mr).powi(2)).sum::<f64>() / (m - 1) as f64;
            let vi = im.iter().map(|x| (x - mi).powi(2)).sum::<f64>() / (m - 1) as f64;
            let se = ((vr + vi) / m as f64).sqrt();
            let disc = mr.hypot(mi);
            let ratio = if disc == 0.0 {
                0.0
            } else if se > 0.0 {
                disc / se
            } else {
                f64::INFINITY
            };
            worst = worst.max(ratio);
            cells.push(CfCell {
                lambda,
                functional: name.to_string(),
                discrepancy: disc,
                std_error: se,
            });
        }
    }
    let max_disc = cells.iter().map(|c| c.discrepancy).fold(0.0, f64::max);
    Ok(TestReport::new("conditional_cf", worst, CF_THRESHOLD)
        .with_sizes([m])
        .detail("max_discrepancy", max_disc)
        .detail("cells", cells))
}
