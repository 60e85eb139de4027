//! `F_n = √n ∫_0^1 t^n W_t dW_t = δ(u_n)` with `u_n(t) = √n t^n W_t` for a
//! Brownian motion `W`; `F_n` converges stably to `W_1 N / √2`.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::distribution::{conditional_cf_test, ks_two_sample_named, CF_LAMBDAS};
use crate::report::TestReport;
use crate::rng::{stream, StreamTag};
use crate::stats::MeanEstimate;

/// Steps of the fine grid on the simulation window.
pub const FINE_STEPS: usize = 4096;
/// The window `[1 - WINDOW/n, 1]` carries all but `e^{-WINDOW}` of `t^n`.
pub const WINDOW: f64 = 40.0;

/// `⟨ĝ_n ⊗_1 ĝ_n, 1⊗1⟩ = ∫∫ n s^n t^n (s∧t) ds dt = 2n / ((n+2)(2n+3))`.
pub fn condition_a(n: usize) -> f64 {
    let nf = n as f64;
    2.0 * nf / ((nf + 2.0) * (2.0 * nf + 3.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BrownianReplica {
    pub f_n: f64,
    /// `⟨u_n, DF_n⟩ = n ∫ t^{2n} W_t² dt + n ∫ t^n (∫_0^t s^n W_s ds) dW_t`.
    pub u_df: f64,
    pub w1: f64,
}

/// Exact moments of `t^n` over one cell `[a, a + dt]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellWeights {
    /// `∫ t^n dt`.
    pub int_n: f64,
    /// `∫ t^{2n} dt`.
    pub int_2n: f64,
    /// Regression coefficient of `∫ t^n dW_t` on `ΔW`.
    pub slope: f64,
    /// Conditional standard deviation of `∫ t^n dW_t` given `ΔW`.
    pub resid_sd: f64,
}

/// One replica on `FINE_STEPS` cells of the window. `W` at the window start
/// is drawn exactly, and on every cell the pair `(ΔW, ∫ t^n dW)` is drawn
/// jointly; `W` is frozen at the left endpoint inside a cell.
pub fn simulate_replica(n: usize, seed: u64, index: u64, cells: &[CellWeights]) -> BrownianReplica {
    let t0 = window_start(n);
    let dt = (1.0 - t0) / FINE_STEPS as f64;
    let sdt = dt.sqrt();
    let nf = n as f64;
    let mut rng = stream(seed, StreamTag::Brownian, index);
    let z0: f64 = rng.sample(StandardNormal);
    let mut w = t0.sqrt() * z0;
    let mut ito = 0.0;
    let mut quad = 0.0;
    let mut cross = 0.0;
    let mut inner = 0.0;
    for c in cells {
        let dw = sdt * rng.sample::<f64, _>(StandardNormal);
        let y = c.slope * dw + c.resid_sd * rng.sample::<f64, _>(StandardNormal);
        quad += c.int_2n * w * w;
        cross += inner * y;
        ito += w * y;
        inner += c.int_n * w;
        w += dw;
    }
    BrownianReplica {
        f_n: nf.sqrt() * ito,
        u_df: nf * (quad + cross),
        w1: w,
    }
}

fn window_start(n: usize) -> f64 {
    (1.0 - WINDOW / n as f64).max(0.0)
}

fn power_integral(a: f64, b: f64, k: usize) -> f64 {
    let e = k as i32 + 1;
    (b.powi(e) - a.powi(e)) / e as f64
}

/// Cell weights on the simulation window of `F_n`.
pub fn grid_weights(n: usize) -> Vec<CellWeights> {
    let t0 = window_start(n);
    let dt = (1.0 - t0) / FINE_STEPS as f64;
    (0..FINE_STEPS)
        .map(|j| {
            let a = t0 + j as f64 * dt;
            let b = if j + 1 == FINE_STEPS { 1.0 } else { a + dt };
            let int_n = power_integral(a, b, n);
            let int_2n = power_integral(a, b, 2 * n);
            CellWeights {
                int_n,
                int_2n,
                slope: int_n / dt,
                resid_sd: (int_2n - int_n * int_n / dt).max(0.0).sqrt(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrownianRun {
    pub replicas: Vec<BrownianReplica>,
    /// Independent draws of `W_1 Z / √2`.
    pub reference: Vec<f64>,
}

pub fn simulate(n: usize, m: usize, seed: u64) -> Result<BrownianRun> {
    if n == 0 || n > i32::MAX as usize {
        return Err(Error::Parameter(format!("n must lie in 1..2^31, got {n}")));
    }
    let cells = grid_weights(n);
    let replicas = (0..m as u64)
        .into_par_iter()
        .map(|i| simulate_replica(n, seed, i, &cells))
        .collect();
    let reference = (0..m as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, StreamTag::MixtureNormal, i);
            let w1: f64 = rng.sample(StandardNormal);
            let z: f64 = rng.sample(StandardNormal);
            w1 * z / std::f64::consts::SQRT_2
        })
        .collect();
    Ok(BrownianRun { replicas, reference })
}

fn mean_check(name: &str, xs: &[f64], target: f64, seed: u64) -> TestReport {
    let e = MeanEstimate::of(xs);
    TestReport::new(name, e.z_score(target).abs(), 3.0)
        .with_sizes([xs.len()])
        .with_seeds([seed])
        .detail("mean", e.mean)
        .detail("std_error", e.std_error)
        .detail("target", target)
}

/// `E⟨u_n,DF_n⟩ ≈ 1/2`, `E[F_n²] ≈ 1/2`, KS against `W_1 Z/√2`, and the
/// conditional CF test with `S² = W_1²/2`.
pub fn brownian_example_run(n: usize, m: usize, seed: u64) -> Result<TestReport> {
    if m < 2 {
        return Err(Error::EmptyInput("Brownian example needs m >= 2"));
    }
    let run = simulate(n, m, seed)?;
    let f: Vec<f64> = run.replicas.iter().map(|r| r.f_n).collect();
    let u_df: Vec<f64> = run.replicas.iter().map(|r| r.u_df).collect();
    let f_sq: Vec<f64> = f.iter().map(|x| x * x).collect();
    let s2: Vec<f64> = run.replicas.iter().map(|r| 0.5 * r.w1 * r.w1).collect();
    let parts = vec![
        mean_check("mean_u_df", &u_df, 0.5, seed),
        mean_check("mean_f_sq", &f_sq, 0.5, seed),
        ks_two_sample_named("ks_vs_mixture", &f, &run.reference, 0.01)?.with_seeds([seed]),
        conditional_cf_test(&f, &s2, None, &CF_LAMBDAS)?.with_seeds([seed]),
    ];
    Ok(TestReport::all_of("example_brownian", &parts)
        .with_sizes([n, m])
        .detail("condition_a", condition_a(n))
        .detail("checks", &parts))
}
