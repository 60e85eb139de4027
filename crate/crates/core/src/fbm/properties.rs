//! Grid inequalities for fBm with `H < 1/2`: covariance of a level with an
//! increment, bounds on `⟨ε_t, ∂_{k/n}⟩`, and the rates of the diagonal
//! `α_{k,k}^q` and off-diagonal `β_{k,j}^q` sums.

use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::fbm::covariance::{alpha_diag, cov_rh, eps_del, rho, rho_power_sum};
use crate::report::TestReport;
use crate::rng::{stream, StreamTag};

pub const HURSTS: [f64; 5] = [0.1, 0.2, 0.3, 0.4, 0.45];
pub const ORDERS: [u32; 2] = [2, 3];
/// `n = 8, 16, …, 4096`.
pub fn rate_grid() -> Vec<usize> {
    (3..=12).map(|e| 1usize << e).collect()
}

const SLACK: f64 = 1e-12;

/// `max |E[B_r(B_t - B_s)]| / (t-s)^{2H}` over `triples` random `(r, s, t)`.
pub fn level_increment_ratio(hurst: f64, triples: usize, seed: u64) -> f64 {
    let mut rng = stream(seed, StreamTag::Synthetic, (hurst * 1e6) as u64);
    let mut worst: f64 = 0.0;
    for _ in 0..triples {
        let r: f64 = rng.random();
        let a: f64 = rng.random();
        let b: f64 = rng.random();
        let (s, t) = if a < b { (a, b) } else { (b, a) };
        if t <= s {
            continue;
        }
        let c = cov_rh(hurst, r, t) - cov_rh(hurst, r, s);
        worst = worst.max(c.abs() / (t - s).powf(2.0 * hurst));
    }
    worst
}

/// `max_k |⟨ε_t, ∂_{k/n}⟩| · n^{2H}` over grid and random `t`.
pub fn eps_del_ratio(hurst: f64, n: usize, random_t: usize, seed: u64) -> f64 {
    let mut rng = stream(seed, StreamTag::Synthetic, n as u64);
    let ts: Vec<f64> = (0..=n)
        .map(|j| j as f64 / n as f64)
        .chain((0..random_t).map(|_| rng.random::<f64>()))
        .collect();
    let scale = (n as f64).powf(2.0 * hurst);
    let mut worst: f64 = 0.0;
    for &t in &ts {
        for k in 0..n {
            worst = worst.max(eps_del(hurst, n, t, k).abs() * scale);
        }
    }
    worst
}

/// `sup_t Σ_k |⟨ε_t, ∂_{k/n}⟩|`, the sup taken over 257 equispaced and
/// `random_t` random points.
pub fn eps_del_row_sup(hurst: f64, n: usize, random_t: usize, seed: u64) -> f64 {
    let mut rng = stream(seed, StreamTag::Synthetic, (n as u64) << 20);
    let ts: Vec<f64> = (0..=256)
        .map(|j| j as f64 / 256.0)
        .chain((0..random_t).map(|_| rng.random::<f64>()))
        .collect();
    ts.iter()
        .map(|&t| (0..n).map(|k| eps_del(hurst, n, t, k).abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `n^{2H(q-1)} Σ_k |α_{k,k}^q - (-1)^q / (2^q n^{2qH})|`.
pub fn diagonal_rate(hurst: f64, q: u32, n: usize) -> f64 {
    let nf = n as f64;
    let target = (-1.0f64).powi(q as i32) / (2.0f64.powi(q as i32) * nf.powf(2.0 * q as f64 * hurst));
    let s: f64 = (0..n)
        .map(|k| (alpha_diag(hurst, n, k).powi(q as i32) - target).abs())
        .sum();
    s * nf.powf(2.0 * hurst * (q as f64 - 1.0))
}

/// `n^{2qH-1} Σ_{k,j} |β_{k,j}|^q`, folded over lags.
pub fn offdiagonal_rate(hurst: f64, q: u32, n: usize) -> f64 {
    let nf = n as f64;
    let mut s = 1.0;
    for r in 1..n {
        s += 2.0 * (1.0 - r as f64 / nf) * rho(hurst, r as i64).abs().powi(q as i32);
    }
    // n^{2qH-1} · n · n^{-2qH} · (1/n) Σ_{|r|<n} (n-|r|) |ρ(r)|^q
    s
}

#[derive(Debug, Clone, Serialize)]
struct RateRow {
    hurst: f64,
    q: u32,
    values: Vec<f64>,
    bound: f64,
}

/// Runs every inequality for the configured Hurst indices and orders.
pub fn property_suite(seed: u64) -> Result<Vec<TestReport>> {
    let mut out = Vec::new();

    let mut worst: f64 = 0.0;
    for &h in &HURSTS {
        worst = worst.max(level_increment_ratio(h, 10_000, seed));
    }
    out.push(
        TestReport::new("level_increment_covariance_bound", worst, 1.0 + SLACK)
            .with_sizes([10_000])
            .with_seeds([seed])
            .detail("hursts", HURSTS),
    );

    let mut worst: f64 = 0.0;
    for &h in &HURSTS {
        for n in [8, 64, 512] {
            worst = worst.max(eps_del_ratio(h, n, 200, seed));
        }
    }
    out.push(
        TestReport::new("eps_del_pointwise_bound", worst, 1.0 + SLACK)
            .with_sizes([8, 64, 512])
            .with_seeds([seed]),
    );

    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for &h in &HURSTS {
        let small = eps_del_row_sup(h, 8, 64, seed);
        let large = eps_del_row_sup(h, 512, 64, seed);
        let largest = eps_del_row_sup(h, 4096, 64, seed);
        let cap = 2.0 * small + 1.0;
        worst = worst.max(large.max(largest) / cap);
        rows.push((h, small, large, largest));
    }
    out.push(
        TestReport::new("eps_del_row_sum_bounded", worst, 1.0)
            .with_sizes([8, 512, 4096])
            .with_seeds([seed])
            .detail("sup_by_hurst_n8_n512_n4096", rows),
    );

    let ns = rate_grid();
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for &h in &HURSTS {
        for &q in &ORDERS {
            let values: Vec<f64> = ns.iter().map(|&n| diagonal_rate(h, q, n)).collect();
            // |(x-1)^q - (-1)^q| ≤ (2^q - 1) x for x ∈ [0,1], and Σ_k x_k = n^{2H}.
            let bound = 1.0 - 0.5f64.powi(q as i32);
            worst = worst.max(values.iter().cloned().fold(0.0, f64::max) / bound);
            rows.push(RateRow {
                hurst: h,
                q,
                values,
                bound,
            });
        }
    }
    out.push(
        TestReport::new("diagonal_alpha_rate", worst, 1.0 + SLACK)
            .with_sizes(ns.clone())
            .detail("rows", &rows),
    );

    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for &h in &HURSTS {
        for &q in &ORDERS {
            let values: Vec<f64> = ns.iter().map(|&n| offdiagonal_rate(h, q, n)).collect();
            let bound = rho_power_sum(h, q, 1e-10, true)?.sum;
            worst = worst.max(values.iter().cloned().fold(0.0, f64::max) / bound);
            rows.push(RateRow {
                hurst: h,
                q,
                values,
                bound,
            });
        }
    }
    out.push(
        TestReport::new("offdiagonal_beta_rate", worst, 1.0 + SLACK)
            .with_sizes(ns)
            .detail("rows", &rows),
    );

    Ok(out)
}
