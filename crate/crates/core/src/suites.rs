//! Verification suites shared by the command-line tool and the acceptance
//! runner. Each suite returns a [`SuiteReport`] whose serialized form,
//! apart from the `meta` block, depends only on the configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fbm::covariance::{rho, FbmGrid};
use crate::fbm::properties::property_suite;
use crate::fbm::sampler::{embedding_spectrum, increment_covariance, sample_paths, IncrementSampler, SamplingMethod};
use crate::fbm::FbmPathBatch;
use crate::gaussian::hermite::Normalization;
use crate::gaussian::identities::{identity_instance, IDENTITY_NAMES};
use crate::limits::brownian::{condition_a, simulate as simulate_brownian};
use crate::limits::distribution::{conditional_cf_test, ks_two_sample_named, CF_LAMBDAS};
use crate::limits::mixture::{path_functionals, sample_mixture_limit, MixtureSpec};
use crate::limits::moments::{berry_esseen_check, chaos2_fourth_moment_exact};
use crate::report::TestReport;
use crate::rng::derive_seed;
use crate::stats::{mean, variance, MeanEstimate};
use crate::variations::constants::{critical_upper_constant, sigma_hq};
use crate::variations::regime::{classify_regime, RegimeLabel};
use crate::variations::result::{run_variation as run_variation_paths, VariationRun};
use crate::variations::statistic::{correction_constant, VariationEvaluator};
use crate::variations::weight::WeightFunction;

/// `v<crate version>`, followed by `-<describe>` when the build sets
/// `CHAOSLAB_GIT_DESCRIBE`.
pub fn version_string() -> String {
    match option_env!("CHAOSLAB_GIT_DESCRIBE") {
        Some(d) if !d.is_empty() => format!("v{}-{d}", env!("CARGO_PKG_VERSION")),
        _ => format!("v{}", env!("CARGO_PKG_VERSION")),
    }
}

mod weight_string {
    use super::WeightFunction;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(w: &WeightFunction, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(w)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<WeightFunction, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Flat run parameters; JSON keys mirror the command-line flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub q: usize,
    #[serde(rename = "H")]
    pub hurst: f64,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    #[serde(with = "weight_string")]
    pub weight: WeightFunction,
    pub normalization: Normalization,
    /// Normalization of the limit constants in `limit-test`; defaults to
    /// `normalization`.
    pub constants_normalization: Option<Normalization>,
    /// Sampling method; by default Cholesky up to `n = 512`, circulant above.
    pub method: Option<SamplingMethod>,
    pub decompose: bool,
    pub n_fine: usize,
    pub instances: usize,
    pub identity_tol: f64,
    pub decomposition_tol: f64,
    pub variance_rel_tol: f64,
    pub alpha: f64,
    pub export_paths: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            q: 2,
            hurst: 0.3,
            n: 1024,
            m: 1000,
            seed: 1,
            weight: WeightFunction::cosine(),
            normalization: Normalization::Monic,
            constants_normalization: None,
            method: None,
            decompose: false,
            n_fine: 4096,
            instances: 200,
            identity_tol: 1e-9,
            decomposition_tol: 1e-8,
            variance_rel_tol: 0.05,
            alpha: 0.01,
            export_paths: false,
        }
    }
}

impl SuiteConfig {
    pub fn method(&self) -> SamplingMethod {
        self.method.unwrap_or_else(|| SamplingMethod::default_for(self.n))
    }

    pub fn grid(&self) -> Result<FbmGrid> {
        FbmGrid::new(self.hurst, self.n)
    }

    /// Range checks shared by all suites.
    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        if self.q == 0 || self.q > crate::variations::MAX_Q {
            return Err(Error::Parameter(format!(
                "q must lie in 1..={}, got {}",
                crate::variations::MAX_Q,
                self.q
            )));
        }
        self.weight.validate()?;
        if self.method == Some(SamplingMethod::Cholesky) && self.n > crate::fbm::sampler::CHOLESKY_MAX_N {
            return Err(Error::Parameter(format!(
                "cholesky sampling supports n <= {}, got {}",
                crate::fbm::sampler::CHOLESKY_MAX_N,
                self.n
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Parameter(format!("alpha must lie in (0,1), got {}", self.alpha)));
        }
        for (name, v) in [
            ("identity_tol", self.identity_tol),
            ("decomposition_tol", self.decomposition_tol),
            ("variance_rel_tol", self.variance_rel_tol),
        ] {
            if !(v > 0.0) {
                return Err(Error::Parameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Non-reproducible facts about a run, kept apart from the rest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub timestamp_unix: u64,
    pub runtime_secs: f64,
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub version: String,
    pub config: SuiteConfig,
    pub passed: bool,
    pub checks: Vec<TestReport>,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
    #[serde(skip)]
    pub samples_csv: Option<String>,
    #[serde(skip)]
    pub paths: Option<FbmPathBatch>,
}

impl SuiteReport {
    fn new(suite: &str, config: &SuiteConfig, checks: Vec<TestReport>, results: Value, started: Instant) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            version: version_string(),
            config: config.clone(),
            passed: checks.iter().all(|c| c.passed()),
            checks,
            results,
            meta: Some(Meta {
                timestamp_unix: SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0),
                runtime_secs: started.elapsed().as_secs_f64(),
                threads: rayon::current_num_threads(),
            }),
            samples_csv: None,
            paths: None,
        }
    }

    fn with_csv(mut self, csv: String) -> Self {
        self.samples_csv = Some(csv);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with the `meta` block removed, for reproducibility checks.
    pub fn to_json_without_meta(&self) -> String {
        let mut copy = self.clone();
        copy.meta = None;
        copy.to_json()
    }
}

/// Randomized Malliavin-calculus identities.
pub fn identities(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let started = Instant::now();
    let errors: Vec<[f64; 6]> = (0..cfg.instances as u64)
        .into_par_iter()
        .map(|i| identity_instance(cfg.seed, i))
        .collect::<Result<_>>()?;
    let checks: Vec<TestReport> = IDENTITY_NAMES
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let worst = errors.iter().map(|e| e[j]).fold(0.0, f64::max);
            TestReport::new(*name, worst, cfg.identity_tol)
                .with_sizes([cfg.instances])
                .with_seeds([cfg.seed])
        })
        .collect();
    let mut csv = format!("instance,{}\n", IDENTITY_NAMES.join(","));
    for (i, e) in errors.iter().enumerate() {
        let cells: Vec<String> = e.iter().map(|v| format!("{v:e}")).collect();
        let _ = writeln!(csv, "{i},{}", cells.join(","));
    }
    let results = json!({ "instances": cfg.instances });
    Ok(SuiteReport::new("identities", cfg, checks, results, started).with_csv(csv))
}

/// Grid inequalities, sampler exactness and determinism, and a sample of
/// paths at the configured `(H, n, m)`.
pub fn fbm(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let started = Instant::now();
    let grid = cfg.grid()?;
    let method = cfg.method();
    let mut checks = property_suite(cfg.seed)?;

    // Cholesky reconstruction on a small grid.
    let small = FbmGrid::new(cfg.hurst, cfg.n.min(64))?;
    let chol = IncrementSampler::new(small, SamplingMethod::Cholesky)?;
    let l = chol.cholesky_factor().expect("cholesky sampler");
    let cov = increment_covariance(&small);
    let ns = small.n;
    let mut recon: f64 = 0.0;
    for i in 0..ns {
        for j in 0..ns {
            let v: f64 = (0..ns).map(|k| l[i * ns + k] * l[j * ns + k]).sum();
            recon = recon.max((v - cov[(i, j)]).abs());
        }
    }
    checks.push(TestReport::new("cholesky_reconstruction", recon, 1e-10).with_sizes([ns]));

    let spectrum = embedding_spectrum(&grid);
    let max = spectrum.iter().cloned().fold(f64::MIN, f64::max);
    let min = spectrum.iter().cloned().fold(f64::MAX, f64::min);
    let trace: f64 = spectrum.iter().sum();
    let trace_target = 2.0 * (grid.n as f64).powf(1.0 - 2.0 * grid.hurst);
    checks.push(
        TestReport::new("embedding_nonnegative", (-min / max).max(0.0), 1e-8)
            .with_sizes([grid.n])
            .detail("min_eigenvalue", min)
            .detail("max_eigenvalue", max),
    );
    checks.push(TestReport::new(
        "embedding_trace",
        (trace - trace_target).abs() / trace_target,
        1e-9,
    ));

    let batch = sample_paths(grid, cfg.m, cfg.seed, method)?;
    let one = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| Error::Parameter(e.to_string()))?;
    let probe = cfg.m.min(8);
    let serial = one.install(|| sample_paths(grid, probe, cfg.seed, method))?;
    let same = (0..probe).all(|i| serial.levels(i) == batch.levels(i));
    checks.push(TestReport::new("thread_independence", if same { 0.0 } else { 1.0 }, 0.0).with_seeds([cfg.seed]));

    let mut row_err: f64 = 0.0;
    for i in 0..batch.len() {
        let s: f64 = batch.increments(i).iter().sum();
        row_err = row_err.max((s - batch.levels(i)[grid.n]).abs());
    }
    checks.push(TestReport::new("levels_reconstruct", row_err, 1e-10));

    let mut results = json!({ "method": method, "paths": batch.len() });
    if cfg.m >= 2 {
        // Var(B_1) = 1 and the lag-1 increment covariance, one product per path.
        let ends: Vec<f64> = (0..batch.len()).map(|i| batch.levels(i)[grid.n] * batch.levels(i)[grid.n]).collect();
        let end_var = MeanEstimate::of(&ends);
        checks.push(
            TestReport::new("terminal_variance", end_var.z_score(1.0).abs(), 4.0)
                .with_sizes([cfg.m])
                .with_seeds([cfg.seed])
                .detail("mean_b1_sq", end_var.mean),
        );
        results["terminal_variance"] = json!(end_var.mean);
        if grid.n >= 2 {
            let lag1: Vec<f64> = (0..batch.len())
                .map(|i| {
                    let inc = batch.increments(i);
                    let k = i % (grid.n - 1);
                    inc[k] * inc[k + 1]
                })
                .collect();
            let target = grid.increment_variance() * rho(grid.hurst, 1);
            let e = MeanEstimate::of(&lag1);
            checks.push(
                TestReport::new("lag1_covariance", e.z_score(target).abs(), 4.0)
                    .with_sizes([cfg.m])
                    .with_seeds([cfg.seed])
                    .detail("estimate", e.mean)
                    .detail("target", target),
            );
        }
    }
    let mut csv = String::from("path,b1,sum_sq_increments\n");
    for i in 0..batch.len() {
        let qv: f64 = batch.increments(i).iter().map(|d| d * d).sum();
        let _ = writeln!(csv, "{i},{:e},{:e}", batch.levels(i)[grid.n], qv);
    }
    let mut report = SuiteReport::new("fbm", cfg, checks, results, started).with_csv(csv);
    if cfg.export_paths {
        report.paths = Some(batch);
    }
    Ok(report)
}

fn regime_scan(q: usize) -> Value {
    let mut hs: Vec<f64> = (1..20).map(|i| i as f64 * 0.05).collect();
    hs.push(1.0 / (2.0 * q as f64));
    hs.push(1.0 - 1.0 / (2.0 * q as f64));
    hs.sort_by(f64::total_cmp);
    hs.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    Value::Array(
        hs.into_iter()
            .map(|h| json!({ "H": h, "regime": classify_regime(q, h).label }))
            .collect(),
    )
}

/// `G_n`, its correction, renormalization and (optionally) the exact
/// decomposition on `m` paths.
pub fn variation(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let started = Instant::now();
    let run = VariationRun {
        q: cfg.q,
        hurst: cfg.hurst,
        n: cfg.n,
        m: cfg.m,
        seed: cfg.seed,
        method: cfg.method(),
        weight: cfg.weight.clone(),
        normalization: cfg.normalization,
        decompose: cfg.decompose,
    };
    let res = run_variation_paths(&run)?;
    let mut checks = Vec::new();
    if let Some(r) = res.max_residual() {
        checks.push(
            TestReport::new("decomposition_residual", r, cfg.decomposition_tol)
                .with_sizes([cfg.n, cfg.m])
                .with_seeds([cfg.seed]),
        );
    }
    let summary = res.summary();
    let mut results = json!({
        "summary": summary,
        "regime_scan": regime_scan(cfg.q),
    });
    if summary.regime.label == RegimeLabel::Lower && cfg.m >= 1 {
        results["lower_regime_l2_distance"] = json!(lower_regime_distance(cfg, cfg.n)?);
    }
    let mut csv = Vec::new();
    res.write_csv(&mut csv)?;
    let csv = String::from_utf8(csv).expect("ascii csv");
    Ok(SuiteReport::new("variation", cfg, checks, results, started).with_csv(csv))
}

/// Per-path output of the streamed limit run.
#[derive(Debug, Clone, Copy)]
struct LimitRow {
    g_n: f64,
    corrected: f64,
    int_f_sq: f64,
    drift: f64,
}

/// Compares `G_n` with its predicted mixed Gaussian limit. Off the critical
/// value the corrected statistic is compared with `σ (∫f²)^{1/2} N`; at
/// `H = 1/(2q)` the uncorrected one is compared with the drift plus mixture.
pub fn limit_test(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let started = Instant::now();
    let grid = cfg.grid()?;
    let q = cfg.q;
    let regime = classify_regime(q, cfg.hurst);
    let critical = regime.label == RegimeLabel::CriticalLower;
    if !matches!(regime.label, RegimeLabel::MixedClt | RegimeLabel::CriticalLower) {
        return Err(Error::Parameter(format!(
            "limit-test needs 1/(2q) <= H < 1-1/(2q); (q={q}, H={}) is {:?}",
            cfg.hurst, regime.label
        )));
    }
    let constants_norm = cfg.constants_normalization.unwrap_or(cfg.normalization);
    let sigma = sigma_hq(cfg.hurst, q, 1e-10)?;
    let sigma_c = sigma.sigma * constants_norm.factor(q);
    let sigma_c_sq = sigma_c * sigma_c;
    let drift_c = correction_constant(q, constants_norm);

    let ev = VariationEvaluator::new(grid, q, cfg.weight.clone(), cfg.normalization)?;
    let sampler = IncrementSampler::new(grid, cfg.method())?;
    let rows: Vec<LimitRow> = sampler.map_paths(cfg.seed, cfg.m, |_, lv, inc| {
        let t = ev.evaluate(lv, inc, false);
        let (int_f_sq, int_dq) = path_functionals(lv, &cfg.weight, q);
        LimitRow {
            g_n: t.g_n,
            corrected: t.corrected,
            int_f_sq,
            drift: drift_c * int_dq,
        }
    });
    let target: Vec<f64> = rows.iter().map(|r| if critical { r.g_n } else { r.corrected }).collect();
    let s2: Vec<f64> = rows.iter().map(|r| sigma_c_sq * r.int_f_sq).collect();
    let drifts: Vec<f64> = rows.iter().map(|r| r.drift).collect();

    let mixture_seed = derive_seed(cfg.seed, 0x6d69_7874);
    let mixture = sample_mixture_limit(
        &MixtureSpec {
            q,
            hurst: cfg.hurst,
            weight: cfg.weight.clone(),
            n_fine: cfg.n_fine,
            sigma: sigma_c,
            drift_constant: critical.then_some(drift_c),
        },
        cfg.m,
        mixture_seed,
    )?;

    let mut checks = Vec::new();
    let var_target = variance(&target);
    let mean_s2 = mean(&s2);
    if !critical {
        let rel = (var_target - mean_s2).abs() / mean_s2;
        checks.push(
            TestReport::new("variance_vs_mixture", rel, cfg.variance_rel_tol)
                .with_sizes([cfg.n, cfg.m])
                .with_seeds([cfg.seed])
                .detail("variance", var_target)
                .detail("predicted", mean_s2),
        );
    }
    checks.push(
        ks_two_sample_named("ks_vs_mixture", &target, &mixture.values, cfg.alpha)?
            .with_seeds([cfg.seed, mixture_seed]),
    );
    checks.push(
        conditional_cf_test(&target, &s2, critical.then_some(drifts.as_slice()), &CF_LAMBDAS)?
            .with_seeds([cfg.seed]),
    );

    let results = json!({
        "regime": regime,
        "statistic": if critical { "g_n" } else { "corrected" },
        "sigma_sq": sigma.sigma_sq,
        "constants_normalization": constants_norm,
        "limit_variance_constant": sigma_c_sq,
        "drift_constant": drift_c,
        "mean_int_f_sq": mean(&rows.iter().map(|r| r.int_f_sq).collect::<Vec<_>>()),
        "statistic_mean": mean(&target),
        "statistic_variance": var_target,
        "mixture_mean": mean(&mixture.values),
        "mixture_variance": variance(&mixture.values),
    });
    let mut csv = String::from("path,g_n,corrected,s2,drift,mixture\n");
    for (i, r) in rows.iter().enumerate() {
        let _ = writeln!(
            csv,
            "{i},{:e},{:e},{:e},{:e},{:e}",
            r.g_n, r.corrected, s2[i], r.drift, mixture.values[i]
        );
    }
    Ok(SuiteReport::new("limit-test", cfg, checks, results, started).with_csv(csv))
}

/// Relative L² distance between `n^{qH-1/2} G_n` and `c_q (1/n) Σ_k f^{(q)}(B_{k/n})`.
pub fn lower_regime_distance(cfg: &SuiteConfig, n: usize) -> Result<f64> {
    let grid = FbmGrid::new(cfg.hurst, n)?;
    let ev = VariationEvaluator::new(grid, cfg.q, cfg.weight.clone(), cfg.normalization)?;
    let c = ev.correction_constant();
    let sampler = IncrementSampler::new(grid, SamplingMethod::default_for(n))?;
    let pairs = sampler.map_paths(cfg.seed, cfg.m, |_, lv, inc| {
        let t = ev.evaluate(lv, inc, false);
        let (_, int_dq) = path_functionals(lv, &cfg.weight, cfg.q);
        let lhs = (n as f64).powf(cfg.q as f64 * cfg.hurst - 0.5) * t.g_n;
        let rhs = c * int_dq;
        ((lhs - rhs).powi(2), rhs * rhs)
    });
    let num: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let den: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    Ok((mean(&num) / mean(&den)).sqrt())
}

/// Lower-regime L² convergence along `ns`: distances must decrease and the
/// last must be at most `tol`.
pub fn lower_regime_scan(cfg: &SuiteConfig, ns: &[usize], tol: f64) -> Result<TestReport> {
    let ds = ns
        .iter()
        .map(|&n| lower_regime_distance(cfg, n))
        .collect::<Result<Vec<f64>>>()?;
    let decreasing = ds.windows(2).all(|w| w[1] < w[0]);
    let last = *ds.last().ok_or(Error::EmptyInput("lower regime scan needs n values"))?;
    let statistic = if decreasing { last } else { f64::INFINITY };
    Ok(TestReport::new("lower_regime_l2", statistic, tol)
        .with_sizes(ns.iter().copied().chain([cfg.m]))
        .with_seeds([cfg.seed])
        .detail("distances", &ds)
        .detail("decreasing", decreasing))
}

/// Exact fourth moments and the Monte Carlo Berry–Esseen comparison.
pub fn berry_esseen(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let started = Instant::now();
    let exact = chaos2_fourth_moment_exact(0.5, 4)?;
    let mut checks = vec![TestReport::new("exact_m4_brownian_n4", (exact.normalized_m4 - 6.0).abs(), 1e-10)];
    let be = berry_esseen_check(cfg.hurst, cfg.n, cfg.m, cfg.seed)?;
    let moments = chaos2_fourth_moment_exact(cfg.hurst, cfg.n)?;
    checks.push(be);
    let results = json!({ "moments": moments });
    Ok(SuiteReport::new("berry-esseen", cfg, checks, results, started))
}

/// The Brownian example `F_n = √n ∫ t^n W_t dW_t`.
pub fn example_brownian(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let started = Instant::now();
    let n = cfg.n;
    if cfg.m < 2 {
        return Err(Error::EmptyInput("Brownian example needs m >= 2"));
    }
    let run = simulate_brownian(n, cfg.m, cfg.seed)?;
    let f: Vec<f64> = run.replicas.iter().map(|r| r.f_n).collect();
    let u_df: Vec<f64> = run.replicas.iter().map(|r| r.u_df).collect();
    let f_sq: Vec<f64> = f.iter().map(|x| x * x).collect();
    let s2: Vec<f64> = run.replicas.iter().map(|r| 0.5 * r.w1 * r.w1).collect();
    let mean_check = |name: &str, xs: &[f64]| {
        let e = MeanEstimate::of(xs);
        TestReport::new(name, e.z_score(0.5).abs(), 3.0)
            .with_sizes([xs.len()])
            .with_seeds([cfg.seed])
            .detail("mean", e.mean)
            .detail("std_error", e.std_error)
    };
    let checks = vec![
        mean_check("mean_u_df", &u_df),
        mean_check("mean_f_sq", &f_sq),
        ks_two_sample_named("ks_vs_mixture", &f, &run.reference, cfg.alpha)?.with_seeds([cfg.seed]),
        conditional_cf_test(&f, &s2, None, &CF_LAMBDAS)?.with_seeds([cfg.seed]),
    ];
    let results = json!({
        "condition_a": condition_a(n),
        "exact_mean_u_df": n as f64 / (2.0 * n as f64 + 2.0),
    });
    let mut csv = String::from("path,f_n,u_df,w1\n");
    for (i, r) in run.replicas.iter().enumerate() {
        let _ = writeln!(csv, "{i},{:e},{:e},{:e}", r.f_n, r.u_df, r.w1);
    }
    Ok(SuiteReport::new("example-brownian", cfg, checks, results, started).with_csv(csv))
}

/// Tables of `ρ_H`, `σ²_{H,q}`, correction constants and the regime map.
pub fn constants(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let started = Instant::now();
    let q = cfg.q;
    let rho_table: Vec<f64> = (0..=10).map(|r| rho(cfg.hurst, r)).collect();
    let (sigma_sq, sigma_note) = match sigma_hq(cfg.hurst, q, 1e-10) {
        Ok(s) => (Some(s.sigma_sq), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let mut table = BTreeMap::new();
    for &h in &[0.1, 0.2, 0.25, 0.3, 0.4, 0.45, 0.5] {
        if let Ok(s) = sigma_hq(h, q, 1e-10) {
            table.insert(format!("{h}"), s.sigma_sq);
        }
    }
    let results = json!({
        "rho": rho_table,
        "sigma_sq": sigma_sq,
        "sigma_note": sigma_note,
        "sigma_sq_by_hurst": table,
        "correction_constant": {
            "monic": correction_constant(q, Normalization::Monic),
            "scaled": correction_constant(q, Normalization::Scaled),
        },
        "critical_upper_constant": critical_upper_constant(q),
        "regime": classify_regime(q, cfg.hurst),
        "regime_scan": regime_scan(q),
    });
    let mut csv = String::from("lag,rho\n");
    for (r, v) in rho_table.iter().enumerate() {
        let _ = writeln!(csv, "{r},{v:e}");
    }
    Ok(SuiteReport::new("constants", cfg, Vec::new(), results, started).with_csv(csv))
}
