//! Batch drivers and serialization of variation results.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fbm::sampler::{FbmPathBatch, IncrementSampler, SamplingMethod};
use crate::fbm::covariance::FbmGrid;
use crate::gaussian::hermite::Normalization;
use crate::stats::MeanEstimate;
use crate::variations::an::AnEvaluator;
use crate::variations::constants::sigma_hq;
use crate::variations::regime::RegimeSpec;
use crate::variations::statistic::{Decomposition, PathTerms, VariationEvaluator};
use crate::variations::weight::WeightFunction;

/// Per-path arrays (all of length `m`) plus run metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationResult {
    pub q: usize,
    pub hurst: f64,
    pub n: usize,
    pub normalization: Normalization,
    pub seed: u64,
    pub method: SamplingMethod,
    pub weight: WeightFunction,
    pub regime: RegimeSpec,
    pub g_n: Vec<f64>,
    pub correction: Vec<f64>,
    pub corrected: Vec<f64>,
    pub renormalized: Vec<f64>,
    pub decomposition: Option<Vec<Decomposition>>,
}

impl VariationResult {
    fn assemble(ev: &VariationEvaluator, seed: u64, method: SamplingMethod, terms: Vec<PathTerms>) -> Self {
        let decomposition = terms
            .first()
            .is_some_and(|t| t.decomposition.is_some())
            .then(|| terms.iter().map(|t| t.decomposition.clone().expect("decomposed")).collect());
        VariationResult {
            q: ev.q,
            hurst: ev.grid.hurst,
            n: ev.grid.n,
            normalization: ev.normalization,
            seed,
            method,
            weight: ev.weight.clone(),
            regime: ev.regime.clone(),
            g_n: terms.iter().map(|t| t.g_n).collect(),
            correction: terms.iter().map(|t| t.correction).collect(),
            corrected: terms.iter().map(|t| t.corrected).collect(),
            renormalized: terms.iter().map(|t| t.renormalized).collect(),
            decomposition,
        }
    }

    pub fn len(&self) -> usize {
        self.g_n.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g_n.is_empty()
    }

    /// Largest decomposition residual, if decomposed.
    pub fn max_residual(&self) -> Option<f64> {
        self.decomposition
            .as_ref()
            .map(|d| d.iter().map(|c| c.residual).fold(0.0, f64::max))
    }

    /// One row per path.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let middle = self.q.saturating_sub(1);
        write!(w, "path,g_n,correction,corrected,renormalized")?;
        if self.decomposition.is_some() {
            write!(w, ",main")?;
            for r in 1..=middle {
                write!(w, ",middle_{r}")?;
            }
            write!(w, ",remainder,residual")?;
        }
        writeln!(w)?;
        for i in 0..self.len() {
            write!(
                w,
                "{i},{:e},{:e},{:e},{:e}",
                self.g_n[i], self.correction[i], self.corrected[i], self.renormalized[i]
            )?;
            if let Some(d) = &self.decomposition {
                let d = &d[i];
                write!(w, ",{:e}", d.main)?;
                for v in &d.middle {
                    write!(w, ",{v:e}")?;
                }
                write!(w, ",{:e},{:e}", d.remainder, d.residual)?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn summary(&self) -> VariationSummary {
        let sigma = sigma_hq(self.hurst, self.q, 1e-10).ok();
        VariationSummary {
            m: self.len(),
            g_n: Moments::of(&self.g_n),
            corrected: Moments::of(&self.corrected),
            renormalized: Moments::of(&self.renormalized),
            correction_constant: crate::variations::statistic::correction_constant(self.q, self.normalization),
            sigma_sq: sigma.map(|s| s.sigma_sq),
            max_residual: self.max_residual(),
            regime: self.regime.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub mean_std_error: f64,
    pub variance: f64,
}

impl Moments {
    pub fn of(xs: &[f64]) -> Self {
        let e = MeanEstimate::of(xs);
        Moments {
            mean: e.mean,
            mean_std_error: e.std_error,
            variance: crate::stats::variance(xs),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationSummary {
    pub m: usize,
    pub g_n: Moments,
    pub corrected: Moments,
    pub renormalized: Moments,
    pub correction_constant: f64,
    pub sigma_sq: Option<f64>,
    pub max_residual: Option<f64>,
    pub regime: RegimeSpec,
}

fn evaluate_batch(batch: &FbmPathBatch, ev: &VariationEvaluator, decompose: bool) -> Vec<PathTerms> {
    (0..batch.len())
        .into_par_iter()
        .map(|i| ev.evaluate(batch.levels(i), batch.increments(i), decompose))
        .collect()
}

/// `G_n`, correction and renormalization for every path of `batch`.
pub fn weighted_variation(
    batch: &FbmPathBatch,
    q: usize,
    f: &WeightFunction,
    normalization: Normalization,
) -> Result<VariationResult> {
    let ev = VariationEvaluator::new(batch.grid, q, f.clone(), normalization)?;
    let terms = evaluate_batch(batch, &ev, false);
    Ok(VariationResult::assemble(&ev, batch.seed, batch.method, terms))
}

/// `c_q n^{-1/2-qH} Σ_k f^{(q)}(B_{k/n})` per path.
pub fn correction_term(
    batch: &FbmPathBatch,
    q: usize,
    f: &WeightFunction,
    normalization: Normalization,
) -> Result<Vec<f64>> {
    Ok(weighted_variation(batch, q, f, normalization)?.correction)
}

/// Decomposition components per path.
pub fn decompose_gn(
    batch: &FbmPathBatch,
    q: usize,
    f: &WeightFunction,
    normalization: Normalization,
) -> Result<Vec<Decomposition>> {
    let ev = VariationEvaluator::new(batch.grid, q, f.clone(), normalization)?;
    Ok(evaluate_batch(batch, &ev, true)
        .into_iter()
        .map(|t| t.decomposition.expect("decomposed"))
        .collect())
}

/// `A_n` per path.
pub fn a_n_statistic(batch: &FbmPathBatch, q: usize, f: &WeightFunction) -> Result<Vec<f64>> {
    let ev = AnEvaluator::new(batch.grid, q)?;
    Ok((0..batch.len())
        .into_par_iter()
        .map(|i| ev.evaluate(batch.levels(i), f))
        .collect())
}

/// Settings for a streamed variation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationRun {
    pub q: usize,
    pub hurst: f64,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub method: SamplingMethod,
    pub weight: WeightFunction,
    pub normalization: Normalization,
    pub decompose: bool,
}

/// Samples and evaluates paths one at a time, without storing the batch.
/// Identical to sampling the batch first and calling [`weighted_variation`].
pub fn run_variation(cfg: &VariationRun) -> Result<VariationResult> {
    let grid = FbmGrid::new(cfg.hurst, cfg.n)?;
    let ev = VariationEvaluator::new(grid, cfg.q, cfg.weight.clone(), cfg.normalization)?;
    let sampler = IncrementSampler::new(grid, cfg.method)?;
    let terms = sampler.map_paths(cfg.seed, cfg.m, |_, lv, inc| ev.evaluate(lv, inc, cfg.decompose));
    Ok(VariationResult::assemble(&ev, cfg.seed, cfg.method, terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbm::sample_paths;

    #[test]
    fn streamed_equals_batched() {
        let cfg = VariationRun {
            q: 2,
            hurst: 0.3,
            n: 64,
            m: 20,
            seed: 4,
            method: SamplingMethod::Cholesky,
            weight: WeightFunction::cosine(),
            normalization: Normalization::Monic,
            decompose: false,
        };
        let streamed = run_variation(&cfg).unwrap();
        let batch = sample_paths(FbmGrid::new(0.3, 64).unwrap(), 20, 4, SamplingMethod::Cholesky).unwrap();
        let batched = weighted_variation(&batch, 2, &WeightFunction::cosine(), Normalization::Monic).unwrap();
        assert_eq!(streamed, batched);
    }

    #[test]
    fn zero_weight_gives_zeros() {
        let batch = sample_paths(FbmGrid::new(0.3, 32).unwrap(), 5, 1, SamplingMethod::Cholesky).unwrap();
        let r = weighted_variation(&batch, 2, &WeightFunction::constant(0.0), Normalization::Monic).unwrap();
        assert!(r.g_n.iter().all(|&g| g == 0.0));
        assert_eq!(r.len(), 5);
    }

    #[test]
    fn csv_has_one_row_per_path() {
        let batch = sample_paths(FbmGrid::new(0.3, 16).unwrap(), 3, 1, SamplingMethod::Cholesky).unwrap();
        let ev = VariationEvaluator::new(batch.grid, 3, WeightFunction::cosine(), Normalization::Monic).unwrap();
        let r = VariationResult::assemble(&ev, 1, SamplingMethod::Cholesky, evaluate_batch(&batch, &ev, true));
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(
            lines[0],
            "path,g_n,correction,corrected,renormalized,main,middle_1,middle_2,remainder,residual"
        );
        assert_eq!(lines[1].split(',').count(), 10);
    }
}
