//! Pass/fail records shared by every verification suite.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

/// One check: `verdict` is `Pass` iff `statistic <= threshold` (NaN fails).
/// `runtime_secs` is not serialized so that reports are reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub name: String,
    pub sample_sizes: Vec<usize>,
    pub statistic: f64,
    pub threshold: f64,
    pub verdict: Verdict,
    pub seeds: Vec<u64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, Value>,
    #[serde(skip)]
    pub runtime_secs: Option<f64>,
}

impl TestReport {
    pub fn new(name: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        let verdict = if statistic <= threshold {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        TestReport {
            name: name.into(),
            sample_sizes: Vec::new(),
            statistic,
            threshold,
            verdict,
            seeds: Vec::new(),
            details: BTreeMap::new(),
            runtime_secs: None,
        }
    }

    pub fn with_sizes(mut self, sizes: impl IntoIterator<Item = usize>) -> Self {
        self.sample_sizes = sizes.into_iter().collect();
        self
    }

    pub fn with_seeds(mut self, seeds: impl IntoIterator<Item = u64>) -> Self {
        self.seeds = seeds.into_iter().collect();
        self
    }

    pub fn detail(mut self, key: &str, value: impl Serialize) -> Self {
        self.details
            .insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    pub fn with_runtime(mut self, secs: f64) -> Self {
        self.runtime_secs = Some(secs);
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }

    /// Combines several checks into one: fails if any part fails. The
    /// statistic is the largest `statistic / threshold` ratio.
    pub fn all_of(name: impl Into<String>, parts: &[TestReport]) -> Self {
        let worst = parts
            .iter()
            .map(|r| {
                let ratio = if r.threshold > 0.0 { r.statistic / r.threshold } else { 0.0 };
                match (r.passed(), ratio > 1.0) {
                    (true, _) => ratio,
                    (false, true) => ratio,
                    (false, false) => f64::INFINITY,
                }
            })
            .fold(0.0, f64::max);
        let mut seeds: Vec<u64> = parts.iter().flat_map(|r| r.seeds.iter().copied()).collect();
        seeds.sort_unstable();
        seeds.dedup();
        let failed: Vec<&str> = parts.iter().filter(|r| !r.passed()).map(|r| r.name.as_str()).collect();
        TestReport::new(name, worst, 1.0)
            .with_seeds(seeds)
            .detail("parts", parts.len())
            .detail("failed", failed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_follows_threshold() {
        assert!(TestReport::new("a", 1.0, 1.0).passed());
        assert!(!TestReport::new("a", 1.1, 1.0).passed());
        assert!(!TestReport::new("a", f64::NAN, 1.0).passed());
    }

    #[test]
    fn runtime_is_not_serialized() {
        let r = TestReport::new("a", 0.5, 1.0).with_runtime(3.0);
        let s = serde_json::to_string(&r).unwrap();
        assert!(!s.contains("runtime"));
    }

    #[test]
    fn combined_report_fails_with_any_part() {
        let ok = TestReport::new("ok", 0.5, 1.0);
        let bad = TestReport::new("bad", 2.0, 1.0);
        assert!(TestReport::all_of("x", &[ok.clone(), ok.clone()]).passed());
        let both = TestReport::all_of("x", &[ok, bad]);
        assert!(!both.passed());
        assert_eq!(both.details["failed"], serde_json::json!(["bad"]));
    }
}
