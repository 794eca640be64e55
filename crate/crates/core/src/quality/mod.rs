//! Statistical hash-quality battery.
//!
//! Keyset tests report collisions and per-bit distribution bias; the
//! avalanche and differential tests perturb random messages.

pub mod avalanche;
pub mod birthday;
pub mod differential;
pub mod keyset;
pub mod stats;
pub mod stubs;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::hashing::HashFunction;
use crate::rng;

pub use avalanche::{avalanche_bias, avalanche_matrix, AvalancheMatrix};
pub use birthday::{collision_probability, CollisionModel};
pub use differential::{differential_test, DifferentialReport};
pub use keyset::{KeysetKind, KeysetSpec};
pub use stats::{analyze, count_collisions, distribution_bias, KeysetStats};

pub const REPORT_SCHEMA: u32 = 1;

/// The tests of the battery, in report column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QualityTest {
    Avalanche,
    Cyclic,
    TwoBytes,
    Differential,
    Sparse,
    Permutation,
    Window,
    Zeros,
}

impl QualityTest {
    pub const ALL: [QualityTest; 8] = [
        QualityTest::Avalanche,
        QualityTest::Cyclic,
        QualityTest::TwoBytes,
        QualityTest::Differential,
        QualityTest::Sparse,
        QualityTest::Permutation,
        QualityTest::Window,
        QualityTest::Zeros,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QualityTest::Avalanche => "avalanche",
            QualityTest::Cyclic => "cyclic",
            QualityTest::TwoBytes => "twobytes",
            QualityTest::Differential => "differential",
            QualityTest::Sparse => "sparse",
            QualityTest::Permutation => "permutation",
            QualityTest::Window => "window",
            QualityTest::Zeros => "zeros",
        }
    }

    /// Whether the report carries a distribution column.
    pub fn has_distribution(self) -> bool {
        !matches!(self, QualityTest::Avalanche | QualityTest::Differential | QualityTest::Window)
    }
}

impl fmt::Display for QualityTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QualityTest {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        QualityTest::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown quality test `{s}`")))
    }
}

/// Sizes of every test.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityConfig {
    pub seed: u64,
    pub avalanche_msg_bytes: usize,
    pub avalanche_samples: usize,
    pub differential_key_bytes: usize,
    pub differential_bits: usize,
    pub differential_pairs: usize,
    pub cyclic: KeysetKind,
    pub two_bytes: KeysetKind,
    pub sparse: KeysetKind,
    pub permutation: KeysetKind,
    pub window: KeysetKind,
    pub zeros: KeysetKind,
    pub memory_budget: u64,
}

impl QualityConfig {
    /// Sizes that finish in minutes on one core.
    pub fn desk(seed: u64) -> Self {
        QualityConfig {
            seed,
            avalanche_msg_bytes: 32,
            avalanche_samples: 100_000,
            differential_key_bytes: 8,
            differential_bits: 1,
            differential_pairs: differential::DEFAULT_PAIRS,
            cyclic: KeysetKind::Cyclic { pattern_bytes: 8, repeats: 8, samples: 100_000 },
            two_bytes: KeysetKind::TwoBytes { max_len: 8 },
            sparse: KeysetKind::Sparse { msg_bits: 512, max_set_bits: 3 },
            permutation: KeysetKind::Permutation {
                blocks: (0..8u32).map(|v| v.to_le_bytes().to_vec()).collect(),
                max_blocks: 8,
            },
            window: KeysetKind::Window { key_bits: 64, window_bits: 20 },
            zeros: KeysetKind::Zeros { max_len: 65536 },
            memory_budget: stats::DEFAULT_MEMORY_BUDGET,
        }
    }

    /// The keyset behind `test`, or `None` for the perturbation tests.
    pub fn keyset(&self, test: QualityTest) -> Option<KeysetSpec> {
        let kind = match test {
            QualityTest::Avalanche | QualityTest::Differential => return None,
            QualityTest::Cyclic => &self.cyclic,
            QualityTest::TwoBytes => &self.two_bytes,
            QualityTest::Sparse => &self.sparse,
            QualityTest::Permutation => &self.permutation,
            QualityTest::Window => &self.window,
            QualityTest::Zeros => &self.zeros,
        };
        Some(KeysetSpec::new(kind.clone(), self.test_seed(test)))
    }

    fn test_seed(&self, test: QualityTest) -> u64 {
        rng::split(self.seed, test as u64)
    }
}

/// One (hash, test) result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub schema: u32,
    pub hash: String,
    pub test: QualityTest,
    pub params: Value,
    pub sample_count: u64,
    pub collisions: Option<u64>,
    pub distribution_bias_pct: Option<f64>,
    pub avalanche_bias_pct: Option<f64>,
    pub differential: Option<DifferentialReport>,
}

pub fn run_test(hash: &dyn HashFunction, test: QualityTest, config: &QualityConfig) -> Result<TestReport> {
    let mut report = TestReport {
        schema: REPORT_SCHEMA,
        hash: hash.name(),
        test,
        params: Value::Null,
        sample_count: 0,
        collisions: None,
        distribution_bias_pct: None,
        avalanche_bias_pct: None,
        differential: None,
    };
    let seed = config.test_seed(test);
    match test {
        QualityTest::Avalanche => {
            report.params = serde_json::json!({
                "msg_bytes": config.avalanche_msg_bytes,
                "samples": config.avalanche_samples,
                "seed": seed,
            });
            report.sample_count = config.avalanche_samples as u64;
            report.avalanche_bias_pct =
                Some(avalanche_bias(hash, config.avalanche_msg_bytes, config.avalanche_samples, seed)?);
        }
        QualityTest::Differential => {
            let d = differential_test(
                hash,
                config.differential_key_bytes,
                config.differential_bits,
                config.differential_pairs,
                seed,
            )?;
            report.params = serde_json::json!({
                "key_bytes": d.key_bytes,
                "n_bits": d.n_bits,
                "pairs_per_subset": config.differential_pairs,
                "seed": seed,
            });
            report.sample_count = d.pairs;
            report.collisions = Some(d.collisions);
            report.differential = Some(d);
        }
        _ => {
            let ks = config.keyset(test).expect("keyset test");
            report.params = ks.params();
            let s = analyze(hash, &ks, config.memory_budget)?;
            report.sample_count = s.sample_count;
            report.collisions = Some(s.collisions);
            if test.has_distribution() {
                report.distribution_bias_pct = Some(s.distribution_bias_pct);
            }
        }
    }
    Ok(report)
}

/// Every requested test for one hash.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub hash_name: String,
    pub tests: Vec<TestReport>,
}

impl QualityReport {
    pub fn get(&self, test: QualityTest) -> Option<&TestReport> {
        self.tests.iter().find(|t| t.test == test)
    }

    /// One JSON document per line.
    pub fn to_json_lines(&self) -> Result<String> {
        let mut out = String::new();
        for t in &self.tests {
            out.push_str(&serde_json::to_string(t)?);
            out.push('\n');
        }
        Ok(out)
    }
}

pub fn run_battery(hash: &dyn HashFunction, tests: &[QualityTest], config: &QualityConfig) -> Result<QualityReport> {
    let tests = tests.iter().map(|&t| run_test(hash, t, config)).collect::<Result<_>>()?;
    Ok(QualityReport { hash_name: hash.name(), tests })
}

/// Header of [`csv_summary`]: one Col./Dist. pair per test.
pub fn csv_header() -> String {
    let mut cols = vec!["hash".to_string()];
    for t in QualityTest::ALL {
        match t {
            QualityTest::Avalanche => cols.push("avalanche_bias_pct".into()),
            _ => {
                cols.push(format!("{t}_col"));
                cols.push(format!("{t}_dist_pct"));
            }
        }
    }
    cols.join(",")
}

/// A table with one row per hash; tests not run or not applicable read `N/A`.
pub fn csv_summary(reports: &[QualityReport]) -> String {
    let na = || "N/A".to_string();
    let pct = |v: Option<f64>| v.map_or_else(na, |x| format!("{x:.3}"));
    let mut out = csv_header();
    out.push('\n');
    for r in reports {
        let mut row = vec![r.hash_name.clone()];
        for t in QualityTest::ALL {
            let tr = r.get(t);
            match t {
                QualityTest::Avalanche => row.push(pct(tr.and_then(|x| x.avalanche_bias_pct))),
                _ => {
                    row.push(tr.and_then(|x| x.collisions).map_or_else(na, |c| c.to_string()));
                    row.push(pct(tr.and_then(|x| x.distribution_bias_pct)));
                }
            }
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
