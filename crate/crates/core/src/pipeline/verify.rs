//! Monte Carlo check of the table's alpha = 1/2, 1, 2 rows.

use serde::{Deserialize, Serialize};

use super::table::ProbabilityTable;
use crate::error::Result;
use crate::numeric::format_rational;
use crate::quantum::{mc_separability, Ring};

/// Deviations beyond this many standard errors fail.
pub const SIGMA_LIMIT: f64 = 3.0;
/// A row whose `3 sigma` exceeds this fraction of the target is underpowered.
pub const POWER_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerdictStatus {
    Pass,
    Fail,
    LowPower,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictRow {
    pub ensemble: Ring,
    pub alpha: String,
    pub target: Option<String>,
    pub estimate: Option<f64>,
    pub std_error: Option<f64>,
    /// `(estimate - target) / std_error`.
    pub z_score: Option<f64>,
    pub samples: u64,
    pub seed: u64,
    pub status: VerdictStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub samples: u64,
    pub seed: u64,
    pub rows: Vec<VerdictRow>,
}

impl Verdict {
    pub fn any_failed(&self) -> bool {
        self.rows.iter().any(|r| r.status == VerdictStatus::Fail)
    }

    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.status == VerdictStatus::Pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

/// Classifies one estimate against its target.
pub fn classify(estimate: f64, std_error: f64, target: f64) -> VerdictStatus {
    if SIGMA_LIMIT * std_error > POWER_FRACTION * target.abs() {
        VerdictStatus::LowPower
    } else if (estimate - target).abs() <= SIGMA_LIMIT * std_error {
        VerdictStatus::Pass
    } else {
        VerdictStatus::Fail
    }
}

/// Samples each ensemble whose alpha has a row in `table` and compares.
pub fn verify_ensembles(table: &ProbabilityTable, samples: u64, seed: u64, threads: usize) -> Result<Verdict> {
    let mut rows = Vec::with_capacity(3);
    for ring in Ring::ALL {
        let alpha = ring.alpha();
        let Some(row) = table.get(&alpha) else {
            rows.push(VerdictRow {
                ensemble: ring,
                alpha: format_rational(&alpha),
                target: None,
                estimate: None,
                std_error: None,
                z_score: None,
                samples: 0,
                seed,
                status: VerdictStatus::Skipped,
            });
            continue;
        };
        let mc = mc_separability(ring, samples, seed, threads)?;
        let target = row.value.to_f64();
        let z = if mc.std_error > 0.0 { Some((mc.estimate - target) / mc.std_error) } else { None };
        rows.push(VerdictRow {
            ensemble: ring,
            alpha: format_rational(&alpha),
            target: Some(format_rational(&row.value)),
            estimate: Some(mc.estimate),
            std_error: Some(mc.std_error),
            z_score: z,
            samples,
            seed,
            status: classify(mc.estimate, mc.std_error, target),
        });
    }
    Ok(Verdict { samples, seed, rows })
}
