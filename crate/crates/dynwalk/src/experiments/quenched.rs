//! Quenched tail: one clock log per seed, many deviate realizations, and the
//! upper and lower bands for the quenched probability `W_n`.

use std::time::Instant;

use dynwalk_core::analytic::tail_f;
use dynwalk_core::clocks::sample_clocks;
use dynwalk_core::estimate::BandReport;
use dynwalk_core::rng::derive_seed;
use dynwalk_core::walk::{member_seed, walk_sup};
use serde::{Deserialize, Serialize};

use super::{check_expected_hits, estimate, invalid};
use crate::parallel::Runner;
use crate::report::{CsvRow, Tabular};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuenchedTailConfig {
    pub n: usize,
    pub z: f64,
    pub clock_seeds: Vec<u64>,
    pub paths: u64,
    pub seed: u64,
    /// Upper band `(2 + eps)·f(z)`.
    pub eps: f64,
    /// Lower band `slack_low·f(z)/9`.
    pub slack_low: f64,
    pub allow_rare: bool,
}

impl Default for QuenchedTailConfig {
    fn default() -> Self {
        Self {
            n: 10_000,
            z: 2.5,
            clock_seeds: vec![1, 2, 3, 4, 5],
            paths: 100_000,
            seed: 42,
            eps: 0.5,
            slack_low: 0.5,
            allow_rare: false,
        }
    }
}

impl QuenchedTailConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.paths == 0 || self.clock_seeds.is_empty() {
            return Err(invalid(
                "quenched tail needs n >= 2, paths >= 1 and a clock seed",
            ));
        }
        if !(self.eps >= 0.0) || !(self.slack_low > 0.0 && self.slack_low <= 1.0) {
            return Err(invalid(
                "quenched tail needs eps >= 0 and slack-low in (0, 1]",
            ));
        }
        check_expected_hits(self.z, self.paths, self.allow_rare)
    }

    /// Base of the deviate seeds used against clock log `clock_seed`.
    pub fn deviate_base(&self, clock_seed: u64) -> u64 {
        derive_seed(self.seed, clock_seed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuenchedRow {
    pub clock_seed: u64,
    pub events: usize,
    pub upper: BandReport,
    pub lower: BandReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuenchedTailReport {
    pub config: QuenchedTailConfig,
    pub tail_f: f64,
    pub rows: Vec<QuenchedRow>,
    pub mean_estimate: f64,
    /// Spread of the quenched estimates across clock seeds.
    pub coefficient_of_variation: f64,
}

impl Tabular for QuenchedTailReport {
    fn rows(&self) -> Vec<CsvRow> {
        self.rows
            .iter()
            .flat_map(|r| {
                let v = r.clock_seed as f64;
                [
                    CsvRow::from_band("quenched_upper", "clock_seed", v, &r.upper),
                    CsvRow::from_band("quenched_lower", "clock_seed", v, &r.lower),
                ]
            })
            .collect()
    }
}

pub fn run_quenched_tail(runner: &Runner, cfg: &QuenchedTailConfig) -> Result<QuenchedTailReport> {
    cfg.validate()?;
    let f = tail_f(cfg.z)?;
    let level = cfg.z * (cfg.n as f64).sqrt();
    let mut rows = Vec::with_capacity(cfg.clock_seeds.len());
    for &cs in &cfg.clock_seeds {
        let start = Instant::now();
        let log = sample_clocks(cfg.n, 1.0, cs)?;
        let base = cfg.deviate_base(cs);
        let hits = runner.count(cfg.paths, |m| walk_sup(&log, member_seed(base, m)) >= level);
        let key = format!("quenched_tail n={} z={} clock_seed={cs}", cfg.n, cfg.z);
        let est = estimate(hits, cfg.paths, cfg.seed, key, start);
        rows.push(QuenchedRow {
            clock_seed: cs,
            events: log.len(),
            upper: BandReport::new(est.clone(), 0.0, ((2.0 + cfg.eps) * f).min(1.0)),
            lower: BandReport::new(est, cfg.slack_low * f / 9.0, 1.0),
        });
    }
    let ps: Vec<f64> = rows.iter().map(|r| r.upper.estimate.p_hat).collect();
    let k = ps.len() as f64;
    let mean = ps.iter().sum::<f64>() / k;
    let cv = if ps.len() > 1 && mean > 0.0 {
        let var = ps.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / (k - 1.0);
        var.sqrt() / mean
    } else {
        0.0
    };
    Ok(QuenchedTailReport {
        config: cfg.clone(),
        tail_f: f,
        rows,
        mean_estimate: mean,
        coefficient_of_variation: cv,
    })
}
