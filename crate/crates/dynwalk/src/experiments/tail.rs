//! Annealed tail sweep: `P{sup_t S_n(t) ≥ z√n}` against the `z²Φ̄(z)` band.

use std::time::Instant;

use dynwalk_core::analytic::{tail_band, tail_f, TailBand};
use dynwalk_core::clocks::sample_clocks;
use dynwalk_core::estimate::BandReport;
use dynwalk_core::rng::PathSeeds;
use dynwalk_core::walk::walk_sup;
use serde::{Deserialize, Serialize};

use super::{check_expected_hits, estimate, invalid, regime_limit};
use crate::parallel::Runner;
use crate::report::{CsvRow, Tabular};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailSweepConfig {
    pub n: usize,
    pub z: Vec<f64>,
    pub paths: u64,
    pub seed: u64,
    pub slack_low: f64,
    pub slack_high: f64,
    pub allow_rare: bool,
}

impl Default for TailSweepConfig {
    fn default() -> Self {
        Self {
            n: 10_000,
            z: vec![2.0, 2.5],
            paths: 100_000,
            seed: 42,
            slack_low: 0.5,
            slack_high: 2.0,
            allow_rare: false,
        }
    }
}

impl TailSweepConfig {
    pub fn band(&self) -> Result<TailBand> {
        Ok(TailBand::default().with_slack(self.slack_low, self.slack_high)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(invalid("tail sweep needs n >= 2"));
        }
        if self.paths == 0 {
            return Err(invalid("tail sweep needs at least one path"));
        }
        if self.z.is_empty() {
            return Err(invalid("tail sweep needs at least one z"));
        }
        self.band()?;
        for &z in &self.z {
            check_expected_hits(z, self.paths, self.allow_rare)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub z: f64,
    pub tail_f: f64,
    /// `1 ≤ z ≤ 0.5·√(n/ln n)`; rows outside are reported but flagged.
    pub in_regime: bool,
    pub report: BandReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailSweepReport {
    pub config: TailSweepConfig,
    pub regime_limit: f64,
    pub rows: Vec<TailRow>,
    /// Estimates are nonincreasing in `z`.
    pub monotone: bool,
}

impl Tabular for TailSweepReport {
    fn rows(&self) -> Vec<CsvRow> {
        self.rows
            .iter()
            .map(|r| CsvRow::from_band("tail_sweep", "z", r.z, &r.report))
            .collect()
    }
}

/// `sup_t S_n(t)` of `paths` annealed paths (fresh clocks for each), in
/// path order.
pub fn annealed_sups(runner: &Runner, n: usize, paths: u64, seed: u64) -> Result<Vec<f64>> {
    runner.try_map(paths, |p| {
        let s = PathSeeds::for_path(seed, p);
        let log = sample_clocks(n, 1.0, s.clock)?;
        Ok(walk_sup(&log, s.deviate))
    })
}

pub fn run_tail_sweep(runner: &Runner, cfg: &TailSweepConfig) -> Result<TailSweepReport> {
    cfg.validate()?;
    let start = Instant::now();
    let sups = annealed_sups(runner, cfg.n, cfg.paths, cfg.seed)?;
    let band = cfg.band()?;
    let limit = regime_limit(cfg.n);
    let root = (cfg.n as f64).sqrt();
    let mut rows = Vec::with_capacity(cfg.z.len());
    for &z in &cfg.z {
        let level = z * root;
        let hits = sups.iter().filter(|&&s| s >= level).count() as u64;
        let interval = tail_band(z, &band)?;
        let key = format!("tail_sweep n={} z={z}", cfg.n);
        let est = estimate(hits, cfg.paths, cfg.seed, key, start);
        rows.push(TailRow {
            z,
            tail_f: tail_f(z)?,
            in_regime: interval.in_regime && z <= limit,
            report: BandReport::new(est, interval.low, interval.high),
        });
    }
    let mut by_z: Vec<&TailRow> = rows.iter().collect();
    by_z.sort_by(|a, b| a.z.total_cmp(&b.z));
    let monotone = by_z
        .windows(2)
        .all(|w| w[1].report.estimate.p_hat <= w[0].report.estimate.p_hat);
    Ok(TailSweepReport {
        config: cfg.clone(),
        regime_limit: limit,
        rows,
        monotone,
    })
}
