//! One walk path, optionally on a supplied clock log, checked against the
//! brute-force oracle when the budget allows.

use dynwalk_core::clocks::{sample_clocks, ClockEventLog};
use dynwalk_core::rng::PathSeeds;
use dynwalk_core::walk::{
    brute_force_path, occupation_time, path_sup, simulate_path, WalkPath, BRUTE_FORCE_BUDGET,
};
use serde::{Deserialize, Serialize};

use super::{invalid, moment_row, pass_if};
use crate::parallel::Runner;
use crate::report::{CsvRow, Tabular};
use crate::Result;

/// Relative tolerance between the event-driven path and the oracle.
pub const ORACLE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateConfig {
    pub n: usize,
    pub horizon: f64,
    pub seed: u64,
    /// Occupation level in units of `√n`.
    pub level: f64,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            n: 1000,
            horizon: 1.0,
            seed: 42,
            level: 1.0,
        }
    }
}

impl SimulateConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(invalid(
                "simulate-path needs n >= 1 and a positive finite horizon",
            ));
        }
        if !self.level.is_finite() {
            return Err(invalid("occupation level must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub config: SimulateConfig,
    pub clock_seed: u64,
    pub deviate_seed: u64,
    pub events: usize,
    pub initial: f64,
    pub terminal: f64,
    pub sup: f64,
    /// Time spent at or above `level·√n`.
    pub occupation: f64,
    /// The oracle ran (its cost `n·(events+1)` fits the budget).
    pub oracle_checked: bool,
    pub oracle_max_rel_diff: f64,
}

impl Tabular for SimulateReport {
    fn rows(&self) -> Vec<CsvRow> {
        vec![moment_row(
            "simulate_path",
            "n".into(),
            self.config.n as f64,
            self.sup,
            0.0,
            (f64::NEG_INFINITY, f64::INFINITY),
            pass_if(!self.oracle_checked || self.oracle_max_rel_diff <= ORACLE_TOLERANCE),
            1,
            self.config.seed,
        )]
    }
}

/// The report together with the path and the clock log it ran on.
#[derive(Debug, Clone)]
pub struct SimulateOutput {
    pub report: SimulateReport,
    pub path: WalkPath,
    pub log: ClockEventLog,
}

/// Largest relative difference between two paths on the same log.
pub fn max_rel_diff(a: &WalkPath, b: &WalkPath) -> f64 {
    a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(1.0))
        .fold(0.0, f64::max)
}

/// Runs path 0 of `cfg.seed`; a supplied `log` replaces the sampled clocks
/// (its `n` and horizon then win over the config).
pub fn run_simulate_path(
    _runner: &Runner,
    cfg: &SimulateConfig,
    log: Option<ClockEventLog>,
) -> Result<SimulateOutput> {
    cfg.validate()?;
    let seeds = PathSeeds::for_path(cfg.seed, 0);
    let log = match log {
        Some(l) => l,
        None => sample_clocks(cfg.n, cfg.horizon, seeds.clock)?,
    };
    let n = log.n();
    let path = simulate_path(n, &log, seeds.deviate)?;
    let cost = n.saturating_mul(log.len() + 1);
    let (oracle_checked, oracle_max_rel_diff) = if cost <= BRUTE_FORCE_BUDGET {
        let oracle = brute_force_path(n, &log, seeds.deviate)?;
        (true, max_rel_diff(&path, &oracle))
    } else {
        (false, 0.0)
    };
    let mut config = cfg.clone();
    config.n = n;
    config.horizon = log.horizon();
    let report = SimulateReport {
        clock_seed: log.seed(),
        deviate_seed: seeds.deviate,
        events: log.len(),
        initial: path.values[0],
        terminal: *path.values.last().unwrap(),
        sup: path_sup(&path, 0.0, path.horizon)?,
        occupation: occupation_time(&path, cfg.level * (n as f64).sqrt()),
        oracle_checked,
        oracle_max_rel_diff,
        config,
    };
    Ok(SimulateOutput { report, path, log })
}
