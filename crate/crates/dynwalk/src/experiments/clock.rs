//! Uniform concentration of the changed-coordinate counts over replicated
//! clock logs.

use std::time::Instant;

use dynwalk_core::analytic::{clock_uniform_bound, Bound};
use dynwalk_core::clocks::{
    g_indicator, pi_total, sample_clocks, uniform_deviation, DeviationMode,
};
use dynwalk_core::estimate::BandReport;
use dynwalk_core::rng::derive_seed;
use serde::{Deserialize, Serialize};

use super::{estimate, invalid};
use crate::parallel::Runner;
use crate::report::{CsvRow, Tabular};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClockConfig {
    pub n: usize,
    pub delta: f64,
    pub alpha: f64,
    pub reps: u64,
    pub seed: u64,
}

impl Default for ClockConfig {
    fn default() -> Self {
        Self {
            n: 100_000,
            delta: 0.05,
            alpha: 0.2,
            reps: 100,
            seed: 42,
        }
    }
}

impl ClockConfig {
    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(invalid("clock verification needs at least one replicate"));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) || !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(invalid(
                "clock verification needs delta in (0, 1] and alpha in (0, 1)",
            ));
        }
        if (self.n as f64) * self.delta < 100.0 {
            return Err(invalid(format!(
                "n·delta = {} is below 100; the concentration regime needs it larger",
                self.n as f64 * self.delta
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClockReport {
    pub config: ClockConfig,
    pub grid_k: usize,
    pub bound: Bound,
    /// Replicates whose grid statistic reached `alpha` (a lower bound on the
    /// exact statistic).
    pub grid_exceedances: u64,
    /// Replicates whose sandwich upper bound reached `alpha`; the verdict
    /// uses this conservative count.
    pub upper_exceedances: u64,
    pub max_grid_deviation: f64,
    pub max_upper_deviation: f64,
    /// Mean event count `Π_n`, against its expectation `n`.
    pub mean_events: f64,
    /// Fraction of replicates with `Π_n ≤ 3n`.
    pub good_fraction: f64,
    pub result: BandReport,
}

impl Tabular for ClockReport {
    fn rows(&self) -> Vec<CsvRow> {
        vec![CsvRow::from_band(
            "clock_verify",
            "alpha",
            self.config.alpha,
            &self.result,
        )]
    }
}

pub fn run_clock_verification(runner: &Runner, cfg: &ClockConfig) -> Result<ClockReport> {
    cfg.validate()?;
    let start = Instant::now();
    let mode = DeviationMode::grid_for(cfg.delta, cfg.alpha)?;
    let DeviationMode::Grid { k } = mode else {
        unreachable!("grid_for builds a grid")
    };
    let per_rep = runner.try_map(cfg.reps, |r| {
        let log = sample_clocks(cfg.n, 1.0, derive_seed(cfg.seed, r))?;
        let stat = uniform_deviation(&log, cfg.delta, mode)?;
        Ok((
            stat.value,
            stat.upper_bound.unwrap_or(stat.value),
            pi_total(&log),
            g_indicator(&log),
        ))
    })?;
    let grid_exceedances = per_rep.iter().filter(|r| r.0 >= cfg.alpha).count() as u64;
    let upper_exceedances = per_rep.iter().filter(|r| r.1 >= cfg.alpha).count() as u64;
    let reps = cfg.reps as f64;
    let bound = clock_uniform_bound(cfg.n as u64, cfg.delta, cfg.alpha)?;
    let key = format!(
        "clock_verify n={} delta={} alpha={}",
        cfg.n, cfg.delta, cfg.alpha
    );
    let est = estimate(upper_exceedances, cfg.reps, cfg.seed, key, start);
    // Band [0, bound]: a frequency above the clamped bound fails; a bound
    // tighter than the interval width is underpowered.
    let result = BandReport::new(est, 0.0, bound.clamped);
    Ok(ClockReport {
        config: cfg.clone(),
        grid_k: k,
        bound,
        grid_exceedances,
        upper_exceedances,
        max_grid_deviation: per_rep.iter().map(|r| r.0).fold(0.0, f64::max),
        max_upper_deviation: per_rep.iter().map(|r| r.1).fold(0.0, f64::max),
        mean_events: per_rep.iter().map(|r| r.2 as f64).sum::<f64>() / reps,
        good_fraction: per_rep.iter().filter(|r| r.3).count() as f64 / reps,
        result,
    })
}
