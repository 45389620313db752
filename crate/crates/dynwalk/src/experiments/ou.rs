//! Tail of the grid maximum of the stationary OU process against the
//! `[f/K, K·f]` band, with a step-halving stability check.

use std::time::Instant;

use dynwalk_core::analytic::{tail_band, tail_f, TailBand};
use dynwalk_core::estimate::BandReport;
use dynwalk_core::ou::{ou_grid_max, ou_grid_max_halving, ou_steps};
use dynwalk_core::rng::{derive_seed, mix};
use serde::{Deserialize, Serialize};

use super::{check_expected_hits, estimate, invalid};
use crate::parallel::Runner;
use crate::report::{CsvRow, Tabular};
use crate::Result;

/// Salt separating the halving run's seeds from the main run's.
const HALVING_SALT: u64 = 0x006f_752d_6861_6c66;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OuTailConfig {
    pub z: Vec<f64>,
    pub h: f64,
    pub paths: u64,
    pub seed: u64,
    /// Band constant `K`.
    pub k: f64,
    pub allow_rare: bool,
}

impl Default for OuTailConfig {
    fn default() -> Self {
        Self {
            z: vec![2.5],
            h: 1e-3,
            paths: 100_000,
            seed: 42,
            k: 10.0,
            allow_rare: false,
        }
    }
}

impl OuTailConfig {
    pub fn validate(&self) -> Result<()> {
        ou_steps(self.h)?;
        if self.paths < 1000 {
            return Err(invalid(format!(
                "ou tail needs at least 1000 paths, got {}",
                self.paths
            )));
        }
        if self.z.is_empty() {
            return Err(invalid("ou tail needs at least one z"));
        }
        TailBand::mountford(self.k)?;
        for &z in &self.z {
            check_expected_hits(z, self.paths, self.allow_rare)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OuRow {
    pub z: f64,
    pub tail_f: f64,
    pub ratio: f64,
    pub report: BandReport,
    /// Coupled estimates at steps `h` and `h/2` from an independent run.
    pub coarse: f64,
    pub fine: f64,
    /// `fine - coarse`; nonnegative since the fine grid contains the coarse.
    pub halving_shift: f64,
    /// `|shift|` below the main interval's radius.
    pub halving_stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OuTailReport {
    pub config: OuTailConfig,
    pub rows: Vec<OuRow>,
}

impl Tabular for OuTailReport {
    fn rows(&self) -> Vec<CsvRow> {
        self.rows
            .iter()
            .map(|r| CsvRow::from_band("ou_tail", "z", r.z, &r.report))
            .collect()
    }
}

pub fn run_ou_tail(runner: &Runner, cfg: &OuTailConfig) -> Result<OuTailReport> {
    cfg.validate()?;
    let start = Instant::now();
    let maxima = runner.try_map(cfg.paths, |k| {
        Ok(ou_grid_max(cfg.h, derive_seed(cfg.seed, k))?)
    })?;
    let halving_seed = cfg.seed ^ mix(HALVING_SALT);
    let pairs = runner.try_map(cfg.paths, |k| {
        Ok(ou_grid_max_halving(cfg.h, derive_seed(halving_seed, k))?)
    })?;
    let band = TailBand::mountford(cfg.k)?;
    let m = cfg.paths as f64;
    let mut rows = Vec::with_capacity(cfg.z.len());
    for &z in &cfg.z {
        let hits = maxima.iter().filter(|&&x| x >= z).count() as u64;
        let key = format!("ou_tail h={} z={z}", cfg.h);
        let est = estimate(hits, cfg.paths, cfg.seed, key, start);
        let f = tail_f(z)?;
        let interval = tail_band(z, &band)?;
        let coarse = pairs.iter().filter(|p| p.0 >= z).count() as f64 / m;
        let fine = pairs.iter().filter(|p| p.1 >= z).count() as f64 / m;
        let shift = fine - coarse;
        let radius = est.ci_radius();
        rows.push(OuRow {
            z,
            tail_f: f,
            ratio: est.p_hat / f,
            report: BandReport::new(est, interval.low, interval.high),
            coarse,
            fine,
            halving_shift: shift,
            halving_stable: shift.abs() < radius,
        });
    }
    Ok(OuTailReport {
        config: cfg.clone(),
        rows,
    })
}
