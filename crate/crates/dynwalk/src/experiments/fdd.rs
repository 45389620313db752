//! Finite-dimensional covariance of the rescaled field against the limit
//! `e^{-|s-s'|}·min(t, t')`.

use dynwalk_core::clocks::sample_clocks;
use dynwalk_core::rng::PathSeeds;
use dynwalk_core::stats::covariance_with_se;
use dynwalk_core::walk::rescaled_field;
use serde::{Deserialize, Serialize};

use super::{invalid, moment_row, pass_if, z_score};
use crate::parallel::Runner;
use crate::report::{CsvRow, Tabular};
use crate::Result;

/// Entries with a z-score above this fail.
pub const MAX_Z: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FddConfig {
    pub n: usize,
    /// Clock times.
    pub s_grid: Vec<f64>,
    /// Length fractions.
    pub t_grid: Vec<f64>,
    pub reps: u64,
    pub seed: u64,
}

impl Default for FddConfig {
    fn default() -> Self {
        Self {
            n: 2000,
            s_grid: vec![0.0, 0.5, 1.0],
            t_grid: vec![0.25, 0.5, 1.0],
            reps: 10_000,
            seed: 42,
        }
    }
}

impl FddConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("fdd covariance needs n >= 1"));
        }
        if self.reps < 1000 {
            return Err(invalid(format!(
                "fdd covariance needs reps >= 1000, got {}",
                self.reps
            )));
        }
        let sorted = |g: &[f64]| !g.is_empty() && g.windows(2).all(|w| w[0] < w[1]);
        if !sorted(&self.s_grid) || self.s_grid[0] < 0.0 || *self.s_grid.last().unwrap() > 1.0 {
            return Err(invalid("s grid must be strictly increasing within [0, 1]"));
        }
        if !sorted(&self.t_grid) || self.t_grid[0] <= 0.0 || *self.t_grid.last().unwrap() > 1.0 {
            return Err(invalid("t grid must be strictly increasing within (0, 1]"));
        }
        Ok(())
    }
}

/// `e^{-|s-s'|}·min(t, t')`.
pub fn limit_covariance(s: f64, t: f64, s2: f64, t2: f64) -> f64 {
    (-(s - s2).abs()).exp() * t.min(t2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovEntry {
    pub s: f64,
    pub t: f64,
    pub s2: f64,
    pub t2: f64,
    pub empirical: f64,
    pub se: f64,
    pub target: f64,
    pub z_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FddReport {
    pub config: FddConfig,
    pub entries: Vec<CovEntry>,
    pub max_abs_error: f64,
    pub max_z_score: f64,
}

impl Tabular for FddReport {
    fn rows(&self) -> Vec<CsvRow> {
        self.entries
            .iter()
            .map(|e| {
                moment_row(
                    "fdd_cov",
                    format!("s={};t={};s2={};t2={}", e.s, e.t, e.s2, e.t2),
                    e.target,
                    e.empirical,
                    e.se,
                    (e.target - MAX_Z * e.se, e.target + MAX_Z * e.se),
                    pass_if(e.z_score <= MAX_Z),
                    self.config.reps,
                    self.config.seed,
                )
            })
            .collect()
    }
}

pub fn run_fdd_covariance(runner: &Runner, cfg: &FddConfig) -> Result<FddReport> {
    cfg.validate()?;
    let horizon = *cfg.s_grid.last().unwrap();
    let horizon = if horizon > 0.0 { horizon } else { 1.0 };
    let samples = runner.try_map(cfg.reps, |r| {
        let seeds = PathSeeds::for_path(cfg.seed, r);
        let log = sample_clocks(cfg.n, horizon, seeds.clock)?;
        Ok(rescaled_field(cfg.n, &log, seeds.deviate, &cfg.s_grid, &cfg.t_grid)?.values)
    })?;
    let points: Vec<(f64, f64)> = cfg
        .s_grid
        .iter()
        .flat_map(|&s| cfg.t_grid.iter().map(move |&t| (s, t)))
        .collect();
    let column = |k: usize| samples.iter().map(|v| v[k]).collect::<Vec<f64>>();
    let mut entries = Vec::new();
    for k in 0..points.len() {
        let xk = column(k);
        for l in k..points.len() {
            let xl = column(l);
            let (cov, se) = covariance_with_se(&xk, &xl)?;
            let ((s, t), (s2, t2)) = (points[k], points[l]);
            let target = limit_covariance(s, t, s2, t2);
            entries.push(CovEntry {
                s,
                t,
                s2,
                t2,
                empirical: cov,
                se,
                target,
                z_score: z_score(cov, target, se),
            });
        }
    }
    let max_abs_error = entries
        .iter()
        .map(|e| (e.empirical - e.target).abs())
        .fold(0.0, f64::max);
    let max_z_score = entries.iter().map(|e| e.z_score).fold(0.0, f64::max);
    Ok(FddReport {
        config: cfg.clone(),
        entries,
        max_abs_error,
        max_z_score,
    })
}
