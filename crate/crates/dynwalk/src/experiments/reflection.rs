//! Running maximum over partial lengths against twice the tail of the full
//! walk: `P{sup_t max_k S_k(t) ≥ λ} ≤ 2·P{sup_t S_n(t) ≥ λ}`.

use dynwalk_core::clocks::sample_clocks;
use dynwalk_core::rng::PathSeeds;
use dynwalk_core::walk::running_max;
use serde::{Deserialize, Serialize};

use super::{invalid, mean_se, moment_row, pass_if};
use crate::parallel::Runner;
use crate::report::{CsvRow, Tabular};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReflectionConfig {
    pub n: usize,
    /// Levels in units of `√n`.
    pub lambdas: Vec<f64>,
    pub paths: u64,
    pub seed: u64,
}

impl Default for ReflectionConfig {
    fn default() -> Self {
        Self {
            n: 1000,
            lambdas: vec![1.5, 2.0, 2.5],
            paths: 20_000,
            seed: 42,
        }
    }
}

impl ReflectionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.paths < 2 || self.lambdas.is_empty() {
            return Err(invalid(
                "reflection check needs n >= 1, two paths and a level",
            ));
        }
        if self.lambdas.iter().any(|l| !l.is_finite()) {
            return Err(invalid("reflection levels must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReflectionRow {
    pub lambda: f64,
    pub running_max_probability: f64,
    pub path_probability: f64,
    /// Mean of `1{R ≥ λ} - 2·1{S ≥ λ}` over paths, and its standard error.
    pub excess: f64,
    pub excess_se: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReflectionReport {
    pub config: ReflectionConfig,
    pub rows: Vec<ReflectionRow>,
}

impl Tabular for ReflectionReport {
    fn rows(&self) -> Vec<CsvRow> {
        self.rows
            .iter()
            .map(|r| {
                moment_row(
                    "reflection",
                    "lambda".into(),
                    r.lambda,
                    r.excess,
                    r.excess_se,
                    (f64::NEG_INFINITY, 4.0 * r.excess_se),
                    pass_if(r.pass),
                    self.config.paths,
                    self.config.seed,
                )
            })
            .collect()
    }
}

pub fn run_reflection_check(runner: &Runner, cfg: &ReflectionConfig) -> Result<ReflectionReport> {
    cfg.validate()?;
    let maxima = runner.try_map(cfg.paths, |p| {
        let s = PathSeeds::for_path(cfg.seed, p);
        let log = sample_clocks(cfg.n, 1.0, s.clock)?;
        Ok(running_max(cfg.n, &log, s.deviate)?)
    })?;
    let root = (cfg.n as f64).sqrt();
    let m = cfg.paths as f64;
    let rows = cfg
        .lambdas
        .iter()
        .map(|&l| {
            let level = l * root;
            let diffs: Vec<f64> = maxima
                .iter()
                .map(|r| {
                    let a = (r.running_max_sup >= level) as u8 as f64;
                    let b = (r.path_sup >= level) as u8 as f64;
                    a - 2.0 * b
                })
                .collect();
            let (excess, excess_se) = mean_se(&diffs);
            ReflectionRow {
                lambda: l,
                running_max_probability: maxima
                    .iter()
                    .filter(|r| r.running_max_sup >= level)
                    .count() as f64
                    / m,
                path_probability: maxima.iter().filter(|r| r.path_sup >= level).count() as f64 / m,
                excess,
                excess_se,
                pass: excess <= 4.0 * excess_se,
            }
        })
        .collect();
    Ok(ReflectionReport {
        config: cfg.clone(),
        rows,
    })
}
