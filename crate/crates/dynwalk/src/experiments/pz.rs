//! Occupation time above `z√n` under the quenched measure: its first two
//! moments, the hit probability, and the Paley–Zygmund lower bound.

use std::time::Instant;

use dynwalk_core::analytic::{normal_sf, tail_f};
use dynwalk_core::clocks::{sample_clocks, uniform_deviation, DeviationMode, EXACT_SWEEP_CAP};
use dynwalk_core::estimate::{BandReport, Verdict};
use dynwalk_core::rng::derive_seed;
use dynwalk_core::walk::{member_seed, walk_sup_occupation};
use serde::{Deserialize, Serialize};

use super::{check_expected_hits, estimate, invalid, mean_se, moment_row, pass_if, z_score};
use crate::parallel::Runner;
use crate::report::{CsvRow, Tabular};
use crate::Result;

/// Constant in the second-moment bound `E J² ≤ 9 z^{-2} Φ̄(z)`.
pub const SECOND_MOMENT_CONSTANT: f64 = 9.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PzConfig {
    pub n: usize,
    pub z: f64,
    pub paths: u64,
    pub clock_seed: u64,
    pub seed: u64,
    /// Tolerance of the good event on the clock log; the second-moment
    /// bound needs `8/(1-alpha) + 1/8 < 9`.
    pub alpha: f64,
    pub allow_rare: bool,
}

impl Default for PzConfig {
    fn default() -> Self {
        Self {
            n: 10_000,
            z: 2.0,
            paths: 100_000,
            clock_seed: 1,
            seed: 42,
            alpha: 0.09,
            allow_rare: false,
        }
    }
}

impl PzConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.paths < 2 {
            return Err(invalid("pz check needs n >= 2 and at least two paths"));
        }
        if !(self.alpha > 0.0 && 8.0 / (1.0 - self.alpha) + 0.125 < 9.0) {
            return Err(invalid(format!(
                "alpha = {} does not keep 8/(1-alpha) + 1/8 below 9",
                self.alpha
            )));
        }
        check_expected_hits(self.z, self.paths, self.allow_rare)
    }

    /// Window size `Δ_n = 1/(16 z²)`.
    pub fn window(&self) -> f64 {
        1.0 / (16.0 * self.z * self.z)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PzReport {
    pub config: PzConfig,
    pub events: usize,
    /// `Φ̄(z)`, the exact quenched mean of `J_n`.
    pub target_mean: f64,
    pub mean_j: f64,
    pub mean_j_se: f64,
    pub mean_z_score: f64,
    pub second_moment: f64,
    pub second_moment_se: f64,
    /// `9 z^{-2} Φ̄(z)`.
    pub second_moment_bound: f64,
    /// Deviation statistic of the clock log at window `Δ_n` (an upper bound
    /// when the log is too long for the exact sweep).
    pub log_deviation: f64,
    /// The log lies in the good event, so the second-moment bound applies.
    pub good_log: bool,
    pub hit: BandReport,
    /// `(E J)² / E J²`, zero when `E J² = 0`.
    pub pz_bound: f64,
    /// `f(z)/9`, the lower bound the argument delivers.
    pub tail_lower: f64,
}

impl PzReport {
    fn mean_verdict(&self) -> Verdict {
        if self.mean_j_se > 0.0 {
            pass_if(self.mean_z_score <= 4.0)
        } else {
            // Every occupation time was zero: consistent exactly when the
            // target does not exceed the interval for P{J > 0}.
            pass_if(self.mean_j == 0.0 && self.target_mean <= self.hit.estimate.ci_high)
        }
    }

    fn second_moment_pass(&self) -> bool {
        self.second_moment <= self.second_moment_bound + 4.0 * self.second_moment_se
    }
}

impl Tabular for PzReport {
    fn rows(&self) -> Vec<CsvRow> {
        let c = &self.config;
        let mut rows = vec![
            moment_row(
                "pz_mean_occupation",
                "z".into(),
                c.z,
                self.mean_j,
                self.mean_j_se,
                (
                    self.target_mean - 4.0 * self.mean_j_se,
                    self.target_mean + 4.0 * self.mean_j_se,
                ),
                self.mean_verdict(),
                c.paths,
                c.seed,
            ),
            CsvRow::from_band("pz_hit_probability", "z", c.z, &self.hit),
        ];
        if self.good_log {
            rows.push(moment_row(
                "pz_second_moment",
                "z".into(),
                c.z,
                self.second_moment,
                self.second_moment_se,
                (0.0, self.second_moment_bound),
                pass_if(self.second_moment_pass()),
                c.paths,
                c.seed,
            ));
        }
        rows
    }
}

pub fn paley_zygmund_check(runner: &Runner, cfg: &PzConfig) -> Result<PzReport> {
    cfg.validate()?;
    let start = Instant::now();
    let log = sample_clocks(cfg.n, 1.0, cfg.clock_seed)?;
    let delta = cfg.window();
    let mode = if log.len() <= EXACT_SWEEP_CAP {
        DeviationMode::exact()
    } else {
        DeviationMode::grid_for(delta, cfg.alpha)?
    };
    let stat = uniform_deviation(&log, delta, mode)?;
    let log_deviation = stat.upper_bound.unwrap_or(stat.value);

    let level = cfg.z * (cfg.n as f64).sqrt();
    let base = derive_seed(cfg.seed, cfg.clock_seed);
    let occ = runner.map(cfg.paths, |m| {
        walk_sup_occupation(&log, member_seed(base, m), level).1
    });
    let (mean_j, mean_j_se) = mean_se(&occ);
    let squares: Vec<f64> = occ.iter().map(|j| j * j).collect();
    let (second_moment, second_moment_se) = mean_se(&squares);
    let hits = occ.iter().filter(|&&j| j > 0.0).count() as u64;

    let pz_bound = if second_moment > 0.0 {
        mean_j * mean_j / second_moment
    } else {
        0.0
    };
    let key = format!(
        "pz_check n={} z={} clock_seed={}",
        cfg.n, cfg.z, cfg.clock_seed
    );
    let est = estimate(hits, cfg.paths, cfg.seed, key, start);
    let se = est.std_error();
    let hit = BandReport::new(est, (pz_bound - 4.0 * se).max(0.0), 1.0);
    let target_mean = normal_sf(cfg.z)?;
    Ok(PzReport {
        config: cfg.clone(),
        events: log.len(),
        target_mean,
        mean_j,
        mean_j_se,
        mean_z_score: z_score(mean_j, target_mean, mean_j_se),
        second_moment,
        second_moment_se,
        second_moment_bound: SECOND_MOMENT_CONSTANT * target_mean / (cfg.z * cfg.z),
        log_deviation,
        good_log: log_deviation <= cfg.alpha,
        hit,
        pz_bound,
        tail_lower: tail_f(cfg.z)? / 9.0,
    })
}
