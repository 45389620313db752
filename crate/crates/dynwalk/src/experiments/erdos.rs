//! Erdős-sequence suite: classifications for an envelope family, Monte Carlo
//! localization along `e_1, e_2, …`, and the `Q_{i,j}` regime table.

use std::time::Instant;

use dynwalk_core::analytic::{q_regime_table, ErdosSequence, QRow};
use dynwalk_core::clocks::sample_clocks;
use dynwalk_core::estimate::BandReport;
use dynwalk_core::rng::PathSeeds;
use dynwalk_core::walk::HitCounter;
use serde::{Deserialize, Serialize};

use super::integral::{classification_rows, classify, Family, IntegralRow};
use super::{estimate, invalid};
use crate::parallel::Runner;
use crate::report::{CsvRow, Tabular};
use crate::Result;

/// Lower end of the localization ratio band, with slack 0.5 on `10^{-2}`.
pub const RATIO_FLOOR: f64 = 0.005;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErdosConfig {
    pub family: Family,
    /// Parameter sweep for the classifications.
    pub params: Vec<f64>,
    pub sum_terms: usize,
    /// Envelope used for the Monte Carlo part (always clamped).
    pub mc_family: Family,
    pub mc_param: f64,
    /// Largest walk length; the suite runs `e_j` up to it.
    pub max_length: u64,
    /// Lengths `e_j` whose ratio is checked.
    pub ratio_lengths: Vec<u64>,
    pub paths: u64,
    pub seed: u64,
    /// Indices `i` of the `Q_{i,j}` table.
    pub q_indices: Vec<usize>,
    /// Terms of the sequence available to the table.
    pub q_terms: usize,
}

impl Default for ErdosConfig {
    fn default() -> Self {
        Self {
            family: Family::Corollary,
            params: vec![4.5, 5.5],
            sum_terms: 10_000,
            mc_family: Family::Corollary,
            mc_param: 5.5,
            max_length: 10_000,
            ratio_lengths: vec![793, 6771],
            paths: 100_000,
            seed: 42,
            q_indices: vec![5, 10, 20, 50],
            q_terms: 1_000_000,
        }
    }
}

impl ErdosConfig {
    pub fn validate(&self) -> Result<()> {
        if self.params.is_empty() || self.sum_terms < 10 || self.paths == 0 {
            return Err(invalid(
                "erdos suite needs parameters, 10 series terms and a path",
            ));
        }
        for &p in &self.params {
            self.family.envelope(p, true)?;
        }
        self.mc_family.envelope(self.mc_param, true)?;
        let seq = ErdosSequence::with_exponents(64)?;
        let j_max = self.j_max(&seq);
        if j_max == 0 {
            return Err(invalid(format!("no e_j is at most {}", self.max_length)));
        }
        for &e in &self.ratio_lengths {
            if !seq.values()[..j_max].contains(&e) {
                return Err(invalid(format!(
                    "ratio length {e} is not an Erdős term at most {}",
                    self.max_length
                )));
            }
        }
        if self.q_indices.iter().any(|&i| i == 0 || i >= self.q_terms) {
            return Err(invalid("q indices must lie in 1..q-terms"));
        }
        Ok(())
    }

    fn j_max(&self, seq: &ErdosSequence) -> usize {
        seq.values()
            .iter()
            .take_while(|&&e| e <= self.max_length)
            .count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationRow {
    pub j: usize,
    pub length: u64,
    pub h: f64,
    /// `P{S*_j ≥ H_j√e_j}`.
    pub above: f64,
    /// `P{S*_j ∈ I_j}`.
    pub in_interval: f64,
    /// Mean of the partial count `L_j`.
    pub mean_count: f64,
    /// `P{S* ∈ I} / P{S* ≥ H√e}` as a binomial proportion of the paths above;
    /// present for the checked lengths.
    pub ratio: Option<BandReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErdosReport {
    pub config: ErdosConfig,
    pub classifications: Vec<IntegralRow>,
    pub localization: Vec<LocalizationRow>,
    pub q_table: Vec<QRow>,
}

impl Tabular for ErdosReport {
    fn rows(&self) -> Vec<CsvRow> {
        let mut rows =
            classification_rows(self.config.family, &self.classifications, self.config.seed);
        for r in &self.localization {
            if let Some(b) = &r.ratio {
                rows.push(CsvRow::from_band(
                    "erdos_ratio",
                    "length",
                    r.length as f64,
                    b,
                ));
            }
        }
        rows
    }
}

pub fn run_erdos_suite(runner: &Runner, cfg: &ErdosConfig) -> Result<ErdosReport> {
    cfg.validate()?;
    let start = Instant::now();
    let seq = ErdosSequence::with_exponents(cfg.sum_terms.max(cfg.q_terms))?;
    let classifications = cfg
        .params
        .iter()
        .map(|&p| classify(cfg.family, p, true, &seq, cfg.sum_terms))
        .collect::<Result<Vec<_>>>()?;

    let h = cfg.mc_family.envelope(cfg.mc_param, true)?;
    let j_max = cfg.j_max(&seq);
    let counter = HitCounter::new(&h, &seq, j_max)?;
    let length = counter.walk_length();
    // One bit per index: bit j-1 of the first word for S* ∈ I_j, of the
    // second for S* ≥ H_j√e_j.
    let masks = runner.try_map(cfg.paths, |p| {
        let s = PathSeeds::for_path(cfg.seed, p);
        let log = sample_clocks(length, 1.0, s.clock)?;
        let mut c = counter.clone();
        c.run(&log, s.deviate)?;
        let pack = |v: &[bool]| {
            v.iter()
                .enumerate()
                .fold(0u64, |m, (j, &b)| m | ((b as u64) << j))
        };
        Ok((pack(&c.in_interval), pack(&c.above)))
    })?;
    let m = cfg.paths as f64;
    let mut localization = Vec::with_capacity(j_max);
    let mut cumulative = 0u64;
    for j in 0..j_max {
        let bit = 1u64 << j;
        let inside = masks.iter().filter(|x| x.0 & bit != 0).count() as u64;
        let above = masks.iter().filter(|x| x.1 & bit != 0).count() as u64;
        cumulative += inside;
        let e = counter.lengths[j] as u64;
        let ratio = cfg.ratio_lengths.contains(&e).then(|| {
            let key = format!(
                "erdos_ratio length={e} {}={}",
                cfg.mc_family.parameter(),
                cfg.mc_param
            );
            BandReport::new(
                estimate(inside, above, cfg.seed, key, start),
                RATIO_FLOOR,
                1.0,
            )
        });
        localization.push(LocalizationRow {
            j: j + 1,
            length: e,
            h: counter.h[j],
            above: above as f64 / m,
            in_interval: inside as f64 / m,
            mean_count: cumulative as f64 / m,
            ratio,
        });
    }
    let q_table = q_regime_table(&h, &seq, &cfg.q_indices)?;
    Ok(ErdosReport {
        config: cfg.clone(),
        classifications,
        localization,
        q_table,
    })
}
