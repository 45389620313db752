//! Localization counts along the Erdős sequence: whether the supremum of the
//! walk of length `e_j` lands in `[H_j√e_j, (H_j + 14/H_j)√e_j]`.

use alloc::vec::Vec;

use crate::analytic::{envelope_at_index, ErdosSequence, GrowthEnvelope};
use crate::clocks::ClockEventLog;
use crate::error::{domain, Result};
use crate::math;
use crate::walk::engine::checkpoint_sups;

/// Per-index levels and one realization's indicators.
#[derive(Debug, Clone, PartialEq)]
pub struct HitCounter {
    /// Walk lengths `e_1, …, e_J`.
    pub lengths: Vec<usize>,
    /// `H_j = H(e_j)`.
    pub h: Vec<f64>,
    /// Lower end `H_j√e_j` of the localization interval.
    pub low: Vec<f64>,
    /// Upper end `(H_j + 14/H_j)√e_j`.
    pub high: Vec<f64>,
    /// `S*_j ∈ I_j`, once [`HitCounter::observe`] has run.
    pub in_interval: Vec<bool>,
    /// `S*_j ≥ H_j√e_j`.
    pub above: Vec<bool>,
}

impl HitCounter {
    /// Levels for `j = 1..=j_max`; every `e_j` must be exact.
    pub fn new(h: &GrowthEnvelope, seq: &ErdosSequence, j_max: usize) -> Result<Self> {
        if j_max == 0 || j_max > seq.n_max() {
            return Err(domain!("j_max must be in 1..={}, got {j_max}", seq.n_max()));
        }
        let mut lengths = Vec::with_capacity(j_max);
        let mut hs = Vec::with_capacity(j_max);
        let mut low = Vec::with_capacity(j_max);
        let mut high = Vec::with_capacity(j_max);
        for j in 1..=j_max {
            let e = seq.value(j)? as usize;
            let hj = envelope_at_index(h, seq, j)?;
            if !(hj > 0.0) {
                return Err(domain!("H(e_{j}) must be positive, got {hj}"));
            }
            let r = math::sqrt(e as f64);
            lengths.push(e);
            hs.push(hj);
            low.push(hj * r);
            high.push((hj + 14.0 / hj) * r);
        }
        Ok(Self {
            lengths,
            h: hs,
            low,
            high,
            in_interval: alloc::vec![false; j_max],
            above: alloc::vec![false; j_max],
        })
    }

    /// Length of the walk that carries every checkpoint.
    pub fn walk_length(&self) -> usize {
        self.lengths[self.lengths.len() - 1]
    }

    /// Records the indicators for suprema `S*_1, …, S*_J`.
    pub fn observe(&mut self, sups: &[f64]) {
        for (j, &s) in sups.iter().enumerate() {
            self.above[j] = s >= self.low[j];
            self.in_interval[j] = s >= self.low[j] && s <= self.high[j];
        }
    }

    /// Runs one walk of length `e_J` on `log` and records its indicators.
    pub fn run(&mut self, log: &ClockEventLog, deviate_seed: u64) -> Result<()> {
        if log.n() != self.walk_length() {
            return Err(domain!(
                "clock log has n = {}, expected e_J = {}",
                log.n(),
                self.walk_length()
            ));
        }
        let sups = checkpoint_sups(log, deviate_seed, &self.lengths);
        self.observe(&sups);
        Ok(())
    }

    /// Partial counts `L_1, …, L_J`.
    pub fn partial_counts(&self) -> Vec<usize> {
        self.in_interval
            .iter()
            .scan(0, |acc, &b| {
                *acc += b as usize;
                Some(*acc)
            })
            .collect()
    }
}
