//! Binomial Monte Carlo estimates with Wilson score intervals, and verdicts
//! against analytic bands.

use alloc::string::String;

use crate::error::{Error, Result};
use crate::math;

/// Two-sided 99% standard normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_901;

/// Wilson score interval for `hits` out of `n` at normal quantile `z`.
/// `(0, 1)` when `n = 0`.
pub fn wilson_interval(hits: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = hits as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = z * math::sqrt(p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)) / denom;
    // Rounding can push the ends just past the point estimate at 0 or 1.
    let lo = if hits == 0 {
        0.0
    } else {
        (centre - half).clamp(0.0, p)
    };
    let hi = if hits == n {
        1.0
    } else {
        (centre + half).clamp(p, 1.0)
    };
    (lo, hi)
}

#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub p_hat: f64,
    pub hits: u64,
    pub n_samples: u64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Master seed of the experiment.
    pub seed: u64,
    /// Identifies the configuration; only estimates with equal keys merge.
    pub config_key: String,
    /// Seconds; never part of any comparison or CSV body.
    pub wall_time: f64,
}

impl Estimate {
    pub fn from_counts(
        hits: u64,
        n_samples: u64,
        seed: u64,
        config_key: impl Into<String>,
    ) -> Self {
        assert!(hits <= n_samples, "hits exceed samples");
        let (ci_low, ci_high) = wilson_interval(hits, n_samples, Z_99);
        let p_hat = if n_samples == 0 {
            0.0
        } else {
            hits as f64 / n_samples as f64
        };
        Self {
            p_hat,
            hits,
            n_samples,
            ci_low,
            ci_high,
            seed,
            config_key: config_key.into(),
            wall_time: 0.0,
        }
    }

    /// An estimate with no samples; the identity of [`Estimate::merge`].
    pub fn empty(seed: u64, config_key: impl Into<String>) -> Self {
        Self::from_counts(0, 0, seed, config_key)
    }

    pub fn ci_width(&self) -> f64 {
        self.ci_high - self.ci_low
    }

    pub fn ci_radius(&self) -> f64 {
        0.5 * self.ci_width()
    }

    /// Binomial standard error at `p_hat`.
    pub fn std_error(&self) -> f64 {
        if self.n_samples == 0 {
            return f64::INFINITY;
        }
        math::sqrt(self.p_hat * (1.0 - self.p_hat) / self.n_samples as f64)
    }

    /// Pools two estimates of the same configuration by adding counts.
    pub fn merge(&self, other: &Self) -> Result<Self> {
        if self.config_key != other.config_key || self.seed != other.seed {
            return Err(Error::Mismatch(alloc::format!(
                "cannot merge '{}' (seed {}) with '{}' (seed {})",
                self.config_key,
                self.seed,
                other.config_key,
                other.seed
            )));
        }
        let mut out = Self::from_counts(
            self.hits + other.hits,
            self.n_samples + other.n_samples,
            self.seed,
            self.config_key.clone(),
        );
        out.wall_time = self.wall_time + other.wall_time;
        Ok(out)
    }
}

#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Pass,
    Fail,
    Underpowered,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pass => "Pass",
            Self::Fail => "Fail",
            Self::Underpowered => "Underpowered",
        }
    }
}

/// `Underpowered` when the interval is wider than the band, else `Pass` when
/// the point estimate lies in the band (the interval then meets it too),
/// else `Fail`.
pub fn band_verdict(est: &Estimate, low: f64, high: f64) -> Verdict {
    if est.ci_width() > high - low {
        Verdict::Underpowered
    } else if est.p_hat >= low && est.p_hat <= high {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, PartialEq)]
pub struct BandReport {
    pub estimate: Estimate,
    pub band: (f64, f64),
    pub verdict: Verdict,
}

impl BandReport {
    pub fn new(estimate: Estimate, low: f64, high: f64) -> Self {
        let verdict = band_verdict(&estimate, low, high);
        Self {
            estimate,
            band: (low, high),
            verdict,
        }
    }
}

/// Guard against runs with too few expected hits to say anything:
/// `p·M ≥ min_hits`.
pub fn enough_expected_hits(p: f64, m: u64, min_hits: f64) -> bool {
    p * m as f64 >= min_hits
}
