//! Quenched resampling: many deviate realizations against one fixed clock log,
//! and the conditional Gaussian law of `S_n(v)` given `S_n(u)` under it.

use alloc::vec::Vec;

use crate::analytic::phibar;
use crate::clocks::{count_changed, ClockEventLog};
use crate::error::{domain, Result};
use crate::math;
use crate::rng::derive_seed;
use crate::stats::{linear_regression, Regression};
use crate::walk::engine::{walk_pair, walk_sup, walk_sup_occupation};

/// A path functional evaluated per quenched member.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Functional {
    /// `sup_t S_n(t)` over the horizon.
    Sup,
    /// Time spent at or above `level`.
    Occupation { level: f64 },
    /// `(S_n(u), S_n(v))`.
    Pointwise { u: f64, v: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FunctionalValue {
    Scalar(f64),
    Pair(f64, f64),
}

impl FunctionalValue {
    pub fn scalar(self) -> Option<f64> {
        match self {
            Self::Scalar(x) => Some(x),
            Self::Pair(..) => None,
        }
    }

    pub fn pair(self) -> Option<(f64, f64)> {
        match self {
            Self::Pair(a, b) => Some((a, b)),
            Self::Scalar(_) => None,
        }
    }
}

impl Functional {
    pub fn validate(&self, log: &ClockEventLog) -> Result<()> {
        match *self {
            Self::Sup => Ok(()),
            Self::Occupation { level } if level.is_nan() => Err(domain!("occupation level is NaN")),
            Self::Occupation { .. } => Ok(()),
            Self::Pointwise { u, v } => {
                if !(0.0 <= u && u <= v && v <= log.horizon()) {
                    return Err(domain!(
                        "pointwise times need 0 <= u <= v <= horizon, got ({u}, {v})"
                    ));
                }
                Ok(())
            }
        }
    }
}

/// Evaluates `functional` on the walk driven by `log` and `deviate_seed`.
/// The functional is assumed valid for `log`.
pub fn evaluate(log: &ClockEventLog, deviate_seed: u64, functional: Functional) -> FunctionalValue {
    match functional {
        Functional::Sup => FunctionalValue::Scalar(walk_sup(log, deviate_seed)),
        Functional::Occupation { level } => {
            FunctionalValue::Scalar(walk_sup_occupation(log, deviate_seed, level).1)
        }
        Functional::Pointwise { u, v } => {
            let (a, b) = walk_pair(log, deviate_seed, u, v);
            FunctionalValue::Pair(a, b)
        }
    }
}

/// Deviate seed of member `m` of a quenched ensemble.
#[inline]
pub fn member_seed(base_seed: u64, m: u64) -> u64 {
    derive_seed(base_seed, m)
}

/// `M` functional values, all driven by the same clock log.
#[derive(Debug, Clone, PartialEq)]
pub struct QuenchedEnsemble {
    pub clock_seed: u64,
    pub n: usize,
    pub base_seed: u64,
    pub functional: Functional,
    pub values: Vec<FunctionalValue>,
}

impl QuenchedEnsemble {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scalars(&self) -> Vec<f64> {
        self.values.iter().filter_map(|v| v.scalar()).collect()
    }

    pub fn pairs(&self) -> Vec<(f64, f64)> {
        self.values.iter().filter_map(|v| v.pair()).collect()
    }
}

/// Serial quenched resampling; member `m` uses [`member_seed`]`(base_seed, m)`.
pub fn quenched_resample(
    log: &ClockEventLog,
    m: usize,
    functional: Functional,
    base_seed: u64,
) -> Result<QuenchedEnsemble> {
    if m == 0 {
        return Err(domain!("quenched resampling needs M >= 1"));
    }
    functional.validate(log)?;
    let values = (0..m as u64)
        .map(|k| evaluate(log, member_seed(base_seed, k), functional))
        .collect();
    Ok(QuenchedEnsemble {
        clock_seed: log.seed(),
        n: log.n(),
        base_seed,
        functional,
        values,
    })
}

/// Conditional law of `S_n(v)` given `S_n(u) = x` when `N` coordinates changed
/// in `(u, v]`: Gaussian with mean `(1 - N/n)·x` and variance `N·(2 - N/n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalLaw {
    pub slope: f64,
    pub mean: f64,
    pub variance: f64,
}

pub fn conditional_law(n: usize, n_changed: usize, x: f64) -> Result<ConditionalLaw> {
    if n == 0 || n_changed > n {
        return Err(domain!(
            "need 0 <= N <= n with n >= 1, got N={n_changed}, n={n}"
        ));
    }
    let r = n_changed as f64 / n as f64;
    Ok(ConditionalLaw {
        slope: 1.0 - r,
        mean: (1.0 - r) * x,
        variance: n_changed as f64 * (2.0 - r),
    })
}

impl ConditionalLaw {
    /// `P{S_n(v) ≥ y | S_n(u) = x}`.
    pub fn tail(&self, y: f64) -> f64 {
        if self.variance == 0.0 {
            return if self.mean >= y { 1.0 } else { 0.0 };
        }
        phibar((y - self.mean) / math::sqrt(self.variance))
    }
}

/// One conditioning bin of the tail comparison.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBin {
    pub x_low: f64,
    pub x_high: f64,
    pub count: usize,
    pub hits: usize,
    pub empirical: f64,
    /// Mean over the bin members of the predicted conditional tail.
    pub predicted: f64,
    /// Binomial standard error at the predicted probability.
    pub se: f64,
}

#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, PartialEq)]
pub enum ConditionalFit {
    /// Ordinary least squares of `S_n(v)` on `S_n(u)`.
    Regression(Regression),
    /// `N = 0`: the law is a point mass and the check is `S_n(v) = S_n(u)`.
    ExactEquality { all_equal: bool, max_abs_diff: f64 },
}

#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalMomentsReport {
    pub n: usize,
    pub n_changed: usize,
    pub samples: usize,
    pub slope_target: f64,
    pub residual_variance_target: f64,
    pub fit: ConditionalFit,
    pub tail_level: f64,
    pub tail_bins: Vec<TailBin>,
}

impl ConditionalMomentsReport {
    /// Largest `|estimate - target| / SE` over slope and residual variance;
    /// `0` for the exact-equality case when it holds, `inf` when it fails.
    pub fn max_z_score(&self) -> f64 {
        match &self.fit {
            ConditionalFit::Regression(r) => {
                let zs = (r.slope - self.slope_target) / r.slope_se;
                let zv =
                    (r.residual_variance - self.residual_variance_target) / r.residual_variance_se;
                math::abs(zs).max(math::abs(zv))
            }
            ConditionalFit::ExactEquality { all_equal, .. } => {
                if *all_equal {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }
}

/// Builds the report from quenched `(S_n(u), S_n(v))` pairs. Tail bins use
/// the conditioning edges `x_edges` and the threshold `y`.
pub fn conditional_moments_from_pairs(
    n: usize,
    n_changed: usize,
    pairs: &[(f64, f64)],
    y: f64,
    x_edges: &[f64],
) -> Result<ConditionalMomentsReport> {
    if pairs.len() < 3 {
        return Err(domain!("need at least three pairs, got {}", pairs.len()));
    }
    if !x_edges.windows(2).all(|w| w[0] < w[1]) {
        return Err(domain!("bin edges must increase"));
    }
    let law = conditional_law(n, n_changed, 0.0)?;
    let fit = if n_changed == 0 {
        let max_abs_diff = pairs
            .iter()
            .map(|(a, b)| math::abs(b - a))
            .fold(0.0, f64::max);
        // Without refreshes both values are the same floating-point sum.
        ConditionalFit::ExactEquality {
            all_equal: max_abs_diff == 0.0,
            max_abs_diff,
        }
    } else {
        let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        ConditionalFit::Regression(linear_regression(&xs, &ys)?)
    };
    let mut tail_bins = Vec::with_capacity(x_edges.len().saturating_sub(1));
    for w in x_edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mut count = 0;
        let mut hits = 0;
        let mut predicted = 0.0;
        for &(x, v) in pairs.iter().filter(|p| p.0 >= lo && p.0 < hi) {
            count += 1;
            if v >= y {
                hits += 1;
            }
            predicted += conditional_law(n, n_changed, x)?.tail(y);
        }
        let (empirical, predicted, se) = if count == 0 {
            (0.0, 0.0, 0.0)
        } else {
            let c = count as f64;
            let p = predicted / c;
            (hits as f64 / c, p, math::sqrt(p * (1.0 - p) / c))
        };
        tail_bins.push(TailBin {
            x_low: lo,
            x_high: hi,
            count,
            hits,
            empirical,
            predicted,
            se,
        });
    }
    Ok(ConditionalMomentsReport {
        n,
        n_changed,
        samples: pairs.len(),
        slope_target: law.slope,
        residual_variance_target: law.variance,
        fit,
        tail_level: y,
        tail_bins,
    })
}

/// Serial version: `M` quenched pairs at `(u, v)`, tail level `y = √n` and
/// conditioning bins at `√n·{-2, -1, 0, 1, 2}`.
pub fn conditional_moments_check(
    log: &ClockEventLog,
    u: f64,
    v: f64,
    m: usize,
    base_seed: u64,
) -> Result<ConditionalMomentsReport> {
    let ens = quenched_resample(log, m, Functional::Pointwise { u, v }, base_seed)?;
    let n_changed = count_changed(log, u, v)?;
    let r = math::sqrt(log.n() as f64);
    let edges: Vec<f64> = [-2.0, -1.0, 0.0, 1.0, 2.0].iter().map(|k| k * r).collect();
    conditional_moments_from_pairs(log.n(), n_changed, &ens.pairs(), r, &edges)
}
