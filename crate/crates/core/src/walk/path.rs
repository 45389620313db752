//! Stored piecewise-constant paths `t ↦ S_n(t)` and their functionals.

use alloc::vec::Vec;

use crate::clocks::ClockEventLog;
use crate::error::{domain, Error, Result};
use crate::prefix_tree::MaxPrefixTree;
use crate::rng::Stream;
use crate::walk::engine::{Increments, Walker};

/// Work cap `n·(Π + 1)` of [`brute_force_path`].
pub const BRUTE_FORCE_BUDGET: usize = 10_000_000;

/// A right-continuous step path: `values[i]` holds on `[times[i], times[i+1])`,
/// the last value up to and including the horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkPath {
    pub n: usize,
    pub horizon: f64,
    /// `0` followed by the event times.
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Seed of the clock log the path was driven by.
    pub clock_seed: u64,
    pub deviate_seed: u64,
}

impl WalkPath {
    /// Number of constant segments.
    pub fn segments(&self) -> usize {
        self.values.len()
    }

    /// `S_n(t)` for `t` in `[0, horizon]`.
    pub fn value_at(&self, t: f64) -> Result<f64> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(domain!("time {t} outside [0, {}]", self.horizon));
        }
        let i = self.times.partition_point(|&x| x <= t) - 1;
        Ok(self.values[i])
    }

    /// Builds a path from explicit segments (mainly for tests).
    pub fn from_segments(horizon: f64, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() || times[0] != 0.0 {
            return Err(domain!("segments need matching lengths and times[0] = 0"));
        }
        if !times.windows(2).all(|w| w[0] < w[1]) || times[times.len() - 1] > horizon {
            return Err(domain!("segment times must increase within [0, {horizon}]"));
        }
        Ok(Self {
            n: 0,
            horizon,
            times,
            values,
            clock_seed: 0,
            deviate_seed: 0,
        })
    }
}

fn check_n(n: usize, log: &ClockEventLog) -> Result<()> {
    if log.n() != n {
        return Err(domain!(
            "walk length {n} does not match the clock log's n = {}",
            log.n()
        ));
    }
    Ok(())
}

/// Simulates the walk driven by `log`, updating the sum incrementally.
pub fn simulate_path(n: usize, log: &ClockEventLog, deviate_seed: u64) -> Result<WalkPath> {
    check_n(n, log)?;
    let mut walker = Walker::new(log, deviate_seed);
    let mut times = Vec::with_capacity(log.len() + 1);
    let mut values = Vec::with_capacity(log.len() + 1);
    times.push(0.0);
    values.push(walker.value());
    while let Some((t, v)) = walker.step() {
        times.push(t);
        values.push(v);
    }
    Ok(WalkPath {
        n,
        horizon: log.horizon(),
        times,
        values,
        clock_seed: log.seed(),
        deviate_seed,
    })
}

/// Reference implementation of [`simulate_path`]: same draws, but the sum is
/// recomputed from scratch after every event.
pub fn brute_force_path(n: usize, log: &ClockEventLog, deviate_seed: u64) -> Result<WalkPath> {
    check_n(n, log)?;
    let work = n.saturating_mul(log.len() + 1);
    if work > BRUTE_FORCE_BUDGET {
        return Err(Error::Budget(alloc::format!(
            "brute force needs n·(Π+1) = {work} > {BRUTE_FORCE_BUDGET}"
        )));
    }
    let mut stream = Stream::new(deviate_seed);
    let mut w: Vec<f64> = (0..n).map(|_| stream.normal()).collect();
    let mut times = Vec::with_capacity(log.len() + 1);
    let mut values = Vec::with_capacity(log.len() + 1);
    times.push(0.0);
    values.push(w.iter().sum());
    for (t, &c) in log.times().iter().zip(log.coords()) {
        w[c as usize] = stream.normal();
        times.push(*t);
        values.push(w.iter().sum());
    }
    Ok(WalkPath {
        n,
        horizon: log.horizon(),
        times,
        values,
        clock_seed: log.seed(),
        deviate_seed,
    })
}

/// Maximum of the path over the window `[a, b]`.
///
/// The value in force at `a` counts, as does every segment starting in
/// `(a, b)`. A segment starting exactly at `b` counts only when `b` is the
/// horizon, so a window `(0, b)` and `[0, b]` differ only at `b`.
pub fn path_sup(path: &WalkPath, a: f64, b: f64) -> Result<f64> {
    if !(a <= b) {
        return Err(domain!("empty window [{a}, {b}]"));
    }
    if !(a >= 0.0 && b <= path.horizon) {
        return Err(domain!("window [{a}, {b}] outside [0, {}]", path.horizon));
    }
    let first = path.times.partition_point(|&x| x <= a) - 1;
    let end = if b == path.horizon {
        path.times.len()
    } else {
        path.times.partition_point(|&x| x < b)
    };
    let mut best = path.values[first];
    for &v in &path.values[first + 1..end.max(first + 1)] {
        best = best.max(v);
    }
    Ok(best)
}

/// Lebesgue measure of `{v ∈ [0, horizon] : S(v) ≥ level}`.
pub fn occupation_time(path: &WalkPath, level: f64) -> f64 {
    let k = path.values.len();
    (0..k)
        .filter(|&i| path.values[i] >= level)
        .map(|i| {
            let end = if i + 1 < k {
                path.times[i + 1]
            } else {
                path.horizon
            };
            end - path.times[i]
        })
        .sum()
}

/// `sup_t max_{1≤k≤n} S_k(t)` and `sup_t S_n(t)` from a single realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunningMax {
    pub running_max_sup: f64,
    pub path_sup: f64,
}

/// Running-maximum supremum, maintained with a max-prefix segment tree over
/// the increments. Uses the same draws as [`simulate_path`]; the `k = n`
/// prefix is taken from the walk's own running sum, so the result is never
/// below the path supremum of the same realization.
pub fn running_max_sup(n: usize, log: &ClockEventLog, deviate_seed: u64) -> Result<f64> {
    Ok(running_max(n, log, deviate_seed)?.running_max_sup)
}

pub fn running_max(n: usize, log: &ClockEventLog, deviate_seed: u64) -> Result<RunningMax> {
    check_n(n, log)?;
    let mut inc = Increments::new(n, deviate_seed);
    let mut tree = MaxPrefixTree::new(inc.values());
    let mut path_sup = inc.sum();
    let mut best = tree.max_prefix().max(path_sup);
    for &c in log.coords() {
        let (_, new) = inc.replace(c as usize);
        tree.update(c as usize, new);
        let s = inc.sum();
        path_sup = path_sup.max(s);
        best = best.max(tree.max_prefix()).max(s);
    }
    Ok(RunningMax {
        running_max_sup: best,
        path_sup,
    })
}
