//! The event-driven kernel shared by every path computation.
//!
//! Stream discipline: the `n` initial deviates are drawn first, in index
//! order, then one replacement deviate per event, in event order. Any two
//! computations seeded alike therefore see the same increments.

use alloc::vec::Vec;

use crate::clocks::ClockEventLog;
use crate::rng::Stream;

/// Events between exact index-order resummations of the running sum.
pub const RESUM_INTERVAL: usize = 1 << 16;

/// The current increments of one walk and their running sum.
#[derive(Debug, Clone)]
pub struct Increments {
    w: Vec<f64>,
    sum: f64,
    stream: Stream,
    since_resum: usize,
}

impl Increments {
    pub fn new(n: usize, deviate_seed: u64) -> Self {
        let mut stream = Stream::new(deviate_seed);
        let w: Vec<f64> = (0..n).map(|_| stream.normal()).collect();
        let sum = w.iter().sum();
        Self {
            w,
            sum,
            stream,
            since_resum: 0,
        }
    }

    /// Replaces coordinate `c` by a fresh deviate; returns `(old, new)`.
    #[inline]
    pub fn replace(&mut self, c: usize) -> (f64, f64) {
        let new = self.stream.normal();
        let old = core::mem::replace(&mut self.w[c], new);
        self.sum += new - old;
        self.since_resum += 1;
        if self.since_resum == RESUM_INTERVAL {
            self.resum();
        }
        (old, new)
    }

    /// Recomputes the running sum exactly, in index order.
    pub fn resum(&mut self) {
        self.sum = self.w.iter().sum();
        self.since_resum = 0;
    }

    #[inline]
    pub fn sum(&self) -> f64 {
        self.sum
    }

    pub fn values(&self) -> &[f64] {
        &self.w
    }
}

/// Walks a clock log event by event.
#[derive(Debug, Clone)]
pub struct Walker<'a> {
    log: &'a ClockEventLog,
    inc: Increments,
    next: usize,
}

impl<'a> Walker<'a> {
    pub fn new(log: &'a ClockEventLog, deviate_seed: u64) -> Self {
        Self {
            log,
            inc: Increments::new(log.n(), deviate_seed),
            next: 0,
        }
    }

    /// Current value `S_n` (after the events applied so far).
    #[inline]
    pub fn value(&self) -> f64 {
        self.inc.sum()
    }

    pub fn increments(&self) -> &[f64] {
        self.inc.values()
    }

    /// Index of the next event to apply.
    pub fn position(&self) -> usize {
        self.next
    }

    /// Applies the next event; returns its time and the new value.
    #[inline]
    pub fn step(&mut self) -> Option<(f64, f64)> {
        let t = *self.log.times().get(self.next)?;
        let c = self.log.coords()[self.next] as usize;
        self.next += 1;
        self.inc.replace(c);
        Some((t, self.inc.sum()))
    }

    /// Applies every remaining event at or before `t`.
    pub fn advance_to(&mut self, t: f64) {
        let times = self.log.times();
        while self.next < times.len() && times[self.next] <= t {
            self.step();
        }
    }
}

/// `sup_t S_n(t)` over the whole horizon, without storing the path.
pub fn walk_sup(log: &ClockEventLog, deviate_seed: u64) -> f64 {
    let mut walker = Walker::new(log, deviate_seed);
    let mut best = walker.value();
    while let Some((_, v)) = walker.step() {
        best = best.max(v);
    }
    best
}

/// `sup_t S_n(t)` together with the time spent at or above `level`.
pub fn walk_sup_occupation(log: &ClockEventLog, deviate_seed: u64, level: f64) -> (f64, f64) {
    let mut walker = Walker::new(log, deviate_seed);
    let mut best = walker.value();
    let mut occupied = 0.0;
    let mut seg_start = 0.0;
    let mut current = walker.value();
    while let Some((t, v)) = walker.step() {
        if current >= level {
            occupied += t - seg_start;
        }
        seg_start = t;
        current = v;
        best = best.max(v);
    }
    if current >= level {
        occupied += log.horizon() - seg_start;
    }
    (best, occupied)
}

/// `S_n(u)` and `S_n(v)` for `u ≤ v` (right-continuous values).
pub fn walk_pair(log: &ClockEventLog, deviate_seed: u64, u: f64, v: f64) -> (f64, f64) {
    let mut walker = Walker::new(log, deviate_seed);
    walker.advance_to(u);
    let at_u = walker.value();
    walker.advance_to(v);
    (at_u, walker.value())
}

/// Running suprema `sup_t S_m(t)` for each checkpoint length `m` in
/// `checkpoints` (strictly increasing, the last at most `log.n()`), from one
/// walk. Coordinates past the last checkpoint are drawn but never summed.
pub fn checkpoint_sups(log: &ClockEventLog, deviate_seed: u64, checkpoints: &[usize]) -> Vec<f64> {
    let mut stream = Stream::new(deviate_seed);
    let n = log.n();
    let mut w: Vec<f64> = (0..n).map(|_| stream.normal()).collect();
    let blocks = checkpoints.len();
    // Block b holds coordinates in [checkpoints[b-1], checkpoints[b]).
    let mut block_of: Vec<u16> = alloc::vec![u16::MAX; n];
    let mut lo = 0;
    for (b, &m) in checkpoints.iter().enumerate() {
        for slot in &mut block_of[lo..m] {
            *slot = b as u16;
        }
        lo = m;
    }
    let exact = |w: &[f64]| -> Vec<f64> {
        let mut out = Vec::with_capacity(blocks);
        let mut acc = 0.0;
        let mut lo = 0;
        for &m in checkpoints {
            acc += w[lo..m].iter().sum::<f64>();
            out.push(acc);
            lo = m;
        }
        out
    };
    let mut sums = exact(&w);
    let mut best = sums.clone();
    let mut since = 0usize;
    for (&c, _) in log.coords().iter().zip(log.times()) {
        let new = stream.normal();
        let c = c as usize;
        let old = core::mem::replace(&mut w[c], new);
        let b = block_of[c];
        since += 1;
        if since == RESUM_INTERVAL {
            sums = exact(&w);
            since = 0;
            for (m, s) in best.iter_mut().zip(&sums) {
                *m = m.max(*s);
            }
            continue;
        }
        if b == u16::MAX {
            continue;
        }
        let delta = new - old;
        for j in b as usize..blocks {
            sums[j] += delta;
            if sums[j] > best[j] {
                best[j] = sums[j];
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clocks::sample_clocks;

    #[test]
    fn checkpoint_sups_match_direct_sups() {
        // S_m under the first m coordinates of a larger system is the walk of
        // length m; compare against a direct scan of the stored increments.
        let log = sample_clocks(60, 1.0, 4).unwrap();
        let cps = [5, 17, 40, 60];
        let got = checkpoint_sups(&log, 9, &cps);
        let mut stream = Stream::new(9);
        let mut w: Vec<f64> = (0..60).map(|_| stream.normal()).collect();
        let partial = |w: &[f64], m: usize| w[..m].iter().sum::<f64>();
        let mut best: Vec<f64> = cps.iter().map(|&m| partial(&w, m)).collect();
        for &c in log.coords() {
            w[c as usize] = stream.normal();
            for (k, &m) in cps.iter().enumerate() {
                best[k] = best[k].max(partial(&w, m));
            }
        }
        for (a, b) in got.iter().zip(&best) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(got[3], walk_sup(&log, 9).max(got[3]));
        assert!((got[3] - walk_sup(&log, 9)).abs() < 1e-12);
    }

    #[test]
    fn occupation_and_sup_agree_on_hits() {
        for seed in 0..50 {
            let log = sample_clocks(40, 1.0, seed).unwrap();
            let level = 6.0;
            let (sup, occ) = walk_sup_occupation(&log, seed + 1000, level);
            assert_eq!(sup, walk_sup(&log, seed + 1000));
            assert_eq!(occ > 0.0, sup >= level, "seed {seed}");
            assert!((0.0..=1.0).contains(&occ));
        }
    }
}
