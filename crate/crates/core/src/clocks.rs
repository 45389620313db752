//! Superposed rate-one Poisson clocks and the changed-coordinate counts.
//!
//! The `n` clocks are generated as a single Poisson process of rate `n` whose
//! events carry independent uniform coordinate marks. Windows are half-open,
//! `(s, t]`: an event at time `s` is before the window, one at `t` inside it.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{domain, Error, Result};
use crate::math;
use crate::rng::Stream;

/// Default event cap above which [`DeviationMode::ExactSweep`] refuses to run.
pub const EXACT_SWEEP_CAP: usize = 20_000;

/// One realization of the `n` clocks on `(0, horizon]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClockEventLog {
    n: usize,
    horizon: f64,
    seed: u64,
    times: Vec<f64>,
    /// Zero-based coordinate of each event.
    coords: Vec<u32>,
    /// Position of the previous event of the same coordinate, plus one;
    /// zero when there is none.
    prev: Vec<u32>,
}

/// Samples the clocks. Deterministic in `(n, horizon, seed)`.
///
/// Inter-arrival gaps are exponential with rate `n`, so the times come out
/// sorted; each event is then assigned a uniform coordinate. The draws
/// alternate gap, coordinate, gap, coordinate, ...
pub fn sample_clocks(n: usize, horizon: f64, seed: u64) -> Result<ClockEventLog> {
    check_shape(n, horizon)?;
    let mut stream = Stream::new(seed);
    let rate = n as f64;
    let mut times = Vec::with_capacity((rate * horizon * 1.05 + 16.0) as usize);
    let mut coords = Vec::with_capacity(times.capacity());
    let mut t = 0.0f64;
    loop {
        let mut next = t + stream.exponential() / rate;
        if next > horizon {
            break;
        }
        if next <= t {
            // Ties have probability zero but can arise from rounding; keep the
            // draw order and make the times strictly increasing.
            next = math::next_up(t);
            if next > horizon {
                break;
            }
        }
        t = next;
        times.push(t);
        coords.push(stream.below(n as u64) as u32);
    }
    Ok(ClockEventLog::assemble(n, horizon, seed, times, coords))
}

fn check_shape(n: usize, horizon: f64) -> Result<()> {
    if n == 0 || n > u32::MAX as usize {
        return Err(domain!("clock count n must lie in 1..=2^32-1, got {n}"));
    }
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(domain!(
            "horizon must be positive and finite, got {horizon}"
        ));
    }
    Ok(())
}

impl ClockEventLog {
    fn assemble(n: usize, horizon: f64, seed: u64, times: Vec<f64>, coords: Vec<u32>) -> Self {
        let mut last = vec![0u32; n];
        let prev = coords
            .iter()
            .enumerate()
            .map(|(k, &c)| core::mem::replace(&mut last[c as usize], k as u32 + 1))
            .collect();
        Self {
            n,
            horizon,
            seed,
            times,
            coords,
            prev,
        }
    }

    /// Builds a log from explicit events with one-based coordinates, as read
    /// back from a file. Times must be strictly increasing in `(0, horizon]`.
    pub fn from_events(n: usize, horizon: f64, seed: u64, events: &[(f64, usize)]) -> Result<Self> {
        check_shape(n, horizon)?;
        let mut times = Vec::with_capacity(events.len());
        let mut coords = Vec::with_capacity(events.len());
        let mut last = 0.0;
        for (k, &(t, j)) in events.iter().enumerate() {
            if !(t > last && t <= horizon) {
                return Err(domain!(
                    "event {k}: time {t} not strictly increasing within (0, {horizon}]"
                ));
            }
            if j == 0 || j > n {
                return Err(domain!("event {k}: coordinate {j} outside 1..={n}"));
            }
            last = t;
            times.push(t);
            coords.push((j - 1) as u32);
        }
        Ok(Self::assemble(n, horizon, seed, times, coords))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Event times, strictly increasing.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Zero-based coordinate of each event.
    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    /// Events as `(time, one-based coordinate)`.
    pub fn events(&self) -> impl Iterator<Item = (f64, usize)> + '_ {
        self.times
            .iter()
            .zip(&self.coords)
            .map(|(&t, &c)| (t, c as usize + 1))
    }

    /// Number of events at or before `t`.
    pub fn count_upto(&self, t: f64) -> usize {
        self.times.partition_point(|&x| x <= t)
    }

    /// Per-coordinate event counts.
    pub fn per_coordinate_counts(&self) -> Vec<u32> {
        let mut counts = vec![0u32; self.n];
        for &c in &self.coords {
            counts[c as usize] += 1;
        }
        counts
    }
}

/// Total number of replacements.
pub fn pi_total(log: &ClockEventLog) -> usize {
    log.len()
}

/// Whether the log lies in the good region `Π_n ≤ 3n`.
pub fn g_indicator(log: &ClockEventLog) -> bool {
    log.len() <= 3 * log.n
}

/// Number of distinct coordinates with at least one event in `(s, t]`.
pub fn count_changed(log: &ClockEventLog, s: f64, t: f64) -> Result<usize> {
    if !(s <= t) {
        return Err(domain!("count_changed needs s <= t, got s={s}, t={t}"));
    }
    if !(s >= 0.0 && t <= log.horizon) {
        return Err(domain!("window ({s}, {t}] leaves [0, {}]", log.horizon));
    }
    let a = log.count_upto(s);
    let b = log.count_upto(t);
    // An event is the first of its coordinate in the window iff the previous
    // one (if any) is at or before s.
    Ok(log.prev[a..b].iter().filter(|&&p| p as usize <= a).count())
}

/// `E N_{s→t} = n(1 - e^{-(t-s)})`.
pub fn expected_changed(n: usize, s: f64, t: f64) -> Result<f64> {
    if !(s >= 0.0 && s <= t) || !t.is_finite() {
        return Err(domain!(
            "expected_changed needs 0 <= s <= t, got s={s}, t={t}"
        ));
    }
    Ok(-(n as f64) * math::expm1(-(t - s)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeviationMode {
    /// Exact supremum over all admissible windows; refused above `cap` events.
    ExactSweep { cap: usize },
    /// Supremum over the grid `{c·horizon/k : 0 ≤ c ≤ k}`.
    Grid { k: usize },
}

impl DeviationMode {
    pub fn exact() -> Self {
        DeviationMode::ExactSweep {
            cap: EXACT_SWEEP_CAP,
        }
    }

    /// The grid with `k = ⌊1 + 8/(αΔ)⌋`.
    pub fn grid_for(delta: f64, alpha: f64) -> Result<Self> {
        Ok(DeviationMode::Grid {
            k: crate::analytic::clock_grid_size(delta, alpha)?,
        })
    }
}

#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeviationMethod {
    ExactSweep,
    Grid,
}

/// `sup |N_{s→t} / E N_{s→t} - 1|` over windows of length at least `delta`.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationStat {
    pub delta: f64,
    pub value: f64,
    pub method: DeviationMethod,
    pub grid_k: Option<usize>,
    /// Grid mode only: an upper bound on the exact supremum, obtained by
    /// sandwiching every window between neighbouring grid windows.
    pub upper_bound: Option<f64>,
}

pub fn uniform_deviation(
    log: &ClockEventLog,
    delta: f64,
    mode: DeviationMode,
) -> Result<DeviationStat> {
    if !(delta > 0.0 && delta <= log.horizon) {
        return Err(domain!(
            "delta must lie in (0, {}], got {delta}",
            log.horizon
        ));
    }
    match mode {
        DeviationMode::ExactSweep { cap } => {
            if log.len() > cap {
                return Err(Error::Budget(alloc::format!(
                    "exact sweep over {} events exceeds the cap of {cap}; use the grid",
                    log.len()
                )));
            }
            Ok(DeviationStat {
                delta,
                value: exact_sweep(log, delta),
                method: DeviationMethod::ExactSweep,
                grid_k: None,
                upper_bound: None,
            })
        }
        DeviationMode::Grid { k } => {
            if k == 0 {
                return Err(domain!("grid needs k >= 1"));
            }
            let (value, upper) = grid_sweep(log, delta, k);
            Ok(DeviationStat {
                delta,
                value,
                method: DeviationMethod::Grid,
                grid_k: Some(k),
                upper_bound: Some(upper),
            })
        }
    }
}

/// `N` is constant on the rectangles `s ∈ [τ_a, τ_{a+1})`, `t ∈ [τ_b, τ_{b+1})`
/// and `E N` is increasing in `t - s`, so the supremum on a rectangle is
/// attained in the limit at its shortest or longest admissible window.
fn exact_sweep(log: &ClockEventLog, delta: f64) -> f64 {
    let n = log.n as f64;
    let h = log.horizon;
    let m = log.len();
    let tau = |k: usize| -> f64 {
        if k == 0 {
            0.0
        } else if k > m {
            h
        } else {
            log.times[k - 1]
        }
    };
    let en = |d: f64| -n * math::expm1(-d);
    let mut best = 0.0f64;
    for a in 0..=m {
        let s_lo = tau(a);
        let s_hi = tau(a + 1);
        let mut count = 0usize;
        for b in a..=m {
            if b > a && log.prev[b - 1] as usize <= a {
                count += 1;
            }
            let d_max = tau(b + 1) - s_lo;
            if d_max < delta {
                continue;
            }
            let d_min = (tau(b) - s_hi).max(delta);
            let c = count as f64;
            let r_short = c / en(d_min) - 1.0;
            let r_long = c / en(d_max) - 1.0;
            best = best.max(math::abs(r_short)).max(math::abs(r_long));
        }
    }
    best
}

/// Smallest grid index `c` with `c·h/k ≥ x`.
fn grid_ceil(x: f64, h: f64, k: usize) -> usize {
    let point = |c: usize| c as f64 * h / k as f64;
    let mut c = (math::ceil(x * k as f64 / h).max(0.0) as usize).min(k);
    while c > 0 && point(c - 1) >= x {
        c -= 1;
    }
    while c < k && point(c) < x {
        c += 1;
    }
    c
}

fn grid_sweep(log: &ClockEventLog, delta: f64, k: usize) -> (f64, f64) {
    let n = log.n as f64;
    let h = log.horizon;
    let point = |c: usize| c as f64 * h / k as f64;
    let en = |d: f64| -n * math::expm1(-d);

    // An event counts in N(g_i, g_j] iff pc ≤ i < tc ≤ j, where tc is the
    // grid cell of the event and pc that of its predecessor (0 if none).
    let mut by_pc: Vec<Vec<u32>> = vec![Vec::new(); k + 1];
    for (idx, &t) in log.times.iter().enumerate() {
        let tc = grid_ceil(t, h, k);
        let pc = match log.prev[idx] {
            0 => 0,
            p => grid_ceil(log.times[p as usize - 1], h, k),
        };
        if pc < tc {
            by_pc[pc].push(tc as u32);
        }
    }

    // Rows N(i, ·) are built in increasing i; `active[c]` counts events with
    // pc ≤ i < tc = c. Only the current and previous rows are kept.
    let mut active: Vec<u32> = vec![0; k + 1];
    let mut prev_row: Vec<u32> = vec![0; k + 1];
    let mut row: Vec<u32> = vec![0; k + 1];
    let mut value = 0.0f64;
    let mut upper = 0.0f64;
    for (i, starts) in by_pc.iter().enumerate() {
        for &tc in starts {
            active[tc as usize] += 1;
        }
        let mut acc = 0u32;
        for j in 0..=k {
            if j > i {
                acc += active[j];
            }
            row[j] = acc;
        }
        for (j, &count) in row.iter().enumerate().skip(i) {
            let d = point(j) - point(i);
            if d >= delta {
                value = value.max(math::abs(count as f64 / en(d) - 1.0));
            }
        }
        if i > 0 {
            // Windows with s ∈ [g_{i-1}, g_i] and t ∈ [g_j, g_{j+1}] contain
            // (g_i, g_j] and sit inside (g_{i-1}, g_{j+1}].
            let c = i - 1;
            for j in c..=k {
                let t_top = if j < k { point(j + 1) } else { h };
                let d_max = t_top - point(c);
                if d_max < delta {
                    continue;
                }
                let d_min = (point(j) - point(i)).max(delta);
                let n_hi = prev_row[(j + 1).min(k)] as f64;
                let n_lo = if i < j { row[j] as f64 } else { 0.0 };
                upper = upper
                    .max(n_hi / en(d_min) - 1.0)
                    .max(1.0 - n_lo / en(d_max));
            }
        }
        core::mem::swap(&mut prev_row, &mut row);
    }
    (value, upper.max(value))
}
