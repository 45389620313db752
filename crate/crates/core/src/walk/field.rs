//! The rescaled two-parameter field `U^n_t(s) = S_{⌊nt⌋}(s)/√n` on a grid,
//! where `s` is clock time and `t ∈ [0, 1]` the fraction of increments summed.

use alloc::vec::Vec;

use crate::clocks::ClockEventLog;
use crate::error::{domain, Result};
use crate::math;
use crate::walk::engine::Walker;

/// Grid samples of the field; `value(i, j)` is `U^n_{t_j}(s_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RescaledFieldSample {
    pub n: usize,
    pub s_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    /// Row-major: one row per `s`, one column per `t`.
    pub values: Vec<f64>,
}

impl RescaledFieldSample {
    #[inline]
    pub fn value(&self, si: usize, ti: usize) -> f64 {
        self.values[si * self.t_grid.len() + ti]
    }
}

/// `⌊n·t⌋`, forgiving representation error when `n·t` is meant to be an
/// integer (e.g. `0.29 * 100`).
pub fn floor_index(n: usize, t: f64) -> usize {
    let x = n as f64 * t;
    let r = math::round(x);
    if math::abs(x - r) <= 1e-9 * r.max(1.0) {
        r as usize
    } else {
        math::floor(x) as usize
    }
}

fn check_grid(name: &str, grid: &[f64], hi: f64) -> Result<()> {
    if grid.is_empty() {
        return Err(domain!("{name} grid is empty"));
    }
    if !grid.windows(2).all(|w| w[0] <= w[1]) {
        return Err(domain!("{name} grid must be sorted"));
    }
    if !(grid[0] >= 0.0 && grid[grid.len() - 1] <= hi) {
        return Err(domain!("{name} grid must lie in [0, {hi}]"));
    }
    Ok(())
}

/// Samples `U^n` at every `(s, t)` grid pair from one realization.
pub fn rescaled_field(
    n: usize,
    log: &ClockEventLog,
    deviate_seed: u64,
    s_grid: &[f64],
    t_grid: &[f64],
) -> Result<RescaledFieldSample> {
    if log.n() != n {
        return Err(domain!(
            "walk length {n} does not match the clock log's n = {}",
            log.n()
        ));
    }
    check_grid("s", s_grid, log.horizon())?;
    check_grid("t", t_grid, 1.0)?;
    let ks: Vec<usize> = t_grid.iter().map(|&t| floor_index(n, t)).collect();
    let scale = 1.0 / math::sqrt(n as f64);
    let mut walker = Walker::new(log, deviate_seed);
    let mut values = Vec::with_capacity(s_grid.len() * t_grid.len());
    for &s in s_grid {
        walker.advance_to(s);
        let w = walker.increments();
        // Prefix sums in index order, read off at each requested length.
        let mut acc = 0.0;
        let mut done = 0;
        for &k in &ks {
            acc += w[done..k].iter().sum::<f64>();
            done = k;
            values.push(acc * scale);
        }
    }
    Ok(RescaledFieldSample {
        n,
        s_grid: s_grid.to_vec(),
        t_grid: t_grid.to_vec(),
        values,
    })
}

/// A half-open block `(length.0, length.1] × (time.0, time.1]`: the first
/// interval runs along the length axis `t`, the second along clock time `s`.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Block {
    pub length: (f64, f64),
    pub time: (f64, f64),
}

impl Block {
    pub fn new(length: (f64, f64), time: (f64, f64)) -> Result<Self> {
        let ok = |(a, b): (f64, f64)| 0.0 <= a && a <= b && b <= 1.0;
        if !ok(length) || !ok(time) {
            return Err(domain!(
                "block sides must satisfy 0 <= lo <= hi <= 1, got {length:?} x {time:?}"
            ));
        }
        Ok(Self { length, time })
    }

    /// Planar Lebesgue measure.
    pub fn area(&self) -> f64 {
        (self.length.1 - self.length.0) * (self.time.1 - self.time.0)
    }
}

fn overlap_free(a: (f64, f64), b: (f64, f64)) -> bool {
    a.1 <= b.0 || b.1 <= a.0
}

/// Neighboring pairs: the same time side with non-overlapping length sides
/// (horizontal), or the same length side with non-overlapping time sides
/// (vertical).
pub fn neighboring(i: &Block, j: &Block) -> bool {
    let horizontal = i.time == j.time && overlap_free(i.length, j.length);
    let vertical = i.length == j.length && overlap_free(i.time, j.time);
    horizontal || vertical
}

fn grid_position(grid: &[f64], x: f64, what: &str) -> Result<usize> {
    grid.iter()
        .position(|&g| math::abs(g - x) <= 1e-12)
        .ok_or_else(|| domain!("{what} {x} is not on the sample grid"))
}

/// `Y(t,v) - Y(t,u) - Y(s,v) + Y(s,u)` for the block `(s,t] × (u,v]`, with
/// `Y(t, s) = U^n_t(s)`.
pub fn block_increment(field: &RescaledFieldSample, block: &Block) -> Result<f64> {
    let (s, t) = block.length;
    let (u, v) = block.time;
    let ls = grid_position(&field.t_grid, s, "length")?;
    let lt = grid_position(&field.t_grid, t, "length")?;
    let tu = grid_position(&field.s_grid, u, "time")?;
    let tv = grid_position(&field.s_grid, v, "time")?;
    // Grouped so that a degenerate side gives an exact zero.
    Ok((field.value(tv, lt) - field.value(tv, ls)) - (field.value(tu, lt) - field.value(tu, ls)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clocks::sample_clocks;
    use crate::walk::path::simulate_path;

    #[test]
    fn floor_index_forgives_representation_error() {
        assert_eq!(floor_index(100, 0.29), 29);
        assert_eq!(floor_index(10, 0.7), 7);
        assert_eq!(floor_index(10, 0.75), 7);
        assert_eq!(floor_index(2000, 1.0), 2000);
        assert_eq!(floor_index(3, 0.0), 0);
    }

    #[test]
    fn zero_column_and_full_column() {
        let n = 40;
        let log = sample_clocks(n, 1.0, 2).unwrap();
        let s_grid = [0.0, 0.25, 0.25, 1.0];
        let f = rescaled_field(n, &log, 6, &s_grid, &[0.0, 0.5, 1.0]).unwrap();
        let path = simulate_path(n, &log, 6).unwrap();
        for (i, &s) in s_grid.iter().enumerate() {
            assert_eq!(f.value(i, 0), 0.0);
            let full = path.value_at(s).unwrap() / (n as f64).sqrt();
            assert!((f.value(i, 2) - full).abs() < 1e-12);
        }
        for j in 0..3 {
            assert_eq!(f.value(1, j), f.value(2, j));
        }
    }

    #[test]
    fn block_increments_telescope() {
        let log = sample_clocks(20, 1.0, 3).unwrap();
        let f = rescaled_field(20, &log, 1, &[0.0, 0.3, 0.6, 1.0], &[0.0, 0.25, 0.5, 1.0]).unwrap();
        let whole = Block::new((0.25, 1.0), (0.0, 1.0)).unwrap();
        let top = Block::new((0.25, 1.0), (0.0, 0.6)).unwrap();
        let bottom = Block::new((0.25, 1.0), (0.6, 1.0)).unwrap();
        let sum = block_increment(&f, &top).unwrap() + block_increment(&f, &bottom).unwrap();
        assert!((block_increment(&f, &whole).unwrap() - sum).abs() < 1e-12);
        let flat = Block::new((0.5, 0.5), (0.0, 1.0)).unwrap();
        assert_eq!(block_increment(&f, &flat).unwrap(), 0.0);
        let off = Block::new((0.1, 0.5), (0.0, 1.0)).unwrap();
        assert!(block_increment(&f, &off).is_err());
        assert!(neighboring(&top, &bottom));
        assert!(!neighboring(&top, &whole));
        assert!(!neighboring(
            &top,
            &Block::new((0.0, 0.5), (0.6, 1.0)).unwrap()
        ));
        assert!(Block::new((0.6, 0.5), (0.0, 1.0)).is_err());
    }
}
