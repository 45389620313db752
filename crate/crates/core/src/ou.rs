//! Exact samplers for the limit objects: the stationary Ornstein-Uhlenbeck
//! process `U(s)` with covariance `e^{-|s-s'|}`, and the two-parameter field
//! `U_t(s) = e^{-s} B(e^{2s}, t)` built from a Brownian sheet `B`.

use alloc::vec::Vec;

use crate::error::{domain, Result};
use crate::estimate::Estimate;
use crate::math;
use crate::rng::{derive_seed, Stream};

/// Grid values `U(0), U(h), …, U(K·h)` with `K = ⌊1/h⌋`.
#[derive(Debug, Clone, PartialEq)]
pub struct OuPath {
    pub h: f64,
    pub values: Vec<f64>,
    pub seed: u64,
}

/// Number of steps covering `[0, 1]`, forgiving `1/h` rounding.
pub fn ou_steps(h: f64) -> Result<usize> {
    if !(h > 0.0 && h <= 0.1) {
        return Err(domain!("OU step must lie in (0, 0.1], got {h}"));
    }
    let x = 1.0 / h;
    let r = math::round(x);
    Ok(if math::abs(x - r) <= 1e-9 * r {
        r as usize
    } else {
        math::floor(x) as usize
    })
}

/// AR(1) coefficients `(e^{-h}, √(1 - e^{-2h}))`.
fn ar_coefficients(h: f64) -> (f64, f64) {
    let rho = math::exp(-h);
    (rho, math::sqrt(-math::expm1(-2.0 * h)))
}

/// Stationary exact discretization: `U(0) ~ N(0,1)` and
/// `U(s+h) = e^{-h} U(s) + √(1-e^{-2h}) ξ`.
pub fn sample_ou(h: f64, seed: u64) -> Result<OuPath> {
    let k = ou_steps(h)?;
    let (rho, sigma) = ar_coefficients(h);
    let mut stream = Stream::new(seed);
    let mut values = Vec::with_capacity(k + 1);
    let mut u = stream.normal();
    values.push(u);
    for _ in 0..k {
        u = rho * u + sigma * stream.normal();
        values.push(u);
    }
    Ok(OuPath { h, values, seed })
}

/// Grid maximum of one OU path, without storing it.
pub fn ou_grid_max(h: f64, seed: u64) -> Result<f64> {
    let k = ou_steps(h)?;
    let (rho, sigma) = ar_coefficients(h);
    let mut stream = Stream::new(seed);
    let mut u = stream.normal();
    let mut best = u;
    for _ in 0..k {
        u = rho * u + sigma * stream.normal();
        best = best.max(u);
    }
    Ok(best)
}

/// Grid maxima at step `h` and at `h/2` from one path on the finer grid:
/// the coarse maximum reads every other fine point, so the two are coupled.
pub fn ou_grid_max_halving(h: f64, seed: u64) -> Result<(f64, f64)> {
    let k = ou_steps(h)?;
    let (rho, sigma) = ar_coefficients(0.5 * h);
    let mut stream = Stream::new(seed);
    let mut u = stream.normal();
    let (mut coarse, mut fine) = (u, u);
    for i in 1..=2 * k {
        u = rho * u + sigma * stream.normal();
        fine = fine.max(u);
        if i % 2 == 0 {
            coarse = coarse.max(u);
        }
    }
    Ok((coarse, fine))
}

/// Serial Monte Carlo estimate of `P{max_grid U ≥ z}`; path `m` uses
/// `derive_seed(seed, m)`. The grid maximum never exceeds the continuous
/// supremum, so the estimate is biased low.
pub fn ou_sup_tail(z: f64, h: f64, m: u64, seed: u64) -> Result<Estimate> {
    if !z.is_finite() {
        return Err(domain!("level must be finite, got {z}"));
    }
    if m < 1000 {
        return Err(domain!("ou_sup_tail needs M >= 1000, got {m}"));
    }
    let mut hits = 0;
    for k in 0..m {
        if ou_grid_max(h, derive_seed(seed, k))? >= z {
            hits += 1;
        }
    }
    Ok(Estimate::from_counts(
        hits,
        m,
        seed,
        alloc::format!("ou_sup_tail z={z} h={h}"),
    ))
}

/// Samples of `U_t(s)`; `value(i, j)` is at `(s_i, t_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SheetFieldSample {
    pub s_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    /// Sheet abscissae `a_i = e^{2 s_i}`.
    pub a_grid: Vec<f64>,
    /// Row-major: one row per `s`.
    pub values: Vec<f64>,
    pub seed: u64,
}

impl SheetFieldSample {
    #[inline]
    pub fn value(&self, si: usize, ti: usize) -> f64 {
        self.values[si * self.t_grid.len() + ti]
    }
}

/// Builds `B` on `{e^{2s}} × {t}` from independent cell increments with
/// variance equal to the cell area (cells anchored at `a = 0`, `t = 0`), then
/// rescales to `U_t(s) = e^{-s} B(e^{2s}, t)`.
pub fn sample_sheet_field(s_grid: &[f64], t_grid: &[f64], seed: u64) -> Result<SheetFieldSample> {
    for (name, g) in [("s", s_grid), ("t", t_grid)] {
        if g.is_empty() || !g.windows(2).all(|w| w[0] <= w[1]) || g[0] < 0.0 || g[g.len() - 1] > 1.0
        {
            return Err(domain!(
                "{name} grid must be non-empty, sorted and inside [0, 1]"
            ));
        }
    }
    let a_grid: Vec<f64> = s_grid.iter().map(|&s| math::exp(2.0 * s)).collect();
    let (rows, cols) = (s_grid.len(), t_grid.len());
    let mut stream = Stream::new(seed);
    let mut sheet = alloc::vec![0.0; rows * cols];
    for i in 0..rows {
        let da = a_grid[i] - if i == 0 { 0.0 } else { a_grid[i - 1] };
        for j in 0..cols {
            let dt = t_grid[j] - if j == 0 { 0.0 } else { t_grid[j - 1] };
            let cell = math::sqrt(da * dt) * stream.normal();
            // 2-D prefix accumulation.
            let up = if i > 0 {
                sheet[(i - 1) * cols + j]
            } else {
                0.0
            };
            let left = if j > 0 { sheet[i * cols + j - 1] } else { 0.0 };
            let diag = if i > 0 && j > 0 {
                sheet[(i - 1) * cols + j - 1]
            } else {
                0.0
            };
            sheet[i * cols + j] = cell + up + left - diag;
        }
    }
    let values = sheet
        .iter()
        .enumerate()
        .map(|(k, b)| math::exp(-s_grid[k / cols]) * b)
        .collect();
    Ok(SheetFieldSample {
        s_grid: s_grid.to_vec(),
        t_grid: t_grid.to_vec(),
        a_grid,
        values,
        seed,
    })
}
