//! Nondecreasing growth envelopes `H(t)` for the integral tests.
//!
//! All evaluation goes through `u = ln t` because the integral tests look at
//! `t` far beyond the range of `f64`. Iterated logarithms follow the
//! convention `log x = ln(e ∨ x)`, so `log log t ≥ 1` everywhere.

use alloc::vec::Vec;

use crate::error::{domain, Result};
use crate::math;

#[derive(Debug, Clone, PartialEq)]
pub enum EnvelopeKind {
    /// `c·√(2 log log t)`.
    ScaledLil { c: f64 },
    /// `√(2 log log t + a·log log log t)`.
    Corollary { a: f64 },
    /// Linear interpolation in `ln t` through stored `(ln t, H)` pairs.
    Tabulated { ln_t: Vec<f64>, h: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthEnvelope {
    pub kind: EnvelopeKind,
    /// Restrict values to `[√(log log t), 2√(log log t)]`.
    pub clamped: bool,
}

/// `log log t` as a function of `u = ln t`.
#[inline]
pub fn loglog_of_ln(u: f64) -> f64 {
    math::log_e(if u <= 1.0 { 1.0 } else { u })
}

impl GrowthEnvelope {
    pub fn scaled_lil(c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(domain!("ScaledLil needs c > 0, got {c}"));
        }
        Ok(Self {
            kind: EnvelopeKind::ScaledLil { c },
            clamped: false,
        })
    }

    /// Needs `a ≥ -2`, which keeps `H` real and nondecreasing.
    pub fn corollary(a: f64) -> Result<Self> {
        if !(a >= -2.0) || !a.is_finite() {
            return Err(domain!("Corollary needs a >= -2, got {a}"));
        }
        Ok(Self {
            kind: EnvelopeKind::Corollary { a },
            clamped: false,
        })
    }

    /// From `(t, H(t))` pairs with `t ≥ 1`, strictly increasing in `t` and
    /// nondecreasing, nonnegative in `H`.
    pub fn tabulated(points: &[(f64, f64)]) -> Result<Self> {
        let log_points: Vec<(f64, f64)> = points
            .iter()
            .map(|&(t, h)| {
                if !(t >= 1.0) || !t.is_finite() {
                    Err(domain!("tabulated envelope needs finite t >= 1, got {t}"))
                } else {
                    Ok((math::ln(t), h))
                }
            })
            .collect::<Result<_>>()?;
        Self::tabulated_ln(&log_points)
    }

    /// From `(ln t, H(t))` pairs; reaches arguments beyond the `f64` range.
    pub fn tabulated_ln(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(domain!("tabulated envelope needs at least two points"));
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(domain!(
                    "tabulated envelope abscissae must strictly increase"
                ));
            }
            if !(w[1].1 >= w[0].1) {
                return Err(domain!("tabulated envelope must be nondecreasing"));
            }
        }
        if !(points[0].0 >= 0.0) || !(points[0].1 >= 0.0) {
            return Err(domain!("tabulated envelope needs t >= 1 and H >= 0"));
        }
        if points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
            return Err(domain!("tabulated envelope needs finite entries"));
        }
        Ok(Self {
            kind: EnvelopeKind::Tabulated {
                ln_t: points.iter().map(|p| p.0).collect(),
                h: points.iter().map(|p| p.1).collect(),
            },
            clamped: false,
        })
    }

    pub fn clamp(mut self) -> Self {
        self.clamped = true;
        self
    }

    pub fn is_parametric(&self) -> bool {
        !matches!(self.kind, EnvelopeKind::Tabulated { .. })
    }

    /// Largest `ln t` at which the envelope is defined (`inf` if parametric).
    pub fn ln_t_max(&self) -> f64 {
        match &self.kind {
            EnvelopeKind::Tabulated { ln_t, .. } => ln_t[ln_t.len() - 1],
            _ => f64::INFINITY,
        }
    }

    /// `H` at `ln t = u`; `None` past the end of a table.
    pub fn eval_ln(&self, u: f64) -> Option<f64> {
        let w = loglog_of_ln(u);
        let raw = match &self.kind {
            EnvelopeKind::Tabulated { ln_t, h } => {
                if u > ln_t[ln_t.len() - 1] {
                    return None;
                }
                if u <= ln_t[0] {
                    h[0]
                } else {
                    let k = ln_t.partition_point(|&x| x < u);
                    let (u0, u1) = (ln_t[k - 1], ln_t[k]);
                    let s = (u - u0) / (u1 - u0);
                    h[k - 1] + s * (h[k] - h[k - 1])
                }
            }
            _ => self.parametric_raw(w),
        };
        Some(self.apply_clamp(raw, w))
    }

    /// `H` at `t ≥ 1`.
    pub fn eval(&self, t: f64) -> Option<f64> {
        if !(t >= 1.0) {
            return None;
        }
        self.eval_ln(math::ln(t))
    }

    /// Parametric `H` as a function of `w = log log t ≥ 1`. `None` for tables.
    pub fn eval_loglog(&self, w: f64) -> Option<f64> {
        if !self.is_parametric() {
            return None;
        }
        Some(self.apply_clamp(self.parametric_raw(w), w))
    }

    /// `H² - 2w` at `w = log log t`, formed without cancellation. `None` for
    /// tables.
    pub fn square_excess_loglog(&self, w: f64) -> Option<f64> {
        let raw = match self.kind {
            EnvelopeKind::ScaledLil { c } => 2.0 * (c * c - 1.0) * w,
            EnvelopeKind::Corollary { a } => a * math::log_e(w),
            EnvelopeKind::Tabulated { .. } => return None,
        };
        // The clamp H² ∈ [w, 4w] reads as an excess in [-w, 2w].
        Some(if self.clamped {
            raw.clamp(-w, 2.0 * w)
        } else {
            raw
        })
    }

    fn parametric_raw(&self, w: f64) -> f64 {
        match self.kind {
            EnvelopeKind::ScaledLil { c } => c * math::sqrt(2.0 * w),
            EnvelopeKind::Corollary { a } => math::sqrt(2.0 * w + a * math::log_e(w)),
            EnvelopeKind::Tabulated { .. } => unreachable!("tables are not parametric"),
        }
    }

    fn apply_clamp(&self, h: f64, w: f64) -> f64 {
        if self.clamped {
            let r = math::sqrt(w);
            h.clamp(r, 2.0 * r)
        } else {
            h
        }
    }

    /// Asymptotic shape `H² = A·w + B·ln w + O(1)` in `w = log log t`, after
    /// clamping. `None` for tables.
    pub fn tail_shape(&self) -> Option<(f64, f64)> {
        let (a, b) = match self.kind {
            EnvelopeKind::ScaledLil { c } => (2.0 * c * c, 0.0),
            EnvelopeKind::Corollary { a } => (2.0, a),
            EnvelopeKind::Tabulated { .. } => return None,
        };
        if !self.clamped {
            return Some((a, b));
        }
        // The clamp is H² ∈ [w, 4w]; a shape that leaves it is pinned to the
        // boundary, which has no logarithmic correction.
        Some(if a < 1.0 {
            (1.0, 0.0)
        } else if a > 4.0 {
            (4.0, 0.0)
        } else {
            (a, b)
        })
    }
}
