//! Closed-form probability bounds and the two-sided tail band.
//!
//! Probability-valued bounds are returned as a [`Bound`], which keeps the raw
//! value (often far above one at desk scale) next to the value clamped to
//! `[0, 1]`. The raw value is carried in log space as well, since the
//! prefactors overflow long before the bound becomes informative.

use crate::analytic::gaussian::{phibar, tail_f};
use crate::error::{domain, Result};
use crate::math;

/// A probability bound in raw and clamped form.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound {
    /// Natural log of the raw bound.
    pub ln_raw: f64,
    /// Raw bound (may exceed one, may overflow to `inf`).
    pub raw: f64,
    /// `min(1, raw)`.
    pub clamped: f64,
}

impl Bound {
    pub fn from_ln(ln_raw: f64) -> Self {
        let raw = math::exp(ln_raw);
        Self {
            ln_raw,
            raw,
            clamped: raw.min(1.0),
        }
    }

    /// Whether the bound says nothing (raw value at least one).
    pub fn is_vacuous(&self) -> bool {
        self.ln_raw >= 0.0
    }
}

/// Bernstein's inequality for a binomial proportion:
/// `2·exp(-nλ² / (2p + 2λ/3))`.
pub fn bernstein_bound(n: u64, p: f64, lambda: f64) -> Result<Bound> {
    if n == 0 {
        return Err(domain!("bernstein_bound needs n >= 1"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(domain!("bernstein_bound needs p in [0, 1], got {p}"));
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(domain!("bernstein_bound needs lambda >= 0, got {lambda}"));
    }
    if lambda == 0.0 {
        return Ok(Bound::from_ln(core::f64::consts::LN_2));
    }
    let exponent = -(n as f64) * lambda * lambda / (2.0 * p + 2.0 * lambda / 3.0);
    Ok(Bound::from_ln(core::f64::consts::LN_2 + exponent))
}

/// Uniform concentration of the changed-coordinate counts over windows of
/// length at least `delta`: `512/(α²Δ²) · exp(-3α³nΔ/2304)`.
pub fn clock_uniform_bound(n: u64, delta: f64, alpha: f64) -> Result<Bound> {
    check_alpha_delta(delta, alpha)?;
    let n = n as f64;
    let ln_raw = math::ln(512.0)
        - 2.0 * math::ln(alpha * delta)
        - 3.0 * alpha * alpha * alpha * n * delta / 2304.0;
    Ok(Bound::from_ln(ln_raw))
}

/// Points per axis of the time grid used by the concentration argument:
/// `k = ⌊1 + 8/(αΔ)⌋`.
pub fn clock_grid_size(delta: f64, alpha: f64) -> Result<usize> {
    check_alpha_delta(delta, alpha)?;
    // Nudge up by a few ulps so that exact products such as 0.2·0.05 do not
    // land one point short after rounding.
    let k = math::floor((1.0 + 8.0 / (alpha * delta)) * (1.0 + 4.0 * f64::EPSILON));
    if k > 1e8 {
        return Err(domain!(
            "grid size {k} too large for delta={delta}, alpha={alpha}"
        ));
    }
    Ok(k as usize)
}

fn check_alpha_delta(delta: f64, alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain!("alpha must lie in (0, 1), got {alpha}"));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(domain!("delta must lie in (0, 1], got {delta}"));
    }
    Ok(())
}

/// Chernoff bound for a Poisson count with mean `n` to reach `x`:
/// `exp(-n - x·ln(x/(e·n)))`.
pub fn poisson_chernoff(n: f64, x: f64) -> Result<Bound> {
    if !(n > 0.0) || !n.is_finite() || !(x > 0.0) || !x.is_finite() {
        return Err(domain!(
            "poisson_chernoff needs n > 0 and x > 0, got n={n}, x={x}"
        ));
    }
    Ok(Bound::from_ln(-n - x * (math::ln(x / n) - 1.0)))
}

/// Upper envelope `e^{-z²ε}Φ̄(z)` for the shifted tail `Φ̄(z + εz)`.
pub fn phibar_shift_upper(z: f64, eps: f64) -> Result<f64> {
    if !(z >= 1.0) || !z.is_finite() {
        return Err(domain!("phibar_shift_upper needs z >= 1, got {z}"));
    }
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(domain!("phibar_shift_upper needs eps >= 0, got {eps}"));
    }
    Ok(math::exp(-z * z * eps) * phibar(z))
}

/// Upper envelope `(1 + e^{2γ})Φ̄(z)` for the shifted tail `Φ̄(z - γ/z)`.
pub fn phibar_shift_lower(z: f64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(domain!("phibar_shift_lower needs gamma > 0, got {gamma}"));
    }
    if !(z >= math::sqrt(gamma)) || !z.is_finite() {
        return Err(domain!(
            "phibar_shift_lower needs z >= sqrt(gamma), got z={z}, gamma={gamma}"
        ));
    }
    Ok((1.0 + math::exp(2.0 * gamma)) * phibar(z))
}

/// Coefficients and slack of a two-sided band `[lo·f(z), hi·f(z)]` around
/// the tail weight `f(z) = z²Φ̄(z)`.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBand {
    pub lower_coeff: f64,
    pub upper_coeff: f64,
    pub slack_low: f64,
    pub slack_high: f64,
}

impl Default for TailBand {
    /// Coefficients `1/9` and `2` with unit slack.
    fn default() -> Self {
        Self {
            lower_coeff: 1.0 / 9.0,
            upper_coeff: 2.0,
            slack_low: 1.0,
            slack_high: 1.0,
        }
    }
}

impl TailBand {
    pub fn new(
        lower_coeff: f64,
        upper_coeff: f64,
        slack_low: f64,
        slack_high: f64,
    ) -> Result<Self> {
        let band = Self {
            lower_coeff,
            upper_coeff,
            slack_low,
            slack_high,
        };
        band.validate()?;
        Ok(band)
    }

    /// Symmetric band `[f/K, K·f]` with unit slack.
    pub fn mountford(k: f64) -> Result<Self> {
        if !(k > 1.0) || !k.is_finite() {
            return Err(domain!("band constant K must exceed 1, got {k}"));
        }
        Self::new(1.0 / k, k, 1.0, 1.0)
    }

    pub fn with_slack(self, slack_low: f64, slack_high: f64) -> Result<Self> {
        Self::new(self.lower_coeff, self.upper_coeff, slack_low, slack_high)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.lower_coeff,
            self.upper_coeff,
            self.slack_low,
            self.slack_high,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite || !(self.lower_coeff > 0.0 && self.lower_coeff < self.upper_coeff) {
            return Err(domain!(
                "band coefficients need 0 < lower < upper, got {} and {}",
                self.lower_coeff,
                self.upper_coeff
            ));
        }
        if !(self.slack_low > 0.0 && self.slack_low <= 1.0 && self.slack_high >= 1.0) {
            return Err(domain!(
                "band slack needs 0 < low <= 1 <= high, got {} and {}",
                self.slack_low,
                self.slack_high
            ));
        }
        Ok(())
    }
}

/// A band evaluated at one `z`.
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandInterval {
    pub low: f64,
    /// Upper end, capped at one.
    pub high: f64,
    /// Upper end before the cap.
    pub raw_high: f64,
    /// `false` when `z < 1`, below the regime the band is stated for. The
    /// interval is still computed.
    pub in_regime: bool,
}

/// Evaluates `band` at `z`: `(slack_low·lower·f(z), min(1, slack_high·upper·f(z)))`.
pub fn tail_band(z: f64, band: &TailBand) -> Result<BandInterval> {
    band.validate()?;
    let f = tail_f(z)?;
    let raw_high = band.slack_high * band.upper_coeff * f;
    Ok(BandInterval {
        low: band.slack_low * band.lower_coeff * f,
        high: raw_high.min(1.0),
        raw_high,
        in_regime: z >= 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::gaussian::normal_sf;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn tail_band_reference_values() {
        let b = tail_band(2.5, &TailBand::default()).unwrap();
        assert!(rel(b.low, 0.004_312_267_587_344_538) < 1e-13);
        assert!(rel(b.high, 0.077_620_816_572_201_68) < 1e-13);
        assert!(b.in_regime);

        let b = tail_band(1.0, &TailBand::default()).unwrap();
        let p1 = normal_sf(1.0).unwrap();
        assert!(rel(b.low, p1 / 9.0) < 1e-14);
        assert!(rel(b.high, 2.0 * p1) < 1e-14);

        let wide = TailBand::default().with_slack(1.0, 100.0).unwrap();
        let b = tail_band(1.0, &wide).unwrap();
        assert_eq!(b.high, 1.0);
        assert!(b.raw_high > 1.0);

        let b = tail_band(0.5, &TailBand::default()).unwrap();
        assert!(!b.in_regime);
        assert!(tail_band(0.0, &TailBand::default()).is_err());
    }

    #[test]
    fn band_validation() {
        assert!(TailBand::new(2.0, 1.0, 1.0, 1.0).is_err());
        assert!(TailBand::default().with_slack(1.5, 2.0).is_err());
        assert!(TailBand::default().with_slack(0.5, 0.9).is_err());
        let m = TailBand::mountford(10.0).unwrap();
        assert_eq!((m.lower_coeff, m.upper_coeff), (0.1, 10.0));
        assert!(TailBand::mountford(1.0).is_err());
    }

    #[test]
    fn bernstein_values() {
        let b = bernstein_bound(1000, 0.5, 0.0).unwrap();
        assert_eq!(b.clamped, 1.0);
        assert!(rel(b.raw, 2.0) < 1e-15);
        let b = bernstein_bound(1000, 0.5, 0.1).unwrap();
        assert!(rel(b.clamped, 1.696_364_704_929_38e-4) < 1e-12);
        assert!(bernstein_bound(10, 0.5, -0.1).is_err());
        assert!(bernstein_bound(0, 0.5, 0.1).is_err());
        let mut prev = 1.0;
        for n in [10, 100, 1000, 10_000] {
            let b = bernstein_bound(n, 0.3, 0.05).unwrap().clamped;
            assert!(b <= prev);
            prev = b;
        }
    }

    #[test]
    fn clock_bound_values() {
        let b = clock_uniform_bound(100_000, 0.05, 0.5).unwrap();
        assert!(rel(b.raw, 363_044.77) < 1e-6);
        assert_eq!(b.clamped, 1.0);
        assert!(rel(b.ln_raw, (819_200.0f64).ln() - 0.813_802_083_333_333_3) < 1e-12);
        let b = clock_uniform_bound(10_000_000, 0.05, 0.5).unwrap();
        assert!(rel(b.clamped, 3.718_900_238_465_71e-30) < 1e-10);
        assert_eq!(clock_uniform_bound(1000, 1e-9, 0.5).unwrap().clamped, 1.0);
        assert!(clock_uniform_bound(10, 0.05, 1.0).is_err());
        assert!(clock_uniform_bound(10, 0.0, 0.5).is_err());
        assert!(clock_uniform_bound(10, 1.5, 0.5).is_err());
        assert_eq!(clock_grid_size(0.05, 0.2).unwrap(), 801);
    }

    #[test]
    fn chernoff_values() {
        let b = poisson_chernoff(100.0, 300.0).unwrap();
        assert!(rel(b.ln_raw, -129.583_686_600_432_9) < 1e-13);
        let b = poisson_chernoff(10.0, 10.0).unwrap();
        assert!(b.ln_raw.abs() < 1e-14);
        assert_eq!(b.clamped, 1.0);
        for n in [1.0, 7.0, 50.0] {
            let b = poisson_chernoff(n, 3.0 * n).unwrap();
            assert!(rel(b.ln_raw, -n * 1.295_836_866_004_329_1) < 1e-13);
        }
        assert!(poisson_chernoff(0.0, 1.0).is_err());
        assert!(poisson_chernoff(1.0, -1.0).is_err());
    }

    #[test]
    fn shift_envelopes() {
        assert_eq!(
            phibar_shift_upper(1.0, 0.0).unwrap(),
            normal_sf(1.0).unwrap()
        );
        let u = phibar_shift_upper(2.0, 0.5).unwrap();
        assert!(rel(u, 0.003_078_895_550_877_14) < 1e-12);
        assert!(normal_sf(3.0).unwrap() <= u);
        let u = phibar_shift_upper(3.0, 1.0).unwrap();
        assert!(rel(u, 1.665_906_516_204_64e-7) < 1e-12);
        assert!(normal_sf(6.0).unwrap() <= u);

        let l = phibar_shift_lower(2.0, 1.0).unwrap();
        assert!(rel(l, 0.190_852_133_171_349_8) < 1e-13);
        assert!(normal_sf(1.5).unwrap() <= l);
        let l = phibar_shift_lower(3.0, 4.0).unwrap();
        assert!(rel(l, 4.025_339_217_111_268) < 1e-13);
        assert!(normal_sf(5.0 / 3.0).unwrap() <= l);
        let tiny = phibar_shift_lower(2.0, 1e-12).unwrap();
        assert!(rel(tiny, 2.0 * normal_sf(2.0).unwrap()) < 1e-9);

        assert!(phibar_shift_upper(0.5, 1.0).is_err());
        assert!(phibar_shift_lower(1.0, 4.0).is_err());
        assert!(phibar_shift_lower(1.0, 0.0).is_err());
    }
}
