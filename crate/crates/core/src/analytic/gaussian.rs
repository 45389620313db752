//! Standard normal tail, density, quantile and the tail weight `f(z) = z²Φ̄(z)`.

use core::f64::consts::FRAC_1_SQRT_2;

use crate::error::{domain, Result};
use crate::math;

/// `ln(2π)/2`.
const HALF_LN_TAU: f64 = 0.918_938_533_204_672_741_780_329_736_406;
const INV_SQRT_TAU: f64 = 0.398_942_280_401_432_677_939_946_059_934;

/// Beyond this point the tail is evaluated from its asymptotic expansion in
/// log space; `erfc` is still accurate here but underflows soon after.
pub const LOG_SPACE_CUTOFF: f64 = 38.0;

/// Standard normal density.
#[inline]
pub fn normal_pdf(x: f64) -> f64 {
    INV_SQRT_TAU * math::exp(-0.5 * x * x)
}

/// `ln(1 + Σ (-1)^k (2k-1)!! / x^{2k})`, the correction to the Mills
/// asymptotic. Only used for `x > 38`, where six terms reach full precision.
fn ln_mills_correction(x: f64) -> f64 {
    let r = 1.0 / (x * x);
    let series = r * (-1.0 + r * (3.0 + r * (-15.0 + r * (105.0 + r * (-945.0 + r * 10395.0)))));
    math::ln1p(series)
}

/// `Φ̄(x)` without input validation. NaN propagates.
///
/// Accurate to a few ulps in relative terms wherever the result is a normal
/// float. Past the subnormal range the result is floored at the smallest
/// positive subnormal so the tail never reads as an exact zero; use
/// [`log_normal_sf`] when the magnitude matters out there.
#[inline]
pub fn phibar(x: f64) -> f64 {
    if x > LOG_SPACE_CUTOFF {
        math::exp(log_tail_asymptotic(x)).max(f64::from_bits(1))
    } else {
        0.5 * math::erfc(x * FRAC_1_SQRT_2)
    }
}

fn log_tail_asymptotic(x: f64) -> f64 {
    -0.5 * x * x - math::ln(x) - HALF_LN_TAU + ln_mills_correction(x)
}

/// Upper tail `Φ̄(x) = P{N(0,1) > x}`.
pub fn normal_sf(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(domain!("normal_sf needs a finite argument, got {x}"));
    }
    Ok(phibar(x))
}

/// `ln Φ̄(x)`, accurate far beyond the underflow point of `Φ̄` itself.
pub fn log_normal_sf(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(domain!("log_normal_sf needs a finite argument, got {x}"));
    }
    Ok(ln_phibar(x))
}

#[inline]
pub(crate) fn ln_phibar(x: f64) -> f64 {
    // Φ̄ turns subnormal near 37.5; the asymptotic series is already at full
    // precision from 30 on.
    if x > 30.0 {
        log_tail_asymptotic(x)
    } else if x < 0.0 {
        math::ln1p(-phibar(-x))
    } else {
        math::ln(phibar(x))
    }
}

/// `ln Φ̄(x) + x²/2` for `x ≥ 0`, without the cancellation of forming the
/// two terms separately at large `x`.
#[inline]
pub(crate) fn ln_mills(x: f64) -> f64 {
    if x > 30.0 {
        -math::ln(x) - HALF_LN_TAU + ln_mills_correction(x)
    } else {
        math::ln(phibar(x)) + 0.5 * x * x
    }
}

/// Leading Mills asymptotic `e^{-z²/2} / (z√(2π))`, an upper bound on `Φ̄(z)`.
pub fn mills_asymptotic(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(domain!("mills_asymptotic needs z > 0, got {z}"));
    }
    Ok(normal_pdf(z) / z)
}

/// Tail weight `f(z) = z²Φ̄(z)` for `z > 0`.
pub fn tail_f(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(domain!("tail_f needs z > 0, got {z}"));
    }
    Ok(z * z * phibar(z))
}

/// `z²Φ̄(z)` on the whole real line. For negative `z` the factor `Φ̄(z)`
/// exceeds one half and the value is no longer a small probability.
#[inline]
pub fn tail_f_signed(z: f64) -> f64 {
    z * z * phibar(z)
}

/// Inverse of the standard normal distribution function, `Φ^{-1}(p)`.
///
/// Wichura's AS 241 (PPND16) rational approximations, relative accuracy
/// about 1e-16. Returns `-inf`/`+inf` at 0/1 and NaN outside `[0, 1]`.
#[allow(clippy::excessive_precision)]
pub fn normal_quantile(p: f64) -> f64 {
    if !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    let q = p - 0.5;
    if math::abs(q) <= 0.425 {
        let r = 0.180625 - q * q;
        let num = ((((((2.509_080_928_730_122_672_7e3 * r + 3.343_057_558_358_812_810_5e4) * r
            + 6.726_577_092_700_870_085_3e4)
            * r
            + 4.592_195_393_154_987_145_7e4)
            * r
            + 1.373_169_376_550_946_112_5e4)
            * r
            + 1.971_590_950_306_551_442_7e3)
            * r
            + 1.331_416_678_917_843_774_5e2)
            * r
            + 3.387_132_872_796_366_608_0;
        let den = ((((((5.226_495_278_852_854_561_0e3 * r + 2.872_908_573_572_194_267_4e4) * r
            + 3.930_789_580_009_271_061_0e4)
            * r
            + 2.121_379_430_158_659_586_7e4)
            * r
            + 5.394_196_021_424_751_107_7e3)
            * r
            + 6.871_870_074_920_579_083_0e2)
            * r
            + 4.231_333_070_160_091_125_2e1)
            * r
            + 1.0;
        return q * num / den;
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let mut r = math::sqrt(-math::ln(tail));
    let x = if r <= 5.0 {
        r -= 1.6;
        let num = ((((((7.745_450_142_783_414_076_4e-4 * r + 2.272_384_498_926_918_458_33e-2)
            * r
            + 2.417_807_251_774_506_117_7e-1)
            * r
            + 1.270_458_252_452_368_382_58)
            * r
            + 3.647_848_324_763_204_605_04)
            * r
            + 5.769_497_221_460_691_405_5)
            * r
            + 4.630_337_846_156_545_295_9)
            * r
            + 1.423_437_110_749_683_577_34;
        let den = ((((((1.050_750_071_644_416_843_24e-9 * r + 5.475_938_084_995_344_946e-4)
            * r
            + 1.519_866_656_361_645_719_66e-2)
            * r
            + 1.481_039_764_274_800_745_9e-1)
            * r
            + 6.897_673_349_851_000_045_5e-1)
            * r
            + 1.676_384_830_183_803_849_4)
            * r
            + 2.053_191_626_637_758_821_87)
            * r
            + 1.0;
        num / den
    } else {
        r -= 5.0;
        let num = ((((((2.010_334_399_292_288_132_65e-7 * r + 2.711_555_568_743_487_578_15e-5)
            * r
            + 1.242_660_947_388_078_438_6e-3)
            * r
            + 2.653_218_952_657_612_309_3e-2)
            * r
            + 2.965_605_718_285_048_912_3e-1)
            * r
            + 1.784_826_539_917_291_335_8)
            * r
            + 5.463_784_911_164_114_369_9)
            * r
            + 6.657_904_643_501_103_777_2;
        let den = ((((((2.044_263_103_389_939_785_64e-15 * r + 1.421_511_758_316_445_888_7e-7)
            * r
            + 1.846_318_317_510_054_681_8e-5)
            * r
            + 7.868_691_311_456_132_591e-4)
            * r
            + 1.487_536_129_085_061_485_25e-2)
            * r
            + 1.369_298_809_227_358_053_1e-1)
            * r
            + 5.998_322_065_558_879_376_9e-1)
            * r
            + 1.0;
        num / den
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::quadrature::{integrate, QuadConfig};

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    /// Continued fraction for the Mills ratio `Φ̄(z)/φ(z)`, evaluated bottom-up.
    fn mills_ratio_cf(z: f64) -> f64 {
        let mut acc = z;
        for k in (1..400).rev() {
            acc = z + k as f64 / acc;
        }
        1.0 / acc
    }

    /// Independent oracle: quadrature of the density over `[x, x + 40]`.
    fn sf_by_quadrature(x: f64) -> f64 {
        let cfg = QuadConfig {
            abs_tol: 0.0,
            rel_tol: 1e-14,
            max_intervals: 4000,
        };
        integrate(normal_pdf, x, x + 40.0, cfg).value
    }

    #[test]
    fn frozen_reference_values() {
        let cases = [
            (1.0, 0.158_655_253_931_457_05),
            (1.5, 0.066_807_201_268_858_07),
            (2.0, 0.022_750_131_948_179_21),
            (2.5, 0.006_209_665_325_776_135),
            (3.0, 0.001_349_898_031_630_094_6),
            (5.0, 2.866_515_718_791_939e-7),
            (6.0, 9.865_876_450_376_98e-10),
            (8.0, 6.220_960_574_271_784e-16),
            (10.0, 7.619_853_024_160_525e-24),
            (20.0, 2.753_624_118_606_233_7e-89),
            (37.0, 5.725_571_222_524_577e-300),
            (-3.0, 0.998_650_101_968_369_9),
        ];
        for (x, want) in cases {
            let got = normal_sf(x).unwrap();
            assert!(rel(got, want) < 1e-13, "x={x}: {got} vs {want}");
        }
        assert_eq!(normal_sf(0.0).unwrap(), 0.5);
    }

    #[test]
    fn quadrature_oracle_agrees() {
        for i in 0..=32 {
            let x = -8.0 + 0.5 * i as f64;
            let got = phibar(x);
            let want = sf_by_quadrature(x);
            assert!(rel(got, want) < 1e-12, "x={x}: {got} vs {want}");
        }
        assert!(rel(phibar(3.0), 1.349_898e-3) < 1e-6);
    }

    #[test]
    fn continued_fraction_oracle_agrees_in_the_tail() {
        for i in 0..=60 {
            let x = 3.0 + 0.5 * i as f64;
            let want_ln = mills_ratio_cf(x).ln() - 0.5 * x * x - HALF_LN_TAU;
            let got_ln = log_normal_sf(x).unwrap();
            assert!((got_ln - want_ln).abs() < 1e-12 * want_ln.abs(), "x={x}");
        }
    }

    #[test]
    fn log_space_past_underflow() {
        let want_38 = -726.557_216_018_820_1;
        let want_40 = -804.608_442_013_753_8;
        assert!(rel(log_normal_sf(38.0).unwrap(), want_38) < 1e-14);
        assert!(rel(log_normal_sf(40.0).unwrap(), want_40) < 1e-14);
        assert!(rel(phibar(38.0), 2.885_428_35e-316) < 1e-6);
        assert!(phibar(50.0) > 0.0);
        assert!(phibar(1e6) > 0.0);
        assert!(log_normal_sf(1e6).unwrap().is_finite());
        assert!(rel(log_normal_sf(8.0).unwrap(), -35.013_437_159_914_55) < 1e-14);
    }

    #[test]
    fn rejects_non_finite_arguments() {
        assert!(normal_sf(f64::NAN).is_err());
        assert!(normal_sf(f64::INFINITY).is_err());
        assert!(log_normal_sf(f64::NEG_INFINITY).is_err());
        assert!(mills_asymptotic(0.0).is_err());
        assert!(mills_asymptotic(-1.0).is_err());
        assert!(tail_f(0.0).is_err());
    }

    #[test]
    fn mills_asymptotic_values() {
        assert!(rel(mills_asymptotic(1.0).unwrap(), 0.241_970_724_519_143_35) < 1e-14);
        let ratio = normal_sf(8.0).unwrap() / mills_asymptotic(8.0).unwrap();
        assert!(rel(ratio, 0.985_055_706_063_458_4) < 1e-12);
        assert!((0.98..=1.0).contains(&ratio));
        assert!(rel(ratio, mills_ratio_cf(8.0) * 8.0) < 1e-13);
        let mut prev = 0.0;
        for i in 1..=60 {
            let z = 0.5 * i as f64;
            let r = normal_sf(z).unwrap() / mills_asymptotic(z).unwrap();
            assert!(r < 1.0 && r > prev, "z={z}");
            prev = r;
        }
    }

    #[test]
    fn tail_weight_values() {
        assert!(rel(tail_f(1.0).unwrap(), 0.158_655_253_931_457_05) < 1e-13);
        assert!(rel(tail_f(2.5).unwrap(), 0.038_810_408_286_100_84) < 1e-13);
        assert!(rel(tail_f(2.0).unwrap(), 0.091_000_527_792_716_83) < 1e-13);
        assert!(tail_f(1e-6).unwrap() < 1e-12);
        assert!(tail_f_signed(-1.0) > 0.5 * 1.0);
    }

    #[test]
    fn quantile_inverts_the_tail() {
        let mut p = 1e-300;
        while p < 0.5 {
            let x = normal_quantile(p);
            let back = phibar(-x);
            // The round trip amplifies a relative error in x by x², so allow a few ulps.
            assert!(rel(back, p) < 1e-13 + 1e-15 * x * x, "p={p}: {back}");
            p *= 3.7;
        }
        for i in 1..1000 {
            let p = i as f64 / 1000.0;
            let x = normal_quantile(p);
            let back = if x < 0.0 { phibar(-x) } else { 1.0 - phibar(x) };
            assert!((back - p).abs() < 4e-16 + 1e-14 * p, "p={p}");
        }
        assert_eq!(normal_quantile(0.5), 0.0);
        assert!(normal_quantile(0.0).is_infinite());
        assert!(normal_quantile(1.5).is_nan());
        assert!(rel(normal_quantile(0.975), 1.959_963_984_540_054) < 1e-15);
    }
}
