use dynwalk_core::analytic::{
    integral_test, log_normal_sf, normal_sf, phibar, phibar_shift_lower, phibar_shift_upper,
    sqrt_normal_integral, static_erdos_test, sum_test, tail_band, tail_f, Classification,
    ErdosSequence, GrowthEnvelope, IntegralBudget, TailBand,
};
use proptest::prelude::*;

proptest! {
    #[test]
    fn tail_is_symmetric(x in -40.0f64..40.0) {
        let s = normal_sf(x).unwrap() + normal_sf(-x).unwrap();
        prop_assert!((s - 1.0).abs() < 1e-12, "x={x}: {s}");
    }

    #[test]
    fn shifted_tail_upper(z in 1.0f64..8.0, eps in 1e-6f64..4.0) {
        let lhs = phibar(z + eps * z);
        let rhs = phibar_shift_upper(z, eps).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12), "z={z} eps={eps}: {lhs} > {rhs}");
    }

    #[test]
    fn shifted_tail_lower(gamma in 1e-6f64..9.0, extra in 0.0f64..6.0) {
        let z = gamma.sqrt() + extra;
        let lhs = phibar(z - gamma / z);
        let rhs = phibar_shift_lower(z, gamma).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12), "z={z} gamma={gamma}: {lhs} > {rhs}");
    }

    #[test]
    fn clamped_envelopes_stay_in_range(c in 0.05f64..4.0, ln_t in 0.0f64..1e6) {
        let h = GrowthEnvelope::scaled_lil(c).unwrap().clamp();
        let w = ln_t.max(std::f64::consts::E).ln();
        let v = h.eval_ln(ln_t).unwrap();
        prop_assert!(v >= w.sqrt() * (1.0 - 1e-12) && v <= 2.0 * w.sqrt() * (1.0 + 1e-12));
    }

    #[test]
    fn band_is_ordered_and_capped(z in 0.5f64..6.0, lo in 0.1f64..1.0, hi in 1.0f64..5.0) {
        let band = TailBand::default().with_slack(lo, hi).unwrap();
        let b = tail_band(z, &band).unwrap();
        let f = tail_f(z).unwrap();
        prop_assert!(b.low <= b.high && b.high <= 1.0);
        prop_assert!((b.low - lo * f / 9.0).abs() <= 1e-15 + 1e-12 * b.low);
        prop_assert!((b.raw_high - 2.0 * hi * f).abs() <= 1e-12 * b.raw_high);
    }
}

#[test]
fn gaussian_tail_below_the_chernoff_envelope() {
    // Log-spaced from 1e-3 to 40.
    let steps = 2000;
    for k in 0..=steps {
        let y = 1e-3 * (40.0f64 / 1e-3).powf(k as f64 / steps as f64);
        // Compared in log space: both sides underflow near the top of the grid.
        let ln_sf = log_normal_sf(y).unwrap();
        assert!(ln_sf <= -0.5 * y * y, "y={y}");
        assert!(
            normal_sf(y).unwrap() <= (-0.5 * y * y).exp().max(f64::MIN_POSITIVE),
            "y={y}"
        );
    }
}

#[test]
fn exponential_sandwich_on_unit_interval() {
    let steps = 100_000;
    for k in 0..=steps {
        let x = k as f64 / steps as f64;
        let g = -(-x).exp_m1();
        assert!(0.5 * x <= g && g <= x, "x={x}");
    }
}

#[test]
fn square_root_integral_is_one_half() {
    let q = sqrt_normal_integral();
    assert!(q.converged);
    assert!((q.value - 0.5).abs() < 1e-6, "{}", q.value);
}

#[test]
fn erdos_sequence_increases_with_unit_gap_ratio() {
    let exact = ErdosSequence::new(150).unwrap();
    for w in exact.values()[1..].windows(2) {
        assert!(w[0] < w[1], "{w:?}");
    }
    let seq = ErdosSequence::with_exponents(5001).unwrap();
    for n in 2..5000 {
        assert!(
            seq.ln_value(n + 1).unwrap() > seq.ln_value(n).unwrap(),
            "n={n}"
        );
    }
    for n in (1000..5000).step_by(7) {
        let r = seq.gap_ratio(n).unwrap();
        assert!((0.8..=1.2).contains(&r), "n={n}: {r}");
    }
}

#[test]
fn classifiers_agree_across_families() {
    let budget = IntegralBudget::default();
    let seq = ErdosSequence::with_exponents(10_000).unwrap();
    let mut envelopes = Vec::new();
    for a in [-1.0, 2.0, 4.0, 4.5, 4.9, 5.1, 5.5, 7.0, 12.0] {
        envelopes.push(GrowthEnvelope::corollary(a).unwrap());
        envelopes.push(GrowthEnvelope::corollary(a).unwrap().clamp());
    }
    for c in [0.5, 0.9, 0.99, 1.01, 1.2, 1.8] {
        envelopes.push(GrowthEnvelope::scaled_lil(c).unwrap());
        envelopes.push(GrowthEnvelope::scaled_lil(c).unwrap().clamp());
    }
    for h in &envelopes {
        let dynamical = integral_test(h, &budget).classification;
        let sum = sum_test(h, &seq, 10_000).unwrap().classification;
        assert_ne!(dynamical, Classification::Inconclusive, "{h:?}");
        assert_eq!(dynamical, sum, "{h:?}");
        // The fixed-time integral is dominated by the all-times one, so it
        // can only be finite where the latter is.
        let fixed = static_erdos_test(h, &budget).classification;
        if dynamical == Classification::Finite {
            assert_eq!(fixed, Classification::Finite, "{h:?}");
        }
    }
}

#[test]
fn corollary_thresholds() {
    let budget = IntegralBudget::default();
    let class =
        |a: f64| integral_test(&GrowthEnvelope::corollary(a).unwrap(), &budget).classification;
    let fixed =
        |a: f64| static_erdos_test(&GrowthEnvelope::corollary(a).unwrap(), &budget).classification;
    assert_eq!(class(4.5), Classification::Divergent);
    assert_eq!(class(5.0), Classification::Divergent);
    assert_eq!(class(5.5), Classification::Finite);
    assert_eq!(fixed(2.5), Classification::Divergent);
    assert_eq!(fixed(3.0), Classification::Divergent);
    assert_eq!(fixed(3.5), Classification::Finite);
}
