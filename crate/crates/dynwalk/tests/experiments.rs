use dynwalk::experiments::{
    run_integral_test, run_quenched_tail, run_tail_sweep, Family, IntegralConfig,
    QuenchedTailConfig, TailSweepConfig,
};
use dynwalk::parallel::Runner;
use dynwalk::report::Tabular;
use dynwalk_core::analytic::Classification;
use dynwalk_core::estimate::Verdict;

fn runner() -> Runner {
    Runner::new(4).unwrap()
}

#[test]
fn tail_estimates_decrease_in_the_level() {
    let cfg = TailSweepConfig {
        n: 1000,
        z: vec![1.0, 1.5, 2.0, 2.5],
        paths: 20_000,
        ..TailSweepConfig::default()
    };
    let rep = run_tail_sweep(&runner(), &cfg).unwrap();
    assert!(rep.monotone);
    let p: Vec<f64> = rep.rows.iter().map(|r| r.report.estimate.p_hat).collect();
    assert!(p.windows(2).all(|w| w[0] >= w[1]), "{p:?}");
}

#[test]
fn quenched_mean_matches_the_annealed_estimate() {
    let (n, z, m) = (1000, 2.0, 10_000);
    let quenched = run_quenched_tail(
        &runner(),
        &QuenchedTailConfig {
            n,
            z,
            clock_seeds: (1..=10).collect(),
            paths: m,
            ..QuenchedTailConfig::default()
        },
    )
    .unwrap();
    let annealed = run_tail_sweep(
        &runner(),
        &TailSweepConfig {
            n,
            z: vec![z],
            paths: m,
            ..TailSweepConfig::default()
        },
    )
    .unwrap();
    let a = &annealed.rows[0].report.estimate;
    let qs: Vec<f64> = quenched
        .rows
        .iter()
        .map(|r| r.upper.estimate.p_hat)
        .collect();
    let k = qs.len() as f64;
    let mean = qs.iter().sum::<f64>() / k;
    assert!((mean - quenched.mean_estimate).abs() < 1e-15);
    // Spread across clock seeds carries both the clock and the deviate noise.
    let var = qs.iter().map(|q| (q - mean).powi(2)).sum::<f64>() / (k - 1.0);
    let pooled = (var / k + a.std_error().powi(2)).sqrt();
    assert!(
        (mean - a.p_hat).abs() <= 4.0 * pooled,
        "{mean} vs {} (se {pooled})",
        a.p_hat
    );
}

#[test]
fn integral_report_rows_follow_the_classification() {
    let rep = run_integral_test(&IntegralConfig {
        family: Family::ScaledLil,
        params: vec![0.9, 1.2],
        ..IntegralConfig::default()
    })
    .unwrap();
    assert_eq!(rep.rows[0].dynamical, Classification::Divergent);
    assert_eq!(rep.rows[1].dynamical, Classification::Finite);
    assert!(rep.rows.iter().all(|r| r.agree));
    assert!(rep.verdicts().iter().all(|&v| v == Verdict::Pass));
}

#[test]
fn invalid_configs_are_rejected_before_running() {
    let bad = TailSweepConfig {
        slack_low: 1.5,
        ..TailSweepConfig::default()
    };
    assert!(run_tail_sweep(&runner(), &bad).is_err());
    let empty = QuenchedTailConfig {
        clock_seeds: vec![],
        ..QuenchedTailConfig::default()
    };
    assert!(run_quenched_tail(&runner(), &empty).is_err());
}
