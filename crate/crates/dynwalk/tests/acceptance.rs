//! Full-size acceptance run. Each criterion prints one `PASS` or `FAIL` line;
//! the process exits nonzero if any criterion fails.
//!
//! Sizes and tolerances are the acceptance settings, not test-speed settings,
//! so this target takes several minutes on one core.

use std::collections::BTreeMap;
use std::time::Instant;

use dynwalk::experiments::{
    limit_covariance, paley_zygmund_check, run_block_moment_check, run_clock_verification,
    run_erdos_suite, run_fdd_covariance, run_integral_test, run_ou_tail, run_quenched_tail,
    run_reflection_check, run_simulate_path, run_tail_sweep, BlockConfig, ClockConfig, ErdosConfig,
    Family, FddConfig, IntegralConfig, OuTailConfig, PzConfig, QuenchedTailConfig,
    ReflectionConfig, SimulateConfig, TailSweepConfig, ORACLE_TOLERANCE, RATIO_FLOOR,
};
use dynwalk::parallel::{default_workers, Runner};
use dynwalk::report::{csv_body, Envelope, Tabular};
use dynwalk_core::analytic::{erdos_sequence, sqrt_normal_integral, tail_f, Classification};
use dynwalk_core::clocks::{sample_clocks, uniform_deviation, DeviationMode};
use dynwalk_core::estimate::Verdict;
use dynwalk_core::rng::{derive_seed, Stream};
use dynwalk_core::walk::{conditional_moments_check, ConditionalFit};

/// `f(2.5) = 6.25·Φ̄(2.5)`, with `Φ̄(2.5) = 0.00620966532577613...`.
const TAIL_F_2_5: f64 = 0.038_810_408_286_100_8;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

type Check = Box<dyn FnOnce(&mut Shared) -> Outcome>;

/// Values handed from one criterion to a later one.
#[derive(Default)]
struct Shared {
    walk_tail_2_5: Option<f64>,
}

fn runner() -> Runner {
    Runner::new(default_workers()).expect("thread pool")
}

fn oracle_equivalence(_: &mut Shared) -> Outcome {
    let run = runner();
    let mut picker = Stream::new(1);
    let mut worst = 0.0f64;
    let mut checked = 0;
    for i in 0..200 {
        let cfg = SimulateConfig {
            n: 1 + picker.below(50) as usize,
            seed: derive_seed(1, i),
            ..SimulateConfig::default()
        };
        let out = run_simulate_path(&run, &cfg, None).expect("simulate-path");
        if out.report.oracle_checked {
            checked += 1;
            worst = worst.max(out.report.oracle_max_rel_diff);
        }
    }
    outcome(
        checked == 200 && worst <= ORACLE_TOLERANCE,
        format!("{checked}/200 instances checked, max relative difference {worst:e}"),
    )
}

fn tail_band_sweep(shared: &mut Shared) -> Outcome {
    let cfg = TailSweepConfig::default();
    let rep = run_tail_sweep(&runner(), &cfg).expect("tail sweep");
    let f_ok =
        (tail_f(2.5).unwrap() - TAIL_F_2_5).abs() < 1e-12 && (TAIL_F_2_5 - 0.03881).abs() < 5e-6;
    let mut pass = f_ok && cfg.n == 10_000 && cfg.paths == 100_000;
    let mut parts = Vec::new();
    for row in &rep.rows {
        let f = tail_f(row.z).unwrap();
        let (lo, hi) = (0.5 * f / 9.0, 2.0 * 2.0 * f);
        let e = &row.report.estimate;
        let ok = e.p_hat >= lo
            && e.p_hat <= hi
            && e.ci_width() < hi - lo
            && row.report.verdict == Verdict::Pass;
        pass &= ok;
        parts.push(format!(
            "z={} p={:.5} band=[{lo:.5}, {hi:.5}] ci_width={:.5}",
            row.z,
            e.p_hat,
            e.ci_width()
        ));
        if row.z == 2.5 {
            shared.walk_tail_2_5 = Some(e.p_hat);
        }
    }
    pass &= rep.rows.len() == 2;
    outcome(pass, parts.join("; "))
}

fn quenched_bands(_: &mut Shared) -> Outcome {
    let cfg = QuenchedTailConfig::default();
    let rep = run_quenched_tail(&runner(), &cfg).expect("quenched tail");
    let f = rep.tail_f;
    let (lo, hi) = (0.5 * f / 9.0, 2.0 * 2.0 * f);
    let estimates: Vec<f64> = rep.rows.iter().map(|r| r.upper.estimate.p_hat).collect();
    let pass = rep.rows.len() == 5 && estimates.iter().all(|&p| p >= lo && p <= hi);
    let shown: Vec<String> = estimates.iter().map(|p| format!("{p:.5}")).collect();
    outcome(
        pass,
        format!("estimates [{}] in [{lo:.5}, {hi:.5}]", shown.join(", ")),
    )
}

fn clock_concentration(_: &mut Shared) -> Outcome {
    let cfg = ClockConfig::default();
    let rep = run_clock_verification(&runner(), &cfg).expect("clock verification");
    let mut agree = 0;
    for r in 0..50 {
        let log = sample_clocks(400, 1.0, derive_seed(4, r)).unwrap();
        let exact = uniform_deviation(&log, cfg.delta, DeviationMode::exact()).unwrap();
        let grid = uniform_deviation(
            &log,
            cfg.delta,
            DeviationMode::grid_for(cfg.delta, cfg.alpha).unwrap(),
        )
        .unwrap();
        let upper = grid.upper_bound.unwrap();
        let bracketed = grid.value <= exact.value + 1e-12 && exact.value <= upper + 1e-12;
        let same_side =
            (grid.value >= cfg.alpha) == (exact.value >= cfg.alpha) || upper >= cfg.alpha;
        if bracketed && same_side {
            agree += 1;
        }
    }
    outcome(
        rep.upper_exceedances == 0 && rep.grid_exceedances == 0 && agree == 50,
        format!(
            "{} replicates, exceedances {} (max deviation bound {:.4}); exact/grid agreement {agree}/50",
            cfg.reps, rep.upper_exceedances, rep.max_upper_deviation
        ),
    )
}

fn limit_covariance_check(_: &mut Shared) -> Outcome {
    let cfg = FddConfig {
        reps: 10_000,
        ..FddConfig::default()
    };
    let rep = run_fdd_covariance(&runner(), &cfg).expect("fdd covariance");
    let all_within = rep
        .entries
        .iter()
        .all(|e| (e.empirical - e.target).abs() <= 4.0 * e.se);
    let spot = rep
        .entries
        .iter()
        .find(|e| (e.s, e.t, e.s2, e.t2) == (0.0, 1.0, 1.0, 1.0))
        .expect("spot entry");
    let spot_ok = (limit_covariance(0.0, 1.0, 1.0, 1.0) - (-1.0f64).exp()).abs() < 1e-15
        && ((-1.0f64).exp() - 0.3679).abs() < 5e-5
        && (spot.empirical - spot.target).abs() <= 4.0 * spot.se;
    outcome(
        all_within && spot_ok && rep.entries.len() == 45,
        format!(
            "{} entries, max |z| {:.2}; spot (0,1,1,1) {:.4} vs {:.4}",
            rep.entries.len(),
            rep.max_z_score,
            spot.empirical,
            spot.target
        ),
    )
}

fn regression_law(_: &mut Shared) -> Outcome {
    let log = sample_clocks(10_000, 1.0, 6).unwrap();
    let rep = conditional_moments_check(&log, 0.3, 0.7, 10_000, 6).expect("conditional moments");
    match rep.fit {
        ConditionalFit::Regression(r) => {
            let zs = (r.slope - rep.slope_target) / r.slope_se;
            let zv = (r.residual_variance - rep.residual_variance_target) / r.residual_variance_se;
            outcome(
                zs.abs() <= 4.0 && zv.abs() <= 4.0,
                format!(
                    "N={} slope {:.4} vs {:.4} (z {zs:.2}); residual variance {:.1} vs {:.1} (z {zv:.2})",
                    rep.n_changed, r.slope, rep.slope_target, r.residual_variance, rep.residual_variance_target
                ),
            )
        }
        ConditionalFit::ExactEquality { .. } => {
            outcome(false, "no coordinate changed in the window")
        }
    }
}

fn block_moment(_: &mut Shared) -> Outcome {
    let cfg = BlockConfig::default();
    let rep = run_block_moment_check(&runner(), &cfg).expect("block moment");
    let pass = rep.rows.len() == 4
        && rep
            .rows
            .iter()
            .all(|r| r.moment <= 10.0 * r.area_product + 4.0 * r.se);
    let shown: Vec<String> = rep
        .rows
        .iter()
        .map(|r| {
            format!(
                "{:.4} <= {:.4}",
                r.moment,
                10.0 * r.area_product + 4.0 * r.se
            )
        })
        .collect();
    outcome(pass, shown.join("; "))
}

fn ou_tail(shared: &mut Shared) -> Outcome {
    let cfg = OuTailConfig::default();
    let rep = run_ou_tail(&runner(), &cfg).expect("ou tail");
    let row = rep.rows.iter().find(|r| r.z == 2.5).expect("z = 2.5 row");
    let ratio_ok = (0.1..=10.0).contains(&row.ratio);
    let p = row.report.estimate.p_hat;
    let (cross_ok, cross) = match shared.walk_tail_2_5 {
        Some(w) => (
            (p - w).abs() <= 0.3 * w,
            format!("walk {w:.5}, relative gap {:.3}", (p - w).abs() / w),
        ),
        None => (false, "walk estimate unavailable".to_owned()),
    };
    outcome(
        ratio_ok && row.halving_stable && cross_ok,
        format!(
            "p={p:.5} ratio {:.3}; halving shift {:.5} vs radius {:.5}; {cross}",
            row.ratio,
            row.halving_shift,
            row.report.estimate.ci_radius()
        ),
    )
}

fn integral_thresholds(_: &mut Shared) -> Outcome {
    let corollary = run_integral_test(&IntegralConfig {
        family: Family::Corollary,
        params: vec![2.5, 3.5, 4.5, 5.5],
        ..IntegralConfig::default()
    })
    .expect("corollary family");
    let lil = run_integral_test(&IntegralConfig {
        family: Family::ScaledLil,
        params: vec![0.9, 1.2],
        ..IntegralConfig::default()
    })
    .expect("scaled LIL family");
    let by = |rows: &[dynwalk::experiments::IntegralRow], p: f64| {
        rows.iter().find(|r| r.param == p).cloned().unwrap()
    };
    let c = &corollary.rows;
    let l = &lil.rows;
    use Classification::{Divergent, Finite};
    let pass = by(c, 4.5).dynamical == Divergent
        && by(c, 5.5).dynamical == Finite
        && by(c, 2.5).static_test == Divergent
        && by(c, 3.5).static_test == Finite
        && by(l, 0.9).dynamical == Divergent
        && by(l, 1.2).dynamical == Finite
        && c.iter().chain(l).all(|r| r.agree && r.sum == r.dynamical);
    let shown: Vec<String> = c
        .iter()
        .map(|r| {
            format!(
                "a={} dyn {:?} static {:?} sum {:?}",
                r.param, r.dynamical, r.static_test, r.sum
            )
        })
        .chain(
            l.iter()
                .map(|r| format!("c={} dyn {:?} sum {:?}", r.param, r.dynamical, r.sum)),
        )
        .collect();
    outcome(pass, shown.join("; "))
}

fn localization_ratio(_: &mut Shared) -> Outcome {
    let seq = erdos_sequence(40).unwrap();
    let cfg = ErdosConfig::default();
    let lengths_ok = cfg.ratio_lengths == [seq.value(20).unwrap(), seq.value(30).unwrap()];
    let rep = run_erdos_suite(&runner(), &cfg).expect("erdos suite");
    let ratios: Vec<(u64, f64)> = rep
        .localization
        .iter()
        .filter_map(|r| r.ratio.as_ref().map(|b| (r.length, b.estimate.p_hat)))
        .collect();
    let pass = lengths_ok
        && ratios.len() == 2
        && ratios
            .iter()
            .all(|&(_, q)| (RATIO_FLOOR..=1.0).contains(&q));
    let shown: Vec<String> = ratios
        .iter()
        .map(|(e, q)| format!("e={e} ratio {q:.4}"))
        .collect();
    outcome(pass, format!("{} (M={})", shown.join("; "), cfg.paths))
}

fn stationarity_and_identities(_: &mut Shared) -> Outcome {
    let run = runner();
    let pz = paley_zygmund_check(
        &run,
        &PzConfig {
            paths: 50_000,
            ..PzConfig::default()
        },
    )
    .expect("pz check");
    let mean_ok = (pz.mean_j - pz.target_mean).abs() <= 4.0 * pz.mean_j_se;
    let q = sqrt_normal_integral();
    let integral_ok = (q.value - 0.5).abs() <= 1e-6;
    let refl = run_reflection_check(&run, &ReflectionConfig::default()).expect("reflection");
    let refl_ok = refl.rows.iter().all(|r| r.pass) && refl.config.n == 1000;
    outcome(
        mean_ok && integral_ok && refl_ok,
        format!(
            "E J {:.5} vs {:.5} (z {:.2}); integral {:.9}; reflection excess max {:.4}",
            pz.mean_j,
            pz.target_mean,
            pz.mean_z_score,
            q.value,
            refl.rows
                .iter()
                .map(|r| r.excess)
                .fold(f64::NEG_INFINITY, f64::max)
        ),
    )
}

/// CSV bodies of one experiment under each worker count.
fn bodies<R: Tabular>(name: &str, f: impl Fn(&Runner) -> R) -> Vec<String> {
    [1, 4, 8]
        .iter()
        .map(|&w| {
            let env = Envelope::new(name, 42, BTreeMap::new(), f(&Runner::new(w).unwrap()));
            csv_body(&env.to_csv())
        })
        .collect()
}

fn determinism(_: &mut Shared) -> Outcome {
    let mut all = Vec::new();
    all.push(bodies("tail-sweep", |r| {
        let cfg = TailSweepConfig {
            n: 2000,
            paths: 20_000,
            ..TailSweepConfig::default()
        };
        run_tail_sweep(r, &cfg).unwrap()
    }));
    all.push(bodies("quenched-tail", |r| {
        let cfg = QuenchedTailConfig {
            n: 1000,
            z: 2.0,
            clock_seeds: vec![1, 2],
            paths: 10_000,
            ..QuenchedTailConfig::default()
        };
        run_quenched_tail(r, &cfg).unwrap()
    }));
    all.push(bodies("fdd-cov", |r| {
        let cfg = FddConfig {
            n: 500,
            reps: 2000,
            ..FddConfig::default()
        };
        run_fdd_covariance(r, &cfg).unwrap()
    }));
    all.push(bodies("block-moment", |r| {
        let cfg = BlockConfig {
            reps: 2000,
            ..BlockConfig::default()
        };
        run_block_moment_check(r, &cfg).unwrap()
    }));
    all.push(bodies("ou-tail", |r| {
        let cfg = OuTailConfig {
            paths: 20_000,
            ..OuTailConfig::default()
        };
        run_ou_tail(r, &cfg).unwrap()
    }));
    all.push(bodies("clock-verify", |r| {
        let cfg = ClockConfig {
            n: 20_000,
            reps: 20,
            ..ClockConfig::default()
        };
        run_clock_verification(r, &cfg).unwrap()
    }));
    all.push(bodies("erdos-suite", |r| {
        let cfg = ErdosConfig {
            paths: 2000,
            q_terms: 10_000,
            ..ErdosConfig::default()
        };
        run_erdos_suite(r, &cfg).unwrap()
    }));
    all.push(bodies("pz-check", |r| {
        let cfg = PzConfig {
            n: 2000,
            paths: 5000,
            ..PzConfig::default()
        };
        paley_zygmund_check(r, &cfg).unwrap()
    }));
    all.push(bodies("reflection", |r| {
        let cfg = ReflectionConfig {
            paths: 5000,
            ..ReflectionConfig::default()
        };
        run_reflection_check(r, &cfg).unwrap()
    }));
    let identical = all.iter().filter(|b| b[0] == b[1] && b[0] == b[2]).count();
    outcome(
        identical == all.len(),
        format!(
            "{identical}/{} experiments byte-identical across 1, 4 and 8 workers",
            all.len()
        ),
    )
}

fn main() {
    let criteria: Vec<(&str, Check)> = vec![
        ("oracle equivalence", Box::new(oracle_equivalence)),
        ("tail band", Box::new(tail_band_sweep)),
        ("quenched bands", Box::new(quenched_bands)),
        ("clock concentration", Box::new(clock_concentration)),
        ("limit covariance", Box::new(limit_covariance_check)),
        ("regression law", Box::new(regression_law)),
        ("block moment", Box::new(block_moment)),
        ("OU tail", Box::new(ou_tail)),
        ("integral test thresholds", Box::new(integral_thresholds)),
        ("localization ratio", Box::new(localization_ratio)),
        (
            "stationarity and identities",
            Box::new(stationarity_and_identities),
        ),
        ("determinism", Box::new(determinism)),
    ];
    let mut shared = Shared::default();
    let mut failures = 0;
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let out = check(&mut shared);
        let secs = start.elapsed().as_secs_f64();
        let tag = if out.pass { "PASS" } else { "FAIL" };
        println!(
            "{tag} criterion {:>2} ({name}, {secs:.1} s): {}",
            i + 1,
            out.detail
        );
        if !out.pass {
            failures += 1;
        }
    }
    println!("acceptance: {} of 12 criteria passed", 12 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
