//! Monte Carlo and analytic verification runs, one per checked statement.
//!
//! Every run takes a [`Runner`](crate::parallel::Runner) and a validated
//! configuration and returns a serializable report. Path `i` of a run is
//! seeded from `(master seed, i)` alone, so reports do not depend on the
//! worker count.

mod block;
mod clock;
mod erdos;
mod fdd;
mod integral;
mod ou;
mod path;
mod pz;
mod quenched;
mod reflection;
mod tail;

pub use block::{
    default_block_pairs, format_block_pairs, parse_block_pairs, run_block_moment_check,
    BlockConfig, BlockReport, BlockRow,
};
pub use clock::{run_clock_verification, ClockConfig, ClockReport};
pub use erdos::{run_erdos_suite, ErdosConfig, ErdosReport, LocalizationRow, RATIO_FLOOR};
pub use fdd::{limit_covariance, run_fdd_covariance, CovEntry, FddConfig, FddReport};
pub use integral::{
    classify, run_integral_test, Family, IntegralConfig, IntegralReport, IntegralRow,
};
pub use ou::{run_ou_tail, OuRow, OuTailConfig, OuTailReport};
pub use path::{
    max_rel_diff, run_simulate_path, SimulateConfig, SimulateOutput, SimulateReport,
    ORACLE_TOLERANCE,
};
pub use pz::{paley_zygmund_check, PzConfig, PzReport, SECOND_MOMENT_CONSTANT};
pub use quenched::{run_quenched_tail, QuenchedRow, QuenchedTailConfig, QuenchedTailReport};
pub use reflection::{run_reflection_check, ReflectionConfig, ReflectionReport, ReflectionRow};
pub use tail::{annealed_sups, run_tail_sweep, TailRow, TailSweepConfig, TailSweepReport};

use std::time::Instant;

use dynwalk_core::analytic::tail_f;
use dynwalk_core::estimate::{enough_expected_hits, Estimate};

use crate::{Error, Result};

/// Runs with fewer expected hits than this are refused unless overridden.
pub const MIN_EXPECTED_HITS: f64 = 20.0;

/// Largest `z` treated as inside the moderate-deviation regime at length `n`:
/// `0.5·√(n / ln n)`.
pub fn regime_limit(n: usize) -> f64 {
    let nf = n as f64;
    0.5 * (nf / nf.ln().max(1.0)).sqrt()
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Refuses `z` whose expected hit count `f(z)·paths` is below the floor.
pub(crate) fn check_expected_hits(z: f64, paths: u64, allow_rare: bool) -> Result<()> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(invalid(format!(
            "levels must be positive and finite, got {z}"
        )));
    }
    let f = tail_f(z)?;
    if !allow_rare && !enough_expected_hits(f, paths, MIN_EXPECTED_HITS) {
        return Err(invalid(format!(
            "z = {z} with {paths} paths expects about {:.2} hits (< {MIN_EXPECTED_HITS}); \
             raise the path count or pass the rare-event override",
            f * paths as f64
        )));
    }
    Ok(())
}

/// Estimate from counts, stamped with the elapsed time since `start`.
pub(crate) fn estimate(hits: u64, n: u64, seed: u64, key: String, start: Instant) -> Estimate {
    let mut e = Estimate::from_counts(hits, n, seed, key);
    e.wall_time = start.elapsed().as_secs_f64();
    e
}

/// Mean and standard error of the mean.
pub(crate) fn mean_se(xs: &[f64]) -> (f64, f64) {
    let w: dynwalk_core::stats::Welford = xs.iter().copied().collect();
    (w.mean(), w.std_error())
}

/// Row for a moment check: interval `estimate ± Z_99·se`, verdict given.
#[allow(clippy::too_many_arguments)]
pub(crate) fn moment_row(
    experiment: &str,
    parameter: String,
    value: f64,
    estimate: f64,
    se: f64,
    band: (f64, f64),
    verdict: dynwalk_core::estimate::Verdict,
    samples: u64,
    seed: u64,
) -> crate::report::CsvRow {
    let r = dynwalk_core::estimate::Z_99 * se;
    crate::report::CsvRow {
        experiment: experiment.to_owned(),
        parameter,
        value,
        estimate,
        ci_low: estimate - r,
        ci_high: estimate + r,
        band_low: band.0,
        band_high: band.1,
        verdict,
        samples,
        seed,
    }
}

/// `|x - target| / se`, with a zero standard error counting as exact.
pub(crate) fn z_score(x: f64, target: f64, se: f64) -> f64 {
    let d = (x - target).abs();
    if se > 0.0 {
        d / se
    } else if d == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

pub(crate) fn pass_if(ok: bool) -> dynwalk_core::estimate::Verdict {
    if ok {
        dynwalk_core::estimate::Verdict::Pass
    } else {
        dynwalk_core::estimate::Verdict::Fail
    }
}
