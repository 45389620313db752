//! Command-line front end.
//!
//! Every subcommand resolves its parameters (flag > `--config` file >
//! default), validates them before any work starts, runs one experiment and
//! writes `<out-dir>/<command>.json` and `.csv`. Exit status: 0 when every
//! verdict passes, 1 on any failure, 2 on usage, validation or IO errors, 3
//! when `--strict` is set and some verdict is underpowered.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::{default_out_dir, ConfigFile, FloatList, Resolver, SeedList};
use crate::experiments::{self as ex, Family};
use crate::io::{atomic_write, clock_log_to_csv, path_to_csv, read_clock_log};
use crate::parallel::{default_workers, Runner};
use crate::report::{emit_report, exit_code, Envelope, ReportPaths, Tabular};
use crate::{Error, Result};

/// Exit status for usage, validation and IO errors.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "dynwalk",
    version,
    about = "Monte Carlo and analytic checks for dynamical Gaussian random walks"
)]
pub struct Cli {
    /// Flat key=value file supplying defaults for the subcommand's flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Directory for the JSON and CSV reports [default: $DYNWALK_OUT_DIR or .].
    #[arg(long, global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// Worker threads [default: available cores]. Results do not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Exit with status 3 when any verdict is underpowered.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Master seed [default: 42].
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Annealed tail of sup_t S_n(t) against the z²Φ̄(z) band.
    TailSweep(TailArgs),
    /// Quenched tail on fixed clock logs against the upper and lower bands.
    QuenchedTail(QuenchedArgs),
    /// Uniform concentration of changed-coordinate counts.
    ClockVerify(ClockArgs),
    /// Covariance of the rescaled field against e^{-|s-s'|} min(t,t').
    FddCov(FddArgs),
    /// Fourth moments of block increments over neighboring pairs.
    BlockMoment(BlockArgs),
    /// Tail of the OU grid maximum against the [f/K, K f] band.
    OuTail(OuArgs),
    /// Integral-test classifications for an envelope family.
    IntegralTest(IntegralArgs),
    /// Classifications, localization ratios and Q table along the Erdős sequence.
    ErdosSuite(ErdosArgs),
    /// One path with its clock log, checked against the brute-force oracle.
    SimulatePath(SimulateArgs),
    /// Occupation-time moments and the Paley–Zygmund bound on a fixed log.
    PzCheck(PzArgs),
    /// Running maximum over lengths against twice the walk's tail.
    Reflection(ReflectionArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::TailSweep(_) => "tail-sweep",
            Command::QuenchedTail(_) => "quenched-tail",
            Command::ClockVerify(_) => "clock-verify",
            Command::FddCov(_) => "fdd-cov",
            Command::BlockMoment(_) => "block-moment",
            Command::OuTail(_) => "ou-tail",
            Command::IntegralTest(_) => "integral-test",
            Command::ErdosSuite(_) => "erdos-suite",
            Command::SimulatePath(_) => "simulate-path",
            Command::PzCheck(_) => "pz-check",
            Command::Reflection(_) => "reflection",
        }
    }
}

#[derive(Debug, Args)]
pub struct TailArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated levels.
    #[arg(long)]
    pub z: Option<FloatList>,
    #[arg(long)]
    pub paths: Option<u64>,
    #[arg(long)]
    pub slack_low: Option<f64>,
    #[arg(long)]
    pub slack_high: Option<f64>,
    /// Run levels with fewer than 20 expected hits.
    #[arg(long)]
    pub allow_rare: bool,
}

#[derive(Debug, Args)]
pub struct QuenchedArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub z: Option<f64>,
    /// Comma-separated clock seeds, one quenched estimate each.
    #[arg(long)]
    pub clock_seeds: Option<SeedList>,
    #[arg(long)]
    pub paths: Option<u64>,
    /// Upper band (2 + eps) f(z).
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub slack_low: Option<f64>,
    #[arg(long)]
    pub allow_rare: bool,
}

#[derive(Debug, Args)]
pub struct ClockArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub reps: Option<u64>,
}

#[derive(Debug, Args)]
pub struct FddArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated clock times in [0, 1].
    #[arg(long)]
    pub s_grid: Option<FloatList>,
    /// Comma-separated length fractions in (0, 1].
    #[arg(long)]
    pub t_grid: Option<FloatList>,
    #[arg(long)]
    pub reps: Option<u64>,
}

#[derive(Debug, Args)]
pub struct BlockArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Pairs `l0:l1:u0:u1/l0:l1:u0:u1` separated by `;` (length side, then
    /// time side).
    #[arg(long)]
    pub blocks: Option<String>,
    #[arg(long)]
    pub reps: Option<u64>,
}

#[derive(Debug, Args)]
pub struct OuArgs {
    #[arg(long)]
    pub z: Option<FloatList>,
    /// Grid step.
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub paths: Option<u64>,
    /// Band constant K.
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub allow_rare: bool,
}

#[derive(Debug, Args)]
pub struct IntegralArgs {
    /// `scaled-lil` (parameter c) or `corollary` (parameter a).
    #[arg(long)]
    pub family: Option<Family>,
    /// Comma-separated parameters.
    #[arg(long, visible_alias = "a", alias = "c")]
    pub params: Option<FloatList>,
    /// Clamp the envelope to [√(log log t), 2√(log log t)].
    #[arg(long)]
    pub clamp: bool,
    #[arg(long)]
    pub sum_terms: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ErdosArgs {
    #[arg(long)]
    pub family: Option<Family>,
    #[arg(long, visible_alias = "a", alias = "c")]
    pub params: Option<FloatList>,
    #[arg(long)]
    pub sum_terms: Option<usize>,
    /// Envelope family for the Monte Carlo localization.
    #[arg(long)]
    pub mc_family: Option<Family>,
    #[arg(long)]
    pub mc_param: Option<f64>,
    #[arg(long)]
    pub max_length: Option<u64>,
    /// Comma-separated Erdős terms whose localization ratio is checked.
    #[arg(long)]
    pub ratio_lengths: Option<SeedList>,
    #[arg(long)]
    pub paths: Option<u64>,
    #[arg(long)]
    pub q_indices: Option<SeedList>,
    #[arg(long)]
    pub q_terms: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Occupation level in units of √n.
    #[arg(long)]
    pub level: Option<f64>,
    /// Run on this clock log (CSV as written by this command) instead of
    /// sampling one.
    #[arg(long, value_name = "FILE")]
    pub clock_log: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PzArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub z: Option<f64>,
    #[arg(long)]
    pub paths: Option<u64>,
    #[arg(long)]
    pub clock_seed: Option<u64>,
    /// Good-event tolerance on the clock log.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub allow_rare: bool,
}

#[derive(Debug, Args)]
pub struct ReflectionArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated levels in units of √n.
    #[arg(long)]
    pub lambdas: Option<FloatList>,
    #[arg(long)]
    pub paths: Option<u64>,
}

/// Keys handled outside the per-command resolver and never echoed.
const UNECHOED_KEYS: [&str; 2] = ["workers", "out-dir"];

/// Parses `argv` (including the program name), runs the command and returns
/// the exit status. Diagnostics go to stderr.
pub fn parse_and_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

/// Settings shared by every command after resolution.
struct Context {
    runner: Runner,
    out_dir: PathBuf,
    strict: bool,
    name: &'static str,
}

pub fn run(cli: Cli) -> Result<i32> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let workers = match (cli.workers, file.raw("workers")) {
        (Some(w), _) => w,
        (None, Some(text)) => text
            .parse()
            .map_err(|e| Error::Config(format!("config key 'workers' = '{text}': {e}")))?,
        (None, None) => default_workers(),
    };
    let out_dir = cli
        .out_dir
        .clone()
        .or_else(|| file.raw("out-dir").map(PathBuf::from))
        .unwrap_or_else(default_out_dir);
    let mut r = Resolver::new(&file);
    let seed = r.pick("seed", cli.seed, 42u64)?;
    let strict = r.switch("strict", cli.strict)?;
    let ctx = Context {
        runner: Runner::new(workers)?,
        out_dir,
        strict,
        name: cli.command.name(),
    };
    match cli.command {
        Command::TailSweep(a) => {
            let d = ex::TailSweepConfig::default();
            let cfg = ex::TailSweepConfig {
                n: r.pick("n", a.n, d.n)?,
                z: r.pick("z", a.z, FloatList(d.z))?.0,
                paths: r.pick("paths", a.paths, d.paths)?,
                seed,
                slack_low: r.pick("slack-low", a.slack_low, d.slack_low)?,
                slack_high: r.pick("slack-high", a.slack_high, d.slack_high)?,
                allow_rare: r.switch("allow-rare", a.allow_rare)?,
            };
            let config = finish_resolve(r)?;
            cfg.validate()?;
            execute(&ctx, seed, config, |run| ex::run_tail_sweep(run, &cfg))
        }
        Command::QuenchedTail(a) => {
            let d = ex::QuenchedTailConfig::default();
            let cfg = ex::QuenchedTailConfig {
                n: r.pick("n", a.n, d.n)?,
                z: r.pick("z", a.z, d.z)?,
                clock_seeds: r
                    .pick("clock-seeds", a.clock_seeds, SeedList(d.clock_seeds))?
                    .0,
                paths: r.pick("paths", a.paths, d.paths)?,
                seed,
                eps: r.pick("eps", a.eps, d.eps)?,
                slack_low: r.pick("slack-low", a.slack_low, d.slack_low)?,
                allow_rare: r.switch("allow-rare", a.allow_rare)?,
            };
            let config = finish_resolve(r)?;
            cfg.validate()?;
            execute(&ctx, seed, config, |run| ex::run_quenched_tail(run, &cfg))
        }
        Command::ClockVerify(a) => {
            let d = ex::ClockConfig::default();
            let cfg = ex::ClockConfig {
                n: r.pick("n", a.n, d.n)?,
                delta: r.pick("delta", a.delta, d.delta)?,
                alpha: r.pick("alpha", a.alpha, d.alpha)?,
                reps: r.pick("reps", a.reps, d.reps)?,
                seed,
            };
            let config = finish_resolve(r)?;
            cfg.validate()?;
            execute(&ctx, seed, config, |run| {
                ex::run_clock_verification(run, &cfg)
            })
        }
        Command::FddCov(a) => {
            let d = ex::FddConfig::default();
            let cfg = ex::FddConfig {
                n: r.pick("n", a.n, d.n)?,
                s_grid: r.pick("s-grid", a.s_grid, FloatList(d.s_grid))?.0,
                t_grid: r.pick("t-grid", a.t_grid, FloatList(d.t_grid))?.0,
                reps: r.pick("reps", a.reps, d.reps)?,
                seed,
            };
            let config = finish_resolve(r)?;
            cfg.validate()?;
            execute(&ctx, seed, config, |run| ex::run_fdd_covariance(run, &cfg))
        }
        Command::BlockMoment(a) => {
            let d = ex::BlockConfig::default();
            let blocks = r.pick("blocks", a.blocks, ex::format_block_pairs(&d.pairs))?;
            let cfg = ex::BlockConfig {
                n: r.pick("n", a.n, d.n)?,
                pairs: ex::parse_block_pairs(&blocks)?,
                reps: r.pick("reps", a.reps, d.reps)?,
                seed,
            };
            let config = finish_resolve(r)?;
            cfg.validate()?;
            execute(&ctx, seed, config, |run| {
                ex::run_block_moment_check(run, &cfg)
            })
        }
        Command::OuTail(a) => {
            let d = ex::OuTailConfig::default();
            let cfg = ex::OuTailConfig {
                z: r.pick("z", a.z, FloatList(d.z))?.0,
                h: r.pick("h", a.h, d.h)?,
                paths: r.pick("paths", a.paths, d.paths)?,
                seed,
                k: r.pick("k", a.k, d.k)?,
                allow_rare: r.switch("allow-rare", a.allow_rare)?,
            };
            let config = finish_resolve(r)?;
            cfg.validate()?;
            execute(&ctx, seed, config, |run| ex::run_ou_tail(run, &cfg))
        }
        Command::IntegralTest(a) => {
            let d = ex::IntegralConfig::default();
            let family = r.pick("family", a.family, d.family)?;
            let default_params = match family {
                Family::Corollary => d.params,
                Family::ScaledLil => vec![0.9, 1.2],
            };
            let cfg = ex::IntegralConfig {
                family,
                params: r.pick("params", a.params, FloatList(default_params))?.0,
                clamp: r.switch("clamp", a.clamp)?,
                sum_terms: r.pick("sum-terms", a.sum_terms, d.sum_terms)?,
            };
            let config = finish_resolve(r)?;
            cfg.validate()?;
            execute(&ctx, seed, config, |_| ex::run_integral_test(&cfg))
        }
        Command::ErdosSuite(a) => {
            let d = ex::ErdosConfig::default();
            let cfg = ex::ErdosConfig {
                family: r.pick("family", a.family, d.family)?,
                params: r.pick("params", a.params, FloatList(d.params))?.0,
                sum_terms: r.pick("sum-terms", a.sum_terms, d.sum_terms)?,
                mc_family: r.pick("mc-family", a.mc_family, d.mc_family)?,
                mc_param: r.pick("mc-param", a.mc_param, d.mc_param)?,
                max_length: r.pick("max-length", a.max_length, d.max_length)?,
                ratio_lengths: r
                    .pick("ratio-lengths", a.ratio_lengths, SeedList(d.ratio_lengths))?
                    .0,
                paths: r.pick("paths", a.paths, d.paths)?,
                seed,
                q_indices: r
                    .pick(
                        "q-indices",
                        a.q_indices,
                        SeedList(d.q_indices.iter().map(|&i| i as u64).collect()),
                    )?
                    .0
                    .into_iter()
                    .map(|i| i as usize)
                    .collect(),
                q_terms: r.pick("q-terms", a.q_terms, d.q_terms)?,
            };
            let config = finish_resolve(r)?;
            cfg.validate()?;
            execute(&ctx, seed, config, |run| ex::run_erdos_suite(run, &cfg))
        }
        Command::SimulatePath(a) => {
            let d = ex::SimulateConfig::default();
            let cfg = ex::SimulateConfig {
                n: r.pick("n", a.n, d.n)?,
                horizon: r.pick("horizon", a.horizon, d.horizon)?,
                seed,
                level: r.pick("level", a.level, d.level)?,
            };
            let clock_log = match a.clock_log {
                Some(p) => Some(p),
                None => file.raw("clock-log").map(PathBuf::from),
            };
            let mut config = finish_resolve_ignoring(r, &["clock-log"])?;
            if let Some(p) = &clock_log {
                config.insert("clock-log".into(), p.display().to_string());
            }
            cfg.validate()?;
            let log = clock_log.as_deref().map(read_clock_log).transpose()?;
            let out = ex::run_simulate_path(&ctx.runner, &cfg, log)?;
            let stem = ctx.out_dir.join(ctx.name);
            std::fs::create_dir_all(&ctx.out_dir).map_err(|e| Error::io(&ctx.out_dir, e))?;
            let path_file = stem.with_extension("path.csv");
            let clock_file = stem.with_extension("clocks.csv");
            atomic_write(&path_file, path_to_csv(&out.path).as_bytes())?;
            atomic_write(&clock_file, clock_log_to_csv(&out.log).as_bytes())?;
            eprintln!("wrote {} and {}", path_file.display(), clock_file.display());
            execute(&ctx, seed, config, |_| Ok(out.report))
        }
        Command::PzCheck(a) => {
            let d = ex::PzConfig::default();
            let cfg = ex::PzConfig {
                n: r.pick("n", a.n, d.n)?,
                z: r.pick("z", a.z, d.z)?,
                paths: r.pick("paths", a.paths, d.paths)?,
                clock_seed: r.pick("clock-seed", a.clock_seed, d.clock_seed)?,
                seed,
                alpha: r.pick("alpha", a.alpha, d.alpha)?,
                allow_rare: r.switch("allow-rare", a.allow_rare)?,
            };
            let config = finish_resolve(r)?;
            cfg.validate()?;
            execute(&ctx, seed, config, |run| ex::paley_zygmund_check(run, &cfg))
        }
        Command::Reflection(a) => {
            let d = ex::ReflectionConfig::default();
            let cfg = ex::ReflectionConfig {
                n: r.pick("n", a.n, d.n)?,
                lambdas: r.pick("lambdas", a.lambdas, FloatList(d.lambdas))?.0,
                paths: r.pick("paths", a.paths, d.paths)?,
                seed,
            };
            let config = finish_resolve(r)?;
            cfg.validate()?;
            execute(&ctx, seed, config, |run| {
                ex::run_reflection_check(run, &cfg)
            })
        }
    }
}

fn finish_resolve(r: Resolver<'_>) -> Result<BTreeMap<String, String>> {
    finish_resolve_ignoring(r, &[])
}

/// Rejects config-file keys no parameter consumed, then returns the echo.
fn finish_resolve_ignoring(r: Resolver<'_>, extra: &[&str]) -> Result<BTreeMap<String, String>> {
    let ignore: Vec<&str> = UNECHOED_KEYS.iter().chain(extra).copied().collect();
    let unused = r.unused_keys(&ignore);
    if !unused.is_empty() {
        return Err(Error::Config(format!(
            "unknown config keys: {}",
            unused.join(", ")
        )));
    }
    Ok(r.finish())
}

fn execute<R, F>(ctx: &Context, seed: u64, config: BTreeMap<String, String>, f: F) -> Result<i32>
where
    R: Serialize + Tabular,
    F: FnOnce(&Runner) -> Result<R>,
{
    let start = Instant::now();
    let report = f(&ctx.runner)?;
    let mut env = Envelope::new(ctx.name, seed, config, report);
    env.wall_time_seconds = start.elapsed().as_secs_f64();
    std::fs::create_dir_all(&ctx.out_dir).map_err(|e| Error::io(&ctx.out_dir, e))?;
    let paths = ReportPaths::in_dir(&ctx.out_dir, ctx.name);
    emit_report(&env, &paths)?;
    let rows = env.report.rows();
    for row in &rows {
        println!(
            "{} {}={} estimate={} ci=[{}, {}] band=[{}, {}] {}",
            row.experiment,
            row.parameter,
            row.value,
            row.estimate,
            row.ci_low,
            row.ci_high,
            row.band_low,
            row.band_high,
            row.verdict.as_str()
        );
    }
    eprintln!("wrote {} and {}", paths.json.display(), paths.csv.display());
    Ok(exit_code(&env.report.verdicts(), ctx.strict))
}
