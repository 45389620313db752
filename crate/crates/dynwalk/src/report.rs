//! Report envelopes and their JSON/CSV encodings.
//!
//! Every artifact carries the schema version, the resolved configuration,
//! the master seed and the `git describe` string of the build. The CSV has
//! these as `#` comment lines above a fixed long-format body:
//!
//! `experiment,parameter,value,estimate,ci_low,ci_high,band_low,band_high,verdict,samples,seed`
//!
//! Wall-clock time appears only in the comment header and the JSON, so CSV
//! bodies of repeated runs compare byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use dynwalk_core::estimate::{BandReport, Verdict};
use serde::{Deserialize, Serialize};

use crate::io::atomic_write;
use crate::Result;

pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_COLUMNS: &str =
    "experiment,parameter,value,estimate,ci_low,ci_high,band_low,band_high,verdict,samples,seed";

pub fn git_describe() -> &'static str {
    env!("DYNWALK_GIT_DESCRIBE")
}

/// One long-format CSV row: a parameter point with its estimate and band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub experiment: String,
    pub parameter: String,
    pub value: f64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub band_low: f64,
    pub band_high: f64,
    pub verdict: Verdict,
    pub samples: u64,
    pub seed: u64,
}

impl CsvRow {
    pub fn from_band(experiment: &str, parameter: &str, value: f64, r: &BandReport) -> Self {
        Self {
            experiment: experiment.to_owned(),
            parameter: parameter.to_owned(),
            value,
            estimate: r.estimate.p_hat,
            ci_low: r.estimate.ci_low,
            ci_high: r.estimate.ci_high,
            band_low: r.band.0,
            band_high: r.band.1,
            verdict: r.verdict,
            samples: r.estimate.n_samples,
            seed: r.estimate.seed,
        }
    }

    fn write(&self, out: &mut String) {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.experiment,
            self.parameter,
            self.value,
            self.estimate,
            self.ci_low,
            self.ci_high,
            self.band_low,
            self.band_high,
            self.verdict.as_str(),
            self.samples,
            self.seed
        );
    }
}

/// What an experiment report exposes to the emitters and the exit code.
pub trait Tabular {
    fn rows(&self) -> Vec<CsvRow>;

    fn verdicts(&self) -> Vec<Verdict> {
        self.rows().iter().map(|r| r.verdict).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<R> {
    pub schema_version: u32,
    pub tool_version: String,
    pub git_describe: String,
    pub command: String,
    pub seed: u64,
    pub config: BTreeMap<String, String>,
    pub wall_time_seconds: f64,
    pub report: R,
}

impl<R> Envelope<R> {
    pub fn new(command: &str, seed: u64, config: BTreeMap<String, String>, report: R) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            git_describe: git_describe().to_owned(),
            command: command.to_owned(),
            seed,
            config,
            wall_time_seconds: 0.0,
            report,
        }
    }
}

impl<R: Serialize> Envelope<R> {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

impl<R: Tabular> Envelope<R> {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# schema_version={}", self.schema_version);
        let _ = writeln!(out, "# tool_version={}", self.tool_version);
        let _ = writeln!(out, "# git_describe={}", self.git_describe);
        let _ = writeln!(out, "# command={}", self.command);
        let _ = writeln!(out, "# seed={}", self.seed);
        for (k, v) in &self.config {
            let _ = writeln!(out, "# config.{k}={v}");
        }
        let _ = writeln!(out, "# wall_time_seconds={}", self.wall_time_seconds);
        out.push_str(CSV_COLUMNS);
        out.push('\n');
        for row in self.report.rows() {
            row.write(&mut out);
        }
        out
    }
}

/// The CSV with its `#` header lines removed.
pub fn csv_body(csv: &str) -> String {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .flat_map(|l| [l, "\n"])
        .collect()
}

pub fn parse_json<R: for<'de> Deserialize<'de>>(text: &str) -> Result<Envelope<R>> {
    Ok(serde_json::from_str(text)?)
}

/// Destination files of one report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportPaths {
    pub json: PathBuf,
    pub csv: PathBuf,
}

impl ReportPaths {
    pub fn in_dir(dir: &Path, stem: &str) -> Self {
        Self {
            json: dir.join(format!("{stem}.json")),
            csv: dir.join(format!("{stem}.csv")),
        }
    }
}

/// Writes both files atomically; if the second write fails the first file is
/// removed again.
pub fn emit_report<R: Serialize + Tabular>(env: &Envelope<R>, paths: &ReportPaths) -> Result<()> {
    let json = env.to_json()?;
    let csv = env.to_csv();
    atomic_write(&paths.json, json.as_bytes())?;
    if let Err(e) = atomic_write(&paths.csv, csv.as_bytes()) {
        let _ = std::fs::remove_file(&paths.json);
        return Err(e);
    }
    Ok(())
}

/// Exit status policy: any Fail gives 1; otherwise Underpowered gives 3 in
/// strict mode; otherwise 0.
pub fn exit_code(verdicts: &[Verdict], strict: bool) -> i32 {
    if verdicts.contains(&Verdict::Fail) {
        1
    } else if strict && verdicts.contains(&Verdict::Underpowered) {
        3
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
    struct Empty;

    impl Tabular for Empty {
        fn rows(&self) -> Vec<CsvRow> {
            Vec::new()
        }
    }

    #[test]
    fn empty_report_is_valid() {
        let env = Envelope::new("none", 3, BTreeMap::new(), Empty);
        let json = env.to_json().unwrap();
        let back: Envelope<Empty> = parse_json(&json).unwrap();
        assert_eq!(back, env);
        assert_eq!(csv_body(&env.to_csv()), format!("{CSV_COLUMNS}\n"));
    }

    #[test]
    fn exit_codes() {
        use Verdict::*;
        assert_eq!(exit_code(&[Pass, Pass], true), 0);
        assert_eq!(exit_code(&[Pass, Underpowered], false), 0);
        assert_eq!(exit_code(&[Pass, Underpowered], true), 3);
        assert_eq!(exit_code(&[Underpowered, Fail], true), 1);
        assert_eq!(exit_code(&[], true), 0);
    }
}
