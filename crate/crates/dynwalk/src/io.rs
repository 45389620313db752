//! File formats: clock event logs, path dumps and atomic file writes.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use dynwalk_core::clocks::ClockEventLog;
use dynwalk_core::walk::WalkPath;

use crate::{Error, Result};

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// so readers never see a partial file.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(tmp.path(), e))?;
    tmp.as_file()
        .sync_all()
        .map_err(|e| Error::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// Clock log as CSV: `# n=<n>,horizon=<h>,seed=<s>`, then `time,index` and
/// one line per event with a one-based index.
pub fn clock_log_to_csv(log: &ClockEventLog) -> String {
    let mut out = String::with_capacity(24 * (log.len() + 2));
    let _ = writeln!(
        out,
        "# n={},horizon={},seed={}",
        log.n(),
        log.horizon(),
        log.seed()
    );
    out.push_str("time,index\n");
    for (t, j) in log.events() {
        let _ = writeln!(out, "{t},{j}");
    }
    out
}

fn bad(detail: impl Into<String>) -> Error {
    Error::Parse {
        what: "clock log",
        detail: detail.into(),
    }
}

pub fn clock_log_from_csv(text: &str) -> Result<ClockEventLog> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty input"))?;
    let fields = header
        .strip_prefix("# ")
        .ok_or_else(|| bad("missing '# n=...,horizon=...,seed=...' header"))?;
    let (mut n, mut horizon, mut seed) = (None, None, None);
    for part in fields.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| bad(format!("header field '{part}'")))?;
        match k.trim() {
            "n" => n = v.trim().parse::<usize>().ok(),
            "horizon" => horizon = v.trim().parse::<f64>().ok(),
            "seed" => seed = v.trim().parse::<u64>().ok(),
            other => return Err(bad(format!("unknown header field '{other}'"))),
        }
    }
    let (n, horizon, seed) = match (n, horizon, seed) {
        (Some(n), Some(h), Some(s)) => (n, h, s),
        _ => return Err(bad("header needs valid n, horizon and seed")),
    };
    if lines.next().map(str::trim) != Some("time,index") {
        return Err(bad("missing 'time,index' column header"));
    }
    let mut events = Vec::new();
    for (k, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (t, j) = line
            .split_once(',')
            .ok_or_else(|| bad(format!("row {}: '{line}'", k + 1)))?;
        let t = t
            .trim()
            .parse::<f64>()
            .map_err(|e| bad(format!("row {}: {e}", k + 1)))?;
        let j = j
            .trim()
            .parse::<usize>()
            .map_err(|e| bad(format!("row {}: {e}", k + 1)))?;
        events.push((t, j));
    }
    Ok(ClockEventLog::from_events(n, horizon, seed, &events)?)
}

pub fn write_clock_log(path: &Path, log: &ClockEventLog) -> Result<()> {
    atomic_write(path, clock_log_to_csv(log).as_bytes())
}

pub fn read_clock_log(path: &Path) -> Result<ClockEventLog> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    clock_log_from_csv(&text)
}

/// Path segments as CSV: `time,value`, one row per segment start.
pub fn path_to_csv(path: &WalkPath) -> String {
    let mut out = String::with_capacity(40 * (path.segments() + 1));
    out.push_str("time,value\n");
    for (t, v) in path.times.iter().zip(&path.values) {
        let _ = writeln!(out, "{t},{v}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use dynwalk_core::clocks::sample_clocks;

    #[test]
    fn clock_log_round_trip() {
        let log = sample_clocks(50, 0.7, 11).unwrap();
        let back = clock_log_from_csv(&clock_log_to_csv(&log)).unwrap();
        assert_eq!(back, log);
    }

    #[test]
    fn malformed_logs_are_rejected() {
        assert!(clock_log_from_csv("").is_err());
        assert!(clock_log_from_csv("# n=3,horizon=1\ntime,index\n").is_err());
        assert!(clock_log_from_csv("# n=3,horizon=1,seed=0\ntime,index\n0.5,4\n").is_err());
        assert!(clock_log_from_csv("# n=3,horizon=1,seed=0\ntime,index\n0.5,2\n0.4,1\n").is_err());
        assert!(clock_log_from_csv("# n=3,horizon=1,seed=0\ntime,index\n").is_ok());
    }
}
