use std::fmt::Write as _;
use std::path::Path;

use super::{BerRecord, GiniRecord, SuccessRecord};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "scenario,ebn0_db,trials,bit_errors,total_bits,ber,wall_time_ms";

/// C-style `%.6e`: six fractional digits, signed exponent of at least two
/// digits.
pub fn format_ber(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    let s = format!("{v:.6e}");
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let (sign, digits) = match exp.strip_prefix('-') {
        Some(d) => ('-', d),
        None => ('+', exp),
    };
    format!("{mant}e{sign}{digits:0>2}")
}

fn fmt_float(v: f64) -> String {
    // shortest representation that round-trips
    format!("{v}")
}

/// BER records as CSV text. With `deterministic`, wall times are written as
/// zero so repeated runs produce identical bytes.
pub fn emit_csv(records: &[BerRecord], deterministic: bool) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.scenario,
            fmt_float(r.ebn0_db),
            r.trials,
            r.bit_errors,
            r.total_bits,
            format_ber(r.ber),
            if deterministic { 0 } else { r.wall_time_ms }
        );
    }
    out
}

pub fn write_csv(text: &str, path: &Path) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn field<T: std::str::FromStr>(line: usize, name: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::config(format!("line {line}: {name}"), format!("cannot parse '{v}'")))
}

/// Parse text produced by [`emit_csv`]. The seed column is not stored and
/// comes back as zero.
pub fn parse_csv(text: &str) -> Result<Vec<BerRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        _ => return Err(Error::config("csv", "missing or unexpected header")),
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(k, l)| {
            let line = k + 2;
            let cols: Vec<&str> = l.split(',').collect();
            if cols.len() != 7 {
                return Err(Error::config(format!("line {line}"), "expected 7 columns"));
            }
            Ok(BerRecord {
                scenario: cols[0].to_string(),
                ebn0_db: field(line, "ebn0_db", cols[1])?,
                trials: field(line, "trials", cols[2])?,
                bit_errors: field(line, "bit_errors", cols[3])?,
                total_bits: field(line, "total_bits", cols[4])?,
                ber: field(line, "ber", cols[5])?,
                wall_time_ms: field(line, "wall_time_ms", cols[6])?,
                seed: 0,
            })
        })
        .collect()
}

pub fn emit_success_csv(records: &[SuccessRecord], deterministic: bool) -> String {
    let mut out = String::from("scenario,ebn0_db,trials,correct,selected,success_rate,wall_time_ms\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{:.6},{}",
            r.scenario,
            fmt_float(r.ebn0_db),
            r.trials,
            r.correct,
            r.selected,
            r.success_rate,
            if deterministic { 0 } else { r.wall_time_ms }
        );
    }
    out
}

pub fn emit_gini_csv(records: &[GiniRecord]) -> String {
    let mut out = String::from("sources,runs,gini_raw,gini_window,gini_haar,se_raw,se_window,se_haar\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
            r.sources, r.runs, r.mean_raw, r.mean_window, r.mean_haar, r.se_raw, r.se_window, r.se_haar
        );
    }
    out
}

/// Table of BER per curve (columns) and Eb/N0 (rows), grouped by scenario.
pub fn emit_summary(records: &[BerRecord]) -> String {
    let mut out = String::new();
    let mut scenarios: Vec<&str> = Vec::new();
    for r in records {
        let s = r.scenario.split('/').next().unwrap_or("");
        if !scenarios.contains(&s) {
            scenarios.push(s);
        }
    }
    for s in scenarios {
        let rows: Vec<&BerRecord> = records
            .iter()
            .filter(|r| r.scenario.split('/').next() == Some(s))
            .collect();
        let mut curves: Vec<&str> = Vec::new();
        let mut grid: Vec<f64> = Vec::new();
        for r in &rows {
            let c = r.scenario.rsplit('/').next().unwrap_or("");
            if !curves.contains(&c) {
                curves.push(c);
            }
            if !grid.contains(&r.ebn0_db) {
                grid.push(r.ebn0_db);
            }
        }
        let _ = writeln!(out, "{s}");
        let _ = write!(out, "{:>8}", "Eb/N0");
        for c in &curves {
            let _ = write!(out, " {c:>13}");
        }
        out.push('\n');
        for g in grid {
            let _ = write!(out, "{g:>8.2}");
            for c in &curves {
                let v = rows
                    .iter()
                    .find(|r| r.ebn0_db == g && r.scenario.rsplit('/').next() == Some(c))
                    .map(|r| format_ber(r.ber))
                    .unwrap_or_else(|| "-".into());
                let _ = write!(out, " {v:>13}");
            }
            out.push('\n');
        }
    }
    out
}
