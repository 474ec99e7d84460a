//! Sectioned `key = value` scenario files.
//!
//! ```text
//! [scenario]
//! name = offgrid
//! preset = fig5          # optional starting point
//!
//! [system]
//! n = 128
//!
//! [nbi]
//! offset = independent_offsets
//!
//! [receiver]
//! sparsifier = haar
//! curves = nbi_free, impaired, proposed
//!
//! [curve.wide]
//! receiver = proposed
//! reserved_fraction = 0.375
//!
//! [sweep]
//! ebn0 = 0:20:2.5
//! trials = 500
//! seed = 7
//! ```

use super::{preset, Curve, Metric, Receiver, ScenarioConfig};
use crate::error::{Error, Result};

/// `a:b:step` (inclusive) or a comma-separated list.
pub fn parse_ebn0_grid(s: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| Error::config("ebn0", format!("'{s}': {why}"));
    let num = |v: &str| v.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let grid = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:stop:step"));
        }
        let (a, b, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(step > 0.0) || b < a {
            return Err(bad("step must be positive and stop >= start"));
        }
        let count = ((b - a) / step + 1e-9).floor() as usize + 1;
        (0..count).map(|k| a + k as f64 * step).collect()
    } else {
        s.split(',').map(num).collect::<Result<Vec<_>>>()?
    };
    if grid.is_empty() || grid.iter().any(|v| !v.is_finite()) {
        return Err(bad("empty or non-finite grid"));
    }
    Ok(grid)
}

fn parse<T: std::str::FromStr>(field: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::config(field, format!("cannot parse '{v}'")))
}

fn parse_bool(field: &str, v: &str) -> Result<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::config(field, format!("cannot parse '{v}' as a boolean"))),
    }
}

struct Entry<'a> {
    line: usize,
    section: &'a str,
    key: &'a str,
    value: &'a str,
}

fn entries(text: &str) -> Result<Vec<Entry<'_>>> {
    let mut section = "";
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split(['#', ';']).next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(s) = line.strip_prefix('[') {
            section = s
                .strip_suffix(']')
                .ok_or_else(|| Error::config(format!("line {}", k + 1), "unterminated section header"))?
                .trim();
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::config(format!("line {}", k + 1), "expected key = value"))?;
        out.push(Entry {
            line: k + 1,
            section,
            key: key.trim(),
            value: value.trim(),
        });
    }
    Ok(out)
}

/// Parse a scenario file; `default_n` sizes the base preset when the file
/// does not set `n`.
pub fn parse_config(text: &str, default_n: usize) -> Result<ScenarioConfig> {
    let entries = entries(text)?;
    let lookup = |sec: &str, key: &str| {
        entries
            .iter()
            .rev()
            .find(|e| e.section == sec && e.key == key)
            .map(|e| e.value)
    };
    let n = match lookup("system", "n") {
        Some(v) => parse("system.n", v)?,
        None => default_n,
    };
    let mut c = match lookup("scenario", "preset") {
        Some(p) => preset(p, n)?,
        None => ScenarioConfig::base("custom", 128).with_n(n),
    };
    let mut curve_names: Vec<String> = Vec::new();
    let mut custom: Vec<Curve> = Vec::new();
    for e in &entries {
        let f = format!("{}.{}", e.section, e.key);
        let v = e.value;
        match (e.section, e.key) {
            ("scenario", "name") => c.name = v.to_string(),
            ("scenario", "preset") => {}
            ("scenario", "metric") => {
                c.metric = match v {
                    "ber" => Metric::Ber,
                    "success_rate" => Metric::SuccessRate,
                    _ => return Err(Error::config(f, format!("unknown metric '{v}'"))),
                }
            }
            ("system", "n") => {}
            ("system", "users") => c.system.n_users = parse(&f, v)?,
            ("system", "qam") => c.system.qam_order = parse(&f, v)?,
            ("system", "channel_len") => c.system.channel_len = parse(&f, v)?,
            ("system", "symbol_var") => c.system.symbol_var = parse(&f, v)?,
            ("nbi", "max_sources") => c.nbi.max_sources = parse(&f, v)?,
            ("nbi", "sir_db") => c.nbi.sir_db = parse(&f, v)?,
            ("nbi", "offset") => c.nbi.offset_mode = parse(&f, v)?,
            ("nbi", "refresh") => c.nbi.per_symbol_refresh = parse_bool(&f, v)?,
            ("receiver", "reserved_fraction") => c.reserved_fraction = parse(&f, v)?,
            ("receiver", "reliable_ratio") => c.reliable_ratio = parse(&f, v)?,
            ("receiver", "sparsifier") => c.sparsifier = parse(&f, v)?,
            ("receiver", "equalizer") => c.equalizer = parse(&f, v)?,
            ("receiver", "antennas") => c.antennas = parse(&f, v)?,
            ("receiver", "multiplier") => c.multiplier = parse(&f, v)?,
            ("receiver", "coeffs_per_source") => c.coeffs_per_source = Some(parse(&f, v)?),
            ("receiver", "reliability") => c.reliability = parse(&f, v)?,
            ("receiver", "curves") => {
                curve_names = v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
            }
            ("sweep", "ebn0") => c.ebn0_db = parse_ebn0_grid(v)?,
            ("sweep", "trials") => c.trials = parse(&f, v)?,
            ("sweep", "seed") => c.seed = parse(&f, v)?,
            (sec, key) if sec.starts_with("curve.") => {
                let name = &sec["curve.".len()..];
                let idx = match custom.iter().position(|c| c.name == name) {
                    Some(i) => i,
                    None => {
                        custom.push(Curve::new(name, Receiver::Proposed));
                        custom.len() - 1
                    }
                };
                let cv = &mut custom[idx];
                match key {
                    "receiver" => cv.receiver = parse(&f, v)?,
                    "reserved_fraction" => cv.reserved_fraction = Some(parse(&f, v)?),
                    "reliable_ratio" => cv.reliable_ratio = Some(parse(&f, v)?),
                    "sparsifier" => cv.sparsifier = Some(parse(&f, v)?),
                    "equalizer" => cv.equalizer = Some(parse(&f, v)?),
                    "multiplier" => cv.multiplier = Some(parse(&f, v)?),
                    _ => return Err(Error::config(f, format!("unknown key (line {})", e.line))),
                }
            }
            _ => return Err(Error::config(f, format!("unknown key (line {})", e.line))),
        }
    }
    if lookup("system", "channel_len").is_none() && lookup("system", "n").is_some() {
        c.system.channel_len = (n / 4).max(1);
    }
    if !curve_names.is_empty() || !custom.is_empty() {
        c.curves = curve_names
            .iter()
            .map(|s| Ok(Curve::of(s.parse::<Receiver>()?)))
            .collect::<Result<Vec<_>>>()?;
        c.curves.extend(custom);
    }
    c.validate()?;
    Ok(c)
}
