//! CSV persistence for gap profiles and schedules.
//!
//! Files open with `#` metadata lines (`# key=value`), then a column header,
//! then one row per sample. Floats are written with 17 significant digits so
//! a round trip is exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::gap::{GapProfile, ProfileMeta};
use super::schedule::Schedule;
use crate::error::{Error, Result};

/// Shortest fixed-width form that round-trips an `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{x:.16e}")
}

pub fn parse_f64(s: &str, line: usize) -> Result<f64> {
    match s.trim() {
        "inf" | "+inf" | "Infinity" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        t => t.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("'{t}' is not a number"),
        }),
    }
}

pub fn profile_to_csv(profile: &GapProfile) -> String {
    let mut out = String::new();
    out.push_str("# kind=gap_profile\n");
    if let Some(m) = &profile.meta {
        let _ = writeln!(
            out,
            "# scheme={} m={} n={} k={} n_samples={} master_seed={}",
            m.scheme, m.m, m.n, m.k, m.n_samples, m.master_seed
        );
    }
    let _ = writeln!(out, "# degenerate_events={}", profile.degenerate_events);
    out.push_str("u,gap_sq,gap_sq_stderr\n");
    for ((u, g), s) in profile.u_grid().iter().zip(profile.gap_sq()).zip(profile.gap_sq_stderr()) {
        let _ = writeln!(out, "{},{},{}", fmt_f64(*u), fmt_f64(*g), fmt_f64(*s));
    }
    out
}

fn metadata(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.strip_prefix('#'))
        .flat_map(|l| l.split_whitespace())
        .filter_map(|kv| kv.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

/// Data rows after the metadata block and the column header.
fn rows(text: &str, header: &[&str]) -> Result<Vec<(usize, Vec<f64>)>> {
    let mut body = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty());
    let (line, cols) = body.next().ok_or(Error::Parse {
        line: 0,
        msg: "missing column header".into(),
    })?;
    let found: Vec<&str> = cols.split(',').map(str::trim).collect();
    if found.len() < header.len() || found[..header.len()] != *header {
        return Err(Error::Parse {
            line,
            msg: format!("expected columns {header:?}, found {found:?}"),
        });
    }
    body.map(|(line, l)| {
        let vals = l
            .split(',')
            .take(header.len())
            .map(|v| parse_f64(v, line))
            .collect::<Result<Vec<f64>>>()?;
        if vals.len() != header.len() {
            return Err(Error::Parse {
                line,
                msg: format!("expected {} fields", header.len()),
            });
        }
        Ok((line, vals))
    })
    .collect()
}

pub fn profile_from_csv(text: &str) -> Result<GapProfile> {
    let has_stderr = text
        .lines()
        .find(|l| !l.starts_with('#'))
        .is_some_and(|l| l.contains("gap_sq_stderr"));
    let header: &[&str] = if has_stderr {
        &["u", "gap_sq", "gap_sq_stderr"]
    } else {
        &["u", "gap_sq"]
    };
    let data = rows(text, header)?;
    let u = data.iter().map(|(_, v)| v[0]).collect();
    let g = data.iter().map(|(_, v)| v[1]).collect();
    let s = data.iter().map(|(_, v)| if has_stderr { v[2] } else { 0.0 }).collect();
    let mut profile = GapProfile::with_stderr(u, g, s)?;

    let meta = metadata(text);
    let get = |key: &str| meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
    let num = |key: &str| get(key).and_then(|v| v.parse::<u64>().ok());
    if let (Some(scheme), Some(m), Some(n), Some(k), Some(ns), Some(seed)) = (
        get("scheme"),
        num("m"),
        num("n"),
        num("k"),
        num("n_samples"),
        num("master_seed"),
    ) {
        profile.meta = Some(ProfileMeta {
            scheme: scheme.parse()?,
            m: m as usize,
            n: n as usize,
            k: k as usize,
            n_samples: ns as usize,
            master_seed: seed,
        });
    }
    profile.degenerate_events = num("degenerate_events").unwrap_or(0) as usize;
    Ok(profile)
}

pub fn schedule_to_csv(schedule: &Schedule, header_meta: &str) -> String {
    let mut out = String::new();
    out.push_str("# kind=schedule\n");
    let _ = writeln!(out, "# epsilon={}", fmt_f64(schedule.epsilon()));
    if !header_meta.is_empty() {
        let _ = writeln!(out, "# {header_meta}");
    }
    out.push_str("t,u\n");
    for (t, u) in schedule.times().iter().zip(schedule.u_values()) {
        let _ = writeln!(out, "{},{}", fmt_f64(*t), fmt_f64(*u));
    }
    out
}

pub fn schedule_from_csv(text: &str) -> Result<Schedule> {
    let data = rows(text, &["t", "u"])?;
    let meta = metadata(text);
    let eps = meta
        .iter()
        .find(|(k, _)| k == "epsilon")
        .map(|(_, v)| parse_f64(v, 0))
        .transpose()?
        .ok_or(Error::Parse {
            line: 0,
            msg: "missing epsilon metadata".into(),
        })?;
    Schedule::from_samples(
        data.iter().map(|(_, v)| v[0]).collect(),
        data.iter().map(|(_, v)| v[1]).collect(),
        eps,
    )
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.display().to_string(),
            source,
        })?;
    }
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}
