//! Plain-text CSV snapshots. Every number is written with 17 significant
//! digits so files round-trip bit for bit.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{RevolutionProfile, SupportProfile};

pub const SUPPORT_HEADER: &str = "theta,s";
pub const PROFILE_HEADER: &str = "x,u";

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_rows<W: Write>(mut w: W, header: &str, rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    writeln!(w, "{header}")?;
    for row in rows {
        let line: Vec<String> = row.into_iter().map(fmt_f64).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// Parses a CSV with the given header into rows of numbers.
pub fn parse_table(text: &str, header: &str) -> Result<Vec<Vec<f64>>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let first = lines.next().ok_or_else(|| Error::Io("empty CSV".into()))?;
    if first.trim() != header {
        return Err(Error::Io(format!("expected header `{header}`, found `{}`", first.trim())));
    }
    let width = header.split(',').count();
    lines
        .enumerate()
        .map(|(i, line)| {
            let row = line
                .split(',')
                .map(|f| f.trim().parse::<f64>().map_err(|_| Error::Io(format!("row {}: bad number `{f}`", i + 1))))
                .collect::<Result<Vec<f64>>>()?;
            if row.len() != width {
                return Err(Error::Io(format!("row {}: expected {width} fields, found {}", i + 1, row.len())));
            }
            Ok(row)
        })
        .collect()
}

pub fn write_support<W: Write>(w: W, profile: &SupportProfile) -> Result<()> {
    let thetas = profile.thetas();
    write_rows(w, SUPPORT_HEADER, thetas.into_iter().zip(profile.values()).map(|(t, s)| vec![t, *s]))
}

pub fn write_profile<W: Write>(w: W, profile: &RevolutionProfile) -> Result<()> {
    write_rows(w, PROFILE_HEADER, profile.x().iter().zip(profile.u()).map(|(x, u)| vec![*x, *u]))
}

/// Reads a support CSV. The θ column must be the uniform grid on `[0, π]`.
pub fn parse_support(text: &str) -> Result<SupportProfile> {
    let rows = parse_table(text, SUPPORT_HEADER)?;
    let profile = SupportProfile::new(rows.iter().map(|r| r[1]).collect())?;
    for (j, row) in rows.iter().enumerate() {
        if (row[0] - profile.theta(j)).abs() > 1e-9 {
            return Err(Error::Io(format!("row {}: theta {} is off the uniform grid", j + 1, row[0])));
        }
    }
    Ok(profile)
}

pub fn parse_profile(text: &str) -> Result<RevolutionProfile> {
    let rows = parse_table(text, PROFILE_HEADER)?;
    let (x, u) = rows.into_iter().map(|r| (r[0], r[1])).unzip();
    RevolutionProfile::new(x, u)
}

/// Either kind of snapshot, dispatched on the header line.
pub enum Snapshot {
    Support(SupportProfile),
    Profile(RevolutionProfile),
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let header = text.lines().next().unwrap_or("").trim();
    match header {
        SUPPORT_HEADER => parse_support(&text).map(Snapshot::Support),
        PROFILE_HEADER => parse_profile(&text).map(Snapshot::Profile),
        other => Err(Error::Io(format!("{}: unknown CSV header `{other}`", path.display()))),
    }
}

pub fn write_support_file(path: &Path, profile: &SupportProfile) -> Result<()> {
    write_support(fs::File::create(path)?, profile)
}

pub fn write_profile_file(path: &Path, profile: &RevolutionProfile) -> Result<()> {
    write_profile(fs::File::create(path)?, profile)
}

/// Writes `header` and rows of numbers.
pub fn write_table<W: Write>(w: W, header: &str, rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    write_rows(w, header, rows)
}
