//! Rendering of tables, enclosures and reports in the three output formats.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use anyhow::Result;
use czeros::report::{Record, Report, Status};
use serde::Serialize;

use crate::config::Format;

/// Drops trailing zeros from the fractional part of a decimal string,
/// leaving any exponent in place.
pub fn trim_decimal(s: &str) -> String {
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => s.split_at(i),
        None => (s, ""),
    };
    if !mant.contains('.') {
        return s.to_string();
    }
    let mant = mant.trim_end_matches('0').trim_end_matches('.');
    format!("{mant}{exp}")
}

/// One row of a flat key/value output.
pub type Row = Vec<(&'static str, String)>;

fn csv_bytes(header: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Renders a serializable value, falling back to `rows` for CSV and text.
pub fn render<T: Serialize>(value: &T, rows: &[Row], format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(value)? + "\n"),
        Format::Csv => {
            let header: Vec<String> = rows.first().map(|r| r.iter().map(|(k, _)| k.to_string()).collect()).unwrap_or_default();
            let body: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|(_, v)| v.clone()).collect()).collect();
            csv_bytes(&header, &body)
        }
        Format::Text => {
            let mut out = String::new();
            for (i, r) in rows.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                let width = r.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                for (k, v) in r {
                    writeln!(out, "{k:<width$}  {v}")?;
                }
            }
            Ok(out)
        }
    }
}

const RECORD_COLUMNS: [&str; 11] =
    ["oracle", "estimate", "lo", "hi", "bound", "error", "ratio", "sign_ok", "bound_ok", "status", "note"];

fn status_str(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::Skipped => "skipped",
        Status::Error => "error",
        Status::Info => "info",
    }
}

fn opt(v: &Option<String>) -> String {
    v.clone().unwrap_or_default()
}

fn flag(v: Option<bool>) -> String {
    v.map(|b| b.to_string()).unwrap_or_default()
}

fn record_fields(r: &Record) -> [String; 11] {
    [
        opt(&r.oracle),
        opt(&r.estimate),
        opt(&r.lo),
        opt(&r.hi),
        opt(&r.bound),
        opt(&r.error),
        opt(&r.ratio),
        flag(r.sign_ok),
        flag(r.bound_ok),
        status_str(r.status).to_string(),
        opt(&r.note),
    ]
}

pub fn render_report(report: &Report, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        Format::Csv => {
            let keys: BTreeSet<&String> = report.records.iter().flat_map(|r| r.params.keys()).collect();
            let mut header = vec!["suite".to_string()];
            header.extend(keys.iter().map(|k| k.to_string()));
            header.extend(RECORD_COLUMNS.iter().map(|c| c.to_string()));
            let rows: Vec<Vec<String>> = report
                .records
                .iter()
                .map(|r| {
                    let mut row = vec![report.suite.clone()];
                    row.extend(keys.iter().map(|k| r.params.get(*k).cloned().unwrap_or_default()));
                    row.extend(record_fields(r));
                    row
                })
                .collect();
            csv_bytes(&header, &rows)
        }
        Format::Text => {
            let s = &report.summary;
            let mut out = String::new();
            writeln!(out, "suite {}", report.suite)?;
            for (k, v) in &report.grid {
                writeln!(out, "  {k} = {v}")?;
            }
            for r in &report.records {
                let p: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                write!(out, "{:<7} {}", status_str(r.status), p.join(" "))?;
                if let Some(e) = &r.error {
                    write!(out, " error={e}")?;
                }
                if let Some(b) = &r.bound {
                    write!(out, " bound={b}")?;
                }
                if let Some(q) = &r.ratio {
                    write!(out, " ratio={q}")?;
                }
                if let Some(n) = &r.note {
                    if r.status != Status::Pass {
                        write!(out, " ({n})")?;
                    }
                }
                out.push('\n');
            }
            writeln!(
                out,
                "pass {} fail {} skipped {} errors {} info {} worst ratio {}",
                s.pass,
                s.fail,
                s.skipped,
                s.errors,
                s.info,
                s.worst_ratio.as_deref().unwrap_or("-")
            )?;
            Ok(out)
        }
    }
}
