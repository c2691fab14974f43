//! Serializable verification reports.

use std::collections::BTreeMap;

use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::specfun::to_decimal;

/// Significant digits used when rendering high-precision values.
pub const REPORT_DIGITS: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// The point violates a hypothesis and was not checked.
    Skipped,
    /// A numerical method failed at this point.
    Error,
    /// Observed and recorded without a pass/fail verdict.
    Info,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub params: BTreeMap<String, String>,
    pub oracle: Option<String>,
    pub estimate: Option<String>,
    pub lo: Option<String>,
    pub hi: Option<String>,
    pub bound: Option<String>,
    pub error: Option<String>,
    pub ratio: Option<String>,
    pub sign_ok: Option<bool>,
    pub bound_ok: Option<bool>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Record {
    pub fn new(params: BTreeMap<String, String>, status: Status) -> Self {
        Record {
            params,
            oracle: None,
            estimate: None,
            lo: None,
            hi: None,
            bound: None,
            error: None,
            ratio: None,
            sign_ok: None,
            bound_ok: None,
            status,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Sets the verdict from the two flags.
    pub fn judge(mut self) -> Self {
        let ok = self.sign_ok.unwrap_or(true) && self.bound_ok.unwrap_or(true);
        self.status = if ok { Status::Pass } else { Status::Fail };
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
    pub errors: usize,
    pub info: usize,
    pub worst_ratio: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub grid: BTreeMap<String, String>,
    pub records: Vec<Record>,
    pub summary: Summary,
}

impl Report {
    pub fn new(suite: impl Into<String>, grid: BTreeMap<String, String>, records: Vec<Record>) -> Self {
        let summary = summarize(&records);
        Report { suite: suite.into(), grid, records, summary }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.fail == 0 && self.summary.errors == 0
    }

    /// Largest `|error| / bound` among passing records.
    pub fn worst_ratio(&self) -> Option<f64> {
        self.summary.worst_ratio.as_deref().and_then(|s| s.parse().ok())
    }

    /// Merges reports of the same suite, keeping record order.
    pub fn merge(suite: impl Into<String>, grid: BTreeMap<String, String>, parts: Vec<Report>) -> Self {
        let records = parts.into_iter().flat_map(|r| r.records).collect();
        Report::new(suite, grid, records)
    }
}

fn summarize(records: &[Record]) -> Summary {
    let mut s = Summary { pass: 0, fail: 0, skipped: 0, errors: 0, info: 0, worst_ratio: None };
    let mut worst: Option<f64> = None;
    for r in records {
        match r.status {
            Status::Pass => s.pass += 1,
            Status::Fail => s.fail += 1,
            Status::Skipped => s.skipped += 1,
            Status::Error => s.errors += 1,
            Status::Info => s.info += 1,
        }
        if r.status == Status::Pass {
            if let Some(v) = r.ratio.as_deref().and_then(|t| t.parse::<f64>().ok()) {
                worst = Some(worst.map_or(v, |w| w.max(v)));
            }
        }
    }
    s.worst_ratio = worst.map(|w| format!("{w:.6e}"));
    s
}

/// Decimal string for a report field.
pub fn dec(x: &Float) -> String {
    to_decimal(x, REPORT_DIGITS)
}

/// Short ratio string.
pub fn ratio_str(x: &Float) -> String {
    format!("{:.6e}", x.to_f64())
}

/// Renders a rational order or phase parameter: terminating decimals as
/// decimals, everything else as `num/den`.
pub fn fmt_rational(q: &Rational) -> String {
    if *q.denom() == 1 {
        return q.numer().to_string();
    }
    let mut d = q.denom().clone();
    let mut twos = 0u32;
    let mut fives = 0u32;
    while d.is_divisible_u(2) {
        d /= 2u32;
        twos += 1;
    }
    while d.is_divisible_u(5) {
        d /= 5u32;
        fives += 1;
    }
    if d != 1 || twos.max(fives) > 12 {
        return format!("{}/{}", q.numer(), q.denom());
    }
    let places = twos.max(fives) as usize;
    let scaled = Rational::from(q * Integer::from(Integer::u_pow_u(10, places as u32)));
    let digits = scaled.numer().clone().abs().to_string();
    let digits = format!("{digits:0>width$}", width = places + 1);
    let (ip, fp) = digits.split_at(digits.len() - places);
    let sign = if q.cmp0() == std::cmp::Ordering::Less { "-" } else { "" };
    format!("{sign}{ip}.{fp}")
}

/// Builds a parameter map from key/value pairs.
pub fn params<const N: usize>(pairs: [(&str, String); N]) -> BTreeMap<String, String> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_rendering() {
        assert_eq!(fmt_rational(&Rational::from((1, 4))), "0.25");
        assert_eq!(fmt_rational(&Rational::from((-9, 20))), "-0.45");
        assert_eq!(fmt_rational(&Rational::from((1, 3))), "1/3");
        assert_eq!(fmt_rational(&Rational::from(2)), "2");
    }

    #[test]
    fn summary_counts() {
        let mut a = Record::new(params([("k", "1".into())]), Status::Pass);
        a.ratio = Some("2.5e-1".into());
        let mut b = Record::new(params([("k", "2".into())]), Status::Pass);
        b.ratio = Some("7.5e-1".into());
        let c = Record::new(params([("k", "3".into())]), Status::Skipped);
        let r = Report::new("envelope", BTreeMap::new(), vec![a, b, c]);
        assert_eq!(r.summary.pass, 2);
        assert_eq!(r.summary.skipped, 1);
        assert!((r.worst_ratio().unwrap() - 0.75).abs() < 1e-12);
        assert!(r.all_passed());
    }
}
