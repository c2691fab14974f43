use std::collections::BTreeMap;

use anyhow::anyhow;
use czeros::asymp::{
    airy_zero_enclosure, complex_bi_zero_estimate, cylinder_zero_enclosure, optimal_truncation, Enclosure, ZeroFamily, ZeroIndex,
};
use czeros::coeffs::{CoefficientTable, Entry, Family};
use czeros::exact::{parse_rational, rational_string};
use czeros::quadcheck::{verify_quadrature, CoeffKind, QuadratureSettings};
use czeros::report::{fmt_rational, Report};
use czeros::specfun::{complex_to_decimal, to_decimal, Precision};
use czeros::zeros::{
    oracle_airy_zero, oracle_complex_bi_zero, oracle_cylinder_zero, sweep_conjecture_region, verify_classical_bounds,
    verify_envelope, verify_identities, verify_remainder_bounds, EnvelopeGrid,
};
use czeros::Error;
use rug::{Float, Rational};
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::{render, render_report, trim_decimal, Row};
use crate::ranges::{complex_list, float_list, int_list, rational_list, usize_list};
use crate::{CoeffsArgs, Suite, ZeroArgs};

/// Largest truncation `--auto` will choose, to bound the cost of building
/// the coefficient polynomials.
pub const AUTO_MAX_TERMS: usize = 30;

#[derive(Debug)]
pub enum Failure {
    /// Bad arguments or configuration (exit 1).
    Usage(anyhow::Error),
    /// A hypothesis or index condition refused the request (exit 2).
    Refused(anyhow::Error),
    /// An iteration failed to converge (exit 3).
    Numerical(anyhow::Error),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Refused(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Usage(e) | Failure::Refused(e) | Failure::Numerical(e) => e,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Index(_) | Error::Hypothesis(_) | Error::UnsupportedOrder(_) => Failure::Refused(e.into()),
            Error::Numerical(_) => Failure::Numerical(e.into()),
            Error::Domain(_) | Error::Config(_) => Failure::Usage(e.into()),
        }
    }
}

fn usage<T>(r: anyhow::Result<T>) -> Result<T, Failure> {
    r.map_err(Failure::Usage)
}

fn rational(s: &str) -> Result<Rational, Failure> {
    parse_rational(s).map_err(|e| Failure::Usage(e.into()))
}

fn decimal(x: &Float, prec: Precision) -> String {
    trim_decimal(&to_decimal(x, prec.digits() as usize))
}

fn decimal_rational(q: &Rational, prec: Precision) -> String {
    decimal(&Float::with_val(prec.with_extra(10).bits(), q), prec)
}

#[derive(Serialize)]
struct CoeffTableOut {
    family: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    nu: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    precision: Option<u32>,
    entries: Vec<CoeffOut>,
}

#[derive(Serialize)]
struct CoeffOut {
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    mu_coeffs: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<String>,
}

pub fn coeffs(args: &CoeffsArgs, cfg: &RunConfig) -> Result<String, Failure> {
    let family: Family = args.family.parse().map_err(|e: Error| Failure::Usage(e.into()))?;
    let ns = usage(usize_list(&args.n))?;
    if ns.contains(&0) {
        return Err(Failure::Usage(anyhow!("coefficient indices start at 1")));
    }
    let nu = args.nu.as_deref().map(rational).transpose()?;
    let table = CoefficientTable::build(family, ns.iter().copied().max().unwrap_or(1));
    let prec = cfg.precision;
    let entries: Vec<CoeffOut> = ns
        .iter()
        .map(|&n| {
            let entry = table.get(n).expect("table covers the largest index");
            match (entry, &nu) {
                (Entry::Poly(p), None) => CoeffOut { n, mu_coeffs: Some(p.to_strings()), exact: None, value: None },
                (Entry::Rational(q), None) => CoeffOut { n, mu_coeffs: None, exact: Some(rational_string(q)), value: None },
                (e, Some(nu)) => {
                    let q = match e {
                        Entry::Poly(p) => p.eval(nu),
                        Entry::Rational(q) => q.clone(),
                    };
                    CoeffOut { n, mu_coeffs: None, exact: Some(rational_string(&q)), value: Some(decimal_rational(&q, prec)) }
                }
            }
        })
        .collect();
    let rows: Vec<Row> = entries
        .iter()
        .map(|e| {
            let mut r: Row = vec![("n", e.n.to_string())];
            if let Some(c) = &e.mu_coeffs {
                r.push(("mu_coeffs", c.join(" ")));
            }
            if let Some(x) = &e.exact {
                r.push(("exact", x.clone()));
            }
            if let Some(v) = &e.value {
                r.push(("value", v.clone()));
            }
            r
        })
        .collect();
    let out = CoeffTableOut {
        family: args.family.clone(),
        nu: nu.as_ref().map(fmt_rational),
        precision: nu.as_ref().map(|_| prec.digits()),
        entries,
    };
    usage(render(&out, &rows, cfg.format))
}

#[derive(Serialize)]
struct ZeroOut {
    family: &'static str,
    nu: Option<String>,
    alpha: String,
    k: i64,
    kappa: String,
    abscissa: String,
    n_terms: usize,
    lo: String,
    hi: String,
    first_neglected: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    refined: Option<String>,
}

#[derive(Serialize)]
struct ComplexZeroOut {
    family: &'static str,
    k: i64,
    n_terms: usize,
    value: String,
    bound: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    refined: Option<String>,
}

fn auto_terms(index: &ZeroIndex) -> usize {
    optimal_truncation(&index.abscissa).min(AUTO_MAX_TERMS)
}

fn zero_out(family: &'static str, enc: &Enclosure, refined: Option<Float>, prec: Precision) -> ZeroOut {
    let ix = &enc.index;
    ZeroOut {
        family,
        nu: ix.nu.as_ref().map(fmt_rational),
        alpha: fmt_rational(&ix.alpha),
        k: ix.k,
        kappa: fmt_rational(&ix.kappa),
        abscissa: decimal(&ix.abscissa, prec),
        n_terms: enc.n_terms,
        lo: decimal(&enc.lo, prec),
        hi: decimal(&enc.hi, prec),
        first_neglected: decimal(&enc.first_neglected, prec),
        refined: refined.map(|x| decimal(&x, prec)),
    }
}

fn zero_rows(z: &ZeroOut) -> Vec<Row> {
    let mut r: Row = vec![
        ("family", z.family.to_string()),
        ("nu", z.nu.clone().unwrap_or_default()),
        ("alpha", z.alpha.clone()),
        ("k", z.k.to_string()),
        ("kappa", z.kappa.clone()),
        ("abscissa", z.abscissa.clone()),
        ("n_terms", z.n_terms.to_string()),
        ("lo", z.lo.clone()),
        ("hi", z.hi.clone()),
        ("first_neglected", z.first_neglected.clone()),
    ];
    if let Some(v) = &z.refined {
        r.push(("refined", v.clone()));
    }
    vec![r]
}

pub fn zero(args: &ZeroArgs, cfg: &RunConfig) -> Result<String, Failure> {
    let family: ZeroFamily = args.family.parse().map_err(|e: Error| Failure::Usage(e.into()))?;
    let prec = cfg.precision;
    let alpha = rational(&args.alpha)?;
    let k = args.k;
    match family {
        ZeroFamily::Cylinder => {
            let nu = rational(args.nu.as_deref().ok_or_else(|| Failure::Usage(anyhow!("cylinder zeros need --nu")))?)?;
            let n = match args.terms {
                Some(n) => n,
                None => auto_terms(&ZeroIndex::cylinder(&nu, &alpha, k, prec)?),
            };
            let enc = cylinder_zero_enclosure(&nu, &alpha, k, n, prec)?;
            let refined = if args.refine { Some(oracle_cylinder_zero(&nu, &alpha, k, prec)?) } else { None };
            let z = zero_out("cylinder", &enc, refined, prec);
            usage(render(&z, &zero_rows(&z), cfg.format))
        }
        ZeroFamily::Airy => {
            if args.nu.is_some() {
                return Err(Failure::Usage(anyhow!("Airy zeros take no order")));
            }
            let n = match args.terms {
                Some(n) => n,
                None => auto_terms(&ZeroIndex::airy(&alpha, k, prec)?),
            };
            let enc = airy_zero_enclosure(&alpha, k, n, prec)?;
            let refined = if args.refine { Some(oracle_airy_zero(&alpha, k, prec)?) } else { None };
            let z = zero_out("airy", &enc, refined, prec);
            usage(render(&z, &zero_rows(&z), cfg.format))
        }
        ZeroFamily::AiryBiComplex => {
            if args.nu.is_some() || alpha != 0 {
                return Err(Failure::Usage(anyhow!("complex Bi zeros take neither an order nor a phase")));
            }
            let n = args.terms.unwrap_or(6);
            let est = complex_bi_zero_estimate(k, n, prec)?;
            let refined = if args.refine { Some(oracle_complex_bi_zero(k, prec)?) } else { None };
            let digits = prec.digits() as usize;
            let z = ComplexZeroOut {
                family: "bi_complex",
                k,
                n_terms: est.n_terms,
                value: complex_to_decimal(&est.value, digits),
                bound: decimal(&est.bound, prec),
                refined: refined.map(|r| complex_to_decimal(&r, digits)),
            };
            let mut row: Row = vec![
                ("family", z.family.to_string()),
                ("k", k.to_string()),
                ("n_terms", z.n_terms.to_string()),
                ("value", z.value.clone()),
                ("bound", z.bound.clone()),
            ];
            if let Some(v) = &z.refined {
                row.push(("refined", v.clone()));
            }
            usage(render(&z, &[row], cfg.format))
        }
    }
}

/// Exit status of a finished sweep: failures outrank numerical errors.
pub fn report_code(r: &Report) -> u8 {
    if r.summary.fail > 0 {
        2
    } else if r.summary.errors > 0 {
        3
    } else {
        0
    }
}

pub fn run_suite(suite: &Suite, prec: Precision) -> Result<Report, Failure> {
    let report = match suite {
        Suite::Envelope { family, nu, alpha, k, terms } => {
            let family: ZeroFamily = family.parse().map_err(|e: Error| Failure::Usage(e.into()))?;
            if family == ZeroFamily::AiryBiComplex {
                return Err(Failure::Usage(anyhow!("the envelope sweep covers cylinder and airy zeros")));
            }
            let grid = EnvelopeGrid {
                nus: usage(rational_list(nu))?,
                alphas: usage(rational_list(alpha))?,
                ks: usage(int_list(k))?,
                terms: usage(usize_list(terms))?,
            };
            verify_envelope(family, &grid, prec)
        }
        Suite::Remainder { nu, z, terms } => {
            let nus = usage(rational_list(nu))?;
            let zs = usage(complex_list(z, prec.with_extra(10).bits()))?;
            let terms = usage(usize_list(terms))?;
            let parts: Vec<Report> = nus.iter().map(|nu| verify_remainder_bounds(nu, &zs, &terms, prec)).collect();
            let mut grid: BTreeMap<String, String> = parts.first().map(|p| p.grid.clone()).unwrap_or_default();
            grid.insert("nu".into(), nus.iter().map(fmt_rational).collect::<Vec<_>>().join(","));
            Report::merge("remainder", grid, parts)
        }
        Suite::Classical { nu, k } => verify_classical_bounds(&usage(rational_list(nu))?, &usage(int_list(k))?, prec),
        Suite::Identities { z, alpha } => {
            let zs = usage(float_list(z, prec.with_extra(10).bits()))?;
            verify_identities(&zs, &usage(rational_list(alpha))?, prec)
        }
        Suite::Quadcheck { coeff, nu, n, rel_tol, s_max, order, panels } => {
            let kind: CoeffKind = coeff.parse().map_err(|e: Error| Failure::Usage(e.into()))?;
            let settings = QuadratureSettings { order: *order, panels: *panels, s_max: *s_max, precision: prec };
            settings.validate()?;
            if !(rel_tol.is_finite() && *rel_tol > 0.0) {
                return Err(Failure::Usage(anyhow!("--rel-tol must be positive")));
            }
            verify_quadrature(kind, &usage(rational_list(nu))?, &usage(usize_list(n))?, *rel_tol, &settings)
        }
        Suite::Conjecture { nu, n_max } => sweep_conjecture_region(&usage(rational_list(nu))?, *n_max),
    };
    Ok(report)
}

pub fn verify(suite: &Suite, cfg: &RunConfig) -> Result<(String, u8), Failure> {
    let report = run_suite(suite, cfg.precision)?;
    let text = usage(render_report(&report, cfg.format))?;
    Ok((text, report_code(&report)))
}
