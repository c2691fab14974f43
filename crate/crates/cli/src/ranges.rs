//! Grid syntax for command-line sweeps.
//!
//! A list is a comma-separated sequence of items. Each item is a single
//! value, an inclusive integer range `a..b`, or a linear grid
//! `lo..hi:count` of exact rationals.

use anyhow::{anyhow, bail, Context, Result};
use czeros::exact::parse_rational;
use czeros::zeros::linear_grid;
use rug::{Complex, Float, Rational};

fn items(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty())
}

fn rational(s: &str) -> Result<Rational> {
    parse_rational(s).map_err(|e| anyhow!("{e}"))
}

/// Integers from a list of values and inclusive ranges.
pub fn int_list(s: &str) -> Result<Vec<i64>> {
    let mut out = Vec::new();
    for item in items(s) {
        match item.split_once("..") {
            Some((a, b)) => {
                let a: i64 = a.trim().parse().with_context(|| format!("bad range start in `{item}`"))?;
                let b: i64 = b.trim().parse().with_context(|| format!("bad range end in `{item}`"))?;
                if b < a {
                    bail!("empty range `{item}`");
                }
                out.extend(a..=b);
            }
            None => out.push(item.parse().with_context(|| format!("`{item}` is not an integer"))?),
        }
    }
    if out.is_empty() {
        bail!("empty list `{s}`");
    }
    Ok(out)
}

/// Nonnegative integers, as used for term counts and coefficient indices.
pub fn usize_list(s: &str) -> Result<Vec<usize>> {
    int_list(s)?
        .into_iter()
        .map(|v| usize::try_from(v).map_err(|_| anyhow!("negative value {v} in `{s}`")))
        .collect()
}

/// Exact rationals from values, integer ranges and `lo..hi:count` grids.
pub fn rational_list(s: &str) -> Result<Vec<Rational>> {
    let mut out = Vec::new();
    for item in items(s) {
        if let Some((range, count)) = item.rsplit_once(':') {
            let (lo, hi) = range.split_once("..").ok_or_else(|| anyhow!("`{item}` should read lo..hi:count"))?;
            let count: usize = count.trim().parse().with_context(|| format!("bad count in `{item}`"))?;
            if count == 0 {
                bail!("grid `{item}` has no points");
            }
            let (lo, hi) = (rational(lo)?, rational(hi)?);
            if hi < lo {
                bail!("empty grid `{item}`");
            }
            out.extend(linear_grid(&lo, &hi, count));
        } else if item.contains("..") {
            out.extend(int_list(item)?.into_iter().map(Rational::from));
        } else {
            out.push(rational(item)?);
        }
    }
    if out.is_empty() {
        bail!("empty list `{s}`");
    }
    Ok(out)
}

/// Real values at `bits` of precision.
pub fn float_list(s: &str, bits: u32) -> Result<Vec<Float>> {
    Ok(rational_list(s)?.into_iter().map(|q| Float::with_val(bits, q)).collect())
}

/// Complex values written `x`, `yi`, `x+yi` or `x-yi`.
pub fn complex_list(s: &str, bits: u32) -> Result<Vec<Complex>> {
    items(s).map(|item| complex(item, bits)).collect::<Result<Vec<_>>>().and_then(|v| {
        if v.is_empty() {
            bail!("empty list `{s}`")
        }
        Ok(v)
    })
}

fn complex(s: &str, bits: u32) -> Result<Complex> {
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex::with_val(bits, (rational(s)?, 0)));
    };
    // The split is at the last sign that does not start the string or an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (rational(&body[..i])?, imag_part(&body[i..])?),
        None => (Rational::new(), imag_part(body)?),
    };
    Ok(Complex::with_val(bits, (re, im)))
}

fn imag_part(s: &str) -> Result<Rational> {
    match s {
        "" | "+" => Ok(Rational::from(1)),
        "-" => Ok(Rational::from(-1)),
        _ => rational(s),
    }
}
