//! High-precision zero oracles and the sweeps that compare the expansions of
//! [`crate::asymp`] against them.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rayon::prelude::*;
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Rational};

use crate::asymp::{
    complex_bi_zero_estimate, optimal_truncation, theta_expand, zero_partial_sum, ZeroFamily, ZeroIndex,
};
use crate::coeffs::mcmahon_coeff;
use crate::error::{Error, Result};
use crate::report::{dec, fmt_rational, params, ratio_str, Record, Report, Status};
use crate::specfun::{
    airy_comb_deriv_eval, airy_comb_eval, airy_complex, cylinder_eval, modulus_phase_eval, Precision, ThetaTracker,
};

fn pi(b: u32) -> Float {
    Float::with_val(b, Constant::Pi)
}

fn ten_pow(b: u32, e: i32) -> Float {
    Float::with_val(b, 10).pow(e)
}

/// Safeguarded Newton iteration inside a sign-change bracket. `f` returns the
/// function value and, optionally, its derivative; without a derivative the
/// method reduces to bisection.
fn refine<F>(mut f: F, lo: Float, hi: Float, bits: u32) -> Result<Float>
where
    F: FnMut(&Float) -> Result<(Float, Option<Float>)>,
{
    let (mut lo, mut hi) = (lo, hi);
    let (flo, _) = f(&lo)?;
    let (fhi, _) = f(&hi)?;
    if flo.is_zero() {
        return Ok(lo);
    }
    if fhi.is_zero() {
        return Ok(hi);
    }
    if flo.cmp0() == fhi.cmp0() {
        return Err(Error::Numerical(format!(
            "no sign change on [{}, {}]",
            lo.to_f64(),
            hi.to_f64()
        )));
    }
    let lo_neg = flo.cmp0() == Some(Ordering::Less);
    let tol = Float::with_val(bits, 1) >> (bits as i32 - 6);
    let mut x = Float::with_val(bits, &lo + &hi) / 2u32;
    let mut last_width = Float::with_val(bits, &hi - &lo);
    let mut stalls = 0u32;
    for _ in 0..(4 * bits) {
        let (fx, dfx) = f(&x)?;
        if fx.is_zero() {
            return Ok(x);
        }
        if (fx.cmp0() == Some(Ordering::Less)) == lo_neg {
            lo = x.clone();
        } else {
            hi = x.clone();
        }
        let width = Float::with_val(bits, &hi - &lo);
        let scale = Float::with_val(bits, x.abs_ref()).max(&Float::with_val(bits, 1));
        if width <= Float::with_val(bits, &tol * &scale) {
            return Ok(x);
        }
        let newton = dfx.filter(|d| !d.is_zero()).map(|d| Float::with_val(bits, &x - &(fx / d)));
        let mid = Float::with_val(bits, &lo + &hi) / 2u32;
        let slow = width > Float::with_val(bits, &last_width * 0.5f64);
        stalls = if slow { stalls + 1 } else { 0 };
        let next = match newton {
            Some(n) if n > lo && n < hi && stalls < 3 => n,
            _ => {
                stalls = 0;
                mid
            }
        };
        let step = Float::with_val(bits, &next - &x).abs();
        last_width = width;
        x = next;
        if step <= Float::with_val(bits, &tol * &scale) {
            return Ok(x);
        }
    }
    Err(Error::Numerical(format!(
        "root refinement did not converge in [{}, {}]",
        lo.to_f64(),
        hi.to_f64()
    )))
}

fn oracle_prec(prec: Precision) -> Precision {
    prec.with_extra(8)
}

/// The `k`-th positive zero of `J_nu cos(pi alpha) + Y_nu sin(pi alpha)`,
/// found as the root of `theta_nu(x) = (k + alpha - 1/2) pi`.
pub fn oracle_cylinder_zero(nu: &Rational, alpha: &Rational, k: i64, prec: Precision) -> Result<Float> {
    if nu.clone().abs() >= Rational::from((3, 2)) {
        return Err(Error::UnsupportedOrder(format!("oracle needs |nu| < 3/2, got {}", nu.to_f64())));
    }
    let index = ZeroIndex::cylinder(nu, alpha, k, prec)?;
    let wp = oracle_prec(prec);
    let b = wp.bits();
    let target = pi(b) * Float::with_val(b, &index.kappa - Rational::from((1, 2)));
    let phase = |x: &Float| -> Result<(Float, Option<Float>)> {
        let pp = modulus_phase_eval(nu, x, wp)?;
        let m2 = Float::with_val(b, &pp.modulus * &pp.modulus);
        let d = Float::with_val(b, 2u32) / (m2 * x * pi(b));
        Ok((pp.phase - &target, Some(d)))
    };
    let guess = index.abscissa.to_f64().max(0.5);
    let mut lo = Float::with_val(b, (guess - 1.0).max(guess / 2.0));
    let mut hi = Float::with_val(b, guess + 1.0);
    while phase(&lo)?.0.cmp0() == Some(Ordering::Greater) {
        lo /= 2u32;
        if lo.to_f64() < 1e-30 {
            return Err(Error::Numerical("phase bracket collapsed towards zero".into()));
        }
    }
    while phase(&hi)?.0.cmp0() == Some(Ordering::Less) {
        hi += 1u32;
        if hi.to_f64() > crate::specfun::X_MAX {
            return Err(Error::Domain(format!("zero beyond x = {}", crate::specfun::X_MAX)));
        }
    }
    let x = refine(phase, lo, hi, b)?;
    Ok(Float::with_val(prec.bits(), x))
}

/// Zero of the cylinder function itself, by bisection on a sign change
/// within half a unit of `near`.
pub fn oracle_cylinder_zero_direct(nu: &Rational, alpha: &Rational, near: &Float, prec: Precision) -> Result<Float> {
    let wp = oracle_prec(prec);
    let b = wp.bits();
    let lo = Float::with_val(b, near - 0.5f64).max(&Float::with_val(b, 1e-6));
    let hi = Float::with_val(b, near + 0.5f64);
    let f = |x: &Float| -> Result<(Float, Option<Float>)> { Ok((cylinder_eval(nu, alpha, x, wp)?, None)) };
    let x = refine(f, lo, hi, b)?;
    Ok(Float::with_val(prec.bits(), x))
}

/// The `k`-th negative zero of `Ai cos(pi alpha) + Bi sin(pi alpha)`.
///
/// The root is bracketed by a sign change of the combination near
/// `-gamma^{2/3}` and its position in the zero sequence is confirmed from
/// the unwound phase of order 1/3.
pub fn oracle_airy_zero(alpha: &Rational, k: i64, prec: Precision) -> Result<Float> {
    let index = ZeroIndex::airy(alpha, k, prec)?;
    let wp = oracle_prec(prec);
    let b = wp.bits();
    let g = index.abscissa.to_f64().max(0.0);
    let x0 = -g.powf(2.0 / 3.0);
    let half = 0.5 * std::f64::consts::PI / x0.abs().max(1.0).sqrt();
    let sign = |x: f64| -> Result<Option<Ordering>> {
        Ok(airy_comb_eval(alpha, &Float::with_val(b, x), wp)?.cmp0())
    };
    let mut width = half;
    let (lo, hi) = loop {
        let lo = x0 - width;
        let hi = (x0 + width).min(0.0);
        if sign(lo)? != sign(hi)? {
            break (lo, hi);
        }
        width += half;
        if width > 8.0 * half + 3.0 {
            return Err(Error::Numerical(format!("no sign change of the Airy combination near {x0}")));
        }
    };
    let f = |x: &Float| -> Result<(Float, Option<Float>)> {
        Ok((airy_comb_eval(alpha, x, wp)?, Some(airy_comb_deriv_eval(alpha, x, wp)?)))
    };
    let x = refine(f, Float::with_val(b, lo), Float::with_val(b, hi), b)?;
    check_airy_position(alpha, k, &x)?;
    Ok(Float::with_val(prec.bits(), x))
}

fn check_airy_position(alpha: &Rational, k: i64, x: &Float) -> Result<()> {
    let z = x.to_f64().abs();
    if z == 0.0 {
        return Err(Error::Numerical("Airy root at the origin".into()));
    }
    let zeta = Float::with_val(128, 2.0 / 3.0 * z.powf(1.5));
    let pp = modulus_phase_eval(&Rational::from((1, 3)), &zeta, Precision::new(20)?)?;
    let m = pp.phase.to_f64() / std::f64::consts::PI + alpha.to_f64() + 2.0 / 3.0;
    if (m - k as f64).abs() > 0.25 {
        return Err(Error::Numerical(format!(
            "root {} is not zero number {k} (phase count {m:.3})",
            x.to_f64()
        )));
    }
    Ok(())
}

/// Complex zero of `Bi` in the upper half-plane near `e^{i pi/3} T(w_k)`.
pub fn oracle_complex_bi_zero(k: i64, prec: Precision) -> Result<Complex> {
    let wp = oracle_prec(prec);
    let b = wp.bits();
    let seed_terms = {
        let w = crate::asymp::bi_zero_argument(k, prec)?;
        let r = Float::with_val(64, w.real().hypot_ref(w.imag()));
        optimal_truncation(&r).min(6)
    };
    let mut z = Complex::with_val(b, complex_bi_zero_estimate(k, seed_terms, wp)?.value);
    let tol = Float::with_val(b, 1) >> (prec.bits() as i32 + 8);
    for _ in 0..200 {
        let v = airy_complex(&z, wp)?;
        let dz = Complex::with_val(b, &v.bi / &v.bi_prime);
        z -= &dz;
        let step = Float::with_val(b, dz.real().hypot_ref(dz.imag()));
        let size = Float::with_val(b, z.real().hypot_ref(z.imag()));
        if step <= Float::with_val(b, &tol * &size) {
            let res = airy_complex(&z, wp)?.bi;
            let r = Float::with_val(b, res.real().hypot_ref(res.imag()));
            if r > ten_pow(b, 5 - prec.digits() as i32) {
                return Err(Error::Numerical(format!("residual {} after Newton", r.to_f64())));
            }
            if z.imag().cmp0() == Some(Ordering::Less) {
                z = z.conj();
            }
            return Ok(Complex::with_val(prec.bits(), z));
        }
    }
    Err(Error::Numerical(format!("Newton for complex Bi zero k = {k} did not converge")))
}

/// `count` equally spaced rationals from `lo` to `hi` inclusive.
pub fn linear_grid(lo: &Rational, hi: &Rational, count: usize) -> Vec<Rational> {
    match count {
        0 => Vec::new(),
        1 => vec![lo.clone()],
        _ => (0..count)
            .map(|i| {
                let t = Rational::from((i as i64, (count - 1) as i64));
                lo + Rational::from(hi - lo) * t
            })
            .collect(),
    }
}

/// Grid of indices for an envelope sweep.
#[derive(Clone, Debug)]
pub struct EnvelopeGrid {
    pub nus: Vec<Rational>,
    pub alphas: Vec<Rational>,
    pub ks: Vec<i64>,
    pub terms: Vec<usize>,
}

fn grid_map(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn list_rat(v: &[Rational]) -> String {
    v.iter().map(fmt_rational).collect::<Vec<_>>().join(",")
}

fn list<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn slack(prec: Precision, b: u32) -> Float {
    ten_pow(b, -(prec.digits() as i32 - 10))
}

fn noise(prec: Precision, scale: &Float, b: u32) -> Float {
    let s = Float::with_val(b, scale.abs_ref()).max(&Float::with_val(b, 1));
    ten_pow(b, -(prec.digits() as i32 - 5)) * s
}

fn error_record(p: BTreeMap<String, String>, e: &Error) -> Record {
    let status = match e {
        Error::Index(_) | Error::Hypothesis(_) | Error::Domain(_) | Error::UnsupportedOrder(_) => Status::Skipped,
        _ => Status::Error,
    };
    Record::new(p, status).with_note(e.to_string())
}

/// Checks the envelope property of the zero expansions: for each `N` the
/// error of the `N`-term sum has the sign of the first neglected term and
/// does not exceed it in magnitude.
pub fn verify_envelope(family: ZeroFamily, grid: &EnvelopeGrid, prec: Precision) -> Report {
    let mut points: Vec<(Option<Rational>, Rational, i64)> = Vec::new();
    match family {
        ZeroFamily::Cylinder => {
            for nu in &grid.nus {
                for a in &grid.alphas {
                    for &k in &grid.ks {
                        points.push((Some(nu.clone()), a.clone(), k));
                    }
                }
            }
        }
        _ => {
            for a in &grid.alphas {
                for &k in &grid.ks {
                    points.push((None, a.clone(), k));
                }
            }
        }
    }
    let parts: Vec<Vec<Record>> = points
        .par_iter()
        .map(|(nu, a, k)| envelope_point(family, nu.as_ref(), a, *k, &grid.terms, prec))
        .collect();
    let mut g = vec![
        ("family", format!("{family:?}").to_lowercase()),
        ("alpha", list_rat(&grid.alphas)),
        ("k", list(&grid.ks)),
        ("terms", list(&grid.terms)),
        ("precision", prec.digits().to_string()),
    ];
    if family == ZeroFamily::Cylinder {
        g.push(("nu", list_rat(&grid.nus)));
    }
    Report::new("envelope", grid_map(&g), parts.into_iter().flatten().collect())
}

fn envelope_point(
    family: ZeroFamily,
    nu: Option<&Rational>,
    alpha: &Rational,
    k: i64,
    terms: &[usize],
    prec: Precision,
) -> Vec<Record> {
    let base = |n: Option<usize>| {
        let mut p = params([("alpha", fmt_rational(alpha)), ("k", k.to_string())]);
        if let Some(nu) = nu {
            p.insert("nu".into(), fmt_rational(nu));
        }
        p.insert("N".into(), n.map_or("all".into(), |n| n.to_string()));
        p
    };
    let index = match family {
        ZeroFamily::Cylinder => {
            let nu = nu.expect("cylinder sweep needs an order");
            if nu.clone().abs() >= Rational::from((1, 2)) {
                return vec![Record::new(base(None), Status::Skipped).with_note("|nu| >= 1/2 is outside the theorem")];
            }
            ZeroIndex::cylinder(nu, alpha, k, prec)
        }
        _ => ZeroIndex::airy(alpha, k, prec),
    };
    let index = match index {
        Ok(i) => i,
        Err(e) => return vec![error_record(base(None), &e)],
    };
    if index.abscissa.cmp0() != Some(Ordering::Greater) {
        return vec![Record::new(base(None), Status::Skipped).with_note(format!(
            "abscissa {} is not positive; the envelope theorem does not apply",
            index.abscissa.to_f64()
        ))];
    }
    let oracle = match family {
        ZeroFamily::Cylinder => oracle_cylinder_zero(nu.unwrap(), alpha, k, prec),
        _ => oracle_airy_zero(alpha, k, prec),
    };
    let oracle = match oracle {
        Ok(o) => o,
        Err(e) => return vec![error_record(base(None), &e)],
    };
    let b = prec.with_extra(10).bits();
    let floor = noise(prec, &oracle, b);
    let sl = slack(prec, b);
    terms
        .iter()
        .map(|&n| {
            let p = base(Some(n));
            let (s, term) = match zero_partial_sum(&index, n, prec) {
                Ok(v) => v,
                Err(e) => return error_record(p, &e),
            };
            let (s1, _) = match zero_partial_sum(&index, n + 1, prec) {
                Ok(v) => v,
                Err(e) => return error_record(p, &e),
            };
            let err = Float::with_val(b, &oracle - &s);
            let abs_err = Float::with_val(b, err.abs_ref());
            let abs_term = Float::with_val(b, term.abs_ref());
            let sign_ok = if abs_err > Float::with_val(b, &floor * 10u32) { err.cmp0() == term.cmp0() } else { true };
            let bound_ok = abs_err <= Float::with_val(b, &abs_term + &sl);
            let (lo, hi) = if s <= s1 { (&s, &s1) } else { (&s1, &s) };
            let mut r = Record::new(p, Status::Pass);
            r.oracle = Some(dec(&oracle));
            r.estimate = Some(dec(&s));
            r.lo = Some(dec(lo));
            r.hi = Some(dec(hi));
            r.bound = Some(dec(&abs_term));
            r.error = Some(dec(&err));
            if !abs_term.is_zero() {
                r.ratio = Some(ratio_str(&Float::with_val(b, &abs_err / &abs_term)));
            }
            r.sign_ok = Some(sign_ok);
            r.bound_ok = Some(bound_ok);
            r.judge()
        })
        .collect()
}

/// Compares the truncated phase expansion with the oracle phase at each `z`
/// and each number of terms. Real points also check the sign of the
/// remainder; complex points only the (sector-scaled) bound.
pub fn verify_remainder_bounds(nu: &Rational, z_grid: &[Complex], terms: &[usize], prec: Precision) -> Report {
    let parts: Vec<Vec<Record>> = z_grid.par_iter().map(|z| remainder_point(nu, z, terms, prec)).collect();
    let zs: Vec<String> = z_grid.iter().map(|z| crate::specfun::complex_to_decimal(z, 8)).collect();
    let g = grid_map(&[
        ("nu", fmt_rational(nu)),
        ("z", zs.join(";")),
        ("terms", list(terms)),
        ("precision", prec.digits().to_string()),
    ]);
    Report::new("remainder", g, parts.into_iter().flatten().collect())
}

/// Oracle value of `theta_nu(z)`: the unwound real phase on the positive
/// axis, the continued complex phase elsewhere.
pub fn oracle_theta(nu: &Rational, z: &Complex, prec: Precision) -> Result<Complex> {
    let wp = oracle_prec(prec);
    let b = wp.bits();
    if z.imag().is_zero() {
        let pp = modulus_phase_eval(nu, z.real(), wp)?;
        return Ok(Complex::with_val(b, (pp.phase, 0)));
    }
    let mut tr = ThetaTracker::new(nu, wp)?;
    let (big, _) = tr.eval(z)?;
    let shift = pi(b) * Float::with_val(b, Rational::from(nu / 2u32) + Rational::from((1, 4)));
    Ok(Complex::with_val(b, &big - &shift))
}

fn remainder_point(nu: &Rational, z: &Complex, terms: &[usize], prec: Precision) -> Vec<Record> {
    let zs = crate::specfun::complex_to_decimal(z, 12);
    let base = |n: usize| params([("nu", fmt_rational(nu)), ("z", zs.clone()), ("N", n.to_string())]);
    let oracle = match oracle_theta(nu, z, prec) {
        Ok(o) => o,
        Err(e) => return terms.iter().map(|&n| error_record(base(n), &e)).collect(),
    };
    let b = prec.with_extra(10).bits();
    let mag = Float::with_val(b, oracle.real().hypot_ref(oracle.imag()));
    let floor = noise(prec, &mag, b);
    let sl = slack(prec, b);
    let real_axis = z.imag().is_zero();
    terms
        .iter()
        .map(|&n| {
            let p = base(n);
            let v = match theta_expand(nu, z, n, prec) {
                Ok(v) => v,
                Err(e) => return error_record(p, &e),
            };
            let err = Complex::with_val(b, &oracle - &v.value);
            let abs_err = Float::with_val(b, err.real().hypot_ref(err.imag()));
            let bound_ok = abs_err <= Float::with_val(b, &v.bound + &sl);
            let sign_ok = if real_axis && abs_err > Float::with_val(b, &floor * 10u32) {
                Some(err.real().cmp0() == v.remainder_sign)
            } else if real_axis {
                Some(true)
            } else {
                None
            };
            let mut r = Record::new(p, Status::Pass);
            r.oracle = Some(crate::specfun::complex_to_decimal(&oracle, crate::report::REPORT_DIGITS));
            r.estimate = Some(crate::specfun::complex_to_decimal(&v.value, crate::report::REPORT_DIGITS));
            r.bound = Some(dec(&v.bound));
            r.error = Some(if real_axis { dec(err.real()) } else { dec(&abs_err) });
            if !v.bound.is_zero() {
                r.ratio = Some(ratio_str(&Float::with_val(b, &abs_err / &v.bound)));
            }
            r.sign_ok = sign_ok;
            r.bound_ok = Some(bound_ok);
            r.judge()
        })
        .collect()
}

/// Checks `beta < j` and the two-sided three-term inequality for the zeros
/// of `J_nu`.
pub fn verify_classical_bounds(nu_grid: &[Rational], ks: &[i64], prec: Precision) -> Report {
    let points: Vec<(Rational, i64)> =
        nu_grid.iter().flat_map(|nu| ks.iter().map(move |&k| (nu.clone(), k))).collect();
    let records: Vec<Record> = points.par_iter().map(|(nu, k)| classical_point(nu, *k, prec)).collect();
    let g = grid_map(&[
        ("nu", list_rat(nu_grid)),
        ("k", list(ks)),
        ("alpha", "0".into()),
        ("precision", prec.digits().to_string()),
    ]);
    Report::new("classical", g, records)
}

/// The classical lower and upper bounds `(beta - a/beta - b/beta^3, beta - a/beta)`
/// with `a = (4 nu^2 - 1)/8` and `b = (4 nu^2 - 1)(28 nu^2 - 31)/384`.
pub fn classical_bounds(nu: &Rational, beta: &Float) -> (Float, Float) {
    let b = beta.prec();
    let mu = Rational::from(nu * nu);
    let four = Rational::from(&mu * 4u32) - 1u32;
    let a = Rational::from(&four / 8u32);
    let c = (&four * (Rational::from(&mu * 28u32) - 31u32)) / 384u32;
    let upper = Float::with_val(b, beta - Float::with_val(b, a) / beta);
    let b3 = Float::with_val(b, beta.pow(3u32));
    let lower = Float::with_val(b, &upper - Float::with_val(b, c) / b3);
    (lower, upper)
}

fn classical_point(nu: &Rational, k: i64, prec: Precision) -> Record {
    let p = params([("nu", fmt_rational(nu)), ("k", k.to_string())]);
    if nu.clone().abs() >= Rational::from((1, 2)) {
        return Record::new(p, Status::Skipped).with_note("|nu| >= 1/2 is outside the classical results");
    }
    let zero = Rational::new();
    let index = match ZeroIndex::cylinder(nu, &zero, k, prec) {
        Ok(i) => i,
        Err(e) => return error_record(p, &e),
    };
    let j = match oracle_cylinder_zero(nu, &zero, k, prec) {
        Ok(j) => j,
        Err(e) => return error_record(p, &e),
    };
    let b = prec.with_extra(10).bits();
    let beta = Float::with_val(b, &index.abscissa);
    let (lower, upper) = classical_bounds(nu, &beta);
    let mut r = Record::new(p, Status::Pass);
    r.oracle = Some(dec(&j));
    r.estimate = Some(dec(&beta));
    r.lo = Some(dec(&lower));
    r.hi = Some(dec(&upper));
    r.error = Some(dec(&Float::with_val(b, &j - &beta)));
    r.sign_ok = Some(beta < j);
    r.bound_ok = Some(lower < j && j < upper);
    r.judge()
}

/// Orders used for the cylinder representation check in the identity suite.
pub fn identity_orders() -> Vec<Rational> {
    vec![Rational::new(), Rational::from((1, 3)), Rational::from((-2, 5)), Rational::from((6, 5))]
}

/// Residuals of the modulus-phase representations of the cylinder
/// functions and of the Airy combination and its derivative.
pub fn verify_identities(z_grid: &[Float], alpha_grid: &[Rational], prec: Precision) -> Report {
    let mut points = Vec::new();
    for z in z_grid {
        for a in alpha_grid {
            points.push((z.clone(), a.clone()));
        }
    }
    let parts: Vec<Vec<Record>> = points.par_iter().map(|(z, a)| identity_point(z, a, prec)).collect();
    let zs: Vec<String> = z_grid.iter().map(dec).collect();
    let g = grid_map(&[
        ("z", zs.join(",")),
        ("alpha", list_rat(alpha_grid)),
        ("nu", list_rat(&identity_orders())),
        ("precision", prec.digits().to_string()),
    ]);
    Report::new("identities", g, parts.into_iter().flatten().collect())
}

fn identity_record(kind: &str, z: &Float, alpha: &Rational, extra: Option<&Rational>, lhs: &Float, rhs: &Float, amp: &Float, prec: Precision) -> Record {
    let b = lhs.prec().max(rhs.prec());
    let mut p = params([("identity", kind.to_string()), ("z", dec(z)), ("alpha", fmt_rational(alpha))]);
    if let Some(nu) = extra {
        p.insert("nu".into(), fmt_rational(nu));
    }
    let diff = Float::with_val(b, lhs - rhs).abs();
    let amp = Float::with_val(b, amp.abs_ref()).max(&Float::with_val(b, 1e-300));
    let res = Float::with_val(b, &diff / &amp);
    let mut r = Record::new(p, Status::Pass);
    r.oracle = Some(dec(lhs));
    r.estimate = Some(dec(rhs));
    r.error = Some(dec(&res));
    r.bound = Some(dec(&ten_pow(b, -(prec.digits() as i32 - 5))));
    r.bound_ok = Some(res < ten_pow(b, -(prec.digits() as i32 - 5)));
    r.judge()
}

fn identity_point(z: &Float, alpha: &Rational, prec: Precision) -> Vec<Record> {
    let mut out = Vec::new();
    let wp = prec.with_extra(5);
    let b = wp.bits();
    let pa = pi(b) * Float::with_val(b, alpha);
    let fail = |kind: &str, e: Error| {
        error_record(params([("identity", kind.to_string()), ("z", dec(z)), ("alpha", fmt_rational(alpha))]), &e)
    };

    for nu in identity_orders() {
        let r = (|| -> Result<Record> {
            let c = cylinder_eval(&nu, alpha, z, wp)?;
            let pp = modulus_phase_eval(&nu, z, wp)?;
            let rhs = Float::with_val(b, &pp.modulus * Float::with_val(b, &pp.phase - &pa).cos());
            Ok(identity_record("cylinder", z, alpha, Some(&nu), &c, &rhs, &pp.modulus, prec))
        })();
        out.push(r.unwrap_or_else(|e| fail("cylinder", e)));
    }

    let airy = (|| -> Result<Vec<Record>> {
        let x = Float::with_val(b, -z.clone());
        let zeta = Float::with_val(b, z.clone().pow(Float::with_val(b, 1.5f64))) * 2u32 / 3u32;
        let third = Rational::from((1, 3));
        let p1 = modulus_phase_eval(&third, &zeta, wp)?;
        let lhs = airy_comb_eval(alpha, &x, wp)?;
        let amp = Float::with_val(b, Float::with_val(b, z / 3u32).sqrt() * &p1.modulus);
        let sixth = pi(b) / 6u32;
        let rhs = Float::with_val(b, &amp * (Float::with_val(b, &p1.phase + &pa) + &sixth).cos());
        let r1 = identity_record("airy_phase", z, alpha, None, &lhs, &rhs, &amp, prec);
        let two_thirds_pi = pi(b) * 2u32 / 3u32;
        let rhs2 = Float::with_val(b, &amp * (Float::with_val(b, &p1.phase + &two_thirds_pi) + &pa).sin());
        let r2 = identity_record("airy_remark", z, alpha, None, &lhs, &rhs2, &amp, prec);
        let p2 = modulus_phase_eval(&Rational::from((2, 3)), &zeta, wp)?;
        let dl = airy_comb_deriv_eval(alpha, &x, wp)?;
        let sqrt3 = Float::with_val(b, 3).sqrt();
        let n = Float::with_val(b, -&x) / sqrt3 * &p2.modulus;
        let rhs3 = Float::with_val(b, &n * Float::with_val(b, &p2.phase + pi(b) / 3u32 + &pa).sin());
        let r3 = identity_record("airy_derivative", z, alpha, None, &dl, &rhs3, &n, prec);
        Ok(vec![r1, r2, r3])
    })();
    match airy {
        Ok(v) => out.extend(v),
        Err(e) => out.push(fail("airy", e)),
    }
    out
}

/// Records the sign of `(-1)^n c_n(nu)` for orders with `1/2 < |nu| < sqrt(217)/14`.
/// Observations only; no verdict is attached.
pub fn sweep_conjecture_region(nu_grid: &[Rational], n_max: usize) -> Report {
    let upper = Rational::from((217, 196));
    let quarter = Rational::from((1, 4));
    let mut records = Vec::new();
    for nu in nu_grid {
        let mu = Rational::from(nu * nu);
        if mu <= quarter || mu >= upper {
            records.push(
                Record::new(params([("nu", fmt_rational(nu)), ("n", "all".into())]), Status::Skipped)
                    .with_note("order outside the open interval (1/2, sqrt(217)/14)"),
            );
            continue;
        }
        for n in 1..=n_max {
            let c = mcmahon_coeff(n).eval(nu);
            let signed = if n % 2 == 0 { c.clone() } else { -c.clone() };
            let mut r = Record::new(params([("nu", fmt_rational(nu)), ("n", n.to_string())]), Status::Info);
            r.estimate = Some(dec(&Float::with_val(128, &c)));
            r.sign_ok = Some(signed.cmp0() == Ordering::Greater);
            records.push(r);
        }
    }
    let g = grid_map(&[("nu", list_rat(nu_grid)), ("n_max", n_max.to_string())]);
    Report::new("conjecture", g, records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(d: u32) -> Precision {
        Precision::new(d).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn linear_grid_is_exact() {
        let g = linear_grid(&q(-9, 20), &q(9, 20), 7);
        assert_eq!(g.len(), 7);
        assert_eq!(g[1], q(-3, 10));
        assert_eq!(g[3], q(0, 1));
        assert_eq!(g[6], q(9, 20));
    }

    #[test]
    fn cylinder_oracle_examples() {
        let j = oracle_cylinder_zero(&q(0, 1), &q(0, 1), 1, p(30)).unwrap();
        assert!((j.to_f64() - 2.404_825_557_695_773).abs() < 1e-14);
        let j = oracle_cylinder_zero(&q(1, 2), &q(0, 1), 1, p(40)).unwrap();
        let d = Float::with_val(200, &j - pi(200)).abs().to_f64();
        assert!(d < 1e-36, "{d}");
        let j = oracle_cylinder_zero(&q(-1, 2), &q(1, 2), 1, p(40)).unwrap();
        let d = Float::with_val(200, &j - pi(200)).abs().to_f64();
        assert!(d < 1e-36, "{d}");
    }

    #[test]
    fn direct_root_agrees_with_phase_root() {
        let prec = p(40);
        for (nu, a, k) in [(q(0, 1), q(0, 1), 3), (q(1, 3), q(1, 4), 2), (q(-2, 5), q(3, 4), 5)] {
            let j = oracle_cylinder_zero(&nu, &a, k, prec).unwrap();
            let d = oracle_cylinder_zero_direct(&nu, &a, &j, prec).unwrap();
            let diff = Float::with_val(200, &j - &d).abs().to_f64();
            assert!(diff < 1e-32, "nu={nu} diff={diff}");
        }
    }

    #[test]
    fn cylinder_zeros_increase_with_k() {
        let prec = p(25);
        let mut last = 0.0;
        for k in 1..8 {
            let j = oracle_cylinder_zero(&q(1, 5), &q(1, 4), k, prec).unwrap().to_f64();
            assert!(j > last);
            last = j;
        }
    }

    #[test]
    fn airy_oracle_examples() {
        let prec = p(30);
        let a = oracle_airy_zero(&q(0, 1), 1, prec).unwrap();
        assert!((a.to_f64() + 2.338_107_410_459_767).abs() < 1e-14);
        let b = oracle_airy_zero(&q(1, 2), 1, prec).unwrap();
        assert!((b.to_f64() + 1.173_713_222_709_128).abs() < 1e-14);
        let c = oracle_airy_zero(&q(1, 4), 1, prec).unwrap();
        let v = airy_comb_eval(&q(1, 4), &c, prec).unwrap();
        assert!(v.to_f64().abs() < 1e-25);
        let a3 = oracle_airy_zero(&q(0, 1), 3, prec).unwrap();
        assert!((a3.to_f64() + 5.520_559_828_095_551).abs() < 1e-13);
        assert!(matches!(oracle_airy_zero(&q(9, 10), 1, prec), Err(Error::Index(_))));
    }

    #[test]
    fn complex_bi_zero_residual_and_symmetry() {
        let prec = p(30);
        let z = oracle_complex_bi_zero(1, prec).unwrap();
        assert!(z.imag().to_f64() > 0.0);
        let v = airy_complex(&z, prec).unwrap();
        assert!(Float::with_val(120, v.bi.real().hypot_ref(v.bi.imag())).to_f64() < 1e-25);
        let c = airy_complex(&z.clone().conj(), prec).unwrap();
        assert!(Float::with_val(120, c.bi.real().hypot_ref(c.bi.imag())).to_f64() < 1e-25);
        // First complex zero of Bi in the upper half-plane.
        assert!((z.real().to_f64() - 1.173_713_222_709_128).abs() > 0.1);
        assert!(z.real().to_f64() > 0.0 && z.imag().to_f64() > 1.0);
    }

    #[test]
    fn envelope_small_sweep() {
        let grid = EnvelopeGrid { nus: vec![q(0, 1), q(-1, 4)], alphas: vec![q(0, 1), q(1, 2)], ks: vec![0, 1, 2], terms: vec![1, 2, 3] };
        let r = verify_envelope(ZeroFamily::Cylinder, &grid, p(30));
        assert_eq!(r.summary.fail, 0, "{:?}", r.records.iter().filter(|r| r.status == Status::Fail).collect::<Vec<_>>());
        assert_eq!(r.summary.errors, 0);
        assert!(r.summary.skipped > 0);
        assert!(r.worst_ratio().unwrap() <= 1.0);
    }

    #[test]
    fn remainder_examples() {
        let z = vec![Complex::with_val(100, (5, 0)), Complex::with_val(100, (3, 2)), Complex::with_val(100, (1, 2))];
        for nu in [q(0, 1), q(7, 5), q(3, 2)] {
            let r = verify_remainder_bounds(&nu, &z, &[1, 2, 3, 4], p(30));
            assert_eq!(r.summary.fail + r.summary.errors, 0, "nu={nu}: {:?}", r.records);
        }
    }

    #[test]
    fn classical_first_zero() {
        let r = verify_classical_bounds(&[q(0, 1), q(3, 10), q(-49, 100)], &[1, 2, 5], p(30));
        assert_eq!(r.summary.pass, 9);
        let (lo, hi) = classical_bounds(&q(0, 1), &Float::with_val(100, 3.0 * std::f64::consts::PI / 4.0));
        assert!((lo.to_f64() - 2.403_074_5).abs() < 1e-7);
        assert!((hi.to_f64() - 2.409_246_1).abs() < 1e-7);
    }

    #[test]
    fn identities_hold() {
        let zs = vec![Float::with_val(100, 2), Float::with_val(100, 0.5)];
        let r = verify_identities(&zs, &[q(0, 1), q(1, 2)], p(30));
        assert_eq!(r.summary.fail + r.summary.errors, 0, "{:?}", r.records);
    }

    #[test]
    fn conjecture_sweep_records_signs() {
        let r = sweep_conjecture_region(&[q(4, 5), q(51, 100), q(2, 5)], 6);
        assert_eq!(r.summary.skipped, 1);
        assert_eq!(r.summary.info, 12);
        assert!(r.records.iter().filter(|r| r.status == Status::Info).all(|r| r.sign_ok == Some(true)));
        assert!(mcmahon_coeff(2).eval_mu(&q(31, 28)).cmp0() == Ordering::Equal);
    }
}
