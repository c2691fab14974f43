//! Coefficients recovered from their integral representations along the
//! imaginary axis, by Gauss-Legendre panel quadrature.
//!
//! `t_n` integrates `Re Theta_nu(i s)`, `c_n` integrates `Re X_nu(i s)` where
//! `X_nu` is obtained by inverting `Theta_nu` with Newton's method, and `T_n`
//! integrates `Im(e^{-i pi/3} T(i s))` with `T(w) = ((3/2) X_{1/3}((2/3) w))^{2/3}`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use rayon::prelude::*;
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Rational};
use serde::{Deserialize, Serialize};

use crate::coeffs::{airy_coeff, mcmahon_coeff, phase_coeff};
use crate::error::{Error, Result};
use crate::report::{dec, fmt_rational, params, ratio_str, Record, Report, Status};
use crate::specfun::{theta_imag_axis, Precision, ThetaTracker};

/// Safety factor applied to the leading-order tail estimate.
pub const TAIL_SAFETY: f64 = 1e3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSettings {
    /// Gauss-Legendre points per panel.
    pub order: usize,
    /// Panels covering `[0, s_max]` (after the graded panels near the origin).
    pub panels: usize,
    /// Initial truncation point of the integrals.
    pub s_max: f64,
    pub precision: Precision,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings { order: 20, panels: 40, s_max: 40.0, precision: Precision::new(40).unwrap() }
    }
}

impl QuadratureSettings {
    pub fn with_precision(precision: Precision) -> Self {
        QuadratureSettings { precision, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.panels < 8 {
            return Err(Error::Config(format!("need at least 8 panels, got {}", self.panels)));
        }
        if self.order < 4 {
            return Err(Error::Config(format!("panel rule order {} is below 4", self.order)));
        }
        if !(self.s_max.is_finite() && self.s_max >= 8.0 && self.s_max <= 90.0) {
            return Err(Error::Config(format!("s_max = {} outside [8, 90]", self.s_max)));
        }
        Ok(())
    }

    fn tolerance(&self, b: u32) -> Float {
        Float::with_val(b, 10).pow(-((self.precision.digits() / 2) as i32))
    }
}

/// Which coefficient family a quadrature reproduces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoeffKind {
    /// `t_n(nu)`.
    Phase,
    /// `c_n(nu)`.
    Mcmahon,
    /// `T_n`.
    Airy,
}

impl std::str::FromStr for CoeffKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t" | "phase" => Ok(CoeffKind::Phase),
            "c" | "mcmahon" => Ok(CoeffKind::Mcmahon),
            "T" | "airy" => Ok(CoeffKind::Airy),
            _ => Err(Error::Config(format!("unknown coefficient family '{s}' (expected t, c or T)"))),
        }
    }
}

impl CoeffKind {
    pub fn symbol(self) -> &'static str {
        match self {
            CoeffKind::Phase => "t",
            CoeffKind::Mcmahon => "c",
            CoeffKind::Airy => "T",
        }
    }
}

#[derive(Clone, Debug)]
pub struct QuadResult {
    pub n: usize,
    pub value: Float,
    /// Difference from a half-order rule on the same panels plus the tail estimate.
    pub error_estimate: Float,
    pub tail_estimate: Float,
    /// Truncation point actually used.
    pub s_max: f64,
    /// Change in the value when the truncation point is doubled.
    pub doubling_delta: Float,
    /// Samples whose integrand sign contradicts the expected constant sign.
    pub sign_violations: usize,
    pub samples: usize,
}

fn gauss_legendre(order: usize, bits: u32) -> std::sync::Arc<(Vec<Float>, Vec<Float>)> {
    type Key = (usize, u32);
    static CACHE: OnceLock<Mutex<HashMap<Key, std::sync::Arc<(Vec<Float>, Vec<Float>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().unwrap().get(&(order, bits)) {
        return v.clone();
    }
    let wb = bits + 32;
    let m = order;
    let mut xs = Vec::with_capacity(m);
    let mut ws = Vec::with_capacity(m);
    let tol = Float::with_val(wb, 1) >> (bits as i32 + 4);
    for i in 1..=m {
        let guess = (std::f64::consts::PI * (i as f64 - 0.25) / (m as f64 + 0.5)).cos();
        let mut x = Float::with_val(wb, guess);
        let mut dp = Float::new(wb);
        for _ in 0..200 {
            let (p, d) = legendre(m, &x, wb);
            let dx = Float::with_val(wb, &p / &d);
            x -= &dx;
            dp = d;
            if dx.abs() < tol {
                let (_, d) = legendre(m, &x, wb);
                dp = d;
                break;
            }
        }
        let one_minus = Float::with_val(wb, 1u32) - Float::with_val(wb, &x * &x);
        let w = Float::with_val(wb, 2u32) / (one_minus * Float::with_val(wb, &dp * &dp));
        xs.push(Float::with_val(bits, x));
        ws.push(Float::with_val(bits, w));
    }
    let v = std::sync::Arc::new((xs, ws));
    cache.lock().unwrap().insert((order, bits), v.clone());
    v
}

fn legendre(m: usize, x: &Float, b: u32) -> (Float, Float) {
    let mut p0 = Float::with_val(b, 1);
    let mut p1 = x.clone();
    for k in 2..=m {
        let a = Float::with_val(b, x * &p1) * (2 * k - 1) as u32;
        let p2 = (a - Float::with_val(b, &p0 * (k - 1) as u32)) / k as u32;
        p0 = p1;
        p1 = p2;
    }
    let num = Float::with_val(b, x * &p1) - &p0;
    let den = Float::with_val(b, x * x) - 1u32;
    let d = num * m as u32 / den;
    (p1, d)
}

fn pi(b: u32) -> Float {
    Float::with_val(b, Constant::Pi)
}

fn cabs(z: &Complex, b: u32) -> Float {
    Float::with_val(b, z.real().hypot_ref(z.imag()))
}

/// Newton solver for `Theta_nu(z) = w`, reusing one phase tracker.
struct Inverter {
    nu: Rational,
    tracker: ThetaTracker,
    digits: u32,
}

impl Inverter {
    /// Working digits needed so that `Re X(w)`, which is of size
    /// `e^{-2 Im w}` near the imaginary axis, keeps `base` relative digits.
    fn digits_for(base: Precision, im: f64) -> u32 {
        base.digits() + (0.8686 * im.abs()).ceil() as u32 + 12
    }

    fn new(nu: &Rational, base: Precision, max_im: f64) -> Result<Self> {
        let digits = Self::digits_for(base, max_im);
        let tracker = ThetaTracker::new(nu, Precision::new(digits)?)?;
        Ok(Inverter { nu: nu.clone(), tracker, digits })
    }

    fn bits(&self) -> u32 {
        Precision::new(self.digits).map(|p| p.bits()).unwrap_or(64)
    }

    /// Asymptotic seed `w + sum c_n / w^{2n-1}`, nudged into `Re z > 0`.
    fn seed(&self, w: &Complex) -> Complex {
        let b = self.bits();
        let r = cabs(w, 64).to_f64();
        let terms = (r.round() as usize).clamp(1, 12);
        let inv = Complex::with_val(b, 1) / w;
        let inv2 = Complex::with_val(b, &inv * &inv);
        let mut pow = inv;
        let mut z = Complex::with_val(b, w);
        for n in 1..terms {
            let c = Float::with_val(b, mcmahon_coeff(n).eval(&self.nu));
            z += Complex::with_val(b, &pow * &c);
            pow *= &inv2;
        }
        let min_re = Float::with_val(b, -2.0 * w.imag().to_f64().abs()).exp()
            * (Float::with_val(b, &self.nu).cos_pi() / 2u32);
        if *z.real() < min_re {
            *z.mut_real() = min_re;
        }
        z
    }

    /// Solves from `seed`; returns `(z, Theta'(z))`.
    fn solve(&mut self, w: &Complex, seed: Complex) -> Result<(Complex, Complex)> {
        let b = self.bits();
        let w = Complex::with_val(b, w);
        let scale = cabs(&w, 64).to_f64().max(1.0);
        let tol = Float::with_val(b, scale) * Float::with_val(b, 10).pow(-(self.digits as i32 - 8));
        let mut z = Complex::with_val(b, seed);
        let mut trace = Vec::new();
        let mut last: Option<(Complex, Float, Complex)> = None;
        for _ in 0..80 {
            let (th, d) = self.tracker.eval(&z)?;
            let r = Complex::with_val(b, &th - &w);
            let res = cabs(&r, b);
            trace.push(res.to_f64());
            if res <= tol {
                return Ok((z, d));
            }
            if let Some((pz, pres, pdz)) = &last {
                if res >= *pres {
                    // Residual grew: retreat along the previous step.
                    let half = Complex::with_val(b, pdz / 2u32);
                    z = Complex::with_val(b, pz - &half);
                    last = Some((pz.clone(), pres.clone(), half));
                    if cabs(&last.as_ref().unwrap().2, 64).to_f64() < 1e-300 {
                        break;
                    }
                    continue;
                }
            }
            let mut dz = Complex::with_val(b, &r / &d);
            let mut cand = Complex::with_val(b, &z - &dz);
            let mut guard = 0;
            while cand.real().cmp0() != Some(Ordering::Greater) {
                dz /= 2u32;
                cand = Complex::with_val(b, &z - &dz);
                guard += 1;
                if guard > 200 {
                    return Err(Error::Numerical("Newton iterate left the right half-plane".into()));
                }
            }
            last = Some((z, res, dz));
            z = cand;
        }
        Err(Error::Numerical(format!(
            "Newton for X_nu(w) with w = {} did not converge; residuals {:?}",
            crate::specfun::complex_to_decimal(&w, 12),
            trace.iter().map(|r| format!("{r:.2e}")).collect::<Vec<_>>()
        )))
    }

    /// Solves for arbitrary `w` in the closed right half-plane: the
    /// asymptotic seed directly when `|w| >= 1`, otherwise by stepping
    /// along the ray from `|w| = 1` down to `w`.
    fn solve_fresh(&mut self, w: &Complex) -> Result<(Complex, Complex)> {
        let b = self.bits();
        let r = cabs(w, b);
        if r >= 1u32 {
            let s = self.seed(w);
            return self.solve(w, s);
        }
        if r.is_zero() {
            return Err(Error::Domain("invert_phase needs w != 0".into()));
        }
        let unit = Complex::with_val(b, w / &r);
        let (mut z, mut d) = {
            let s = self.seed(&unit);
            self.solve(&unit, s)?
        };
        let mut prev = unit.clone();
        let steps = 8;
        let rf = r.to_f64();
        for j in 1..=steps {
            let t = 1.0 - (1.0 - rf) * j as f64 / steps as f64;
            let wj = if j == steps { Complex::with_val(b, w) } else { Complex::with_val(b, &unit * t) };
            let seed = Complex::with_val(b, &z + Complex::with_val(b, &wj - &prev) / &d);
            let (zj, dj) = self.solve(&wj, seed)?;
            z = zj;
            d = dj;
            prev = wj;
        }
        Ok((z, d))
    }
}

fn check_inverse_order(nu: &Rational) -> Result<()> {
    if nu.clone().abs() >= Rational::from((1, 2)) {
        return Err(Error::Domain(format!("inversion needs |nu| < 1/2, got {}", nu.to_f64())));
    }
    Ok(())
}

/// `X_nu(w)`: the `z` with `Re z > 0` and `Theta_nu(z) = w`, for `Re w >= 0`.
pub fn invert_phase(nu: &Rational, w: &Complex, settings: &QuadratureSettings) -> Result<Complex> {
    check_inverse_order(nu)?;
    if w.real().cmp0() == Some(Ordering::Less) || w.real().is_nan() || w.imag().is_nan() {
        return Err(Error::Domain("invert_phase needs Re w >= 0".into()));
    }
    let mut inv = Inverter::new(nu, settings.precision, w.imag().to_f64())?;
    let (z, _) = inv.solve_fresh(w)?;
    Ok(z)
}

/// Integration variable `x` with `s = x^power`.
#[derive(Clone, Copy)]
struct Layout {
    power: u32,
    /// Geometric panels towards the origin.
    graded: bool,
    /// Decay rate `lambda` of the integrand, `~ e^{-lambda s}`.
    rate: f64,
}

impl CoeffKind {
    fn layout(self) -> Layout {
        match self {
            CoeffKind::Phase => Layout { power: 1, graded: true, rate: 2.0 },
            CoeffKind::Mcmahon => Layout { power: 1, graded: false, rate: 2.0 },
            CoeffKind::Airy => Layout { power: 3, graded: false, rate: 4.0 / 3.0 },
        }
    }

    /// Truncation in `s` before any extension; the Airy integrand decays
    /// with `(2/3) s` in place of `s`.
    fn initial_s(self, s_max: f64) -> f64 {
        match self {
            CoeffKind::Airy => 1.5 * s_max,
            _ => s_max,
        }
    }

    /// Exponent `p` in the weight `s^p`.
    fn power_of_s(self, n: usize) -> f64 {
        match self {
            CoeffKind::Airy => 2.0 * n as f64 - 5.0 / 3.0,
            _ => 2.0 * n as f64 - 2.0,
        }
    }

    fn expected_sign(self, nu: &Rational) -> Option<Ordering> {
        match self {
            CoeffKind::Phase => {
                let a = nu.clone().abs();
                let half = Rational::from((1, 2));
                Some(match a.cmp(&half) {
                    Ordering::Less => Ordering::Less,
                    Ordering::Equal => Ordering::Equal,
                    Ordering::Greater => Ordering::Greater,
                })
            }
            CoeffKind::Mcmahon => Some(Ordering::Greater),
            CoeffKind::Airy => Some(Ordering::Less),
        }
    }
}

/// Panel edges in the integration variable.
fn edges(layout: Layout, x_end: f64, width: f64, bits: u32) -> Vec<f64> {
    let mut e = vec![0.0];
    let mut start = 0.0;
    if layout.graded {
        let levels = (bits as f64 * 0.6) as i32;
        for j in (1..=levels).rev() {
            e.push(2f64.powi(-j));
        }
        e.push(1.0);
        start = 1.0;
    }
    let count = ((x_end - start) / width).round().max(1.0) as usize;
    for i in 1..=count {
        e.push(start + (x_end - start) * i as f64 / count as f64);
    }
    e
}

/// Samples of the base integrand (without the power weight) at `s`-points.
type Sampler<'a> = dyn Fn(&[Float]) -> Result<Vec<Float>> + Sync + 'a;

struct Samples {
    /// `(s, weight * ds/dx, g(s))` in panel order.
    main: Vec<(Float, Float, Float)>,
    check: Vec<(Float, Float, Float)>,
}

fn sample_range(
    sampler: &Sampler,
    layout: Layout,
    edges: &[f64],
    order: usize,
    bits: u32,
) -> Result<Vec<(Float, Float, Float)>> {
    let rule = gauss_legendre(order, bits);
    let panels = edges.len().saturating_sub(1);
    let groups: Vec<&[f64]> = (0..panels).step_by(4).map(|i| &edges[i..=(i + 4).min(panels)]).collect();
    let parts: Vec<Result<Vec<(Float, Float, Float)>>> = groups
        .par_iter()
        .map(|g| {
            let mut pts = Vec::new();
            for w in g.windows(2) {
                let (a, c) = (Float::with_val(bits, w[0]), Float::with_val(bits, w[1]));
                let half = Float::with_val(bits, &c - &a) / 2u32;
                let mid = Float::with_val(bits, &c + &a) / 2u32;
                for (t, wt) in rule.0.iter().zip(rule.1.iter()).rev() {
                    let x = Float::with_val(bits, &mid - Float::with_val(bits, &half * t));
                    let (s, jac) = if layout.power == 1 {
                        (x.clone(), Float::with_val(bits, 1))
                    } else {
                        let p = layout.power;
                        let s = Float::with_val(bits, x.clone().pow(p));
                        let jac = Float::with_val(bits, x.clone().pow(p - 1)) * p;
                        (s, jac)
                    };
                    pts.push((s, Float::with_val(bits, wt * &half) * jac));
                }
            }
            let ss: Vec<Float> = pts.iter().map(|p| p.0.clone()).collect();
            let g = sampler(&ss)?;
            Ok(pts.into_iter().zip(g).map(|((s, w), g)| (s, w, g)).collect())
        })
        .collect();
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

fn moment(samples: &[(Float, Float, Float)], p: f64, bits: u32) -> Float {
    let pw = Float::with_val(bits, p);
    let mut acc = Float::with_val(bits + 64, 0);
    for (s, w, g) in samples {
        if g.is_zero() {
            continue;
        }
        let sp = if p == 0.0 { Float::with_val(bits, 1) } else { Float::with_val(bits, s.pow(&pw)) };
        acc += Float::with_val(bits, &sp * w) * g;
    }
    Float::with_val(bits, acc)
}

/// Value of the coefficient from the integral `I_n = int s^p g(s) ds`.
fn finish_coeff(kind: CoeffKind, n: usize, integral: &Float, bits: u32) -> Float {
    let two_over_pi = Float::with_val(bits, 2u32) / pi(bits);
    let v = Float::with_val(bits, integral * &two_over_pi);
    let negate = match kind {
        CoeffKind::Airy => n % 2 == 1,
        _ => n.is_multiple_of(2),
    };
    if negate {
        -v
    } else {
        v
    }
}

fn sampler_for<'a>(kind: CoeffKind, nu: &'a Rational, settings: &'a QuadratureSettings) -> Box<Sampler<'a>> {
    let prec = settings.precision;
    match kind {
        CoeffKind::Phase => Box::new(move |ss: &[Float]| {
            ss.iter().map(|s| theta_imag_axis(nu, s, prec).map(|t| t.real().clone())).collect()
        }),
        CoeffKind::Mcmahon => Box::new(move |ss: &[Float]| {
            let ws: Vec<Complex> = ss.iter().map(|s| Complex::with_val(s.prec(), (0, s))).collect();
            chain_invert(nu, &ws, prec).map(|zs| zs.into_iter().map(|z| z.real().clone()).collect())
        }),
        CoeffKind::Airy => Box::new(move |ss: &[Float]| {
            let b = ss.first().map_or(64, |s| s.prec());
            let ws: Vec<Complex> = ss
                .iter()
                .map(|s| Complex::with_val(b, (0, Float::with_val(b, s * 2u32) / 3u32)))
                .collect();
            let third = Rational::from((1, 3));
            let zs = chain_invert(&third, &ws, prec)?;
            Ok(zs.iter().map(airy_integrand).collect())
        }),
    }
}

/// `Im(e^{-i pi/3} T)` with `T = ((3/2) z)^{2/3}`, written so that the
/// exponentially small result keeps full relative accuracy.
fn airy_integrand(z: &Complex) -> Float {
    let b = z.prec().0;
    let r = Float::with_val(b, cabs(z, b) * 3u32) / 2u32;
    let modulus = r.pow(Float::with_val(b, 2) / 3u32);
    let tilt = Float::with_val(b, z.real().atan2_ref(z.imag()));
    let s = (tilt * 2u32 / 3u32).sin();
    -(modulus * s)
}

/// Inverts along an ordered list of nearby points, seeding each solve from
/// the previous solution.
fn chain_invert(nu: &Rational, ws: &[Complex], prec: Precision) -> Result<Vec<Complex>> {
    let max_im = ws.iter().map(|w| w.imag().to_f64().abs()).fold(0.0, f64::max);
    let mut inv = Inverter::new(nu, prec, max_im)?;
    let b = inv.bits();
    let mut out = Vec::with_capacity(ws.len());
    let mut prev: Option<(Complex, Complex, Complex)> = None;
    for w in ws {
        let w = Complex::with_val(b, w);
        let (z, d) = match &prev {
            Some((pw, pz, pd)) => {
                let seed = Complex::with_val(b, pz + Complex::with_val(b, &w - pw) / pd);
                if seed.real().cmp0() == Some(Ordering::Greater) {
                    inv.solve(&w, seed)?
                } else {
                    inv.solve_fresh(&w)?
                }
            }
            None => inv.solve_fresh(&w)?,
        };
        out.push(z.clone());
        prev = Some((w, z, d));
    }
    Ok(out)
}

fn tail_estimate(kind: CoeffKind, n: usize, s_end: f64, g_end: &Float, bits: u32) -> Option<Float> {
    let layout = kind.layout();
    let p = kind.power_of_s(n);
    let denom = layout.rate - p / s_end;
    if denom < layout.rate / 4.0 {
        return None;
    }
    let sp = Float::with_val(bits, s_end).pow(Float::with_val(bits, p));
    Some(Float::with_val(bits, g_end.abs_ref()) * sp * (TAIL_SAFETY / denom))
}

/// Quadrature values of the coefficients `n in ns` of one family at order `nu`
/// (ignored for the Airy family), sharing one set of integrand samples.
pub fn quad_coeffs(kind: CoeffKind, nu: &Rational, ns: &[usize], settings: &QuadratureSettings) -> Result<Vec<QuadResult>> {
    settings.validate()?;
    if ns.contains(&0) {
        return Err(Error::Domain("coefficient index must be positive".into()));
    }
    let third = Rational::from((1, 3));
    let nu = match kind {
        CoeffKind::Airy => &third,
        CoeffKind::Mcmahon => {
            check_inverse_order(nu)?;
            nu
        }
        CoeffKind::Phase => {
            if nu.clone().abs() >= Rational::from((3, 2)) {
                return Err(Error::UnsupportedOrder(format!("|nu| = {} must be below 3/2", nu.to_f64())));
            }
            nu
        }
    };
    let bits = settings.precision.with_extra(10).bits();
    let layout = kind.layout();
    let p = layout.power as f64;
    let sampler = sampler_for(kind, nu, settings);
    let s0 = kind.initial_s(settings.s_max);
    let x0 = s0.powf(1.0 / p);
    let width = x0 / settings.panels as f64;
    let step = (settings.panels / 4).max(1) as f64 * width;
    let x_cap = (2.0 * s0).powf(1.0 / p);
    let tol = settings.tolerance(bits);

    let mut x_end = x0;
    let mut e = edges(layout, x_end, width, bits);
    let mut main = sample_range(&*sampler, layout, &e, settings.order, bits)?;
    let (tails, s_end) = loop {
        let s_end = x_end.powf(p);
        let g_end = sampler(&[Float::with_val(bits, s_end)])?.pop().unwrap();
        let mut tails = Vec::new();
        let mut enough = true;
        for &n in ns {
            let integral = moment(&main, kind.power_of_s(n), bits);
            match tail_estimate(kind, n, s_end, &g_end, bits) {
                Some(t) if t <= Float::with_val(bits, &tol * &integral).abs() || t.is_zero() => tails.push(t),
                Some(t) => {
                    enough = false;
                    tails.push(t)
                }
                None => {
                    enough = false;
                    tails.push(Float::with_val(bits, f64::INFINITY))
                }
            }
        }
        if enough {
            break (tails, s_end);
        }
        if x_end + step > x_cap + 1e-9 {
            return Err(Error::Config(format!(
                "tail bound 1e-{} unreachable before s = {:.1}; raise s_max",
                settings.precision.digits() / 2,
                x_cap.powf(p)
            )));
        }
        let old = *e.last().unwrap();
        x_end += step;
        let extra_edges: Vec<f64> = {
            let count = ((x_end - old) / width).round().max(1.0) as usize;
            (0..=count).map(|i| old + (x_end - old) * i as f64 / count as f64).collect()
        };
        main.extend(sample_range(&*sampler, layout, &extra_edges, settings.order, bits)?);
        e.extend_from_slice(&extra_edges[1..]);
    };

    let check = sample_range(&*sampler, layout, &e, (settings.order / 2).max(4), bits)?;
    let samples = Samples { main, check };
    let x_far = (2.0 * s_end).powf(1.0 / p);
    let far_edges: Vec<f64> = {
        let count = ((x_far - x_end) / (4.0 * width)).ceil().max(2.0) as usize;
        (0..=count).map(|i| x_end + (x_far - x_end) * i as f64 / count as f64).collect()
    };
    let far = sample_range(&*sampler, layout, &far_edges, (settings.order / 2).max(8), bits)?;

    let expected = kind.expected_sign(nu);
    let violations = samples
        .main
        .iter()
        .filter(|(_, _, g)| match expected {
            Some(Ordering::Equal) => !g.is_zero(),
            Some(o) => g.cmp0() != Some(o) && !g.is_zero(),
            None => false,
        })
        .count();

    Ok(ns
        .iter()
        .zip(tails)
        .map(|(&n, tail)| {
            let pw = kind.power_of_s(n);
            let i_main = moment(&samples.main, pw, bits);
            let i_check = moment(&samples.check, pw, bits);
            let i_far = moment(&far, pw, bits);
            let value = finish_coeff(kind, n, &i_main, bits);
            let scale = Float::with_val(bits, 2u32) / pi(bits);
            let disc = Float::with_val(bits, &i_main - &i_check).abs() * &scale;
            let tail_c = Float::with_val(bits, &tail * &scale);
            QuadResult {
                n,
                value,
                error_estimate: Float::with_val(bits, &disc + &tail_c),
                tail_estimate: tail_c,
                s_max: s_end,
                doubling_delta: Float::with_val(bits, i_far.abs() * &scale),
                sign_violations: violations,
                samples: samples.main.len(),
            }
        })
        .collect())
}

/// `t_n(nu)` by quadrature of `s^{2n-2} Re Theta_nu(i s)`.
pub fn quad_phase_coeff(nu: &Rational, n: usize, settings: &QuadratureSettings) -> Result<QuadResult> {
    Ok(quad_coeffs(CoeffKind::Phase, nu, &[n], settings)?.remove(0))
}

/// `c_n(nu)` by quadrature of `s^{2n-2} Re X_nu(i s)`.
pub fn quad_mcmahon_coeff(nu: &Rational, n: usize, settings: &QuadratureSettings) -> Result<QuadResult> {
    Ok(quad_coeffs(CoeffKind::Mcmahon, nu, &[n], settings)?.remove(0))
}

/// `T_n` by quadrature of `s^{2n-5/3} Im(e^{-i pi/3} T(i s))`, in the
/// variable `u = s^{1/3}`.
pub fn quad_airy_coeff(n: usize, settings: &QuadratureSettings) -> Result<QuadResult> {
    Ok(quad_coeffs(CoeffKind::Airy, &Rational::from((1, 3)), &[n], settings)?.remove(0))
}

/// Exact value of the coefficient from the recurrences.
pub fn exact_coeff(kind: CoeffKind, nu: &Rational, n: usize) -> Rational {
    match kind {
        CoeffKind::Phase => phase_coeff(n).eval(nu),
        CoeffKind::Mcmahon => mcmahon_coeff(n).eval(nu),
        CoeffKind::Airy => airy_coeff(n),
    }
}

/// Compares quadrature and recurrence values for every `(nu, n)`; a record
/// passes when the relative difference is below `rel_tol`, the integrand
/// kept its sign at every sample and doubling the truncation point moved
/// the value by no more than the tail estimate.
pub fn verify_quadrature(
    kind: CoeffKind,
    nus: &[Rational],
    ns: &[usize],
    rel_tol: f64,
    settings: &QuadratureSettings,
) -> Report {
    let nus: Vec<Rational> = if kind == CoeffKind::Airy { vec![Rational::from((1, 3))] } else { nus.to_vec() };
    let parts: Vec<Vec<Record>> = nus.par_iter().map(|nu| quad_records(kind, nu, ns, rel_tol, settings)).collect();
    let mut grid = BTreeMap::new();
    grid.insert("coeff".to_string(), kind.symbol().to_string());
    if kind != CoeffKind::Airy {
        grid.insert("nu".into(), nus.iter().map(fmt_rational).collect::<Vec<_>>().join(","));
    }
    grid.insert("n".into(), ns.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(","));
    grid.insert("rel_tol".into(), format!("{rel_tol:e}"));
    grid.insert("s_max".into(), settings.s_max.to_string());
    grid.insert("order".into(), settings.order.to_string());
    grid.insert("panels".into(), settings.panels.to_string());
    grid.insert("precision".into(), settings.precision.digits().to_string());
    Report::new("quadcheck", grid, parts.into_iter().flatten().collect())
}

fn quad_records(kind: CoeffKind, nu: &Rational, ns: &[usize], rel_tol: f64, settings: &QuadratureSettings) -> Vec<Record> {
    let base = |n: usize| {
        let mut p = params([("coeff", kind.symbol().to_string()), ("n", n.to_string())]);
        if kind != CoeffKind::Airy {
            p.insert("nu".into(), fmt_rational(nu));
        }
        p
    };
    let results = match quad_coeffs(kind, nu, ns, settings) {
        Ok(r) => r,
        Err(e) => {
            let status = match e {
                Error::Domain(_) | Error::UnsupportedOrder(_) => Status::Skipped,
                _ => Status::Error,
            };
            return ns.iter().map(|&n| Record::new(base(n), status).with_note(e.to_string())).collect();
        }
    };
    let bits = settings.precision.with_extra(10).bits();
    results
        .into_iter()
        .map(|q| {
            let exact = Float::with_val(bits, exact_coeff(kind, nu, q.n));
            let diff = Float::with_val(bits, &q.value - &exact);
            let scale = Float::with_val(bits, exact.abs_ref());
            let bound = if scale.is_zero() {
                Float::with_val(bits, rel_tol)
            } else {
                Float::with_val(bits, &scale * rel_tol)
            };
            let abs_diff = Float::with_val(bits, diff.abs_ref());
            let mut r = Record::new(base(q.n), Status::Pass);
            r.oracle = Some(dec(&exact));
            r.estimate = Some(dec(&q.value));
            r.error = Some(dec(&diff));
            r.bound = Some(dec(&bound));
            r.ratio = Some(ratio_str(&Float::with_val(bits, &abs_diff / &bound)));
            r.sign_ok = Some(q.sign_violations == 0);
            let doubling_ok = q.doubling_delta <= q.tail_estimate;
            r.bound_ok = Some(abs_diff <= bound && doubling_ok);
            r.lo = None;
            r.hi = None;
            r = r.judge();
            r.with_note(format!(
                "s_max={:.2} samples={} tail={:.3e} doubling_delta={:.3e} error_estimate={:.3e}",
                q.s_max,
                q.samples,
                q.tail_estimate.to_f64(),
                q.doubling_delta.to_f64(),
                q.error_estimate.to_f64()
            ))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn fast() -> QuadratureSettings {
        QuadratureSettings { order: 16, panels: 32, s_max: 32.0, precision: Precision::new(30).unwrap() }
    }

    fn rel(a: &Float, b: &Rational) -> f64 {
        let b = Float::with_val(a.prec(), b);
        if b.is_zero() {
            return a.to_f64().abs();
        }
        (Float::with_val(a.prec(), a - &b) / b).abs().to_f64()
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = gauss_legendre(10, 200);
        let sum: Float = rule.1.iter().fold(Float::with_val(200, 0), |acc, w| acc + w);
        assert!((sum.to_f64() - 2.0).abs() < 1e-40);
        let x18: Float = rule
            .0
            .iter()
            .zip(rule.1.iter())
            .fold(Float::with_val(200, 0), |acc, (x, w)| acc + Float::with_val(200, x.pow(18u32)) * w);
        assert!((x18.to_f64() - 2.0 / 19.0).abs() < 1e-40);
    }

    #[test]
    fn settings_are_validated() {
        let mut s = QuadratureSettings::default();
        s.panels = 4;
        assert!(matches!(s.validate(), Err(Error::Config(_))));
        assert!(QuadratureSettings::default().validate().is_ok());
    }

    #[test]
    fn phase_coeff_by_quadrature() {
        let s = fast();
        let r = quad_coeffs(CoeffKind::Phase, &q(0, 1), &[1, 2, 3], &s).unwrap();
        for x in &r {
            assert!(rel(&x.value, &phase_coeff(x.n).eval(&q(0, 1))) < 1e-12, "n={} {}", x.n, x.value);
            assert_eq!(x.sign_violations, 0);
            assert!(x.doubling_delta <= x.tail_estimate);
        }
        let half = quad_phase_coeff(&q(1, 2), 2, &s).unwrap();
        assert!(half.value.is_zero());
        let r = quad_phase_coeff(&q(6, 5), 2, &s).unwrap();
        assert!(rel(&r.value, &phase_coeff(2).eval(&q(6, 5))) < 1e-12);
    }

    #[test]
    fn inversion_examples() {
        let s = fast();
        let b = 200;
        let w = Complex::with_val(b, (Float::with_val(b, Constant::Pi) * 3u32 / 4u32, 0));
        let z = invert_phase(&q(0, 1), &w, &s).unwrap();
        assert!((z.real().to_f64() - 2.404_825_557_695_773).abs() < 1e-14);
        assert!(z.imag().to_f64().abs() < 1e-25);

        let w = Complex::with_val(b, (1.5, 2.5));
        let z = invert_phase(&q(1, 5), &w, &s).unwrap();
        let zc = invert_phase(&q(1, 5), &Complex::with_val(b, w.conj_ref()), &s).unwrap();
        let d = Complex::with_val(b, &zc - &z.clone().conj());
        assert!(cabs(&d, b).to_f64() < 1e-25);

        let w = Complex::with_val(b, (0, 0.4));
        let z = invert_phase(&q(0, 1), &w, &s).unwrap();
        let mut tr = ThetaTracker::new(&q(0, 1), Precision::new(30).unwrap()).unwrap();
        let (th, _) = tr.eval(&z).unwrap();
        assert!(cabs(&Complex::with_val(b, &th - &w), b).to_f64() < 1e-20);
    }

    #[test]
    fn inversion_matches_expansion_at_large_w() {
        let s = fast();
        let nu = q(1, 3);
        let c1 = Float::with_val(200, mcmahon_coeff(1).eval(&nu));
        assert_eq!(mcmahon_coeff(1).eval(&nu), q(5, 72));
        let mut last = f64::INFINITY;
        for wv in [10.0f64, 20.0, 40.0] {
            let w = Complex::with_val(200, (wv, 0));
            let z = invert_phase(&nu, &w, &s).unwrap();
            let r = (Float::with_val(200, z.real() - wv) - Float::with_val(200, &c1 / wv)).abs().to_f64();
            let scaled = r * wv.powi(3);
            assert!(scaled < 1.0 && r < last);
            last = r;
        }
    }

    #[test]
    fn mcmahon_coeff_by_quadrature() {
        let s = fast();
        let r = quad_coeffs(CoeffKind::Mcmahon, &q(0, 1), &[1, 2], &s).unwrap();
        assert!(rel(&r[0].value, &q(1, 8)) < 1e-12, "{}", r[0].value);
        assert!(rel(&r[1].value, &q(-31, 384)) < 1e-12, "{}", r[1].value);
        assert_eq!(r[0].sign_violations, 0);
    }

    #[test]
    fn airy_coeff_by_quadrature() {
        let s = fast();
        let r = quad_coeffs(CoeffKind::Airy, &q(1, 3), &[1, 2], &s).unwrap();
        assert!(rel(&r[0].value, &q(5, 48)) < 1e-12, "{}", r[0].value);
        assert!(rel(&r[1].value, &q(-5, 36)) < 1e-12, "{}", r[1].value);
        assert_eq!(r[0].sign_violations, 0);
    }

    #[test]
    fn rejects_bad_input() {
        let s = fast();
        assert!(quad_phase_coeff(&q(0, 1), 0, &s).is_err());
        assert!(quad_mcmahon_coeff(&q(3, 5), 1, &s).is_err());
        assert!(invert_phase(&q(0, 1), &Complex::with_val(64, (-1, 0)), &s).is_err());
    }
}
