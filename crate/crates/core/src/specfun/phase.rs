//! Modulus and phase of the Hankel function on the positive axis, and the
//! shifted phase `Theta_nu` continued into the right half-plane.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{OnceLock, RwLock};

use rug::{Complex, Float, Rational};

use super::bessel::{hankel_raw, jy};
use super::{cabs_f64, pi, rat, working_bits, Precision, X_MAX};
use crate::error::{Error, Result};

/// `H1_nu(x) = modulus * exp(i phase)` at a point of the positive axis.
#[derive(Clone, Debug)]
pub struct PhasePoint {
    pub nu: Rational,
    pub x: Float,
    pub modulus: Float,
    pub phase: Float,
}

const SEED_X: f64 = 1e-3;
const WALK_DIGITS: u32 = 20;

#[derive(Clone, Copy, Debug)]
struct Checkpoint {
    x: f64,
    theta: f64,
    slope: f64,
}

impl Checkpoint {
    /// Phase changes by at most about pi/4 over this reach.
    fn reach(&self) -> f64 {
        (PI / 4.0 / self.slope).min(1.0)
    }
}

type Cache = RwLock<HashMap<Rational, Vec<Checkpoint>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn nearest_branch(principal: f64, target: f64) -> f64 {
    principal + 2.0 * PI * ((target - principal) / (2.0 * PI)).round()
}

fn coarse(a: &Rational, x: f64) -> (f64, f64) {
    let bits = working_bits(WALK_DIGITS, x);
    let xf = Float::with_val(bits, x);
    let (j, y) = jy(a, &xf, bits);
    let principal = Float::with_val(bits, y.atan2_ref(&j)).to_f64();
    let m2 = Float::with_val(bits, &j * &j) + Float::with_val(bits, &y * &y);
    let slope = 2.0 / (PI * x * m2.to_f64());
    (principal, slope)
}

fn lookup(cps: &[Checkpoint], x: f64) -> Option<f64> {
    let i = cps.partition_point(|c| c.x <= x);
    if i == 0 {
        return None;
    }
    let c = &cps[i - 1];
    if x < c.x + c.reach() {
        Some(c.theta + c.slope * (x - c.x))
    } else {
        None
    }
}

fn extend(cps: &mut Vec<Checkpoint>, a: &Rational, x: f64) {
    if cps.is_empty() {
        let (p, s) = coarse(a, SEED_X);
        cps.push(Checkpoint { x: SEED_X, theta: nearest_branch(p, -PI / 2.0), slope: s });
    }
    loop {
        let last = *cps.last().unwrap();
        let next = last.x + last.reach();
        if next > x {
            break;
        }
        let (p, s) = coarse(a, next);
        let theta = nearest_branch(p, last.theta + last.slope * (next - last.x));
        cps.push(Checkpoint { x: next, theta, slope: s });
    }
}

/// Low-precision estimate of the unwound phase of order `a >= 0`, accurate
/// to well within pi.
fn predict(a: &Rational, x: f64) -> f64 {
    if x < SEED_X {
        return -PI / 2.0;
    }
    {
        let map = cache().read().unwrap_or_else(|e| e.into_inner());
        if let Some(v) = map.get(a).and_then(|cps| lookup(cps, x)) {
            return v;
        }
    }
    let mut map = cache().write().unwrap_or_else(|e| e.into_inner());
    let cps = map.entry(a.clone()).or_default();
    extend(cps, a, x);
    lookup(cps, x).expect("checkpoint covers x after extension")
}

fn check_phase_order(nu: &Rational) -> Result<()> {
    if nu.clone().abs() > Rational::from((3, 2)) {
        return Err(Error::UnsupportedOrder(format!("phase needs |nu| <= 3/2, got {}", nu.to_f64())));
    }
    Ok(())
}

fn check_x(x: &Float) -> Result<()> {
    if x.is_nan() || x.cmp0() != Some(std::cmp::Ordering::Greater) || x.to_f64() > X_MAX {
        return Err(Error::Domain(format!("x = {} outside (0, {X_MAX}]", x.to_f64())));
    }
    Ok(())
}

/// Phase of order `|nu|` at working precision, plus modulus.
fn unwound(a: &Rational, x: &Float, wb: u32) -> Result<(Float, Float)> {
    let (j, y) = jy(a, x, wb);
    let modulus = Float::with_val(wb, j.hypot_ref(&y));
    let principal = Float::with_val(wb, y.atan2_ref(&j));
    let target = predict(a, x.to_f64());
    let p = principal.to_f64();
    let turns = ((target - p) / (2.0 * PI)).round();
    let gap = (p + 2.0 * PI * turns - target).abs();
    if gap > 0.75 * PI {
        return Err(Error::Numerical(format!(
            "ambiguous winding at x = {}: principal {p}, predicted {target}",
            x.to_f64()
        )));
    }
    let theta = principal + pi(wb) * (2.0 * turns);
    Ok((modulus, theta))
}

/// `M_nu(x)` and the continuous phase `theta_nu(x)` with `theta -> -pi/2` as
/// `x -> 0+` for `nu >= 0`; negative orders use `theta_{-a} = theta_a + pi a`.
pub fn modulus_phase_eval(nu: &Rational, x: &Float, prec: Precision) -> Result<PhasePoint> {
    check_phase_order(nu)?;
    check_x(x)?;
    let a = nu.clone().abs();
    let wb = prec.working_bits(x.to_f64());
    let (modulus, mut theta) = unwound(&a, x, wb)?;
    if nu.cmp0() == std::cmp::Ordering::Less {
        theta += pi(wb) * rat(wb, &a);
    }
    let b = prec.bits();
    Ok(PhasePoint {
        nu: nu.clone(),
        x: Float::with_val(b, x),
        modulus: Float::with_val(b, modulus),
        phase: Float::with_val(b, theta),
    })
}

/// `theta'_nu(x) = 2 / (pi x M_nu(x)^2)`.
pub fn phase_derivative(nu: &Rational, x: &Float, prec: Precision) -> Result<Float> {
    check_phase_order(nu)?;
    check_x(x)?;
    let wb = prec.working_bits(x.to_f64());
    let (j, y) = jy(nu, x, wb);
    let m2 = Float::with_val(wb, &j * &j) + Float::with_val(wb, &y * &y);
    let d = Float::with_val(wb, 2u32) / (m2 * x * pi(wb));
    Ok(Float::with_val(prec.bits(), d))
}

#[derive(Clone, Debug)]
struct Anchor {
    z: Complex,
    theta: Complex,
    deriv: Complex,
}

/// Evaluates `Theta_nu(z) = theta_nu(z) + (nu/2 + 1/4) pi` for `Re z > 0`.
///
/// The logarithm behind `theta` is only known modulo `pi`; the branch is
/// fixed by continuation from the last evaluated point (or from the real
/// axis) in steps short enough that the phase moves by less than `pi/8`.
/// Reusing one tracker along a path of nearby points keeps this cheap.
#[derive(Clone, Debug)]
pub struct ThetaTracker {
    a: Rational,
    prec: Precision,
    anchor: Option<Anchor>,
}

fn complex_bits(digits: u32, z: &Complex) -> u32 {
    working_bits(digits, cabs_f64(z) + z.imag().to_f64().abs())
}

fn raw_theta(a: &Rational, z: &Complex, bits: u32) -> (Complex, Complex) {
    let (h1, h2) = hankel_raw(a, z, bits);
    let ratio = Complex::with_val(bits, &h1 / &h2);
    let mut l = ratio.ln().mul_i(true);
    l /= 2u32;
    let shift = pi(bits) * (rat(bits, a) / 2u32 + Float::with_val(bits, 0.25));
    l += shift;
    let mut d = Complex::with_val(bits, &h1 * &h2);
    d *= z;
    d *= pi(bits);
    let d = Complex::with_val(bits, 2u32) / d;
    (l, d)
}

impl ThetaTracker {
    pub fn new(nu: &Rational, prec: Precision) -> Result<Self> {
        check_phase_order(nu)?;
        Ok(ThetaTracker { a: nu.clone().abs(), prec, anchor: None })
    }

    /// Forgets the continuation anchor.
    pub fn reset(&mut self) {
        self.anchor = None;
    }

    fn real_anchor(&self, r: f64) -> Result<Anchor> {
        let b = self.prec.bits();
        let x = Float::with_val(b, r);
        let pp = modulus_phase_eval(&self.a, &x, self.prec)?;
        let shift = pi(b) * (rat(b, &self.a) / 2u32 + Float::with_val(b, 0.25));
        let theta = Complex::with_val(b, (pp.phase + shift, 0));
        let m2 = Float::with_val(b, &pp.modulus * &pp.modulus);
        let d = Float::with_val(b, 2u32) / (m2 * &x * pi(b));
        Ok(Anchor { z: Complex::with_val(b, (x, 0)), theta, deriv: Complex::with_val(b, (d, 0)) })
    }

    fn usable(anchor: &Anchor, z: &Complex) -> bool {
        // Keep the straight segment well away from the origin.
        let (ax, ay) = (anchor.z.real().to_f64(), anchor.z.imag().to_f64());
        let (bx, by) = (z.real().to_f64(), z.imag().to_f64());
        let (dx, dy) = (bx - ax, by - ay);
        let len2 = dx * dx + dy * dy;
        let t = if len2 == 0.0 { 0.0 } else { (-(ax * dx + ay * dy) / len2).clamp(0.0, 1.0) };
        let closest = (ax + t * dx).hypot(ay + t * dy);
        closest >= 0.5 * ax.hypot(ay).min(bx.hypot(by))
    }

    /// `(Theta_nu(z), Theta_nu'(z))` at the tracker precision.
    pub fn eval(&mut self, z: &Complex) -> Result<(Complex, Complex)> {
        if z.real().is_nan() || z.imag().is_nan() || z.real().cmp0() != Some(std::cmp::Ordering::Greater) {
            return Err(Error::Domain("Theta needs Re z > 0".into()));
        }
        let r = cabs_f64(z);
        if r > X_MAX {
            return Err(Error::Domain(format!("|z| = {r} exceeds {X_MAX}")));
        }
        let start = match &self.anchor {
            Some(an) if Self::usable(an, z) => an.clone(),
            _ => self.real_anchor(r)?,
        };
        let end = self.walk(start, z)?;
        let b = self.prec.bits();
        let out = (Complex::with_val(b, &end.theta), Complex::with_val(b, &end.deriv));
        self.anchor = Some(end);
        Ok(out)
    }

    fn walk(&self, start: Anchor, z: &Complex) -> Result<Anchor> {
        let pi_f = Float::with_val(64, rug::float::Constant::Pi);
        let mut p = start;
        loop {
            let d = Complex::with_val(p.z.prec().0.max(z.prec().0), z - &p.z);
            let dist = cabs_f64(&d);
            if dist == 0.0 {
                if p.theta.prec().0 < self.prec.bits() {
                    // reached through coarse steps only; recompute at full precision
                    return self.finish(&p, z);
                }
                return Ok(p);
            }
            let slope = cabs_f64(&p.deriv).max(1e-300);
            let mut step = dist.min(PI / 8.0 / slope);
            loop {
                if step >= dist {
                    return self.finish(&p, z);
                }
                if step < 1e-12 * r_scale(z) {
                    return Err(Error::Numerical(format!(
                        "phase continuation stalled near z = {}",
                        super::complex_to_decimal(&p.z, 10)
                    )));
                }
                let bits = complex_bits(WALK_DIGITS, z);
                let mut q = Complex::with_val(bits, &d);
                q *= step / dist;
                q += &p.z;
                let (l, dq) = raw_theta(&self.a, &q, bits);
                let (pred, theta) = branch(&p, &q, l, &pi_f);
                let err = cabs_f64(&Complex::with_val(bits, &theta - &pred));
                if err < PI / 4.0 && cabs_f64(&dq) * step < PI / 2.0 {
                    p = Anchor { z: q, theta, deriv: dq };
                    break;
                }
                step /= 2.0;
            }
        }
    }

    /// Final step to `z` at full working precision.
    fn finish(&self, p: &Anchor, z: &Complex) -> Result<Anchor> {
        let bits = complex_bits(self.prec.digits(), z);
        let zq = Complex::with_val(bits, z);
        let (l, dq) = raw_theta(&self.a, &zq, bits);
        let pi_f = Float::with_val(64, rug::float::Constant::Pi);
        let (pred, theta) = branch(p, &zq, l, &pi_f);
        let err = cabs_f64(&Complex::with_val(bits, &theta - &pred));
        let dist = cabs_f64(&Complex::with_val(bits, &zq - &p.z));
        if err >= PI / 4.0 || cabs_f64(&dq) * dist >= PI / 2.0 {
            // Too far for one step: take a coarse intermediate point first.
            let mut mid = Complex::with_val(bits, &zq - &p.z);
            mid /= 2u32;
            mid += &p.z;
            if dist < 1e-12 * r_scale(z) {
                return Err(Error::Numerical("phase continuation failed to converge".into()));
            }
            let bits_lo = complex_bits(WALK_DIGITS, &mid);
            let (lm, dm) = raw_theta(&self.a, &mid, bits_lo);
            let (_, tm) = branch(p, &mid, lm, &pi_f);
            let pm = Anchor { z: mid, theta: tm, deriv: dm };
            return self.finish(&pm, z);
        }
        Ok(Anchor { z: zq, theta, deriv: dq })
    }
}

fn r_scale(z: &Complex) -> f64 {
    cabs_f64(z).max(1.0)
}

/// Picks `l + m pi` closest to the linear prediction from `p`.
fn branch(p: &Anchor, q: &Complex, l: Complex, pi_f: &Float) -> (Complex, Complex) {
    let bits = l.prec().0;
    let mut pred = Complex::with_val(bits, q - &p.z);
    pred *= &p.deriv;
    pred += &p.theta;
    let gap = (pred.real().to_f64() - l.real().to_f64()) / pi_f.to_f64();
    let m = gap.round();
    let theta = l + pi(bits) * m;
    (pred, theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::float::Constant;

    fn p(d: u32) -> Precision {
        Precision::new(d).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn half_order_phase_is_linear() {
        let prec = p(40);
        let b = prec.bits() + 10;
        for xv in [0.01, 1.0, 7.3, 55.0, 180.0] {
            let x = Float::with_val(b, xv);
            let pp = modulus_phase_eval(&q(1, 2), &x, prec).unwrap();
            let expect = Float::with_val(b, &x - Float::with_val(b, Constant::Pi) / 2u32);
            let d = Float::with_val(b, &pp.phase - &expect).abs().to_f64();
            assert!(d < 1e-37, "x={xv} d={d}");
        }
    }

    #[test]
    fn three_halves_phase() {
        let prec = p(40);
        let b = 200;
        let pi = Float::with_val(b, Constant::Pi);
        for xv in [1.0, 2.0, 30.0] {
            let x = Float::with_val(b, xv);
            let pp = modulus_phase_eval(&q(3, 2), &x, prec).unwrap();
            let expect = Float::with_val(b, &x - &pi) + Float::with_val(b, 1u32 / x.clone()).atan();
            assert!(Float::with_val(b, &pp.phase - &expect).abs().to_f64() < 1e-37);
            // theta_{-3/2} = theta_{3/2} + 3 pi / 2
            let pn = modulus_phase_eval(&q(-3, 2), &x, prec).unwrap();
            let e2 = Float::with_val(b, &expect + Float::with_val(b, &pi * 3u32) / 2u32);
            assert!(Float::with_val(b, &pn.phase - &e2).abs().to_f64() < 1e-37);
        }
    }

    #[test]
    fn phase_limit_at_origin() {
        let pp = modulus_phase_eval(&q(0, 1), &Float::with_val(100, 1e-6), p(30)).unwrap();
        let v = pp.phase.to_f64();
        assert!(v > -PI / 2.0 && v < -PI / 2.0 + 0.15, "{v}");
    }

    #[test]
    fn phase_monotone_and_derivative_law() {
        let prec = p(40);
        for nu in [q(0, 1), q(1, 3), q(-2, 5), q(6, 5), q(-1, 1)] {
            let mut last: Option<Float> = None;
            for i in 1..60 {
                let x = Float::with_val(200, i as f64 * 1.7);
                let pp = modulus_phase_eval(&nu, &x, prec).unwrap();
                if let Some(l) = &last {
                    assert!(pp.phase > *l, "nu={nu} x={}", i as f64 * 1.7);
                }
                last = Some(pp.phase);
            }
            // central difference against 2/(pi x M^2)
            let h = Float::with_val(300, 1e-12);
            let x = Float::with_val(300, 4.25);
            let hi = modulus_phase_eval(&nu, &Float::with_val(300, &x + &h), prec).unwrap();
            let lo = modulus_phase_eval(&nu, &Float::with_val(300, &x - &h), prec).unwrap();
            let num = (hi.phase - lo.phase) / (h * 2u32);
            let d = phase_derivative(&nu, &x, prec).unwrap();
            let rel = ((num - &d) / &d).abs().to_f64();
            assert!(rel < 1e-20, "nu={nu} rel={rel}");
        }
    }

    #[test]
    fn complex_theta_on_real_axis_matches() {
        let prec = p(30);
        let nu = q(1, 3);
        let mut tr = ThetaTracker::new(&nu, prec).unwrap();
        for xv in [3.0, 11.0] {
            let z = Complex::with_val(150, (xv, 0));
            let (t, _) = tr.eval(&z).unwrap();
            let pp = modulus_phase_eval(&nu, &Float::with_val(150, xv), prec).unwrap();
            let shift = Float::with_val(150, Constant::Pi) * (Float::with_val(150, &nu) / 2u32 + 0.25f64);
            let e = pp.phase + shift;
            assert!(Float::with_val(150, t.real() - &e).abs().to_f64() < 1e-27);
            assert!(t.imag().to_f64().abs() < 1e-27);
        }
    }

    #[test]
    fn complex_theta_three_halves_closed_form() {
        // Theta_{3/2}(z) = z + arctan(1/z)
        let prec = p(30);
        let mut tr = ThetaTracker::new(&q(3, 2), prec).unwrap();
        for (re, im) in [(2.0, 1.0), (0.8, 3.0), (5.0, -4.0), (0.5, 0.3)] {
            let z = Complex::with_val(150, (re, im));
            let (t, d) = tr.eval(&z).unwrap();
            let inv = Complex::with_val(150, 1u32) / &z;
            let e = Complex::with_val(150, &z + inv.atan());
            let diff = cabs_f64(&Complex::with_val(150, &t - &e));
            assert!(diff < 1e-27, "z=({re},{im}) diff={diff}");
            // Theta' = 1 - 1/(1+z^2)
            let z2 = Complex::with_val(150, &z * &z) + 1u32;
            let ed = Complex::with_val(150, 1u32) - Complex::with_val(150, 1u32) / z2;
            assert!(cabs_f64(&Complex::with_val(150, &d - &ed)) < 1e-27);
        }
    }

    #[test]
    fn concurrent_phase_evaluation_is_consistent() {
        use rayon::prelude::*;
        let nu = q(2, 7);
        let xs: Vec<f64> = (1..40).map(|i| i as f64 * 4.9).collect();
        let par: Vec<f64> = xs
            .par_iter()
            .map(|&x| modulus_phase_eval(&nu, &Float::with_val(120, x), p(25)).unwrap().phase.to_f64())
            .collect();
        for w in par.windows(2) {
            assert!(w[1] > w[0]);
        }
    }
}
