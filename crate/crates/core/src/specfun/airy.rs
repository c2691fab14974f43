use rug::ops::Pow;
use rug::{Complex, Float, Rational};

use super::bessel::Tail;
use super::{rat, Precision, Scalar};
use crate::error::{Error, Result};

/// Largest `|x|` for the Maclaurin series.
pub const AIRY_X_MAX: f64 = 30.0;

/// `Ai, Bi` and their derivatives at one point.
#[derive(Clone, Debug)]
pub struct AiryValues<T> {
    pub ai: T,
    pub bi: T,
    pub ai_prime: T,
    pub bi_prime: T,
}

fn airy_bits(prec: Precision, r: f64) -> u32 {
    prec.working_bits(2.0 / 3.0 * r.powf(1.5))
}

fn series<T: Scalar>(z: &T, bits: u32, derivs: bool) -> AiryValues<T> {
    let z = z.clone().rounded(bits);
    let mut z3 = z.clone();
    z3 *= &z;
    z3 *= &z;
    let one = Float::with_val(bits, 1);
    let mut f = T::from_real(&one, bits);
    let mut g = z.clone();
    let mut sf = f.clone();
    let mut sg = g.clone();
    // derivative series start at k = 1 (x^2/2) and k = 0 (1)
    let mut fp = z.clone();
    fp *= &z;
    fp /= 2u32;
    let mut gp = T::from_real(&one, bits);
    let mut sfp = fp.clone();
    let mut sgp = gp.clone();

    let r3 = (z.mag_exp().unwrap_or(0) as f64).exp2().powi(3);
    let mut tails = [Tail::new(bits), Tail::new(bits), Tail::new(bits), Tail::new(bits)];
    let mut k = 0u32;
    loop {
        k += 1;
        f *= &z3;
        f /= (3 * k - 1) * (3 * k);
        sf += &f;
        g *= &z3;
        g /= (3 * k) * (3 * k + 1);
        sg += &g;
        let dec = (9.0 * (k * k) as f64) > 2.0 * r3;
        let mut stop = tails[0].done(&f, dec) & tails[1].done(&g, dec);
        if derivs {
            if k >= 2 {
                fp *= &z3;
                fp /= 3 * (3 * k - 1) * (k - 1);
                sfp += &fp;
            }
            gp *= &z3;
            gp /= 3 * k * (3 * k - 2);
            sgp += &gp;
            stop &= tails[2].done(&fp, dec && k >= 2) & tails[3].done(&gp, dec);
        }
        if stop {
            break;
        }
    }

    let third = Float::with_val(bits, Rational::from((1, 3)));
    let two_thirds = Float::with_val(bits, Rational::from((2, 3)));
    let three = Float::with_val(bits, 3);
    let c1 = Float::with_val(bits, three.clone().pow(-two_thirds.clone())) / two_thirds.gamma();
    let c2 = Float::with_val(bits, three.clone().pow(-third.clone())) / third.gamma();
    let sqrt3 = three.sqrt();

    let combine = |f: &T, g: &T| -> (T, T) {
        let mut a = f.clone();
        a *= &c1;
        let mut b = g.clone();
        b *= &c2;
        let mut ai = a.clone();
        ai -= &b;
        let mut bi = a;
        bi += &b;
        bi *= &sqrt3;
        (ai, bi)
    };
    let (ai, bi) = combine(&sf, &sg);
    let (ai_prime, bi_prime) = if derivs { combine(&sfp, &sgp) } else { (ai.clone(), bi.clone()) };
    AiryValues { ai, bi, ai_prime, bi_prime }
}

fn check_real(x: &Float) -> Result<()> {
    if x.is_nan() || x.to_f64().abs() > AIRY_X_MAX {
        return Err(Error::Domain(format!("|x| = {} exceeds {AIRY_X_MAX}", x.to_f64().abs())));
    }
    Ok(())
}

fn round<T: Scalar>(v: AiryValues<T>, b: u32) -> AiryValues<T> {
    AiryValues {
        ai: v.ai.rounded(b),
        bi: v.bi.rounded(b),
        ai_prime: v.ai_prime.rounded(b),
        bi_prime: v.bi_prime.rounded(b),
    }
}

/// `(Ai(x), Bi(x))` for real `|x| <= 30`.
pub fn airy_pair(x: &Float, prec: Precision) -> Result<(Float, Float)> {
    check_real(x)?;
    let wb = airy_bits(prec, x.to_f64().abs());
    let v = series(x, wb, false);
    let b = prec.bits();
    Ok((v.ai.rounded(b), v.bi.rounded(b)))
}

/// Airy functions and derivatives for real `|x| <= 30`.
pub fn airy_pair_with_derivs(x: &Float, prec: Precision) -> Result<AiryValues<Float>> {
    check_real(x)?;
    let wb = airy_bits(prec, x.to_f64().abs());
    Ok(round(series(x, wb, true), prec.bits()))
}

/// Airy functions and derivatives for complex `|z| <= 30`.
pub fn airy_complex(z: &Complex, prec: Precision) -> Result<AiryValues<Complex>> {
    let r = super::cabs_f64(z);
    if !r.is_finite() || r > AIRY_X_MAX {
        return Err(Error::Domain(format!("|z| = {r} exceeds {AIRY_X_MAX}")));
    }
    let wb = airy_bits(prec, r);
    Ok(round(series(z, wb, true), prec.bits()))
}

/// `Ai(x) cos(pi alpha) + Bi(x) sin(pi alpha)`.
pub fn airy_comb_eval(alpha: &Rational, x: &Float, prec: Precision) -> Result<Float> {
    check_real(x)?;
    let wb = airy_bits(prec, x.to_f64().abs());
    let v = series(x, wb, false);
    let (s, c) = sin_cos_pi(alpha, wb);
    Ok(Float::with_val(prec.bits(), v.ai * c + v.bi * s))
}

/// Derivative of [`airy_comb_eval`] with respect to `x`.
pub fn airy_comb_deriv_eval(alpha: &Rational, x: &Float, prec: Precision) -> Result<Float> {
    check_real(x)?;
    let wb = airy_bits(prec, x.to_f64().abs());
    let v = series(x, wb, true);
    let (s, c) = sin_cos_pi(alpha, wb);
    Ok(Float::with_val(prec.bits(), v.ai_prime * c + v.bi_prime * s))
}

pub(crate) fn sin_cos_pi(alpha: &Rational, bits: u32) -> (Float, Float) {
    let a = rat(bits, alpha);
    (a.clone().sin_pi(), a.cos_pi())
}
