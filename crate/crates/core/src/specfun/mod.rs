//! Extended-precision special functions.
//!
//! Everything here is computed from convergent ascending (Maclaurin) series
//! at an elevated working precision, never from asymptotic expansions, so
//! these routines can serve as an independent oracle for the expansions in
//! [`crate::asymp`].

mod airy;
mod bessel;
mod phase;

pub use airy::{airy_comb_eval, airy_comb_deriv_eval, airy_complex, airy_pair, airy_pair_with_derivs, AiryValues};
pub use bessel::{
    bessel_first_kind, bessel_j_complex, bessel_second_kind, bessel_y_complex, cylinder_eval,
    hankel_pair_complex, modified_pair, theta_imag_axis,
};
pub use phase::{modulus_phase_eval, phase_derivative, PhasePoint, ThetaTracker};

use std::ops::{AddAssign, DivAssign, MulAssign, Neg, SubAssign};

use rug::float::Constant;
use rug::{Complex, Float, Rational};

use crate::error::{Error, Result};

/// Real value at a configurable working precision.
pub type ExtFloat = Float;
/// Complex value whose components share one precision.
pub type ExtComplex = Complex;

/// Largest real argument accepted by the series evaluators.
pub const X_MAX: f64 = 200.0;

const BITS_PER_DIGIT: f64 = std::f64::consts::LOG2_10;
const GUARD_DIGITS: u32 = 10;

/// Target accuracy in decimal digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Precision(u32);

impl Precision {
    pub const MIN: u32 = 20;
    pub const MAX: u32 = 1000;

    pub fn new(digits: u32) -> Result<Self> {
        if !(Self::MIN..=Self::MAX).contains(&digits) {
            return Err(Error::Config(format!(
                "precision of {digits} digits outside [{}, {}]",
                Self::MIN,
                Self::MAX
            )));
        }
        Ok(Precision(digits))
    }

    pub fn digits(self) -> u32 {
        self.0
    }

    /// Bits needed to carry `digits` decimal digits.
    pub fn bits(self) -> u32 {
        digits_to_bits(self.0)
    }

    /// Working precision for an argument of magnitude `scale`: extra digits
    /// absorb the `e^scale` growth of alternating ascending series.
    pub fn working_bits(self, scale: f64) -> u32 {
        working_bits(self.0, scale)
    }

    pub fn with_extra(self, digits: u32) -> Precision {
        Precision(self.0 + digits)
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision(50)
    }
}

pub(crate) fn digits_to_bits(digits: u32) -> u32 {
    (digits as f64 * BITS_PER_DIGIT).ceil() as u32 + 4
}

pub(crate) fn working_bits(digits: u32, scale: f64) -> u32 {
    let extra = (0.9 * scale.abs()).ceil() as u32;
    digits_to_bits(digits + extra + GUARD_DIGITS)
}

pub(crate) fn pi(bits: u32) -> Float {
    Float::with_val(bits, Constant::Pi)
}

pub(crate) fn euler_gamma(bits: u32) -> Float {
    Float::with_val(bits, Constant::Euler)
}

pub(crate) fn ln2(bits: u32) -> Float {
    Float::with_val(bits, Constant::Log2)
}

pub(crate) fn rat(bits: u32, q: &Rational) -> Float {
    Float::with_val(bits, q)
}

/// Field operations shared by the real and complex series code.
pub trait Scalar:
    Clone
    + Neg<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
    + for<'a> DivAssign<&'a Self>
    + for<'a> MulAssign<&'a Float>
    + for<'a> DivAssign<&'a Float>
    + MulAssign<u32>
    + DivAssign<u32>
{
    fn from_real(x: &Float, bits: u32) -> Self;
    /// Binary exponent of the largest component; `None` for zero.
    fn mag_exp(&self) -> Option<i32>;
    /// Principal natural logarithm.
    fn ln_principal(&self) -> Self;
    /// Principal power `self^e`.
    fn pow_principal(&self, e: &Float) -> Self;
    fn bits(&self) -> u32;
    fn rounded(self, bits: u32) -> Self;
}

impl Scalar for Float {
    fn from_real(x: &Float, bits: u32) -> Self {
        Float::with_val(bits, x)
    }
    fn mag_exp(&self) -> Option<i32> {
        self.get_exp()
    }
    fn ln_principal(&self) -> Self {
        self.clone().ln()
    }
    fn pow_principal(&self, e: &Float) -> Self {
        use rug::ops::Pow;
        Float::with_val(self.prec(), self.pow(e))
    }
    fn bits(&self) -> u32 {
        self.prec()
    }
    fn rounded(mut self, bits: u32) -> Self {
        self.set_prec(bits);
        self
    }
}

impl Scalar for Complex {
    fn from_real(x: &Float, bits: u32) -> Self {
        Complex::with_val(bits, (x, 0))
    }
    fn mag_exp(&self) -> Option<i32> {
        match (self.real().get_exp(), self.imag().get_exp()) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        }
    }
    fn ln_principal(&self) -> Self {
        self.clone().ln()
    }
    fn pow_principal(&self, e: &Float) -> Self {
        use rug::ops::Pow;
        Complex::with_val(self.prec(), self.pow(e))
    }
    fn bits(&self) -> u32 {
        self.prec().0
    }
    fn rounded(mut self, bits: u32) -> Self {
        self.set_prec(bits);
        self
    }
}

/// `|z|` of a complex number as a low-precision float.
pub(crate) fn cabs_f64(z: &Complex) -> f64 {
    z.real().to_f64().hypot(z.imag().to_f64())
}

/// Converts a real value to a decimal string with `digits` significant digits.
pub fn to_decimal(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let s = x.to_string_radix(10, Some(digits));
    // Plain notation for moderate exponents keeps output easy to read.
    match s.split_once('e') {
        Some((mant, exp)) => {
            let exp: i32 = exp.parse().unwrap_or(0);
            if (-6..=6).contains(&exp) {
                shift_decimal(mant, exp)
            } else {
                s
            }
        }
        None => s,
    }
}

fn shift_decimal(mant: &str, exp: i32) -> String {
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    let digits = format!("{ip}{fp}");
    let point = ip.len() as i32 + exp;
    let body = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), digits)
    } else if point as usize >= digits.len() {
        format!("{}{}", digits, "0".repeat(point as usize - digits.len()))
    } else {
        format!("{}.{}", &digits[..point as usize], &digits[point as usize..])
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// Decimal rendering of a complex value as `re+imi`.
pub fn complex_to_decimal(z: &Complex, digits: usize) -> String {
    let re = to_decimal(z.real(), digits);
    let im = to_decimal(z.imag(), digits);
    if im.starts_with('-') {
        format!("{re}{im}i")
    } else {
        format!("{re}+{im}i")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_limits() {
        assert!(Precision::new(19).is_err());
        assert!(Precision::new(1001).is_err());
        let p = Precision::new(50).unwrap();
        assert!(p.bits() >= 166);
        assert!(p.working_bits(100.0) > p.bits() + 90 * 3);
    }

    #[test]
    fn decimal_rendering() {
        let x = Float::with_val(200, 2.5);
        assert_eq!(to_decimal(&x, 5), "2.5000");
        let y = Float::with_val(200, -0.00125);
        assert_eq!(to_decimal(&y, 3), "-0.00125");
        let z = Complex::with_val(100, (1.5, -2));
        assert_eq!(complex_to_decimal(&z, 3), "1.50-2.00i");
    }
}
