//! Exact rational arithmetic and dense polynomials in `mu = nu^2`.
//!
//! Every coefficient family is a polynomial in the square of the order, so
//! [`PolyMu`] stores coefficients of powers of `mu` rather than of `nu`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

/// Exact rational with arbitrary-precision numerator and denominator.
///
/// `rug::Rational` keeps values canonical (positive denominator, reduced).
pub type BigRational = Rational;

/// Builds the canonical reduced rational `num/den`.
pub fn rat_normalize(num: impl Into<Integer>, den: impl Into<Integer>) -> Result<BigRational> {
    let den = den.into();
    if den == 0 {
        return Err(Error::Domain("zero denominator".into()));
    }
    Ok(Rational::from((num.into(), den)))
}

/// Dense polynomial in `mu = nu^2` with exact rational coefficients.
///
/// Index `i` of `coeffs` holds the coefficient of `mu^i`. Trailing zeros are
/// always trimmed, so the zero polynomial has no coefficients at all.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PolyMu {
    coeffs: Vec<Rational>,
}

impl PolyMu {
    pub fn zero() -> Self {
        PolyMu { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        PolyMu::from_coeffs(vec![c])
    }

    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        let mut p = PolyMu { coeffs };
        p.trim();
        p
    }

    /// Convenience constructor from `(num, den)` pairs, lowest power first.
    pub fn from_ratios(pairs: &[(i64, i64)]) -> Self {
        PolyMu::from_coeffs(
            pairs
                .iter()
                .map(|&(n, d)| rat_normalize(n, d).expect("nonzero denominator"))
                .collect(),
        )
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.cmp0().is_eq()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree in `mu`; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `mu^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn scale(&self, c: &Rational) -> PolyMu {
        if c.cmp0().is_eq() {
            return PolyMu::zero();
        }
        PolyMu::from_coeffs(self.coeffs.iter().map(|a| Rational::from(a * c)).collect())
    }

    /// Evaluates at `mu` directly.
    pub fn eval_mu(&self, mu: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= mu;
            acc += c;
        }
        acc
    }

    /// Evaluates exactly at the order `nu` (i.e. at `mu = nu^2`).
    pub fn eval(&self, nu: &Rational) -> Rational {
        self.eval_mu(&Rational::from(nu * nu))
    }

    /// Evaluates at a floating-point order, correctly rounded to `prec` bits.
    ///
    /// A finite `Float` is an exact dyadic rational, so the polynomial is
    /// evaluated exactly and rounded once.
    pub fn eval_float(&self, nu: &Float, prec: u32) -> Float {
        let q = nu
            .to_rational()
            .expect("finite order required for polynomial evaluation");
        Float::with_val(prec, self.eval(&q))
    }

    /// Renders the coefficient list as `"num/den"` strings.
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(rational_string).collect()
    }
}

/// `"num/den"` form, with integers printed as `"num/1"`.
pub fn rational_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

impl fmt::Display for PolyMu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.cmp0().is_ne())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("({c})mu"),
                _ => format!("({c})mu^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl Add for &PolyMu {
    type Output = PolyMu;
    fn add(self, rhs: &PolyMu) -> PolyMu {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        PolyMu::from_coeffs((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &PolyMu {
    type Output = PolyMu;
    fn sub(self, rhs: &PolyMu) -> PolyMu {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        PolyMu::from_coeffs((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &PolyMu {
    type Output = PolyMu;
    fn mul(self, rhs: &PolyMu) -> PolyMu {
        if self.is_zero() || rhs.is_zero() {
            return PolyMu::zero();
        }
        let mut out = vec![Rational::new(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += Rational::from(a * b);
            }
        }
        PolyMu::from_coeffs(out)
    }
}

impl Neg for &PolyMu {
    type Output = PolyMu;
    fn neg(self) -> PolyMu {
        PolyMu::from_coeffs(self.coeffs.iter().map(|c| Rational::from(-c)).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for PolyMu {
            type Output = PolyMu;
            fn $m(self, rhs: PolyMu) -> PolyMu {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// The arithmetic operations needed by the coefficient recurrences.
#[derive(Clone, Debug)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
    Scale(Rational),
}

/// Applies `op` to `a` and `b`; `Scale` ignores `b`.
pub fn poly_arith(a: &PolyMu, b: &PolyMu, op: &PolyOp) -> PolyMu {
    match op {
        PolyOp::Add => a + b,
        PolyOp::Sub => a - b,
        PolyOp::Mul => a * b,
        PolyOp::Scale(c) => a.scale(c),
    }
}

/// Binomial coefficient `C(n, k)` as an exact integer.
pub fn binomial(n: u32, k: u32) -> Integer {
    Integer::from(Integer::binomial_u(n, k))
}

/// Parses a decimal (`-0.45`, `1e-3`) or fraction (`1/3`) literal exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Domain(format!("cannot parse `{s}` as an exact rational"));
    if let Some((n, d)) = s.split_once('/') {
        let n: Rational = parse_rational(n)?;
        let d: Rational = parse_rational(d)?;
        if d.cmp0().is_eq() {
            return Err(Error::Domain("zero denominator".into()));
        }
        return Ok(n / d);
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all = format!("{int_part}{frac_part}");
    let num = Integer::from_str_radix(if all.is_empty() { "0" } else { &all }, 10).map_err(|_| bad())?;
    let scale = exp - frac_part.len() as i32;
    let mut q = Rational::from(num);
    if scale >= 0 {
        q *= Integer::from(Integer::u_pow_u(10, scale as u32));
    } else {
        q /= Integer::from(Integer::u_pow_u(10, (-scale) as u32));
    }
    if neg {
        q = -q;
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        rat_normalize(n, d).unwrap()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(r(2, 4), r(1, 2));
        assert_eq!(rat_normalize(-3, -6).unwrap(), r(1, 2));
        let z = rat_normalize(0, 7).unwrap();
        assert_eq!(*z.numer(), 0);
        assert_eq!(*z.denom(), 1);
        assert!(matches!(rat_normalize(1, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn square_of_binomial() {
        let p = PolyMu::from_ratios(&[(-1, 8), (1, 2)]);
        let sq = &p * &p;
        assert_eq!(sq, PolyMu::from_ratios(&[(1, 64), (-8, 64), (16, 64)]));
    }

    #[test]
    fn inverse_and_zero_scale() {
        let p = PolyMu::from_ratios(&[(3, 7), (-2, 5), (1, 9)]);
        assert!((&p + &(-&p)).is_zero());
        assert!(p.scale(&Rational::new()).is_zero());
        assert_eq!(poly_arith(&p, &p, &PolyOp::Sub), PolyMu::zero());
        assert_eq!(poly_arith(&p, &PolyMu::zero(), &PolyOp::Scale(r(2, 1))), &p + &p);
    }

    #[test]
    fn evaluation_examples() {
        let t1 = PolyMu::from_ratios(&[(-1, 8), (1, 2)]);
        assert_eq!(t1.eval(&r(0, 1)), r(-1, 8));
        assert_eq!(t1.eval(&r(1, 2)), r(0, 1));
        assert_eq!(t1.eval(&r(3, 2)), r(1, 1));
        let f = t1.eval_float(&Float::with_val(64, 1.5), 64);
        assert_eq!(f, 1);
    }

    #[test]
    fn degree_and_trim() {
        let p = PolyMu::from_coeffs(vec![r(1, 1), r(0, 1), r(0, 1)]);
        assert_eq!(p.degree(), Some(0));
        assert_eq!(PolyMu::zero().degree(), None);
    }

    #[test]
    fn parse_literals() {
        assert_eq!(parse_rational("-0.45").unwrap(), r(-9, 20));
        assert_eq!(parse_rational("1/3").unwrap(), r(1, 3));
        assert_eq!(parse_rational("1e-3").unwrap(), r(1, 1000));
        assert_eq!(parse_rational("2").unwrap(), r(2, 1));
        assert_eq!(parse_rational(".5").unwrap(), r(1, 2));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    fn small_poly() -> impl Strategy<Value = PolyMu> {
        prop::collection::vec((-20i64..20, 1i64..9), 0..5).prop_map(|v| PolyMu::from_ratios(&v))
    }

    proptest! {
        #[test]
        fn product_evaluates_to_product(a in small_poly(), b in small_poly(), n in -30i64..30, d in 1i64..12) {
            let nu = r(n, d);
            let lhs = (&a * &b).eval(&nu);
            let rhs = a.eval(&nu) * b.eval(&nu);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn normalization_is_idempotent(n in -1000i64..1000, d in prop::sample::select(vec![-12i64, -5, -1, 1, 3, 8, 100])) {
            let once = rat_normalize(n, d).unwrap();
            let twice = rat_normalize(once.numer().clone(), once.denom().clone()).unwrap();
            prop_assert_eq!(once.clone(), twice);
            prop_assert!(*once.denom() > 0);
        }
    }
}
