//! Truncated expansions of the phase function, its inverse and the Airy-zero
//! function, each with a rigorous remainder bound, and zero enclosures
//! formed from consecutive partial sums.

use std::cmp::Ordering;

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Rational};
use serde::{Deserialize, Serialize};

use crate::coeffs::{airy_coeff, mcmahon_coeff, phase_coeff};
use crate::error::{Error, Result};
use crate::report::fmt_rational;
use crate::specfun::{ln2, Precision};

/// Which family of zeros an index refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroFamily {
    Cylinder,
    Airy,
    AiryBiComplex,
}

impl std::str::FromStr for ZeroFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cylinder" => Ok(ZeroFamily::Cylinder),
            "airy" => Ok(ZeroFamily::Airy),
            "airy_bi_complex" | "bi-complex" => Ok(ZeroFamily::AiryBiComplex),
            _ => Err(Error::Config(format!("unknown zero family '{s}'"))),
        }
    }
}

/// A truncated expansion value with its remainder bound.
#[derive(Clone, Debug)]
pub struct BoundedValue<T> {
    pub value: T,
    /// Absolute bound on the remainder.
    pub bound: Float,
    pub n_terms: usize,
    pub sector_factor: Float,
    /// Bound on the bracketed series, for expansions with a prefactor.
    pub relative_bound: Option<Float>,
    /// On the positive axis, the sign the true remainder shares with the
    /// first neglected term.
    pub remainder_sign: Option<Ordering>,
}

/// Index data for one zero.
#[derive(Clone, Debug)]
pub struct ZeroIndex {
    pub family: ZeroFamily,
    pub nu: Option<Rational>,
    pub alpha: Rational,
    pub k: i64,
    pub kappa: Rational,
    /// `beta_{nu,kappa}` for cylinder zeros, `gamma_kappa` for Airy zeros.
    pub abscissa: Float,
}

/// Certified interval for a real zero.
#[derive(Clone, Debug)]
pub struct Enclosure {
    pub lo: Float,
    pub hi: Float,
    pub n_terms: usize,
    /// The first omitted term of the expansion of the zero itself.
    pub first_neglected: Float,
    pub index: ZeroIndex,
}

fn bits(prec: Precision) -> u32 {
    prec.with_extra(10).bits()
}

fn check_alpha(alpha: &Rational) -> Result<()> {
    if alpha.cmp0() == Ordering::Less || *alpha >= 1 {
        return Err(Error::Domain(format!("alpha = {} outside [0, 1)", fmt_rational(alpha))));
    }
    Ok(())
}

impl ZeroIndex {
    /// Index of the `k`-th positive zero of `J_nu cos(pi alpha) + Y_nu sin(pi alpha)`.
    pub fn cylinder(nu: &Rational, alpha: &Rational, k: i64, prec: Precision) -> Result<Self> {
        check_alpha(alpha)?;
        let kappa = Rational::from(alpha + k);
        let floor = (nu.clone().abs() - nu) / 2u32;
        if kappa <= floor {
            return Err(Error::Index(format!(
                "kappa = k + alpha = {} must exceed (|nu| - nu)/2 = {}",
                fmt_rational(&kappa),
                fmt_rational(&floor)
            )));
        }
        let shift = Rational::from(nu / 2u32) - Rational::from((1, 4));
        let b = bits(prec);
        let abscissa = Float::with_val(b, Constant::Pi) * Float::with_val(b, &kappa + shift);
        Ok(ZeroIndex { family: ZeroFamily::Cylinder, nu: Some(nu.clone()), alpha: alpha.clone(), k, kappa, abscissa })
    }

    /// Index of the `k`-th negative zero of `Ai cos(pi alpha) + Bi sin(pi alpha)`.
    pub fn airy(alpha: &Rational, k: i64, prec: Precision) -> Result<Self> {
        check_alpha(alpha)?;
        let kappa = k - alpha.clone();
        if kappa <= Rational::from((1, 6)) {
            return Err(Error::Index(format!(
                "kappa = k - alpha = {} must exceed 1/6; indexing starts at k = {}",
                fmt_rational(&kappa),
                first_airy_k(alpha)
            )));
        }
        let b = bits(prec);
        let abscissa = gamma_abscissa(&kappa, b);
        Ok(ZeroIndex { family: ZeroFamily::Airy, nu: None, alpha: alpha.clone(), k, kappa, abscissa })
    }
}

/// Smallest valid Airy index for a given `alpha`.
pub fn first_airy_k(alpha: &Rational) -> i64 {
    if *alpha < Rational::from((5, 6)) {
        1
    } else {
        2
    }
}

fn gamma_abscissa(kappa: &Rational, b: u32) -> Float {
    let f = Rational::from(kappa * 4u32) - 1u32;
    Float::with_val(b, Constant::Pi) * Float::with_val(b, f * Rational::from((3, 8)))
}

/// `1` when `|arg z| <= pi/4`, otherwise `|csc(2 arg z)|`.
pub fn sector_factor(z: &Complex, b: u32) -> Float {
    let re = z.real().clone().abs();
    let im = z.imag().clone().abs();
    if im <= re {
        return Float::with_val(b, 1);
    }
    // csc(2 phi) = |z|^2 / (2 |Re z| |Im z|)
    let n = Float::with_val(b, z.real() * z.real()) + Float::with_val(b, z.imag() * z.imag());
    n / (Float::with_val(b, &re * &im) * 2u32)
}

fn cabs(z: &Complex, b: u32) -> Float {
    Float::with_val(b, z.real().hypot_ref(z.imag()))
}

fn require_right_half(z: &Complex, what: &str) -> Result<()> {
    if z.real().is_nan() || z.imag().is_nan() || z.real().cmp0() != Some(Ordering::Greater) {
        return Err(Error::Domain(format!("{what} needs Re {what} > 0")));
    }
    Ok(())
}

fn is_real(z: &Complex) -> bool {
    z.imag().is_zero()
}

fn sign_of(x: &Float) -> Option<Ordering> {
    x.cmp0()
}

/// Generic odd-power expansion `lead + sum_{n<N} a_n / z^{2n-1}` with
/// bound `|a_N| / |z|^{2N-1}`.
fn odd_series(
    z: &Complex,
    lead: Complex,
    coeff: impl Fn(usize) -> Rational,
    n_terms: usize,
    b: u32,
) -> BoundedValue<Complex> {
    let zb = Complex::with_val(b, z);
    let inv = Complex::with_val(b, 1u32) / &zb;
    let inv2 = Complex::with_val(b, &inv * &inv);
    let mut pow = inv.clone();
    let mut value = lead;
    for n in 1..n_terms {
        let c = Float::with_val(b, coeff(n));
        value += Complex::with_val(b, &pow * &c);
        pow *= &inv2;
    }
    let c_n = Float::with_val(b, coeff(n_terms));
    let factor = sector_factor(&zb, b);
    let pow_abs = cabs(&pow, b);
    let term = Complex::with_val(b, &pow * &c_n);
    let bound = Float::with_val(b, &c_n.clone().abs() * &pow_abs) * &factor;
    let remainder_sign = if is_real(z) { sign_of(term.real()) } else { None };
    BoundedValue { value, bound, n_terms, sector_factor: factor, relative_bound: None, remainder_sign }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("number of terms must be positive".into()));
    }
    Ok(())
}

/// `theta_nu(z) ~ z - (nu/2 + 1/4) pi + sum_{n<N} t_n(nu) / z^{2n-1}` for `|nu| <= 3/2`.
pub fn theta_expand(nu: &Rational, z: &Complex, n_terms: usize, prec: Precision) -> Result<BoundedValue<Complex>> {
    check_n(n_terms)?;
    if nu.clone().abs() > Rational::from((3, 2)) {
        return Err(Error::UnsupportedOrder(format!("|nu| = {} exceeds 3/2", nu.to_f64().abs())));
    }
    require_right_half(z, "z")?;
    let b = bits(prec);
    let shift = Float::with_val(b, Constant::Pi) * Float::with_val(b, Rational::from(nu / 2u32) + Rational::from((1, 4)));
    let lead = Complex::with_val(b, z - shift);
    Ok(odd_series(z, lead, |n| phase_coeff(n).eval(nu), n_terms, b))
}

/// Real-axis form of [`theta_expand`].
pub fn theta_expand_real(nu: &Rational, x: &Float, n_terms: usize, prec: Precision) -> Result<BoundedValue<Float>> {
    let z = Complex::with_val(x.prec(), (x, 0));
    Ok(real_part(theta_expand(nu, &z, n_terms, prec)?))
}

fn real_part(v: BoundedValue<Complex>) -> BoundedValue<Float> {
    BoundedValue {
        value: v.value.real().clone(),
        bound: v.bound,
        n_terms: v.n_terms,
        sector_factor: v.sector_factor,
        relative_bound: v.relative_bound,
        remainder_sign: v.remainder_sign,
    }
}

fn check_mcmahon_order(nu: &Rational) -> Result<()> {
    if nu.clone().abs() >= Rational::from((1, 2)) {
        return Err(Error::Hypothesis(format!(
            "the inverse-phase bounds need |nu| < 1/2, got {}",
            fmt_rational(nu)
        )));
    }
    Ok(())
}

/// `X_nu(w) ~ w + sum_{n<N} c_n(nu) / w^{2n-1}` for `|nu| < 1/2`.
pub fn x_expand(nu: &Rational, w: &Complex, n_terms: usize, prec: Precision) -> Result<BoundedValue<Complex>> {
    check_n(n_terms)?;
    check_mcmahon_order(nu)?;
    require_right_half(w, "w")?;
    let b = bits(prec);
    x_expand_unchecked(nu, w, n_terms, b)
}

fn x_expand_unchecked(nu: &Rational, w: &Complex, n_terms: usize, b: u32) -> Result<BoundedValue<Complex>> {
    let lead = Complex::with_val(b, w);
    Ok(odd_series(w, lead, |n| mcmahon_coeff(n).eval(nu), n_terms, b))
}

/// Real-axis form of [`x_expand`].
pub fn x_expand_real(nu: &Rational, w: &Float, n_terms: usize, prec: Precision) -> Result<BoundedValue<Float>> {
    let z = Complex::with_val(w.prec(), (w, 0));
    Ok(real_part(x_expand(nu, &z, n_terms, prec)?))
}

/// `T(w) ~ w^{2/3} (1 + sum_{n<N} T_n / w^{2n})`, principal power.
pub fn t_expand(w: &Complex, n_terms: usize, prec: Precision) -> Result<BoundedValue<Complex>> {
    check_n(n_terms)?;
    require_right_half(w, "w")?;
    let b = bits(prec);
    let wb = Complex::with_val(b, w);
    let inv2 = Complex::with_val(b, 1u32) / Complex::with_val(b, &wb * &wb);
    let mut pow = inv2.clone();
    let mut series = Complex::with_val(b, 1u32);
    for n in 1..n_terms {
        series += Complex::with_val(b, &pow * &Float::with_val(b, airy_coeff(n)));
        pow *= &inv2;
    }
    let t_n = Float::with_val(b, airy_coeff(n_terms));
    let factor = sector_factor(&wb, b);
    let rel = cabs(&pow, b) * t_n.clone().abs() * &factor;
    let prefactor = Complex::with_val(b, (&wb).pow(Float::with_val(b, Rational::from((2, 3)))));
    let pre_abs = cabs(&prefactor, b);
    let value = Complex::with_val(b, &prefactor * &series);
    let remainder_sign = if is_real(w) { t_n.cmp0() } else { None };
    Ok(BoundedValue {
        value,
        bound: Float::with_val(b, &rel * &pre_abs),
        n_terms,
        sector_factor: factor,
        relative_bound: Some(rel),
        remainder_sign,
    })
}

/// Real-axis form of [`t_expand`].
pub fn t_expand_real(w: &Float, n_terms: usize, prec: Precision) -> Result<BoundedValue<Float>> {
    let z = Complex::with_val(w.prec(), (w, 0));
    Ok(real_part(t_expand(&z, n_terms, prec)?))
}

/// Partial sum with `n_terms` terms of the expansion of a real zero, and the
/// first omitted term. For Airy zeros both refer to `a = -T(gamma)`.
pub fn zero_partial_sum(index: &ZeroIndex, n_terms: usize, prec: Precision) -> Result<(Float, Float)> {
    check_n(n_terms)?;
    let b = bits(prec);
    let w = Complex::with_val(b, (&index.abscissa, 0));
    match index.family {
        ZeroFamily::Cylinder => {
            let nu = index.nu.as_ref().ok_or_else(|| Error::Domain("cylinder index without order".into()))?;
            check_mcmahon_order(nu)?;
            check_positive_beta(index)?;
            let s = x_expand_unchecked(nu, &w, n_terms, b)?;
            let c = Float::with_val(b, mcmahon_coeff(n_terms).eval(nu));
            let term = c / Float::with_val(b, (&index.abscissa).pow(2 * n_terms as i32 - 1));
            Ok((s.value.real().clone(), term))
        }
        ZeroFamily::Airy => {
            check_positive_gamma(index)?;
            let s = t_expand(&w, n_terms, prec)?;
            let g = &index.abscissa;
            let e = Float::with_val(b, Rational::from((2, 3))) - 2 * n_terms as u32;
            let term = Float::with_val(b, airy_coeff(n_terms)) * Float::with_val(b, g.pow(&e));
            Ok((-s.value.real().clone(), -term))
        }
        ZeroFamily::AiryBiComplex => Err(Error::Domain("complex zeros have no real enclosure".into())),
    }
}

fn check_positive_beta(index: &ZeroIndex) -> Result<()> {
    if index.abscissa.cmp0() != Some(Ordering::Greater) {
        return Err(Error::Hypothesis(format!(
            "beta = {} is not positive; the envelope property does not necessarily hold if beta < 0, \
             and beta = 0 is not covered",
            index.abscissa.to_f64()
        )));
    }
    Ok(())
}

fn check_positive_gamma(index: &ZeroIndex) -> Result<()> {
    if index.abscissa.cmp0() != Some(Ordering::Greater) {
        return Err(Error::Hypothesis(format!(
            "gamma = {} is not positive, so the expansion in inverse powers of gamma is unavailable",
            index.abscissa.to_f64()
        )));
    }
    Ok(())
}

fn enclose(index: ZeroIndex, n_terms: usize, prec: Precision) -> Result<Enclosure> {
    let (s0, term) = zero_partial_sum(&index, n_terms, prec)?;
    let (s1, _) = zero_partial_sum(&index, n_terms + 1, prec)?;
    let (lo, hi) = if s0 <= s1 { (s0, s1) } else { (s1, s0) };
    Ok(Enclosure { lo, hi, n_terms, first_neglected: term, index })
}

/// Interval for `j_{nu,kappa}` between the partial sums with `N` and `N+1` terms.
pub fn cylinder_zero_enclosure(nu: &Rational, alpha: &Rational, k: i64, n_terms: usize, prec: Precision) -> Result<Enclosure> {
    check_mcmahon_order(nu)?;
    let index = ZeroIndex::cylinder(nu, alpha, k, prec)?;
    check_positive_beta(&index)?;
    enclose(index, n_terms, prec)
}

/// Interval for the negative zero `a_kappa`, `kappa = k - alpha`.
pub fn airy_zero_enclosure(alpha: &Rational, k: i64, n_terms: usize, prec: Precision) -> Result<Enclosure> {
    let index = ZeroIndex::airy(alpha, k, prec)?;
    check_positive_gamma(&index)?;
    enclose(index, n_terms, prec)
}

/// Truncation near the smallest term, `max(1, round(abscissa))`.
pub fn optimal_truncation(abscissa: &Float) -> usize {
    let r = abscissa.to_f64().round();
    if r.is_finite() && r > 1.0 {
        r as usize
    } else {
        1
    }
}

/// Argument `w_k = (3 pi / 8)(4k - 1) + (3/4) i log 2` of the complex-zero expansion.
pub fn bi_zero_argument(k: i64, prec: Precision) -> Result<Complex> {
    if k < 1 {
        return Err(Error::Index(format!("complex Bi zeros are indexed from k = 1, got {k}")));
    }
    let b = bits(prec);
    let re = Float::with_val(b, Constant::Pi) * Float::with_val(b, Rational::from((3 * (4 * k - 1), 8)));
    let im = ln2(b) * 3u32 / 4u32;
    Ok(Complex::with_val(b, (re, im)))
}

/// Estimate of the `k`-th complex zero of `Bi` in the upper half-plane,
/// `e^{i pi/3} T(w_k)`, with the remainder bound inherited from `T`.
pub fn complex_bi_zero_estimate(k: i64, n_terms: usize, prec: Precision) -> Result<BoundedValue<Complex>> {
    let w = bi_zero_argument(k, prec)?;
    let t = t_expand(&w, n_terms, prec)?;
    let b = bits(prec);
    let third = Float::with_val(b, Constant::Pi) / 3u32;
    let (s, c) = third.sin_cos(Float::new(b));
    let rot = Complex::with_val(b, (c, s));
    Ok(BoundedValue { value: Complex::with_val(b, &t.value * &rot), ..t })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p() -> Precision {
        Precision::new(40).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn pi() -> Float {
        Float::with_val(200, Constant::Pi)
    }

    fn real(x: f64) -> Complex {
        Complex::with_val(200, (x, 0))
    }

    #[test]
    fn half_order_phase_has_no_correction() {
        let z = Complex::with_val(200, (3.0, 1.7));
        for n in 1..6 {
            let v = theta_expand(&q(1, 2), &z, n, p()).unwrap();
            let e = Complex::with_val(200, &z - pi() / 2u32);
            assert!(Complex::with_val(200, &v.value - &e).abs().real().to_f64() < 1e-45);
            assert!(v.bound.is_zero());
        }
    }

    #[test]
    fn three_halves_phase_partial_sums_converge() {
        let target = Float::with_val(200, 1u32) - pi() * 3u32 / 4u32;
        let v = theta_expand(&q(3, 2), &real(1.0), 20, p()).unwrap();
        let d = Float::with_val(200, v.value.real() - &target).abs().to_f64();
        assert!(d < 0.03, "{d}");
        let v = theta_expand(&q(3, 2), &real(1.0), 40, p()).unwrap();
        let d2 = Float::with_val(200, v.value.real() - &target).abs().to_f64();
        assert!(d2 < d);
    }

    #[test]
    fn x_expand_reproduces_classical_bounds() {
        let w = Float::with_val(200, pi() * 3u32 / 4u32);
        let v2 = x_expand_real(&q(0, 1), &w, 2, p()).unwrap();
        assert!((v2.value.to_f64() - 2.409_246_1).abs() < 1e-7);
        let v3 = x_expand_real(&q(0, 1), &w, 3, p()).unwrap();
        assert!((v3.value.to_f64() - 2.403_074_5).abs() < 1e-7);
        let v1 = x_expand_real(&q(1, 5), &w, 1, p()).unwrap();
        assert!(Float::with_val(200, &v1.value - &w).abs().to_f64() < 1e-45);
        let c1 = mcmahon_coeff(1).eval(&q(1, 5));
        let expect = Float::with_val(200, c1).abs() / &w;
        assert!(Float::with_val(200, &v1.bound - &expect).abs().to_f64() < 1e-45);
        assert!(x_expand_real(&q(1, 2), &w, 2, p()).is_err());
    }

    #[test]
    fn t_expand_first_term_and_sector() {
        let g = Float::with_val(200, pi() * 9u32 / 8u32);
        let v = t_expand_real(&g, 1, p()).unwrap();
        let rel = v.relative_bound.unwrap().to_f64();
        let expect = 5.0 / (48.0 * g.to_f64().powi(2));
        assert!((rel - expect).abs() < 1e-15);
        let s2 = t_expand_real(&g, 2, p()).unwrap().value.to_f64();
        let s3 = t_expand_real(&g, 3, p()).unwrap().value.to_f64();
        let a1 = 2.338_107_41;
        assert!(s2.min(s3) < a1 && a1 < s2.max(s3));
        let diag = Complex::with_val(200, (3, 3));
        assert_eq!(t_expand(&diag, 2, p()).unwrap().sector_factor, 1);
        let steep = Complex::with_val(200, (1, 3));
        let f = t_expand(&steep, 2, p()).unwrap().sector_factor.to_f64();
        assert!((f - 10.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_left_half_plane() {
        assert!(matches!(theta_expand(&q(0, 1), &real(-1.0), 2, p()), Err(Error::Domain(_))));
        assert!(matches!(t_expand(&Complex::with_val(64, (0, 1)), 2, p()), Err(Error::Domain(_))));
    }

    #[test]
    fn cylinder_enclosure_examples() {
        let e = cylinder_zero_enclosure(&q(0, 1), &q(0, 1), 1, 2, p()).unwrap();
        assert!((e.lo.to_f64() - 2.403_074_5).abs() < 1e-7);
        assert!((e.hi.to_f64() - 2.409_246_1).abs() < 1e-7);
        let j = 2.404_825_557_695_773;
        assert!(e.lo.to_f64() < j && j < e.hi.to_f64());
        let e1 = cylinder_zero_enclosure(&q(0, 1), &q(0, 1), 1, 1, p()).unwrap();
        let beta = 3.0 * std::f64::consts::PI / 4.0;
        assert!((e1.lo.to_f64() - beta).abs() < 1e-14);
        assert!((e1.hi.to_f64() - beta - 1.0 / (8.0 * beta)).abs() < 1e-14);
        let near = Rational::from((499_999, 1_000_000));
        for nu in [near.clone(), -near] {
            let e = cylinder_zero_enclosure(&nu, &q(0, 1), 1, 2, p()).unwrap();
            let w = Float::with_val(200, &e.hi - &e.lo).to_f64();
            assert!(w < 1e-5);
        }
    }

    #[test]
    fn cylinder_enclosure_refusals() {
        // kappa = 0 breaks the index condition
        assert!(matches!(cylinder_zero_enclosure(&q(2, 5), &q(0, 1), 0, 2, p()), Err(Error::Index(_))));
        // kappa = 0.1 gives beta < 0
        assert!(matches!(cylinder_zero_enclosure(&q(0, 1), &q(1, 10), 0, 2, p()), Err(Error::Hypothesis(_))));
        // beta = 0 exactly
        assert!(matches!(cylinder_zero_enclosure(&q(0, 1), &q(1, 4), 0, 2, p()), Err(Error::Hypothesis(_))));
        assert!(matches!(cylinder_zero_enclosure(&q(1, 2), &q(0, 1), 1, 2, p()), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn airy_enclosure_examples() {
        let e = airy_zero_enclosure(&q(0, 1), 1, 2, p()).unwrap();
        let a1 = -2.338_107_410_459_767;
        assert!(e.lo.to_f64() < a1 && a1 < e.hi.to_f64());
        let e = airy_zero_enclosure(&q(1, 2), 1, 2, p()).unwrap();
        let b1 = -1.173_713_222_709_128;
        assert!(e.lo.to_f64() < b1 && b1 < e.hi.to_f64());
        assert!(matches!(airy_zero_enclosure(&q(9, 10), 1, 2, p()), Err(Error::Index(_))));
        assert_eq!(first_airy_k(&q(5, 6)), 2);
        assert_eq!(first_airy_k(&q(1, 2)), 1);
    }

    #[test]
    fn truncation_rule() {
        assert_eq!(optimal_truncation(&Float::with_val(64, 3.0 * std::f64::consts::PI / 4.0)), 2);
        assert_eq!(optimal_truncation(&Float::with_val(64, 0.4)), 1);
        assert_eq!(optimal_truncation(&Float::with_val(64, 20)), 20);
    }

    #[test]
    fn complex_bi_estimate_argument() {
        let w = bi_zero_argument(1, p()).unwrap();
        let arg = w.imag().to_f64().atan2(w.real().to_f64());
        assert!((arg - 0.146).abs() < 1e-3);
        let v = complex_bi_zero_estimate(1, 6, p()).unwrap();
        assert_eq!(v.sector_factor, 1);
        assert!(v.value.imag().to_f64() > 0.0);
        assert!(matches!(complex_bi_zero_estimate(0, 2, p()), Err(Error::Index(_))));
    }

    proptest! {
        #[test]
        fn enclosure_width_is_first_neglected_term(num in -49i64..=49, k in 1i64..12, n in 1usize..8) {
            let nu = q(num, 100);
            let e = cylinder_zero_enclosure(&nu, &q(0, 1), k, n, p()).unwrap();
            prop_assert!(e.lo <= e.hi);
            let width = Float::with_val(200, &e.hi - &e.lo);
            let t = e.first_neglected.clone().abs();
            let rel = Float::with_val(200, &width - &t).abs() / t.clone().max(&Float::with_val(200, 1e-300));
            prop_assert!(rel.to_f64() < 1e-30);
        }

        #[test]
        fn bound_nonnegative_and_unit_factor_on_axis(num in -150i64..=150, x in 0.5f64..50.0, n in 1usize..10) {
            let v = theta_expand_real(&q(num, 100), &Float::with_val(200, x), n, p()).unwrap();
            prop_assert!(v.bound.cmp0() != Some(Ordering::Less));
            prop_assert_eq!(v.sector_factor.to_f64(), 1.0);
        }
    }
}
