//! Complex numbers with binary floating-point parts at a configurable precision.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::ops::{BitTest, UnsignedAbs};
use dashu_int::IBig;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Signed, Zero};

use crate::poly::GaussRat;

/// Binary float with round-half-even.
pub type Float = FBig<HalfEven, 2>;

/// Default working precision in bits.
pub const DEFAULT_PRECISION: usize = 128;

pub(crate) fn bigint_to_ibig(n: &BigInt) -> IBig {
    IBig::from_le_bytes(&n.to_signed_bytes_le())
}

pub(crate) fn ibig_to_bigint(n: &IBig) -> BigInt {
    BigInt::from_signed_bytes_le(&n.to_le_bytes())
}

pub(crate) fn float_from_rational(r: &BigRational, prec: usize) -> Float {
    let num = Float::from(bigint_to_ibig(r.numer())).with_precision(prec).value();
    if r.denom() == &BigInt::from(1) {
        return num;
    }
    let den = Float::from(bigint_to_ibig(r.denom())).with_precision(prec).value();
    num / den
}

/// Exact rational value of a finite float.
pub(crate) fn float_to_rational(x: &Float) -> BigRational {
    let repr = x.repr();
    let sig = ibig_to_bigint(repr.significand());
    let exp = repr.exponent();
    if exp >= 0 {
        BigRational::from_integer(sig << (exp as usize))
    } else {
        BigRational::new(sig, BigInt::from(1) << ((-exp) as usize))
    }
}

pub(crate) fn float_from_f64(v: f64, prec: usize) -> Float {
    Float::try_from(v).expect("finite f64").with_precision(prec).value()
}

pub(crate) fn float_to_f64(x: &Float) -> f64 {
    x.to_f64().value()
}

/// Scientific decimal with `digits` significant digits, e.g. `-1.2500e-3`.
pub(crate) fn format_decimal(r: &BigRational, digits: usize) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let a = r.abs();
    // Estimate the decimal exponent from bit lengths, then correct.
    let bits = a.numer().bits() as f64 - a.denom().bits() as f64;
    let mut k = (bits * std::f64::consts::LOG10_2).floor() as i64;
    let ten = BigInt::from(10);
    let pow10 = |e: i64| -> BigRational {
        if e >= 0 {
            BigRational::from_integer(num::pow(ten.clone(), e as usize))
        } else {
            BigRational::new(BigInt::from(1), num::pow(ten.clone(), (-e) as usize))
        }
    };
    loop {
        if a < pow10(k) {
            k -= 1;
        } else if a >= pow10(k + 1) {
            k += 1;
        } else {
            break;
        }
    }
    let scaled = &a * pow10(digits as i64 - 1 - k);
    let mut m = scaled.round().to_integer();
    if m >= num::pow(ten.clone(), digits) {
        m /= &ten;
        k += 1;
    }
    let s = m.to_string();
    let (head, tail) = s.split_at(1);
    let tail = tail.trim_end_matches('0');
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(head);
    if !tail.is_empty() {
        out.push('.');
        out.push_str(tail);
    }
    if k != 0 {
        out.push_str(&format!("e{}", k));
    }
    out
}

/// Complex number with real and imaginary parts at a shared precision.
#[derive(Clone, PartialEq)]
pub struct Cx {
    pub re: Float,
    pub im: Float,
}

impl Cx {
    pub fn zero(prec: usize) -> Self {
        Cx { re: Float::ZERO.with_precision(prec).value(), im: Float::ZERO.with_precision(prec).value() }
    }

    pub fn one(prec: usize) -> Self {
        Cx { re: Float::ONE.with_precision(prec).value(), im: Float::ZERO.with_precision(prec).value() }
    }

    pub fn from_f64(re: f64, im: f64, prec: usize) -> Self {
        Cx { re: float_from_f64(re, prec), im: float_from_f64(im, prec) }
    }

    pub fn real(re: f64, prec: usize) -> Self {
        Self::from_f64(re, 0.0, prec)
    }

    pub fn from_gauss(g: &GaussRat, prec: usize) -> Self {
        Cx { re: float_from_rational(&g.re, prec), im: float_from_rational(&g.im, prec) }
    }

    pub fn from_rationals(re: &BigRational, im: &BigRational, prec: usize) -> Self {
        Cx { re: float_from_rational(re, prec), im: float_from_rational(im, prec) }
    }

    /// Exact Gaussian-rational value of the stored binary floats.
    pub fn to_gauss(&self) -> GaussRat {
        GaussRat::new(float_to_rational(&self.re), float_to_rational(&self.im))
    }

    pub fn precision(&self) -> usize {
        self.re.precision().max(self.im.precision())
    }

    pub fn is_zero(&self) -> bool {
        self.re.repr().is_zero() && self.im.repr().is_zero()
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (float_to_f64(&self.re), float_to_f64(&self.im))
    }

    /// Modulus, evaluated in double precision.
    pub fn abs(&self) -> f64 {
        let (a, b) = self.to_f64_pair();
        a.hypot(b)
    }

    pub fn conj(&self) -> Self {
        Cx { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> Float {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn scale(&self, s: &Float) -> Self {
        Cx { re: &self.re * s, im: &self.im * s }
    }

    pub fn scale_i64(&self, s: i64) -> Self {
        let f = Float::from(s);
        self.scale(&f)
    }

    /// Multiplicative inverse; `None` at zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Cx { re: &self.re / &n, im: -(&self.im / &n) })
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Cx::one(self.precision());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Decimal strings with enough significant digits to round-trip at this precision.
    pub fn to_decimal_strings(&self) -> (String, String) {
        let digits = decimal_digits_for(self.precision());
        (
            format_decimal(&float_to_rational(&self.re), digits),
            format_decimal(&float_to_rational(&self.im), digits),
        )
    }

    /// Upper bound `k` with `|re|, |im| < 2^k`; `None` at zero.
    pub(crate) fn log2_bound(&self) -> Option<isize> {
        let part = |x: &Float| -> Option<isize> {
            let r = x.repr();
            if r.is_zero() {
                None
            } else {
                Some(r.exponent() + r.significand().unsigned_abs().bit_len() as isize)
            }
        };
        match (part(&self.re), part(&self.im)) {
            (None, None) => None,
            (a, b) => Some(a.unwrap_or(isize::MIN).max(b.unwrap_or(isize::MIN))),
        }
    }

    pub fn with_precision(&self, prec: usize) -> Self {
        Cx { re: self.re.clone().with_precision(prec).value(), im: self.im.clone().with_precision(prec).value() }
    }
}

/// Significant decimal digits needed to round-trip `prec` bits.
pub(crate) fn decimal_digits_for(prec: usize) -> usize {
    ((prec as f64) * std::f64::consts::LOG10_2).ceil() as usize + 2
}

impl fmt::Debug for Cx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.to_f64_pair();
        write!(f, "({:e}{:+e}i)", a, b)
    }
}

impl fmt::Display for Cx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.to_decimal_strings();
        write!(f, "{} + {}*i", a, b)
    }
}

impl<'a> Add<&'a Cx> for &'a Cx {
    type Output = Cx;
    fn add(self, o: &Cx) -> Cx {
        Cx { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl<'a> Sub<&'a Cx> for &'a Cx {
    type Output = Cx;
    fn sub(self, o: &Cx) -> Cx {
        Cx { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl<'a> Mul<&'a Cx> for &'a Cx {
    type Output = Cx;
    fn mul(self, o: &Cx) -> Cx {
        let im_zero = self.im.repr().is_zero() && o.im.repr().is_zero();
        if im_zero {
            return Cx { re: &self.re * &o.re, im: self.im.clone() };
        }
        Cx {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Neg for &Cx {
    type Output = Cx;
    fn neg(self) -> Cx {
        Cx { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl Neg for Cx {
    type Output = Cx;
    fn neg(self) -> Cx {
        Cx { re: -self.re, im: -self.im }
    }
}
