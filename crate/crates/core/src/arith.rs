//! Arbitrary-precision scalars.
//!
//! [`BigReal`] and [`BigComplex`] carry their working precision (in decimal
//! digits) with the value; binary operations run at the larger of the two
//! operand precisions. [`BigRational`] is exact and always in lowest terms.
//! Everything is backed by MPFR/GMP through `rug`, so results are
//! deterministic for identical inputs and precision.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

/// Smallest accepted working precision, in decimal digits.
pub const MIN_DIGITS: u32 = 50;
/// Default working precision, in decimal digits.
pub const DEFAULT_DIGITS: u32 = 250;

const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Working precision context. Constructing values through a context stamps
/// them with its precision; there is no global precision state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Precision {
    digits: u32,
}

/// Builds a precision context of `digits` decimal digits.
pub fn with_precision(digits: u32) -> Result<Precision> {
    Precision::new(digits)
}

impl Default for Precision {
    fn default() -> Self {
        Precision {
            digits: DEFAULT_DIGITS,
        }
    }
}

impl Precision {
    pub fn new(digits: u32) -> Result<Self> {
        if digits < MIN_DIGITS {
            return Err(Error::Config(format!(
                "working precision must be at least {MIN_DIGITS} digits, got {digits}"
            )));
        }
        Ok(Precision { digits })
    }

    pub fn digits(self) -> u32 {
        self.digits
    }

    pub fn bits(self) -> u32 {
        digits_to_bits(self.digits)
    }

    /// A context with `extra` more digits, used for guard digits inside
    /// computations that cancel.
    pub fn extended(self, extra: u32) -> Precision {
        Precision {
            digits: self.digits + extra,
        }
    }

    /// Doubled precision, for cross-checking a computation against itself.
    pub fn doubled(self) -> Precision {
        Precision {
            digits: self.digits * 2,
        }
    }

    /// Relative size of one unit in the last working digit, `10^-digits`.
    pub fn epsilon(self) -> BigReal {
        self.int(10).powi(-(self.digits as i32))
    }

    /// `10^exp` at this precision.
    pub fn pow10(self, exp: i32) -> BigReal {
        self.int(10).powi(exp)
    }

    pub fn zero(self) -> BigReal {
        self.int(0)
    }

    pub fn one(self) -> BigReal {
        self.int(1)
    }

    pub fn int(self, v: i64) -> BigReal {
        BigReal::from_float(Float::with_val(self.bits(), v), self.digits)
    }

    pub fn integer(self, v: &Integer) -> BigReal {
        BigReal::from_float(Float::with_val(self.bits(), v), self.digits)
    }

    /// `p/q`, correctly rounded.
    pub fn ratio(self, p: i64, q: i64) -> BigReal {
        assert!(q != 0, "zero denominator");
        let r = Rational::from((p, q));
        BigReal::from_float(Float::with_val(self.bits(), &r), self.digits)
    }

    /// Exact conversion of a binary double.
    pub fn from_f64(self, v: f64) -> BigReal {
        BigReal::from_float(Float::with_val(self.bits(), v), self.digits)
    }

    pub fn pi(self) -> BigReal {
        BigReal::from_float(Float::with_val(self.bits(), Constant::Pi), self.digits)
    }

    /// Parses a decimal string such as `"0.9"`, `"-1.5e-3"` or a rational
    /// `"9/10"`.
    pub fn parse(self, s: &str) -> Result<BigReal> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let q: Rational = format!("{}/{}", p.trim(), q.trim())
                .parse()
                .map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
            return Ok(self.rational(&BigRational(q)));
        }
        let parsed = Float::parse(s).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        let v = Float::with_val(self.bits(), parsed);
        if !v.is_finite() {
            return Err(Error::Parse(format!("{s:?} is not finite")));
        }
        Ok(BigReal::from_float(v, self.digits))
    }

    /// Correctly rounded conversion of an exact rational.
    pub fn rational(self, q: &BigRational) -> BigReal {
        BigReal::from_float(Float::with_val(self.bits(), &q.0), self.digits)
    }

    pub fn complex(self, re: f64, im: f64) -> BigComplex {
        BigComplex::new(self.from_f64(re), self.from_f64(im))
    }

    pub fn czero(self) -> BigComplex {
        BigComplex::new(self.zero(), self.zero())
    }

    /// `exp(i theta)`.
    pub fn cis(self, theta: &BigReal) -> BigComplex {
        let theta = theta.at(self);
        BigComplex::new(theta.cos(), theta.sin())
    }
}

/// Converts a requested accuracy in decimal digits into MPFR bits.
pub fn digits_to_bits(digits: u32) -> u32 {
    (digits as f64 * LOG2_10).ceil() as u32
}

// ---------------------------------------------------------------------------
// BigReal
// ---------------------------------------------------------------------------

/// Real number with an attached working precision.
#[derive(Clone, Debug)]
pub struct BigReal {
    value: Float,
    digits: u32,
}

impl BigReal {
    pub(crate) fn from_float(value: Float, digits: u32) -> Self {
        BigReal { value, digits }
    }

    pub fn precision(&self) -> Precision {
        Precision {
            digits: self.digits,
        }
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn as_float(&self) -> &Float {
        &self.value
    }

    fn bits(&self) -> u32 {
        digits_to_bits(self.digits)
    }

    fn wrap(&self, v: Float) -> BigReal {
        BigReal {
            value: v,
            digits: self.digits,
        }
    }

    /// Re-rounds (or widens) this value to another precision.
    pub fn at(&self, prec: Precision) -> BigReal {
        BigReal {
            value: Float::with_val(prec.bits(), &self.value),
            digits: prec.digits,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }

    pub fn is_sign_negative(&self) -> bool {
        self.value.is_sign_negative() && !self.value.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn to_integer(&self) -> Option<Integer> {
        self.value.to_integer()
    }

    /// `log10 |x|` as a double; `-inf` for zero. Valid far outside the
    /// double exponent range.
    pub fn log10_abs(&self) -> f64 {
        if self.value.is_zero() {
            return f64::NEG_INFINITY;
        }
        let (mant, exp) = self.value.to_f64_exp();
        mant.abs().log10() + exp as f64 * std::f64::consts::LOG10_2
    }

    pub fn abs(&self) -> BigReal {
        self.wrap(Float::with_val(self.bits(), self.value.abs_ref()))
    }

    pub fn sqrt(&self) -> BigReal {
        self.wrap(Float::with_val(self.bits(), self.value.sqrt_ref()))
    }

    pub fn exp(&self) -> BigReal {
        self.wrap(Float::with_val(self.bits(), self.value.exp_ref()))
    }

    pub fn ln(&self) -> BigReal {
        self.wrap(Float::with_val(self.bits(), self.value.ln_ref()))
    }

    pub fn sin(&self) -> BigReal {
        self.wrap(Float::with_val(self.bits(), self.value.sin_ref()))
    }

    pub fn cos(&self) -> BigReal {
        self.wrap(Float::with_val(self.bits(), self.value.cos_ref()))
    }

    pub fn sinh(&self) -> BigReal {
        self.wrap(Float::with_val(self.bits(), self.value.sinh_ref()))
    }

    pub fn cosh(&self) -> BigReal {
        self.wrap(Float::with_val(self.bits(), self.value.cosh_ref()))
    }

    pub fn atan2(&self, x: &BigReal) -> BigReal {
        let bits = self.bits().max(x.bits());
        BigReal {
            value: Float::with_val(bits, self.value.atan2_ref(&x.value)),
            digits: self.digits.max(x.digits),
        }
    }

    pub fn hypot(&self, other: &BigReal) -> BigReal {
        let bits = self.bits().max(other.bits());
        BigReal {
            value: Float::with_val(bits, self.value.hypot_ref(&other.value)),
            digits: self.digits.max(other.digits),
        }
    }

    /// Euler gamma function.
    pub fn gamma(&self) -> BigReal {
        self.wrap(Float::with_val(self.bits(), self.value.gamma_ref()))
    }

    pub fn powi(&self, n: i32) -> BigReal {
        self.wrap(Float::with_val(self.bits(), (&self.value).pow(n)))
    }

    pub fn pow(&self, e: &BigReal) -> BigReal {
        let bits = self.bits().max(e.bits());
        BigReal {
            value: Float::with_val(bits, (&self.value).pow(&e.value)),
            digits: self.digits.max(e.digits),
        }
    }

    pub fn recip(&self) -> BigReal {
        self.wrap(Float::with_val(self.bits(), self.value.recip_ref()))
    }

    pub fn mul_int(&self, n: i64) -> BigReal {
        self.wrap(Float::with_val(self.bits(), &self.value * n))
    }

    pub fn div_int(&self, n: i64) -> BigReal {
        self.wrap(Float::with_val(self.bits(), &self.value / n))
    }

    pub fn mul_integer(&self, n: &Integer) -> BigReal {
        self.wrap(Float::with_val(self.bits(), &self.value * n))
    }

    pub fn max<'a>(&'a self, other: &'a BigReal) -> &'a BigReal {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Shortest decimal string that parses back to the identical value at
    /// this precision.
    pub fn to_decimal_string(&self) -> String {
        if self.value.is_zero() {
            return "0".to_string();
        }
        let n = (self.bits() as f64 / LOG2_10).ceil() as usize + 1;
        self.value.to_string_radix(10, Some(n))
    }

    /// Scientific notation rounded to `sig` significant digits.
    pub fn to_sci(&self, sig: usize) -> String {
        SigDigits::from_real(self, sig).to_sci()
    }

    /// Human-friendly rounding to `sig` significant digits: positional for
    /// moderate exponents, scientific otherwise.
    pub fn to_sig(&self, sig: usize) -> String {
        SigDigits::from_real(self, sig).to_display()
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => f.write_str(&self.to_sig(p.max(1))),
            None => f.write_str(&self.to_decimal_string()),
        }
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value.partial_cmp(&other.value)
    }
}

macro_rules! real_binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr<&BigReal> for &BigReal {
            type Output = BigReal;
            fn $m(self, rhs: &BigReal) -> BigReal {
                let digits = self.digits.max(rhs.digits);
                BigReal {
                    value: Float::with_val(digits_to_bits(digits), &self.value $op &rhs.value),
                    digits,
                }
            }
        }
        impl $tr<BigReal> for BigReal {
            type Output = BigReal;
            fn $m(self, rhs: BigReal) -> BigReal {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&BigReal> for BigReal {
            type Output = BigReal;
            fn $m(self, rhs: &BigReal) -> BigReal {
                (&self).$m(rhs)
            }
        }
        impl $tr<BigReal> for &BigReal {
            type Output = BigReal;
            fn $m(self, rhs: BigReal) -> BigReal {
                self.$m(&rhs)
            }
        }
    };
}

real_binop!(Add, add, +);
real_binop!(Sub, sub, -);
real_binop!(Mul, mul, *);
real_binop!(Div, div, /);

impl AddAssign<&BigReal> for BigReal {
    fn add_assign(&mut self, rhs: &BigReal) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&BigReal> for BigReal {
    fn sub_assign(&mut self, rhs: &BigReal) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&BigReal> for BigReal {
    fn mul_assign(&mut self, rhs: &BigReal) {
        *self = &*self * rhs;
    }
}

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal {
            value: -self.value,
            digits: self.digits,
        }
    }
}

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        -self.clone()
    }
}

// ---------------------------------------------------------------------------
// Significant-digit rendering
// ---------------------------------------------------------------------------

/// A value rounded to a fixed number of significant decimal digits:
/// `(-1)^negative * 0.d1d2d3... * 10^exp10`... stored as the digit string
/// `d1d2...` and the decimal exponent of `d1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigDigits {
    pub negative: bool,
    pub digits: String,
    /// Power of ten of the leading digit.
    pub exp10: i32,
}

impl SigDigits {
    pub fn from_real(x: &BigReal, sig: usize) -> SigDigits {
        let sig = sig.max(1);
        if x.is_zero() {
            return SigDigits {
                negative: false,
                digits: "0".repeat(sig),
                exp10: 0,
            };
        }
        // rug renders as [-]d.ddd[e±x] with exactly `sig` digits.
        let s = x.value.to_string_radix(10, Some(sig));
        Self::parse(&s).expect("mpfr output is well formed")
    }

    /// Parses printed numbers such as `0.001467802647`, `-4.392572423e25`,
    /// `1.35949` or `4.392572423 x 10^25`. Every printed digit after the
    /// first nonzero one is significant.
    pub fn parse(text: &str) -> Option<SigDigits> {
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let t = t.replace("×10^", "e").replace("x10^", "e").replace('E', "e");
        let (mant, exp) = match t.split_once('e') {
            Some((m, e)) => (m.to_string(), e.parse::<i32>().ok()?),
            None => (t.clone(), 0),
        };
        let (negative, mant) = match mant.strip_prefix('-') {
            Some(m) => (true, m.to_string()),
            None => (false, mant.trim_start_matches('+').to_string()),
        };
        let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant.as_str(), ""));
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return None;
        }
        let all: String = format!("{int_part}{frac_part}");
        let lead = all.find(|c: char| c != '0')?;
        let digits = all[lead..].to_string();
        // position of the leading digit relative to the decimal point
        let exp10 = int_part.len() as i32 - 1 - lead as i32 + exp;
        Some(SigDigits {
            negative,
            digits,
            exp10,
        })
    }

    pub fn to_sci(&self) -> String {
        let sign = if self.negative { "-" } else { "" };
        let (head, tail) = self.digits.split_at(1);
        if tail.is_empty() {
            format!("{sign}{head}e{}", self.exp10)
        } else {
            format!("{sign}{head}.{tail}e{}", self.exp10)
        }
    }

    pub fn to_display(&self) -> String {
        if self.exp10 < -6 || self.exp10 >= self.digits.len() as i32 + 2 {
            return self.to_sci();
        }
        let sign = if self.negative { "-" } else { "" };
        if self.exp10 < 0 {
            let zeros = "0".repeat((-self.exp10 - 1) as usize);
            format!("{sign}0.{zeros}{}", self.digits)
        } else {
            let int_len = self.exp10 as usize + 1;
            if int_len >= self.digits.len() {
                let pad = "0".repeat(int_len - self.digits.len());
                format!("{sign}{}{pad}", self.digits)
            } else {
                let (i, f) = self.digits.split_at(int_len);
                format!("{sign}{i}.{f}")
            }
        }
    }
}

// ---------------------------------------------------------------------------
// BigComplex
// ---------------------------------------------------------------------------

/// Complex number whose parts share one working precision.
#[derive(Clone, Debug, PartialEq)]
pub struct BigComplex {
    pub re: BigReal,
    pub im: BigReal,
}

impl BigComplex {
    /// Builds `re + i im`; both parts are brought to the larger precision.
    pub fn new(re: BigReal, im: BigReal) -> Self {
        if re.digits == im.digits {
            return BigComplex { re, im };
        }
        let prec = re.precision().max_with(im.precision());
        BigComplex {
            re: re.at(prec),
            im: im.at(prec),
        }
    }

    pub fn from_real(re: BigReal) -> Self {
        let im = re.precision().zero();
        BigComplex { re, im }
    }

    pub fn precision(&self) -> Precision {
        self.re.precision()
    }

    pub fn at(&self, prec: Precision) -> BigComplex {
        BigComplex {
            re: self.re.at(prec),
            im: self.im.at(prec),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn conj(&self) -> BigComplex {
        BigComplex {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    pub fn abs(&self) -> BigReal {
        self.re.hypot(&self.im)
    }

    pub fn norm_sqr(&self) -> BigReal {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn arg(&self) -> BigReal {
        self.im.atan2(&self.re)
    }

    /// `log10 |z|` as a double.
    pub fn log10_abs(&self) -> f64 {
        let a = self.re.log10_abs();
        let b = self.im.log10_abs();
        let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
        if hi == f64::NEG_INFINITY {
            return hi;
        }
        hi + 0.5 * (1.0 + 10f64.powf(2.0 * (lo - hi))).log10()
    }

    pub fn scale(&self, k: &BigReal) -> BigComplex {
        BigComplex::new(&self.re * k, &self.im * k)
    }

    pub fn mul_int(&self, n: i64) -> BigComplex {
        BigComplex {
            re: self.re.mul_int(n),
            im: self.im.mul_int(n),
        }
    }

    pub fn div_int(&self, n: i64) -> BigComplex {
        BigComplex {
            re: self.re.div_int(n),
            im: self.im.div_int(n),
        }
    }

    pub fn mul_integer(&self, n: &Integer) -> BigComplex {
        BigComplex {
            re: self.re.mul_integer(n),
            im: self.im.mul_integer(n),
        }
    }

    /// Multiplication by `i`.
    pub fn mul_i(&self) -> BigComplex {
        BigComplex {
            re: -&self.im,
            im: self.re.clone(),
        }
    }

    pub fn recip(&self) -> BigComplex {
        let d = self.norm_sqr();
        BigComplex {
            re: &self.re / &d,
            im: -(&self.im / &d),
        }
    }

    pub fn exp(&self) -> BigComplex {
        let r = self.re.exp();
        BigComplex::new(&r * self.im.cos(), &r * self.im.sin())
    }

    /// Principal branch, `Im ln z` in `(-pi, pi]`.
    pub fn ln(&self) -> BigComplex {
        BigComplex::new(self.abs().ln(), self.arg())
    }

    pub fn sinh(&self) -> BigComplex {
        BigComplex::new(&self.re.sinh() * self.im.cos(), &self.re.cosh() * self.im.sin())
    }

    pub fn cosh(&self) -> BigComplex {
        BigComplex::new(&self.re.cosh() * self.im.cos(), &self.re.sinh() * self.im.sin())
    }

    pub fn powi(&self, n: i64) -> BigComplex {
        let mut base = if n < 0 { self.recip() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = BigComplex::from_real(self.precision().one());
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

    pub fn to_sig(&self, sig: usize) -> String {
        let re = self.re.to_sig(sig);
        let im = self.im.abs().to_sig(sig);
        let sign = if self.im.is_sign_negative() { '-' } else { '+' };
        format!("{re} {sign} {im}i")
    }
}

impl Precision {
    fn max_with(self, other: Precision) -> Precision {
        if self.digits >= other.digits {
            self
        } else {
            other
        }
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig = f.precision().unwrap_or(20);
        f.write_str(&self.to_sig(sig))
    }
}

impl Add<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn add(self, rhs: &BigComplex) -> BigComplex {
        BigComplex {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn sub(self, rhs: &BigComplex) -> BigComplex {
        BigComplex {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn mul(self, rhs: &BigComplex) -> BigComplex {
        BigComplex {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Div<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn div(self, rhs: &BigComplex) -> BigComplex {
        if rhs.im.is_zero() {
            return BigComplex {
                re: &self.re / &rhs.re,
                im: &self.im / &rhs.re,
            };
        }
        let d = rhs.norm_sqr();
        BigComplex {
            re: (&self.re * &rhs.re + &self.im * &rhs.im) / &d,
            im: (&self.im * &rhs.re - &self.re * &rhs.im) / &d,
        }
    }
}

macro_rules! complex_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $m(self, rhs: BigComplex) -> BigComplex {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $m(self, rhs: &BigComplex) -> BigComplex {
                (&self).$m(rhs)
            }
        }
        impl $tr<BigComplex> for &BigComplex {
            type Output = BigComplex;
            fn $m(self, rhs: BigComplex) -> BigComplex {
                self.$m(&rhs)
            }
        }
    };
}

complex_owned!(Add, add);
complex_owned!(Sub, sub);
complex_owned!(Mul, mul);
complex_owned!(Div, div);

impl AddAssign<&BigComplex> for BigComplex {
    fn add_assign(&mut self, rhs: &BigComplex) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&BigComplex> for BigComplex {
    fn sub_assign(&mut self, rhs: &BigComplex) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl Neg for BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        -self.clone()
    }
}

// ---------------------------------------------------------------------------
// BigRational
// ---------------------------------------------------------------------------

/// Exact rational number in lowest terms with a positive denominator.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BigRational(Rational);

impl BigRational {
    pub fn zero() -> Self {
        BigRational(Rational::new())
    }

    pub fn from_int(n: i64) -> Self {
        BigRational(Rational::from(n))
    }

    /// `p/q` reduced; panics on `q == 0`.
    pub fn new(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        BigRational(Rational::from((p, q)))
    }

    pub fn from_integers(p: Integer, q: Integer) -> Self {
        assert!(q != 0, "zero denominator");
        BigRational(Rational::from((p, q)))
    }

    pub fn numer(&self) -> &Integer {
        self.0.numer()
    }

    pub fn denom(&self) -> &Integer {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.cmp0() == Ordering::Equal
    }

    pub fn signum(&self) -> i32 {
        match self.0.cmp0() {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    pub fn as_rational(&self) -> &Rational {
        &self.0
    }

    pub fn abs(&self) -> BigRational {
        BigRational(Rational::from(self.0.abs_ref()))
    }

    /// `self * (p/q)` for machine-size `p/q`.
    pub fn mul_ratio(&self, p: i64, q: i64) -> BigRational {
        let mut r = self.0.clone();
        r *= Rational::from((p, q));
        BigRational(r)
    }

    /// `rational_to_real`: correctly rounded conversion at `prec`.
    pub fn to_real(&self, prec: Precision) -> BigReal {
        prec.rational(self)
    }

    /// Approximate `log10 |q|`; `-inf` for zero.
    pub fn log10_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let (n, ne) = self.0.numer().to_f64_exp();
        let (d, de) = self.0.denom().to_f64_exp();
        (n.abs() / d).log10() + (ne as f64 - de as f64) * std::f64::consts::LOG10_2
    }
}

/// `rational_to_real` as a free function.
pub fn rational_to_real(q: &BigRational, prec: Precision) -> BigReal {
    prec.rational(q)
}

impl fmt::Display for BigRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self.0.denom() == 1 {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for BigRational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let r: Rational = s
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        Ok(BigRational(r))
    }
}

impl From<Rational> for BigRational {
    fn from(r: Rational) -> Self {
        BigRational(r)
    }
}

macro_rules! rat_binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr<&BigRational> for &BigRational {
            type Output = BigRational;
            fn $m(self, rhs: &BigRational) -> BigRational {
                BigRational(Rational::from(&self.0 $op &rhs.0))
            }
        }
        impl $tr<BigRational> for BigRational {
            type Output = BigRational;
            fn $m(self, rhs: BigRational) -> BigRational {
                BigRational(self.0 $op rhs.0)
            }
        }
    };
}

rat_binop!(Add, add, +);
rat_binop!(Sub, sub, -);
rat_binop!(Mul, mul, *);
rat_binop!(Div, div, /);

impl Neg for BigRational {
    type Output = BigRational;
    fn neg(self) -> BigRational {
        BigRational(-self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_low_precision() {
        assert!(matches!(with_precision(49), Err(Error::Config(_))));
        assert!(with_precision(50).is_ok());
    }

    #[test]
    fn one_third_at_200_digits() {
        let p = with_precision(200).unwrap();
        let third = p.one() / p.int(3);
        let s = third.to_sig(200);
        assert_eq!(s, format!("0.{}", "3".repeat(200)));
    }

    #[test]
    fn deterministic_digit_strings() {
        let run = || {
            let p = with_precision(50).unwrap();
            (p.int(2).sqrt() * p.pi() / p.int(7).exp()).to_decimal_string()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn rational_conversions() {
        let p = Precision::default();
        assert_eq!(BigRational::new(1, 8).to_real(p).to_f64(), 0.125);
        let q = BigRational::new(-5, 24);
        assert_eq!(q.to_real(p).to_sig(6), "-0.208333");
        assert_eq!(q.to_string(), "-5/24");
        assert_eq!(BigRational::new(4, -8).to_string(), "-1/2");
        assert_eq!(BigRational::zero().denom(), &Integer::from(1));
    }

    #[test]
    fn decimal_round_trip() {
        let p = with_precision(80).unwrap();
        let x = p.int(3).ln() / p.int(-7);
        let back = p.parse(&x.to_decimal_string()).unwrap();
        assert_eq!(x, back);
    }

    #[test]
    fn mixed_precision_promotes() {
        let a = with_precision(60).unwrap().one();
        let b = with_precision(120).unwrap().int(3);
        assert_eq!((&a / &b).digits(), 120);
    }

    #[test]
    fn sig_digit_parsing() {
        let s = SigDigits::parse("0.001467802647").unwrap();
        assert_eq!(s.digits, "1467802647");
        assert_eq!(s.exp10, -3);
        let s = SigDigits::parse("-4.392572423e25").unwrap();
        assert!(s.negative);
        assert_eq!(s.exp10, 25);
        let s = SigDigits::parse("4951.945127").unwrap();
        assert_eq!((s.digits.as_str(), s.exp10), ("4951945127", 3));
        let p = Precision::default();
        assert_eq!(p.parse("4951.945127").unwrap().to_sig(10), "4951.945127");
        assert_eq!(p.parse("-0.009444360750").unwrap().to_sig(10), "-0.009444360750");
    }

    #[test]
    fn complex_basics() {
        let p = Precision::default();
        let z = p.complex(3.0, -4.0);
        assert_eq!(z.abs().to_f64(), 5.0);
        let w = &z * &z.recip();
        assert!((w.re.to_f64() - 1.0).abs() < 1e-60 && w.im.to_f64().abs() < 1e-60);
        let back = z.ln().exp();
        assert!((&back - &z).abs().log10_abs() < -240.0);
        assert_eq!(z.powi(3), &(&z * &z) * &z);
    }
}
