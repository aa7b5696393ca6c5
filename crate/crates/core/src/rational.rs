//! Exact rationals and the extended real line.
//!
//! `Rational` keeps machine-word numerators and denominators while they fit and
//! promotes to arbitrary precision otherwise. The representation is canonical, so
//! derived equality and hashing are value equality.

use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    // denominator > 0, gcd(num, den) = 1, num != i64::MIN
    Small(i64, i64),
    // only holds values that do not fit `Small`
    Big(BigRational),
}

/// An exact rational number in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational(Repr);

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn fits(v: i128) -> bool {
    v > i64::MIN as i128 && v <= i64::MAX as i128
}

impl Rational {
    pub fn zero() -> Self {
        Rational(Repr::Small(0, 1))
    }

    pub fn one() -> Self {
        Rational(Repr::Small(1, 1))
    }

    pub fn from_int(n: i64) -> Self {
        if n == i64::MIN {
            return Self::from_big(BigRational::from_integer(BigInt::from(n)));
        }
        Rational(Repr::Small(n, 1))
    }

    /// `num / den`; panics when `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_i128(num as i128, den as i128)
    }

    /// Fallible constructor used by parsers.
    pub fn try_new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(Self::from_i128(num as i128, den as i128))
    }

    fn from_i128(num: i128, den: i128) -> Self {
        debug_assert!(den != 0);
        if num == 0 {
            return Self::zero();
        }
        let (mut n, mut d) = if den < 0 {
            (num.checked_neg(), den.checked_neg())
        } else {
            (Some(num), Some(den))
        };
        let (nn, dd) = match (n.take(), d.take()) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Self::from_big(BigRational::new(BigInt::from(num), BigInt::from(den)));
            }
        };
        let g = gcd_u128(nn.unsigned_abs(), dd.unsigned_abs()) as i128;
        let (nn, dd) = (nn / g, dd / g);
        if fits(nn) && fits(dd) {
            Rational(Repr::Small(nn as i64, dd as i64))
        } else {
            Rational(Repr::Big(BigRational::new_raw(BigInt::from(nn), BigInt::from(dd))))
        }
    }

    /// Canonicalizes an arbitrary-precision value.
    pub fn from_big(r: BigRational) -> Self {
        // BigRational::new already reduces; new_raw callers must pass reduced input
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            if n != i64::MIN && d > 0 {
                return Rational(Repr::Small(n, d));
            }
        }
        Rational(Repr::Big(r))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_big(BigRational::from_integer(n))
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    /// Numerator and denominator as machine integers when they fit.
    pub fn as_small(&self) -> Option<(i64, i64)> {
        match self.0 {
            Repr::Small(n, d) => Some((n, d)),
            Repr::Big(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1, 1))
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(r) => r.is_integer(),
        }
    }

    pub fn signum(&self) -> i32 {
        match &self.0 {
            Repr::Small(n, _) => n.signum() as i32,
            Repr::Big(r) => {
                if r.is_positive() {
                    1
                } else if r.is_negative() {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Multiplicative inverse; panics on zero.
    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        match &self.0 {
            Repr::Small(n, d) => Self::from_i128(*d as i128, *n as i128),
            Repr::Big(r) => Self::from_big(r.recip()),
        }
    }

    pub fn floor(&self) -> Self {
        match &self.0 {
            Repr::Small(n, d) => Self::from_int(n.div_euclid(*d)),
            Repr::Big(r) => Self::from_big(r.floor()),
        }
    }

    pub fn ceil(&self) -> Self {
        -(-self).floor()
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Lossy conversion, only for rendering.
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(r) => r.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $small:expr, $big:expr) => {
        impl<'a> $tr<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $m(self, rhs: &'a Rational) -> Rational {
                if let (Repr::Small(a, b), Repr::Small(c, d)) = (&self.0, &rhs.0) {
                    let f: fn(i128, i128, i128, i128) -> (i128, i128) = $small;
                    let (n, q) = f(*a as i128, *b as i128, *c as i128, *d as i128);
                    return Rational::from_i128(n, q);
                }
                let f: fn(BigRational, BigRational) -> BigRational = $big;
                Rational::from_big(f(self.to_big(), rhs.to_big()))
            }
        }
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: &'a Rational) -> Rational {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Rational> for &'a Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b, c, d| (a * d + c * b, b * d), |x, y| x + y);
binop!(Sub, sub, |a, b, c, d| (a * d - c * b, b * d), |x, y| x - y);
binop!(Mul, mul, |a, b, c, d| (a * c, b * d), |x, y| x * y);
binop!(
    Div,
    div,
    |a, b, c, d| {
        assert!(c != 0, "division by zero");
        (a * d, b * c)
    },
    |x, y| {
        assert!(!y.is_zero(), "division by zero");
        x / y
    }
);

macro_rules! assignop {
    ($tr:ident, $m:ident, $op:ident) => {
        impl<'a> $tr<&'a Rational> for Rational {
            fn $m(&mut self, rhs: &'a Rational) {
                *self = (&*self).$op(rhs);
            }
        }
        impl $tr<Rational> for Rational {
            fn $m(&mut self, rhs: Rational) {
                *self = (&*self).$op(&rhs);
            }
        }
    };
}

assignop!(AddAssign, add_assign, add);
assignop!(SubAssign, sub_assign, sub);
assignop!(MulAssign, mul_assign, mul);
assignop!(DivAssign, div_assign, div);

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match &self.0 {
            Repr::Small(n, d) => Rational(Repr::Small(-n, *d)),
            Repr::Big(r) => Rational::from_big(-r),
        }
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        if let (Repr::Small(a, b), Repr::Small(c, d)) = (&self.0, &other.0) {
            return (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128));
        }
        self.to_big().cmp(&other.to_big())
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Default for Rational {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Rational::from_int(n as i64)
    }
}

impl From<usize> for Rational {
    fn from(n: usize) -> Self {
        Rational::from_i128(n as i128, 1)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

impl Product for Rational {
    fn product<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::one(), |a, b| a * b)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Repr::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `p`, `p/q` and finite decimals such as `-0.25`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("invalid rational `{s}`"));
        if s.is_empty() {
            return Err(bad());
        }
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            return Ok(Rational::from_big(BigRational::new(p, q)));
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let neg = int.starts_with('-');
            let int_part: BigInt = match int.trim_start_matches(['-', '+']) {
                "" => BigInt::zero(),
                digits => digits.parse().map_err(|_| bad())?,
            };
            let frac_part: BigInt = frac.parse().map_err(|_| bad())?;
            let scale = num_traits::pow(BigInt::from(10), frac.len());
            let mut value = BigRational::new(int_part * &scale + frac_part, scale);
            if neg {
                value = -value;
            }
            return Ok(Rational::from_big(value));
        }
        let p: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Rational::from_bigint(p))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

struct RationalVisitor;

impl<'de> Visitor<'de> for RationalVisitor {
    type Value = Rational;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a rational as a \"p/q\" string or an integer")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Rational, E> {
        v.parse().map_err(|e: Error| E::custom(e.to_string()))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Rational, E> {
        Ok(Rational::from_int(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Rational, E> {
        Ok(Rational::from_i128(v as i128, 1))
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        d.deserialize_any(RationalVisitor)
    }
}

/// A value of the extended real line restricted to rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtendedRational {
    NegInfinity,
    Finite(Rational),
    PosInfinity,
}

impl ExtendedRational {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtendedRational::Finite(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedRational::Finite(_))
    }

    pub fn is_pos_infinite(&self) -> bool {
        matches!(self, ExtendedRational::PosInfinity)
    }

    pub fn is_neg_infinite(&self) -> bool {
        matches!(self, ExtendedRational::NegInfinity)
    }

    /// Extended addition; `(+inf) + (-inf)` is an error.
    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        use ExtendedRational::*;
        match (self, other) {
            (PosInfinity, NegInfinity) | (NegInfinity, PosInfinity) => Err(Error::IndeterminateSum),
            (PosInfinity, _) | (_, PosInfinity) => Ok(PosInfinity),
            (NegInfinity, _) | (_, NegInfinity) => Ok(NegInfinity),
            (Finite(a), Finite(b)) => Ok(Finite(a + b)),
        }
    }

    pub fn add_finite(&self, r: &Rational) -> Self {
        match self {
            ExtendedRational::Finite(a) => ExtendedRational::Finite(a + r),
            other => other.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        use ExtendedRational::*;
        match self {
            PosInfinity => NegInfinity,
            NegInfinity => PosInfinity,
            Finite(a) => Finite(-a),
        }
    }

    /// `alpha / lambda` for `lambda >= 0`, reading `alpha / 0` as `+inf` when
    /// `alpha > 0` and as `0` when `alpha == 0`.
    pub fn ratio(alpha: &Rational, lambda: &Rational) -> Result<Self> {
        if lambda.is_negative() {
            return Err(Error::InvalidInput("negative denominator in ratio".into()));
        }
        if lambda.is_zero() {
            return match alpha.signum() {
                1 => Ok(ExtendedRational::PosInfinity),
                0 => Ok(ExtendedRational::Finite(Rational::zero())),
                _ => Ok(ExtendedRational::NegInfinity),
            };
        }
        Ok(ExtendedRational::Finite(alpha / lambda))
    }
}

impl From<Rational> for ExtendedRational {
    fn from(r: Rational) -> Self {
        ExtendedRational::Finite(r)
    }
}

impl fmt::Display for ExtendedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedRational::NegInfinity => f.write_str("-inf"),
            ExtendedRational::PosInfinity => f.write_str("+inf"),
            ExtendedRational::Finite(r) => write!(f, "{r}"),
        }
    }
}

impl FromStr for ExtendedRational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+inf" | "inf" => Ok(ExtendedRational::PosInfinity),
            "-inf" => Ok(ExtendedRational::NegInfinity),
            other => Ok(ExtendedRational::Finite(other.parse()?)),
        }
    }
}

impl Serialize for ExtendedRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExtendedRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(|e: Error| de::Error::custom(e.to_string()))
    }
}

/// Conversion used by the `qv!` macro.
pub trait IntoRational {
    fn into_rational(self) -> Rational;
}

impl IntoRational for Rational {
    fn into_rational(self) -> Rational {
        self
    }
}

impl IntoRational for &Rational {
    fn into_rational(self) -> Rational {
        self.clone()
    }
}

impl IntoRational for i64 {
    fn into_rational(self) -> Rational {
        Rational::from_int(self)
    }
}

impl IntoRational for i32 {
    fn into_rational(self) -> Rational {
        Rational::from_int(self as i64)
    }
}

impl IntoRational for (i64, i64) {
    fn into_rational(self) -> Rational {
        Rational::new(self.0, self.1)
    }
}

impl IntoRational for (i32, i32) {
    fn into_rational(self) -> Rational {
        Rational::new(self.0 as i64, self.1 as i64)
    }
}

/// Shorthand for `Rational::new`.
pub fn q(num: i64, den: i64) -> Rational {
    Rational::new(num, den)
}

/// Shorthand for an integer rational.
pub fn qi(n: i64) -> Rational {
    Rational::from_int(n)
}

pub(crate) fn big_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}

pub(crate) fn big_lcm(a: &BigInt, b: &BigInt) -> BigInt {
    a.lcm(b)
}

pub(crate) fn big_is_one(a: &BigInt) -> bool {
    a.is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms_and_sign() {
        assert_eq!(q(2, -4).to_string(), "-1/2");
        assert_eq!(q(6, 3).to_string(), "2");
        assert_eq!(q(0, -7), Rational::zero());
    }

    #[test]
    fn arithmetic() {
        assert_eq!(q(1, 2) + q(1, 3), q(5, 6));
        assert_eq!(q(1, 2) - q(1, 3), q(1, 6));
        assert_eq!(q(2, 3) * q(3, 4), q(1, 2));
        assert_eq!(q(2, 3) / q(4, 9), q(3, 2));
        assert!(q(1, 3) < q(1, 2));
        assert_eq!(q(-7, 2).floor(), qi(-4));
        assert_eq!(q(7, 2).ceil(), qi(4));
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let big = qi(i64::MAX) * qi(i64::MAX);
        assert!(big.as_small().is_none());
        let back = &big / qi(i64::MAX);
        assert_eq!(back, qi(i64::MAX));
        assert!(back.as_small().is_some());
        let m = qi(i64::MIN);
        assert_eq!(-(-&m), m);
    }

    #[test]
    fn parse_and_serde() {
        assert_eq!("3/-6".parse::<Rational>().unwrap(), q(-1, 2));
        assert_eq!("-0.25".parse::<Rational>().unwrap(), q(-1, 4));
        assert!("1/0".parse::<Rational>().is_err());
        let s = serde_json::to_string(&q(-3, 4)).unwrap();
        assert_eq!(s, "\"-3/4\"");
        let r: Rational = serde_json::from_str("5").unwrap();
        assert_eq!(r, qi(5));
    }

    #[test]
    fn extended_arithmetic() {
        use ExtendedRational::*;
        assert!(PosInfinity.checked_add(&NegInfinity).is_err());
        assert_eq!(Finite(qi(1)).checked_add(&PosInfinity).unwrap(), PosInfinity);
        assert!(NegInfinity < Finite(qi(-100)));
        assert!(Finite(qi(100)) < PosInfinity);
        assert_eq!(ExtendedRational::ratio(&qi(1), &qi(0)).unwrap(), PosInfinity);
        assert_eq!(ExtendedRational::ratio(&qi(0), &qi(0)).unwrap(), Finite(qi(0)));
    }
}
