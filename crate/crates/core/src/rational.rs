//! Exact rational numbers.
//!
//! Values that fit in a pair of `i64` stay inline and are combined with
//! `i128` intermediates; anything larger falls back to [`BigRational`].
//! The representation is canonical (lowest terms, positive denominator,
//! inline whenever it fits), so structural equality is value equality.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    // den > 0, gcd(num, den) == 1, num != i64::MIN
    Small { num: i64, den: i64 },
    Big(Box<BigRational>),
}

/// An exact rational number.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational(Repr);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRationalError(String);

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    gcd_u128(a.unsigned_abs(), b.unsigned_abs()) as i128
}

impl Rational {
    pub fn zero() -> Self {
        Rational(Repr::Small { num: 0, den: 1 })
    }

    pub fn one() -> Self {
        Rational(Repr::Small { num: 1, den: 1 })
    }

    pub fn from_integer(value: i64) -> Self {
        Self::from_i128_ratio(value as i128, 1)
    }

    /// `num / den`. Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_i128_ratio(num as i128, den as i128)
    }

    pub fn from_bigint(value: BigInt) -> Self {
        Self::from_big(BigRational::from_integer(value))
    }

    /// `num / den` for big integers. Panics if `den == 0`.
    pub fn from_bigints(num: BigInt, den: BigInt) -> Self {
        Self::from_big(BigRational::new(num, den))
    }

    fn from_i128_ratio(mut num: i128, mut den: i128) -> Self {
        debug_assert!(den != 0);
        if den < 0 {
            num = -num;
            den = -den;
        }
        let g = gcd_i128(num, den);
        if g > 1 {
            num /= g;
            den /= g;
        }
        Self::from_reduced_i128(num, den)
    }

    // Caller guarantees lowest terms and den > 0.
    fn from_reduced_i128(num: i128, den: i128) -> Self {
        if num > i64::MIN as i128 && num <= i64::MAX as i128 && den <= i64::MAX as i128 {
            Rational(Repr::Small {
                num: num as i64,
                den: den as i64,
            })
        } else {
            Rational(Repr::Big(Box::new(BigRational::new_raw(
                BigInt::from(num),
                BigInt::from(den),
            ))))
        }
    }

    fn from_big(value: BigRational) -> Self {
        // BigRational::new normalizes; new_raw callers must pass reduced values.
        if let (Some(num), Some(den)) = (value.numer().to_i64(), value.denom().to_i64()) {
            if num != i64::MIN {
                return Rational(Repr::Small { num, den });
            }
        }
        Rational(Repr::Big(Box::new(value)))
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small { num, den } => BigRational::new_raw(BigInt::from(*num), BigInt::from(*den)),
            Repr::Big(b) => (**b).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small { num, .. } => BigInt::from(*num),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small { den, .. } => BigInt::from(*den),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small { num: 0, .. })
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    /// Sign as an ordering relative to zero.
    pub fn signum(&self) -> Ordering {
        match &self.0 {
            Repr::Small { num, .. } => num.cmp(&0),
            Repr::Big(b) => match b.numer().sign() {
                Sign::Minus => Ordering::Less,
                Sign::NoSign => Ordering::Equal,
                Sign::Plus => Ordering::Greater,
            },
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small { den, .. } => *den == 1,
            Repr::Big(b) => b.is_integer(),
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Panics on zero.
    pub fn recip(&self) -> Self {
        match &self.0 {
            Repr::Small { num, den } => {
                assert!(*num != 0, "reciprocal of zero");
                Self::from_reduced_i128((*den as i128) * (num.signum() as i128), (*num as i128).abs())
            }
            Repr::Big(b) => Self::from_big(b.recip()),
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

    /// Nearest `f64` (may lose precision; used for display only).
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small { num, den } => *num as f64 / *den as f64,
            Repr::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }

    /// Number of decimal digits in the larger of numerator and denominator.
    pub fn digits(&self) -> usize {
        let n = self.numer().abs().max(self.denom());
        n.to_string().len()
    }

    /// Decimal rendering with `sig` significant digits, rounding half to
    /// even. Trailing fractional zeros are dropped.
    pub fn to_decimal(&self, sig: usize) -> String {
        assert!(sig >= 1);
        if self.is_zero() {
            return "0".to_string();
        }
        let negative = self.is_negative();
        let value = self.to_big().abs();

        // exponent e with 10^e <= value < 10^(e+1)
        let mut exp: i64 = value.numer().to_string().len() as i64 - value.denom().to_string().len() as i64;
        let pow = |e: i64| -> BigRational {
            if e >= 0 {
                BigRational::from_integer(num_traits::pow(BigInt::from(10), e as usize))
            } else {
                BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), (-e) as usize))
            }
        };
        while pow(exp) > value {
            exp -= 1;
        }
        while pow(exp + 1) <= value {
            exp += 1;
        }

        let shift = sig as i64 - 1 - exp;
        let scaled = &value * pow(shift);
        let mut digits = scaled.floor().to_integer();
        let frac = scaled - BigRational::from_integer(digits.clone());
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let round_up = match frac.cmp(&half) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => digits.is_odd(),
        };
        if round_up {
            digits += 1;
        }
        let mut shift = shift;
        if digits.to_string().len() > sig {
            // rounded up to the next power of ten
            digits /= 10;
            shift -= 1;
        }

        let mut text = digits.to_string();
        let rendered = if shift <= 0 {
            text.extend(std::iter::repeat_n('0', (-shift) as usize));
            text
        } else {
            let shift = shift as usize;
            if text.len() <= shift {
                let zeros = "0".repeat(shift - text.len());
                text = format!("0.{zeros}{text}");
            } else {
                text.insert(text.len() - shift, '.');
            }
            let trimmed = text.trim_end_matches('0').trim_end_matches('.');
            trimmed.to_string()
        };
        if negative {
            format!("-{rendered}")
        } else {
            rendered
        }
    }

    fn add_ref(&self, other: &Self) -> Self {
        match (&self.0, &other.0) {
            (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) => {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                if b == d {
                    return Self::from_i128_ratio(a + c, b);
                }
                let g = gcd_i128(b, d);
                if g == 1 {
                    Self::from_reduced_i128(a * d + c * b, b * d)
                } else {
                    let t = a * (d / g) + c * (b / g);
                    let g2 = gcd_i128(t, g);
                    Self::from_reduced_i128(t / g2, (b / g) * (d / g2))
                }
            }
            _ => Self::from_big(self.to_big() + other.to_big()),
        }
    }

    fn mul_ref(&self, other: &Self) -> Self {
        match (&self.0, &other.0) {
            (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) => {
                if *a == 0 || *c == 0 {
                    return Self::zero();
                }
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                let g1 = gcd_i128(a, d);
                let g2 = gcd_i128(c, b);
                Self::from_reduced_i128((a / g1) * (c / g2), (b / g2) * (d / g1))
            }
            _ => {
                if self.is_zero() || other.is_zero() {
                    return Self::zero();
                }
                Self::from_big(self.to_big() * other.to_big())
            }
        }
    }

    fn neg_ref(&self) -> Self {
        match &self.0 {
            Repr::Small { num, den } => Rational(Repr::Small { num: -num, den: *den }),
            Repr::Big(b) => Self::from_big(-&**b),
        }
    }

    fn div_ref(&self, other: &Self) -> Self {
        assert!(!other.is_zero(), "division by zero");
        self.mul_ref(&other.recip())
    }

    /// `self * a + b`, the common update in pivoting and utility evaluation.
    pub fn mul_add(&self, a: &Self, b: &Self) -> Self {
        self.mul_ref(a).add_ref(b)
    }
}

impl Default for Rational {
    fn default() -> Self {
        Self::zero()
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) => {
                ((*a as i128) * (*d as i128)).cmp(&((*c as i128) * (*b as i128)))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl From<i64> for Rational {
    fn from(value: i64) -> Self {
        Self::from_integer(value)
    }
}

impl From<i32> for Rational {
    fn from(value: i32) -> Self {
        Self::from_integer(value as i64)
    }
}

impl From<BigInt> for Rational {
    fn from(value: BigInt) -> Self {
        Self::from_bigint(value)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $imp:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                self.$imp(rhs)
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                (&self).$imp(&rhs)
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                (&self).$imp(rhs)
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                self.$imp(&rhs)
            }
        }
    };
}

impl Rational {
    fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);
forward_binop!(Div, div, div_ref);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        self.neg_ref()
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        self.neg_ref()
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        *self = self.add_ref(rhs);
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        *self = self.add_ref(&rhs);
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        *self = self.sub_ref(rhs);
    }
}

impl SubAssign for Rational {
    fn sub_assign(&mut self, rhs: Rational) {
        *self = self.sub_ref(&rhs);
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        *self = self.mul_ref(rhs);
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small { num, den: 1 } => write!(f, "{num}"),
            Repr::Small { num, den } => write!(f, "{num}/{den}"),
            Repr::Big(b) if b.is_integer() => write!(f, "{}", b.numer()),
            Repr::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `"p"`, `"p/q"` and plain decimals such as `"-2.75"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let text = s.trim();
        if text.is_empty() {
            return Err(err());
        }
        let parse_int = |t: &str| -> Result<BigInt, ParseRationalError> {
            let digits = t.strip_prefix(['+', '-']).unwrap_or(t);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            t.parse::<BigInt>().map_err(|_| err())
        };
        if let Some((num, den)) = text.split_once('/') {
            let num = parse_int(num.trim())?;
            let den = parse_int(den.trim())?;
            if den.is_zero() {
                return Err(err());
            }
            return Ok(Self::from_bigints(num, den));
        }
        if let Some((int_part, frac_part)) = text.split_once('.') {
            if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            let negative = int_part.starts_with('-');
            let int_digits = int_part.strip_prefix(['+', '-']).unwrap_or(int_part);
            if !int_digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            let mut all = String::from(int_digits);
            all.push_str(frac_part);
            let mut num: BigInt = all.parse().map_err(|_| err())?;
            if negative {
                num = -num;
            }
            let den = num_traits::pow(BigInt::from(10), frac_part.len());
            return Ok(Self::from_bigints(num, den));
        }
        Ok(Self::from_bigint(parse_int(text)?))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

struct RationalVisitor;

impl Visitor<'_> for RationalVisitor {
    type Value = Rational;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("an integer or a string such as \"3/4\" or \"-2.5\"")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
        Ok(Rational::from_integer(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
        Ok(Rational::from_bigint(BigInt::from(v)))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Rational, E> {
        Err(E::custom(format!(
            "bare non-integer number {v} is not exact; quote it as a string"
        )))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
        v.parse().map_err(E::custom)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserializer.deserialize_any(RationalVisitor)
    }
}

/// Shorthand for `Rational::new`.
pub fn q(num: i64, den: i64) -> Rational {
    Rational::new(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(v: &Rational) -> BigRational {
        v.to_big()
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(q(2, 4), q(1, 2));
        assert_eq!(q(3, -6), q(-1, 2));
        assert_eq!(q(0, -5), Rational::zero());
        assert_eq!(q(6, 3).to_string(), "2");
        assert_eq!(q(-9, 14).to_string(), "-9/14");
    }

    #[test]
    fn parses_literals() {
        assert_eq!("3/4".parse::<Rational>().unwrap(), q(3, 4));
        assert_eq!("-2.75".parse::<Rational>().unwrap(), q(-11, 4));
        assert_eq!(" 7 ".parse::<Rational>().unwrap(), q(7, 1));
        assert_eq!("0.10".parse::<Rational>().unwrap(), q(1, 10));
        for bad in ["", "1/0", "a", "1.", "1/2/3", "--1", "1e3"] {
            assert!(bad.parse::<Rational>().is_err(), "{bad}");
        }
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let big_val = Rational::from_integer(i64::MAX) * Rational::from_integer(4);
        assert!(matches!(big_val.0, Repr::Big(_)));
        let back = big_val / Rational::from_integer(4);
        assert!(matches!(back.0, Repr::Small { .. }));
        assert_eq!(back, Rational::from_integer(i64::MAX));
        let min = Rational::from_integer(i64::MIN);
        assert!(matches!(min.0, Repr::Big(_)));
        assert_eq!(-(-min.clone()), min);
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(q(123, 14).to_decimal(6), "8.78571");
        assert_eq!(q(50, 1).to_decimal(6), "50");
        assert_eq!(q(1, 2).to_decimal(6), "0.5");
        assert_eq!(q(-2, 7).to_decimal(6), "-0.285714");
        assert_eq!(q(1, 3000).to_decimal(3), "0.000333");
        assert_eq!(q(9999995, 10).to_decimal(6), "1000000");
        // half-even ties
        assert_eq!(q(125, 100).to_decimal(2), "1.2");
        assert_eq!(q(135, 100).to_decimal(2), "1.4");
        assert_eq!(q(1234567, 1).to_decimal(6), "1234570");
        assert_eq!(Rational::zero().to_decimal(6), "0");
    }

    #[test]
    fn serde_accepts_strings_and_integers() {
        let v: Vec<Rational> = serde_json::from_str(r#"["1/3", 4, "-0.5"]"#).unwrap();
        assert_eq!(v, vec![q(1, 3), q(4, 1), q(-1, 2)]);
        assert!(serde_json::from_str::<Rational>("0.5").is_err());
        assert_eq!(serde_json::to_string(&q(-5, 3)).unwrap(), "\"-5/3\"");
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        prop_oneof![
            (any::<i64>(), 1i64..i64::MAX).prop_map(|(n, d)| Rational::new(n, d)),
            (-1000i64..1000, 1i64..1000).prop_map(|(n, d)| Rational::new(n, d)),
        ]
    }

    proptest! {
        #[test]
        fn arithmetic_matches_bigrational(a in arb_rational(), b in arb_rational()) {
            prop_assert_eq!(big(&(&a + &b)), big(&a) + big(&b));
            prop_assert_eq!(big(&(&a - &b)), big(&a) - big(&b));
            prop_assert_eq!(big(&(&a * &b)), big(&a) * big(&b));
            if !b.is_zero() {
                prop_assert_eq!(big(&(&a / &b)), big(&a) / big(&b));
            }
            prop_assert_eq!(a.cmp(&b), big(&a).cmp(&big(&b)));
            // canonical: round trip through BigRational gives the same value
            prop_assert_eq!(Rational::from_big(big(&(&a * &b))), &a * &b);
        }

        #[test]
        fn display_parse_round_trip(a in arb_rational()) {
            prop_assert_eq!(a.to_string().parse::<Rational>().unwrap(), a);
        }
    }
}
