//! Exact nonnegative dyadic rationals `numerator / 2^exponent`.
//!
//! Every weight of a tree strategy lives here, so halving and doubling never
//! round. Values are kept canonical (odd numerator, or exponent 0), which
//! makes structural equality coincide with numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DyadicError {
    #[error("negative value `{0}` cannot be a weight")]
    Negative(String),
    #[error("malformed number `{0}`")]
    Malformed(String),
    #[error("denominator of `{0}` is not a power of two")]
    NotDyadic(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct DyadicRational {
    numerator: BigUint,
    exponent: u32,
}

impl DyadicRational {
    pub fn new(numerator: impl Into<BigUint>, exponent: u32) -> Self {
        let mut d = DyadicRational { numerator: numerator.into(), exponent };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn integer(n: u64) -> Self {
        Self::new(n, 0)
    }

    /// `2^k` for any integer `k`, e.g. `pow2(-3) = 1/8`.
    pub fn pow2(k: i64) -> Self {
        if k >= 0 {
            DyadicRational { numerator: BigUint::one() << (k as usize), exponent: 0 }
        } else {
            DyadicRational { numerator: BigUint::one(), exponent: (-k) as u32 }
        }
    }

    fn normalize(&mut self) {
        if self.numerator.is_zero() {
            self.exponent = 0;
            return;
        }
        let tz = self.numerator.trailing_zeros().unwrap_or(0).min(self.exponent as u64) as u32;
        if tz > 0 {
            self.numerator >>= tz as usize;
            self.exponent -= tz;
        }
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn denominator(&self) -> BigUint {
        BigUint::one() << self.exponent as usize
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn double(&self) -> Self {
        if self.exponent > 0 {
            DyadicRational { numerator: self.numerator.clone(), exponent: self.exponent - 1 }
        } else {
            DyadicRational { numerator: &self.numerator << 1usize, exponent: 0 }
        }
    }

    pub fn halve(&self) -> Self {
        Self::new(self.numerator.clone(), self.exponent + 1)
    }

    pub fn mul_int(&self, k: u64) -> Self {
        Self::new(&self.numerator * BigUint::from(k), self.exponent)
    }

    /// `floor(self / other)`; `other` must be positive.
    pub fn div_floor(&self, other: &DyadicRational) -> BigUint {
        let e = self.exponent.max(other.exponent);
        let a = &self.numerator << (e - self.exponent) as usize;
        let b = &other.numerator << (e - other.exponent) as usize;
        a / b
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.numerator.clone()), BigInt::from(self.denominator()))
    }

    /// Exact conversion of a rational with power-of-two denominator.
    pub fn from_rational(q: &BigRational) -> Result<Self, DyadicError> {
        if q.is_negative() {
            return Err(DyadicError::Negative(q.to_string()));
        }
        let den = q.denom().magnitude();
        if den.count_ones() != 1 {
            return Err(DyadicError::NotDyadic(q.to_string()));
        }
        let exponent = den.trailing_zeros().unwrap_or(0) as u32;
        Ok(Self::new(q.numer().magnitude().clone(), exponent))
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator.to_f64().unwrap_or(f64::INFINITY) / 2f64.powi(self.exponent as i32)
    }

    /// Exact, terminating decimal expansion (`11/8` prints `1.375`).
    pub fn to_decimal(&self) -> String {
        let int = &self.numerator >> self.exponent as usize;
        if self.exponent == 0 {
            return int.to_string();
        }
        let frac = &self.numerator - (&int << self.exponent as usize);
        // frac / 2^e == frac * 5^e / 10^e
        let digits = (frac * BigUint::from(5u32).pow(self.exponent)).to_string();
        let pad = self.exponent as usize - digits.len();
        format!("{int}.{}{digits}", "0".repeat(pad))
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exponent.max(other.exponent);
        let a = &self.numerator << (e - self.exponent) as usize;
        let b = &other.numerator << (e - other.exponent) as usize;
        a.cmp(&b)
    }
}

impl Add for &DyadicRational {
    type Output = DyadicRational;
    fn add(self, rhs: &DyadicRational) -> DyadicRational {
        let e = self.exponent.max(rhs.exponent);
        let a = &self.numerator << (e - self.exponent) as usize;
        let b = &rhs.numerator << (e - rhs.exponent) as usize;
        DyadicRational::new(a + b, e)
    }
}

impl Add for DyadicRational {
    type Output = DyadicRational;
    fn add(self, rhs: DyadicRational) -> DyadicRational {
        &self + &rhs
    }
}

impl AddAssign<&DyadicRational> for DyadicRational {
    fn add_assign(&mut self, rhs: &DyadicRational) {
        *self = &*self + rhs;
    }
}

impl Mul for &DyadicRational {
    type Output = DyadicRational;
    fn mul(self, rhs: &DyadicRational) -> DyadicRational {
        DyadicRational::new(&self.numerator * &rhs.numerator, self.exponent + rhs.exponent)
    }
}

impl<'a> Sum<&'a DyadicRational> for DyadicRational {
    fn sum<I: Iterator<Item = &'a DyadicRational>>(iter: I) -> Self {
        iter.fold(DyadicRational::zero(), |acc, x| &acc + x)
    }
}

impl Sum for DyadicRational {
    fn sum<I: Iterator<Item = DyadicRational>>(iter: I) -> Self {
        iter.fold(DyadicRational::zero(), |acc, x| &acc + &x)
    }
}

/// Renders `numerator/2^exponent` with the denominator written out, e.g. `11/8`, `32/1`.
impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator())
    }
}

/// Accepts `a/b` with `b` a power of two, or a bare integer.
impl FromStr for DyadicRational {
    type Err = DyadicError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.starts_with('-') {
            return Err(DyadicError::Negative(s.to_string()));
        }
        let (num, den) = s.split_once('/').unwrap_or((s, "1"));
        let num: BigUint = num.parse().map_err(|_| DyadicError::Malformed(s.to_string()))?;
        let den: BigUint = den.parse().map_err(|_| DyadicError::Malformed(s.to_string()))?;
        if den.count_ones() != 1 {
            return Err(DyadicError::NotDyadic(s.to_string()));
        }
        let exponent = den.trailing_zeros().unwrap_or(0) as u32;
        Ok(DyadicRational::new(num, exponent))
    }
}

/// Parses a decimal literal (`1.37`, `43.999999`, `4.4e+01`, `-0`) exactly.
pub fn parse_decimal(s: &str) -> Result<BigRational, DyadicError> {
    let t = s.trim();
    let bad = || DyadicError::Malformed(s.to_string());
    let (mantissa, exp10) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
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
    let all: BigInt = format!("{int_part}{frac_part}0").parse::<BigInt>().map_err(|_| bad())? / BigInt::from(10);
    let scale = exp10 - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut q = if scale >= 0 {
        BigRational::from_integer(all * ten.pow(scale as u32))
    } else {
        BigRational::new(all, ten.pow((-scale) as u32))
    };
    if negative {
        q = -q;
    }
    Ok(q)
}

/// Nearest dyadic rational with exponent at most `max_exponent`; ties go to
/// the even numerator on the `2^-max_exponent` grid.
pub fn rationalize_rational(x: &BigRational, max_exponent: u32) -> Result<DyadicRational, DyadicError> {
    if x.is_negative() {
        return Err(DyadicError::Negative(x.to_string()));
    }
    let scaled = x * BigRational::from_integer(BigInt::one() << max_exponent as usize);
    let floor = scaled.floor().to_integer();
    let rem = &scaled - BigRational::from_integer(floor.clone());
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let n = match rem.cmp(&half) {
        Ordering::Less => floor,
        Ordering::Greater => floor + 1,
        Ordering::Equal if floor.is_even() => floor,
        Ordering::Equal => floor + 1,
    };
    Ok(DyadicRational::new(n.magnitude().clone(), max_exponent))
}

/// [`rationalize_rational`] on a decimal string.
pub fn rationalize(x: &str, max_exponent: u32) -> Result<DyadicRational, DyadicError> {
    let q = parse_decimal(x)?;
    if q.is_negative() {
        return Err(DyadicError::Negative(x.trim().to_string()));
    }
    rationalize_rational(&q, max_exponent)
}

/// [`rationalize_rational`] on a float, taken at its exact binary value.
pub fn rationalize_f64(x: f64, max_exponent: u32) -> Result<DyadicRational, DyadicError> {
    let q = BigRational::from_float(x).ok_or_else(|| DyadicError::Malformed(x.to_string()))?;
    rationalize_rational(&q, max_exponent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(s: &str) -> DyadicRational {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_form() {
        let x = DyadicRational::new(12u32, 3);
        assert_eq!((x.numerator().clone(), x.exponent()), (BigUint::from(3u32), 1));
        assert_eq!(DyadicRational::new(0u32, 5).exponent(), 0);
        assert_eq!(d("4/8"), d("1/2"));
        assert_eq!(d("32"), DyadicRational::integer(32));
    }

    #[test]
    fn display_and_parse() {
        assert_eq!(d("11/8").to_string(), "11/8");
        assert_eq!(DyadicRational::integer(32).to_string(), "32/1");
        assert!(matches!("3/6".parse::<DyadicRational>(), Err(DyadicError::NotDyadic(_))));
        assert!(matches!("-1/2".parse::<DyadicRational>(), Err(DyadicError::Negative(_))));
        assert!(matches!("x".parse::<DyadicRational>(), Err(DyadicError::Malformed(_))));
    }

    #[test]
    fn exact_decimal_expansion() {
        assert_eq!(d("11/8").to_decimal(), "1.375");
        assert_eq!(d("81/8").to_decimal(), "10.125");
        assert_eq!(d("1/64").to_decimal(), "0.015625");
        assert_eq!(d("44").to_decimal(), "44");
    }

    #[test]
    fn arithmetic() {
        assert_eq!(&d("3/4") + &d("5/8"), d("11/8"));
        assert_eq!(d("3").double(), d("6"));
        assert_eq!(d("3/8").double(), d("3/4"));
        assert_eq!(d("3").halve(), d("3/2"));
        assert!(d("5/8") < d("3/4"));
        assert_eq!(d("1904").div_floor(&d("20")), BigUint::from(95u32));
        assert_eq!(d("396").div_floor(&d("6")), BigUint::from(66u32));
        assert_eq!(d("7/2").mul_int(4), d("14"));
        assert_eq!(DyadicRational::pow2(-3), d("1/8"));
        assert_eq!(DyadicRational::pow2(4), d("16"));
    }

    #[test]
    fn rationalize_examples() {
        assert_eq!(rationalize("1.37", 3).unwrap(), d("11/8"));
        assert_eq!(rationalize("2.25", 3).unwrap(), d("9/4"));
        assert_eq!(rationalize("1.63", 3).unwrap(), d("13/8"));
        assert_eq!(rationalize("10.12", 4).unwrap(), d("81/8"));
        assert_eq!(rationalize("43.999999", 6).unwrap(), d("44"));
        assert_eq!(rationalize("4.4e+01", 0).unwrap(), d("44"));
        assert_eq!(rationalize("-0", 2).unwrap(), d("0"));
        assert!(matches!(rationalize("-1", 6), Err(DyadicError::Negative(_))));
        assert!(matches!(rationalize("abc", 6), Err(DyadicError::Malformed(_))));
        assert!(matches!(rationalize(".", 6), Err(DyadicError::Malformed(_))));
    }

    #[test]
    fn rationalize_ties_to_even() {
        // 0.5 sits halfway between 0 and 1 on the integer grid.
        assert_eq!(rationalize("0.5", 0).unwrap(), d("0"));
        assert_eq!(rationalize("1.5", 0).unwrap(), d("2"));
        assert_eq!(rationalize("0.1875", 3).unwrap(), d("1/4")); // 1.5/8 → 2/8
        assert_eq!(rationalize_f64(2.5, 0).unwrap(), d("2"));
    }

    proptest! {
        #[test]
        fn add_matches_rational_arithmetic(a in 0u64..1 << 20, ea in 0u32..12, b in 0u64..1 << 20, eb in 0u32..12) {
            let x = DyadicRational::new(a, ea);
            let y = DyadicRational::new(b, eb);
            prop_assert_eq!((&x + &y).to_rational(), x.to_rational() + y.to_rational());
            prop_assert_eq!(x.cmp(&y), x.to_rational().cmp(&y.to_rational()));
            prop_assert_eq!(x.double().halve(), x.clone());
        }

        #[test]
        fn rationalize_is_nearest(num in 0u64..1_000_000, max_exp in 0u32..8) {
            let s = format!("{}.{:03}", num / 1000, num % 1000);
            let q = parse_decimal(&s).unwrap();
            let r = rationalize(&s, max_exp).unwrap();
            let step = DyadicRational::pow2(-(max_exp as i64)).to_rational();
            let err = (r.to_rational() - &q).abs();
            prop_assert!(err.clone() * BigRational::from_integer(2.into()) <= step);
            prop_assert!(r.exponent() <= max_exp);
        }
    }
}
