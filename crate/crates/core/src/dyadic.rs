//! Dyadic rationals and outward-rounded intervals over them.
//!
//! A [`Dyadic`] is `mant · 2^exp` with an arbitrary-precision mantissa. Sums,
//! differences and products of dyadics are exact, so interval arithmetic only
//! loses information where a caller explicitly rounds outward with
//! [`Interval::round_out`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An exact binary fraction `mant · 2^exp`, kept with an odd mantissa.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        if mant.is_zero() {
            return Self::zero();
        }
        let tz = mant.trailing_zeros().unwrap_or(0);
        if tz == 0 {
            Dyadic { mant, exp }
        } else {
            Dyadic {
                mant: mant >> tz,
                exp: exp + tz as i64,
            }
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(v: i64) -> Self {
        Self::new(BigInt::from(v), 0)
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Self::new(v, 0)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    /// Multiplies by `2^k`.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Dyadic {
            mant: self.mant.clone(),
            exp: self.exp + k,
        }
    }

    /// Mantissa expressed at exponent `e`, i.e. `self · 2^-e`, which must be
    /// an integer (`e <= self.exp`).
    fn scaled_to(&self, e: i64) -> BigInt {
        debug_assert!(e <= self.exp || self.is_zero());
        if self.is_zero() {
            BigInt::zero()
        } else {
            &self.mant << ((self.exp - e) as usize)
        }
    }

    /// Largest integer `<= self`.
    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            self.scaled_to(0)
        } else {
            // arithmetic shift right rounds toward -inf for BigInt
            self.mant.clone() >> ((-self.exp) as usize)
        }
    }

    /// Smallest integer `>= self`.
    pub fn ceil(&self) -> BigInt {
        -(self.neg_ref().floor())
    }

    fn neg_ref(&self) -> Dyadic {
        Dyadic {
            mant: -self.mant.clone(),
            exp: self.exp,
        }
    }

    /// Largest multiple of `2^e` that is `<= self`.
    pub fn round_down(&self, e: i64) -> Self {
        if self.exp >= e {
            return self.clone();
        }
        Self::new(self.mant.clone() >> ((e - self.exp) as usize), e)
    }

    /// Smallest multiple of `2^e` that is `>= self`.
    pub fn round_up(&self, e: i64) -> Self {
        -(self.neg_ref().round_down(e))
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(self.scaled_to(0))
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << ((-self.exp) as usize))
        }
    }

    /// Largest dyadic with exponent `e` that is `<= r`.
    pub fn floor_rational(r: &BigRational, e: i64) -> Self {
        let (num, den) = shift_rational(r, -e);
        Self::new(num.div_floor(&den), e)
    }

    /// Smallest dyadic with exponent `e` that is `>= r`.
    pub fn ceil_rational(r: &BigRational, e: i64) -> Self {
        let (num, den) = shift_rational(r, -e);
        Self::new(-((-num).div_floor(&den)), e)
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits() as i64;
        let (m, e) = if bits > 62 {
            let shift = bits - 62;
            ((&self.mant >> (shift as usize)).to_f64().unwrap_or(0.0), self.exp + shift)
        } else {
            (self.mant.to_f64().unwrap_or(0.0), self.exp)
        };
        ldexp(m, e)
    }

    /// Midpoint of two dyadics (always dyadic).
    pub fn midpoint(a: &Dyadic, b: &Dyadic) -> Dyadic {
        (a + b).mul_pow2(-1)
    }

    /// Number of significant bits in `|self|` above `2^e`: roughly `log2|self| - e`.
    pub fn magnitude_bits(&self) -> i64 {
        if self.is_zero() {
            i64::MIN / 4
        } else {
            self.mant.bits() as i64 + self.exp
        }
    }
}

fn shift_rational(r: &BigRational, k: i64) -> (BigInt, BigInt) {
    // returns (num, den) of r * 2^k
    if k >= 0 {
        (r.numer() << (k as usize), r.denom().clone())
    } else {
        (r.numer().clone(), r.denom() << ((-k) as usize))
    }
}

fn ldexp(m: f64, e: i64) -> f64 {
    let mut v = m;
    let mut e = e;
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
        if v.is_infinite() {
            return v;
        }
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
        if v == 0.0 {
            return v;
        }
    }
    v * 2f64.powi(e as i32)
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        let e = self.exp.min(other.exp);
        self.scaled_to(e).cmp(&other.scaled_to(e))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> Add<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(rhs.exp);
        Dyadic::new(self.scaled_to(e) + rhs.scaled_to(e), e)
    }
}

impl<'a> Sub<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        self + &rhs.neg_ref()
    }
}

impl<'a> Mul<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() || rhs.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            mant: &self.mant * &rhs.mant,
            exp: self.exp + rhs.exp,
        }
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            mant: -self.mant,
            exp: self.exp,
        }
    }
}

impl fmt::Display for Dyadic {
    /// `<mantissa>p<exponent>`, e.g. `3p-1` for 1.5.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}p{}", self.mant, self.exp)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed dyadic string `{0}`")]
pub struct ParseDyadicError(pub String);

impl FromStr for Dyadic {
    type Err = ParseDyadicError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseDyadicError(s.to_string());
        let (m, e) = s.trim().split_once('p').ok_or_else(err)?;
        let mant = m.parse::<BigInt>().map_err(|_| err())?;
        let exp = e.parse::<i64>().map_err(|_| err())?;
        Ok(Dyadic::new(mant, exp))
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A closed interval `[lo, hi]` with dyadic endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    lo: Dyadic,
    hi: Dyadic,
}

impl Interval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        assert!(lo <= hi, "interval endpoints out of order: {lo} > {hi}");
        Interval { lo, hi }
    }

    pub fn point(v: Dyadic) -> Self {
        Interval {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn from_int(v: i64) -> Self {
        Self::point(Dyadic::from_int(v))
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Self::point(Dyadic::from_bigint(v))
    }

    /// Outward enclosure of a rational at grid `2^e`.
    pub fn from_rational(r: &BigRational, e: i64) -> Self {
        if r.denom().is_one() {
            return Self::from_bigint(r.numer().clone());
        }
        Interval {
            lo: Dyadic::floor_rational(r, e),
            hi: Dyadic::ceil_rational(r, e),
        }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn width(&self) -> Dyadic {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, v: &Dyadic) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.signum() <= 0 && self.hi.signum() >= 0
    }

    pub fn contains_rational(&self, r: &BigRational) -> bool {
        &self.lo.to_rational() <= r && r <= &self.hi.to_rational()
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// `Some(Less)` if every point of `self` is below every point of `other`,
    /// `Some(Equal)` if both are the same single point, `None` if they overlap.
    pub fn certified_cmp(&self, other: &Interval) -> Option<Ordering> {
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if other.hi < self.lo {
            Some(Ordering::Greater)
        } else if self.is_point() && other.is_point() && self.lo == other.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn midpoint(&self) -> Dyadic {
        Dyadic::midpoint(&self.lo, &self.hi)
    }

    pub fn mid_f64(&self) -> f64 {
        self.midpoint().to_f64()
    }

    /// Sign of every point in the interval, if it is constant.
    pub fn sign(&self) -> Option<i32> {
        if self.lo.signum() > 0 {
            Some(1)
        } else if self.hi.signum() < 0 {
            Some(-1)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(0)
        } else {
            None
        }
    }

    pub fn abs(&self) -> Interval {
        if self.lo.signum() >= 0 {
            self.clone()
        } else if self.hi.signum() <= 0 {
            Interval {
                lo: self.hi.abs(),
                hi: self.lo.abs(),
            }
        } else {
            Interval {
                lo: Dyadic::zero(),
                hi: std::cmp::max(self.lo.abs(), self.hi.clone()),
            }
        }
    }

    pub fn max(&self, other: &Interval) -> Interval {
        Interval {
            lo: std::cmp::max(&self.lo, &other.lo).clone(),
            hi: std::cmp::max(&self.hi, &other.hi).clone(),
        }
    }

    pub fn min(&self, other: &Interval) -> Interval {
        Interval {
            lo: std::cmp::min(&self.lo, &other.lo).clone(),
            hi: std::cmp::min(&self.hi, &other.hi).clone(),
        }
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: std::cmp::min(&self.lo, &other.lo).clone(),
            hi: std::cmp::max(&self.hi, &other.hi).clone(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> Interval {
        let kd = Dyadic::from_bigint(k.clone());
        let a = &self.lo * &kd;
        let b = &self.hi * &kd;
        if k.is_negative() {
            Interval { lo: b, hi: a }
        } else {
            Interval { lo: a, hi: b }
        }
    }

    pub fn pow(&self, k: u32) -> Interval {
        let mut acc = Interval::from_int(1);
        for _ in 0..k {
            acc = &acc * self;
        }
        if k % 2 == 0 && self.contains_zero() {
            // even power of a sign-straddling interval is nonnegative
            acc = Interval {
                lo: Dyadic::zero(),
                hi: acc.hi,
            };
        }
        acc
    }

    /// Rounds the endpoints outward onto the grid `2^e`.
    pub fn round_out(&self, e: i64) -> Interval {
        Interval {
            lo: self.lo.round_down(e),
            hi: self.hi.round_up(e),
        }
    }
}

impl<'a> Add<&'a Interval> for &'a Interval {
    type Output = Interval;
    fn add(self, rhs: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &rhs.lo,
            hi: &self.hi + &rhs.hi,
        }
    }
}

impl<'a> Sub<&'a Interval> for &'a Interval {
    type Output = Interval;
    fn sub(self, rhs: &Interval) -> Interval {
        Interval {
            lo: &self.lo - &rhs.hi,
            hi: &self.hi - &rhs.lo,
        }
    }
}

impl<'a> Mul<&'a Interval> for &'a Interval {
    type Output = Interval;
    fn mul(self, rhs: &Interval) -> Interval {
        if self.lo.signum() >= 0 && rhs.lo.signum() >= 0 {
            return Interval {
                lo: &self.lo * &rhs.lo,
                hi: &self.hi * &rhs.hi,
            };
        }
        let c = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval { lo, hi }
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.17e}, {:.17e}]", self.lo.to_f64(), self.hi.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(m: i64, e: i64) -> Dyadic {
        Dyadic::new(BigInt::from(m), e)
    }

    #[test]
    fn normalizes_trailing_zeros() {
        let a = d(12, -4);
        assert_eq!(a.mantissa(), &BigInt::from(3));
        assert_eq!(a.exponent(), -2);
        assert_eq!(a, d(3, -2));
    }

    #[test]
    fn floor_and_ceil() {
        assert_eq!(d(7, -1).floor(), BigInt::from(3));
        assert_eq!(d(7, -1).ceil(), BigInt::from(4));
        assert_eq!(d(-7, -1).floor(), BigInt::from(-4));
        assert_eq!(d(-7, -1).ceil(), BigInt::from(-3));
        assert_eq!(d(5, 2).floor(), BigInt::from(20));
    }

    #[test]
    fn string_round_trip() {
        let a = d(-13, -7);
        assert_eq!(a.to_string(), "-13p-7");
        assert_eq!("-13p-7".parse::<Dyadic>().unwrap(), a);
        assert!("13e-7".parse::<Dyadic>().is_err());
    }

    #[test]
    fn rational_enclosure_is_outward() {
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        let iv = Interval::from_rational(&third, -20);
        assert!(iv.contains_rational(&third));
        assert!(iv.width() <= d(1, -20));
    }

    #[test]
    fn abs_of_straddling_interval() {
        let iv = Interval::new(d(-3, 0), d(2, 0));
        assert_eq!(iv.abs(), Interval::new(Dyadic::zero(), d(3, 0)));
    }

    proptest! {
        #[test]
        fn mul_contains_pointwise_products(a in -1000i64..1000, b in -1000i64..1000,
                                           c in -1000i64..1000, w in 0i64..50, x in 0i64..50) {
            let ia = Interval::new(d(a, -3), d(a + w, -3));
            let ib = Interval::new(d(c, -2), d(c + x, -2));
            let prod = &ia * &ib;
            for p in [d(a, -3), d(a + w, -3)] {
                for q in [d(c, -2), d(c + x, -2)] {
                    prop_assert!(prod.contains(&(&p * &q)));
                }
            }
            let _ = b;
        }

        #[test]
        fn round_out_encloses(m in -100000i64..100000, e in -30i64..0, g in -20i64..5) {
            let v = d(m, e);
            let r = Interval::point(v.clone()).round_out(g);
            prop_assert!(r.contains(&v));
            prop_assert!(r.width() <= d(1, g));
        }
    }
}
