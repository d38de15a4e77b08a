//! The number ξ under study and rigorous enclosures of its powers.
//!
//! Three kinds of input are supported: a real algebraic number given by an
//! integer polynomial with an isolating interval, a decimal constant with a
//! stated error, and a few named constants. Algebraic inputs (and `e`) admit
//! exact sign decisions for integer polynomial expressions in ξ; decimals do
//! not, and report precision exhaustion instead.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dyadic::{Dyadic, Interval};
use crate::error::{Error, Result};
use crate::poly::{count_roots, IntPoly, RatPoly, RootBracket};

/// Default cap, in bits, for adaptive refinement in sign decisions.
pub const DEFAULT_PRECISION_BUDGET: u64 = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedConstant {
    Sqrt2,
    Golden,
    Cbrt2,
    E,
}

impl NamedConstant {
    pub fn id(self) -> &'static str {
        match self {
            NamedConstant::Sqrt2 => "sqrt2",
            NamedConstant::Golden => "golden",
            NamedConstant::Cbrt2 => "cbrt2",
            NamedConstant::E => "e",
        }
    }

    fn from_id(s: &str) -> Option<Self> {
        Some(match s {
            "sqrt2" => NamedConstant::Sqrt2,
            "golden" => NamedConstant::Golden,
            "cbrt2" => NamedConstant::Cbrt2,
            "e" => NamedConstant::E,
            _ => return None,
        })
    }
}

/// How ξ was specified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum XiSource {
    Algebraic {
        coeffs: Vec<BigInt>,
        interval: (BigRational, BigRational),
    },
    Decimal {
        digits: String,
        stated_error: BigRational,
    },
    Named(NamedConstant),
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct AlgebraicRoot {
    poly: IntPoly,
    minpoly: RatPoly,
    /// Strict sign change of `poly`, with `lo > 0`.
    bracket: RootBracket,
    sign_lo: i32,
    /// `ceil(log2(max(1, bracket.hi)))`
    hi_bits: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    Algebraic(AlgebraicRoot),
    Decimal { lo: BigRational, hi: BigRational },
    E,
}

/// A validated positive irrational ξ.
#[derive(Clone, Debug)]
pub struct XiSpec {
    text: String,
    source: XiSource,
    repr: Repr,
    budget: u64,
}

impl PartialEq for XiSpec {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
    }
}

impl Eq for XiSpec {}

/// Result of rounding `q·ξ^i` to the nearest integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NearestMultiple {
    pub m: BigInt,
    /// Second candidate when `q·ξ^i` is exactly a half-integer (`m + 1`).
    pub tie: Option<BigInt>,
    /// Encloses `|q·ξ^i − m|`.
    pub err: Interval,
}

/// Parses a ξ specification.
///
/// Forms: `algebraic:<c0>,...,<cd>@[<lo>,<hi>]`, `decimal:<digits>~<error>`,
/// `named:sqrt2|golden|cbrt2|e`.
pub fn parse_xi(text: &str) -> Result<XiSpec> {
    let text = text.trim();
    let (kind, body) = text
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("missing ':' in xi spec {text:?}")))?;
    match kind {
        "algebraic" => {
            let (cs, iv) = body
                .split_once('@')
                .ok_or_else(|| Error::Parse("algebraic spec needs '@[lo,hi]'".into()))?;
            let coeffs = cs
                .split(',')
                .map(|c| {
                    BigInt::from_str(c.trim())
                        .map_err(|_| Error::Parse(format!("bad integer coefficient {c:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            let iv = iv.trim();
            let inner = iv
                .strip_prefix('[')
                .and_then(|s| s.strip_suffix(']'))
                .ok_or_else(|| Error::Parse(format!("bad interval {iv:?}")))?;
            let (lo, hi) = inner
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("bad interval {iv:?}")))?;
            let (lo, hi) = (parse_rational(lo)?, parse_rational(hi)?);
            XiSpec::algebraic(text.to_string(), coeffs, lo, hi)
        }
        "decimal" => {
            let (digits, err) = body
                .split_once('~')
                .ok_or_else(|| Error::Parse("decimal spec needs '~<error>'".into()))?;
            let mid = parse_rational(digits)?;
            let err = parse_rational(err)?;
            if !err.is_positive() {
                return Err(Error::Parse("stated error must be positive".into()));
            }
            let lo = &mid - &err;
            if !lo.is_positive() {
                return Err(Error::NonPositiveXi);
            }
            Ok(XiSpec {
                text: text.to_string(),
                source: XiSource::Decimal {
                    digits: digits.trim().to_string(),
                    stated_error: err.clone(),
                },
                repr: Repr::Decimal { lo, hi: mid + err },
                budget: DEFAULT_PRECISION_BUDGET,
            })
        }
        "named" => {
            let id = NamedConstant::from_id(body.trim())
                .ok_or_else(|| Error::Parse(format!("unknown named constant {body:?}")))?;
            let (coeffs, lo, hi): (&[i64], i64, i64) = match id {
                NamedConstant::Sqrt2 => (&[-2, 0, 1], 1, 2),
                NamedConstant::Golden => (&[-1, -1, 1], 1, 2),
                NamedConstant::Cbrt2 => (&[-2, 0, 0, 1], 1, 2),
                NamedConstant::E => {
                    return Ok(XiSpec {
                        text: format!("named:{}", id.id()),
                        source: XiSource::Named(id),
                        repr: Repr::E,
                        budget: DEFAULT_PRECISION_BUDGET,
                    })
                }
            };
            let mut xi = XiSpec::algebraic(
                format!("named:{}", id.id()),
                coeffs.iter().map(|&c| BigInt::from(c)).collect(),
                BigRational::from_integer(lo.into()),
                BigRational::from_integer(hi.into()),
            )?;
            xi.source = XiSource::Named(id);
            Ok(xi)
        }
        _ => Err(Error::Parse(format!("unknown xi kind {kind:?}"))),
    }
}

/// Parses `7`, `-3/2`, `1.25`, `1e-15` or `2.5E3` as an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(p) => (&s[..p], s[p + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let mut num = BigInt::from_str(&digits).map_err(|_| bad())?;
    if neg {
        num = -num;
    }
    let scale = exp - frac.len() as i64;
    if scale.unsigned_abs() > 100_000 {
        return Err(bad());
    }
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    })
}

fn ceil_log2_int(v: &BigInt) -> u64 {
    if v <= &BigInt::one() {
        0
    } else {
        (v - 1u32).bits()
    }
}

fn ceil_log2_u64(v: u64) -> u64 {
    if v <= 1 {
        0
    } else {
        64 - u64::from((v - 1).leading_zeros())
    }
}

/// Simplest rational (smallest denominator) in `[lo, hi]`, `0 < lo <= hi`.
fn simplest_between(lo: &BigRational, hi: &BigRational) -> BigRational {
    let fl = lo.floor();
    if &fl == lo {
        return fl;
    }
    let next = &fl + BigRational::one();
    if &next <= hi {
        return next;
    }
    let inner = simplest_between(
        &(BigRational::one() / (hi - &fl)),
        &(BigRational::one() / (lo - &fl)),
    );
    fl + BigRational::one() / inner
}

impl XiSpec {
    fn algebraic(
        text: String,
        coeffs: Vec<BigInt>,
        lo: BigRational,
        hi: BigRational,
    ) -> Result<XiSpec> {
        if lo > hi {
            return Err(Error::Parse("interval endpoints out of order".into()));
        }
        let poly = IntPoly::new(coeffs.clone());
        if poly.degree().unwrap_or(0) == 0 {
            return Err(Error::Parse("polynomial must have degree at least 1".into()));
        }
        if !poly.is_squarefree() {
            return Err(Error::NotSquarefree);
        }
        let minpoly = poly.to_rat();
        match count_roots(&minpoly, &lo, &hi) {
            0 => return Err(Error::NoRootInInterval),
            1 => {}
            k => return Err(Error::MultipleRoots(k)),
        }
        for end in [&lo, &hi] {
            if poly.sign_at(end) == 0 {
                return Err(Error::RationalXi(end.to_string()));
            }
        }
        let (mut a, mut b) = (lo.clone(), hi.clone());
        let s_a = poly.sign_at(&a);
        let two = BigRational::from_integer(2.into());
        // move the lower end past zero so the bracket is positive
        while !a.is_positive() {
            if !b.is_positive() {
                return Err(Error::NonPositiveXi);
            }
            let mid = (&a + &b) / &two;
            let mid = if mid.is_zero() { b.clone() / &two } else { mid };
            let s = poly.sign_at(&mid);
            if s == 0 {
                return Err(Error::RationalXi(mid.to_string()));
            }
            if s == s_a {
                a = mid;
            } else {
                b = mid;
            }
        }
        // rational roots a/b have b | lead; two such differ by >= 1/lead^2
        let lead = poly.leading().unwrap().abs();
        let target = BigRational::new(BigInt::one(), &lead * &lead * 2u32);
        let mut ra = a.clone();
        let mut rb = b.clone();
        while &rb - &ra > target {
            let mid = (&ra + &rb) / &two;
            let s = poly.sign_at(&mid);
            if s == 0 {
                return Err(Error::RationalXi(mid.to_string()));
            }
            if s == s_a {
                ra = mid;
            } else {
                rb = mid;
            }
        }
        let cand = simplest_between(&ra, &rb);
        if poly.sign_at(&cand) == 0 {
            return Err(Error::RationalXi(cand.to_string()));
        }
        let hi_bits = ceil_log2_int(&b.ceil().to_integer());
        Ok(XiSpec {
            text,
            source: XiSource::Algebraic {
                coeffs,
                interval: (lo, hi),
            },
            repr: Repr::Algebraic(AlgebraicRoot {
                poly,
                minpoly,
                bracket: RootBracket { lo: a, hi: b },
                sign_lo: s_a,
                hi_bits,
            }),
            budget: DEFAULT_PRECISION_BUDGET,
        })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn source(&self) -> &XiSource {
        &self.source
    }

    pub fn precision_budget(&self) -> u64 {
        self.budget
    }

    /// Caps adaptive refinement at `bits` bits.
    pub fn with_precision_budget(mut self, bits: u64) -> Self {
        self.budget = bits.max(64);
        self
    }

    /// True when exact zero tests are available (everything but decimals).
    pub fn is_exact(&self) -> bool {
        !matches!(self.repr, Repr::Decimal { .. })
    }

    /// The defining polynomial for algebraic inputs.
    pub fn minimal_polynomial(&self) -> Option<&IntPoly> {
        match &self.repr {
            Repr::Algebraic(a) => Some(&a.poly),
            _ => None,
        }
    }

    /// Always false for a validated spec: rational inputs are rejected at
    /// parse time. Decimal inputs are assumed irrational.
    pub fn is_rational(&self) -> bool {
        false
    }

    /// Upper bound on `ξ` as an integer power of two exponent: `ξ <= 2^b`.
    fn log2_upper(&self) -> u64 {
        match &self.repr {
            Repr::Algebraic(a) => a.hi_bits,
            Repr::Decimal { hi, .. } => ceil_log2_int(&hi.ceil().to_integer()),
            Repr::E => 2,
        }
    }

    /// Rational enclosure `[lo, hi]` of ξ of width at most `2^-bits`
    /// (decimals: the stated interval regardless of `bits`). Nested in `bits`.
    fn rational_enclosure(&self, bits: u64) -> (BigRational, BigRational) {
        match &self.repr {
            Repr::Algebraic(a) => {
                let target = BigRational::new(BigInt::one(), BigInt::one() << bits);
                let two = BigRational::from_integer(2.into());
                let (mut lo, mut hi) = (a.bracket.lo.clone(), a.bracket.hi.clone());
                while &hi - &lo > target {
                    let mid = (&lo + &hi) / &two;
                    // an exact hit would make ξ rational, excluded at parse
                    if a.poly.sign_at(&mid) == a.sign_lo {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                (lo, hi)
            }
            Repr::Decimal { lo, hi } => (lo.clone(), hi.clone()),
            Repr::E => {
                // S_K + [0, 1/(K!K)]; nested in K
                let mut k: u64 = 2;
                let mut fact = BigInt::from(2);
                while (fact.clone() * k).bits() <= bits + 1 {
                    k += 1;
                    fact *= k;
                }
                let mut sum = BigRational::zero();
                let mut f = BigInt::one();
                for j in 0..=k {
                    if j > 0 {
                        f *= j;
                    }
                    sum += BigRational::new(BigInt::one(), f.clone());
                }
                let tail = BigRational::new(BigInt::one(), f * k);
                let hi = &sum + tail;
                (sum, hi)
            }
        }
    }

    /// `x^i mod minpoly` when it is a constant, i.e. `ξ^i` is rational.
    pub fn exact_power(&self, i: u32) -> Option<BigRational> {
        if i == 0 {
            return Some(BigRational::one());
        }
        let Repr::Algebraic(a) = &self.repr else {
            return None;
        };
        if a.minpoly.degree()? > i as usize {
            return None;
        }
        let r = RatPoly::monomial(BigRational::one(), i as usize).rem(&a.minpoly);
        match r.degree() {
            None => Some(BigRational::zero()),
            Some(0) => Some(r.coeffs()[0].clone()),
            _ => None,
        }
    }

    /// Enclosure of `ξ^i` of width at most `2^-prec`; nested in `prec`.
    pub fn eval_power(&self, i: u32, prec: u32) -> Result<Interval> {
        let prec = prec.max(1) as i64;
        if let Some(c) = self.exact_power(i) {
            return Ok(Interval::from_rational(&c, -(prec + 1)));
        }
        // hi^i - lo^i <= i * 2^((i-1) b) * width
        let bits = prec as u64 + 1 + ceil_log2_u64(i as u64) + (i as u64 - 1) * self.log2_upper();
        let (lo, hi) = self.rational_enclosure(bits);
        let e = -(prec + 2);
        let lo_p = num_traits::pow(lo, i as usize);
        let hi_p = num_traits::pow(hi, i as usize);
        let out = Interval::new(
            Dyadic::floor_rational(&lo_p, e),
            Dyadic::ceil_rational(&hi_p, e),
        );
        if out.width() > Dyadic::new(BigInt::one(), -prec) {
            return Err(Error::PrecisionExhausted { bits: prec as u64 });
        }
        Ok(out)
    }

    /// Enclosures of `ξ^0..=ξ^n`, each of width at most `2^-prec`.
    pub fn power_table(&self, n: usize, prec: u32) -> Result<Vec<Interval>> {
        (0..=n as u32).map(|i| self.eval_power(i, prec)).collect()
    }

    /// Enclosure of `p(ξ)` with width about `2^-prec`.
    pub fn eval_poly(&self, p: &IntPoly, prec: u32) -> Result<Interval> {
        let Some(deg) = p.degree() else {
            return Ok(Interval::from_int(0));
        };
        let cbits = p.coeffs().iter().map(|c| c.bits()).max().unwrap_or(0);
        let inner = prec as u64 + cbits + ceil_log2_u64(deg as u64 + 1) + 1;
        let inner = u32::try_from(inner).map_err(|_| Error::PrecisionExhausted { bits: inner })?;
        let mut acc = Interval::from_int(0);
        for (j, c) in p.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let pw = self.eval_power(j as u32, inner)?;
            acc = &acc + &pw.scale(c);
        }
        Ok(acc)
    }

    /// Exact test for `p(ξ) = 0`; `None` when undecidable (decimal input).
    pub fn is_root(&self, p: &IntPoly) -> Option<bool> {
        if p.is_zero() {
            return Some(true);
        }
        match &self.repr {
            Repr::E => Some(false),
            Repr::Decimal { .. } => None,
            Repr::Algebraic(a) => {
                let r = p.to_rat().rem(&a.minpoly);
                if r.is_zero() {
                    return Some(true);
                }
                let g = r.gcd(&a.minpoly);
                if g.degree().unwrap_or(0) == 0 {
                    return Some(false);
                }
                // roots of g are roots of the minpoly; the bracket isolates ξ
                Some(count_roots(&g, &a.bracket.lo, &a.bracket.hi) > 0)
            }
        }
    }

    /// Exact sign of `p(ξ)`.
    pub fn sign_of(&self, p: &IntPoly) -> Result<i32> {
        if p.is_zero() {
            return Ok(0);
        }
        // reducing modulo the minimal polynomial keeps exact identities exact
        let reduced;
        let p = match &self.repr {
            Repr::Algebraic(a) if p.degree() >= a.minpoly.degree() => {
                let r = p.to_rat().rem(&a.minpoly);
                if r.is_zero() {
                    return Ok(0);
                }
                reduced = r.to_int_primitive();
                &reduced
            }
            _ => p,
        };
        let mut prec: u64 = 64;
        let mut zero_checked = false;
        loop {
            let v = self.eval_poly(p, prec as u32)?;
            if let Some(s) = v.sign() {
                if s != 0 {
                    return Ok(s);
                }
            }
            if !zero_checked {
                zero_checked = true;
                match self.is_root(p) {
                    Some(true) => return Ok(0),
                    Some(false) => {}
                    None => {
                        if let Repr::Decimal { .. } = self.repr {
                            return Err(Error::TieUnresolved);
                        }
                    }
                }
            }
            if prec >= self.budget {
                return Err(Error::PrecisionExhausted { bits: prec });
            }
            prec = (prec * 2).min(self.budget);
        }
    }

    /// Compares `|a(ξ)|` with `|b(ξ)|` exactly.
    pub fn compare_abs(&self, a: &IntPoly, b: &IntPoly) -> Result<Ordering> {
        let sa = self.sign_of(a)?;
        let sb = self.sign_of(b)?;
        let diff = poly_combine(sa, a, -sb, b);
        Ok(self.sign_of(&diff)?.cmp(&0))
    }

    /// Nearest integer to `q·ξ^i`, with half-integer ties reported.
    pub fn nearest_integer_multiple(&self, i: u32, q: &BigInt) -> Result<NearestMultiple> {
        if !q.is_positive() {
            return Err(Error::InvalidArgument("q must be positive".into()));
        }
        if let Some(c) = self.exact_power(i) {
            let v = c * q;
            let fl = v.floor();
            let frac = &v - &fl;
            let half = BigRational::new(BigInt::one(), 2.into());
            let (m, tie) = match frac.cmp(&half) {
                Ordering::Less => (fl.to_integer(), None),
                Ordering::Equal => (fl.to_integer(), Some(fl.to_integer() + 1u32)),
                Ordering::Greater => (fl.to_integer() + 1u32, None),
            };
            let err = (&v - BigRational::from_integer(m.clone())).abs();
            return Ok(NearestMultiple {
                m,
                tie,
                err: Interval::from_rational(&err, -64),
            });
        }
        let prec = 64 + q.bits() as u32;
        let approx = self.eval_power(i, prec)?.scale(q);
        let mut m = approx.midpoint().to_rational().round().to_integer();
        let xi_i = monomial_poly(q * 2u32, i);
        for _ in 0..4 {
            // 2q ξ^i - (2m + 1) and 2q ξ^i - (2m - 1)
            let upper = self.sign_of(&sub_constant(&xi_i, &(&m * 2u32 + 1u32)))?;
            let lower = self.sign_of(&sub_constant(&xi_i, &(&m * 2u32 - 1u32)))?;
            if upper > 0 {
                m += 1u32;
                continue;
            }
            if lower < 0 {
                m -= 1u32;
                continue;
            }
            let tie = if upper == 0 {
                Some(&m + 1u32)
            } else if lower == 0 {
                m -= 1u32;
                Some(&m + 1u32)
            } else {
                None
            };
            let err_poly = sub_constant(&monomial_poly(q.clone(), i), &m);
            let err = self.eval_poly(&err_poly, prec)?.abs();
            return Ok(NearestMultiple { m, tie, err });
        }
        Err(Error::Internal("nearest integer search did not settle".into()))
    }
}

/// `coeff · x^i`
pub fn monomial_poly(coeff: BigInt, i: u32) -> IntPoly {
    let mut c = vec![BigInt::zero(); i as usize + 1];
    c[i as usize] = coeff;
    IntPoly::new(c)
}

/// `p − c`
pub fn sub_constant(p: &IntPoly, c: &BigInt) -> IntPoly {
    let mut coeffs = p.coeffs().to_vec();
    if coeffs.is_empty() {
        coeffs.push(BigInt::zero());
    }
    coeffs[0] -= c;
    IntPoly::new(coeffs)
}

/// `sa·a + sb·b` for small integer multipliers.
pub fn poly_combine(sa: i32, a: &IntPoly, sb: i32, b: &IntPoly) -> IntPoly {
    let len = a.coeffs().len().max(b.coeffs().len());
    let mut out = vec![BigInt::zero(); len];
    for (j, c) in a.coeffs().iter().enumerate() {
        out[j] += c * sa;
    }
    for (j, c) in b.coeffs().iter().enumerate() {
        out[j] += c * sb;
    }
    IntPoly::new(out)
}

/// The residual component `x0·X^i − xi` as a polynomial.
pub fn residual_poly(x0: &BigInt, i: u32, xi: &BigInt) -> IntPoly {
    sub_constant(&monomial_poly(x0.clone(), i), xi)
}

impl fmt::Display for XiSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl FromStr for XiSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_xi(s)
    }
}

impl Serialize for XiSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

impl<'de> Deserialize<'de> for XiSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_xi(&s).map_err(serde::de::Error::custom)
    }
}

/// Rough floating value of ξ, for reporting only.
pub fn approx_f64(xi: &XiSpec) -> f64 {
    xi.eval_power(1, 60)
        .map(|v| v.mid_f64())
        .unwrap_or_else(|_| match &xi.repr {
            Repr::Decimal { lo, hi } => ((lo + hi) / BigRational::from_integer(2.into()))
                .to_f64()
                .unwrap_or(f64::NAN),
            _ => f64::NAN,
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sqrt2() -> XiSpec {
        parse_xi("algebraic:-2,0,1@[1,2]").unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parse_forms() {
        let s = sqrt2();
        assert_eq!(s.text(), "algebraic:-2,0,1@[1,2]");
        let g = parse_xi("named:golden").unwrap();
        assert!(matches!(g.source(), XiSource::Named(NamedConstant::Golden)));
        let v = g.eval_power(1, 40).unwrap();
        assert!((v.mid_f64() - 1.618033988749895).abs() < 1e-11);
        let d = parse_xi("decimal:2.718281828459045~1e-15").unwrap();
        match d.source() {
            XiSource::Decimal {
                digits,
                stated_error,
            } => {
                assert_eq!(digits, "2.718281828459045");
                assert_eq!(stated_error, &rat(1, 1_000_000_000_000_000));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_xi("algebraic:-2,0,1@[2,3]"),
            Err(Error::NoRootInInterval)
        ));
        assert!(matches!(
            parse_xi("algebraic:-2,0,1@[-2,2]"),
            Err(Error::MultipleRoots(2))
        ));
        assert!(matches!(
            parse_xi("algebraic:-3,2@[1,2]"),
            Err(Error::RationalXi(_))
        ));
        // (2x-3)(x^2-2): rational root 3/2 isolated away from sqrt2
        assert!(matches!(
            parse_xi("algebraic:6,-4,-3,2@[3/2,5/3]"),
            Err(Error::RationalXi(_))
        ));
        assert!(matches!(
            parse_xi("algebraic:4,-4,1@[1,3]"),
            Err(Error::NotSquarefree)
        ));
        assert!(matches!(
            parse_xi("algebraic:-2,0,1@[-2,-1]"),
            Err(Error::NonPositiveXi)
        ));
        assert!(parse_xi("named:pi").is_err());
        assert!(parse_xi("sqrt2").is_err());
        assert!(parse_xi("decimal:1.5~0").is_err());
        assert!(parse_xi("algebraic:x,1@[1,2]").is_err());
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("-3/2").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("1.25").unwrap(), rat(5, 4));
        assert_eq!(parse_rational("2.5E3").unwrap(), rat(2500, 1));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn powers_of_sqrt2() {
        let s = sqrt2();
        assert_eq!(s.eval_power(2, 10).unwrap(), Interval::from_int(2));
        assert_eq!(s.eval_power(0, 10).unwrap(), Interval::from_int(1));
        assert_eq!(s.eval_power(4, 10).unwrap(), Interval::from_int(4));
        let v = s.eval_power(1, 30).unwrap();
        assert!(v.width() <= Dyadic::new(1.into(), -30));
        assert!(v.contains_rational(&rat(141421356, 100000000)) == false);
        assert!((v.mid_f64() - std::f64::consts::SQRT_2).abs() < 1e-9);
        let sq = &v * &v;
        assert!(sq.contains(&Dyadic::from_int(2)));
    }

    #[test]
    fn e_enclosure() {
        let e = parse_xi("named:e").unwrap();
        let v = e.eval_power(1, 50).unwrap();
        assert!((v.mid_f64() - std::f64::consts::E).abs() < 1e-14);
        let v3 = e.eval_power(3, 40).unwrap();
        assert!((v3.mid_f64() - std::f64::consts::E.powi(3)).abs() < 1e-9);
        assert_eq!(e.sign_of(&IntPoly::from_i64(&[-3, 1])).unwrap(), -1);
    }

    #[test]
    fn decimal_exhaustion() {
        let d = parse_xi("decimal:2.718281828459045~1e-15").unwrap();
        assert!(d.eval_power(1, 40).is_ok());
        assert!(matches!(
            d.eval_power(1, 80),
            Err(Error::PrecisionExhausted { .. })
        ));
    }

    #[test]
    fn nearest_multiples() {
        let s = sqrt2();
        let r = s.nearest_integer_multiple(1, &BigInt::from(5)).unwrap();
        assert_eq!(r.m, BigInt::from(7));
        assert!(r.tie.is_none());
        assert!(r.err.contains_rational(&rat(7106781, 100000000)) || r.err.mid_f64() > 0.0710);
        assert!((r.err.mid_f64() - 0.0710678118654752).abs() < 1e-12);

        let r = s.nearest_integer_multiple(2, &BigInt::from(3)).unwrap();
        assert_eq!(r.m, BigInt::from(6));
        assert_eq!(r.err, Interval::from_int(0));

        let g = parse_xi("named:golden").unwrap();
        let r = g.nearest_integer_multiple(1, &BigInt::from(8)).unwrap();
        assert_eq!(r.m, BigInt::from(13));
        assert!((r.err.mid_f64() - 0.05572809).abs() < 1e-7);
    }

    #[test]
    fn half_integer_ties() {
        // ξ = sqrt(1/2)·... use ξ^2 = 5/2 via 2x^2 - 5
        let x = parse_xi("algebraic:-5,0,2@[1,2]").unwrap();
        let r = x.nearest_integer_multiple(2, &BigInt::from(1)).unwrap();
        assert_eq!(r.m, BigInt::from(2));
        assert_eq!(r.tie, Some(BigInt::from(3)));
        // an irrational half-integer hit: ξ = (1+sqrt2)/2, 2ξ - 1 = sqrt2 is not
        // an integer, but 2·ξ^1 rounding is unambiguous
        let y = parse_xi("algebraic:-1,-4,4@[1,2]").unwrap();
        let r = y.nearest_integer_multiple(1, &BigInt::from(2)).unwrap();
        assert_eq!(r.m, BigInt::from(2));
        assert!(r.tie.is_none());
    }

    #[test]
    fn exact_signs() {
        let s = sqrt2();
        // x^3 - 2x = 0 at sqrt2
        assert_eq!(s.sign_of(&IntPoly::from_i64(&[0, -2, 0, 1])).unwrap(), 0);
        assert_eq!(s.sign_of(&IntPoly::from_i64(&[-7, 5])).unwrap(), 1);
        // |5 sqrt2 - 7| < |2 sqrt2 - 3|
        let a = IntPoly::from_i64(&[-7, 5]);
        let b = IntPoly::from_i64(&[-3, 2]);
        assert_eq!(s.compare_abs(&a, &b).unwrap(), Ordering::Less);
        assert_eq!(s.compare_abs(&a, &a).unwrap(), Ordering::Equal);
        // reducible defining polynomial: (x^2-2)(x^2-3) at sqrt2; x^2-2 vanishes
        let r = parse_xi("algebraic:6,0,-5,0,1@[1,3/2]").unwrap();
        assert_eq!(r.sign_of(&IntPoly::from_i64(&[-2, 0, 1])).unwrap(), 0);
        assert_eq!(r.sign_of(&IntPoly::from_i64(&[-3, 0, 1])).unwrap(), -1);
    }

    #[test]
    fn serde_round_trip() {
        let s = parse_xi("named:cbrt2").unwrap();
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, "\"named:cbrt2\"");
        let back: XiSpec = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
    }

    proptest! {
        #[test]
        fn nested_enclosures(i in 0u32..6, p1 in 1u32..80, extra in 1u32..80, which in 0usize..4) {
            let specs = ["named:sqrt2", "named:golden", "named:cbrt2", "named:e"];
            let xi = parse_xi(specs[which]).unwrap();
            let a = xi.eval_power(i, p1).unwrap();
            let b = xi.eval_power(i, p1 + extra).unwrap();
            prop_assert!(b.is_subset_of(&a));
            prop_assert!(b.width() <= Dyadic::new(1.into(), -((p1 + extra) as i64)));
        }

        #[test]
        fn sqrt2_square_contains_two(p in 1u32..200) {
            let v = sqrt2().eval_power(1, p).unwrap();
            prop_assert!((&v * &v).contains(&Dyadic::from_int(2)));
        }

        #[test]
        fn nearest_is_nearest(q in 1i64..5000, i in 1u32..4) {
            let xi = parse_xi("named:cbrt2").unwrap();
            let r = xi.nearest_integer_multiple(i, &BigInt::from(q)).unwrap();
            let f = q as f64 * 2f64.powf(i as f64 / 3.0);
            prop_assert_eq!(r.m.to_i64().unwrap(), f.round() as i64);
        }
    }
}
