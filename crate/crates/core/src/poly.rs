//! Univariate polynomials over ℤ and ℚ with exact sign evaluation, Sturm
//! sequences and bisection-based real root isolation.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::dyadic::{Dyadic, Interval};

/// Integer polynomial, constant term first, no trailing zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    /// Exact sign of `p(r)`.
    pub fn sign_at(&self, r: &BigRational) -> i32 {
        if self.is_zero() {
            return 0;
        }
        // homogenized: sum c_i p^i q^(d-i), q > 0
        let (p, q) = (r.numer(), r.denom());
        let d = self.coeffs.len() - 1;
        let mut total = BigInt::zero();
        let mut ppow = BigInt::one();
        let mut qpows = Vec::with_capacity(d + 1);
        let mut qp = BigInt::one();
        for _ in 0..=d {
            qpows.push(qp.clone());
            qp *= q;
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                total += c * &ppow * &qpows[d - i];
            }
            ppow *= p;
        }
        sign_of(&total)
    }

    pub fn eval_rational(&self, r: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * r + BigRational::from_integer(c.clone());
        }
        acc
    }

    /// Interval Horner evaluation; encloses `{p(t) : t ∈ x}`.
    pub fn eval_interval(&self, x: &Interval) -> Interval {
        let mut acc = Interval::from_int(0);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + &Interval::from_bigint(c.clone());
        }
        acc
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn to_rat(&self) -> RatPoly {
        RatPoly::new(
            self.coeffs
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        )
    }

    /// Squarefree test: `gcd(p, p')` is a constant.
    pub fn is_squarefree(&self) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            Some(_) => self.to_rat().gcd(&self.derivative().to_rat()).degree() == Some(0),
        }
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                1 if a.is_one() => write!(f, "x")?,
                1 => write!(f, "{a}x")?,
                _ if a.is_one() => write!(f, "x^{i}")?,
                _ => write!(f, "{a}x^{i}")?,
            }
        }
        Ok(())
    }
}

pub(crate) fn sign_of(v: &BigInt) -> i32 {
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

/// Rational polynomial, constant term first, trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatPoly {
    coeffs: Vec<BigRational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// `c · x^k`.
    pub fn monomial(c: BigRational, k: usize) -> Self {
        let mut v = vec![BigRational::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn add(&self, other: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = BigRational::zero();
        RatPoly::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).unwrap_or(&zero) + other.coeffs.get(i).unwrap_or(&zero)
                })
                .collect(),
        )
    }

    pub fn sub(&self, other: &RatPoly) -> RatPoly {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, k: &BigRational) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, other: &RatPoly) -> RatPoly {
        if self.is_zero() || other.is_zero() {
            return RatPoly::new(vec![]);
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }

    pub fn derivative(&self) -> RatPoly {
        RatPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &RatPoly) -> (RatPoly, RatPoly) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lead = divisor.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigRational::zero(); rem.len().saturating_sub(dd).max(1)];
        while rem.len() > dd && !rem.is_empty() {
            let top = rem.len() - 1;
            let c = &rem[top] / &lead;
            let shift = top - dd;
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[shift + j] -= &c * dc;
            }
            quot[shift] = c;
            rem.pop();
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
        }
        (RatPoly::new(quot), RatPoly::new(rem))
    }

    pub fn rem(&self, divisor: &RatPoly) -> RatPoly {
        self.div_rem(divisor).1
    }

    /// Monic greatest common divisor (zero only if both inputs are zero).
    pub fn gcd(&self, other: &RatPoly) -> RatPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        match a.coeffs.last().cloned() {
            Some(l) => a.scale(&(BigRational::one() / l)),
            None => a,
        }
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn sign_at(&self, x: &BigRational) -> i32 {
        let v = self.eval(x);
        if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        }
    }

    /// Primitive integer polynomial with the same roots and the same sign
    /// pattern (the scaling factor is positive).
    pub fn to_int_primitive(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::new(vec![]);
        }
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        IntPoly::new(ints.into_iter().map(|c| c / &g).collect())
    }
}

/// Sturm sequence `p, p', -rem(p, p'), ...`.
pub fn sturm_sequence(p: &RatPoly) -> Vec<RatPoly> {
    let mut seq = vec![p.clone()];
    let d = p.derivative();
    if d.is_zero() {
        return seq;
    }
    seq.push(d);
    loop {
        let n = seq.len();
        let r = seq[n - 2].rem(&seq[n - 1]);
        if r.is_zero() {
            break;
        }
        seq.push(r.scale(&-BigRational::one()));
    }
    seq
}

fn sign_variations(seq: &[RatPoly], x: &BigRational) -> usize {
    let mut count = 0;
    let mut last = 0;
    for s in seq.iter().map(|p| p.sign_at(x)).filter(|&s| s != 0) {
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// Number of distinct real roots of `p` in the closed interval `[a, b]`.
pub fn count_roots(p: &RatPoly, a: &BigRational, b: &BigRational) -> usize {
    let seq = sturm_sequence(p);
    count_with(&seq, a, b)
}

fn count_with(seq: &[RatPoly], a: &BigRational, b: &BigRational) -> usize {
    let va = sign_variations(seq, a);
    let vb = sign_variations(seq, b);
    let at_a = usize::from(seq[0].sign_at(a) == 0);
    va.saturating_sub(vb) + at_a
}

/// A closed rational interval containing exactly one root of some polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootBracket {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RootBracket {
    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    /// Outward dyadic enclosure at grid `2^e`.
    pub fn to_interval(&self, e: i64) -> Interval {
        if self.is_exact() {
            return Interval::from_rational(&self.lo, e);
        }
        Interval::new(
            Dyadic::floor_rational(&self.lo, e),
            Dyadic::ceil_rational(&self.hi, e),
        )
    }
}

/// Isolates every distinct real root of `p` in `[a, b]` into disjoint
/// brackets, sorted increasingly. A bracket is either a single exact rational
/// root or a closed interval with a sign change of `p` at its ends.
pub fn isolate_roots(p: &RatPoly, a: &BigRational, b: &BigRational) -> Vec<RootBracket> {
    let seq = sturm_sequence(p);
    let two = BigRational::from_integer(BigInt::from(2));
    // roots in the half-open interval (lo, hi]
    let half_open = |lo: &BigRational, hi: &BigRational| {
        sign_variations(&seq, lo).saturating_sub(sign_variations(&seq, hi))
    };
    let mut out = Vec::new();
    if p.sign_at(a) == 0 {
        out.push(RootBracket {
            lo: a.clone(),
            hi: a.clone(),
        });
    }
    let mut stack = vec![(a.clone(), b.clone())];
    while let Some((mut lo, mut hi)) = stack.pop() {
        match half_open(&lo, &hi) {
            0 => {}
            1 => {
                if p.sign_at(&hi) == 0 {
                    out.push(RootBracket { lo: hi.clone(), hi });
                    continue;
                }
                // `lo` may be a neighbouring root; shrink until it is not
                let mut exact = None;
                while p.sign_at(&lo) == 0 {
                    let mid = (&lo + &hi) / &two;
                    if p.sign_at(&mid) == 0 {
                        exact = Some(mid);
                        break;
                    }
                    if half_open(&mid, &hi) == 1 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                match exact {
                    Some(m) => out.push(RootBracket { lo: m.clone(), hi: m }),
                    None => out.push(RootBracket { lo, hi }),
                }
            }
            _ => {
                let mid = (&lo + &hi) / &two;
                stack.push((lo, mid.clone()));
                stack.push((mid, hi));
            }
        }
    }
    out.sort_by(|x, y| x.lo.cmp(&y.lo));
    out
}

/// Bisects a sign-change bracket of `p` until its width is at most `width`.
/// The bracket must contain exactly one simple root; endpoints that are roots
/// collapse the bracket to that point.
pub fn refine_root(p: &IntPoly, bracket: &RootBracket, width: &BigRational) -> RootBracket {
    let mut lo = bracket.lo.clone();
    let mut hi = bracket.hi.clone();
    let s_lo = p.sign_at(&lo);
    if s_lo == 0 {
        return RootBracket { lo: lo.clone(), hi: lo };
    }
    if p.sign_at(&hi) == 0 {
        return RootBracket { lo: hi.clone(), hi };
    }
    let two = BigRational::from_integer(BigInt::from(2));
    while &(&hi - &lo) > width {
        let mid = (&lo + &hi) / &two;
        let s = p.sign_at(&mid);
        if s == 0 {
            return RootBracket {
                lo: mid.clone(),
                hi: mid,
            };
        }
        if s == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    RootBracket { lo, hi }
}

/// Squarefree test and root count on a bracket, exposed for XiSpec validation.
pub fn roots_in(p: &IntPoly, a: &BigRational, b: &BigRational) -> usize {
    count_roots(&p.to_rat(), a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn sign_at_rational_points() {
        let p = IntPoly::from_i64(&[-2, 0, 1]);
        assert_eq!(p.sign_at(&r(1, 1)), -1);
        assert_eq!(p.sign_at(&r(3, 2)), 1);
        assert_eq!(p.sign_at(&r(-3, 2)), 1);
        let q = IntPoly::from_i64(&[-1, 3]);
        assert_eq!(q.sign_at(&r(1, 3)), 0);
    }

    #[test]
    fn sturm_counts_roots_of_cubic() {
        // (x-1)(x-2)(x+3) = x^3 - 7x + 6
        let p = IntPoly::from_i64(&[6, -7, 0, 1]).to_rat();
        assert_eq!(count_roots(&p, &r(-10, 1), &r(10, 1)), 3);
        assert_eq!(count_roots(&p, &r(0, 1), &r(3, 2)), 1);
        assert_eq!(count_roots(&p, &r(1, 1), &r(2, 1)), 2);
        assert_eq!(count_roots(&p, &r(3, 2), &r(7, 4)), 0);
    }

    #[test]
    fn isolation_separates_close_roots() {
        // (10x - 1)(10x - 2)(x - 5)
        let a = RatPoly::new(vec![r(-1, 1), r(10, 1)]);
        let b = RatPoly::new(vec![r(-2, 1), r(10, 1)]);
        let c = RatPoly::new(vec![r(-5, 1), r(1, 1)]);
        let p = a.mul(&b).mul(&c);
        let brackets = isolate_roots(&p, &r(-8, 1), &r(8, 1));
        assert_eq!(brackets.len(), 3);
        for (bk, root) in brackets.iter().zip([r(1, 10), r(1, 5), r(5, 1)]) {
            assert!(bk.lo <= root && root <= bk.hi);
        }
    }

    #[test]
    fn refine_sqrt2() {
        let p = IntPoly::from_i64(&[-2, 0, 1]);
        let b = refine_root(
            &p,
            &RootBracket {
                lo: r(1, 1),
                hi: r(2, 1),
            },
            &r(1, 1 << 30),
        );
        assert!(b.width() <= r(1, 1 << 30));
        assert_eq!(p.sign_at(&b.lo), -1);
        assert_eq!(p.sign_at(&b.hi), 1);
    }

    #[test]
    fn squarefree_detection() {
        assert!(IntPoly::from_i64(&[-2, 0, 1]).is_squarefree());
        // (x-1)^2 (x+1)
        assert!(!IntPoly::from_i64(&[1, -1, -1, 1]).is_squarefree());
    }

    #[test]
    fn gcd_and_primitive_part() {
        let p = IntPoly::from_i64(&[-2, 0, 1]).to_rat();
        let q = IntPoly::from_i64(&[2, -1, -2, 1]).to_rat(); // (x^2-2)(x-1)... no: (x-2)(x^2-1)
        assert_eq!(p.gcd(&q).degree(), Some(0));
        let half = RatPoly::new(vec![r(1, 2), r(-3, 4)]);
        assert_eq!(half.to_int_primitive(), IntPoly::from_i64(&[2, -3]));
    }
}
