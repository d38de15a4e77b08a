//! Certified upper bounds for the uniform exponent `λ̂ₙ`.
//!
//! Rational bounds are exact. Algebraic ones are enclosed by exact rational
//! bisection and rounded outward to dyadic endpoints, width at most `10⁻¹²`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::dyadic::Interval;
use crate::error::{Error, Result};
use crate::exponents::Assumptions;
use crate::poly::{isolate_roots, refine_root, IntPoly, RatPoly, RootBracket};

/// Bisection stops at this width (2^-44 < 10⁻¹³).
const BISECT_BITS: u64 = 44;
/// Output grid for enclosures.
const GRID: i64 = -48;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `1/⌊n/2⌋`
    DavenportSchmidt,
    /// `2/(n+1)` for odd `n`, a root in `[2/(n+2), 2/n)` for even `n`.
    LaurentSchleischitz,
    /// Positive root of `h x² + h x − 1`, bounding `λ̂_{2h}`.
    EvenT,
    /// Piecewise rational bound in terms of `δ_k`.
    DeltaPiecewise,
    /// `1/(n−m)` for the least admissible `m`.
    DeltaFirstM,
    /// Least admissible root of the `δ_k` quadratic.
    DeltaQuadratic,
    /// Largest root in `(0,1)` of the cubic in `λ` with parameter `ω₁`.
    Cubic,
}

impl BoundKind {
    pub fn tag(self) -> &'static str {
        match self {
            BoundKind::DavenportSchmidt => "davenport_schmidt",
            BoundKind::LaurentSchleischitz => "laurent_schleischitz",
            BoundKind::EvenT => "even_t",
            BoundKind::DeltaPiecewise => "delta_piecewise",
            BoundKind::DeltaFirstM => "delta_first_m",
            BoundKind::DeltaQuadratic => "delta_quadratic",
            BoundKind::Cubic => "cubic",
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub text: String,
    pub holds: bool,
}

fn cond(text: impl Into<String>, holds: bool) -> Condition {
    Condition {
        text: text.into(),
        holds,
    }
}

/// A certified value, either an exact rational or an algebraic root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundValue {
    Exact(BigRational),
    /// Root of `poly` isolated by `bracket` (strict sign change).
    Root { poly: IntPoly, bracket: RootBracket },
}

impl BoundValue {
    pub fn enclosure(&self) -> Interval {
        match self {
            BoundValue::Exact(r) => Interval::from_rational(r, GRID),
            BoundValue::Root { bracket, .. } => bracket.to_interval(GRID),
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            BoundValue::Exact(r) => Some(r),
            _ => None,
        }
    }

    /// Exact comparison with a rational.
    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        match self {
            BoundValue::Exact(v) => v.cmp(r),
            BoundValue::Root { poly, bracket } => {
                if r <= &bracket.lo {
                    return Ordering::Greater;
                }
                if r >= &bracket.hi {
                    return Ordering::Less;
                }
                let s = poly.sign_at(r);
                if s == 0 {
                    return Ordering::Equal;
                }
                // root < r iff p(r) has the sign of p(hi)
                if s == poly.sign_at(&bracket.hi) {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
        }
    }

    /// Exact comparison of two certified values.
    pub fn cmp_value(&self, other: &BoundValue) -> Ordering {
        match (self, other) {
            (_, BoundValue::Exact(r)) => self.cmp_rational(r),
            (BoundValue::Exact(r), _) => other.cmp_rational(r).reverse(),
            (
                BoundValue::Root { poly: p, bracket: a },
                BoundValue::Root { poly: q, bracket: b },
            ) => {
                let (mut a, mut b) = (a.clone(), b.clone());
                let mut width = a.width().max(b.width());
                for _ in 0..512 {
                    if a.hi < b.lo {
                        return Ordering::Less;
                    }
                    if b.hi < a.lo {
                        return Ordering::Greater;
                    }
                    width /= BigRational::from_integer(4.into());
                    a = refine_root(p, &a, &width);
                    b = refine_root(q, &b, &width);
                }
                // common root: compare through the gcd
                let g = p.to_rat().gcd(&q.to_rat());
                if g.degree().unwrap_or(0) > 0 {
                    let lo = a.lo.clone().max(b.lo.clone());
                    let hi = a.hi.clone().min(b.hi.clone());
                    if lo <= hi && crate::poly::count_roots(&g, &lo, &hi) > 0 {
                        return Ordering::Equal;
                    }
                }
                a.lo.cmp(&b.lo)
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.enclosure().mid_f64()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundResult {
    pub kind: BoundKind,
    pub n: u32,
    pub value: Option<BoundValue>,
    pub assumptions: Option<Assumptions>,
    pub chosen_m: Option<u32>,
    pub applicable: bool,
    pub conditions: Vec<Condition>,
}

impl BoundResult {
    fn inapplicable(
        kind: BoundKind,
        n: u32,
        assumptions: Option<&Assumptions>,
        conditions: Vec<Condition>,
    ) -> Self {
        BoundResult {
            kind,
            n,
            value: None,
            assumptions: assumptions.cloned(),
            chosen_m: None,
            applicable: false,
            conditions,
        }
    }

    fn with_value(kind: BoundKind, n: u32, value: BoundValue, conditions: Vec<Condition>) -> Self {
        BoundResult {
            kind,
            n,
            value: Some(value),
            assumptions: None,
            chosen_m: None,
            applicable: true,
            conditions,
        }
    }

    pub fn enclosure(&self) -> Option<Interval> {
        self.value.as_ref().map(|v| v.enclosure())
    }
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn qi(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

fn bisect_width() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << BISECT_BITS)
}

/// Root of `p` in `(lo, hi)` given a strict sign change at the ends.
fn root_between(p: &IntPoly, lo: BigRational, hi: BigRational) -> Result<BoundValue> {
    let (sa, sb) = (p.sign_at(&lo), p.sign_at(&hi));
    if sa == 0 {
        return Ok(BoundValue::Exact(lo));
    }
    if sb == 0 {
        return Ok(BoundValue::Exact(hi));
    }
    if sa == sb {
        return Err(Error::Internal(format!(
            "no sign change of {p} on [{lo}, {hi}]"
        )));
    }
    let b = refine_root(p, &RootBracket { lo, hi }, &bisect_width());
    if b.is_exact() {
        return Ok(BoundValue::Exact(b.lo));
    }
    Ok(BoundValue::Root {
        poly: p.clone(),
        bracket: b,
    })
}

/// Exact rational root of a quadratic in the bracket, if one exists.
fn rational_quadratic_root(p: &IntPoly, lo: &BigRational, hi: &BigRational) -> Option<BigRational> {
    if p.degree() != Some(2) {
        return None;
    }
    let c = p.coeffs();
    let disc = &c[1] * &c[1] - BigInt::from(4) * &c[2] * &c[0];
    if disc.is_negative() {
        return None;
    }
    let s = disc.sqrt();
    if &s * &s != disc {
        return None;
    }
    let two_a = &c[2] * 2u32;
    [-&c[1] + &s, -&c[1] - &s]
        .into_iter()
        .map(|num| BigRational::new(num, two_a.clone()))
        .find(|r| r >= lo && r <= hi)
}

/// `1/⌊n/2⌋`.
pub fn bound_davenport_schmidt(n: u32) -> Result<BoundResult> {
    if n < 2 {
        return Err(Error::InvalidArgument("n must be at least 2".into()));
    }
    Ok(BoundResult::with_value(
        BoundKind::DavenportSchmidt,
        n,
        BoundValue::Exact(q(1, (n / 2) as i64)),
        vec![cond("n >= 2", true)],
    ))
}

/// `(n/2)^n x^{n+1} − (n/2+1) x + 1` scaled to integer coefficients.
pub fn laurent_schleischitz_poly(n: u32) -> IntPoly {
    // multiply by 2^n to clear (n/2)^n, then the linear part by 2^n too
    let mut c = vec![BigInt::zero(); n as usize + 2];
    let pow2 = BigInt::one() << n;
    c[n as usize + 1] = num_traits::pow(BigInt::from(n), n as usize);
    c[1] = -(&pow2 * BigInt::from(n + 2)) / 2u32;
    c[0] = pow2;
    IntPoly::new(c)
}

/// `2/(n+1)` for odd `n`; for even `n` the root of
/// `(n/2)^n x^{n+1} − (n/2+1) x + 1` in `[2/(n+2), 2/n)`.
pub fn bound_laurent_schleischitz(n: u32) -> Result<BoundResult> {
    if n < 2 {
        return Err(Error::InvalidArgument("n must be at least 2".into()));
    }
    if n % 2 == 1 {
        return Ok(BoundResult::with_value(
            BoundKind::LaurentSchleischitz,
            n,
            BoundValue::Exact(q(2, n as i64 + 1)),
            vec![cond("n odd", true)],
        ));
    }
    let lo = q(2, n as i64 + 2);
    let hi = q(2, n as i64);
    // 2/n is always a simple root; the bound is the other one
    let (quot, rem) = laurent_schleischitz_poly(n)
        .to_rat()
        .div_rem(&RatPoly::new(vec![-hi.clone(), qi(1)]));
    if !rem.is_zero() {
        return Err(Error::Internal("2/n is not a root".into()));
    }
    let v = root_between(&quot.to_int_primitive(), lo.clone(), hi.clone())?;
    // the right end is open and the enclosure must sit strictly inside
    let inside = v.cmp_rational(&hi) == Ordering::Less && v.cmp_rational(&lo) != Ordering::Less;
    if !inside {
        return Err(Error::Internal("root escaped its bracket".into()));
    }
    Ok(BoundResult::with_value(
        BoundKind::LaurentSchleischitz,
        n,
        v,
        vec![
            cond("n even", true),
            cond(format!("root in [{lo}, {hi})"), true),
        ],
    ))
}

/// Positive root of `h x² + h x − 1`.
pub fn bound_even_t(half_n: u32) -> Result<BoundResult> {
    if half_n < 1 {
        return Err(Error::InvalidArgument("half_n must be at least 1".into()));
    }
    let h = BigInt::from(half_n);
    let p = IntPoly::new(vec![BigInt::from(-1), h.clone(), h]);
    let v = root_between(&p, qi(0), qi(1))?;
    Ok(BoundResult::with_value(
        BoundKind::EvenT,
        2 * half_n,
        v,
        vec![cond("n = 2h even", true)],
    ))
}

fn floor_q(r: &BigRational) -> BigInt {
    r.floor().to_integer()
}

fn ceil_q(r: &BigRational) -> BigInt {
    r.ceil().to_integer()
}

/// Piecewise bound from `δ = δ_k`: `1/(n−k)` when `2k+1 ≤ n < 2k+1+δ`,
/// otherwise `min(1/(n − ⌈(n−δ−1)/2⌉), 1/(⌊(n−δ−1)/2⌋ + 1 + δ))`.
pub fn bound_delta_piecewise(n: u32, a: &Assumptions) -> Result<BoundResult> {
    let kind = BoundKind::DeltaPiecewise;
    let delta = a.delta()?;
    let (nq, kq) = (qi(n), qi(a.k));
    let mut conds = vec![cond("delta_k >= 1", delta >= qi(1))];
    if delta < qi(1) {
        return Ok(BoundResult::inapplicable(kind, n, Some(a), conds));
    }
    let base = &kq * qi(2) + qi(1);
    conds.push(cond("n >= 2k+1", nq >= base));
    if nq < base {
        return Ok(BoundResult::inapplicable(kind, n, Some(a), conds));
    }
    let value = if nq < &base + &delta {
        conds.push(cond("n < 2k+1+delta_k: 1/(n-k)", true));
        BoundValue::Exact(qi(1) / (&nq - &kq))
    } else {
        conds.push(cond("n >= 2k+1+delta_k: two-term minimum", true));
        let t = (&nq - &delta - qi(1)) / qi(2);
        let first = qi(1) / (&nq - qi(ceil_q(&t)));
        let second = qi(1) / (qi(floor_q(&t)) + qi(1) + &delta);
        BoundValue::Exact(first.min(second))
    };
    let mut r = BoundResult::with_value(kind, n, value, conds);
    r.assumptions = Some(a.clone());
    Ok(r)
}

/// `1/(n−m)` for the least `m ≥ k` with
/// `2m+2 ≤ n < 2m+1+(1−1/(n−m))(1+δ)`.
pub fn bound_delta_first_m(n: u32, a: &Assumptions) -> Result<BoundResult> {
    let kind = BoundKind::DeltaFirstM;
    let delta = a.delta()?;
    let mut conds = vec![cond("delta_k >= 1", delta >= qi(1))];
    if delta < qi(1) {
        return Ok(BoundResult::inapplicable(kind, n, Some(a), conds));
    }
    let nq = qi(n);
    let mut m = a.k;
    while 2 * m + 2 <= n {
        let mq = qi(m);
        let rhs = &mq * qi(2) + qi(1) + (qi(1) - qi(1) / (&nq - &mq)) * (qi(1) + &delta);
        if nq < rhs {
            conds.push(cond(format!("m = {m}: 2m+2 <= n < {rhs}"), true));
            let mut r = BoundResult::with_value(kind, n, BoundValue::Exact(qi(1) / (&nq - mq)), conds);
            r.assumptions = Some(a.clone());
            r.chosen_m = Some(m);
            return Ok(r);
        }
        m += 1;
    }
    conds.push(cond("some m >= k satisfies the window condition", false));
    Ok(BoundResult::inapplicable(kind, n, Some(a), conds))
}

/// The quadratic whose positive root is `x(m)`, built literally from
/// `1/δ − A x/(δ D) − A x/D + ((1−x)/D − (D−1+x)/(δ D))(m+1) x`
/// with `A = n−m−1`, `D = n−2m−1`, then scaled to integers.
pub fn delta_quadratic(n: u32, m: u32, delta: &BigRational) -> Result<IntPoly> {
    if 2 * m + 2 > n {
        return Err(Error::InvalidArgument("need n >= 2m+2".into()));
    }
    let a = qi(n as i64 - m as i64 - 1);
    let d = qi(n as i64 - 2 * m as i64 - 1);
    let x = RatPoly::monomial(qi(1), 1);
    let c = |v: BigRational| RatPoly::constant(v);
    let one = qi(1);
    let t1 = c(&one / delta);
    let t2 = x.scale(&(&a / (delta * &d)));
    let t3 = x.scale(&(&a / &d));
    let inner = c(&one / &d)
        .sub(&x.scale(&(&one / &d)))
        .sub(&c(&d - &one).add(&x).scale(&(&one / (delta * &d))));
    let t4 = inner.mul(&x).scale(&qi(m + 1));
    let f = t1.sub(&t2).sub(&t3).add(&t4);
    Ok(f.to_int_primitive())
}

/// Positive root of [`delta_quadratic`].
pub fn delta_quadratic_root(n: u32, m: u32, delta: &BigRational) -> Result<BoundValue> {
    let p = delta_quadratic(n, m, delta)?;
    // p(0) = D > 0 up to the positive scaling and p(1) < 0
    if let Some(r) = rational_quadratic_root(&p, &qi(0), &qi(1)) {
        return Ok(BoundValue::Exact(r));
    }
    root_between(&p, qi(0), qi(1))
}

/// Least admissible `x(m)` over `k ≤ m ≤ ⌊(n−2)/2⌋`, admissibility being
/// `2m+2 ≤ n` and `2m+1+(1−x(m))(1+δ) ≤ n`.
pub fn bound_delta_quadratic(n: u32, a: &Assumptions) -> Result<BoundResult> {
    let kind = BoundKind::DeltaQuadratic;
    let delta = a.delta()?;
    let mut conds = vec![cond("delta_k >= 1", delta >= qi(1))];
    if delta < qi(1) {
        return Ok(BoundResult::inapplicable(kind, n, Some(a), conds));
    }
    let mut best: Option<(u32, BoundValue)> = None;
    let mut m = a.k;
    while 2 * m + 2 <= n {
        let v = delta_quadratic_root(n, m, &delta)?;
        // x >= 1 − (n−2m−1)/(1+δ), decided exactly
        let r = qi(1) - qi(n as i64 - 2 * m as i64 - 1) / (qi(1) + &delta);
        let ok = v.cmp_rational(&r) != Ordering::Less;
        conds.push(cond(
            format!("m = {m}: 2m+1+(1-x(m))(1+delta) <= n"),
            ok,
        ));
        if ok {
            let better = match &best {
                None => true,
                Some((_, b)) => v.cmp_value(b) == Ordering::Less,
            };
            if better {
                best = Some((m, v));
            }
        }
        m += 1;
    }
    match best {
        None => Ok(BoundResult::inapplicable(kind, n, Some(a), conds)),
        Some((m, v)) => {
            let mut r = BoundResult::with_value(kind, n, v, conds);
            r.assumptions = Some(a.clone());
            r.chosen_m = Some(m);
            Ok(r)
        }
    }
}

/// `2ω λ³ − (ω−1) λ² + 2λ − 1` with integer coefficients.
pub fn cubic_poly(omega1: &BigRational) -> IntPoly {
    RatPoly::new(vec![
        qi(-1),
        qi(2),
        qi(1) - omega1,
        omega1 * qi(2),
    ])
    .to_int_primitive()
}

/// Largest root in `(0, 1)` of the cubic.
pub fn bound_cubic(omega1: &BigRational) -> Result<BoundResult> {
    let kind = BoundKind::Cubic;
    let assumptions = Assumptions::new(1, omega1.clone());
    if omega1 < &qi(1) {
        return Ok(BoundResult::inapplicable(
            kind,
            3,
            Some(&assumptions),
            vec![cond("omega_1 >= 1", false)],
        ));
    }
    let p = cubic_poly(omega1);
    let roots = isolate_roots(&p.to_rat(), &qi(0), &qi(1));
    let last = roots
        .last()
        .ok_or_else(|| Error::Internal("cubic has no root in (0,1)".into()))?
        .clone();
    let v = if last.is_exact() {
        BoundValue::Exact(last.lo)
    } else {
        root_between(&p, last.lo, last.hi)?
    };
    let mut r = BoundResult::with_value(kind, 3, v, vec![cond("omega_1 >= 1", true)]);
    r.assumptions = Some(assumptions);
    Ok(r)
}

/// The `ω₁` at which the cubic has `λ` as a root:
/// `(1 − 2λ − λ²) / (2λ³ − λ²)`.
pub fn cubic_crossover(lambda: &BigRational) -> Result<BigRational> {
    let den = lambda * lambda * (lambda * qi(2) - qi(1));
    if den.is_zero() {
        return Err(Error::InvalidArgument("lambda must not be 0 or 1/2".into()));
    }
    Ok((qi(1) - lambda * qi(2) - lambda * lambda) / den)
}

/// All bounds for `n`, followed by the index of the smallest applicable one.
pub fn bound_table(n: u32, a: Option<&Assumptions>) -> Result<(Vec<BoundResult>, usize)> {
    if n < 2 {
        return Err(Error::InvalidArgument("n must be at least 2".into()));
    }
    let mut rows = vec![bound_davenport_schmidt(n)?, bound_laurent_schleischitz(n)?];
    if n % 2 == 0 {
        rows.push(bound_even_t(n / 2)?);
    }
    if let Some(a) = a {
        rows.push(bound_delta_piecewise(n, a)?);
        rows.push(bound_delta_first_m(n, a)?);
        rows.push(bound_delta_quadratic(n, a)?);
        if n == 3 && a.k == 1 {
            rows.push(bound_cubic(&a.omega_k)?);
        }
    }
    let mut best = 0;
    for (i, r) in rows.iter().enumerate() {
        if let (Some(v), Some(b)) = (&r.value, &rows[best].value) {
            if v.cmp_value(b) == Ordering::Less {
                best = i;
            }
        }
    }
    Ok((rows, best))
}

/// The smallest applicable bound, with the comparison table in `conditions`.
pub fn best_bound(n: u32, a: Option<&Assumptions>) -> Result<BoundResult> {
    let (rows, best) = bound_table(n, a)?;
    let mut winner = rows[best].clone();
    winner.conditions = rows
        .iter()
        .map(|r| {
            let text = match &r.value {
                Some(v) => format!("{} = {:.12}", r.kind, v.to_f64()),
                None => format!("{} not applicable", r.kind),
            };
            cond(text, r.applicable)
        })
        .collect();
    Ok(winner)
}

/// `v ≥ 1/n`, decided exactly.
pub fn above_dirichlet(v: &BoundValue, n: u32) -> bool {
    v.cmp_rational(&q(1, n as i64)) != Ordering::Less
}

pub fn width_ok(v: &BoundValue) -> bool {
    v.enclosure().width().to_f64() <= 1e-12
}

/// Rough decimal for display.
pub fn approx(v: &BoundValue) -> f64 {
    match v {
        BoundValue::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
        _ => v.to_f64(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ex1() -> Assumptions {
        Assumptions::new(1, qi(1))
    }

    fn ex2() -> Assumptions {
        Assumptions::new(2, q(7, 3))
    }

    fn val(r: &BoundResult) -> f64 {
        approx(r.value.as_ref().unwrap())
    }

    #[test]
    fn davenport_schmidt() {
        assert_eq!(bound_davenport_schmidt(2).unwrap().value, Some(BoundValue::Exact(qi(1))));
        assert_eq!(bound_davenport_schmidt(4).unwrap().value, Some(BoundValue::Exact(q(1, 2))));
        assert_eq!(bound_davenport_schmidt(7).unwrap().value, Some(BoundValue::Exact(q(1, 3))));
        assert!(bound_davenport_schmidt(1).is_err());
    }

    #[test]
    fn laurent_schleischitz() {
        assert_eq!(
            bound_laurent_schleischitz(3).unwrap().value,
            Some(BoundValue::Exact(q(1, 2)))
        );
        assert!((val(&bound_laurent_schleischitz(4).unwrap()) - 0.371).abs() < 1e-3);
        assert!((val(&bound_laurent_schleischitz(6).unwrap()) - 0.268).abs() < 1e-3);
        // n = 2: x^3 - 2x + 1 = (x-1)(x^2+x-1), root (sqrt5-1)/2 in [1/2, 1)
        let v = val(&bound_laurent_schleischitz(2).unwrap());
        assert!((v - 0.6180339887).abs() < 1e-9);
    }

    #[test]
    fn even_t_values() {
        let t1 = bound_even_t(1).unwrap();
        assert!((val(&t1) - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-12);
        assert!((val(&bound_even_t(2).unwrap()) - 0.366).abs() < 1e-3);
        assert!((val(&bound_even_t(3).unwrap()) - 0.264).abs() < 1e-3);
        for h in 1..20u32 {
            let hf = h as f64;
            let closed = ((hf * hf + 4.0 * hf).sqrt() - hf) / (2.0 * hf);
            let v = bound_even_t(h).unwrap();
            assert!((val(&v) - closed).abs() < 1e-12);
            assert!(width_ok(v.value.as_ref().unwrap()));
        }
    }

    #[test]
    fn piecewise_examples() {
        let e = |n, a: &Assumptions| bound_delta_piecewise(n, a).unwrap().value.unwrap();
        assert_eq!(e(5, &ex1()), BoundValue::Exact(q(1, 3)));
        assert_eq!(e(6, &ex1()), BoundValue::Exact(q(1, 4)));
        assert_eq!(e(7, &ex2()), BoundValue::Exact(q(2, 9)));
        assert!(!bound_delta_piecewise(3, &Assumptions::new(1, qi(2))).unwrap().applicable);
        assert!(!bound_delta_piecewise(4, &ex2()).unwrap().applicable);
    }

    #[test]
    fn first_m_examples() {
        let r = bound_delta_first_m(8, &ex1()).unwrap();
        assert_eq!(r.chosen_m, Some(3));
        assert_eq!(r.value, Some(BoundValue::Exact(q(1, 5))));
        assert!(!bound_delta_first_m(7, &ex1()).unwrap().applicable);
        let r = bound_delta_first_m(9, &ex2()).unwrap();
        assert_eq!(r.chosen_m, Some(3));
        assert_eq!(r.value, Some(BoundValue::Exact(q(1, 6))));
        for n in (3..60).step_by(2) {
            assert!(!bound_delta_first_m(n, &ex1()).unwrap().applicable, "n = {n}");
        }
    }

    #[test]
    fn quadratic_examples() {
        let r = bound_delta_quadratic(5, &ex1()).unwrap();
        assert!((val(&r) - (17f64.sqrt() - 3.0) / 4.0).abs() < 1e-12);
        let r = bound_delta_quadratic(7, &ex1()).unwrap();
        assert!((val(&r) - (7f64.sqrt() - 2.0) / 3.0).abs() < 1e-12);
        assert_eq!(r.chosen_m, Some(2));
        let r = bound_delta_quadratic(7, &ex2()).unwrap();
        assert_eq!(r.value, Some(BoundValue::Exact(q(1, 5))));
        let r = bound_delta_quadratic(8, &ex2()).unwrap();
        assert!((val(&r) - (286f64.sqrt() - 14.0) / 15.0).abs() < 1e-12);
        let r = bound_delta_quadratic(10, &ex2()).unwrap();
        assert!((val(&r) - (409f64.sqrt() - 17.0) / 20.0).abs() < 1e-12);
    }

    #[test]
    fn quadratic_expansion() {
        // clearing denominators gives
        // -(m+1)(1+d) x^2 + [(m+1)(d-n+2m+2) - (1+d)(n-m-1)] x + (n-2m-1)
        for (n, m, d) in [(7u32, 2u32, q(3, 2)), (9, 1, qi(1)), (12, 4, q(5, 2))] {
            let p = delta_quadratic(n, m, &d).unwrap();
            let (ni, mi) = (qi(n), qi(m));
            let expect = RatPoly::new(vec![
                &ni - &mi * qi(2) - qi(1),
                (&mi + qi(1)) * (&d - &ni + &mi * qi(2) + qi(2))
                    - (qi(1) + &d) * (&ni - &mi - qi(1)),
                -(&mi + qi(1)) * (qi(1) + &d),
            ])
            .to_int_primitive();
            assert_eq!(p, expect);
        }
    }

    #[test]
    fn cubic_values() {
        let r = bound_cubic(&qi(1)).unwrap();
        let v = r.value.unwrap();
        assert!((approx(&v) - 0.42385).abs() < 1e-5);
        // plugging the enclosure back brackets zero
        let p = cubic_poly(&qi(1));
        assert!(p.eval_interval(&v.enclosure()).contains_zero());
        let w = cubic_crossover(&q(4245, 10000)).unwrap();
        assert!((w.to_f64().unwrap() - 1.07).abs() < 0.01);
        let at = bound_cubic(&w).unwrap().value.unwrap();
        assert_eq!(at.cmp_rational(&q(4245, 10000)), Ordering::Equal);
        assert!(!bound_cubic(&q(1, 2)).unwrap().applicable);
    }

    #[test]
    fn cubic_is_nondecreasing_in_omega() {
        let mut prev: Option<BoundValue> = None;
        for i in 0..=20 {
            let w = qi(1) + q(i, 10);
            let v = bound_cubic(&w).unwrap().value.unwrap();
            if let Some(p) = &prev {
                assert_ne!(v.cmp_value(p), Ordering::Less, "omega = {w}");
            }
            prev = Some(v);
        }
    }

    #[test]
    fn best_bound_examples() {
        let b = best_bound(4, None).unwrap();
        assert_eq!(b.kind, BoundKind::EvenT);
        assert!((val(&b) - 0.366).abs() < 1e-3);
        let b = best_bound(7, Some(&ex1())).unwrap();
        assert!((val(&b) - 0.2153).abs() < 1e-4);
        let b = best_bound(3, Some(&ex1())).unwrap();
        assert_eq!(b.kind, BoundKind::Cubic);
        assert!((val(&b) - 0.42385).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn bounds_respect_dirichlet(n in 2u32..40, k in 1u32..4, num in 0i64..40) {
            let a = Assumptions::new(k, qi(k) + q(num, 10));
            let (rows, _) = bound_table(n, Some(&a)).unwrap();
            for r in rows.iter().filter(|r| r.applicable) {
                let v = r.value.as_ref().unwrap();
                prop_assert!(above_dirichlet(v, n), "{} at n = {}", r.kind, n);
                prop_assert!(width_ok(v));
            }
        }
    }
}
