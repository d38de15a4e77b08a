//! Successive minima of the body `|y_j| ≤ Y (1 ≤ j ≤ k)`,
//! `|y₀ + y₁ξ + … + y_kξ^k| ≤ Y^{−k}`.

use std::cell::RefCell;
use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{CheckReport, Verdict};
use crate::dyadic::{Dyadic, Interval};
use crate::error::{Error, Result};
use crate::linalg::{rank, IVec};
use crate::minimal_points::canonical_sign;
use crate::poly::IntPoly;
use crate::real_field::{approx_f64, poly_combine, sub_constant, XiSpec};

/// Absolute precision of gauge enclosures, in bits.
const GAUGE_BITS: u32 = 100;

#[derive(Clone, Debug)]
pub struct MinimaResult {
    /// Enclosures of `τ₁ ≤ … ≤ τ_{k+1}`.
    pub minima: Vec<Interval>,
    /// The independent points realizing them.
    pub vectors: Vec<IVec>,
    pub report: CheckReport,
}

/// Which side of the gauge's max is active.
#[derive(Clone, Debug)]
enum Exact {
    Rat(BigRational),
    /// `|P(ξ)|·Y^k`, the polynomial normalized so that `P(ξ) ≥ 0`
    Alg(IntPoly),
}

struct Point {
    y: IVec,
    a: BigRational,
    p: IntPoly,
    /// Encloses `P(ξ)`.
    v: Interval,
    b: Interval,
    enc: Interval,
    exact: Option<Exact>,
}

struct Gauge<'a> {
    xi: &'a XiSpec,
    y: BigRational,
    yk: BigRational,
    yk_enc: Interval,
    k: usize,
    prec: u32,
}

impl<'a> Gauge<'a> {
    /// `s` encloses `y₁ξ + … + y_kξ^k`.
    fn point(&self, y: IVec, s: &Interval) -> Result<Point> {
        let a = y[1..]
            .iter()
            .map(|v| BigRational::from_integer(v.abs()))
            .max()
            .unwrap_or_else(BigRational::zero)
            / &self.y;
        let p = IntPoly::new(y.clone());
        let v = if p.is_zero() {
            Interval::from_int(0)
        } else {
            &Interval::from_bigint(y[0].clone()) + s
        };
        let b = &v.abs() * &self.yk_enc;
        let enc = Interval::from_rational(&a, -(GAUGE_BITS as i64)).max(&b);
        let mut pt = Point { y, a, p, v, b, enc, exact: None };
        pt.exact = Some(self.resolve(&pt)?);
        Ok(pt)
    }

    /// `P` times the sign of `P(ξ)`.
    fn normalized(&self, pt: &Point) -> Result<IntPoly> {
        let s = match pt.v.sign() {
            Some(s) if s != 0 => s,
            _ => self.xi.sign_of(&pt.p)?,
        };
        Ok(if s < 0 {
            IntPoly::new(pt.p.coeffs().iter().map(|c| -c).collect())
        } else {
            pt.p.clone()
        })
    }

    /// Compares `P(ξ)·Y^k` with a rational exactly, `P(ξ) ≥ 0`.
    fn cmp_alg_rat(&self, p: &IntPoly, r: &BigRational) -> Result<Ordering> {
        let t = r / &self.yk;
        let scaled = IntPoly::new(p.coeffs().iter().map(|c| c * t.denom()).collect());
        Ok(self.xi.sign_of(&sub_constant(&scaled, t.numer()))?.cmp(&0))
    }

    fn resolve(&self, pt: &Point) -> Result<Exact> {
        if let Some(e) = &pt.exact {
            return Ok(e.clone());
        }
        let ai = Interval::from_rational(&pt.a, -(GAUGE_BITS as i64));
        if pt.b.hi() <= ai.lo() {
            return Ok(Exact::Rat(pt.a.clone()));
        }
        let q = self.normalized(pt)?;
        if pt.b.lo() > ai.hi() {
            return Ok(Exact::Alg(q));
        }
        Ok(if self.cmp_alg_rat(&q, &pt.a)? == Ordering::Greater {
            Exact::Alg(q)
        } else {
            Exact::Rat(pt.a.clone())
        })
    }

    fn cmp_exact(&self, a: &Exact, b: &Exact) -> Result<Ordering> {
        match (a, b) {
            (Exact::Rat(x), Exact::Rat(y)) => Ok(x.cmp(y)),
            (Exact::Alg(p), Exact::Alg(q)) => Ok(self.xi.sign_of(&poly_combine(1, p, -1, q))?.cmp(&0)),
            (Exact::Alg(p), Exact::Rat(r)) => self.cmp_alg_rat(p, r),
            (Exact::Rat(r), Exact::Alg(p)) => Ok(self.cmp_alg_rat(p, r)?.reverse()),
        }
    }

    fn cmp(&self, a: &Point, b: &Point) -> Result<Ordering> {
        if let Some(o) = a.enc.certified_cmp(&b.enc) {
            return Ok(o);
        }
        match (&a.exact, &b.exact) {
            (Some(x), Some(y)) => self.cmp_exact(x, y),
            _ => self.cmp_exact(&self.resolve(a)?, &self.resolve(b)?),
        }
    }

    fn cmp_rat(&self, a: &Point, t: &BigRational) -> Result<Ordering> {
        let ti = Interval::from_rational(t, -(GAUGE_BITS as i64));
        if let Some(o) = a.enc.certified_cmp(&ti) {
            if o != Ordering::Equal {
                return Ok(o);
            }
        }
        self.cmp_exact(&self.resolve(a)?, &Exact::Rat(t.clone()))
    }

    /// All canonical nonzero points of gauge at most `t`.
    fn points_within(&self, t: &BigRational) -> Result<Vec<Point>> {
        let bound = (t * &self.y).floor().to_integer();
        let rad = Interval::from_rational(&(t / &self.yk), -(GAUGE_BITS as i64));
        let powers = self.xi.power_table(self.k, self.prec + 8 + bound.bits() as u32)?;
        // float prefilter: a y0 candidate needs |y0 + s| <= rad, s = Σ y_j ξ^j
        let xf = approx_f64(self.xi);
        let pf: Vec<f64> = (0..=self.k).map(|j| xf.powi(j as i32)).collect();
        let rad_f = rad.hi().to_f64();
        let mut out = Vec::new();
        let mut idx = vec![-bound.clone(); self.k];
        loop {
            let fy: Vec<f64> = idx.iter().map(|v| v.to_f64().unwrap_or(f64::INFINITY)).collect();
            let sf: f64 = fy.iter().enumerate().map(|(j, v)| v * pf[j + 1]).sum();
            let mag: f64 = fy.iter().enumerate().map(|(j, v)| v.abs() * pf[j + 1]).sum();
            let slack = 1e-9 * (1.0 + mag);
            let near = (sf.round() - sf).abs() <= rad_f + slack
                || (rad_f + slack) >= 0.5
                || !mag.is_finite();
            if !near {
                if advance(&mut idx, &bound) {
                    return Ok(out);
                }
                continue;
            }
            let mut s = Interval::from_int(0);
            for (j, v) in idx.iter().enumerate() {
                s = &s + &powers[j + 1].scale(v);
            }
            let lo = (&Interval::from_int(0) - &s).lo().clone();
            let hi = (&Interval::from_int(0) - &s).hi().clone();
            let y0_lo = (&lo - rad.hi()).ceil();
            let y0_hi = (&hi + rad.hi()).floor();
            let mut y0 = y0_lo;
            while y0 <= y0_hi {
                let mut y = vec![y0.clone()];
                y.extend(idx.iter().cloned());
                if y.iter().any(|c| !c.is_zero()) && canonical_sign(&y) == y {
                    let pt = self.point(y, &s)?;
                    if self.cmp_rat(&pt, t)? != Ordering::Greater {
                        out.push(pt);
                    }
                }
                y0 += 1;
            }
            if advance(&mut idx, &bound) {
                return Ok(out);
            }
        }
    }
}

/// Odometer step over `[-bound, bound]^k`; true once wrapped around.
fn advance(idx: &mut [BigInt], bound: &BigInt) -> bool {
    for v in idx.iter_mut() {
        *v += 1;
        if &*v <= bound {
            return false;
        }
        *v = -bound.clone();
    }
    true
}

/// Successive minima `τ₁ ≤ … ≤ τ_{k+1}` of the body above with respect to
/// `ℤ^{k+1}`, by enumerating points in increasing gauge
/// `max(max_{j≥1} |y_j|/Y, |y₀ + … + y_kξ^k|·Y^k)`.
pub fn successive_minima(xi: &XiSpec, k: usize, y: &BigRational) -> Result<MinimaResult> {
    if !(1..=2).contains(&k) {
        return Err(Error::InvalidArgument("k must be 1 or 2".into()));
    }
    if y < &BigRational::from_integer(2.into()) {
        return Err(Error::InvalidArgument("Y must be at least 2".into()));
    }
    let yk = num_traits::pow(y.clone(), k);
    let extra = yk.ceil().to_integer().bits() as u32;
    let g = Gauge {
        xi,
        y: y.clone(),
        yk_enc: Interval::from_rational(&yk, -(GAUGE_BITS as i64 + 8)),
        yk,
        k,
        prec: GAUGE_BITS + extra + 8,
    };
    let mut t = BigRational::one();
    loop {
        let mut pts = g.points_within(&t)?;
        let err: RefCell<Option<Error>> = RefCell::new(None);
        pts.sort_by(|a, b| match g.cmp(a, b) {
            Ok(o) => o,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                Ordering::Equal
            }
        });
        if let Some(e) = err.into_inner() {
            return Err(e);
        }
        let mut chosen: Vec<&Point> = Vec::new();
        let mut rows: Vec<IVec> = Vec::new();
        for p in &pts {
            rows.push(p.y.clone());
            if rank(&rows) == rows.len() {
                chosen.push(p);
                if chosen.len() == k + 1 {
                    break;
                }
            } else {
                rows.pop();
            }
        }
        if chosen.len() == k + 1 {
            return finish(&g, &chosen);
        }
        t *= BigRational::from_integer(2.into());
    }
}

fn finish(g: &Gauge<'_>, chosen: &[&Point]) -> Result<MinimaResult> {
    let k = g.k;
    let exact: Vec<Exact> = chosen.iter().map(|p| g.resolve(p)).collect::<Result<_>>()?;
    let mut verdict = Verdict::Pass;
    let mut notes = Vec::new();

    for w in exact.windows(2) {
        if g.cmp_exact(&w[0], &w[1])? == Ordering::Greater {
            verdict = Verdict::Fail;
            notes.push("minima out of order".to_string());
        }
    }
    if g.cmp_exact(&exact[0], &Exact::Rat(BigRational::one()))? == Ordering::Greater {
        verdict = Verdict::Fail;
        notes.push("tau_1 > 1".to_string());
    }

    let lower = BigRational::new(BigInt::one(), (1..=k as u32 + 1).product::<u32>().into());
    let all_rational: Option<Vec<BigRational>> = exact
        .iter()
        .map(|e| match e {
            Exact::Rat(r) => Some(r.clone()),
            Exact::Alg(_) => None,
        })
        .collect();
    let product_note;
    if let Some(rs) = all_rational {
        let prod: BigRational = rs.iter().product();
        if prod < lower || prod > BigRational::one() {
            verdict = Verdict::Fail;
        }
        product_note = format!("product {prod} (exact)");
    } else {
        let prod = chosen.iter().skip(1).fold(chosen[0].enc.clone(), |a, p| &a * &p.enc);
        let lo_q = Dyadic::ceil_rational(&lower, -(GAUGE_BITS as i64));
        let one = Dyadic::one();
        if prod.lo() >= &lo_q && prod.hi() <= &one {
            // inside
        } else if prod.hi() < &Dyadic::floor_rational(&lower, -(GAUGE_BITS as i64)) || prod.lo() > &one {
            verdict = Verdict::Fail;
        } else if verdict == Verdict::Pass {
            verdict = Verdict::Inconclusive;
        }
        product_note = format!("product {:.6}", prod.mid_f64());
    }
    notes.push(format!("{product_note}, bounds [1/{}, 1]", (1..=k + 1).product::<usize>()));

    let minima: Vec<Interval> = chosen.iter().map(|p| p.enc.clone()).collect();
    let ratios: Vec<f64> = minima.iter().map(|m| m.mid_f64()).collect();
    let mut report = CheckReport::new("minima", vec![], verdict, notes.join("; "));
    report.empirical_constant = Some(ratios.iter().product());
    report.ratios = ratios;
    Ok(MinimaResult {
        minima,
        vectors: chosen.iter().map(|p| p.y.clone()).collect(),
        report,
    })
}
