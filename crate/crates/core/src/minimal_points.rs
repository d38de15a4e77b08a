//! Minimal points (best approximation vectors) of `(ξ, ξ², …, ξⁿ)`.
//!
//! A vector `x = (x0, …, xn)` has norm `max |x_j|` and residual
//! `L(x) = max_{1≤i≤n} |x0 ξ^i − x_i|`. The minimal points are the records of
//! the staircase `N ↦ min{L(x) : 0 < ‖x‖ ≤ N}`.
//!
//! The engine first enumerates every norm exhaustively (per `x0` the best
//! choice of the other coordinates is a clamped rounding) until the running
//! record is certified below `1/2`. Beyond that point every record has
//! rounded coordinates, so a scan over `x0` with nearest-integer vectors is
//! complete up to the norm of the first unscanned `x0`.

use std::cmp::Ordering;
use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::{Dyadic, Interval};
use crate::error::{Error, Result};
use crate::linalg::{rank, sup_norm, IVec};
use crate::poly::IntPoly;
use crate::real_field::{residual_poly, XiSpec};

/// Precision (bits below the binary point) of stored residual enclosures.
const STORE_PREC: u32 = 80;
const CHUNK: u64 = 2048;

/// An integer vector with its norm and an enclosure of its residual.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxVector {
    pub coords: IVec,
    pub norm: BigInt,
    pub residual: Interval,
}

impl ApproxVector {
    pub fn x0(&self) -> &BigInt {
        &self.coords[0]
    }
}

#[derive(Clone, Debug)]
pub struct MinimalSequence {
    pub xi: XiSpec,
    pub n: usize,
    pub points: Vec<ApproxVector>,
    /// Every vector of norm at most this value was accounted for.
    pub scan_horizon: BigInt,
    pub x0_max: u64,
    /// Norm through which the exhaustive phase ran.
    pub box_extent: BigInt,
    /// 1-based indices `i` with `rank(x_{i-1}, x_i, x_{i+1}) = 3`.
    pub index_set_i: Vec<usize>,
    /// 1-based indices `j ∈ I` whose successor `i ∈ I` spans a different space.
    pub index_set_j: Vec<usize>,
}

impl MinimalSequence {
    /// The `i`-th point, 1-based.
    pub fn point(&self, i: usize) -> Result<&ApproxVector> {
        if i == 0 || i > self.points.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.points.len(),
            });
        }
        Ok(&self.points[i - 1])
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Flips signs so that the first nonzero coordinate is positive.
pub fn canonical_sign(coords: &[BigInt]) -> IVec {
    match coords.iter().find(|c| !c.is_zero()) {
        Some(c) if c.is_negative() => coords.iter().map(|x| -x).collect(),
        _ => coords.to_vec(),
    }
}

/// The contiguous slice `(x_k, …, x_{k+l})`.
pub fn segment(coords: &[BigInt], k: usize, l: usize) -> Result<IVec> {
    let end = k + l;
    if end >= coords.len() {
        return Err(Error::IndexOutOfRange {
            index: end,
            len: coords.len(),
        });
    }
    Ok(coords[k..=end].to_vec())
}

/// Enclosures of `|x0 ξ^i − x_i|` for `i = 1..n`, each of width at most
/// `2^-prec`.
pub fn residual_components(coords: &[BigInt], xi: &XiSpec, prec: u32) -> Result<Vec<Interval>> {
    let x0 = &coords[0];
    let inner = prec + x0.bits() as u32 + 1;
    (1..coords.len())
        .map(|i| {
            let p = xi.eval_power(i as u32, inner)?;
            Ok((&p.scale(x0) - &Interval::from_bigint(coords[i].clone())).abs())
        })
        .collect()
}

/// Enclosure of `L(x) = max_i |x0 ξ^i − x_i|` of width at most `2^-prec`.
pub fn residual(coords: &[BigInt], xi: &XiSpec, prec: u32) -> Result<Interval> {
    if coords.len() < 2 {
        return Err(Error::InvalidArgument(
            "a vector needs at least two coordinates".into(),
        ));
    }
    if coords.iter().all(|c| c.is_zero()) {
        return Err(Error::InvalidArgument("zero vector".into()));
    }
    let comps = residual_components(coords, xi, prec)?;
    Ok(comps.iter().skip(1).fold(comps[0].clone(), |a, b| a.max(b)))
}

fn component_polys(coords: &[BigInt]) -> Vec<IntPoly> {
    (1..coords.len())
        .map(|i| residual_poly(&coords[0], i as u32, &coords[i]))
        .collect()
}

/// Index (0-based among `1..=n`) of a component attaining the residual.
fn exact_argmax(coords: &[BigInt], xi: &XiSpec) -> Result<usize> {
    let comps = residual_components(coords, xi, 64)?;
    let best_lo = comps.iter().map(|c| c.lo().clone()).max().unwrap();
    let cands: Vec<usize> = (0..comps.len())
        .filter(|&i| comps[i].hi() >= &best_lo)
        .collect();
    if cands.len() == 1 {
        return Ok(cands[0]);
    }
    let polys = component_polys(coords);
    let mut best = cands[0];
    for &c in &cands[1..] {
        if xi.compare_abs(&polys[c], &polys[best])? == Ordering::Greater {
            best = c;
        }
    }
    Ok(best)
}

/// The polynomial `x0 X^i − x_i` whose absolute value at ξ is `L(x)`.
pub fn residual_witness(coords: &[BigInt], xi: &XiSpec) -> Result<IntPoly> {
    let i = exact_argmax(coords, xi)?;
    Ok(component_polys(coords).swap_remove(i))
}

/// Exact comparison of `L(a)` and `L(b)`.
pub fn compare_residuals(a: &[BigInt], b: &[BigInt], xi: &XiSpec) -> Result<Ordering> {
    for prec in [64u32, 160] {
        let ra = residual(a, xi, prec)?;
        let rb = residual(b, xi, prec)?;
        if let Some(o) = ra.certified_cmp(&rb) {
            return Ok(o);
        }
    }
    let pa = residual_witness(a, xi)?;
    let pb = residual_witness(b, xi)?;
    xi.compare_abs(&pa, &pb)
}

fn cmp_with_enclosures(
    a: &[BigInt],
    la: &Interval,
    b: &[BigInt],
    lb: &Interval,
    xi: &XiSpec,
) -> Result<Ordering> {
    match la.certified_cmp(lb) {
        Some(o) => Ok(o),
        None => compare_residuals(a, b, xi),
    }
}

/// Nearest integer to `x0·ξ^i` from a power enclosure, falling back to exact
/// rounding when the enclosure straddles a half-integer. Returns the
/// candidates (two on an exact tie).
fn round_component(
    xi: &XiSpec,
    power: &Interval,
    i: usize,
    x0: &BigInt,
) -> Result<(BigInt, Option<BigInt>)> {
    let v = power.scale(x0);
    let half = Dyadic::new(BigInt::one(), -1);
    let a = (v.lo() + &half).floor();
    let b = (v.hi() + &half).floor();
    if a == b {
        return Ok((a, None));
    }
    let r = xi.nearest_integer_multiple(i as u32, x0)?;
    Ok((r.m, r.tie))
}

struct Scanner<'a> {
    xi: &'a XiSpec,
    n: usize,
    powers: Vec<Interval>,
}

impl<'a> Scanner<'a> {
    fn new(xi: &'a XiSpec, n: usize, max_x0: u64) -> Result<Self> {
        let prec = 72 + 64 - max_x0.max(1).leading_zeros();
        Ok(Scanner {
            xi,
            n,
            powers: xi.power_table(n, prec)?,
        })
    }

    /// Nearest-integer vector at `x0` with its residual enclosure, or `None`
    /// when some coordinate is an exact tie (then the residual is `>= 1/2`).
    fn rounded(&self, x0: u64) -> Result<Option<(IVec, Interval)>> {
        let x0b = BigInt::from(x0);
        let mut coords = Vec::with_capacity(self.n + 1);
        coords.push(x0b.clone());
        let mut l = Interval::from_int(0);
        for i in 1..=self.n {
            let (m, tie) = round_component(self.xi, &self.powers[i], i, &x0b)?;
            if tie.is_some() {
                return Ok(None);
            }
            let r = (&self.powers[i].scale(&x0b) - &Interval::from_bigint(m.clone())).abs();
            l = l.max(&r);
            coords.push(m);
        }
        Ok(Some((coords, l)))
    }

    /// A lower bound for the norm of every rounded vector at `x0' >= x0`.
    fn norm_lower(&self, x0: u64) -> Result<BigInt> {
        let x0b = BigInt::from(x0);
        let mut best = x0b.clone();
        for i in 1..=self.n {
            let (m, _) = round_component(self.xi, &self.powers[i], i, &x0b)?;
            best = best.max(m.abs());
        }
        Ok(best)
    }
}

#[derive(Clone, Debug)]
struct Candidate {
    coords: IVec,
    norm: BigInt,
    l: Interval,
}

/// Exhaustive phase: records for norms `1..=N` until the record residual is
/// certified below `1/2`. Returns the records and the final `N`.
fn box_phase(xi: &XiSpec, n: usize) -> Result<(Vec<ApproxVector>, BigInt)> {
    let half = Dyadic::new(BigInt::one(), -1);
    let mut records: Vec<ApproxVector> = Vec::new();
    let mut big_n: u64 = 0;
    loop {
        big_n += 1;
        let nb = BigInt::from(big_n);
        let scanner = Scanner::new(xi, n, big_n)?;
        let mut best: Option<Candidate> = None;
        for x0 in 1..=big_n {
            let x0b = BigInt::from(x0);
            let mut coords = vec![x0b.clone()];
            for i in 1..=n {
                let (m, _) = round_component(xi, &scanner.powers[i], i, &x0b)?;
                coords.push(m.clamp(-nb.clone(), nb.clone()));
            }
            let l = residual(&coords, xi, 64)?;
            let better = match &best {
                None => true,
                Some(b) => cmp_with_enclosures(&coords, &l, &b.coords, &b.l, xi)? == Ordering::Less,
            };
            if better {
                best = Some(Candidate {
                    norm: sup_norm(&coords),
                    coords,
                    l,
                });
            }
        }
        let mut best = best.unwrap();
        if big_n == 1 {
            // x0 = 0 gives residual exactly 1; x0 > 0 is preferred on equality
            let l = &best.l;
            let zero_wins = match l.certified_cmp(&Interval::from_int(1)) {
                Some(o) => o == Ordering::Greater,
                None => xi.compare_abs(&residual_witness(&best.coords, xi)?, &IntPoly::from_i64(&[1]))?
                    == Ordering::Greater,
            };
            if zero_wins {
                let mut coords = vec![BigInt::zero(); n + 1];
                coords[n] = BigInt::one();
                best = Candidate {
                    coords,
                    norm: BigInt::one(),
                    l: Interval::from_int(1),
                };
            }
        }
        let is_record = match records.last() {
            None => true,
            Some(r) => {
                cmp_with_enclosures(&best.coords, &best.l, &r.coords, &r.residual, xi)?
                    == Ordering::Less
            }
        };
        if is_record {
            let coords = lex_minimize(xi, best.coords, &nb)?;
            let norm = sup_norm(&coords);
            debug_assert_eq!(norm, nb);
            let l = residual(&coords, xi, STORE_PREC)?;
            records.push(ApproxVector {
                coords,
                norm,
                residual: l,
            });
        }
        let last = records.last().unwrap();
        if last.residual.hi() < &half {
            return Ok((records, nb));
        }
    }
}

/// Lexicographically smallest vector with the same `x0`, coordinates in
/// `[-N, N]`, and the same residual.
fn lex_minimize(xi: &XiSpec, mut coords: IVec, big_n: &BigInt) -> Result<IVec> {
    if coords[0].is_zero() {
        return Ok(coords);
    }
    let target = residual_witness(&coords, xi)?;
    for i in 1..coords.len() {
        loop {
            let c = &coords[i] - 1u32;
            if &c < &-big_n.clone() {
                break;
            }
            let p = residual_poly(&coords[0], i as u32, &c);
            if xi.compare_abs(&p, &target)? == Ordering::Greater {
                break;
            }
            coords[i] = c;
        }
    }
    Ok(coords)
}

/// Rounding scan over `x0 ∈ [start, end]`; keeps every candidate that may be
/// a record relative to the candidates of strictly smaller norm in the same
/// range and to `threshold`.
fn scan_range(
    scanner: &Scanner<'_>,
    start: u64,
    end: u64,
    min_norm: &BigInt,
    threshold: &Dyadic,
) -> Result<Vec<Candidate>> {
    let mut kept = Vec::new();
    let mut bound = threshold.clone();
    let mut group_norm: Option<BigInt> = None;
    let mut group_bound = threshold.clone();
    for x0 in start..=end {
        let Some((coords, l)) = scanner.rounded(x0)? else {
            continue;
        };
        let norm = sup_norm(&coords);
        if &norm <= min_norm {
            continue;
        }
        if group_norm.as_ref() != Some(&norm) {
            bound = bound.min(group_bound.clone());
            group_bound = bound.clone();
            group_norm = Some(norm.clone());
        }
        if l.lo() < &bound {
            group_bound = group_bound.min(l.hi().clone());
            kept.push(Candidate { coords, norm, l });
        }
    }
    Ok(kept)
}

/// Extends `records` with the rounding scan over `x0 ∈ [start, x0_max]`,
/// keeping records of norm in `(min_norm, horizon]`.
fn rounding_phase(
    xi: &XiSpec,
    n: usize,
    start: u64,
    x0_max: u64,
    min_norm: &BigInt,
    horizon: &BigInt,
    records: &mut Vec<ApproxVector>,
) -> Result<()> {
    if start > x0_max {
        return Ok(());
    }
    let scanner = Scanner::new(xi, n, x0_max)?;
    let threshold = records.last().unwrap().residual.hi().clone();
    let chunks: Vec<(u64, u64)> = {
        let mut v = Vec::new();
        let mut a = start;
        while a <= x0_max {
            let b = (a + CHUNK - 1).min(x0_max);
            v.push((a, b));
            a = b + 1;
        }
        v
    };
    let parts: Vec<Vec<Candidate>> = chunks
        .par_iter()
        .map(|&(a, b)| scan_range(&scanner, a, b, min_norm, &threshold))
        .collect::<Result<_>>()?;
    let cands: Vec<Candidate> = parts.into_iter().flatten().collect();

    let mut i = 0;
    while i < cands.len() {
        let norm = cands[i].norm.clone();
        if &norm > horizon {
            break;
        }
        let mut j = i;
        let mut best = i;
        while j < cands.len() && cands[j].norm == norm {
            if j != best {
                let c = &cands[j];
                let b = &cands[best];
                if cmp_with_enclosures(&c.coords, &c.l, &b.coords, &b.l, xi)? == Ordering::Less {
                    best = j;
                }
            }
            j += 1;
        }
        let c = &cands[best];
        let last = records.last().unwrap();
        if cmp_with_enclosures(&c.coords, &c.l, &last.coords, &last.residual, xi)? == Ordering::Less
        {
            records.push(ApproxVector {
                coords: c.coords.clone(),
                norm: c.norm.clone(),
                residual: residual(&c.coords, xi, STORE_PREC)?,
            });
        }
        i = j;
    }
    Ok(())
}

/// Refines stored enclosures from `from` onward until neighbours are disjoint.
fn separate(xi: &XiSpec, points: &mut [ApproxVector], from: usize) -> Result<()> {
    let mut prec = STORE_PREC;
    loop {
        let overlapping: Vec<usize> = (from.max(1)..points.len())
            .filter(|&k| points[k].residual.hi() >= points[k - 1].residual.lo())
            .collect();
        if overlapping.is_empty() {
            return Ok(());
        }
        if prec as u64 > xi.precision_budget() {
            return Err(Error::TieUnresolved);
        }
        prec *= 2;
        for k in overlapping {
            for idx in [k - 1, k] {
                if idx >= from {
                    points[idx].residual = residual(&points[idx].coords, xi, prec)?;
                }
            }
        }
    }
}

fn horizon_for(scanner: &Scanner<'_>, x0_max: u64, box_extent: &BigInt) -> Result<BigInt> {
    let next = scanner.norm_lower(x0_max + 1)? - 1u32;
    Ok(next.max(box_extent.clone()))
}

/// The minimal-point staircase for `(ξ, …, ξⁿ)` with `x0 ≤ x0_max`.
pub fn compute_minimal_sequence(xi: &XiSpec, n: usize, x0_max: u64) -> Result<MinimalSequence> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if x0_max == 0 {
        return Err(Error::InvalidArgument("x0_max must be at least 1".into()));
    }
    let (mut points, box_extent) = box_phase(xi, n)?;
    let scanner = Scanner::new(xi, n, x0_max + 1)?;
    let horizon = horizon_for(&scanner, x0_max, &box_extent)?;
    rounding_phase(xi, n, 1, x0_max, &box_extent, &horizon, &mut points)?;
    points.retain(|p| p.norm <= horizon);
    separate(xi, &mut points, 0)?;
    finish(xi, n, points, horizon, x0_max, box_extent)
}

fn finish(
    xi: &XiSpec,
    n: usize,
    points: Vec<ApproxVector>,
    scan_horizon: BigInt,
    x0_max: u64,
    box_extent: BigInt,
) -> Result<MinimalSequence> {
    if points.len() < 2 {
        return Err(Error::EmptyScan { x0_max });
    }
    let mut seq = MinimalSequence {
        xi: xi.clone(),
        n,
        points,
        scan_horizon,
        x0_max,
        box_extent,
        index_set_i: Vec::new(),
        index_set_j: Vec::new(),
    };
    if seq.points.len() >= 3 {
        let (i, j) = detect_index_sets(&seq)?;
        seq.index_set_i = i;
        seq.index_set_j = j;
    }
    Ok(seq)
}

/// 1-based index sets: `i ∈ I` iff `x_{i-1}, x_i, x_{i+1}` are independent;
/// `j ∈ J` iff `j ∈ I`, the next element `i` of `I` exists, and the two
/// triples together have rank above 3.
pub fn detect_index_sets(seq: &MinimalSequence) -> Result<(Vec<usize>, Vec<usize>)> {
    let pts = &seq.points;
    if pts.len() < 3 {
        return Err(Error::TooFewRows {
            needed: 3,
            got: pts.len(),
        });
    }
    let triple = |i: usize| -> Vec<IVec> {
        vec![
            pts[i - 2].coords.clone(),
            pts[i - 1].coords.clone(),
            pts[i].coords.clone(),
        ]
    };
    let set_i: Vec<usize> = (2..pts.len()).filter(|&i| rank(&triple(i)) == 3).collect();
    let set_j = set_i
        .windows(2)
        .filter(|w| {
            let mut rows = triple(w[0]);
            rows.extend(triple(w[1]));
            rank(&rows) > 3
        })
        .map(|w| w[0])
        .collect();
    Ok((set_i, set_j))
}

/// One row of exponent ratios.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    /// 1-based index `i`.
    pub index: usize,
    /// `log(1/L_i) / log X_{i+1}`
    pub against_next: f64,
    /// `log(1/L_i) / log X_i`; absent when `X_i = 1`.
    pub against_self: Option<f64>,
}

fn ln_big(x: &BigInt) -> f64 {
    match x.to_f64() {
        Some(v) if v.is_finite() => v.ln(),
        _ => {
            let bits = x.bits();
            let shifted = x >> (bits - 60);
            shifted.to_f64().unwrap().ln() + (bits - 60) as f64 * std::f64::consts::LN_2
        }
    }
}

/// Midpoint of the residual, refined until its width is below `10⁻³` of it.
pub fn residual_midpoint(v: &ApproxVector, xi: &XiSpec) -> Result<f64> {
    let mut enc = v.residual.clone();
    let mut prec = STORE_PREC;
    loop {
        let mid = enc.mid_f64();
        if enc.width().to_f64() <= 1e-3 * mid.abs() || enc.is_point() {
            return Ok(mid);
        }
        if prec as u64 > xi.precision_budget() {
            return Err(Error::PrecisionExhausted { bits: prec as u64 });
        }
        prec *= 2;
        enc = residual(&v.coords, xi, prec)?;
    }
}

/// Per-index ratios for rows with `L_i < 1`.
pub fn ratio_table(seq: &MinimalSequence) -> Result<Vec<RatioRow>> {
    let pts = &seq.points;
    if pts.len() < 2 {
        return Err(Error::TooFewRows {
            needed: 2,
            got: pts.len(),
        });
    }
    let mut rows = Vec::new();
    for i in 0..pts.len() - 1 {
        let l = residual_midpoint(&pts[i], &seq.xi)?;
        if !(l < 1.0) || l <= 0.0 {
            continue;
        }
        let num = -l.ln();
        let x = &pts[i].norm;
        rows.push(RatioRow {
            index: i + 1,
            against_next: num / ln_big(&pts[i + 1].norm),
            against_self: (!x.is_one()).then(|| num / ln_big(x)),
        });
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// cache

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
struct CacheHeader {
    spec: String,
    n: usize,
    scan_horizon: String,
    x0_max: u64,
    box_extent: String,
    version: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
struct CacheRow {
    coords: Vec<String>,
    norm: String,
    residual_lo: Dyadic,
    residual_hi: Dyadic,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
struct CacheFile {
    header: CacheHeader,
    rows: Vec<CacheRow>,
}

fn parse_big(s: &str) -> Result<BigInt> {
    s.parse()
        .map_err(|_| Error::Parse(format!("bad integer {s:?} in cache")))
}

/// File name for the `(ξ, n)` cache inside `dir`.
pub fn cache_path(dir: &Path, xi: &XiSpec, n: usize) -> PathBuf {
    let mut name = String::new();
    for ch in xi.text().chars() {
        if ch.is_ascii_alphanumeric() || ch == '-' || ch == '.' {
            name.push(ch);
        } else {
            name.push_str(&format!("_{:02x}", ch as u32));
        }
    }
    dir.join(format!("{name}__n{n}.json"))
}

fn to_cache(seq: &MinimalSequence) -> CacheFile {
    CacheFile {
        header: CacheHeader {
            spec: seq.xi.text().to_string(),
            n: seq.n,
            scan_horizon: seq.scan_horizon.to_string(),
            x0_max: seq.x0_max,
            box_extent: seq.box_extent.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        },
        rows: seq
            .points
            .iter()
            .map(|p| CacheRow {
                coords: p.coords.iter().map(|c| c.to_string()).collect(),
                norm: p.norm.to_string(),
                residual_lo: p.residual.lo().clone(),
                residual_hi: p.residual.hi().clone(),
            })
            .collect(),
    }
}

fn from_cache(xi: &XiSpec, n: usize, file: &CacheFile) -> Result<(Vec<ApproxVector>, BigInt, BigInt, u64)> {
    let h = &file.header;
    if h.spec != xi.text() || h.n != n {
        return Err(Error::CacheMismatch(format!(
            "cache is for {} with n = {}",
            h.spec, h.n
        )));
    }
    let points = file
        .rows
        .iter()
        .map(|r| {
            let coords = r.coords.iter().map(|c| parse_big(c)).collect::<Result<IVec>>()?;
            if coords.len() != n + 1 {
                return Err(Error::CacheMismatch("row length".into()));
            }
            Ok(ApproxVector {
                norm: parse_big(&r.norm)?,
                coords,
                residual: Interval::new(r.residual_lo.clone(), r.residual_hi.clone()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((
        points,
        parse_big(&h.scan_horizon)?,
        parse_big(&h.box_extent)?,
        h.x0_max,
    ))
}

/// Like [`compute_minimal_sequence`], reusing and updating a cache file in
/// `dir`. Rows already certified in the cache are kept verbatim.
pub fn compute_minimal_sequence_cached(
    xi: &XiSpec,
    n: usize,
    x0_max: u64,
    dir: &Path,
) -> Result<MinimalSequence> {
    let path = cache_path(dir, xi, n);
    let cached = match fs::read_to_string(&path) {
        Ok(text) => {
            let file: CacheFile = serde_json::from_str(&text)?;
            Some(from_cache(xi, n, &file)?)
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => None,
        Err(e) => return Err(e.into()),
    };
    let Some((mut points, old_horizon, box_extent, old_x0_max)) = cached else {
        let seq = compute_minimal_sequence(xi, n, x0_max)?;
        write_cache(dir, &path, &seq)?;
        return Ok(seq);
    };
    let scanner = Scanner::new(xi, n, x0_max.max(old_x0_max) + 1)?;
    let horizon = horizon_for(&scanner, x0_max, &box_extent)?;
    if x0_max <= old_x0_max {
        points.retain(|p| p.norm <= horizon);
        return finish(xi, n, points, horizon, x0_max, box_extent);
    }
    // first x0 whose rounded norm exceeds the old horizon
    let (mut lo, mut hi) = (1u64, old_x0_max + 1);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if scanner.norm_lower(mid)? > old_horizon {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let kept = points.len();
    rounding_phase(xi, n, lo, x0_max, &old_horizon, &horizon, &mut points)?;
    points.retain(|p| p.norm <= horizon);
    separate(xi, &mut points, kept)?;
    if kept > 0 && points.len() > kept {
        let (a, b) = (&points[kept - 1].residual, &points[kept].residual);
        if b.hi() >= a.lo() {
            // cannot refine a stored row; start over
            let seq = compute_minimal_sequence(xi, n, x0_max)?;
            write_cache(dir, &path, &seq)?;
            return Ok(seq);
        }
    }
    let seq = finish(xi, n, points, horizon, x0_max, box_extent)?;
    write_cache(dir, &path, &seq)?;
    Ok(seq)
}

fn write_cache(dir: &Path, path: &Path, seq: &MinimalSequence) -> Result<()> {
    fs::create_dir_all(dir)?;
    let text = serde_json::to_string_pretty(&to_cache(seq))?;
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ivec;
    use crate::real_field::parse_xi;

    fn coords_of(seq: &MinimalSequence) -> Vec<Vec<i64>> {
        seq.points
            .iter()
            .map(|p| p.coords.iter().map(|c| c.to_i64().unwrap()).collect())
            .collect()
    }

    #[test]
    fn residual_examples() {
        let s = parse_xi("named:sqrt2").unwrap();
        let r = residual(&ivec(&[1, 1]), &s, 40).unwrap();
        assert!((r.mid_f64() - 0.41421356237).abs() < 1e-10);
        let xi = parse_xi("named:golden").unwrap();
        assert_eq!(residual(&ivec(&[0, 3]), &xi, 40).unwrap(), Interval::from_int(3));
        let r = residual(&ivec(&[5, 7, 10]), &s, 40).unwrap();
        assert!((r.mid_f64() - 0.0710678118654752).abs() < 1e-10);
        assert!(residual(&ivec(&[0, 0]), &s, 10).is_err());
    }

    #[test]
    fn sqrt2_convergents() {
        let s = parse_xi("named:sqrt2").unwrap();
        let seq = compute_minimal_sequence(&s, 1, 15).unwrap();
        let c = coords_of(&seq);
        assert_eq!(&c[..4], &[vec![1, 1], vec![2, 3], vec![5, 7], vec![12, 17]]);
        let seq2 = compute_minimal_sequence(&s, 2, 15).unwrap();
        for p in &seq2.points[1..] {
            assert_eq!(p.coords[2], &p.coords[0] * 2);
        }
        assert!(coords_of(&seq2).contains(&vec![5, 7, 10]));
    }

    #[test]
    fn golden_fibonacci() {
        let g = parse_xi("named:golden").unwrap();
        let seq = compute_minimal_sequence(&g, 1, 15).unwrap();
        let c = coords_of(&seq);
        assert_eq!(
            &c[..6],
            &[vec![1, 1], vec![1, 2], vec![2, 3], vec![3, 5], vec![5, 8], vec![8, 13]]
        );
    }

    #[test]
    fn staircase_shape() {
        let c = parse_xi("named:cbrt2").unwrap();
        let seq = compute_minimal_sequence(&c, 2, 3000).unwrap();
        assert!(seq.points[0].norm.is_one());
        for w in seq.points.windows(2) {
            assert!(w[0].norm < w[1].norm);
            assert!(w[1].residual.hi() < w[0].residual.lo());
        }
        assert!(seq.points.iter().all(|p| p.norm <= seq.scan_horizon));
    }

    #[test]
    fn segments() {
        let v = ivec(&[5, 7, 10, 14]);
        assert_eq!(segment(&v, 0, 2).unwrap(), ivec(&[5, 7, 10]));
        assert_eq!(segment(&v, 1, 2).unwrap(), ivec(&[7, 10, 14]));
        assert_eq!(segment(&v, 0, 3).unwrap(), v);
        assert!(segment(&v, 2, 2).is_err());
    }

    #[test]
    fn ratios() {
        let s = parse_xi("named:sqrt2").unwrap();
        let seq = compute_minimal_sequence(&s, 1, 30).unwrap();
        let t = ratio_table(&seq).unwrap();
        let row = t.iter().find(|r| r.index == 2).unwrap();
        assert!((row.against_next - 0.9064).abs() < 1e-3);
        let row = t.iter().find(|r| r.index == 3).unwrap();
        assert!((row.against_next - 0.9333).abs() < 1e-3);
    }

    #[test]
    fn index_sets_on_basis_vectors() {
        let s = parse_xi("named:sqrt2").unwrap();
        let mk = |v: &[i64]| ApproxVector {
            coords: ivec(v),
            norm: BigInt::one(),
            residual: Interval::from_int(1),
        };
        let seq = MinimalSequence {
            xi: s,
            n: 3,
            points: vec![
                mk(&[1, 0, 0, 0]),
                mk(&[0, 1, 0, 0]),
                mk(&[0, 0, 1, 0]),
                mk(&[2, 0, 0, 0]),
            ],
            scan_horizon: BigInt::one(),
            x0_max: 1,
            box_extent: BigInt::one(),
            index_set_i: vec![],
            index_set_j: vec![],
        };
        let (i, j) = detect_index_sets(&seq).unwrap();
        assert_eq!(i, vec![2, 3]);
        assert!(j.is_empty());
    }

    #[test]
    fn cache_resume_extends() {
        let dir = tempfile::tempdir().unwrap();
        let s = parse_xi("named:cbrt2").unwrap();
        let small = compute_minimal_sequence_cached(&s, 2, 200, dir.path()).unwrap();
        let big = compute_minimal_sequence_cached(&s, 2, 2000, dir.path()).unwrap();
        let fresh = compute_minimal_sequence(&s, 2, 2000).unwrap();
        assert_eq!(big.points, fresh.points);
        assert_eq!(big.scan_horizon, fresh.scan_horizon);
        assert_eq!(&big.points[..small.points.len()], &small.points[..]);
        let again = compute_minimal_sequence_cached(&s, 2, 2000, dir.path()).unwrap();
        assert_eq!(again.points, big.points);
    }
}
