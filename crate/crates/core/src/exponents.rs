//! Finite-data estimates of approximation exponents.
//!
//! `λ̂` and `λ` are read off a minimal-point staircase (minimum and maximum of
//! log ratios over a trailing window). `ω_k` comes from an exhaustive search
//! over integer polynomials of bounded height.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::Interval;
use crate::error::{Error, Result};
use crate::minimal_points::{ratio_table, MinimalSequence};
use crate::poly::IntPoly;
use crate::real_field::XiSpec;

pub const DEFAULT_WINDOW_FRACTION: f64 = 0.5;
const MIN_ROWS: usize = 4;
/// Largest coefficient box searched for a single height.
pub const OMEGA_BOX_BUDGET: u128 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentKind {
    Lambda,
    LambdaHat,
    Omega,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    /// 1-based inclusive index range of staircase rows.
    Indices { first: usize, last: usize },
    Heights(Vec<u64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentEstimate {
    pub kind: ExponentKind,
    pub order: usize,
    /// `+∞` when `exact_annihilation` is set.
    pub value: f64,
    pub window: Window,
    pub samples: Vec<f64>,
    pub exact_annihilation: bool,
}

/// A value of `ω_k` taken as a hypothesis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assumptions {
    pub k: u32,
    pub omega_k: BigRational,
}

impl Assumptions {
    pub fn new(k: u32, omega_k: BigRational) -> Self {
        Assumptions { k, omega_k }
    }

    pub fn delta(&self) -> Result<BigRational> {
        delta_k(self.k, &self.omega_k)
    }
}

/// `k / (ω_k + 1 − k)`.
pub fn delta_k(k: u32, omega_k: &BigRational) -> Result<BigRational> {
    let k = BigRational::from_integer(k.into());
    let den = omega_k + BigRational::from_integer(1.into()) - &k;
    if !den.is_positive() {
        return Err(Error::InvalidArgument(
            "omega_k + 1 - k must be positive".into(),
        ));
    }
    Ok(k / den)
}

fn trailing_window(count: usize, window_fraction: f64) -> Result<usize> {
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return Err(Error::InvalidArgument(
            "window fraction must lie in (0, 1]".into(),
        ));
    }
    if count < MIN_ROWS {
        return Err(Error::TooFewRows {
            needed: MIN_ROWS,
            got: count,
        });
    }
    Ok(((window_fraction * count as f64).ceil() as usize).clamp(1, count))
}

/// Minimum of `log(1/L_i) / log X_{i+1}` over the trailing window.
pub fn estimate_lambda_hat(seq: &MinimalSequence, window_fraction: f64) -> Result<ExponentEstimate> {
    let rows = ratio_table(seq)?;
    let w = trailing_window(rows.len(), window_fraction)?;
    let tail = &rows[rows.len() - w..];
    let samples: Vec<f64> = tail.iter().map(|r| r.against_next).collect();
    Ok(ExponentEstimate {
        kind: ExponentKind::LambdaHat,
        order: seq.n,
        value: samples.iter().cloned().fold(f64::INFINITY, f64::min),
        window: Window::Indices {
            first: tail[0].index,
            last: tail[w - 1].index,
        },
        samples,
        exact_annihilation: false,
    })
}

/// Maximum of `log(1/L_i) / log X_i` over the trailing window.
pub fn estimate_lambda(seq: &MinimalSequence, window_fraction: f64) -> Result<ExponentEstimate> {
    let rows = ratio_table(seq)?;
    let w = trailing_window(rows.len(), window_fraction)?;
    let tail = &rows[rows.len() - w..];
    let samples: Vec<f64> = tail.iter().filter_map(|r| r.against_self).collect();
    if samples.is_empty() {
        return Err(Error::TooFewRows { needed: 1, got: 0 });
    }
    Ok(ExponentEstimate {
        kind: ExponentKind::Lambda,
        order: seq.n,
        value: samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        window: Window::Indices {
            first: tail[0].index,
            last: tail[w - 1].index,
        },
        samples,
        exact_annihilation: false,
    })
}

/// Outcome of the search at one height.
#[derive(Clone, Debug, PartialEq)]
pub struct OmegaSearch {
    pub height: u64,
    /// Coefficients of a minimizing polynomial, constant term first.
    pub best: Vec<i64>,
    /// Encloses `|P(ξ)|` for the minimizer.
    pub value: Interval,
    /// `−log|P(ξ)| / log Q`; `+∞` on exact annihilation.
    pub ratio: f64,
    pub exact_annihilation: bool,
}

/// Exhaustive minimum of `|P(ξ)|` over nonzero `P` with `deg P ≤ k` and
/// height at most `q`. The constant term is set by rounding, the other
/// coefficients run over the whole box up to sign.
pub fn omega_search(xi: &XiSpec, k: usize, q: u64) -> Result<OmegaSearch> {
    if q < 2 {
        return Err(Error::InvalidArgument("height must be at least 2".into()));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let side = 2 * q as u128 + 1;
    if side.checked_pow(k as u32).map_or(true, |b| b > OMEGA_BOX_BUDGET) {
        return Err(Error::EnumerationBudget(format!(
            "(2Q+1)^k coefficient box for Q = {q}, k = {k}"
        )));
    }
    let powers: Vec<f64> = xi
        .power_table(k, 60)?
        .iter()
        .map(|p| p.mid_f64())
        .collect();
    let qf = q as f64;
    // rigorous bound on floating error of s + a0
    let mag: f64 = powers.iter().sum::<f64>() * qf + qf;
    let slack = mag * (k as f64 + 2.0) * 4.0 * f64::EPSILON;

    let qi = q as i64;
    let lead_range: Vec<i64> = (0..=qi).collect();
    let parts: Vec<(f64, Vec<Vec<i64>>)> = lead_range
        .par_iter()
        .map(|&lead| {
            let mut local_min = f64::INFINITY;
            let mut kept: Vec<(f64, Vec<i64>)> = Vec::new();
            let mut rest = vec![-qi; k - 1];
            loop {
                // coefficients a_1..a_{k-1} in `rest`, a_k = lead
                let canonical = lead > 0 || {
                    match rest.iter().rev().find(|&&c| c != 0) {
                        Some(&c) => c > 0,
                        None => false,
                    }
                };
                if canonical {
                    let mut s = lead as f64 * powers[k];
                    for (j, &c) in rest.iter().enumerate() {
                        s += c as f64 * powers[j + 1];
                    }
                    let a0 = (-s).round().clamp(-qf, qf);
                    let v = (s + a0).abs();
                    if v <= local_min + 2.0 * slack {
                        if v < local_min {
                            local_min = v;
                            kept.retain(|(w, _)| *w <= local_min + 2.0 * slack);
                        }
                        let mut coeffs = vec![a0 as i64];
                        coeffs.extend_from_slice(&rest);
                        coeffs.push(lead);
                        kept.push((v, coeffs));
                    }
                }
                // odometer over rest
                let mut pos = 0;
                while pos < rest.len() && rest[pos] == qi {
                    rest[pos] = -qi;
                    pos += 1;
                }
                if pos == rest.len() {
                    break;
                }
                rest[pos] += 1;
            }
            (local_min, kept.into_iter().map(|(_, c)| c).collect())
        })
        .collect();
    let mut cands: Vec<Vec<i64>> = Vec::new();
    let fmin = parts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    for (_, list) in parts {
        for c in list {
            let mut s = 0.0;
            for (j, &a) in c.iter().enumerate() {
                s += a as f64 * powers[j];
            }
            if s.abs() <= fmin + 2.0 * slack {
                cands.push(c);
            }
        }
    }
    cands.sort();
    cands.dedup();
    // the all-zero non-constant part gives P = 1
    if cands.is_empty() {
        cands.push(vec![1]);
    }
    let mut best: Option<(Vec<i64>, IntPoly)> = None;
    for c in cands {
        let p = IntPoly::new(c.iter().map(|&a| BigInt::from(a)).collect());
        if p.is_zero() {
            continue;
        }
        let replace = match &best {
            None => true,
            Some((bc, bp)) => match xi.compare_abs(&p, bp)? {
                Ordering::Less => true,
                Ordering::Equal => c < *bc,
                Ordering::Greater => false,
            },
        };
        if replace {
            best = Some((c, p));
        }
    }
    let (coeffs, p) = best.expect("at least one candidate");
    if xi.sign_of(&p)? == 0 {
        return Ok(OmegaSearch {
            height: q,
            best: coeffs,
            value: Interval::from_int(0),
            ratio: f64::INFINITY,
            exact_annihilation: true,
        });
    }
    let mut prec = 64u32;
    let value = loop {
        let v = xi.eval_poly(&p, prec)?.abs();
        if v.width().to_f64() <= 1e-3 * v.mid_f64() {
            break v;
        }
        prec *= 2;
        if prec as u64 > xi.precision_budget() {
            return Err(Error::PrecisionExhausted { bits: prec as u64 });
        }
    };
    let ratio = -value.mid_f64().ln() / qf.ln();
    Ok(OmegaSearch {
        height: q,
        best: coeffs,
        value,
        ratio,
        exact_annihilation: false,
    })
}

/// Running supremum of `−log min|P(ξ)| / log Q` over the given heights.
pub fn estimate_omega(xi: &XiSpec, k: usize, heights: &[u64]) -> Result<ExponentEstimate> {
    let mut hs = heights.to_vec();
    hs.sort_unstable();
    hs.dedup();
    if hs.is_empty() {
        return Err(Error::InvalidArgument("no heights given".into()));
    }
    if hs[0] < 2 {
        return Err(Error::InvalidArgument("every height must be at least 2".into()));
    }
    let mut samples = Vec::with_capacity(hs.len());
    let mut running = f64::NEG_INFINITY;
    let mut annihilated = false;
    for &q in &hs {
        let r = omega_search(xi, k, q)?;
        if r.exact_annihilation {
            annihilated = true;
            samples.push(f64::INFINITY);
            break;
        }
        running = running.max(r.ratio);
        samples.push(r.ratio);
    }
    Ok(ExponentEstimate {
        kind: ExponentKind::Omega,
        order: k,
        value: if annihilated { f64::INFINITY } else { running },
        window: Window::Heights(hs),
        samples,
        exact_annihilation: annihilated,
    })
}

/// Running suprema of a sample list (the estimate after each height).
pub fn running_supremum(samples: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(samples.len());
    let mut m = f64::NEG_INFINITY;
    for &s in samples {
        m = m.max(s);
        out.push(m);
    }
    out
}

/// Powers of two `2, 4, …` whose coefficient box fits the search budget,
/// capped at `max_height`.
pub fn default_heights(k: usize, max_height: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2u64;
    while q <= max_height {
        let side = 2 * q as u128 + 1;
        if side.checked_pow(k as u32).map_or(true, |b| b > OMEGA_BOX_BUDGET) {
            break;
        }
        out.push(q);
        q *= 2;
    }
    out
}

/// `1 + |ξ| + … + |ξ|^k` as an upper enclosure; Dirichlet's box argument gives
/// `min |P(ξ)| ≤ c·Q^{−k}` with this constant.
pub fn dirichlet_constant(xi: &XiSpec, k: usize) -> Result<f64> {
    let mut c = 0.0;
    for p in xi.power_table(k, 40)? {
        c += p.hi().to_f64();
    }
    // relative slack for the floating sum
    Ok(c * (1.0 + 8.0 * f64::EPSILON))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minimal_points::compute_minimal_sequence;
    use crate::real_field::parse_xi;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// Literal box search in floating point, no shortcuts.
    fn box_oracle(xi: f64, k: usize, q: i64) -> (f64, Vec<i64>) {
        let mut best = (f64::INFINITY, vec![]);
        let side = (2 * q + 1) as usize;
        let total = side.pow(k as u32 + 1);
        for code in 0..total {
            let mut c = Vec::with_capacity(k + 1);
            let mut t = code;
            for _ in 0..=k {
                c.push((t % side) as i64 - q);
                t /= side;
            }
            if c.iter().all(|&a| a == 0) {
                continue;
            }
            let v: f64 = c
                .iter()
                .enumerate()
                .map(|(j, &a)| a as f64 * xi.powi(j as i32))
                .sum::<f64>()
                .abs();
            if v < best.0 - 1e-12 {
                best = (v, c);
            }
        }
        best
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_k(1, &rat(1, 1)).unwrap(), rat(1, 1));
        assert_eq!(delta_k(2, &rat(7, 3)).unwrap(), rat(3, 2));
        assert_eq!(delta_k(1, &rat(2, 1)).unwrap(), rat(1, 2));
        assert!(delta_k(3, &rat(2, 1)).is_err());
    }

    #[test]
    fn omega_examples() {
        let s = parse_xi("named:sqrt2").unwrap();
        let r = omega_search(&s, 1, 10).unwrap();
        assert_eq!(r.best, vec![-7, 5]);
        assert!((r.value.mid_f64() - 0.0710678).abs() < 1e-6);
        assert!((r.ratio - 1.148).abs() < 1e-3);
        let r = omega_search(&s, 2, 3).unwrap();
        assert!(r.exact_annihilation);
        let g = parse_xi("named:golden").unwrap();
        let r = omega_search(&g, 1, 13).unwrap();
        assert_eq!(r.best, vec![-13, 8]);
        assert!((r.ratio - 1.125).abs() < 1e-3);
    }

    #[test]
    fn omega_matches_box_oracle() {
        for (spec, val) in [
            ("named:sqrt2", std::f64::consts::SQRT_2),
            ("named:cbrt2", 2f64.powf(1.0 / 3.0)),
            ("named:e", std::f64::consts::E),
        ] {
            let xi = parse_xi(spec).unwrap();
            for k in 1..=2 {
                for q in [2u64, 3, 5, 8] {
                    let r = omega_search(&xi, k, q).unwrap();
                    let (v, _) = box_oracle(val, k, q as i64);
                    assert!(
                        (r.value.mid_f64() - v).abs() < 1e-9,
                        "{spec} k={k} q={q}: {} vs {v}",
                        r.value.mid_f64()
                    );
                }
            }
        }
    }

    #[test]
    fn omega_running_sup_and_dirichlet() {
        let xi = parse_xi("named:cbrt2").unwrap();
        let est = estimate_omega(&xi, 1, &[2, 4, 8, 16, 32]).unwrap();
        let run = running_supremum(&est.samples);
        assert!(run.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(est.value, *run.last().unwrap());
        let c = dirichlet_constant(&xi, 2).unwrap();
        for q in [2u64, 4, 8, 16] {
            let r = omega_search(&xi, 2, q).unwrap();
            assert!(r.value.hi().to_f64() <= c * (q as f64).powi(-2));
        }
        assert!(estimate_omega(&xi, 1, &[1]).is_err());
    }

    #[test]
    fn lambda_estimates_sqrt2() {
        let s = parse_xi("named:sqrt2").unwrap();
        let seq = compute_minimal_sequence(&s, 1, 5000).unwrap();
        let lh = estimate_lambda_hat(&seq, 0.5).unwrap();
        let l = estimate_lambda(&seq, 0.5).unwrap();
        assert!(l.value >= lh.value);
        assert!(lh.value > 0.85 && lh.value <= 1.0, "{}", lh.value);
        let all = estimate_lambda_hat(&seq, 1.0).unwrap();
        assert_eq!(all.samples.len(), ratio_table(&seq).unwrap().len());
        assert!(estimate_lambda_hat(&seq, 0.0).is_err());
    }

    #[test]
    fn default_height_list() {
        assert_eq!(default_heights(1, 1024).last(), Some(&1024));
        assert!(default_heights(3, 1 << 20).len() < 10);
    }
}
