//! Scenario runner: per-index checks over the tail of a staircase.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{
    orth_lattice_shortest, per_index, wedge_rows, rank_of_segments, successive_minima,
    tail_indices, CheckReport, Verdict, DEFAULT_RATIO_CEILING,
};
use crate::dyadic::Interval;
use crate::error::{Error, Result};
use crate::exponents::{estimate_lambda, DEFAULT_WINDOW_FRACTION};
use crate::lattice::{IntegerLattice, ENUMERATION_BUDGET};
use crate::linalg::{determinant, dot, sup_norm};
use crate::minimal_points::{segment, MinimalSequence};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Wedge,
    Threshold,
    Rank,
    Minkowski,
    Minima,
    Growth,
    Nonvanishing,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::Wedge,
        Scenario::Threshold,
        Scenario::Rank,
        Scenario::Minkowski,
        Scenario::Minima,
        Scenario::Growth,
        Scenario::Nonvanishing,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Scenario::Wedge => "wedge",
            Scenario::Threshold => "threshold",
            Scenario::Rank => "rank",
            Scenario::Minkowski => "minkowski",
            Scenario::Minima => "minima",
            Scenario::Growth => "growth",
            Scenario::Nonvanishing => "nonvanishing",
        }
    }

    /// Whether the scenario reads a staircase.
    pub fn needs_sequence(self) -> bool {
        self != Scenario::Minima
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|x| x.tag() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown scenario '{s}'")))
    }
}

#[derive(Clone, Debug)]
pub struct ScenarioParams {
    pub m: usize,
    pub k: usize,
    pub y: BigRational,
    pub window: f64,
    pub ratio_ceiling: f64,
    /// Growth exponent to test against; estimated from the staircase if unset.
    pub lambda: Option<f64>,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioParams {
            m: 1,
            k: 1,
            y: BigRational::from_integer(10.into()),
            window: DEFAULT_WINDOW_FRACTION,
            ratio_ceiling: DEFAULT_RATIO_CEILING,
            lambda: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScenarioOutcome {
    pub summary: CheckReport,
    pub rows: Vec<CheckReport>,
}

fn ln_big(v: &BigInt) -> f64 {
    v.to_f64().unwrap_or(f64::INFINITY).ln()
}

fn ln_res(seq: &MinimalSequence, i: usize) -> Result<f64> {
    Ok(seq.point(i)?.residual.mid_f64().ln())
}

/// `verdict` for `ln K ≤ ln ceiling` with a small float margin.
fn ceiling_verdict(ln_k: f64, ceiling: f64) -> Verdict {
    let c = ceiling.ln();
    if ln_k <= c - 1e-9 {
        Verdict::Pass
    } else if ln_k > c + 1e-9 {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    }
}

fn lambda_for(seq: &MinimalSequence, p: &ScenarioParams) -> Result<f64> {
    match p.lambda {
        Some(l) => Ok(l),
        None => Ok(estimate_lambda(seq, p.window)?.value),
    }
}

pub fn run_scenario(seq: &MinimalSequence, scenario: Scenario, params: &ScenarioParams) -> Result<ScenarioOutcome> {
    let rows = match scenario {
        Scenario::Wedge => wedge_rows(seq, params.m, params.window)?,
        Scenario::Rank => rank_rows(seq, params)?,
        Scenario::Minkowski => minkowski_rows(seq, params)?,
        Scenario::Minima => {
            let r = successive_minima(&seq.xi, params.k, &params.y)?;
            vec![r.report]
        }
        Scenario::Threshold => return threshold(seq, params),
        Scenario::Growth => growth_rows(seq, params)?,
        Scenario::Nonvanishing => nonvanishing_rows(seq, params)?,
    };
    let summary = CheckReport::summarize(scenario.tag(), &rows);
    Ok(ScenarioOutcome { summary, rows })
}

fn rank_rows(seq: &MinimalSequence, p: &ScenarioParams) -> Result<Vec<CheckReport>> {
    let with_prev = 2 * p.m + 2 <= seq.n;
    let idx = tail_indices(seq.len(), p.window, if with_prev { 2 } else { 1 }, 0);
    per_index(&idx, |i| rank_of_segments(seq, i, p.m, with_prev))
}

fn minkowski_rows(seq: &MinimalSequence, p: &ScenarioParams) -> Result<Vec<CheckReport>> {
    if 2 * p.m + 1 > seq.n {
        return Err(Error::InvalidArgument(format!("need n >= 2m+1, got n = {}, m = {}", seq.n, p.m)));
    }
    let idx = tail_indices(seq.len(), p.window, 1, 0);
    per_index(&idx, |i| match orth_lattice_shortest(seq, i, p.m, p.ratio_ceiling) {
        Ok(o) => Ok(o.report),
        Err(Error::InvalidArgument(msg)) => Ok(CheckReport::new("minkowski", vec![i], Verdict::Inconclusive, msg)),
        Err(e) => Err(e),
    })
}

struct ThresholdRow {
    i: usize,
    norm: BigInt,
    /// `‖a‖·X_{i+1}L_i/X_i`, the least `c` with `‖a‖ ≤ c·X_i/(X_{i+1}L_i)`.
    c_next: Interval,
    /// `‖a‖·L_{i−1}`, the least `c` with `‖a‖ ≤ c/L_{i−1}`.
    c_prev: Interval,
    orth_next: bool,
    orth_prev: bool,
    orth_self: bool,
}

/// Shortest vector `a` of `⟨x_i⟩^⊥`; reports, for each threshold, the largest
/// constant below which `a` was orthogonal to the neighbour on every index.
fn threshold(seq: &MinimalSequence, p: &ScenarioParams) -> Result<ScenarioOutcome> {
    let idx = tail_indices(seq.len(), p.window, 2, 1);
    let data: Vec<ThresholdRow> = {
        use rayon::prelude::*;
        idx.par_iter()
            .map(|&i| {
                let x = &seq.point(i)?.coords;
                let lat = IntegerLattice::orthogonal_to(std::slice::from_ref(x), seq.n + 1)?;
                let a = lat.shortest_vector(ENUMERATION_BUDGET)?;
                let norm = sup_norm(&a);
                let na = Interval::from_bigint(norm.clone());
                let (prev, cur, next) = (seq.point(i - 1)?, seq.point(i)?, seq.point(i + 1)?);
                let inv_x = Interval::from_rational(&BigRational::new(1.into(), cur.norm.clone()), -120);
                let c_next = &(&(&na * &Interval::from_bigint(next.norm.clone())) * &cur.residual) * &inv_x;
                let c_prev = &na * &prev.residual;
                Ok(ThresholdRow {
                    i,
                    norm,
                    c_next,
                    c_prev,
                    orth_next: dot(&a, &next.coords).is_zero(),
                    orth_prev: dot(&a, &prev.coords).is_zero(),
                    orth_self: dot(&a, x).is_zero() && !a.iter().all(Zero::is_zero),
                })
            })
            .collect::<Result<_>>()?
    };
    // largest c such that every index meeting the hypothesis satisfies the
    // conclusion: the least c-value among failures
    let sup_c = |f: &dyn Fn(&ThresholdRow) -> (bool, &Interval)| {
        data.iter()
            .filter(|r| !f(r).0)
            .map(|r| f(r).1.mid_f64())
            .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.min(v))))
    };
    let c1 = sup_c(&|r| (r.orth_next, &r.c_next));
    let c2 = sup_c(&|r| (r.orth_prev, &r.c_prev));
    let rows: Vec<CheckReport> = data
        .iter()
        .map(|r| {
            let verdict = if r.orth_self { Verdict::Pass } else { Verdict::Fail };
            let mut rep = CheckReport::new(
                "threshold",
                vec![r.i - 1, r.i, r.i + 1],
                verdict,
                format!(
                    "|a| = {}, a.x_(i+1) {}, a.x_(i-1) {}",
                    r.norm,
                    if r.orth_next { "= 0" } else { "!= 0" },
                    if r.orth_prev { "= 0" } else { "!= 0" }
                ),
            );
            rep.ratios = vec![r.c_next.mid_f64(), r.c_prev.mid_f64()];
            rep
        })
        .collect();
    let mut summary = CheckReport::summarize("threshold", &rows);
    let show = |c: Option<f64>| c.map_or("unbounded on this window".to_string(), |v| format!("{v:.6}"));
    summary.empirical_constant = c1;
    summary.details = format!(
        "{}; largest c for the next-point threshold: {}; for the previous-point threshold: {}",
        summary.details,
        show(c1),
        show(c2)
    );
    Ok(ScenarioOutcome { summary, rows })
}

/// Realized `log X_i / log X_{i+1}` against `(m+1)λ`, with implied constant
/// `X_{i+1}^{(m+1)λ} / X_i`.
fn growth_rows(seq: &MinimalSequence, p: &ScenarioParams) -> Result<Vec<CheckReport>> {
    let lambda = lambda_for(seq, p)?;
    let target = (p.m as f64 + 1.0) * lambda;
    let idx = tail_indices(seq.len(), p.window, 2, 1);
    per_index(&idx, |i| {
        let lx = ln_big(&seq.point(i)?.norm);
        let lnext = ln_big(&seq.point(i + 1)?.norm);
        let ln_k = target * lnext - lx;
        let mut r = CheckReport::new(
            "growth",
            vec![i, i + 1],
            ceiling_verdict(ln_k, p.ratio_ceiling),
            format!("exponent {:.4} vs (m+1)lambda = {target:.4}", lx / lnext),
        );
        r.ratios = vec![lx / lnext];
        r.empirical_constant = Some(ln_k.exp());
        Ok(r)
    })
}

/// Both 3×3 wedges `x_{i−1}^{(s,2)} ∧ x_i^{(0,2)} ∧ x_i^{(1,2)}`, `s ∈ {0, 1}`.
fn nonvanishing_rows(seq: &MinimalSequence, p: &ScenarioParams) -> Result<Vec<CheckReport>> {
    if seq.n != 3 {
        return Err(Error::InvalidArgument("this scenario needs n = 3".into()));
    }
    let lambda = lambda_for(seq, p)?;
    let idx = tail_indices(seq.len(), p.window, 2, 0);
    per_index(&idx, |i| {
        let prev = &seq.point(i - 1)?.coords;
        let cur = &seq.point(i)?.coords;
        let c0 = segment(cur, 0, 2)?;
        let c1 = segment(cur, 1, 2)?;
        let w0 = determinant(&[segment(prev, 0, 2)?, c0.clone(), c1.clone()]);
        let w1 = determinant(&[segment(prev, 1, 2)?, c0, c1]);
        let nonzero = !w0.is_zero() || !w1.is_zero();
        let lx = ln_big(&seq.point(i)?.norm);
        let ll = ln_res(seq, i)?;
        // X_i ≫ L_i^{1/(λ−1)}
        let ln_k = ll / (lambda - 1.0) - lx;
        let mut verdict = if nonzero { Verdict::Pass } else { Verdict::Fail };
        if nonzero {
            verdict = verdict.combine(ceiling_verdict(ln_k, p.ratio_ceiling));
        }
        let mut r = CheckReport::new(
            "nonvanishing",
            vec![i - 1, i],
            verdict,
            format!("wedges {w0}, {w1}"),
        );
        r.ratios = vec![lx / -ll];
        r.empirical_constant = Some(ln_k.exp());
        Ok(r)
    })
}
