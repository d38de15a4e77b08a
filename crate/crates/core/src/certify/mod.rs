//! Data-level checks of structural inequalities on computed staircases.
//!
//! Verdicts never rest on floating point: inequalities are decided on
//! disjoint enclosures or exactly. Ratios are reported as `f64` for reading.

mod minima;
mod scenarios;

pub use minima::{successive_minima, MinimaResult};
pub use scenarios::{run_scenario, Scenario, ScenarioOutcome, ScenarioParams};

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::{Dyadic, Interval};
use crate::error::{Error, Result};
use crate::lattice::{IntegerLattice, ENUMERATION_BUDGET};
use crate::linalg::{dot, maximal_minors, rank, sup_norm, IVec};
use crate::minimal_points::{segment, MinimalSequence};

/// Ceiling on realized implied constants before a check fails.
pub const DEFAULT_RATIO_CEILING: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    /// Fail dominates inconclusive, which dominates pass.
    pub fn combine(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub scenario: String,
    pub indices: Vec<usize>,
    pub ratios: Vec<f64>,
    /// Largest realized ratio over the rows, or the scenario's own summary.
    pub empirical_constant: Option<f64>,
    pub verdict: Verdict,
    pub details: String,
}

impl CheckReport {
    pub fn new(scenario: &str, indices: Vec<usize>, verdict: Verdict, details: impl Into<String>) -> Self {
        CheckReport {
            scenario: scenario.to_string(),
            indices,
            ratios: Vec::new(),
            empirical_constant: None,
            verdict,
            details: details.into(),
        }
    }

    fn with_ratios(mut self, ratios: Vec<f64>) -> Self {
        self.empirical_constant = ratios.iter().cloned().fold(None, |m, r| {
            Some(m.map_or(r, |m: f64| m.max(r)))
        });
        self.ratios = ratios;
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Concatenates rows into one summary with the maximal ratio.
    pub fn summarize(scenario: &str, rows: &[CheckReport]) -> CheckReport {
        let verdict = rows.iter().fold(Verdict::Pass, |v, r| v.combine(r.verdict));
        let indices = rows.iter().flat_map(|r| r.indices.iter().copied()).collect();
        let ratios: Vec<f64> = rows.iter().flat_map(|r| r.ratios.iter().copied()).collect();
        let failing: Vec<String> = rows
            .iter()
            .filter(|r| r.verdict != Verdict::Pass)
            .map(|r| format!("{:?}: {}", r.indices, r.details))
            .collect();
        let details = if failing.is_empty() {
            format!("{} rows pass", rows.len())
        } else {
            format!("{} of {} rows not passing; {}", failing.len(), rows.len(), failing.join("; "))
        };
        let mut r = CheckReport::new(scenario, indices, verdict, details).with_ratios(ratios);
        if rows.is_empty() {
            r.verdict = Verdict::Inconclusive;
            r.details = "no rows in window".into();
        }
        r
    }
}

fn f64_of(v: &BigInt) -> f64 {
    v.to_f64().unwrap_or(f64::INFINITY)
}

/// Sup-norm of the Grassmann coordinates of the rows.
pub fn wedge_norm(vectors: &[IVec]) -> Result<BigInt> {
    let d = vectors.len();
    let len = vectors.first().map(|v| v.len()).unwrap_or(0);
    if d == 0 || d > len {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= d <= vector length, got d = {d}, length {len}"
        )));
    }
    if vectors.iter().any(|v| v.len() != len) {
        return Err(Error::InvalidArgument("vectors differ in length".into()));
    }
    Ok(maximal_minors(vectors)
        .iter()
        .map(|m| m.abs())
        .max()
        .unwrap_or_else(BigInt::zero))
}

/// Upper endpoint of `max_{0 ≤ l ≤ m} ξ^l`.
fn power_ceiling(seq: &MinimalSequence, m: usize) -> Result<Dyadic> {
    let mut best = Dyadic::one();
    for l in 1..=m {
        let p = seq.xi.eval_power(l as u32, 64)?;
        best = best.max(p.hi().clone());
    }
    Ok(best)
}

fn factorial(d: usize) -> BigInt {
    (1..=d).fold(BigInt::one(), |a, k| a * k)
}

/// `‖⋀ x_{l_i}^{(k_i, m)}‖ ≤ d!·(1+Ξ)^{d−1}·X_{l_d}·∏_{i<d} L_{l_i}`.
///
/// After subtracting `ξ^{c−c₁}` times the first chosen column from column
/// `c`, row `i` has entries at most `(1+Ξ)L_{l_i}` off that column and at
/// most `X_{l_d}` on it; expanding along it gives the constant.
pub fn check_wedge_bound(seq: &MinimalSequence, selection: &[(usize, usize)], m: usize) -> Result<CheckReport> {
    let d = selection.len();
    if d == 0 || d > m + 1 {
        return Err(Error::InvalidArgument(format!("need 1 <= d <= m+1, got d = {d}")));
    }
    if m > seq.n {
        return Err(Error::InvalidArgument("m exceeds n".into()));
    }
    let mut prev = 1;
    for &(l, k) in selection {
        if l < prev {
            return Err(Error::InvalidArgument("indices must be nondecreasing and positive".into()));
        }
        if k > seq.n - m {
            return Err(Error::InvalidArgument(format!("offset {k} exceeds n - m")));
        }
        prev = l;
    }
    let mut vectors = Vec::with_capacity(d);
    for &(l, k) in selection {
        vectors.push(segment(&seq.point(l)?.coords, k, m)?);
    }
    let w = wedge_norm(&vectors)?;
    let xi_max = Interval::point(power_ceiling(seq, m)?);
    let one = Interval::from_int(1);
    let mut bound = Interval::from_bigint(factorial(d));
    let mut scale = Interval::from_bigint(seq.point(selection[d - 1].0)?.norm.clone());
    for &(l, _) in &selection[..d - 1] {
        bound = &bound * &(&one + &xi_max);
        scale = &scale * &seq.point(l)?.residual;
    }
    let rhs = &bound * &scale;
    let wd = Dyadic::from_bigint(w.clone());
    let verdict = if &wd <= rhs.lo() {
        Verdict::Pass
    } else if &wd > rhs.hi() {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    };
    let ratio = f64_of(&w) / scale.mid_f64();
    let indices = selection.iter().map(|s| s.0).collect();
    Ok(CheckReport::new(
        "wedge",
        indices,
        verdict,
        format!("wedge {w}, bound {:.6e}, selection {selection:?}", rhs.mid_f64()),
    )
    .with_ratios(vec![ratio]))
}

fn segments_of(coords: &[BigInt], m: usize, len: usize) -> Result<Vec<IVec>> {
    (0..=m).map(|j| segment(coords, j, len)).collect()
}

/// Rank of `x_i^{(0,n−m)}, …, x_i^{(m,n−m)}`, optionally together with the
/// same segments of `x_{i−1}`.
pub fn rank_of_segments(
    seq: &MinimalSequence,
    i: usize,
    m: usize,
    include_previous: bool,
) -> Result<CheckReport> {
    let n = seq.n;
    if m < 1 || 2 * m > n {
        return Err(Error::InvalidArgument(format!("need 1 <= m <= n/2, got m = {m}")));
    }
    if include_previous && 2 * m + 2 > n {
        return Err(Error::InvalidArgument(format!("need m <= n/2 - 1, got m = {m}")));
    }
    let rows = segments_of(&seq.point(i)?.coords, m, n - m)?;
    let r = rank(&rows);
    let mut verdict = if r == m + 1 { Verdict::Pass } else { Verdict::Fail };
    let mut details = format!("rank {r}, expected {}", m + 1);
    let mut indices = vec![i];
    if include_previous {
        if i < 2 {
            return Err(Error::IndexOutOfRange { index: 0, len: seq.len() });
        }
        let mut aug = rows.clone();
        aug.extend(segments_of(&seq.point(i - 1)?.coords, m, n - m)?);
        let r2 = rank(&aug);
        indices.insert(0, i - 1);
        if r2 < m + 2 {
            verdict = Verdict::Fail;
        }
        details.push_str(&format!(
            "; with previous point rank {r2}{}",
            if r2 == m + 2 { " (= m+2)" } else { "" }
        ));
    }
    Ok(CheckReport::new("rank", indices, verdict, details))
}

#[derive(Clone, Debug)]
pub struct OrthLattice {
    pub lattice: IntegerLattice,
    pub shortest: IVec,
    pub report: CheckReport,
}

/// The lattice of integer vectors orthogonal to the segments of `x_i`, its
/// sup-norm shortest vector and the checks on both.
pub fn orth_lattice_shortest(seq: &MinimalSequence, i: usize, m: usize, ceiling: f64) -> Result<OrthLattice> {
    let n = seq.n;
    if 2 * m + 1 > n {
        return Err(Error::InvalidArgument(format!("need n >= 2m+1, got n = {n}, m = {m}")));
    }
    if m >= 1 {
        let rank_report = rank_of_segments(seq, i, m, false)?;
        if !rank_report.passed() {
            return Err(Error::InvalidArgument(format!(
                "segments of point {i} are dependent: {}",
                rank_report.details
            )));
        }
    }
    let p = seq.point(i)?;
    let rows = segments_of(&p.coords, m, n - m)?;
    let lattice = IntegerLattice::orthogonal_to(&rows, n - m + 1)?;
    let shortest = lattice.shortest_vector(ENUMERATION_BUDGET)?;
    let mut verdict = Verdict::Pass;
    let mut notes = Vec::new();

    if lattice.rank != n - 2 * m {
        verdict = Verdict::Fail;
        notes.push(format!("kernel rank {} != n - 2m", lattice.rank));
    }
    if lattice.basis.iter().any(|b| rows.iter().any(|r| !dot(b, r).is_zero())) {
        verdict = Verdict::Fail;
        notes.push("kernel row not orthogonal".into());
    }
    // det(Λ)² · g² = Σ minors², g the gcd of the maximal minors
    let minors = maximal_minors(&rows);
    let g = minors.iter().fold(BigInt::zero(), |a, b| a.gcd(b));
    let sum_sq: BigInt = minors.iter().map(|x| x * x).sum();
    if lattice.gram_determinant() * &g * &g != sum_sq {
        verdict = Verdict::Fail;
        notes.push("covolume identity fails".into());
    }
    let s = sup_norm(&shortest);
    let r = lattice.rank as u32;
    if num_traits::pow(s.clone(), 2 * r as usize) > lattice.gram_determinant() {
        verdict = Verdict::Fail;
        notes.push("shortest vector exceeds the Minkowski radius".into());
    }

    let ln_s = f64_of(&s).ln();
    let ln_x = f64_of(&p.norm).ln();
    let ln_l = p.residual.mid_f64().ln();
    let ratio = (ln_s - (ln_x + m as f64 * ln_l) / (n - 2 * m) as f64).exp();
    let mut ratios = vec![ratio];
    notes.push(format!("|a| = {s}, C = {ratio:.4}"));
    if ratio > ceiling {
        verdict = Verdict::Fail;
        notes.push(format!("ratio above ceiling {ceiling:e}"));
    }
    let mut indices = vec![i];
    if m >= 1 && 2 * m + 2 <= n && i >= 2 {
        let prev = rank_of_segments(seq, i, m, true)?;
        if prev.passed() {
            let lp = seq.point(i - 1)?.residual.mid_f64().ln();
            let refined = (ln_s - (ln_x + m as f64 * ln_l + lp) / (n - 2 * m - 1) as f64).exp();
            ratios.push(refined);
            indices.insert(0, i - 1);
            notes.push(format!("refined C = {refined:.4}"));
            if refined > ceiling {
                verdict = Verdict::Fail;
            }
        }
    }
    let report = CheckReport::new("minkowski", indices, verdict, notes.join("; ")).with_ratios(ratios);
    Ok(OrthLattice {
        lattice,
        shortest,
        report,
    })
}

/// Coefficients of `Q·P_a`.
pub fn poly_transfer(a: &[BigInt], q: &[BigInt]) -> Result<IVec> {
    if a.is_empty() || q.is_empty() {
        return Err(Error::InvalidArgument("empty coefficient vector".into()));
    }
    let mut out = vec![BigInt::zero(); a.len() + q.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in q.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    Ok(out)
}

/// For every `Q` in `qs` (degree at most `s`), checks
/// `a(Q·P_a)·x^{(l, m+s)} = Σ_t q_t·(a·x^{(l+t, m)})`; when the left sides all
/// vanish and the `Q`'s span the polynomials of degree `≤ s`, also checks
/// `a·x^{(l+t, m)} = 0` for every `t ≤ s`.
pub fn check_transfer_identity(a: &[BigInt], qs: &[IVec], x: &[BigInt], l: usize) -> Result<CheckReport> {
    if a.is_empty() || qs.is_empty() {
        return Err(Error::InvalidArgument("empty input".into()));
    }
    let m = a.len() - 1;
    let s = qs.iter().map(|q| q.len()).max().unwrap() - 1;
    let padded: Vec<IVec> = qs
        .iter()
        .map(|q| {
            let mut q = q.clone();
            q.resize(s + 1, BigInt::zero());
            q
        })
        .collect();
    let inner: Vec<BigInt> = (0..=s)
        .map(|t| Ok(dot(a, &segment(x, l + t, m)?)))
        .collect::<Result<_>>()?;
    let long = segment(x, l, m + s)?;
    let mut verdict = Verdict::Pass;
    let mut all_zero = true;
    for q in &padded {
        let b = poly_transfer(a, q)?;
        let lhs = dot(&b, &long);
        let rhs: BigInt = q.iter().zip(&inner).map(|(c, v)| c * v).sum();
        if lhs != rhs {
            verdict = Verdict::Fail;
        }
        all_zero &= lhs.is_zero();
    }
    let spanning = rank(&padded) == s + 1;
    let mut details = format!("{} products checked", padded.len());
    if all_zero && spanning {
        if inner.iter().any(|v| !v.is_zero()) {
            verdict = Verdict::Fail;
        }
        details.push_str("; spanning annihilators force a·x^(j,m) = 0");
    }
    Ok(CheckReport::new("transfer", vec![], verdict, details))
}

/// 1-based indices of the trailing `window` fraction, starting no earlier
/// than `first` and ending at most `len - tail_gap`.
pub fn tail_indices(len: usize, window: f64, first: usize, tail_gap: usize) -> Vec<usize> {
    if len < first + tail_gap {
        return Vec::new();
    }
    let last = len - tail_gap;
    let w = ((window * len as f64).ceil() as usize).max(1);
    let start = (len + 1).saturating_sub(w).max(first);
    (start..=last).collect()
}

/// Applies `f` to every index in parallel, keeping index order.
pub(crate) fn per_index<F>(indices: &[usize], f: F) -> Result<Vec<CheckReport>>
where
    F: Fn(usize) -> Result<CheckReport> + Sync,
{
    indices.par_iter().map(|&i| f(i)).collect()
}

/// Wedge-bound check over the tail: all segments of `x_i` at once, and the
/// pair `x_{i−1}^{(0,m)}, x_i^{(0,m)}`.
pub fn wedge_rows(seq: &MinimalSequence, m: usize, window: f64) -> Result<Vec<CheckReport>> {
    if m > seq.n {
        return Err(Error::InvalidArgument("m exceeds n".into()));
    }
    let d = (m + 1).min(seq.n - m + 1);
    let idx = tail_indices(seq.len(), window, 2, 0);
    let nested = idx
        .par_iter()
        .map(|&i| {
            let mut out = Vec::new();
            let same: Vec<(usize, usize)> = (0..d).map(|k| (i, k)).collect();
            out.push(check_wedge_bound(seq, &same, m)?);
            if m >= 1 {
                out.push(check_wedge_bound(seq, &[(i - 1, 0), (i, 0)], m)?);
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(nested.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ivec;
    use crate::minimal_points::compute_minimal_sequence;
    use crate::real_field::parse_xi;
    use proptest::prelude::*;

    fn seq(xi: &str, n: usize, x0_max: u64) -> MinimalSequence {
        compute_minimal_sequence(&parse_xi(xi).unwrap(), n, x0_max).unwrap()
    }

    #[test]
    fn wedge_examples() {
        assert_eq!(wedge_norm(&[ivec(&[1, 2, 3]), ivec(&[2, 4, 6])]).unwrap(), BigInt::zero());
        assert_eq!(wedge_norm(&[ivec(&[1, 0, 0]), ivec(&[0, 1, 0])]).unwrap(), BigInt::one());
        assert_eq!(wedge_norm(&[ivec(&[1, 2]), ivec(&[3, 4])]).unwrap(), BigInt::from(2));
        assert_eq!(wedge_norm(&[ivec(&[-3, 5])]).unwrap(), BigInt::from(5));
        assert!(wedge_norm(&[ivec(&[1, 2]), ivec(&[3])]).is_err());
        assert!(wedge_norm(&[ivec(&[1]), ivec(&[3])]).is_err());
    }

    proptest! {
        #[test]
        fn wedge_alternating(rows in proptest::collection::vec(proptest::collection::vec(-30i64..30, 4), 2..4), i in 0usize..3, j in 0usize..3) {
            let b: Vec<IVec> = rows.iter().map(|r| ivec(r)).collect();
            let (i, j) = (i % b.len(), j % b.len());
            let mut s = b.clone();
            s.swap(i, j);
            prop_assert_eq!(wedge_norm(&b).unwrap(), wedge_norm(&s).unwrap());
            let mut dup = b.clone();
            dup[j] = dup[i].clone();
            if i != j {
                prop_assert!(wedge_norm(&dup).unwrap().is_zero());
            }
        }

        #[test]
        fn transfer_distributes(a in proptest::collection::vec(-9i64..9, 1..5), p in proptest::collection::vec(-9i64..9, 3), q in proptest::collection::vec(-9i64..9, 3)) {
            let a = ivec(&a);
            let (p, q) = (ivec(&p), ivec(&q));
            let sum: IVec = p.iter().zip(&q).map(|(x, y)| x + y).collect();
            let lhs = poly_transfer(&a, &sum).unwrap();
            let rhs: IVec = poly_transfer(&a, &p).unwrap().iter().zip(poly_transfer(&a, &q).unwrap()).map(|(x, y)| x + y).collect();
            prop_assert_eq!(lhs.len(), a.len() + 2);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn transfer_identity_holds(a in proptest::collection::vec(-5i64..5, 1..3), x in proptest::collection::vec(-50i64..50, 6), q in proptest::collection::vec(-4i64..4, 1..3)) {
            let r = check_transfer_identity(&ivec(&a), &[ivec(&q)], &ivec(&x), 0).unwrap();
            prop_assert_eq!(r.verdict, Verdict::Pass);
        }
    }

    #[test]
    fn transfer_examples() {
        assert_eq!(poly_transfer(&ivec(&[3, 4]), &ivec(&[1])).unwrap(), ivec(&[3, 4]));
        assert_eq!(poly_transfer(&ivec(&[3, 4]), &ivec(&[0, 1])).unwrap(), ivec(&[0, 3, 4]));
        assert_eq!(poly_transfer(&ivec(&[1, 1]), &ivec(&[1, -1])).unwrap(), ivec(&[1, 0, -1]));
        assert!(poly_transfer(&[], &ivec(&[1])).is_err());
    }

    #[test]
    fn transfer_forces_vanishing() {
        // a = (2, -1) kills (1, 2, 4, 8): every shifted product vanishes
        let x = ivec(&[1, 2, 4, 8]);
        let qs = vec![ivec(&[1, 0]), ivec(&[0, 1])];
        let r = check_transfer_identity(&ivec(&[2, -1]), &qs, &x, 0).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.details.contains("force"));
    }

    #[test]
    fn wedge_bound_single_vector() {
        let s = seq("named:sqrt2", 2, 500);
        let r = check_wedge_bound(&s, &[(s.len(), 0)], 1).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.ratios[0] <= 1.0);
        let r = check_wedge_bound(&s, &[(3, 0), (3, 0)], 1).unwrap();
        assert_eq!(r.ratios[0], 0.0);
        assert!(check_wedge_bound(&s, &[(3, 0), (2, 0)], 1).is_err());
        assert!(check_wedge_bound(&s, &[(3, 2)], 1).is_err());
    }

    #[test]
    fn wedge_bound_on_staircases() {
        for (xi, n) in [("named:sqrt2", 2), ("named:cbrt2", 3), ("named:golden", 2)] {
            let s = seq(xi, n, 2000);
            for m in 0..=n / 2 + 1 {
                if m > n {
                    continue;
                }
                for row in wedge_rows(&s, m, 1.0).unwrap() {
                    assert_eq!(row.verdict, Verdict::Pass, "{xi} n={n} m={m} {}", row.details);
                }
            }
        }
    }

    #[test]
    fn rank_checks() {
        let s = seq("named:cbrt2", 4, 3000);
        let r = rank_of_segments(&s, s.len(), 1, false).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{}", r.details);
        let r = rank_of_segments(&s, s.len(), 1, true).unwrap();
        assert!(r.details.contains("with previous"));
        assert!(rank_of_segments(&s, s.len(), 3, false).is_err());
        assert!(rank_of_segments(&s, s.len() + 1, 1, false).is_err());
    }

    #[test]
    fn orth_lattice_on_sqrt2() {
        let s = seq("named:sqrt2", 3, 2000);
        for i in tail_indices(s.len(), 0.5, 2, 0) {
            match orth_lattice_shortest(&s, i, 1, DEFAULT_RATIO_CEILING) {
                Ok(o) => {
                    assert_eq!(o.report.verdict, Verdict::Pass, "{}", o.report.details);
                    assert!(o.lattice.contains(&o.shortest));
                }
                Err(Error::InvalidArgument(_)) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn tail_window() {
        assert_eq!(tail_indices(10, 0.3, 1, 0), vec![8, 9, 10]);
        assert_eq!(tail_indices(10, 0.3, 1, 1), vec![8, 9]);
        assert_eq!(tail_indices(10, 1.0, 2, 0), (2..=10).collect::<Vec<_>>());
        assert!(tail_indices(1, 1.0, 2, 0).is_empty());
    }
}
