//! Integer lattices in `ℤ^d` and sup-norm shortest vectors.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    gram_determinant, hermite_normal_form, integer_kernel, lll_reduce, rank, sup_norm, IVec,
};
use crate::minimal_points::canonical_sign;

/// Default cap on enumeration nodes per shortest-vector search.
pub const ENUMERATION_BUDGET: u64 = 20_000_000;

/// A lattice given by linearly independent integer rows, kept in Hermite
/// normal form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegerLattice {
    pub basis: Vec<IVec>,
    pub ambient: usize,
    pub rank: usize,
}

impl IntegerLattice {
    /// Lattice spanned by `rows`, which must be independent.
    pub fn new(rows: &[IVec], ambient: usize) -> Result<Self> {
        if rows.iter().any(|r| r.len() != ambient) {
            return Err(Error::InvalidArgument("row length differs from ambient dimension".into()));
        }
        if rank(rows) != rows.len() {
            return Err(Error::InvalidArgument("basis rows are dependent".into()));
        }
        let basis = hermite_normal_form(rows);
        Ok(IntegerLattice {
            rank: basis.len(),
            basis,
            ambient,
        })
    }

    /// `{y ∈ ℤ^ambient : r·y = 0}` over the given rows.
    pub fn orthogonal_to(rows: &[IVec], ambient: usize) -> Result<Self> {
        if rows.iter().any(|r| r.len() != ambient) {
            return Err(Error::InvalidArgument("row length differs from ambient dimension".into()));
        }
        let basis = integer_kernel(rows, ambient);
        Ok(IntegerLattice {
            rank: basis.len(),
            basis,
            ambient,
        })
    }

    /// Squared covolume `det(B Bᵀ)`.
    pub fn gram_determinant(&self) -> BigInt {
        if self.basis.is_empty() {
            return BigInt::one();
        }
        gram_determinant(&self.basis)
    }

    fn pivots(&self) -> Vec<usize> {
        self.basis
            .iter()
            .map(|r| r.iter().position(|x| !x.is_zero()).expect("nonzero row"))
            .collect()
    }

    /// Integer coordinates of `v` in the basis, if `v` lies in the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        if v.len() != self.ambient {
            return None;
        }
        let mut rest: IVec = v.to_vec();
        let mut coeffs = Vec::with_capacity(self.rank);
        for (row, p) in self.basis.iter().zip(self.pivots()) {
            if rest[..p].iter().any(|x| !x.is_zero()) {
                return None;
            }
            let (c, r) = rest[p].div_rem(&row[p]);
            if !r.is_zero() {
                return None;
            }
            for (x, y) in rest.iter_mut().zip(row) {
                *x -= &c * y;
            }
            coeffs.push(c);
        }
        if rest.iter().all(Zero::is_zero) {
            Some(coeffs)
        } else {
            None
        }
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.coordinates(v).is_some()
    }

    /// Radius guaranteed to hold a nonzero lattice vector: every central
    /// section of the unit cube has volume at least `2^r`, so Minkowski gives
    /// a vector of sup-norm at most `covol^{1/r}`.
    pub fn minkowski_radius(&self) -> BigInt {
        self.gram_determinant().nth_root(2 * self.rank as u32)
    }

    /// Sup-norm shortest nonzero vector, canonical sign, lexicographically
    /// least among ties.
    pub fn shortest_vector(&self, budget: u64) -> Result<IVec> {
        if self.rank == 0 {
            return Err(Error::InvalidArgument("lattice is trivial".into()));
        }
        let lll_cap = lll_reduce(&self.basis)
            .iter()
            .map(|r| sup_norm(r))
            .min()
            .expect("nonempty basis");
        let cap = lll_cap.min(self.minkowski_radius().max(BigInt::one()));
        let mut nodes = 0u64;
        let mut radius = BigInt::one();
        loop {
            let r = radius.clone().min(cap.clone());
            let mut best: Option<(BigInt, IVec)> = None;
            self.enumerate(&r, budget, &mut nodes, &mut |v| {
                let n = sup_norm(v);
                let v = canonical_sign(v);
                let better = match &best {
                    None => true,
                    Some((bn, bv)) => n < *bn || (n == *bn && v < *bv),
                };
                if better {
                    best = Some((n, v));
                }
            })?;
            if let Some((_, v)) = best {
                return Ok(v);
            }
            if r >= cap {
                return Err(Error::Internal("no vector within the Minkowski radius".into()));
            }
            radius *= 2;
        }
    }

    /// Calls `visit` on every nonzero lattice vector of sup-norm at most `r`.
    pub fn enumerate(
        &self,
        r: &BigInt,
        budget: u64,
        nodes: &mut u64,
        visit: &mut dyn FnMut(&IVec),
    ) -> Result<()> {
        let piv = self.pivots();
        let zero = vec![BigInt::zero(); self.ambient];
        self.descend(0, &piv, &zero, r, budget, nodes, visit)
    }

    #[allow(clippy::too_many_arguments)]
    fn descend(
        &self,
        level: usize,
        piv: &[usize],
        partial: &IVec,
        r: &BigInt,
        budget: u64,
        nodes: &mut u64,
        visit: &mut dyn FnMut(&IVec),
    ) -> Result<()> {
        if level == self.rank {
            if partial.iter().any(|x| !x.is_zero()) {
                visit(partial);
            }
            return Ok(());
        }
        let row = &self.basis[level];
        let p = piv[level];
        let end = piv.get(level + 1).copied().unwrap_or(self.ambient);
        let h = &row[p];
        let lo = (-r - &partial[p]).div_ceil(h);
        let hi = (r - &partial[p]).div_floor(h);
        let mut c = lo;
        while c <= hi {
            *nodes += 1;
            if *nodes > budget {
                return Err(Error::EnumerationBudget(format!(
                    "more than {budget} nodes at radius {r}"
                )));
            }
            let w: IVec = partial.iter().zip(row).map(|(x, y)| x + &c * y).collect();
            // columns before the next pivot are now final
            if w[p..end].iter().all(|x| x.abs() <= *r) {
                self.descend(level + 1, piv, &w, r, budget, nodes, visit)?;
            }
            c += 1;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dot, ivec};
    use proptest::prelude::*;

    fn lat(rows: &[&[i64]]) -> IntegerLattice {
        let rows: Vec<IVec> = rows.iter().map(|r| ivec(r)).collect();
        IntegerLattice::new(&rows, rows[0].len()).unwrap()
    }

    #[test]
    fn diagonal() {
        let l = lat(&[&[2, 0], &[0, 3]]);
        assert_eq!(l.shortest_vector(ENUMERATION_BUDGET).unwrap(), ivec(&[2, 0]));
    }

    #[test]
    fn kernel_of_two_units() {
        let l = IntegerLattice::orthogonal_to(&[ivec(&[1, 0, 0]), ivec(&[0, 1, 0])], 3).unwrap();
        assert_eq!(l.rank, 1);
        assert_eq!(l.shortest_vector(ENUMERATION_BUDGET).unwrap(), ivec(&[0, 0, 1]));
    }

    #[test]
    fn skewed_basis() {
        // (1, 100) and (0, 101) contain (1, -1)
        let l = lat(&[&[1, 100], &[0, 101]]);
        let s = l.shortest_vector(ENUMERATION_BUDGET).unwrap();
        assert_eq!(sup_norm(&s), BigInt::one());
        assert!(l.contains(&s));
    }

    #[test]
    fn membership() {
        let l = lat(&[&[2, 1, 0], &[0, 3, 3]]);
        assert!(l.contains(&ivec(&[2, 4, 3])));
        assert!(!l.contains(&ivec(&[1, 0, 0])));
        assert!(!l.contains(&ivec(&[0, 0, 1])));
        assert_eq!(l.coordinates(&ivec(&[4, -4, -6])), Some(ivec(&[2, -2])));
    }

    #[test]
    fn budget_is_reported() {
        let l = lat(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]);
        let mut nodes = 0;
        let e = l.enumerate(&BigInt::from(50), 1000, &mut nodes, &mut |_| {});
        assert!(matches!(e, Err(Error::EnumerationBudget(_))));
    }

    /// Independent oracle: pick `r` columns with a nonzero minor, solve for
    /// the coefficients with the adjugate, and scan the projected box.
    fn brute_shortest(rows: &[Vec<i64>]) -> i64 {
        let r = rows.len();
        let d = rows[0].len();
        let big: Vec<IVec> = rows.iter().map(|x| ivec(x)).collect();
        let cols = crate::linalg::combinations(d, r)
            .into_iter()
            .find(|c| {
                let m: Vec<IVec> = big.iter().map(|row| c.iter().map(|&j| row[j].clone()).collect()).collect();
                !crate::linalg::determinant(&m).is_zero()
            })
            .unwrap();
        let sq: Vec<Vec<i128>> = rows
            .iter()
            .map(|row| cols.iter().map(|&j| row[j] as i128).collect())
            .collect();
        let det = det_i128(&sq);
        let adj = adjugate(&sq);
        // every shortest vector has projection inside the box of the
        // shortest basis row
        let radius: i64 = rows.iter().map(|r| r.iter().map(|x| x.abs()).max().unwrap()).min().unwrap();
        let mut best = i64::MAX;
        let mut idx = vec![-radius; r];
        loop {
            let mut ok = true;
            let mut c = vec![0i128; r];
            for (k, ck) in c.iter_mut().enumerate() {
                let s: i128 = (0..r).map(|j| idx[j] as i128 * adj[j][k]).sum();
                if s % det != 0 {
                    ok = false;
                    break;
                }
                *ck = s / det;
            }
            if ok {
                let v: Vec<i128> = (0..d)
                    .map(|col| (0..r).map(|k| c[k] * rows[k][col] as i128).sum())
                    .collect();
                let n = v.iter().map(|x| x.abs()).max().unwrap();
                if n > 0 && (n as i64) < best {
                    best = n as i64;
                }
            }
            let mut t = 0;
            loop {
                if t == r {
                    return best;
                }
                idx[t] += 1;
                if idx[t] <= radius {
                    break;
                }
                idx[t] = -radius;
                t += 1;
            }
        }
    }

    fn det_i128(m: &[Vec<i128>]) -> i128 {
        let n = m.len();
        if n == 1 {
            return m[0][0];
        }
        (0..n)
            .map(|j| {
                let minor: Vec<Vec<i128>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                    .collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * m[0][j] * det_i128(&minor)
            })
            .sum()
    }

    /// `adj` with `M · adj = det · I`.
    fn adjugate(m: &[Vec<i128>]) -> Vec<Vec<i128>> {
        let n = m.len();
        if n == 1 {
            return vec![vec![1]];
        }
        let mut adj = vec![vec![0i128; n]; n];
        for i in 0..n {
            for j in 0..n {
                let minor: Vec<Vec<i128>> = m
                    .iter()
                    .enumerate()
                    .filter(|&(r, _)| r != i)
                    .map(|(_, row)| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                    .collect();
                let s = if (i + j) % 2 == 0 { 1 } else { -1 };
                adj[j][i] = s * det_i128(&minor);
            }
        }
        adj
    }

    fn basis_strategy(max_rank: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..=4)
            .prop_flat_map(move |d| (Just(d), 1usize..=d.min(max_rank)))
            .prop_flat_map(|(d, r)| proptest::collection::vec(proptest::collection::vec(-50i64..=50, d), r))
            .prop_filter("independent", |rows| {
                let b: Vec<IVec> = rows.iter().map(|x| ivec(x)).collect();
                rank(&b) == b.len()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn shortest_matches_brute_force(rows in basis_strategy(3)) {
            let b: Vec<IVec> = rows.iter().map(|x| ivec(x)).collect();
            let l = IntegerLattice::new(&b, rows[0].len()).unwrap();
            let s = l.shortest_vector(ENUMERATION_BUDGET).unwrap();
            prop_assert!(l.contains(&s));
            prop_assert_eq!(sup_norm(&s), BigInt::from(brute_shortest(&rows)));
            prop_assert!(sup_norm(&s) <= l.minkowski_radius().max(BigInt::one()));
        }

        #[test]
        fn kernel_rows_are_orthogonal(rows in proptest::collection::vec(proptest::collection::vec(-20i64..=20, 5), 1..4)) {
            let b: Vec<IVec> = rows.iter().map(|x| ivec(x)).collect();
            let l = IntegerLattice::orthogonal_to(&b, 5).unwrap();
            prop_assert_eq!(l.rank, 5 - rank(&b));
            for k in &l.basis {
                for r in &b {
                    prop_assert!(dot(k, r).is_zero());
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(6))]
        #[test]
        fn full_rank_four(rows in proptest::collection::vec(proptest::collection::vec(-50i64..=50, 4), 4)
            .prop_filter("independent", |rows| {
                let b: Vec<IVec> = rows.iter().map(|x| ivec(x)).collect();
                rank(&b) == 4
            })) {
            let b: Vec<IVec> = rows.iter().map(|x| ivec(x)).collect();
            let l = IntegerLattice::new(&b, 4).unwrap();
            let s = l.shortest_vector(ENUMERATION_BUDGET).unwrap();
            prop_assert_eq!(sup_norm(&s), BigInt::from(brute_shortest(&rows)));
        }
    }
}
