//! Exact integer linear algebra: fraction-free elimination, maximal minors,
//! integer kernels, Hermite normal form and LLL reduction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type IVec = Vec<BigInt>;

pub fn ivec(v: &[i64]) -> IVec {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sup_norm(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x.abs()).max().unwrap_or_default()
}

pub fn is_zero_vec(v: &[BigInt]) -> bool {
    v.iter().all(|x| x.is_zero())
}

/// Bareiss elimination in place. Returns the pivot columns and the number of
/// row swaps performed.
fn bareiss(a: &mut [IVec]) -> (Vec<usize>, usize) {
    let m = a.len();
    let ncols = a.first().map_or(0, |r| r.len());
    let mut prev = BigInt::one();
    let mut r = 0;
    let mut pivots = Vec::new();
    let mut swaps = 0;
    for col in 0..ncols {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        if p != r {
            a.swap(p, r);
            swaps += 1;
        }
        for i in r + 1..m {
            for j in col + 1..ncols {
                let v = &a[r][col] * &a[i][j] - &a[i][col] * &a[r][j];
                a[i][j] = v / &prev;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[r][col].clone();
        pivots.push(col);
        r += 1;
    }
    (pivots, swaps)
}

/// Rank over ℚ of the given rows.
pub fn rank(rows: &[IVec]) -> usize {
    let mut a = rows.to_vec();
    bareiss(&mut a).0.len()
}

/// Determinant of a square integer matrix.
pub fn determinant(m: &[IVec]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    assert!(m.iter().all(|r| r.len() == n), "matrix is not square");
    let mut a = m.to_vec();
    let (pivots, swaps) = bareiss(&mut a);
    if pivots.len() < n {
        return BigInt::zero();
    }
    let d = a[n - 1][n - 1].clone();
    if swaps % 2 == 1 {
        -d
    } else {
        d
    }
}

/// All `d`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if d > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..d).collect();
    loop {
        out.push(idx.clone());
        let mut i = d;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < n - d + i {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..d {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Maximal minors of `d` rows of length `N`: one per column subset.
pub fn maximal_minors(rows: &[IVec]) -> Vec<BigInt> {
    let d = rows.len();
    let n = rows.first().map_or(0, |r| r.len());
    combinations(n, d)
        .into_iter()
        .map(|cols| {
            let sub: Vec<IVec> = rows
                .iter()
                .map(|r| cols.iter().map(|&c| r[c].clone()).collect())
                .collect();
            determinant(&sub)
        })
        .collect()
}

/// Unimodular row echelon of `[left | right]` driven by the left block.
/// Returns the number of nonzero left rows (they come first).
fn gcd_echelon(rows: &mut [(IVec, IVec)]) -> usize {
    let ncols = rows.first().map_or(0, |r| r.0.len());
    let mut piv = 0;
    for col in 0..ncols {
        if piv == rows.len() {
            break;
        }
        for i in piv + 1..rows.len() {
            if rows[i].0[col].is_zero() {
                continue;
            }
            let a = rows[piv].0[col].clone();
            let b = rows[i].0[col].clone();
            let eg = a.extended_gcd(&b);
            let (g, x, y) = (eg.gcd, eg.x, eg.y);
            let (ag, bg) = (&a / &g, &b / &g);
            let combine = |u: &IVec, v: &IVec, s: &BigInt, t: &BigInt| -> IVec {
                u.iter().zip(v).map(|(p, q)| s * p + t * q).collect()
            };
            let (pl, pr) = rows[piv].clone();
            let (il, ir) = rows[i].clone();
            let neg_ag = -&ag;
            rows[piv] = (combine(&pl, &il, &x, &y), combine(&pr, &ir, &x, &y));
            rows[i] = (combine(&pl, &il, &bg, &neg_ag), combine(&pr, &ir, &bg, &neg_ag));
        }
        if !rows[piv].0[col].is_zero() {
            piv += 1;
        }
    }
    piv
}

/// A basis of `{y ∈ ℤ^ncols : r·y = 0 for every row r}`.
pub fn integer_kernel(rows: &[IVec], ncols: usize) -> Vec<IVec> {
    let mut aug: Vec<(IVec, IVec)> = (0..ncols)
        .map(|j| {
            let left = rows.iter().map(|r| r[j].clone()).collect();
            let mut right = vec![BigInt::zero(); ncols];
            right[j] = BigInt::one();
            (left, right)
        })
        .collect();
    let piv = gcd_echelon(&mut aug);
    let basis: Vec<IVec> = aug.into_iter().skip(piv).map(|(_, r)| r).collect();
    if basis.is_empty() {
        return basis;
    }
    hermite_normal_form(&lll_reduce(&basis))
}

/// Row Hermite normal form: echelon, positive pivots, entries above each
/// pivot reduced into `[0, pivot)`. Zero rows are dropped.
pub fn hermite_normal_form(rows: &[IVec]) -> Vec<IVec> {
    let mut aug: Vec<(IVec, IVec)> = rows.iter().map(|r| (r.clone(), Vec::new())).collect();
    let piv = gcd_echelon(&mut aug);
    let mut h: Vec<IVec> = aug.into_iter().take(piv).map(|(l, _)| l).collect();
    for i in 0..h.len() {
        let pc = h[i].iter().position(|x| !x.is_zero()).unwrap();
        if h[i][pc].is_negative() {
            for x in h[i].iter_mut() {
                *x = -&*x;
            }
        }
        let p = h[i][pc].clone();
        for k in 0..i {
            let q = h[k][pc].div_floor(&p);
            if !q.is_zero() {
                let row = h[i].clone();
                for (x, y) in h[k].iter_mut().zip(&row) {
                    *x -= &q * y;
                }
            }
        }
    }
    h
}

fn to_rat(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

fn rdot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn gram_schmidt(b: &[IVec]) -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
    let n = b.len();
    let mut star: Vec<Vec<BigRational>> = Vec::with_capacity(n);
    let mut norms = Vec::with_capacity(n);
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        let bi = to_rat(&b[i]);
        let mut v = bi.clone();
        for j in 0..i {
            if norms[j] == BigRational::zero() {
                continue;
            }
            let m = rdot(&bi, &star[j]) / &norms[j];
            for (x, y) in v.iter_mut().zip(&star[j]) {
                *x -= &m * y;
            }
            mu[i][j] = m;
        }
        norms.push(rdot(&v, &v));
        star.push(v);
    }
    (mu, norms)
}

/// Exact LLL reduction (δ = 3/4) of linearly independent rows.
pub fn lll_reduce(basis: &[IVec]) -> Vec<IVec> {
    let mut b = basis.to_vec();
    let n = b.len();
    if n <= 1 {
        return b;
    }
    let delta = BigRational::new(3.into(), 4.into());
    let mut k = 1;
    let mut guard = 0usize;
    while k < n {
        guard += 1;
        assert!(guard < 1_000_000, "LLL did not terminate");
        for j in (0..k).rev() {
            let (mu, _) = gram_schmidt(&b);
            let q = mu[k][j].round().to_integer();
            if !q.is_zero() {
                let bj = b[j].clone();
                for (x, y) in b[k].iter_mut().zip(&bj) {
                    *x -= &q * y;
                }
            }
        }
        let (mu, norms) = gram_schmidt(&b);
        let lhs = &norms[k];
        let m = &mu[k][k - 1];
        let rhs = (&delta - m * m) * &norms[k - 1];
        if *lhs >= rhs {
            k += 1;
        } else {
            b.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    b
}

/// `det(B·Bᵀ)`, the squared covolume of the lattice spanned by the rows.
pub fn gram_determinant(basis: &[IVec]) -> BigInt {
    let g: Vec<IVec> = basis
        .iter()
        .map(|u| basis.iter().map(|v| dot(u, v)).collect())
        .collect();
    determinant(&g)
}

/// Rows `w_j` in the span with `⟨b_i, w_j⟩ = [i = j]`, so that a lattice
/// vector `v = Σ c_i b_i` has `c_j = ⟨v, w_j⟩`.
pub fn dual_basis(basis: &[IVec]) -> Vec<Vec<BigRational>> {
    let r = basis.len();
    let mut g: Vec<Vec<BigRational>> = basis
        .iter()
        .map(|u| basis.iter().map(|v| BigRational::from_integer(dot(u, v))).collect())
        .collect();
    // invert G by Gauss-Jordan
    let mut inv: Vec<Vec<BigRational>> = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                .collect()
        })
        .collect();
    for c in 0..r {
        let p = (c..r).find(|&i| !g[i][c].is_zero()).expect("singular Gram matrix");
        g.swap(c, p);
        inv.swap(c, p);
        let piv = g[c][c].clone();
        for j in 0..r {
            g[c][j] = &g[c][j] / &piv;
            inv[c][j] = &inv[c][j] / &piv;
        }
        for i in 0..r {
            if i != c && !g[i][c].is_zero() {
                let f = g[i][c].clone();
                for j in 0..r {
                    let (gc, ic) = (g[c][j].clone(), inv[c][j].clone());
                    g[i][j] -= &f * gc;
                    inv[i][j] -= &f * ic;
                }
            }
        }
    }
    let ncols = basis.first().map_or(0, |v| v.len());
    inv.iter()
        .map(|row| {
            (0..ncols)
                .map(|k| {
                    row.iter()
                        .zip(basis)
                        .map(|(a, b)| a * BigRational::from_integer(b[k].clone()))
                        .sum()
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rational_rank(rows: &[Vec<i64>]) -> usize {
        let mut a: Vec<Vec<BigRational>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
            .collect();
        let mut r = 0;
        let ncols = a.first().map_or(0, |x| x.len());
        for c in 0..ncols {
            let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(r, p);
            for i in r + 1..a.len() {
                let f = &a[i][c] / &a[r][c];
                for j in 0..ncols {
                    let v = &f * &a[r][j];
                    a[i][j] -= v;
                }
            }
            r += 1;
        }
        r
    }

    #[test]
    fn small_determinants() {
        assert_eq!(determinant(&[ivec(&[1, 2]), ivec(&[3, 4])]), BigInt::from(-2));
        assert_eq!(
            determinant(&[ivec(&[0, 1, 0]), ivec(&[1, 0, 0]), ivec(&[0, 0, 1])]),
            BigInt::from(-1)
        );
        assert_eq!(determinant(&[ivec(&[2, 4]), ivec(&[1, 2])]), BigInt::zero());
    }

    #[test]
    fn minors_and_combinations() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        let m = maximal_minors(&[ivec(&[1, 0, 0]), ivec(&[0, 1, 0])]);
        assert_eq!(m, ivec(&[1, 0, 0]));
    }

    #[test]
    fn kernel_examples() {
        let k = integer_kernel(&[ivec(&[1, 0, 0]), ivec(&[0, 1, 0])], 3);
        assert_eq!(k, vec![ivec(&[0, 0, 1])]);
        let k = integer_kernel(&[ivec(&[2, 3, 5])], 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(dot(v, &ivec(&[2, 3, 5])).is_zero());
        }
        // the kernel is saturated: covolume equals the norm of the primitive row
        assert_eq!(gram_determinant(&k), BigInt::from(4 + 9 + 25));
    }

    #[test]
    fn hnf_is_canonical() {
        let a = vec![ivec(&[2, 4, 6]), ivec(&[1, 1, 1])];
        let b = vec![ivec(&[3, 5, 7]), ivec(&[1, 1, 1])];
        assert_eq!(hermite_normal_form(&a), hermite_normal_form(&b));
        let h = hermite_normal_form(&[ivec(&[4, 0]), ivec(&[0, 6]), ivec(&[2, 3])]);
        assert_eq!(h, vec![ivec(&[2, 3]), ivec(&[0, 6])]);
    }

    #[test]
    fn lll_small() {
        let b = lll_reduce(&[ivec(&[1, 1, 1]), ivec(&[-1, 0, 2]), ivec(&[3, 5, 6])]);
        assert_eq!(gram_determinant(&b), BigInt::from(9));
        assert!(b.iter().all(|v| sup_norm(v) <= BigInt::from(2)));
    }

    #[test]
    fn dual_basis_is_biorthogonal() {
        let b = vec![ivec(&[1, 2, 3]), ivec(&[0, 1, 4])];
        let w = dual_basis(&b);
        for (i, bi) in b.iter().enumerate() {
            for (j, wj) in w.iter().enumerate() {
                let s: BigRational = bi
                    .iter()
                    .zip(wj)
                    .map(|(x, y)| BigRational::from_integer(x.clone()) * y)
                    .sum();
                let want = if i == j { BigRational::one() } else { BigRational::zero() };
                assert_eq!(s, want);
            }
        }
    }

    proptest! {
        #[test]
        fn bareiss_rank_matches_rational(rows in proptest::collection::vec(
            proptest::collection::vec(-4i64..5, 4), 1..5)) {
            let iv: Vec<IVec> = rows.iter().map(|r| ivec(r)).collect();
            prop_assert_eq!(rank(&iv), rational_rank(&rows));
        }

        #[test]
        fn kernel_is_orthogonal_and_full(rows in proptest::collection::vec(
            proptest::collection::vec(-6i64..7, 5), 1..4)) {
            let iv: Vec<IVec> = rows.iter().map(|r| ivec(r)).collect();
            let k = integer_kernel(&iv, 5);
            prop_assert_eq!(k.len(), 5 - rank(&iv));
            for v in &k {
                for r in &iv {
                    prop_assert!(dot(v, r).is_zero());
                }
            }
            prop_assert_eq!(rank(&k), k.len());
        }

        #[test]
        fn determinant_is_alternating(rows in proptest::collection::vec(
            proptest::collection::vec(-5i64..6, 3), 3)) {
            let iv: Vec<IVec> = rows.iter().map(|r| ivec(r)).collect();
            let mut sw = iv.clone();
            sw.swap(0, 2);
            prop_assert_eq!(determinant(&iv), -determinant(&sw));
        }
    }
}
