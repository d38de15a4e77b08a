//! Floating-point brute force for the minimal-point staircase.
//!
//! Every integer vector of norm at most `H` is covered: for each `x0` the
//! best value of each coordinate `x_i ∈ [-N, N]` is tracked as `N` grows, so
//! the full box is visited once. Intended as an independent cross-check of
//! the exact engine on small ranges.

/// A record found by the brute force: coordinates, norm and residual.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferencePoint {
    pub coords: Vec<i64>,
    pub norm: i64,
    pub residual: f64,
}

const TOL: f64 = 1e-9;

/// Records of the staircase over all vectors with norm at most `horizon`,
/// using `xi` as a floating value. Ties within `1e-9` prefer `x0 > 0` and then
/// the lexicographically smallest coordinates.
pub fn brute_force_staircase(xi: f64, n: usize, horizon: i64) -> Vec<ReferencePoint> {
    let powers: Vec<f64> = (0..=n).map(|i| xi.powi(i as i32)).collect();
    // best[x0][i-1]: min over |x_i| <= N of |x0 ξ^i − x_i|
    let mut best: Vec<Vec<f64>> = Vec::new();
    let mut records: Vec<ReferencePoint> = Vec::new();
    let mut current = f64::INFINITY;
    for big_n in 1..=horizon {
        for (x0, row) in best.iter_mut().enumerate() {
            for i in 1..=n {
                let t = x0 as f64 * powers[i];
                let v = (t - big_n as f64).abs().min((t + big_n as f64).abs());
                row[i - 1] = row[i - 1].min(v);
            }
        }
        let x0 = big_n as usize;
        let mut row = vec![f64::INFINITY; n];
        for i in 1..=n {
            let t = x0 as f64 * powers[i];
            for xi_ in -big_n..=big_n {
                row[i - 1] = row[i - 1].min((t - xi_ as f64).abs());
            }
        }
        if best.is_empty() {
            best.push(vec![f64::INFINITY; n]);
        }
        best.push(row);

        let mut min_l = f64::INFINITY;
        let mut arg = 0usize;
        for (x0, row) in best.iter().enumerate().skip(1) {
            let l = row.iter().cloned().fold(0.0, f64::max);
            if l < min_l - TOL {
                min_l = l;
                arg = x0;
            }
        }
        // x0 = 0 contributes residual 1 and loses ties
        let zero = min_l > 1.0 + TOL;
        if zero {
            min_l = 1.0;
        }
        if min_l < current - TOL {
            current = min_l;
            let coords = if zero {
                let mut c = vec![0i64; n + 1];
                c[n] = 1;
                c
            } else {
                let mut c = vec![arg as i64];
                for i in 1..=n {
                    let t = arg as f64 * powers[i];
                    let pick = (-big_n..=big_n)
                        .find(|&v| (t - v as f64).abs() <= min_l + TOL)
                        .expect("a coordinate attains the minimum");
                    c.push(pick);
                }
                c
            };
            let norm = coords.iter().map(|v| v.abs()).max().unwrap();
            records.push(ReferencePoint {
                coords,
                norm,
                residual: min_l,
            });
        }
    }
    records
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt2_records() {
        let r = brute_force_staircase(std::f64::consts::SQRT_2, 1, 17);
        let c: Vec<_> = r.iter().map(|p| p.coords.clone()).collect();
        assert_eq!(c, vec![vec![1, 1], vec![2, 3], vec![5, 7], vec![12, 17]]);
    }

    #[test]
    fn large_xi_starts_with_x0_zero() {
        let r = brute_force_staircase(7.5f64.sqrt() * 3.0, 1, 3);
        assert_eq!(r[0].coords, vec![0, 1]);
    }
}
