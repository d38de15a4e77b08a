use num_bigint::BigInt;
use num_traits::ToPrimitive;
use proptest::prelude::*;

use diolab::exponents::{
    dirichlet_constant, estimate_lambda, estimate_lambda_hat, estimate_omega, omega_search,
};
use diolab::minimal_points::{compute_minimal_sequence, compute_minimal_sequence_cached, MinimalSequence};
use diolab::real_field::{approx_f64, parse_xi};
use diolab::reference::brute_force_staircase;

fn seq(spec: &str, n: usize, x0_max: u64) -> MinimalSequence {
    compute_minimal_sequence(&parse_xi(spec).unwrap(), n, x0_max).unwrap()
}

fn coords(s: &MinimalSequence) -> Vec<Vec<i64>> {
    s.points
        .iter()
        .map(|p| p.coords.iter().map(|c| c.to_i64().unwrap()).collect())
        .collect()
}

#[test]
fn sqrt2_staircase_is_the_convergents() {
    let s = seq("named:sqrt2", 1, 5000);
    let mut expect = vec![vec![1, 1]];
    let (mut p, mut q) = (3i64, 2i64);
    while q <= 5000 {
        expect.push(vec![q, p]);
        (p, q) = (p + 2 * q, p + q);
    }
    let got = coords(&s);
    assert_eq!(got, expect[..got.len()].to_vec());
    assert!(got.len() >= expect.len() - 1);
}

#[test]
fn transcendental_matches_brute_force() {
    for n in 1..=2 {
        let s = seq("named:e", n, 150);
        let h = s.scan_horizon.to_i64().unwrap();
        let oracle: Vec<Vec<i64>> = brute_force_staircase(approx_f64(&s.xi), n, h)
            .into_iter()
            .map(|p| p.coords)
            .collect();
        assert_eq!(coords(&s), oracle, "n = {n}");
    }
}

#[test]
fn cache_extends_without_rewriting() {
    let dir = tempfile::tempdir().unwrap();
    let xi = parse_xi("named:cbrt2").unwrap();
    let small = compute_minimal_sequence_cached(&xi, 2, 500, dir.path()).unwrap();
    let large = compute_minimal_sequence_cached(&xi, 2, 5000, dir.path()).unwrap();
    let fresh = compute_minimal_sequence(&xi, 2, 5000).unwrap();
    assert_eq!(large.points, fresh.points);
    assert_eq!(&large.points[..small.len()], &small.points[..]);
    let again = compute_minimal_sequence_cached(&xi, 2, 5000, dir.path()).unwrap();
    assert_eq!(again.points, large.points);
    assert_eq!(again.scan_horizon, large.scan_horizon);
}

#[test]
fn omega_examples() {
    let sqrt2 = parse_xi("named:sqrt2").unwrap();
    let r = omega_search(&sqrt2, 1, 10).unwrap();
    assert_eq!(r.best, vec![-7, 5]);
    assert!((r.ratio - 1.148).abs() < 1e-3);
    let golden = parse_xi("named:golden").unwrap();
    let r = omega_search(&golden, 1, 13).unwrap();
    assert_eq!(r.best, vec![-13, 8]);
    assert!((r.ratio - 1.125).abs() < 1e-3);
    let e = estimate_omega(&sqrt2, 2, &[4, 8]).unwrap();
    assert!(e.exact_annihilation && e.value.is_infinite());
}

#[test]
fn dirichlet_floor_holds() {
    for spec in ["named:sqrt2", "named:e", "named:cbrt2"] {
        let xi = parse_xi(spec).unwrap();
        for k in 1..=2usize {
            let c = dirichlet_constant(&xi, k).unwrap();
            for q in [2u64, 5, 16, 40] {
                let r = omega_search(&xi, k, q).unwrap();
                if r.exact_annihilation {
                    continue;
                }
                let bound = c * (q as f64).powi(-(k as i32));
                assert!(r.value.hi().to_f64() <= bound, "{spec} k = {k} Q = {q}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn lambda_dominates_lambda_hat(pick in 0usize..4, x0 in 200u64..3000, w in 0.2f64..1.0) {
        let (spec, n) = [("named:sqrt2", 1), ("named:golden", 1), ("named:cbrt2", 2), ("named:e", 2)][pick];
        let s = seq(spec, n, x0);
        if let (Ok(hat), Ok(lam)) = (estimate_lambda_hat(&s, w), estimate_lambda(&s, w)) {
            prop_assert!(lam.value >= hat.value);
        }
    }

    #[test]
    fn norms_and_residuals_are_monotone(pick in 0usize..3, x0 in 50u64..2000) {
        let (spec, n) = [("named:sqrt2", 1), ("named:e", 3), ("named:cbrt2", 2)][pick];
        let s = seq(spec, n, x0);
        prop_assert_eq!(&s.points[0].norm, &BigInt::from(1));
        for w in s.points.windows(2) {
            prop_assert!(w[0].norm < w[1].norm);
            prop_assert!(w[1].residual.hi() < w[0].residual.lo());
        }
    }
}
