use num_rational::BigRational;
use num_traits::Zero;

use diolab::battery::FOURTH_ROOT_OF_TWO;
use diolab::certify::{run_scenario, successive_minima, Scenario, ScenarioParams, Verdict};
use diolab::linalg::dot;
use diolab::minimal_points::{compute_minimal_sequence, MinimalSequence};
use diolab::real_field::parse_xi;

fn seq(spec: &str, n: usize, x0_max: u64) -> MinimalSequence {
    compute_minimal_sequence(&parse_xi(spec).unwrap(), n, x0_max).unwrap()
}

fn params(m: usize) -> ScenarioParams {
    ScenarioParams {
        m,
        ..ScenarioParams::default()
    }
}

#[test]
fn wedge_bound_passes_on_every_m() {
    let s = seq("named:e", 3, 5000);
    for m in 0..=3 {
        let out = run_scenario(&s, Scenario::Wedge, &params(m)).unwrap();
        assert_eq!(out.summary.verdict, Verdict::Pass, "m = {m}: {}", out.summary.details);
    }
}

#[test]
fn quartic_data_scenarios() {
    let s = seq(FOURTH_ROOT_OF_TWO, 3, 5000);
    let rank = run_scenario(&s, Scenario::Rank, &params(1)).unwrap();
    assert!(!rank.rows.is_empty());
    let nonvanishing = run_scenario(&s, Scenario::Nonvanishing, &params(1)).unwrap();
    for r in &nonvanishing.rows {
        assert!(!r.details.starts_with("wedges 0, 0"), "{:?}", r.indices);
    }
    let mink = run_scenario(&s, Scenario::Minkowski, &params(1)).unwrap();
    assert!(mink.rows.iter().all(|r| r.verdict != Verdict::Fail || r.details.contains("ceiling")));
}

#[test]
fn threshold_vectors_are_orthogonal() {
    let s = seq("named:cbrt2", 2, 20_000);
    let out = run_scenario(&s, Scenario::Threshold, &params(1)).unwrap();
    assert_ne!(out.summary.verdict, Verdict::Fail, "{}", out.summary.details);
    assert!(!out.rows.is_empty());
}

#[test]
fn growth_runs_with_given_exponent() {
    let s = seq("named:sqrt2", 1, 100_000);
    let p = ScenarioParams {
        lambda: Some(1.0),
        ..params(0)
    };
    let out = run_scenario(&s, Scenario::Growth, &p).unwrap();
    assert!(!out.rows.is_empty());
    assert!(out.rows.iter().all(|r| !r.ratios.is_empty()));
}

#[test]
fn successive_minima_products() {
    for spec in ["named:sqrt2", "named:golden", "named:e"] {
        let xi = parse_xi(spec).unwrap();
        for k in 1..=2 {
            let r = successive_minima(&xi, k, &BigRational::from_integer(10.into())).unwrap();
            assert!(r.report.passed(), "{spec} k = {k}: {}", r.report.details);
            assert_eq!(r.minima.len(), k + 1);
            assert_eq!(r.vectors.len(), k + 1);
        }
    }
}

#[test]
fn orthogonal_lattice_through_public_api() {
    let s = seq("named:e", 2, 2000);
    let x = &s.points.last().unwrap().coords;
    let lat = diolab::lattice::IntegerLattice::orthogonal_to(std::slice::from_ref(x), 3).unwrap();
    assert_eq!(lat.rank, 2);
    for b in &lat.basis {
        assert!(dot(b, x).is_zero());
    }
    let a = lat.shortest_vector(diolab::lattice::ENUMERATION_BUDGET).unwrap();
    assert!(lat.contains(&a));
}
