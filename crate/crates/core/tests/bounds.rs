use std::cmp::Ordering;

use num_rational::BigRational;
use proptest::prelude::*;

use diolab::bounds::{
    approx, best_bound, bound_cubic, bound_even_t, bound_laurent_schleischitz, bound_table, cubic_crossover,
    BoundKind,
};
use diolab::exponents::{delta_k, Assumptions};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[test]
fn delta_examples() {
    assert_eq!(delta_k(1, &q(1, 1)).unwrap(), q(1, 1));
    assert_eq!(delta_k(2, &q(7, 3)).unwrap(), q(3, 2));
    assert_eq!(delta_k(1, &q(2, 1)).unwrap(), q(1, 2));
    assert!(delta_k(3, &q(1, 1)).is_err());
}

#[test]
fn table_for_four_prefers_even_bound() {
    let (rows, best) = bound_table(4, None).unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[best].kind, BoundKind::EvenT);
    let tau = rows.iter().find(|r| r.kind == BoundKind::LaurentSchleischitz).unwrap();
    assert!((approx(tau.value.as_ref().unwrap()) - 0.371).abs() < 1e-3);
}

#[test]
fn assumptions_change_the_winner() {
    let a = Assumptions::new(1, q(1, 1));
    let b = best_bound(3, Some(&a)).unwrap();
    assert_eq!(b.kind, BoundKind::Cubic);
    let b = best_bound(5, Some(&a)).unwrap();
    assert!((approx(b.value.as_ref().unwrap()) - 0.2808).abs() < 1e-4);
    // the cubic is 1/4 at λ = 1/2 for every ω₁, so the root stays below 1/2
    let c = bound_cubic(&q(50, 1)).unwrap().value.unwrap();
    assert_eq!(c.cmp_rational(&q(1, 2)), Ordering::Less);
    let base = bound_cubic(&q(1, 1)).unwrap().value.unwrap();
    assert_eq!(c.cmp_value(&base), Ordering::Greater);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn even_bound_below_odd_neighbour(m in 2u32..90) {
        let t = bound_even_t(m).unwrap().value.unwrap();
        let tau = bound_laurent_schleischitz(2 * m).unwrap().value.unwrap();
        prop_assert_eq!(t.cmp_value(&tau), Ordering::Less);
    }

    #[test]
    fn crossover_inverts_the_cubic(num in 4240i64..4500) {
        let lambda = q(num, 10_000);
        let w = cubic_crossover(&lambda).unwrap();
        prop_assert!(w >= q(1, 1));
        let v = bound_cubic(&w).unwrap().value.unwrap();
        prop_assert_eq!(v.cmp_rational(&lambda), Ordering::Equal);
    }
}
