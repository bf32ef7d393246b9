use cfbound::rational::{int, pow10, ratio};
use cfbound::{
    check_functional_equation, eval_directed, eval_enclosure, evaluate, tail_enclosure, theorem_bound, BigRational,
    CfPoint, EvalConfig,
};
use proptest::prelude::*;

fn point(m_num: i64, m_den: i64, l_num: i64, l_den: i64) -> CfPoint {
    CfPoint::new(ratio(m_num, m_den), ratio(l_num, l_den)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tighter_tolerance_nests(m in 0i64..40, md in 1i64..9, l in 1i64..60, ld in 1i64..9) {
        let p = point(m, md, l, ld);
        let coarse = eval_enclosure(&p, &pow10(-6), 10_000).unwrap();
        let fine = eval_enclosure(&p, &pow10(-14), 10_000).unwrap();
        prop_assert!(fine.is_subset_of(&coarse));
        prop_assert!(fine.width() <= pow10(-14));
    }

    #[test]
    fn truncation_depth_nests(m in 0i64..40, md in 1i64..9, l in 1i64..60, ld in 1i64..9, d in 1usize..30) {
        let p = point(m, md, l, ld);
        let a = tail_enclosure(&p, d).unwrap();
        let b = tail_enclosure(&p, d + 1).unwrap();
        prop_assert!(b.is_subset_of(&a));
    }

    #[test]
    fn directed_agrees_with_exact(m in 0i64..20, md in 1i64..5, l in 1i64..40, ld in 1i64..9) {
        let p = point(m, md, l, ld);
        let tol = pow10(-12);
        let exact = eval_enclosure(&p, &tol, 10_000).unwrap();
        let directed = eval_directed(&p, &tol, 128, 10_000).unwrap();
        prop_assert!(exact.intersects(&directed));
    }

    #[test]
    fn bound_sits_between_consecutive_orders(m in 0i64..30, md in 1i64..5, l in 1i64..40, ld in 1i64..9) {
        let p = point(m, md, l, ld);
        let cfg = EvalConfig::default();
        let tol = pow10(-10);
        let g = evaluate(&p, &tol, &cfg).unwrap();
        let g_next = evaluate(&p.shifted(), &tol, &cfg).unwrap();
        let b = theorem_bound(&p, &tol).enclosure();
        // consistency only: the lower ends cannot cross the upper ends
        prop_assert!(g.lo <= b.hi);
        prop_assert!(b.lo <= g_next.hi);
    }

    #[test]
    fn functional_equation_never_disjoint(m in -9i64..40, l in 1i64..60, ld in 1i64..9) {
        let p = CfPoint::new(ratio(m, 10), ratio(l, ld)).unwrap();
        let r = check_functional_equation(&p, &pow10(-12), &EvalConfig::default());
        prop_assert!(r.is_ok(), "{r:?}");
    }

    #[test]
    fn value_positive_for_nonnegative_m(m in 0i64..40, l in 1i64..200, ld in 1i64..50) {
        let p = CfPoint::new(int(m), ratio(l, ld)).unwrap();
        let g = evaluate(&p, &pow10(-8), &EvalConfig::default()).unwrap();
        prop_assert!(g.lo > BigRational::from_integer(0.into()));
    }
}
