use ahscatter::ring::{int, laurent_coeff, rat, series_reciprocal, Poly, RatFunc, Rational, XSeries};
use proptest::prelude::*;

fn small_rat() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=6).prop_map(|(p, q)| rat(p, q))
}

fn poly(max_deg: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(small_rat(), 1..=max_deg + 1).prop_map(Poly::new)
}

fn nonzero_poly(max_deg: usize) -> impl Strategy<Value = Poly> {
    poly(max_deg).prop_filter("nonzero", |p| !p.is_zero())
}

fn ratfunc() -> impl Strategy<Value = RatFunc> {
    (poly(3), nonzero_poly(2)).prop_map(|(p, q)| RatFunc::new(p, q).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quotient_times_inverse_is_one(a in ratfunc(), b in ratfunc()) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        let q = &a / &b;
        let inv = &b / &a;
        prop_assert_eq!(&q * &inv, RatFunc::one());
    }

    #[test]
    fn distributivity(a in ratfunc(), b in ratfunc(), c in ratfunc()) {
        let lhs = &a * &(&b + &c);
        let rhs = &(&a * &b) + &(&a * &c);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn canonical_denominator_is_monic(a in ratfunc()) {
        prop_assert_eq!(a.denominator().lead(), int(1));
        let g = a.numerator().gcd(a.denominator());
        prop_assert_eq!(g.degree(), Some(0));
    }

    #[test]
    fn gcd_divides_both(p in nonzero_poly(4), q in nonzero_poly(3), r in nonzero_poly(2)) {
        let a = &p * &r;
        let b = &q * &r;
        let g = a.gcd(&b);
        prop_assert!(a.div_rem(&g).1.is_zero());
        prop_assert!(b.div_rem(&g).1.is_zero());
        prop_assert!(g.div_rem(&r.monic()).1.is_zero());
    }

    #[test]
    fn laurent_reconstruction_removes_the_pole(
        num in nonzero_poly(3),
        root in small_rat(),
        order in 1usize..=3,
        other in nonzero_poly(1),
    ) {
        let den = &Poly::linear_root(&root).pow(order as u32) * &other;
        let f = RatFunc::new(num, den).unwrap();
        let q = f.pole_order(&root);
        let mut g = f.clone();
        for p in 1..=q {
            let c = laurent_coeff(&f, &root, p);
            let term = RatFunc::new(Poly::constant(c), Poly::linear_root(&root).pow(p as u32)).unwrap();
            g = &g - &term;
        }
        prop_assert!(g.is_regular_at(&root));
    }

    #[test]
    fn series_reciprocal_round_trip(tail in prop::collection::vec(small_rat(), 0..8), lead in small_rat(), order in 0usize..8) {
        prop_assume!(lead != int(0));
        let mut coeffs = vec![lead];
        coeffs.extend(tail);
        let s = XSeries::new(coeffs, order);
        let r = series_reciprocal(&s).unwrap();
        let prod = s.mul(&r);
        prop_assert_eq!(prod, XSeries::one(order));
    }
}
