use ahscatter::gz::{apply_d_lambda, evenness_order, gz_solve, scattering_residues, Evenness, WarpedMetricJet};
use ahscatter::ring::{int, rat, Poly, Rational};
use proptest::prelude::*;

fn small_rat() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=5).prop_map(|(p, q)| rat(p, q))
}

/// `1 + Σ w_j x^j` with odd coefficients zero below `2k+1` and `w_{2k+1} = c ≠ 0`.
fn even_metric(k: usize, order: usize) -> impl Strategy<Value = (Vec<Rational>, Rational)> {
    (
        prop::collection::vec(small_rat(), order),
        small_rat().prop_filter("c ≠ 0", |c| *c != int(0)),
    )
        .prop_map(move |(mut tail, c)| {
            for (j, t) in tail.iter_mut().enumerate() {
                let power = j + 1;
                if power % 2 == 1 && power < 2 * k + 1 {
                    *t = int(0);
                }
            }
            tail[2 * k] = c.clone();
            let mut w = vec![int(1)];
            w.extend(tail);
            (w, c)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn recursion_is_self_consistent(n in 1u32..=4, w in prop::collection::vec(small_rat(), 0..6)) {
        let mut coeffs = vec![int(1)];
        coeffs.extend(w);
        let m = WarpedMetricJet::from_coeffs(n, coeffs, 6).unwrap();
        let sol = gz_solve(&m).unwrap();
        prop_assert!(apply_d_lambda(&sol.f, &m).is_zero());
        for (j, p) in sol.p.iter().enumerate() {
            prop_assert!(p.degree().map_or(true, |d| d <= j / 2), "L-degree of p_{}", j);
        }
    }

    #[test]
    fn poles_sit_on_the_indicial_lattice(n in 1u32..=4, w in prop::collection::vec(small_rat(), 0..5)) {
        let mut coeffs = vec![int(1)];
        coeffs.extend(w);
        let m = WarpedMetricJet::from_coeffs(n, coeffs, 5).unwrap();
        let sol = gz_solve(&m).unwrap();
        for (j, p) in sol.p.iter().enumerate() {
            let mut lattice = Poly::one();
            for i in 1..=j {
                lattice = &lattice * &Poly::new(vec![int(-(n as i64) - i as i64), int(2)]);
            }
            for c in p.coeffs() {
                prop_assert!(lattice.div_rem(c.denominator()).1.is_zero(), "p_{} has a stray pole", j);
            }
        }
    }

    #[test]
    fn residue_identities_hold_exactly(
        n in 2u32..=4,
        (k, (w, _c)) in (0usize..=1).prop_flat_map(|k| (Just(k), even_metric(k, 2 * k + 3))),
    ) {
        let order = 2 * k + 3;
        let m = WarpedMetricJet::from_coeffs(n, w, order).unwrap();
        prop_assert!(evenness_order(m.w()).at_least(k));
        let r = scattering_residues(&m, k).unwrap();
        prop_assert!(r.checks.lower_residues_vanish);
        prop_assert!(r.checks.leading_residue_matches);
        prop_assert!(r.checks.symbol_matches);
        prop_assert_eq!(r.checks.symbol_vanishes, r.checks.vanishing_condition_holds);
    }

    #[test]
    fn odd_perturbation_breaks_evenness(k in 0usize..=2, c in small_rat()) {
        prop_assume!(c != int(0));
        let mut w = vec![int(1), int(0), rat(-1, 2), int(0), rat(1, 16), int(0), int(0)];
        w[2 * k + 1] = c;
        let m = WarpedMetricJet::from_coeffs(2, w, 6).unwrap();
        prop_assert_eq!(evenness_order(m.w()), Evenness::Finite(k));
        let sol = gz_solve(&m).unwrap();
        prop_assert!(!sol.p[2 * k + 1].is_zero());
    }
}
