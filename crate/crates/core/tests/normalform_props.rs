use ahscatter::normalform::{omega_jet, residual, FourierJet};
use num_complex::Complex64;
use proptest::prelude::*;

const Q: usize = 8;

/// Real trigonometric polynomial of degree ≤ `deg` with modes bounded by `amp`.
fn real_modes(deg: usize, amp: f64) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-amp..amp, -amp..amp), deg).prop_map(move |pairs| {
        let mut row = vec![Complex64::new(0.0, 0.0); 2 * Q + 1];
        for (q, (re, im)) in pairs.into_iter().enumerate() {
            let z = Complex64::new(re, im);
            row[Q + q + 1] = z;
            row[Q - q - 1] = z.conj();
        }
        row
    })
}

/// `w` positive at `x = 0`, with odd orders below `2k+1` removed.
fn w_jet(order: usize, k: usize) -> impl Strategy<Value = FourierJet> {
    prop::collection::vec(real_modes(2, 0.1), order + 1).prop_map(move |rows| {
        let mut w = FourierJet::from_modes(Q, rows).unwrap();
        w.set(0, 0, Complex64::new(1.0, 0.0));
        for m in (1..2 * k + 1).step_by(2) {
            for q in -(Q as i64)..=Q as i64 {
                w.set(m, q, Complex64::new(0.0, 0.0));
            }
        }
        w
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn constant_boundary_value_gives_constant_jet(w in w_jet(8, 0), c in -2.0f64..2.0) {
        let mut om0 = vec![Complex64::new(0.0, 0.0); 2 * Q + 1];
        om0[Q] = Complex64::new(c, 0.0);
        let jet = omega_jet(&w, &om0, 8).unwrap();
        for m in 1..=8 {
            prop_assert!(jet.max_modulus(m) < 1e-12);
        }
    }

    #[test]
    fn odd_orders_vanish_for_even_metrics(
        (k, w) in (1usize..=2).prop_flat_map(|k| (Just(k), w_jet(10, k))),
        om0 in real_modes(3, 0.3),
    ) {
        let jet = omega_jet(&w, &om0, 10).unwrap();
        for m in (1..=2 * k + 1).step_by(2) {
            prop_assert!(jet.max_modulus(m) < 1e-10, "order {}: {}", m, jet.max_modulus(m));
        }
        prop_assert!(residual(&w, &jet).unwrap() < 1e-10);
        prop_assert!(jet.reality_defect() < 1e-12);
    }

    #[test]
    fn raising_the_order_keeps_lower_coefficients(w in w_jet(10, 0), om0 in real_modes(3, 0.3)) {
        let a = omega_jet(&w, &om0, 8).unwrap();
        let b = omega_jet(&w, &om0, 10).unwrap();
        for m in 0..=8 {
            for q in -(Q as i64)..=Q as i64 {
                prop_assert!((a.get(m, q) - b.get(m, q)).norm() < 1e-12);
            }
        }
    }
}
