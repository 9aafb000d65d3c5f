//! The Gamma-ratio formula for the hyperbolic ball, checked against the
//! numeric pipeline before it is used as an oracle elsewhere.

use ahscatter::radial::{connection_coeffs, half_lattice_distance, ConnectionOptions, ModeParams, RadialProfile};
use ahscatter::real::Precision;
use ahscatter::special::{c_lambda, hyperbolic_mode_s};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn formula_agrees_with_mpmath() {
    // 30-digit mpmath evaluations of the same closed form
    let frozen = [
        (2, 0, c(0.3, 0.4), c(-2.2435710779847472681, 1.3895298933090113337)),
        (3, 5, c(0.8, 1.1), c(0.27397998439234282397, 0.061444754050936876144)),
        (2, 10, c(1.7, -2.0), c(-3.5370081569126871235, 1.2428728346651845183)),
        (3, 2, c(-0.6, 0.25), c(-0.024489510144774835257, 0.16721885327648310062)),
    ];
    for (n, l, lam, want) in frozen {
        let got = hyperbolic_mode_s(n, l, lam);
        assert!((got - want).norm() / want.norm() < 1e-12, "n={n} l={l} λ={lam}: {got}");
    }
}

#[test]
fn formula_agrees_with_the_integrator_at_twenty_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let opts = ConnectionOptions {
        precision: Precision::Dd,
        ..Default::default()
    };
    let mut checked = 0;
    while checked < 20 {
        let n = rng.gen_range(2..=3u32);
        let l = rng.gen_range(0..=10u32);
        let lam = c(rng.gen_range(-1.0..n as f64 + 1.0), rng.gen_range(-3.0..3.0));
        if half_lattice_distance(n, lam) <= 0.1 {
            continue;
        }
        let d = connection_coeffs(&RadialProfile::hyperbolic(n), &ModeParams::new(n, l, lam), &opts).unwrap();
        let want = hyperbolic_mode_s(n, l, lam);
        let rel = (d.s - want).norm() / want.norm();
        assert!(rel < 1e-12, "n={n} l={l} λ={lam}: rel {rel:e}");
        checked += 1;
    }
}

#[test]
fn large_l_follows_the_principal_symbol() {
    // S_l(λ) / (c(λ)(1+v_l)^(λ-n/2)) → 1
    let lam = c(0.8, 0.6);
    let n = 2;
    let dev = |l: u32| {
        let v = (l * (l + n - 1)) as f64;
        let s = hyperbolic_mode_s(n, l, lam);
        let sym = c_lambda(n, lam) * Complex64::new(1.0 + v, 0.0).powc(lam - n as f64 / 2.0);
        (s / sym - 1.0).norm()
    };
    let (d10, d40, d160) = (dev(10), dev(40), dev(160));
    assert!(d40 < d10 && d160 < d40 && d160 < 0.01, "{d10} {d40} {d160}");
}
