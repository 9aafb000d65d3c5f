//! Fehlberg 7(8) embedded Runge–Kutta, propagating the eighth-order solution.

use num_complex::Complex;

use crate::real::{ComplexExt, Real};

const STAGES: usize = 13;

const C: [(i64, i64); STAGES] = [
    (0, 1),
    (2, 27),
    (1, 9),
    (1, 6),
    (5, 12),
    (1, 2),
    (5, 6),
    (1, 6),
    (2, 3),
    (1, 3),
    (1, 1),
    (0, 1),
    (1, 1),
];

#[rustfmt::skip]
const A: [&[(i64, i64)]; STAGES] = [
    &[],
    &[(2, 27)],
    &[(1, 36), (1, 12)],
    &[(1, 24), (0, 1), (1, 8)],
    &[(5, 12), (0, 1), (-25, 16), (25, 16)],
    &[(1, 20), (0, 1), (0, 1), (1, 4), (1, 5)],
    &[(-25, 108), (0, 1), (0, 1), (125, 108), (-65, 27), (125, 54)],
    &[(31, 300), (0, 1), (0, 1), (0, 1), (61, 225), (-2, 9), (13, 900)],
    &[(2, 1), (0, 1), (0, 1), (-53, 6), (704, 45), (-107, 9), (67, 90), (3, 1)],
    &[(-91, 108), (0, 1), (0, 1), (23, 108), (-976, 135), (311, 54), (-19, 60), (17, 6), (-1, 12)],
    &[(2383, 4100), (0, 1), (0, 1), (-341, 164), (4496, 1025), (-301, 82), (2133, 4100), (45, 82), (45, 164), (18, 41)],
    &[(3, 205), (0, 1), (0, 1), (0, 1), (0, 1), (-6, 41), (-3, 205), (-3, 41), (3, 41), (6, 41), (0, 1)],
    &[(-1777, 4100), (0, 1), (0, 1), (-341, 164), (4496, 1025), (-289, 82), (2193, 4100), (51, 82), (33, 164), (12, 41), (0, 1), (1, 1)],
];

const B8: [(i64, i64); STAGES] = [
    (0, 1),
    (0, 1),
    (0, 1),
    (0, 1),
    (0, 1),
    (34, 105),
    (9, 35),
    (9, 35),
    (9, 280),
    (9, 280),
    (0, 1),
    (41, 840),
    (41, 840),
];

/// Coefficients converted once to the working type.
pub struct Tableau<T> {
    c: [T; STAGES],
    a: Vec<Vec<T>>,
    b: [T; STAGES],
    err: T,
}

impl<T: Real> Tableau<T> {
    pub fn new() -> Self {
        let conv = |(p, q): (i64, i64)| T::from_ratio(p, q);
        Tableau {
            c: C.map(conv),
            a: A.iter().map(|row| row.iter().copied().map(conv).collect()).collect(),
            b: B8.map(conv),
            err: T::from_ratio(41, 840),
        }
    }
}

impl<T: Real> Default for Tableau<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// A linear system `y' = f(x, y)` in `DIM` complex unknowns.
pub trait System<T: Real, const DIM: usize> {
    fn rhs(&self, x: T, y: &[Complex<T>; DIM]) -> [Complex<T>; DIM];
    /// Error weight groups: component `i` is measured against the size of
    /// its group.
    fn group(&self, i: usize) -> usize;
}

#[derive(Clone, Copy, Debug)]
pub struct StepOutcome<T> {
    pub x: T,
    pub h_next: T,
}

/// One attempted step; returns `Ok(new_y, err_norm)`.
pub fn try_step<T: Real, const DIM: usize, S: System<T, DIM>>(
    sys: &S,
    tab: &Tableau<T>,
    x: T,
    y: &[Complex<T>; DIM],
    h: T,
    rtol: T,
) -> ([Complex<T>; DIM], f64) {
    let zero = Complex::new(T::zero(), T::zero());
    let mut k = [[zero; DIM]; STAGES];
    for s in 0..STAGES {
        let mut ys = *y;
        for (j, aij) in tab.a[s].iter().enumerate() {
            if aij.is_zero() {
                continue;
            }
            let f = *aij * h;
            for i in 0..DIM {
                ys[i] = ys[i] + k[j][i].scale(f);
            }
        }
        k[s] = sys.rhs(x + tab.c[s] * h, &ys);
    }
    let mut out = *y;
    for s in 0..STAGES {
        if tab.b[s].is_zero() {
            continue;
        }
        let f = tab.b[s] * h;
        for i in 0..DIM {
            out[i] = out[i] + k[s][i].scale(f);
        }
    }
    // Component scales per group.
    let mut scale = [0.0f64; DIM];
    for i in 0..DIM {
        let g = sys.group(i);
        let m = y[i].abs_r().to_f64().max(out[i].abs_r().to_f64());
        scale[g] = scale[g].max(m);
    }
    let mut worst = 0.0f64;
    let ef = tab.err * h;
    for i in 0..DIM {
        let e = (k[0][i] + k[10][i] - k[11][i] - k[12][i]).scale(ef);
        let sc = scale[sys.group(i)] * rtol.to_f64();
        let r = if sc > 0.0 { e.abs_r().to_f64() / sc } else { 0.0 };
        worst = worst.max(r);
    }
    (out, worst)
}

/// Step size update from an error norm.
pub fn next_h<T: Real>(h: T, err: f64) -> T {
    let factor = if err == 0.0 { 4.0 } else { (0.9 * err.powf(-1.0 / 8.0)).clamp(0.2, 4.0) };
    h * T::from_f64(factor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::DoubleDouble;

    /// y'' = -y as a first-order system.
    struct Osc;
    impl<T: Real> System<T, 2> for Osc {
        fn rhs(&self, _x: T, y: &[Complex<T>; 2]) -> [Complex<T>; 2] {
            [y[1], -y[0]]
        }
        fn group(&self, _i: usize) -> usize {
            0
        }
    }

    fn run<T: Real>(rtol: f64) -> (T, usize) {
        let tab = Tableau::<T>::new();
        let mut x = T::zero();
        let mut y = [Complex::new(T::zero(), T::zero()), Complex::new(T::one(), T::zero())];
        let end = T::from_f64(3.0);
        let mut h = T::from_f64(0.1);
        let mut steps = 0;
        while (end - x).to_f64() > 0.0 {
            if (x + h - end).to_f64() > 0.0 {
                h = end - x;
            }
            let (ny, err) = try_step(&Osc, &tab, x, &y, h, T::from_f64(rtol));
            if err <= 1.0 {
                x += h;
                y = ny;
                steps += 1;
            }
            h = next_h(h, err);
        }
        ((y[0].re - T::from_f64(3.0).sin_cos().0).abs(), steps)
    }

    #[test]
    fn eighth_order_accuracy() {
        let (err, steps) = run::<f64>(1e-12);
        assert!(err < 1e-11, "{err}");
        assert!(steps < 60, "{steps}");
        let (err, _) = run::<DoubleDouble>(1e-24);
        assert!(err.to_f64() < 1e-22, "{err:?}");
    }

    #[test]
    fn tableau_rows_sum_to_nodes() {
        let tab = Tableau::<f64>::new();
        for s in 0..STAGES {
            let sum: f64 = tab.a[s].iter().sum();
            assert!((sum - tab.c[s]).abs() < 1e-14, "row {s}");
        }
        let bsum: f64 = tab.b.iter().sum();
        assert!((bsum - 1.0).abs() < 1e-15);
    }
}
