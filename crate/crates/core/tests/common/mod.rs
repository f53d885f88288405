#![allow(dead_code)]

use std::sync::OnceLock;

use shrinkspec::geometry::RadialDensity;
use shrinkspec::shrinker::{shoot_torus, ShooterConfig, TorusShot};

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
    }
    // Split first so periodic integrands do not fool the initial estimate.
    let pieces = 16;
    let w = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let (x0, x1) = (a + i as f64 * w, a + (i + 1) as f64 * w);
            let (f0, f1) = (f(x0), f(x1));
            let (m, fm, whole) = simpson(f, x0, f0, x1, f1);
            recurse(f, x0, f0, x1, f1, m, fm, whole, tol / pieces as f64, 50)
        })
        .sum()
}

/// Shot torus for `C = −1` at `N = 1024`, computed once per test binary.
pub fn shot_torus_1024() -> &'static TorusShot {
    static SHOT: OnceLock<TorusShot> = OnceLock::new();
    SHOT.get_or_init(|| shoot_torus(&ShooterConfig::for_c(-1.0), 1024).expect("shooting succeeds"))
}

pub fn gaussian(c: f64) -> RadialDensity {
    RadialDensity::gaussian_at_origin(0.0, c)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
