//! Periodic cubic splines on (possibly non-uniform) knots.

use crate::linalg::CyclicTridiag;

#[derive(Debug, Clone)]
pub struct PeriodicSpline {
    knots: Vec<f64>,
    values: Vec<f64>,
    /// Second derivatives at the knots.
    curvature: Vec<f64>,
    period: f64,
}

impl PeriodicSpline {
    /// `knots` strictly increasing inside `[knots[0], knots[0] + period)`.
    pub fn new(knots: Vec<f64>, values: Vec<f64>, period: f64) -> Self {
        let n = knots.len();
        assert_eq!(n, values.len());
        assert!(n >= 3, "periodic spline needs at least 3 knots");
        let gap = |i: usize| {
            if i + 1 < n {
                knots[i + 1] - knots[i]
            } else {
                knots[0] + period - knots[n - 1]
            }
        };
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            let prev = (i + n - 1) % n;
            let next = (i + 1) % n;
            let (hp, hn) = (gap(prev), gap(i));
            assert!(hp > 0.0 && hn > 0.0, "knots must be strictly increasing");
            diag[i] = 2.0 * (hp + hn);
            off[i] = hn;
            rhs[i] = 6.0 * ((values[next] - values[i]) / hn - (values[i] - values[prev]) / hp);
        }
        let curvature = CyclicTridiag::new(diag, off).factor().solve(&rhs);
        Self { knots, values, curvature, period }
    }

    /// Uniform knots `t0 + i * period / n`.
    pub fn uniform(t0: f64, values: Vec<f64>, period: f64) -> Self {
        let n = values.len();
        let knots = (0..n).map(|i| t0 + period * i as f64 / n as f64).collect();
        Self::new(knots, values, period)
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    fn locate(&self, t: f64) -> (usize, f64, f64) {
        let n = self.knots.len();
        let t0 = self.knots[0];
        let mut u = (t - t0).rem_euclid(self.period) + t0;
        if u >= t0 + self.period {
            u = t0;
        }
        let i = match self.knots.binary_search_by(|k| k.total_cmp(&u)) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let h = if i + 1 < n { self.knots[i + 1] - self.knots[i] } else { t0 + self.period - self.knots[i] };
        (i, u - self.knots[i], h)
    }

    fn segment(&self, i: usize) -> (f64, f64, f64, f64) {
        let j = (i + 1) % self.knots.len();
        (self.values[i], self.values[j], self.curvature[i], self.curvature[j])
    }

    pub fn value(&self, t: f64) -> f64 {
        let (i, x, h) = self.locate(t);
        let (y0, y1, m0, m1) = self.segment(i);
        let a = (h - x) / h;
        let b = x / h;
        a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let (i, x, h) = self.locate(t);
        let (y0, y1, m0, m1) = self.segment(i);
        let a = (h - x) / h;
        let b = x / h;
        (y1 - y0) / h - (3.0 * a * a - 1.0) * h * m0 / 6.0 + (3.0 * b * b - 1.0) * h * m1 / 6.0
    }

    pub fn second_derivative(&self, t: f64) -> f64 {
        let (i, x, h) = self.locate(t);
        let (_, _, m0, m1) = self.segment(i);
        m0 + (m1 - m0) * x / h
    }

    /// Knot interval index and local offset of `t`.
    pub fn knot_interval(&self, t: f64) -> (usize, f64, f64) {
        self.locate(t)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }
}
