//! Symmetric cyclic tridiagonal matrices.
//!
//! Periodic second-order discretizations on a uniform loop produce matrices
//! that are tridiagonal except for the two corner entries coupling the first
//! and last unknowns. [`CyclicTridiag`] stores the diagonal and the `n`
//! off-diagonal couplings `(i, i+1 mod n)`; symmetry holds by construction.
//!
//! [`CyclicLdl`] is a bordered LDLᵀ factorization without pivoting: the
//! leading `(n-1)×(n-1)` block is an ordinary tridiagonal LDLᵀ and the last
//! row/column is eliminated through its Schur complement. The pivots give the
//! inertia (Sylvester), which is what the Sturm-count bisection needs, and the
//! factorization doubles as an O(n) solver for inverse iteration.

#[derive(Debug, Clone, PartialEq)]
pub struct CyclicTridiag {
    diag: Vec<f64>,
    /// `off[i]` couples `i` and `(i + 1) % n`.
    off: Vec<f64>,
}

impl CyclicTridiag {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(diag.len(), off.len(), "diag/off length mismatch");
        assert!(diag.len() >= 3, "cyclic tridiagonal needs n >= 3");
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        assert_eq!(x.len(), n);
        (0..n)
            .map(|i| {
                let prev = (i + n - 1) % n;
                let next = (i + 1) % n;
                self.diag[i] * x[i] + self.off[i] * x[next] + self.off[prev] * x[prev]
            })
            .collect()
    }

    /// `self - sigma * other`.
    pub fn shifted(&self, sigma: f64, other: &CyclicTridiag) -> CyclicTridiag {
        assert_eq!(self.len(), other.len());
        let diag = self.diag.iter().zip(&other.diag).map(|(a, b)| a - sigma * b).collect();
        let off = self.off.iter().zip(&other.off).map(|(a, b)| a - sigma * b).collect();
        CyclicTridiag { diag, off }
    }

    /// Largest absolute row sum; used to scale pivot guards.
    pub fn norm_inf(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| self.diag[i].abs() + self.off[i].abs() + self.off[(i + n - 1) % n].abs())
            .fold(0.0, f64::max)
    }

    /// Dense row-major expansion (tests and small problems only).
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            let j = (i + 1) % n;
            a[i][i] = self.diag[i];
            a[i][j] = self.off[i];
            a[j][i] = self.off[i];
        }
        a
    }

    pub fn factor(&self) -> CyclicLdl {
        CyclicLdl::new(self)
    }
}

/// Bordered LDLᵀ of a [`CyclicTridiag`].
#[derive(Debug, Clone)]
pub struct CyclicLdl {
    /// Pivots of the leading block followed by the Schur pivot.
    pivots: Vec<f64>,
    /// Multipliers of the leading tridiagonal block, `l[i]` = L(i+1, i).
    lower: Vec<f64>,
    /// Border row `g` of the unit lower factor.
    border: Vec<f64>,
}

impl CyclicLdl {
    fn new(a: &CyclicTridiag) -> Self {
        let n = a.len();
        let m = n - 1;
        let pivmin = f64::EPSILON * f64::EPSILON * a.norm_inf().max(f64::MIN_POSITIVE);
        let guard = |d: f64| if d.abs() < pivmin { -pivmin } else { d };

        let mut pivots = Vec::with_capacity(n);
        let mut lower = Vec::with_capacity(m.saturating_sub(1));
        let mut d = guard(a.diag[0]);
        pivots.push(d);
        for i in 0..m - 1 {
            let l = a.off[i] / d;
            lower.push(l);
            d = guard(a.diag[i + 1] - l * a.off[i]);
            pivots.push(d);
        }

        // Border column b: b[0] couples 0 with n-1, b[m-1] couples n-2 with n-1.
        let mut y = vec![0.0; m];
        y[0] = a.off[n - 1];
        y[m - 1] += a.off[n - 2];
        for i in 0..m - 1 {
            y[i + 1] -= lower[i] * y[i];
        }
        let mut schur = a.diag[n - 1];
        let mut border = Vec::with_capacity(m);
        for i in 0..m {
            let g = y[i] / pivots[i];
            schur -= g * y[i];
            border.push(g);
        }
        pivots.push(guard(schur));
        Self { pivots, lower, border }
    }

    /// Number of negative eigenvalues of the factored matrix.
    pub fn negative_count(&self) -> usize {
        self.pivots.iter().filter(|d| **d < 0.0).count()
    }

    pub fn pivots(&self) -> &[f64] {
        &self.pivots
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.pivots.len();
        let m = n - 1;
        assert_eq!(rhs.len(), n);
        let mut w = rhs.to_vec();
        for i in 0..m - 1 {
            w[i + 1] -= self.lower[i] * w[i];
        }
        let mut last = w[m];
        for i in 0..m {
            last -= self.border[i] * w[i];
        }
        for i in 0..m {
            w[i] /= self.pivots[i];
        }
        let x_last = last / self.pivots[m];
        let mut x = vec![0.0; n];
        x[m] = x_last;
        x[m - 1] = w[m - 1] - self.border[m - 1] * x_last;
        for i in (0..m - 1).rev() {
            x[i] = w[i] - self.border[i] * x_last - self.lower[i] * x[i + 1];
        }
        x
    }
}
