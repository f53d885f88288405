//! Rotationally symmetric self-shrinkers `H⃗ = C (F − p)^⊥`, `C < 0`.
//!
//! With the conventions of [`crate::geometry`] the profile equation reads
//!
//! ```text
//! ρ' = cos α,   z' = sin α,   α' = C (z cos α − ρ sin α) − sin α / ρ
//! ```
//!
//! for `p = 0`. Tori are found by shooting from the inner equator
//! `(r0, 0, π/2)` and asking for a perpendicular return to `z = 0`.

use nalgebra::Vector3;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use thiserror::Error;

use crate::exec::Execution;
use crate::geometry::{profile_curvature, GeometryError, ProfileCurve};

#[derive(Debug, Error)]
pub enum ShrinkerError {
    #[error("C must be negative for shrinkers (got {0})")]
    NonNegativeC(f64),
    #[error("invalid shooter configuration: {0}")]
    InvalidConfig(String),
    #[error("profile reached the rotation axis at s = {s} (rho = {rho:e})")]
    AxisSingularity { s: f64, rho: f64 },
    #[error("arc length exceeded s_max = {s_max} without returning to z = 0")]
    LengthExceeded { s_max: f64 },
    #[error("miss function has no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("root refinement did not converge: {0}")]
    NoConvergence(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// `(ρ, z, α)`.
pub type State = [f64; 3];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShooterConfig {
    #[serde(rename = "C")]
    pub c: f64,
    pub bracket: (f64, f64),
    pub h_ode: f64,
    pub tol_event: f64,
    pub tol_root: f64,
    pub s_max: f64,
    pub rho_min: f64,
    /// Number of uniformly spaced `r0` samples in the bracket scan.
    pub scan_samples: usize,
    /// Largest accepted `|miss|` at a refined root.
    pub miss_tol: f64,
    #[serde(skip)]
    pub exec: Execution,
}

impl ShooterConfig {
    /// Defaults scaled by the sphere radius `ℓ = √(2/−C)`, so that the
    /// shot profiles for `C` and `C/λ²` are exact homotheties.
    pub fn for_c(c: f64) -> Self {
        let ell = if c < 0.0 { (2.0 / -c).sqrt() } else { 1.0 };
        Self {
            c,
            bracket: (0.2 * ell, 1.3 * ell),
            h_ode: 1e-3 * ell,
            tol_event: 1e-13 * ell,
            tol_root: 1e-13 * ell,
            s_max: 20.0 * ell,
            rho_min: 1e-3 * ell,
            scan_samples: 64,
            miss_tol: 1e-8,
            exec: Execution::default(),
        }
    }

    /// Sphere radius `√(2/−C)`.
    pub fn sphere_radius(&self) -> f64 {
        (2.0 / -self.c).sqrt()
    }

    pub fn validate(&self) -> Result<(), ShrinkerError> {
        if !(self.c < 0.0) {
            return Err(ShrinkerError::NonNegativeC(self.c));
        }
        let (lo, hi) = self.bracket;
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            return Err(ShrinkerError::InvalidConfig(format!("bracket must satisfy 0 < lo < hi, got [{lo}, {hi}]")));
        }
        for (name, v) in [
            ("h_ode", self.h_ode),
            ("tol_event", self.tol_event),
            ("tol_root", self.tol_root),
            ("s_max", self.s_max),
            ("rho_min", self.rho_min),
            ("miss_tol", self.miss_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ShrinkerError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if self.scan_samples < 2 {
            return Err(ShrinkerError::InvalidConfig("scan_samples must be at least 2".into()));
        }
        Ok(())
    }
}

/// Right-hand side of the profile equation.
pub fn shrinker_ode_step(state: &State, c: f64, rho_min: f64) -> Result<State, ShrinkerError> {
    let [rho, z, alpha] = *state;
    if !(rho >= rho_min) {
        return Err(ShrinkerError::AxisSingularity { s: f64::NAN, rho });
    }
    let (sa, ca) = alpha.sin_cos();
    Ok([ca, sa, c * (z * ca - rho * sa) - sa / rho])
}

fn rhs(y: &State, c: f64) -> State {
    let (sa, ca) = y[2].sin_cos();
    [ca, sa, c * (y[1] * ca - y[0] * sa) - sa / y[0]]
}

fn rk4(y: &State, h: f64, c: f64) -> State {
    let add = |a: &State, k: &State, t: f64| [a[0] + t * k[0], a[1] + t * k[1], a[2] + t * k[2]];
    let k1 = rhs(y, c);
    let k2 = rhs(&add(y, &k1, 0.5 * h), c);
    let k3 = rhs(&add(y, &k2, 0.5 * h), c);
    let k4 = rhs(&add(y, &k3, h), c);
    let mut out = *y;
    for i in 0..3 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    ZReturn,
    AxisHit,
    LengthExceeded,
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub r0: f64,
    pub s: Vec<f64>,
    pub states: Vec<State>,
    pub termination: Termination,
}

impl Trajectory {
    pub fn last(&self) -> &State {
        self.states.last().expect("trajectory has at least the initial state")
    }

    pub fn end_s(&self) -> f64 {
        *self.s.last().expect("trajectory has at least the initial state")
    }

    /// `α_return + π/2` with unwrapped `α`; defined only for a z-return.
    pub fn miss(&self) -> Option<f64> {
        (self.termination == Termination::ZReturn).then(|| self.last()[2] + FRAC_PI_2)
    }

    pub fn into_result(self, s_max: f64) -> Result<Self, ShrinkerError> {
        match self.termination {
            Termination::ZReturn => Ok(self),
            Termination::AxisHit => {
                Err(ShrinkerError::AxisSingularity { s: self.end_s(), rho: self.last()[0] })
            }
            Termination::LengthExceeded => Err(ShrinkerError::LengthExceeded { s_max }),
        }
    }
}

/// RK4 from `(r0, 0, π/2)` with fixed step `h_ode` until the first downward
/// crossing of `z = 0` (refined by bisection on the step length), the axis
/// threshold `rho_min`, or `s_max`.
pub fn integrate_profile(config: &ShooterConfig, r0: f64) -> Result<Trajectory, ShrinkerError> {
    config.validate()?;
    if !(r0 > config.rho_min) {
        return Err(ShrinkerError::InvalidConfig(format!("r0 must exceed rho_min, got {r0}")));
    }
    let c = config.c;
    let h = config.h_ode;
    let mut y: State = [r0, 0.0, FRAC_PI_2];
    let mut steps = 0usize;
    let mut s = 0.0;
    let mut ss = vec![s];
    let mut states = vec![y];
    let termination = loop {
        if s >= config.s_max {
            break Termination::LengthExceeded;
        }
        let next = rk4(&y, h, c);
        if !(next[0] >= config.rho_min) || !next.iter().all(|v| v.is_finite()) {
            break Termination::AxisHit;
        }
        if y[1] > 0.0 && next[1] <= 0.0 {
            let (mut lo, mut hi) = (0.0, h);
            let mut hit = next;
            let mut tau = h;
            for _ in 0..200 {
                if hi - lo <= f64::EPSILON * h || hit[1].abs() <= config.tol_event {
                    break;
                }
                tau = 0.5 * (lo + hi);
                hit = rk4(&y, tau, c);
                if hit[1] > 0.0 {
                    lo = tau;
                } else {
                    hi = tau;
                }
            }
            ss.push(s + tau);
            states.push(hit);
            break Termination::ZReturn;
        }
        y = next;
        steps += 1;
        s = steps as f64 * h;
        ss.push(s);
        states.push(y);
    };
    Ok(Trajectory { r0, s: ss, states, termination })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScanPoint {
    pub r0: f64,
    pub miss: Option<f64>,
    pub termination: Termination,
}

/// Miss function on `scan_samples` uniform points of the bracket.
pub fn scan_miss(config: &ShooterConfig) -> Result<Vec<ScanPoint>, ShrinkerError> {
    config.validate()?;
    let (lo, hi) = config.bracket;
    let m = config.scan_samples;
    let out = config.exec.map_range(m, |i| {
        let r0 = lo + (hi - lo) * i as f64 / (m - 1) as f64;
        integrate_profile(config, r0).map(|t| ScanPoint { r0, miss: t.miss(), termination: t.termination })
    });
    out.into_iter().collect()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RootCandidate {
    pub lo: f64,
    pub hi: f64,
    pub r0: Option<f64>,
    pub miss: Option<f64>,
    /// Why a sign change was not accepted as a torus.
    pub rejected: Option<&'static str>,
}

fn refine_root(config: &ShooterConfig, mut lo: f64, mut hi: f64, mut mlo: f64) -> RootCandidate {
    let (blo, bhi) = (lo, hi);
    let mut mid = 0.5 * (lo + hi);
    let mut mmid = None;
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let m = match integrate_profile(config, mid).ok().and_then(|t| t.miss()) {
            Some(m) => m,
            None => {
                return RootCandidate { lo: blo, hi: bhi, r0: None, miss: None, rejected: Some("miss undefined inside bracket") }
            }
        };
        mmid = Some(m);
        if hi - lo <= config.tol_root || m == 0.0 {
            break;
        }
        if (m > 0.0) == (mlo > 0.0) {
            lo = mid;
            mlo = m;
        } else {
            hi = mid;
        }
    }
    let rejected = match mmid {
        Some(m) if m.abs() <= config.miss_tol => None,
        _ => Some("miss function jumps across the bracket"),
    };
    RootCandidate { lo: blo, hi: bhi, r0: Some(mid), miss: mmid, rejected }
}

/// Sign changes of the scan, each refined by bisection.
pub fn find_roots(config: &ShooterConfig, scan: &[ScanPoint]) -> Vec<RootCandidate> {
    let pairs: Vec<(f64, f64, f64)> = scan
        .windows(2)
        .filter_map(|w| match (w[0].miss, w[1].miss) {
            (Some(a), Some(b)) if (a > 0.0) != (b > 0.0) => Some((w[0].r0, w[1].r0, a)),
            _ => None,
        })
        .collect();
    config.exec.map(&pairs, |&(lo, hi, mlo)| refine_root(config, lo, hi, mlo))
}

#[derive(Debug, Clone, Serialize)]
pub struct TorusShot {
    pub curve: ProfileCurve,
    pub r0: f64,
    /// Arc length of the upper half profile.
    pub half_length: f64,
    /// `|z|` and `|α + π/2|` at the end of the half profile.
    pub closure_defect: f64,
    pub scan: Vec<ScanPoint>,
    pub candidates: Vec<RootCandidate>,
    pub residual: ShrinkerResidual,
}

/// Shoots the first torus in the bracket and samples it at `n` uniform
/// arc-length nodes (`n` even), mirroring the upper half through `z = 0`.
pub fn shoot_torus(config: &ShooterConfig, n: usize) -> Result<TorusShot, ShrinkerError> {
    config.validate()?;
    if n < crate::geometry::MIN_NODES || !n.is_multiple_of(2) {
        return Err(ShrinkerError::InvalidConfig(format!("node count must be even and at least 16, got {n}")));
    }
    let scan = scan_miss(config)?;
    let candidates = find_roots(config, &scan);
    for cand in &candidates {
        match cand.rejected {
            None => log::info!("torus root r0 = {:.15} (miss {:e})", cand.r0.unwrap_or(f64::NAN), cand.miss.unwrap_or(f64::NAN)),
            Some(why) => log::info!("rejected sign change on [{}, {}]: {why}", cand.lo, cand.hi),
        }
    }
    let (lo, hi) = config.bracket;
    let Some(root) = candidates.iter().find(|c| c.rejected.is_none()) else {
        if candidates.is_empty() {
            return Err(ShrinkerError::NoSignChange { lo, hi });
        }
        if candidates.iter().all(|c| c.miss.is_none()) {
            return Err(ShrinkerError::NoSignChange { lo, hi });
        }
        return Err(ShrinkerError::NoConvergence(format!(
            "{} sign change(s) in [{lo}, {hi}], none refined to |miss| <= {:e}",
            candidates.len(),
            config.miss_tol
        )));
    };
    let r0 = root.r0.expect("accepted root has a value");
    let traj = integrate_profile(config, r0)?.into_result(config.s_max)?;
    let half_length = traj.end_s();

    let half = n / 2;
    let sub = (half_length / (half as f64 * config.h_ode)).ceil().max(1.0) as usize;
    let step = half_length / (sub * half) as f64;
    let mut upper = Vec::with_capacity(half + 1);
    let mut y: State = [r0, 0.0, FRAC_PI_2];
    upper.push(y);
    for i in 0..half {
        for _ in 0..sub {
            y = rk4(&y, step, config.c);
            if !(y[0] >= config.rho_min) {
                return Err(ShrinkerError::AxisSingularity { s: (i + 1) as f64 * step * sub as f64, rho: y[0] });
            }
        }
        upper.push(y);
    }
    let end = upper[half];
    let closure_defect = end[1].abs().max((end[2] + FRAC_PI_2).abs());
    let mut rho = Vec::with_capacity(n);
    let mut z = Vec::with_capacity(n);
    let mut alpha = Vec::with_capacity(n);
    for i in 0..n {
        if i <= half {
            let [r, zz, a] = upper[i];
            rho.push(r);
            z.push(zz);
            alpha.push(a);
        } else {
            let [r, zz, a] = upper[n - i];
            rho.push(r);
            z.push(-zz);
            alpha.push(-PI - a);
        }
    }
    let curve = ProfileCurve::new(rho, z, alpha, 2.0 * half_length, true)?;
    let residual = shrinker_residual(&curve, config.c, &Vector3::zeros());
    Ok(TorusShot { curve, r0, half_length, closure_defect, scan, candidates, residual })
}

/// Open meridian of the shrinking sphere of radius `√(2/−C)`, from polar
/// angle `−θ_max` to `θ_max`.
pub fn sphere_meridian(c: f64, n: usize, theta_max: f64) -> Result<ProfileCurve, ShrinkerError> {
    if !(c < 0.0) {
        return Err(ShrinkerError::NonNegativeC(c));
    }
    if !(theta_max > 0.0 && theta_max < FRAC_PI_2) {
        return Err(ShrinkerError::InvalidConfig(format!("theta_max must lie in (0, π/2), got {theta_max}")));
    }
    let r = (2.0 / -c).sqrt();
    let t = |i: usize| -theta_max + 2.0 * theta_max * i as f64 / (n - 1) as f64;
    let curve = ProfileCurve::new(
        (0..n).map(|i| r * t(i).cos()).collect(),
        (0..n).map(|i| r * t(i).sin()).collect(),
        (0..n).map(|i| t(i) + FRAC_PI_2).collect(),
        2.0 * theta_max * r,
        false,
    )?;
    Ok(curve)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ShrinkerResidual {
    /// `max |H⃗ − C (F − p)^⊥|`.
    pub max_residual: f64,
    /// Least-squares `Ĉ` of `⟨H⃗, ν⟩ ≈ Ĉ ⟨F − p, ν⟩`.
    pub fitted_c: f64,
    /// `max |⟨H⃗, ν⟩ − Ĉ ⟨F − p, ν⟩|`.
    pub fit_misfit: f64,
}

const RESIDUAL_THETA_SAMPLES: usize = 64;

/// Shrinker residual at the nodes of `curve` (all meridians when `p` is
/// off the axis).
pub fn shrinker_residual(curve: &ProfileCurve, c: f64, p: &Vector3<f64>) -> ShrinkerResidual {
    let kappa = profile_curvature(curve);
    let axial = p.x == 0.0 && p.y == 0.0;
    let thetas: Vec<f64> = if axial {
        vec![0.0]
    } else {
        (0..RESIDUAL_THETA_SAMPLES).map(|j| TAU * j as f64 / RESIDUAL_THETA_SAMPLES as f64).collect()
    };
    let mut pairs = Vec::with_capacity(curve.len() * thetas.len());
    for i in 0..curve.len() {
        let (rho, z, a) = (curve.rho()[i], curve.z()[i], curve.alpha()[i]);
        let (sa, ca) = a.sin_cos();
        let h = kappa[i] + sa / rho;
        for &th in &thetas {
            let radial = rho - p.x * th.cos() - p.y * th.sin();
            let d = -sa * radial + ca * (z - p.z);
            pairs.push((h, d));
        }
    }
    let max_residual = pairs.iter().map(|(h, d)| (h - c * d).abs()).fold(0.0, f64::max);
    let num: f64 = pairs.iter().map(|(h, d)| h * d).sum();
    let den: f64 = pairs.iter().map(|(_, d)| d * d).sum();
    let fitted_c = num / den;
    let fit_misfit = pairs.iter().map(|(h, d)| (h - fitted_c * d).abs()).fold(0.0, f64::max);
    ShrinkerResidual { max_residual, fitted_c, fit_misfit }
}
