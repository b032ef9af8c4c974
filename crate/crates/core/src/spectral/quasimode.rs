//! Trial quasimodes concentrated on axis geodesics, and the slice estimates.
//!
//! A phase `e^{i x_j/h}` is periodic on the grid only when `A_j/(2πh)` is an
//! integer, so every constructor snaps `h` to the nearest such value and
//! reports the one it used.

use super::grid::{Grid, GridField, C64};
use super::symbols::bump;
use super::SpectralError;
use serde::Serialize;
use std::f64::consts::TAU;

#[derive(Debug, Clone)]
pub struct Quasimode {
    pub u: GridField,
    pub h: f64,
}

/// Nearest `h' = A/(2πk)` with `k ≥ 1`.
pub fn snap_h(period: f64, h: f64) -> f64 {
    let k = (period / (TAU * h)).round().max(1.0);
    period / (TAU * k)
}

fn check_h(grid: &Grid, axis: usize, h: f64) -> Result<f64, SpectralError> {
    if axis >= grid.dim() {
        return Err(SpectralError::BadParameter(format!("axis {axis} out of range")));
    }
    if !(h > 0.0 && h < 1.0) {
        return Err(SpectralError::BadParameter("h must lie in (0, 1)".into()));
    }
    let h = snap_h(grid.periods[axis], h);
    // the phase needs at least four samples per wavelength
    if TAU * h < 4.0 * grid.spacing(axis) {
        return Err(SpectralError::Unresolvable(format!("h = {h} on axis {axis}")));
    }
    Ok(h)
}

/// Shortest signed offset `x - c` on a circle of length `a`.
fn periodic_offset(x: f64, c: f64, a: f64) -> f64 {
    (x - c + a / 2.0).rem_euclid(a) - a / 2.0
}

/// `h^{-(d-1)/4} e^{i x_j/h} e^{-|X_⊥ - c_⊥|²/(2h)}`, periodized and normalized.
pub fn gaussian_beam(grid: &Grid, axis: usize, center: &[f64], h: f64) -> Result<Quasimode, SpectralError> {
    let h = check_h(grid, axis, h)?;
    let d = grid.dim();
    if center.len() != d {
        return Err(SpectralError::ResolutionMismatch);
    }
    for a in (0..d).filter(|&a| a != axis) {
        if h.sqrt() < 2.0 * grid.spacing(a) {
            return Err(SpectralError::Unresolvable(format!("beam width sqrt(h) = {} on axis {a}", h.sqrt())));
        }
    }
    let amp = h.powf(-((d - 1) as f64) / 4.0);
    let mut u = GridField::from_fn(grid, |x| {
        let mut g = 1.0;
        for a in (0..d).filter(|&a| a != axis) {
            let p = grid.periods[a];
            let s: f64 = (-3..=3)
                .map(|k| {
                    let y = x[a] - center[a] + k as f64 * p;
                    (-y * y / (2.0 * h)).exp()
                })
                .sum();
            g *= s;
        }
        C64::from_polar(amp * g, x[axis] / h)
    });
    let n = u.norm();
    u.scale(1.0 / n);
    Ok(Quasimode { u, h })
}

/// Product of smooth bumps `Π bump((x_a - c_a)/r_a)` over the transverse axes.
#[derive(Debug, Clone, PartialEq)]
pub struct TransverseProfile {
    pub center: Vec<f64>,
    pub radius: Vec<f64>,
}

impl TransverseProfile {
    pub fn eval(&self, grid: &Grid, axis: usize, x: &[f64]) -> f64 {
        (0..grid.dim())
            .filter(|&a| a != axis)
            .map(|a| bump(periodic_offset(x[a], self.center[a], grid.periods[a]) / self.radius[a]))
            .product()
    }

    /// Closed band `[c - r, c + r]` on a transverse axis.
    pub fn band(&self, a: usize) -> (f64, f64) {
        (self.center[a] - self.radius[a], self.center[a] + self.radius[a])
    }
}

/// `e^{i x_j/h} φ(X_⊥)`, normalized.
pub fn profile_quasimode(grid: &Grid, axis: usize, phi: &TransverseProfile, h: f64) -> Result<Quasimode, SpectralError> {
    let h = check_h(grid, axis, h)?;
    if phi.center.len() != grid.dim() || phi.radius.len() != grid.dim() {
        return Err(SpectralError::ResolutionMismatch);
    }
    for a in (0..grid.dim()).filter(|&a| a != axis) {
        if !(phi.radius[a] > 0.0) || 2.0 * phi.radius[a] >= grid.periods[a] {
            return Err(SpectralError::ProfileTooWide { axis: a });
        }
        if phi.radius[a] < 4.0 * grid.spacing(a) {
            return Err(SpectralError::Unresolvable(format!("profile radius on axis {a}")));
        }
    }
    let mut u = GridField::from_fn(grid, |x| C64::from_polar(phi.eval(grid, axis, x), x[axis] / h));
    let n = u.norm();
    u.scale(1.0 / n);
    Ok(Quasimode { u, h })
}

/// `e^{iξ_k·x}/vol^{1/2}` with `h = 1/|ξ_k|`, an exact eigenfunction.
pub fn plane_wave(grid: &Grid, k: &[i64]) -> Result<Quasimode, SpectralError> {
    if k.len() != grid.dim() || k.iter().all(|m| *m == 0) {
        return Err(SpectralError::BadParameter("plane wave needs a nonzero mode".into()));
    }
    if k.iter().zip(&grid.res).any(|(m, n)| m.unsigned_abs() as usize * 2 >= *n) {
        return Err(SpectralError::Unresolvable(format!("mode {k:?}")));
    }
    let xi: Vec<f64> = k.iter().zip(&grid.periods).map(|(m, a)| TAU * *m as f64 / a).collect();
    let h = 1.0 / xi.iter().map(|x| x * x).sum::<f64>().sqrt();
    let amp = grid.volume().sqrt().recip();
    let u = GridField::from_fn(grid, |x| C64::from_polar(amp, xi.iter().zip(x).map(|(a, b)| a * b).sum()));
    Ok(Quasimode { u, h })
}

#[derive(Debug, Clone)]
pub struct HelmholtzSolution {
    pub u: GridField,
    /// Integer modes inside the resonance guard, zeroed.
    pub excluded: Vec<Vec<i64>>,
}

/// Solves `(h²Δ + 1) u = f` mode by mode, zeroing modes with `|1 - h²|ξ|²| < δ`.
pub fn helmholtz_solve(f: &GridField, h: f64, delta: Option<f64>) -> Result<HelmholtzSolution, SpectralError> {
    let delta = delta.unwrap_or(10.0 * h * h);
    if !(delta > 0.0) {
        return Err(SpectralError::BadParameter("resonance guard must be positive".into()));
    }
    let grid = f.grid();
    let mut excluded = Vec::new();
    let mut c = f.coefficients().to_vec();
    for (k, x) in c.iter_mut().enumerate() {
        let xi2: f64 = grid.wavevector(k).iter().map(|x| x * x).sum();
        let s = 1.0 - h * h * xi2;
        if s.abs() < delta {
            *x = C64::new(0.0, 0.0);
            let idx = grid.index(k);
            excluded.push(idx.iter().zip(&grid.res).map(|(&i, &n)| Grid::mode(i, n)).collect());
        } else {
            *x /= s;
        }
    }
    if excluded.len() == grid.len() {
        return Err(SpectralError::AllModesExcluded);
    }
    Ok(HelmholtzSolution { u: GridField::from_coefficients(grid, c)?, excluded })
}

/// `max(h^{1/6}, (r/h)^{1/6})`.
pub fn epsilon_of_h(h: f64, r: f64) -> f64 {
    h.powf(1.0 / 6.0).max((r / h).powf(1.0 / 6.0))
}

/// Fraction of each grid cell along `axis` lying in `{a ≤ |x - c| ≤ b}`.
fn slab_weights(grid: &Grid, axis: usize, c: f64, a: f64, b: f64) -> Vec<f64> {
    let n = grid.res[axis];
    let dx = grid.spacing(axis);
    let p = grid.periods[axis];
    (0..n)
        .map(|i| {
            let y = periodic_offset(i as f64 * dx, c, p);
            let (lo, hi) = (y - dx / 2.0, y + dx / 2.0);
            let overlap = |l: f64, r: f64| (hi.min(r) - lo.max(l)).max(0.0);
            // the two sides of the annulus, and their images one period away
            let mut w = 0.0;
            for shift in [-p, 0.0, p] {
                w += overlap(a + shift, b + shift) + overlap(-b + shift, -a + shift);
            }
            (w / dx).min(1.0)
        })
        .collect()
}

fn slab_norm(u: &GridField, axis: usize, c: f64, a: f64, b: f64) -> f64 {
    let g = u.grid();
    let w = slab_weights(g, axis, c, a, b);
    let s: f64 = u.samples().iter().enumerate().map(|(k, x)| w[g.index(k)[axis]] * x.norm_sqr()).sum();
    (s * g.cell_volume()).sqrt()
}

/// `‖u‖` on `{|x_j - c| ≤ w}`.
pub fn slice_mass(u: &GridField, axis: usize, center: f64, w: f64) -> Result<f64, SpectralError> {
    let p = u.grid().periods[axis];
    if !(w > 0.0 && w <= p / 2.0) {
        return Err(SpectralError::BadParameter(format!("slice width {w} outside (0, {}]", p / 2.0)));
    }
    Ok(slab_norm(u, axis, center, 0.0, w))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// The slice bound is meaningful.
    Active,
    /// `ε(h)` is not small or the slice covers the circle.
    Vacuous,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonConcentration {
    pub epsilon: f64,
    pub width: f64,
    pub mass: f64,
    pub constant: f64,
    pub regime: Regime,
    pub pass: bool,
}

/// Measured `C = ‖u‖_{L²(|x_j - c| ≤ h^{1/2}ε^{-2})} / ε^{1/2}`.
///
/// Vacuous when the slice would cover the circle or `‖f‖/h ≥ 1/2`, i.e. the
/// pair is not a quasimode at this `h`.
pub fn check_nonconcentration(
    u: &GridField,
    f: &GridField,
    h: f64,
    axis: usize,
    center: f64,
    c_max: f64,
) -> Result<NonConcentration, SpectralError> {
    let r = f.norm();
    let eps = epsilon_of_h(h, r);
    let w = h.sqrt() / (eps * eps);
    let p = u.grid().periods[axis];
    if w > p / 2.0 || r / h >= 0.5 {
        return Ok(NonConcentration {
            epsilon: eps,
            width: w,
            mass: f64::NAN,
            constant: f64::NAN,
            regime: Regime::Vacuous,
            pass: true,
        });
    }
    let mass = slice_mass(u, axis, center, w)?;
    let constant = mass / eps.sqrt();
    Ok(NonConcentration { epsilon: eps, width: w, mass, constant, regime: Regime::Active, pass: constant <= c_max })
}

/// Left over right side of the slab estimate around `x_j = c`.
///
/// Left: the largest transverse `L²` norm over grid planes with `|x_j - c| ≤ βh^{1/2}`.
/// Right: `β^{-1/2}h^{-1/4}(‖u‖ on βh^{1/2} ≤ |x_j - c| ≤ 2βh^{1/2} + h^{-1}β²‖f‖ on |x_j - c| ≤ 2βh^{1/2})`.
pub fn check_slab_estimate(
    u: &GridField,
    f: &GridField,
    h: f64,
    beta: f64,
    axis: usize,
    center: f64,
) -> Result<f64, SpectralError> {
    if !(beta >= 1.0 && beta <= h.powf(-0.5) * (1.0 + 1e-12)) {
        return Err(SpectralError::BadParameter(format!("beta = {beta} outside [1, h^(-1/2)]")));
    }
    let g = u.grid();
    let l = beta * h.sqrt();
    let p = g.periods[axis];
    if 2.0 * l > p / 2.0 {
        return Err(SpectralError::Unresolvable("slab wider than half the circle".into()));
    }
    if l < 2.0 * g.spacing(axis) {
        return Err(SpectralError::Unresolvable(format!("slab half-width {l} under two grid cells")));
    }
    let n = g.res[axis];
    let dx = g.spacing(axis);
    let mut planes = vec![0.0; n];
    for (k, x) in u.samples().iter().enumerate() {
        planes[g.index(k)[axis]] += x.norm_sqr();
    }
    let cross = g.cell_volume() / dx;
    let left = (0..n)
        .filter(|&i| periodic_offset(i as f64 * dx, center, p).abs() <= l)
        .map(|i| (planes[i] * cross).sqrt())
        .fold(0.0, f64::max);
    let right = beta.powf(-0.5)
        * h.powf(-0.25)
        * (slab_norm(u, axis, center, l, 2.0 * l) + beta * beta / h * slab_norm(f, axis, center, 0.0, 2.0 * l));
    Ok(if left == 0.0 { 0.0 } else { left / right })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuasimodeReport {
    pub h: f64,
    pub norm_u: f64,
    pub norm_au: f64,
    pub norm_f: f64,
    pub epsilon: f64,
    /// `‖u‖ / (‖a^{1/2}u‖ + ‖f‖/h)`.
    pub observability_ratio: f64,
    pub nonconcentration: Option<NonConcentration>,
    pub slab_ratio: Option<f64>,
}

impl QuasimodeReport {
    pub fn new(q: &Quasimode, damping: &GridField) -> Result<Self, SpectralError> {
        let f = q.u.helmholtz(q.h);
        let (nu, na, nf) = (q.u.norm(), q.u.weighted_norm(damping)?, f.norm());
        Ok(QuasimodeReport {
            h: q.h,
            norm_u: nu,
            norm_au: na,
            norm_f: nf,
            epsilon: epsilon_of_h(q.h, nf),
            observability_ratio: nu / (na + nf / q.h),
            nonconcentration: None,
            slab_ratio: None,
        })
    }
}
