//! Damped wave equation `u_tt - Δu + a u_t + m u = 0` by Strang splitting.
//!
//! The state lives in Fourier space. Half a step of the undamped equation
//! rotates every mode exactly; the damping step `v ← v e^{-a dt}` is applied
//! pointwise in sample space. Only `v` changes in the damping step, so a step
//! costs one inverse and one forward transform of `v`.

use super::grid::{FftPlan, Grid, GridField, C64};
use super::SpectralError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;

#[derive(Clone)]
pub struct WaveState {
    grid: Grid,
    plan: FftPlan,
    u_hat: Vec<C64>,
    v_hat: Vec<C64>,
    xi2: Vec<f64>,
    damping: Vec<f64>,
    pub t: f64,
    pub m: f64,
}

impl std::fmt::Debug for WaveState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WaveState").field("grid", &self.grid).field("t", &self.t).field("m", &self.m).finish()
    }
}

impl WaveState {
    pub fn new(u: &GridField, v: &GridField, damping: &GridField, m: f64) -> Result<Self, SpectralError> {
        let grid = u.grid().clone();
        if v.grid() != &grid || damping.grid() != &grid {
            return Err(SpectralError::ResolutionMismatch);
        }
        if !(m >= 0.0) {
            return Err(SpectralError::BadParameter("potential must be nonnegative".into()));
        }
        let damping: Vec<f64> = damping.samples().iter().map(|x| x.re).collect();
        if damping.iter().any(|a| !(*a >= 0.0)) {
            return Err(SpectralError::BadParameter("damping must be nonnegative".into()));
        }
        Ok(WaveState {
            plan: FftPlan::new(&grid),
            xi2: grid.xi2(),
            u_hat: u.coefficients().to_vec(),
            v_hat: v.coefficients().to_vec(),
            grid,
            damping,
            t: 0.0,
            m,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn displacement(&self) -> GridField {
        GridField::from_coefficients(&self.grid, self.u_hat.clone()).unwrap()
    }

    pub fn velocity(&self) -> GridField {
        GridField::from_coefficients(&self.grid, self.v_hat.clone()).unwrap()
    }

    fn undamped(&self) -> bool {
        self.damping.iter().all(|a| *a == 0.0)
    }

    fn rotate(&mut self, tau: f64) {
        let m = self.m;
        self.u_hat.par_iter_mut().zip(self.v_hat.par_iter_mut()).zip(self.xi2.par_iter()).for_each(|((u, v), x2)| {
            let w = (x2 + m).sqrt();
            let (s, c) = (w * tau).sin_cos();
            let sw = if w > 0.0 { s / w } else { tau };
            let (u0, v0) = (*u, *v);
            *u = u0 * c + v0 * sw;
            *v = v0 * c - u0 * (w * s);
        });
    }

    /// Damps `v` pointwise and returns `∫ a |(v⁻ + v⁺)/2|²`.
    fn damp(&mut self, dt: f64) -> f64 {
        let mut v = self.v_hat.clone();
        self.plan.inverse(&mut v);
        let flux: f64 = v
            .par_iter_mut()
            .zip(self.damping.par_iter())
            .map(|(x, a)| {
                if *a == 0.0 {
                    return 0.0;
                }
                let before = *x;
                *x *= (-a * dt).exp();
                a * ((before + *x) * 0.5).norm_sqr()
            })
            .sum();
        self.plan.forward(&mut v);
        self.v_hat = v;
        flux * self.grid.cell_volume()
    }

    /// One Strang step; returns the damping flux over the step.
    pub fn step(&mut self, dt: f64) -> f64 {
        if self.undamped() {
            self.rotate(dt);
            self.t += dt;
            return 0.0;
        }
        self.rotate(dt / 2.0);
        let flux = self.damp(dt) * dt;
        self.rotate(dt / 2.0);
        self.t += dt;
        flux
    }

    /// `(‖∇u‖² + ‖v‖² + m‖u‖²)/2`, spectrally.
    pub fn energy(&self) -> f64 {
        let s: f64 = self
            .u_hat
            .par_iter()
            .zip(self.v_hat.par_iter())
            .zip(self.xi2.par_iter())
            .map(|((u, v), x2)| (x2 + self.m) * u.norm_sqr() + v.norm_sqr())
            .sum();
        0.5 * s * self.grid.volume()
    }
}

pub fn step_damped_wave(state: &WaveState, dt: f64) -> Result<WaveState, SpectralError> {
    if !(dt > 0.0) {
        return Err(SpectralError::BadParameter("dt must be positive".into()));
    }
    let mut s = state.clone();
    s.step(dt);
    Ok(s)
}

pub fn energy(state: &WaveState) -> f64 {
    state.energy()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EnergyTrace {
    pub t: Vec<f64>,
    pub energy: Vec<f64>,
    pub flux: Vec<f64>,
    pub residual: Vec<f64>,
}

impl EnergyTrace {
    fn push(&mut self, t: f64, e: f64, flux: f64) {
        let e0 = self.energy.first().copied().unwrap_or(e);
        self.t.push(t);
        self.energy.push(e);
        self.flux.push(flux);
        self.residual.push(e - e0 + flux);
    }

    pub fn e0(&self) -> f64 {
        self.energy[0]
    }

    pub fn max_relative_residual(&self) -> f64 {
        self.residual.iter().map(|r| r.abs()).fold(0.0, f64::max) / self.e0()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,energy,flux,residual\n");
        for i in 0..self.t.len() {
            let f = crate::json::fmt_f64;
            let _ = writeln!(s, "{},{},{},{}", f(self.t[i]), f(self.energy[i]), f(self.flux[i]), f(self.residual[i]));
        }
        s
    }
}

#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub t_final: f64,
    pub dt: f64,
    /// Record every `stride` steps (the last step is always recorded).
    pub stride: usize,
    /// Keep a snapshot of `u` every `snapshot_every` records.
    pub snapshot_every: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub trace: EnergyTrace,
    pub snapshots: Vec<(f64, GridField)>,
    pub state: WaveState,
}

pub fn run_simulation(mut state: WaveState, cfg: &SimulationConfig) -> Result<Simulation, SpectralError> {
    if !(cfg.t_final > 0.0 && cfg.dt > 0.0) || cfg.stride == 0 {
        return Err(SpectralError::BadParameter("T, dt and stride must be positive".into()));
    }
    let steps = (cfg.t_final / cfg.dt).round().max(1.0) as usize;
    let mut trace = EnergyTrace::default();
    let mut snapshots = Vec::new();
    let mut flux = 0.0;
    trace.push(state.t, state.energy(), 0.0);
    let mut last_good = state.clone();
    for k in 1..=steps {
        flux += state.step(cfg.dt);
        if k % cfg.stride == 0 || k == steps {
            let e = state.energy();
            if !e.is_finite() || !flux.is_finite() {
                return Err(SpectralError::NonFinite { step: k, t: state.t, last_good: Box::new(last_good) });
            }
            trace.push(state.t, e, flux);
            if let Some(every) = cfg.snapshot_every {
                if (trace.t.len() - 1) % every.max(1) == 0 {
                    snapshots.push((state.t, state.displacement()));
                }
            }
            last_good = state.clone();
        }
    }
    Ok(Simulation { trace, snapshots, state })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub rate: f64,
    pub prefactor: f64,
    pub r2: f64,
}

/// Least squares line through `log E` on `t ∈ [t0, t1]`.
pub fn fit_decay_rate(trace: &EnergyTrace, window: (f64, f64)) -> Result<DecayFit, SpectralError> {
    let pts: Vec<(f64, f64)> = trace
        .t
        .iter()
        .zip(&trace.energy)
        .filter(|(t, _)| **t >= window.0 && **t <= window.1)
        .map(|(t, e)| (*t, *e))
        .collect();
    if pts.len() < 2 {
        return Err(SpectralError::BadParameter("fit window holds fewer than two samples".into()));
    }
    if let Some(&(t, _)) = pts.iter().find(|(_, e)| !(*e > 0.0)) {
        return Err(SpectralError::NonpositiveEnergy { t });
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let stt: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let sty: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1.ln() - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1.ln() - my).powi(2)).sum();
    let slope = sty / stt;
    let intercept = my - slope * mt;
    let r2 = if syy == 0.0 { 1.0 } else { (sty * sty) / (stt * syy) };
    Ok(DecayFit { rate: -slope, prefactor: intercept.exp(), r2 })
}

/// `exp(t M)` for `M = [[0, 1], [-ω², -a]]`, by its eigenvalues.
pub fn mode_propagator(a: f64, omega2: f64, t: f64) -> [[C64; 2]; 2] {
    let mu = C64::new(-a / 2.0, 0.0);
    let nu = (mu * mu - omega2).sqrt();
    let e = (mu * t).exp();
    let ch = (nu * t).cosh();
    // sinh(νt)/ν, with its limit t at ν = 0
    let sh = if nu.norm() < 1e-12 { C64::new(t, 0.0) } else { (nu * t).sinh() / nu };
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let m = [[zero, one], [C64::new(-omega2, 0.0), C64::new(-a, 0.0)]];
    let mut out = [[zero; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let id = if i == j { one } else { zero };
            let shifted = m[i][j] - if i == j { mu } else { zero };
            out[i][j] = e * (ch * id + sh * shifted);
        }
    }
    out
}

/// Slowest energy decay rate `min -2 max Re λ` over the excited `|ξ|²`, with `λ² + aλ + |ξ|² + m = 0`.
///
/// The stationary root `λ = 0` of a zero-frequency mode carries no energy and is skipped.
pub fn constant_damping_rate(a: f64, m: f64, excited_xi2: &[f64]) -> f64 {
    excited_xi2
        .iter()
        .map(|x2| {
            let w2 = x2 + m;
            let disc = C64::new(a * a - 4.0 * w2, 0.0).sqrt();
            let roots = [(-a + disc) / 2.0, (-a - disc) / 2.0];
            let worst = roots
                .iter()
                .filter(|l| !(w2 == 0.0 && l.norm() < 1e-14))
                .map(|l| l.re)
                .fold(f64::NEG_INFINITY, f64::max);
            -2.0 * worst
        })
        .fold(f64::INFINITY, f64::min)
}

/// Initial data for a run.
#[derive(Debug, Clone)]
pub enum InitialData {
    /// Seeded random coefficients on `|k_i| ≤ band`, `u` and `v` independent.
    Random { band: i64, seed: u64 },
    /// `u = Σ c e^{iξ_k·x}`, `v = 0`.
    Modes(Vec<(Vec<i64>, C64)>),
    /// Given fields.
    Fields(GridField, GridField),
}

impl InitialData {
    pub fn build(&self, grid: &Grid) -> Result<(GridField, GridField), SpectralError> {
        match self {
            InitialData::Fields(u, v) => {
                if u.grid() != grid || v.grid() != grid {
                    return Err(SpectralError::ResolutionMismatch);
                }
                Ok((u.clone(), v.clone()))
            }
            InitialData::Modes(list) => {
                let mut c = vec![C64::new(0.0, 0.0); grid.len()];
                for (k, amp) in list {
                    if k.len() != grid.dim() {
                        return Err(SpectralError::ResolutionMismatch);
                    }
                    if k.iter().zip(&grid.res).any(|(m, n)| m.unsigned_abs() as usize >= n / 2) {
                        return Err(SpectralError::BadParameter(format!("mode {k:?} is not resolved")));
                    }
                    c[grid.flat_of_mode(k)] += amp;
                }
                Ok((GridField::from_coefficients(grid, c)?, GridField::zeros(grid)))
            }
            InitialData::Random { band, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let mut fields = Vec::new();
                for _ in 0..2 {
                    let mut c = vec![C64::new(0.0, 0.0); grid.len()];
                    for (flat, x) in c.iter_mut().enumerate() {
                        let idx = grid.index(flat);
                        let ok = idx.iter().zip(&grid.res).all(|(&i, &n)| {
                            let m = Grid::mode(i, n);
                            m.abs() <= *band && m.unsigned_abs() as usize * 2 < n
                        });
                        let (re, im): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                        if ok {
                            *x = C64::new(re, im);
                        }
                    }
                    fields.push(GridField::from_coefficients(grid, c)?);
                }
                let v = fields.pop().unwrap();
                Ok((fields.pop().unwrap(), v))
            }
        }
    }
}
