//! Quadratic quantization masses for separable symbols.
//!
//! `Op_h(q) u = q_X · (q_Ξ(hD) u)`: one Fourier multiplier followed by a
//! pointwise product. The second quantization adds a transverse window in
//! position at scale `h^{1/2}/ε` and one in frequency at scale `1/(εh^{1/2})`.

use super::grid::{GridField, C64};
use super::SpectralError;

pub type Sampler<'a> = &'a (dyn Fn(&[f64]) -> f64 + Sync);

#[derive(Clone, Copy)]
pub enum Factor<'a> {
    One,
    Fn(Sampler<'a>),
}

#[derive(Clone, Copy)]
pub struct Separable<'a> {
    pub space: Factor<'a>,
    pub freq: Factor<'a>,
}

impl Separable<'_> {
    pub const ONE: Separable<'static> = Separable { space: Factor::One, freq: Factor::One };
}

/// `û_k ← χ(hξ_k) û_k`.
pub fn fourier_multiplier(u: &GridField, h: f64, chi: Sampler) -> GridField {
    u.apply_symbol(|xi| {
        let s: Vec<f64> = xi.iter().map(|x| h * x).collect();
        C64::new(chi(&s), 0.0)
    })
}

fn apply(u: &GridField, h: f64, q: &Separable) -> GridField {
    let v = match q.freq {
        Factor::One => u.clone(),
        Factor::Fn(f) => fourier_multiplier(u, h, f),
    };
    match q.space {
        Factor::One => v,
        Factor::Fn(f) => v.multiply(f),
    }
}

/// `⟨Op_h(q) u, u⟩`.
pub fn microlocal_mass(u: &GridField, h: f64, q: &Separable) -> C64 {
    apply(u, h, q).inner(u).unwrap()
}

/// Windows of the second quantization around the axis geodesic through `center`.
#[derive(Clone, Copy)]
pub struct Windows<'a> {
    /// Geodesic axis `j`.
    pub axis: usize,
    pub center: &'a [f64],
    /// `w_z` evaluated at `εh^{-1/2}(X - c)` with the axis component zeroed.
    pub w_z: Factor<'a>,
    /// `w_ζ` evaluated at `εh^{1/2}ξ` with the axis component zeroed.
    pub w_zeta: Factor<'a>,
}

/// Which piece of the third-window partition to insert.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
    /// `1 - ψ_+ - ψ_-`.
    Rest,
}

/// `ψ_±(x_k) = ψ(±ε^{3/2}h^{-1/2}(x_k - c_k))` on a transverse axis `k`.
#[derive(Clone, Copy)]
pub struct ThirdWindow<'a> {
    pub axis: usize,
    pub psi: &'a (dyn Fn(f64) -> f64 + Sync),
    pub side: Side,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecondMass {
    pub value: C64,
    /// Violations of `ε ≥ h^{1/2}` and `h^{1/2}ε^{-2} < 1`.
    pub warnings: Vec<String>,
}

fn offset(x: f64, c: f64, a: f64) -> f64 {
    (x - c + a / 2.0).rem_euclid(a) - a / 2.0
}

/// `⟨ψ · q_X · w_z · (q_Ξ(hD) w_ζ(εh^{1/2}D_⊥)) u, u⟩`.
pub fn second_microlocal_mass(
    u: &GridField,
    h: f64,
    eps: f64,
    q: &Separable,
    win: &Windows,
    third: Option<ThirdWindow>,
) -> Result<SecondMass, SpectralError> {
    let g = u.grid();
    let d = g.dim();
    if win.axis >= d || win.center.len() != d {
        return Err(SpectralError::ResolutionMismatch);
    }
    let mut warnings = Vec::new();
    if eps < h.sqrt() {
        warnings.push(format!("eps = {eps} is below h^(1/2) = {}", h.sqrt()));
    }
    if h.sqrt() / (eps * eps) >= 1.0 {
        warnings.push(format!("h^(1/2) eps^(-2) = {} is not small", h.sqrt() / (eps * eps)));
    }
    let transverse = (0..d).filter(|&a| a != win.axis);
    let finest = transverse.clone().map(|a| g.spacing(a)).fold(0.0, f64::max);
    if matches!(win.w_z, Factor::Fn(_)) && h.sqrt() / eps < 2.0 * finest {
        return Err(SpectralError::Unresolvable(format!("position window scale {}", h.sqrt() / eps)));
    }
    if let Some(t) = &third {
        if t.axis == win.axis || t.axis >= d {
            return Err(SpectralError::BadParameter("third window needs a transverse axis".into()));
        }
        if h.sqrt() * eps.powf(-1.5) < 2.0 * g.spacing(t.axis) {
            return Err(SpectralError::Unresolvable("third window scale".into()));
        }
    }
    let mut v = u.clone();
    let freq: Option<Box<dyn Fn(&[f64]) -> f64 + Sync>> = match (q.freq, win.w_zeta) {
        (Factor::One, Factor::One) => None,
        (qf, wf) => Some(Box::new(move |xi: &[f64]| {
            let a = match qf {
                Factor::One => 1.0,
                Factor::Fn(f) => f(&xi.iter().map(|x| h * x).collect::<Vec<_>>()),
            };
            let b = match wf {
                Factor::One => 1.0,
                Factor::Fn(f) => {
                    let s: Vec<f64> = xi
                        .iter()
                        .enumerate()
                        .map(|(k, x)| if k == win.axis { 0.0 } else { eps * h.sqrt() * x })
                        .collect();
                    f(&s)
                }
            };
            a * b
        })),
    };
    if let Some(f) = freq {
        v = v.apply_symbol(|xi| C64::new(f(xi), 0.0));
    }
    if let Factor::Fn(f) = q.space {
        v = v.multiply(f);
    }
    if let Factor::Fn(f) = win.w_z {
        let s = eps / h.sqrt();
        v = v.multiply(|x| {
            let z: Vec<f64> = (0..d)
                .map(|a| if a == win.axis { 0.0 } else { s * offset(x[a], win.center[a], g.periods[a]) })
                .collect();
            f(&z)
        });
    }
    if let Some(t) = third {
        let s = eps.powf(1.5) / h.sqrt();
        v = v.multiply(|x| {
            let y = s * offset(x[t.axis], win.center[t.axis], g.periods[t.axis]);
            let (p, m) = ((t.psi)(y), (t.psi)(-y));
            match t.side {
                Side::Plus => p,
                Side::Minus => m,
                Side::Rest => 1.0 - p - m,
            }
        });
    }
    Ok(SecondMass { value: v.inner(u)?, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::Grid;
    use crate::spectral::quasimode::{gaussian_beam, plane_wave};
    use crate::spectral::symbols::{plateau, smooth_step};
    use rand::{Rng, SeedableRng};
    use std::f64::consts::TAU;

    fn random_field(g: &Grid, seed: u64) -> GridField {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let data = (0..g.len()).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        GridField::from_samples(g, data).unwrap()
    }

    #[test]
    fn unit_symbol_gives_the_mass() {
        let g = Grid::uniform(&[1.0, 2.0], 16).unwrap();
        let u = random_field(&g, 1);
        let m = microlocal_mass(&u, 0.1, &Separable::ONE);
        assert_eq!(m.re, u.norm_sq());
        assert_eq!(m.im, 0.0);
        let one = |_: &[f64]| 1.0;
        assert!(fourier_multiplier(&u, 0.1, &one).sub(&u).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn plane_wave_symbols() {
        let g = Grid::uniform(&[1.0, 1.0], 32).unwrap();
        let q = plane_wave(&g, &[3, 4]).unwrap();
        let chi = |s: &[f64]| (-(s[0] - 0.6).powi(2)).exp();
        let out = fourier_multiplier(&q.u, q.h, &chi);
        let want = chi(&[0.6, 0.8]);
        let mut expect = q.u.clone();
        expect.scale(want);
        assert!(out.sub(&expect).unwrap().max_abs() < 1e-12);
        let qx = |x: &[f64]| 1.0 + x[0];
        let m = microlocal_mass(&q.u, q.h, &Separable { space: Factor::Fn(&qx), freq: Factor::Fn(&chi) });
        // mean of 1 + x_0 on the grid is 1 + (1 - 1/32)/2
        assert!((m.re - want * (1.0 + (1.0 - 1.0 / 32.0) / 2.0)).abs() < 1e-12);
        // χ supported off the shell kills a shell-concentrated field
        let off = |s: &[f64]| plateau((s[0] * s[0] + s[1] * s[1]).sqrt() - 2.0, 0.2, 0.5);
        assert!(fourier_multiplier(&q.u, q.h, &off).norm() <= 1e-8);
    }

    #[test]
    fn ball_mass_matches_pointwise() {
        let g = Grid::uniform(&[1.0, 1.0], 32).unwrap();
        let u = random_field(&g, 4);
        let ball = |x: &[f64]| plateau(((x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2)).sqrt(), 0.2, 0.25);
        let m = microlocal_mass(&u, 0.1, &Separable { space: Factor::Fn(&ball), freq: Factor::One });
        let direct: f64 = u.samples().iter().enumerate().map(|(k, x)| ball(&g.point(k)) * x.norm_sqr()).sum();
        assert!((m.re - direct * g.cell_volume()).abs() < 1e-12);
    }

    #[test]
    fn unit_windows_reduce_to_the_first_quantization() {
        let g = Grid::uniform(&[1.0, 1.0], 32).unwrap();
        let u = random_field(&g, 2);
        let chi = |s: &[f64]| 1.0 / (1.0 + s[0] * s[0]);
        let q = Separable { space: Factor::One, freq: Factor::Fn(&chi) };
        let w = Windows { axis: 0, center: &[0.0, 0.5], w_z: Factor::One, w_zeta: Factor::One };
        let a = second_microlocal_mass(&u, 0.01, 0.5, &q, &w, None).unwrap();
        assert!((a.value - microlocal_mass(&u, 0.01, &q)).norm() <= 1e-12);
        assert!(a.warnings.is_empty());
    }

    #[test]
    fn beam_mass_concentrates_in_the_windows() {
        let g = Grid::new(vec![1.0, 1.0], vec![256, 256]).unwrap();
        let h = 1.0 / 64.0;
        let eps = 0.4;
        let b = gaussian_beam(&g, 0, &[0.0, 0.5], h).unwrap();
        let wz = |z: &[f64]| plateau(z[1], 1.0, 2.0);
        let wzeta = |z: &[f64]| plateau(z[1], 1.0, 2.0);
        let w = Windows { axis: 0, center: &[0.0, 0.5], w_z: Factor::Fn(&wz), w_zeta: Factor::Fn(&wzeta) };
        let m = second_microlocal_mass(&b.u, b.h, eps, &Separable::ONE, &w, None).unwrap();
        assert!(m.value.re >= 0.99, "{}", m.value);
    }

    #[test]
    fn transverse_frequency_window_is_diagonal() {
        let g = Grid::uniform(&[1.0, 1.0], 64).unwrap();
        let q = plane_wave(&g, &[10, 3]).unwrap();
        let eps = 0.5;
        let wzeta = |z: &[f64]| (-z[1] * z[1]).exp();
        let w = Windows { axis: 0, center: &[0.0, 0.0], w_z: Factor::One, w_zeta: Factor::Fn(&wzeta) };
        let m = second_microlocal_mass(&q.u, q.h, eps, &Separable::ONE, &w, None).unwrap();
        let want = wzeta(&[0.0, eps * q.h.sqrt() * TAU * 3.0]);
        assert!((m.value.re - want).abs() < 1e-12);
    }

    #[test]
    fn third_window_partition() {
        let g = Grid::uniform(&[1.0, 1.0], 64).unwrap();
        let u = random_field(&g, 9);
        let (h, eps) = (1.0 / 64.0, 0.5);
        let wz = |z: &[f64]| plateau(z[1], 2.0, 3.0);
        let w = Windows { axis: 0, center: &[0.0, 0.5], w_z: Factor::Fn(&wz), w_zeta: Factor::One };
        let psi = |t: f64| smooth_step(t, 0.5, 1.0);
        let total = second_microlocal_mass(&u, h, eps, &Separable::ONE, &w, None).unwrap().value;
        let sum: C64 = [Side::Plus, Side::Minus, Side::Rest]
            .iter()
            .map(|&side| {
                let t = ThirdWindow { axis: 1, psi: &psi, side };
                second_microlocal_mass(&u, h, eps, &Separable::ONE, &w, Some(t)).unwrap().value
            })
            .sum();
        assert!((sum - total).norm() <= 1e-10);
    }

    #[test]
    fn regime_warnings_and_resolution() {
        let g = Grid::uniform(&[1.0, 1.0], 16).unwrap();
        let u = random_field(&g, 3);
        let wz = |_: &[f64]| 1.0;
        let w = Windows { axis: 0, center: &[0.0, 0.0], w_z: Factor::Fn(&wz), w_zeta: Factor::One };
        let r = second_microlocal_mass(&u, 0.25, 0.6, &Separable::ONE, &w, None).unwrap();
        assert_eq!(r.warnings.len(), 1);
        assert!(matches!(
            second_microlocal_mass(&u, 1e-4, 0.9, &Separable::ONE, &w, None),
            Err(SpectralError::Unresolvable(_))
        ));
    }
}
