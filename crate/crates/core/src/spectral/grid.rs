//! Uniform tensor grids on a flat torus and fields sampled on them.
//!
//! Fourier coefficients use the convention `u(x) = Σ_k û_k e^{iξ_k·x}`, so
//! `û = FFT(u)/N` and `‖u‖² = vol · Σ |û_k|²`.

use super::SpectralError;
use crate::rational::{q, to_f64, Q};
use crate::scene::Scene;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::TAU;
use std::sync::{Arc, OnceLock};

pub type C64 = Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub periods: Vec<f64>,
    pub res: Vec<usize>,
}

impl Grid {
    pub fn new(periods: Vec<f64>, res: Vec<usize>) -> Result<Self, SpectralError> {
        if periods.len() != res.len() || periods.is_empty() {
            return Err(SpectralError::ResolutionMismatch);
        }
        if let Some(&n) = res.iter().find(|&&n| n < 8 || !n.is_power_of_two()) {
            return Err(SpectralError::BadResolution(n));
        }
        if periods.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(SpectralError::BadParameter("periods must be positive".into()));
        }
        Ok(Grid { periods, res })
    }

    pub fn uniform(periods: &[f64], n: usize) -> Result<Self, SpectralError> {
        Grid::new(periods.to_vec(), vec![n; periods.len()])
    }

    pub fn dim(&self) -> usize {
        self.res.len()
    }

    pub fn len(&self) -> usize {
        self.res.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.periods[axis] / self.res[axis] as f64
    }

    pub fn volume(&self) -> f64 {
        self.periods.iter().product()
    }

    pub fn cell_volume(&self) -> f64 {
        self.volume() / self.len() as f64
    }

    /// Row-major multi-index of a flat index, last axis fastest.
    pub fn index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            idx[a] = flat % self.res[a];
            flat /= self.res[a];
        }
        idx
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.index(flat).iter().enumerate().map(|(a, &i)| i as f64 * self.spacing(a)).collect()
    }

    /// Signed integer frequency of index `i` on an axis of `n` points.
    pub fn mode(i: usize, n: usize) -> i64 {
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    pub fn wavevector(&self, flat: usize) -> Vec<f64> {
        self.index(flat)
            .iter()
            .enumerate()
            .map(|(a, &i)| TAU * Grid::mode(i, self.res[a]) as f64 / self.periods[a])
            .collect()
    }

    pub fn xi2(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.wavevector(k).iter().map(|x| x * x).sum()).collect()
    }

    pub fn max_frequency(&self) -> f64 {
        (0..self.dim()).map(|a| TAU * (self.res[a] / 2) as f64 / self.periods[a]).fold(0.0, f64::max)
    }

    /// Flat index of the integer mode `k`.
    pub fn flat_of_mode(&self, k: &[i64]) -> usize {
        k.iter().zip(&self.res).fold(0, |acc, (&m, &n)| acc * n + m.rem_euclid(n as i64) as usize)
    }
}

/// Cached FFT plans for one grid.
#[derive(Clone)]
pub struct FftPlan {
    grid: Grid,
    fwd: Vec<Arc<dyn Fft<f64>>>,
    inv: Vec<Arc<dyn Fft<f64>>>,
}

impl FftPlan {
    pub fn new(grid: &Grid) -> Self {
        let mut planner = FftPlanner::new();
        FftPlan {
            grid: grid.clone(),
            fwd: grid.res.iter().map(|&n| planner.plan_fft_forward(n)).collect(),
            inv: grid.res.iter().map(|&n| planner.plan_fft_inverse(n)).collect(),
        }
    }

    fn run(&self, data: &mut [C64], inverse: bool) {
        let d = self.grid.dim();
        let res = &self.grid.res;
        for a in 0..d {
            let plan = if inverse { &self.inv[a] } else { &self.fwd[a] };
            let n = res[a];
            let stride: usize = res[a + 1..].iter().product();
            if stride == 1 {
                data.par_chunks_mut(n).for_each(|row| plan.process(row));
                continue;
            }
            let block = n * stride;
            data.par_chunks_mut(block).for_each(|chunk| {
                let mut line = vec![C64::new(0.0, 0.0); n];
                for s in 0..stride {
                    for i in 0..n {
                        line[i] = chunk[i * stride + s];
                    }
                    plan.process(&mut line);
                    for i in 0..n {
                        chunk[i * stride + s] = line[i];
                    }
                }
            });
        }
    }

    /// Samples to coefficients.
    pub fn forward(&self, data: &mut [C64]) {
        self.run(data, false);
        let s = 1.0 / data.len() as f64;
        data.par_iter_mut().for_each(|x| *x *= s);
    }

    /// Coefficients to samples.
    pub fn inverse(&self, data: &mut [C64]) {
        self.run(data, true);
    }
}

#[derive(Debug, Clone)]
pub struct GridField {
    grid: Grid,
    data: Vec<C64>,
    coeffs: OnceLock<Vec<C64>>,
}

impl PartialEq for GridField {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.data == other.data
    }
}

impl GridField {
    pub fn zeros(grid: &Grid) -> Self {
        GridField::from_samples(grid, vec![C64::new(0.0, 0.0); grid.len()]).unwrap()
    }

    pub fn from_samples(grid: &Grid, data: Vec<C64>) -> Result<Self, SpectralError> {
        if data.len() != grid.len() {
            return Err(SpectralError::ResolutionMismatch);
        }
        Ok(GridField { grid: grid.clone(), data, coeffs: OnceLock::new() })
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(&[f64]) -> C64 + Sync) -> Self {
        let data = (0..grid.len()).into_par_iter().map(|k| f(&grid.point(k))).collect();
        GridField { grid: grid.clone(), data, coeffs: OnceLock::new() }
    }

    pub fn from_coefficients(grid: &Grid, mut coeffs: Vec<C64>) -> Result<Self, SpectralError> {
        if coeffs.len() != grid.len() {
            return Err(SpectralError::ResolutionMismatch);
        }
        let c = coeffs.clone();
        FftPlan::new(grid).inverse(&mut coeffs);
        let f = GridField { grid: grid.clone(), data: coeffs, coeffs: OnceLock::new() };
        let _ = f.coeffs.set(c);
        Ok(f)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[C64] {
        &self.data
    }

    /// Mutable samples; drops the cached coefficients.
    pub fn samples_mut(&mut self) -> &mut [C64] {
        self.coeffs = OnceLock::new();
        &mut self.data
    }

    pub fn into_samples(self) -> Vec<C64> {
        self.data
    }

    pub fn coefficients(&self) -> &[C64] {
        self.coeffs.get_or_init(|| {
            let mut c = self.data.clone();
            FftPlan::new(&self.grid).forward(&mut c);
            c
        })
    }

    fn check(&self, other: &GridField) -> Result<(), SpectralError> {
        if self.grid != other.grid {
            return Err(SpectralError::ResolutionMismatch);
        }
        Ok(())
    }

    /// `∫ u v̄`.
    pub fn inner(&self, other: &GridField) -> Result<C64, SpectralError> {
        self.check(other)?;
        let s: C64 = self.data.iter().zip(&other.data).map(|(a, b)| a * b.conj()).sum();
        Ok(s * self.grid.cell_volume())
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `‖u‖` from the coefficients.
    pub fn coefficient_norm(&self) -> f64 {
        (self.coefficients().iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.volume()).sqrt()
    }

    /// `‖w^{1/2} u‖` for a nonnegative real weight field.
    pub fn weighted_norm(&self, weight: &GridField) -> Result<f64, SpectralError> {
        self.check(weight)?;
        let s: f64 = self.data.iter().zip(&weight.data).map(|(a, w)| w.re * a.norm_sqr()).sum();
        Ok((s * self.grid.cell_volume()).sqrt())
    }

    pub fn scale(&mut self, s: f64) {
        self.samples_mut().iter_mut().for_each(|x| *x *= s);
    }

    pub fn sub(&self, other: &GridField) -> Result<GridField, SpectralError> {
        self.check(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        GridField::from_samples(&self.grid, data)
    }

    /// Pointwise product with a real function of position.
    pub fn multiply(&self, f: impl Fn(&[f64]) -> f64 + Sync) -> GridField {
        let data = self.data.par_iter().enumerate().map(|(k, x)| x * f(&self.grid.point(k))).collect();
        GridField { grid: self.grid.clone(), data, coeffs: OnceLock::new() }
    }

    /// Applies the symbol `m(ξ)` to the coefficients.
    pub fn apply_symbol(&self, m: impl Fn(&[f64]) -> C64 + Sync) -> GridField {
        let c: Vec<C64> =
            self.coefficients().par_iter().enumerate().map(|(k, x)| x * m(&self.grid.wavevector(k))).collect();
        GridField::from_coefficients(&self.grid, c).unwrap()
    }

    /// `(h²Δ + 1) u`.
    pub fn helmholtz(&self, h: f64) -> GridField {
        self.apply_symbol(|xi| C64::new(1.0 - h * h * xi.iter().map(|x| x * x).sum::<f64>(), 0.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }
}

/// Grid point `i` on an axis as an exact rational.
fn coordinate(period: &Q, i: usize, n: usize) -> Q {
    period * Q::new((i as i64).into(), (n as i64).into())
}

/// 1 on the closed support, 0 elsewhere.
pub fn rasterize_damping(scene: &Scene, res: &[usize]) -> Result<GridField, SpectralError> {
    let periods = scene.torus.periods();
    let grid = Grid::new(scene.torus.periods_f64(), res.to_vec())?;
    let zero = vec![q(0); periods.len()];
    // (halfspaces in f64, polyhedron index, lattice vector) per translate meeting the cell
    let mut translates = Vec::new();
    for (i, p) in scene.damping.polyhedra.iter().enumerate() {
        let (lo, hi) = scene.bbox(i);
        for shift in scene.torus.shifts_meeting(lo, hi, &zero, periods) {
            let gam = scene.torus.lattice_vector(&shift);
            let gf: Vec<f64> = gam.iter().map(to_f64).collect();
            let faces: Vec<(Vec<f64>, f64)> = p
                .halfspaces
                .iter()
                .map(|h| {
                    let n: Vec<f64> = h.normal.iter().map(to_f64).collect();
                    let c = to_f64(&h.offset) + n.iter().zip(&gf).map(|(a, b)| a * b).sum::<f64>();
                    (n, c)
                })
                .collect();
            translates.push((faces, i, gam));
        }
    }
    let data = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let idx = grid.index(k);
            let x = grid.point(k);
            let inside = translates.iter().any(|(faces, i, gam)| {
                let mut near = false;
                for (n, c) in faces {
                    let s = c - n.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>();
                    let scale = 1e-9 * (1.0 + c.abs());
                    if s < -scale {
                        return false;
                    }
                    near |= s <= scale;
                }
                if !near {
                    return true;
                }
                let xq: Vec<Q> =
                    idx.iter().enumerate().map(|(a, &j)| coordinate(&periods[a], j, res[a]) - &gam[a]).collect();
                scene.damping.polyhedra[*i].contains_closed(&xq)
            });
            C64::new(if inside { 1.0 } else { 0.0 }, 0.0)
        })
        .collect();
    GridField::from_samples(&grid, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::preset_scene;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn grid_validation() {
        assert!(matches!(Grid::new(vec![1.0], vec![4]), Err(SpectralError::BadResolution(4))));
        assert!(matches!(Grid::new(vec![1.0], vec![12]), Err(SpectralError::BadResolution(12))));
        assert!(Grid::new(vec![1.0, 2.0], vec![8]).is_err());
        assert_eq!(Grid::mode(5, 8), -3);
    }

    #[test]
    fn single_mode_coefficient() {
        let g = Grid::new(vec![2.0, 1.0], vec![16, 8]).unwrap();
        let f = GridField::from_fn(&g, |x| C64::from_polar(1.0, TAU * (3.0 * x[0] / 2.0 - 2.0 * x[1])));
        let c = f.coefficients();
        let k = g.flat_of_mode(&[3, -2]);
        assert!((c[k] - C64::new(1.0, 0.0)).norm() < 1e-13);
        let rest: f64 = c.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, x)| x.norm()).sum();
        assert!(rest < 1e-12);
        assert_eq!(g.wavevector(k), vec![TAU * 3.0 / 2.0, -TAU * 2.0]);
    }

    #[test]
    fn laplacian_of_a_cosine() {
        let g = Grid::uniform(&[2.0, 2.0], 32).unwrap();
        let pi = std::f64::consts::PI;
        let u = GridField::from_fn(&g, |x| C64::new((pi * x[0]).cos(), 0.0));
        let f = u.helmholtz(0.1);
        let want = GridField::from_fn(&g, |x| C64::new((1.0 - 0.01 * pi * pi) * (pi * x[0]).cos(), 0.0));
        assert!(f.sub(&want).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn rasterized_presets() {
        let empty = Scene::new(
            crate::scene::FlatTorus::from_ints(&[1, 1]).unwrap(),
            crate::scene::Damping::new(vec![]),
        )
        .unwrap();
        assert_eq!(rasterize_damping(&empty, &[8, 8]).unwrap().max_abs(), 0.0);
        let full = rasterize_damping(&preset_scene("full:2").unwrap(), &[16, 16]).unwrap();
        assert!(full.samples().iter().all(|x| x.re == 1.0));
        // closed support: the boundary row x2 = 1 of band2d is damped
        let band = rasterize_damping(&preset_scene("band2d").unwrap(), &[8, 8]).unwrap();
        let g = band.grid().clone();
        for k in 0..g.len() {
            let x2 = g.point(k)[1];
            assert_eq!(band.samples()[k].re, if x2 >= 1.0 || x2 == 0.0 { 1.0 } else { 0.0 }, "{x2}");
        }
    }

    /// Volume of a union of boxes by inclusion-exclusion.
    fn union_volume(boxes: &[(Vec<f64>, Vec<f64>)]) -> f64 {
        let n = boxes.len();
        let mut total = 0.0;
        for mask in 1u32..(1 << n) {
            let mut lo = vec![f64::NEG_INFINITY; boxes[0].0.len()];
            let mut hi = vec![f64::INFINITY; boxes[0].0.len()];
            for (i, (l, h)) in boxes.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    for j in 0..l.len() {
                        lo[j] = lo[j].max(l[j]);
                        hi[j] = hi[j].min(h[j]);
                    }
                }
            }
            let v: f64 = lo.iter().zip(&hi).map(|(l, h)| (h - l).max(0.0)).product();
            total += if mask.count_ones() % 2 == 1 { v } else { -v };
        }
        total
    }

    #[test]
    fn cube_tunnel_volume() {
        let s = preset_scene("fig5_1").unwrap();
        let boxes: Vec<(Vec<f64>, Vec<f64>)> = (0..s.damping.polyhedra.len())
            .map(|i| {
                let (l, h) = s.bbox(i);
                (l.iter().map(to_f64).collect(), h.iter().map(to_f64).collect())
            })
            .collect();
        let vol = union_volume(&boxes);
        // the undamped tunnel minus the prisms has volume 1.5
        assert!((vol - 6.5).abs() < 1e-12);
        let n = 64;
        let a = rasterize_damping(&s, &[n; 3]).unwrap();
        let frac = a.samples().iter().map(|x| x.re).sum::<f64>() / a.grid().len() as f64;
        // one cell layer per boundary face
        let area: f64 = boxes
            .iter()
            .map(|(l, h)| {
                let e: Vec<f64> = l.iter().zip(h).map(|(a, b)| b - a).collect();
                2.0 * (e[0] * e[1] + e[1] * e[2] + e[0] * e[2])
            })
            .sum();
        let tol = area * (2.0 / n as f64) / 8.0;
        assert!((frac - vol / 8.0).abs() <= tol, "{frac} vs {}", vol / 8.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn parseval(seed in 0u64..1000, n in prop::sample::select(vec![8usize, 16, 32])) {
            let g = Grid::new(vec![1.0, 1.5], vec![n, 8]).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let data = (0..g.len()).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let f = GridField::from_samples(&g, data).unwrap();
            prop_assert!((f.norm() - f.coefficient_norm()).abs() <= 1e-10 * f.norm());
            let back = GridField::from_coefficients(&g, f.coefficients().to_vec()).unwrap();
            prop_assert!(back.sub(&f).unwrap().max_abs() <= 1e-12);
        }
    }
}
