//! The one-dimensional resolvent estimate on `(-2, 2)`.

use super::SpectralError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Uniform samples of `v` and `k` on `[-2, 2]`, endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolventSample {
    pub tau: f64,
    pub v: Vec<f64>,
    pub k: Vec<f64>,
}

pub fn z_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| -2.0 + 4.0 * i as f64 / (n - 1) as f64).collect()
}

fn trapezoid(z: &[f64], f: impl Fn(usize) -> f64, keep: impl Fn(f64) -> bool) -> f64 {
    (1..z.len())
        .filter(|&i| keep(0.5 * (z[i - 1] + z[i])))
        .map(|i| 0.5 * (f(i - 1) + f(i)) * (z[i] - z[i - 1]))
        .sum()
}

/// `‖v‖_{L∞(-1,1)} / (‖v‖_{L²(1≤|z|≤2)} + (1+|τ|)^{-1/2}‖k‖_{L¹(-2,2)})`, after checking
/// `v'' + τv = k` by central differences to relative tolerance `tol`.
pub fn check_1d_resolvent(s: &ResolventSample, tol: f64) -> Result<f64, SpectralError> {
    let n = s.v.len();
    if n < 5 || s.k.len() != n {
        return Err(SpectralError::ResolutionMismatch);
    }
    let z = z_grid(n);
    let dz = z[1] - z[0];
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 1..n - 1 {
        let d2 = (s.v[i + 1] - 2.0 * s.v[i] + s.v[i - 1]) / (dz * dz);
        worst = worst.max((d2 + s.tau * s.v[i] - s.k[i]).abs());
        scale = scale.max(d2.abs()).max((s.tau * s.v[i]).abs()).max(s.k[i].abs());
    }
    if worst > tol * scale {
        return Err(SpectralError::ResidualCheck { residual: worst, scale });
    }
    let top = z.iter().zip(&s.v).filter(|(z, _)| z.abs() <= 1.0).map(|(_, v)| v.abs()).fold(0.0, f64::max);
    if top == 0.0 {
        return Ok(0.0);
    }
    let outer = trapezoid(&z, |i| s.v[i] * s.v[i], |m| m.abs() >= 1.0).sqrt();
    let l1 = trapezoid(&z, |i| s.k[i].abs(), |_| true);
    Ok(top / (outer + l1 / (1.0 + s.tau.abs()).sqrt()))
}

/// Exact pairs `(v, k)`: a homogeneous solution plus a Gaussian with its forcing.
///
/// `|τ|` is log-uniform on `[10^{-2}, 10^4]` with a random sign; the first two
/// members are `τ = ±10^4`.
pub fn resolvent_family(count: usize, n: usize, seed: u64) -> Vec<ResolventSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = z_grid(n);
    (0..count)
        .map(|i| {
            let tau = match i {
                0 => 1e4,
                1 => -1e4,
                _ => {
                    let mag = 10f64.powf(rng.gen_range(-2.0..4.0));
                    if rng.gen_bool(0.5) {
                        mag
                    } else {
                        -mag
                    }
                }
            };
            let c1: f64 = rng.gen_range(-1.0..1.0);
            let c2: f64 = rng.gen_range(-1.0..1.0);
            let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let (a, b): (f64, f64) = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
            let z0: f64 = rng.gen_range(-1.5..1.5);
            let sigma: f64 = rng.gen_range(0.2..1.0);
            let hom = |x: f64| {
                if tau > 0.0 {
                    (tau.sqrt() * x + phase).cos()
                } else {
                    let kappa = (-tau).sqrt();
                    a * (kappa * (x - 2.0)).exp() + b * (-kappa * (x + 2.0)).exp()
                }
            };
            let g = |x: f64| (-(x - z0).powi(2) / (2.0 * sigma * sigma)).exp();
            let g2 = |x: f64| ((x - z0).powi(2) / sigma.powi(4) - 1.0 / (sigma * sigma)) * g(x);
            let v = z.iter().map(|&x| c1 * hom(x) + c2 * g(x)).collect();
            let k = z.iter().map(|&x| c2 * (g2(x) + tau * g(x))).collect();
            ResolventSample { tau, v, k }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize, tau: f64, v: impl Fn(f64) -> f64, k: impl Fn(f64) -> f64) -> ResolventSample {
        let z = z_grid(n);
        ResolventSample { tau, v: z.iter().map(|&x| v(x)).collect(), k: z.iter().map(|&x| k(x)).collect() }
    }

    #[test]
    fn parabola() {
        let s = sample(4001, 0.0, |z| z * z, |_| 2.0);
        let c = check_1d_resolvent(&s, 1e-6).unwrap();
        let want = 1.0 / ((2.0 * 31.0 / 5.0f64).sqrt() + 8.0);
        assert!((c - want).abs() < 1e-5, "{c} {want}");
    }

    #[test]
    fn oscillating() {
        let s = sample(40001, 100.0, |z| (10.0 * z).cos(), |_| 0.0);
        let c = check_1d_resolvent(&s, 1e-4).unwrap();
        // ∫_1^2 cos²(10z) dz = 1/2 + (sin 40 - sin 20)/40
        let l2 = (2.0 * (0.5 + ((40.0f64).sin() - (20.0f64).sin()) / 40.0)).sqrt();
        assert!((c - 1.0 / l2).abs() < 1e-4 && c < 1.5);
    }

    #[test]
    fn zero_solution_and_bad_residual() {
        assert_eq!(check_1d_resolvent(&sample(101, 3.0, |_| 0.0, |_| 0.0), 1e-6).unwrap(), 0.0);
        let bad = sample(101, 1.0, |z| z.sin(), |_| 1.0);
        assert!(matches!(check_1d_resolvent(&bad, 1e-3), Err(SpectralError::ResidualCheck { .. })));
    }

    #[test]
    fn family_is_consistent() {
        for s in resolvent_family(10, 40001, 5) {
            let c = check_1d_resolvent(&s, 1e-3).unwrap();
            assert!(c.is_finite() && c >= 0.0);
        }
    }
}
