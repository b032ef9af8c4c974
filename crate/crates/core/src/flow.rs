//! The flow of `ζ·∂_z` projected to the unit sphere of `R^{d-1} × R^{d-1}`.
//!
//! The closed form moves `z` linearly and rescales. The angle integrator
//! rotates to a frame where `ζ = (ζ_1, 0, …)` and `z = (z_1, z_2, 0, …)`, and
//! then only `θ_1` moves: `θ_1' = -cos θ_2 sin² θ_1`.

use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint {
    pub z: Vec<f64>,
    pub zeta: Vec<f64>,
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl SpherePoint {
    /// Normalizes `(z, ζ)` onto the unit sphere.
    pub fn new(z: Vec<f64>, zeta: Vec<f64>) -> Self {
        assert_eq!(z.len(), zeta.len(), "z and zeta must have the same length");
        assert!(!z.is_empty());
        SpherePoint { z, zeta }.normalized()
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }

    pub fn normalized(mut self) -> Self {
        let r = (norm2(&self.z) + norm2(&self.zeta)).sqrt();
        assert!(r > 0.0, "the origin has no direction");
        self.z.iter_mut().chain(self.zeta.iter_mut()).for_each(|x| *x /= r);
        self
    }

    pub fn distance(&self, other: &SpherePoint) -> f64 {
        let a: f64 = self.z.iter().zip(&other.z).map(|(x, y)| (x - y).powi(2)).sum();
        let b: f64 = self.zeta.iter().zip(&other.zeta).map(|(x, y)| (x - y).powi(2)).sum();
        (a + b).sqrt()
    }

    pub fn is_fixed(&self) -> bool {
        norm2(&self.zeta).sqrt() <= 1e-12
    }
}

/// `(z_0 + sζ_0, ζ_0) / |(z_0 + sζ_0, ζ_0)|`.
pub fn flow_closed_form(p: &SpherePoint, s: f64) -> SpherePoint {
    if p.zeta.iter().all(|&w| w == 0.0) {
        return p.clone();
    }
    let z = p.z.iter().zip(&p.zeta).map(|(z, w)| z + s * w).collect();
    SpherePoint { z, zeta: p.zeta.clone() }.normalized()
}

/// Orthogonal matrix `Q` (rows) with `Q ζ = (ζ̃_1, 0, …)` and `Q z = (z̃_1, z̃_2, 0, …)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalFrame {
    pub rotation: Vec<Vec<f64>>,
    pub point: SpherePoint,
}

impl CanonicalFrame {
    pub fn apply(&self, p: &SpherePoint) -> SpherePoint {
        SpherePoint { z: mul(&self.rotation, &p.z), zeta: mul(&self.rotation, &p.zeta) }
    }

    pub fn undo(&self, p: &SpherePoint) -> SpherePoint {
        SpherePoint { z: mul_t(&self.rotation, &p.z), zeta: mul_t(&self.rotation, &p.zeta) }
    }
}

fn mul(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|r| dot(r, v)).collect()
}

fn mul_t(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    (0..v.len()).map(|j| m.iter().zip(v).map(|(r, x)| r[j] * x).sum()).collect()
}

fn det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c];
        for i in c + 1..n {
            let f = a[i][c] / a[c][c];
            for j in c..n {
                a[i][j] -= f * a[c][j];
            }
        }
    }
    d
}

/// One rotation acting on both `z` and `ζ`, so the vector field is unchanged.
pub fn rotate_to_canonical(p: &SpherePoint) -> CanonicalFrame {
    let m = p.dim();
    let eye: Vec<Vec<f64>> = (0..m).map(|i| (0..m).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    let zn = norm2(&p.zeta).sqrt();
    if zn == 0.0 {
        return CanonicalFrame { rotation: eye, point: p.clone() };
    }
    let sign_of = |v: &[f64], k: usize| if v.get(k).copied().unwrap_or(0.0) < 0.0 { -1.0 } else { 1.0 };
    let u1: Vec<f64> = p.zeta.iter().map(|x| x / zn * sign_of(&p.zeta, 0)).collect();
    let mut rows = vec![u1];
    let push_orth = |rows: &mut Vec<Vec<f64>>, v: &[f64], prefer: usize| -> bool {
        let mut w = v.to_vec();
        for r in rows.iter() {
            let c = dot(r, &w);
            w.iter_mut().zip(r).for_each(|(x, y)| *x -= c * y);
        }
        let n = norm2(&w).sqrt();
        if n <= 1e-12 * norm2(v).sqrt().max(1e-300) || n == 0.0 {
            return false;
        }
        let s = sign_of(&w, prefer);
        rows.push(w.iter().map(|x| x / n * s).collect());
        true
    };
    if m >= 2 {
        push_orth(&mut rows, &p.z, 1);
    }
    for k in 0..m {
        if rows.len() == m {
            break;
        }
        push_orth(&mut rows, &eye[k], k);
    }
    if det(&rows) < 0.0 {
        let last = rows.len() - 1;
        rows[last].iter_mut().for_each(|x| *x = -*x);
    }
    let frame = CanonicalFrame { rotation: rows, point: p.clone() };
    let mut point = frame.apply(p);
    point.zeta.iter_mut().skip(1).for_each(|x| *x = 0.0);
    point.z.iter_mut().skip(2).for_each(|x| *x = 0.0);
    CanonicalFrame { point, ..frame }
}

/// `θ_1, θ_2 ∈ [0, π]`, `θ_3 ∈ {0, π}` (the sign of `z̃_2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleState {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
}

impl AngleState {
    pub fn from_canonical(p: &SpherePoint) -> Self {
        let z1 = p.z[0];
        let z2 = p.z.get(1).copied().unwrap_or(0.0);
        let w1 = p.zeta[0];
        let theta1 = z1.clamp(-1.0, 1.0).acos();
        let rho = (z2 * z2 + w1 * w1).sqrt();
        let theta2 = if rho == 0.0 { 0.0 } else { (w1 / rho).clamp(-1.0, 1.0).acos() };
        let theta3 = if z2 < 0.0 { PI } else { 0.0 };
        AngleState { theta1, theta2, theta3 }
    }

    pub fn to_canonical(&self, m: usize) -> SpherePoint {
        let mut z = vec![0.0; m];
        let mut zeta = vec![0.0; m];
        z[0] = self.theta1.cos();
        zeta[0] = self.theta1.sin() * self.theta2.cos();
        if m >= 2 {
            z[1] = self.theta1.sin() * self.theta2.sin() * self.theta3.cos();
        }
        SpherePoint { z, zeta }
    }
}

fn rk4(theta: f64, c2: f64, h: f64) -> f64 {
    let f = |t: f64| -c2 * t.sin().powi(2);
    let k1 = f(theta);
    let k2 = f(theta + 0.5 * h * k1);
    let k3 = f(theta + 0.5 * h * k2);
    let k4 = f(theta + h * k3);
    theta + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// The flow by integrating the angle equation; `times` must be nondecreasing and start at or after 0.
pub fn angle_trajectory(p: &SpherePoint, times: &[f64], dt: f64) -> Vec<SpherePoint> {
    assert!(dt > 0.0, "dt must be positive");
    let frame = rotate_to_canonical(p);
    if p.is_fixed() {
        return times.iter().map(|_| p.clone()).collect();
    }
    let mut a = AngleState::from_canonical(&frame.point);
    let c2 = a.theta2.cos();
    let mut t = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        assert!(target >= t, "times must be nondecreasing");
        while t < target {
            let h = dt.min(target - t);
            a.theta1 = rk4(a.theta1, c2, h);
            t = if target - t <= dt { target } else { t + h };
        }
        out.push(frame.undo(&a.to_canonical(p.dim())).normalized());
    }
    out
}

pub fn flow_angle_ode(p: &SpherePoint, s: f64, dt: f64) -> SpherePoint {
    angle_trajectory(p, &[s], dt).pop().unwrap()
}

/// Exact solution of `θ' = -sin² θ`, continuous in `s`.
pub fn circle_flow_theta(theta0: f64, s: f64) -> f64 {
    let k = (theta0 / PI).floor();
    let phi0 = theta0 - k * PI;
    if phi0 == 0.0 || theta0.sin() == 0.0 {
        return theta0;
    }
    let c = phi0.cos() / phi0.sin() + s;
    k * PI + 1f64.atan2(c)
}
