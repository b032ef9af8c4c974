//! Orthonormal changes of coordinates straightening a closed geodesic.
//!
//! One stage rotates a coordinate pair `(a, b)` so that the component
//! `(n_a A_a, n_b A_b)` of the direction lands on axis `a`, with new period
//! `S = (n_a² A_a² + n_b² A_b²)^{1/2}`. The other axis keeps a translation
//! identity: shifting it by `α` equals shifting axis `a` by `-β`. Stages are run
//! on the coordinates in reverse order so the direction ends up on the last
//! axis. Lengths are square roots of rationals; their squares are kept exactly
//! and every zero test uses them.

use crate::rational::{fmt_q, q, to_f64, Q};
use crate::scene::FlatTorus;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use thiserror::Error;

/// Search order for `(p, q)` when the caller does not fix it.
pub const DEFAULT_PQ: [(i64, i64); 8] = [(0, 1), (1, 0), (0, -1), (-1, 0), (1, 1), (1, -1), (-1, 1), (-1, -1)];

#[derive(Debug, Error, PartialEq)]
pub enum ReductionError {
    #[error("direction has {got} entries, expected {want}")]
    Dimension { got: usize, want: usize },
    #[error("direction {0:?} is not primitive")]
    NotPrimitive(Vec<i64>),
    #[error("both entries of the active pair are zero")]
    ZeroPair,
    #[error("alpha vanishes for (p, q) = ({p}, {q})")]
    DegenerateAlpha { p: i64, q: i64 },
    #[error("no (p, q) with |p|, |q| <= 1 gives a nonzero alpha")]
    Exhausted,
    #[error("dimension must be at least 2")]
    TooSmall,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionStep {
    pub stage: usize,
    /// Original axes `(a, b)` of the rotated pair; the direction ends on `a`.
    pub axes: (usize, usize),
    /// `d × d`, columns are the new basis vectors, in original coordinates.
    pub matrix: Vec<Vec<f64>>,
    pub s: f64,
    pub s2: Q,
    pub p: i64,
    pub q: i64,
    pub alpha: f64,
    pub beta: f64,
    pub alpha2: Q,
    pub beta2: Q,
}

impl ReductionStep {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "stage": self.stage,
            "axes": [self.axes.0, self.axes.1],
            "matrix": self.matrix.iter().map(|r| crate::json::nums(r)).collect::<Vec<_>>(),
            "s": crate::json::num(self.s),
            "s2": fmt_q(&self.s2),
            "p": self.p,
            "q": self.q,
            "alpha": crate::json::num(self.alpha),
            "beta": crate::json::num(self.beta),
            "alpha2": fmt_q(&self.alpha2),
            "beta2": fmt_q(&self.beta2),
        })
    }
}

/// One stage on a pair whose lengths are `sqrt(len2)`.
fn stage(
    d: usize,
    (ia, ib): (usize, usize),
    (na, la2): (i64, &Q),
    (nb, lb2): (i64, &Q),
    pq: Option<(i64, i64)>,
    index: usize,
) -> Result<ReductionStep, ReductionError> {
    if na == 0 && nb == 0 {
        return Err(ReductionError::ZeroPair);
    }
    let (p, qq) = match pq {
        Some((p, qq)) => {
            if qq * na - p * nb == 0 {
                return Err(ReductionError::DegenerateAlpha { p, q: qq });
            }
            (p, qq)
        }
        None => *DEFAULT_PQ.iter().find(|(p, qq)| qq * na - p * nb != 0).ok_or(ReductionError::Exhausted)?,
    };
    let s2 = q(na * na) * la2 + q(nb * nb) * lb2;
    let c = qq * na - p * nb;
    let alpha_s2 = la2 * lb2 * q(c * c);
    let beta_s = q(p * na) * la2 + q(qq * nb) * lb2;
    let alpha2 = &alpha_s2 / &s2;
    let beta2 = &beta_s * &beta_s / &s2;
    debug_assert!(!alpha2.is_zero());
    let s = to_f64(&s2).sqrt();
    let (la, lb) = (to_f64(la2).sqrt(), to_f64(lb2).sqrt());
    let alpha = c.signum() as f64 * to_f64(&alpha_s2).sqrt() / s;
    let beta = to_f64(&beta_s) / s;
    let xa = [na as f64 * la / s, nb as f64 * lb / s];
    let xb = [-(nb as f64) * lb / s, na as f64 * la / s];
    let mut m = identity(d);
    m[ia][ia] = xa[0];
    m[ib][ia] = xa[1];
    m[ia][ib] = xb[0];
    m[ib][ib] = xb[1];
    Ok(ReductionStep {
        stage: index,
        axes: (ia, ib),
        matrix: m,
        s,
        s2,
        p,
        q: qq,
        alpha,
        beta,
        alpha2,
        beta2,
    })
}

/// The single stage on the last pair `(d-1, d)` of `periods`, the direction landing on axis `d-1`.
pub fn build_step(periods: &[Q], n: &[i64], pq: Option<(i64, i64)>) -> Result<ReductionStep, ReductionError> {
    let d = periods.len();
    if d < 2 {
        return Err(ReductionError::TooSmall);
    }
    if n.len() != d {
        return Err(ReductionError::Dimension { got: n.len(), want: d });
    }
    let sq = |x: &Q| x * x;
    stage(d, (d - 2, d - 1), (n[d - 2], &sq(&periods[d - 2])), (n[d - 1], &sq(&periods[d - 1])), pq, d - 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionResult {
    pub periods: Vec<Q>,
    pub n: Vec<i64>,
    /// Nontrivial stages in the order they are applied to the direction.
    pub steps: Vec<ReductionStep>,
    /// Composite map, original coordinates, columns = new basis.
    pub matrix: Vec<Vec<f64>>,
    /// Pure periods of `u∘F` along the first `d-1` new axes (`None` where only a sheared identity holds).
    pub transverse_periods: Vec<Option<f64>>,
    /// Period of `u∘F` along the geodesic axis.
    pub axial_period: f64,
}

impl ReductionResult {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "periods": self.periods.iter().map(fmt_q).collect::<Vec<_>>(),
            "n": self.n,
            "steps": self.steps.iter().map(ReductionStep::to_json).collect::<Vec<_>>(),
            "matrix": self.matrix.iter().map(|r| crate::json::nums(r)).collect::<Vec<_>>(),
            "transverse_periods": self.transverse_periods.iter().map(|p| p.map(crate::json::num)).collect::<Vec<_>>(),
            "axial_period": crate::json::num(self.axial_period),
        })
    }

    /// `F⁻¹ Ξ_0` for the normalized direction.
    pub fn image_direction(&self) -> Vec<f64> {
        let xi = unit_direction(&self.periods, &self.n);
        mat_t_vec(&self.matrix, &xi)
    }
}

pub fn unit_direction(periods: &[Q], n: &[i64]) -> Vec<f64> {
    let v: Vec<f64> = periods.iter().zip(n).map(|(a, &k)| to_f64(a) * k as f64).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / norm).collect()
}

/// Straightens the closed geodesic of direction `n` onto the last axis.
pub fn reduce_geodesic(torus: &FlatTorus, n: &[i64], pq: Option<(i64, i64)>) -> Result<ReductionResult, ReductionError> {
    let d = torus.dim();
    if n.len() != d {
        return Err(ReductionError::Dimension { got: n.len(), want: d });
    }
    if n.iter().fold(0i64, |g, &x| g.gcd(&x)) != 1 {
        return Err(ReductionError::NotPrimitive(n.to_vec()));
    }
    let per = torus.periods();
    // reversed frame: position i holds original axis d-1-i
    let orig = |i: usize| d - 1 - i;
    let len2: Vec<Q> = (0..d).map(|i| &per[orig(i)] * &per[orig(i)]).collect();
    let mut pure: Vec<Option<f64>> = (0..d).map(|i| Some(to_f64(&per[orig(i)]))).collect();
    let mut b = (n[orig(d - 1)], len2[d - 1].clone());
    let mut steps = Vec::new();
    let mut matrix = identity(d);
    for j in (0..d - 1).rev() {
        let a = (n[orig(j)], len2[j].clone());
        if a.0 == 0 && b.0 == 0 {
            b = a;
            continue;
        }
        let st = stage(d, (orig(j), orig(j + 1)), (a.0, &a.1), (b.0, &b.1), pq, j + 1)?;
        pure[j] = Some(st.s);
        pure[j + 1] = if st.beta2.is_zero() { Some(st.alpha.abs()) } else { None };
        b = (1, st.s2.clone());
        let is_identity = st.matrix == identity(d);
        matrix = mat_mul(&matrix, &st.matrix);
        if !is_identity {
            steps.push(st);
        }
    }
    let transverse_periods = (0..d - 1).map(|k| pure[d - 1 - k]).collect();
    let axial_period = to_f64(&b.1).sqrt() * (b.0.abs() as f64);
    Ok(ReductionResult { periods: per.to_vec(), n: n.to_vec(), steps, matrix, transverse_periods, axial_period })
}

fn identity(d: usize) -> Vec<Vec<f64>> {
    (0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let d = a.len();
    (0..d).map(|i| (0..d).map(|j| (0..d).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

fn mat_vec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter().map(|r| r.iter().zip(x).map(|(u, v)| u * v).sum()).collect()
}

fn mat_t_vec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    (0..a.len()).map(|j| (0..a.len()).map(|i| a[i][j] * x[i]).sum()).collect()
}

/// `max |MᵀM - I|`.
pub fn orthonormality_defect(m: &[Vec<f64>]) -> f64 {
    let d = m.len();
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let dot: f64 = (0..d).map(|k| m[k][i] * m[k][j]).sum();
            worst = worst.max((dot - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    worst
}

/// A fixed smooth function periodic in every `A_j`, with three modes per axis and a few mixed ones.
pub struct TestFunction {
    periods: Vec<f64>,
    modes: Vec<(Vec<f64>, f64, f64)>,
}

impl TestFunction {
    pub fn new(periods: &[Q]) -> Self {
        let d = periods.len();
        let mut modes = Vec::new();
        for i in 0..d {
            for k in 1..=3 {
                let mut m = vec![0.0; d];
                m[i] = k as f64;
                modes.push((m, 1.0 / (k + i) as f64, 0.3 * (k * (i + 1)) as f64));
            }
        }
        for (t, pattern) in [[1.0, 1.0], [1.0, -1.0], [2.0, 1.0]].iter().enumerate() {
            let m: Vec<f64> = (0..d).map(|i| pattern[i % 2]).collect();
            modes.push((m, 0.5 / (t + 1) as f64, 0.7 + t as f64));
        }
        TestFunction { periods: periods.iter().map(to_f64).collect(), modes }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let tau = std::f64::consts::TAU;
        self.modes
            .iter()
            .map(|(m, c, phi)| {
                let arg: f64 = m.iter().zip(x).zip(&self.periods).map(|((k, x), a)| k * x / a).sum();
                c * (tau * arg + phi).cos()
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicityReport {
    pub trials: usize,
    pub per_step: Vec<f64>,
    pub max_discrepancy: f64,
}

impl PeriodicityReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "trials": self.trials,
            "per_step": crate::json::nums(&self.per_step),
            "max_discrepancy": crate::json::num(self.max_discrepancy),
        })
    }
}

/// Checks every stage's translation identity on random lattice shifts.
///
/// For the stage on axes `(a, b)` preceded by the composite `G`, with `w = u∘G`:
/// `w∘F(x + Σ k_i L_i + k_a S e_a + k_b α e_b) = w∘F(x - k_b β e_a)`, where the
/// `L_i` are the pure periods of the axes not yet touched.
pub fn verify_periodicity(result: &ReductionResult, trials: usize, seed: u64) -> PeriodicityReport {
    let d = result.periods.len();
    let u = TestFunction::new(&result.periods);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut prefix = identity(d);
    let mut per_step = Vec::new();
    // pure periods along each original axis before the current stage
    let mut pure: Vec<f64> = result.periods.iter().map(to_f64).collect();
    let mut done = vec![false; d];
    for st in &result.steps {
        let (a, b) = st.axes;
        // axes still periodic: untouched ones, plus `b`, which carries the previous stage's period
        let mut worst: f64 = 0.0;
        for _ in 0..trials {
            let x: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
            let k: Vec<i64> = (0..d).map(|_| rng.gen_range(-3..=3)).collect();
            let mut lhs = x.clone();
            let mut rhs = x.clone();
            for i in 0..d {
                if i == a {
                    lhs[i] += k[i] as f64 * st.s;
                } else if i == b {
                    lhs[i] += k[i] as f64 * st.alpha;
                    rhs[a] -= k[i] as f64 * st.beta;
                } else if !done[i] {
                    lhs[i] += k[i] as f64 * pure[i];
                }
            }
            let eval = |y: &[f64]| u.eval(&mat_vec(&prefix, &mat_vec(&st.matrix, y)));
            worst = worst.max((eval(&lhs) - eval(&rhs)).abs());
        }
        per_step.push(worst);
        prefix = mat_mul(&prefix, &st.matrix);
        pure[a] = st.s;
        done[b] = true;
    }
    let max_discrepancy = per_step.iter().cloned().fold(0.0, f64::max);
    PeriodicityReport { trials, per_step, max_discrepancy }
}

/// The `α²S²` shadow is a nonzero rational for every stage.
pub fn alpha_certified(step: &ReductionStep) -> bool {
    !(&step.alpha2 * &step.s2).is_zero() && step.alpha2.is_positive()
}
