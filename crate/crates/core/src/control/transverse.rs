//! Quotienting the torus by a rational subspace `F`.
//!
//! Orbits `X0 + F` are points of the transversal `R^m / π(Γ)`, `m = d - dim F`,
//! obtained by zeroing the pivot coordinates of `F`. Each polyhedron projects
//! to a polytope (Fourier–Motzkin along `F`); an orbit avoids every open
//! polyhedron exactly when its transverse point avoids every open projection.
//! The projected lattice is the box lattice `∏ A_j Z` over the kept axes plus
//! a finite group generated by the images of the eliminated axes.

use super::arrangement::Arrangement;
use crate::lp::{Lp, LpOutcome};
use crate::rational::{dot, mod_q, rref, to_f64, Q};
use crate::scene::{fold_point, Scene};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;

const GROUP_LIMIT: usize = 4096;

struct OpenPiece {
    rows: Vec<(Vec<Q>, Q)>,
    rows_f: Vec<(Vec<f64>, f64)>,
    lo_f: Vec<f64>,
    hi_f: Vec<f64>,
}

impl OpenPiece {
    fn new(rows: Vec<(Vec<Q>, Q)>, lo: &[Q], hi: &[Q]) -> Self {
        let rows_f = rows
            .iter()
            .map(|(g, c)| {
                let gf: Vec<f64> = g.iter().map(to_f64).collect();
                let s = gf.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                (gf.iter().map(|x| x / s).collect(), to_f64(c) / s)
            })
            .collect();
        OpenPiece { rows, rows_f, lo_f: lo.iter().map(to_f64).collect(), hi_f: hi.iter().map(to_f64).collect() }
    }

    /// Strict membership, decided in floating point when the margin is safe.
    fn contains(&self, y: &[Q], yf: &[f64]) -> bool {
        const EPS: f64 = 1e-9;
        if yf.iter().zip(&self.lo_f).any(|(a, b)| *a < b - EPS) || yf.iter().zip(&self.hi_f).any(|(a, b)| *a > b + EPS) {
            return false;
        }
        let mut sure = true;
        for (g, c) in &self.rows_f {
            let s = c - g.iter().zip(yf).map(|(a, b)| a * b).sum::<f64>();
            if s < -EPS {
                return false;
            }
            if s <= EPS {
                sure = false;
            }
        }
        if sure {
            return true;
        }
        self.rows.iter().all(|(g, c)| (c - dot(g, y)).is_positive())
    }
}

pub(crate) struct Transversal {
    pub pivots: Vec<usize>,
    pub free: Vec<usize>,
    /// RREF rows spanning F, in ambient coordinates.
    pub rows: Vec<Vec<Q>>,
    pub lo: Vec<Q>,
    pub hi: Vec<Q>,
    pub group: Vec<Vec<Q>>,
    pieces: Vec<OpenPiece>,
    hyps: Vec<(Vec<Q>, Q)>,
}

impl Transversal {
    /// `None` when the projected lattice group is unreasonably large.
    pub fn new(scene: &Scene, span: &[Vec<Q>]) -> Option<Self> {
        let d = scene.dim();
        let (rows, pivots) = rref(span);
        let free: Vec<usize> = (0..d).filter(|j| !pivots.contains(j)).collect();
        let per = scene.torus.periods();
        let lo: Vec<Q> = free.iter().map(|_| Q::zero()).collect();
        let hi: Vec<Q> = free.iter().map(|&j| per[j].clone()).collect();

        // finite group generated by the eliminated axes, reduced into the box
        let gens: Vec<Vec<Q>> = rows
            .iter()
            .zip(&pivots)
            .map(|(r, &p)| free.iter().map(|&j| -(&per[p] * &r[j])).collect())
            .collect();
        let reduce = |v: &[Q]| -> Vec<Q> { v.iter().zip(&hi).map(|(x, a)| mod_q(x, a)).collect() };
        let mut group: BTreeSet<Vec<Q>> = BTreeSet::new();
        let zero = vec![Q::zero(); free.len()];
        group.insert(zero.clone());
        let mut frontier = vec![zero];
        while let Some(x) = frontier.pop() {
            for g in &gens {
                let y = reduce(&crate::rational::add(&x, g));
                if group.insert(y.clone()) {
                    if group.len() > GROUP_LIMIT {
                        return None;
                    }
                    frontier.push(y);
                }
            }
        }
        let group: Vec<Vec<Q>> = group.into_iter().collect();

        let mut t = Transversal { pivots, free, rows, lo, hi, group, pieces: Vec::new(), hyps: Vec::new() };
        let mut hyps = BTreeSet::new();
        for (i, p) in scene.damping.polyhedra.iter().enumerate() {
            let proj = t.project(p);
            let (plo, phi) = t.projected_bbox(scene, i);
            for g in &t.group {
                let glo: Vec<Q> = plo.iter().zip(g).map(|(a, b)| a + b).collect();
                let ghi: Vec<Q> = phi.iter().zip(g).map(|(a, b)| a + b).collect();
                for k in box_shifts(&glo, &ghi, &t.lo, &t.hi) {
                    let tau: Vec<Q> = g.iter().zip(&k).zip(&t.hi).map(|((g, k), a)| g + Q::from_integer((*k).into()) * a).collect();
                    let rows: Vec<(Vec<Q>, Q)> = proj.iter().map(|(a, c)| (a.clone(), c + dot(a, &tau))).collect();
                    for (a, c) in &rows {
                        let lead = a.iter().find(|x| !x.is_zero()).unwrap().clone();
                        hyps.insert((a.iter().map(|x| x / &lead).collect::<Vec<Q>>(), c / &lead));
                    }
                    let plo_t: Vec<Q> = plo.iter().zip(&tau).map(|(a, b)| a + b).collect();
                    let phi_t: Vec<Q> = phi.iter().zip(&tau).map(|(a, b)| a + b).collect();
                    t.pieces.push(OpenPiece::new(rows, &plo_t, &phi_t));
                }
            }
        }
        t.hyps = hyps.into_iter().collect();
        Some(t)
    }

    pub fn dim(&self) -> usize {
        self.free.len()
    }

    /// Ambient point with the transverse coordinates `y` and zero pivots.
    pub fn lift(&self, y: &[Q], d: usize) -> Vec<Q> {
        let mut x = vec![Q::zero(); d];
        for (v, &j) in y.iter().zip(&self.free) {
            x[j] = v.clone();
        }
        x
    }

    #[cfg(test)]
    pub fn project_point(&self, x: &[Q]) -> Vec<Q> {
        let mut y: Vec<Q> = self.free.iter().map(|&j| x[j].clone()).collect();
        for (r, &p) in self.rows.iter().zip(&self.pivots) {
            if !x[p].is_zero() {
                for (yi, &j) in y.iter_mut().zip(&self.free) {
                    *yi -= &x[p] * &r[j];
                }
            }
        }
        y
    }

    /// Lexicographically least representative of the orbit of `y` under the projected lattice.
    pub fn canonical(&self, y: &[Q]) -> Vec<Q> {
        self.group
            .iter()
            .map(|g| y.iter().zip(g).zip(&self.hi).map(|((a, b), p)| mod_q(&(a + b), p)).collect::<Vec<Q>>())
            .min()
            .unwrap()
    }

    /// Is `y` outside every open projected polytope?
    pub fn avoids_open(&self, y: &[Q]) -> bool {
        let yf: Vec<f64> = y.iter().map(to_f64).collect();
        !self.pieces.iter().any(|p| p.contains(y, &yf))
    }

    /// One point per arrangement cell of the transversal box lying outside every open projection.
    pub fn candidates(&self) -> Vec<Vec<Q>> {
        if self.dim() == 0 {
            return if self.pieces.is_empty() { vec![vec![]] } else { vec![] };
        }
        let keep = |y: &[Q]| self.avoids_open(y);
        let mut arr = Arrangement::new(self.hyps.clone(), &self.lo, &self.hi, &keep);
        arr.representatives().into_iter().map(|(y, _)| y).collect()
    }

    /// Strict facet description `a·y < c` of the projection of `P` along `F`.
    fn project(&self, p: &crate::scene::Polyhedron) -> Vec<(Vec<Q>, Q)> {
        let m = self.dim();
        let k = self.rows.len();
        // variables: y (m) then s (k)
        let mut sys: Vec<(Vec<Q>, Q)> = p
            .halfspaces
            .iter()
            .map(|h| {
                let mut a: Vec<Q> = self.free.iter().map(|&j| h.normal[j].clone()).collect();
                for r in &self.rows {
                    a.push(dot(&h.normal, r));
                }
                (a, h.offset.clone())
            })
            .collect();
        for e in (0..k).rev() {
            let col = m + e;
            let (mut keep, mut pos, mut neg) = (Vec::new(), Vec::new(), Vec::new());
            for (a, c) in sys {
                if a[col].is_zero() {
                    keep.push((a, c));
                } else if a[col].is_positive() {
                    pos.push((a, c));
                } else {
                    neg.push((a, c));
                }
            }
            for (ap, cp) in &pos {
                for (an, cn) in &neg {
                    let wp = Q::one() / &ap[col];
                    let wn = Q::one() / (-an[col].clone());
                    let a: Vec<Q> = ap.iter().zip(an).map(|(x, y)| x * &wp + y * &wn).collect();
                    keep.push((a, cp * &wp + cn * &wn));
                }
            }
            for (a, _) in keep.iter_mut() {
                a.truncate(col);
            }
            sys = prune(keep, col);
        }
        sys
    }

    fn projected_bbox(&self, scene: &Scene, i: usize) -> (Vec<Q>, Vec<Q>) {
        let p = &scene.damping.polyhedra[i];
        let d = scene.dim();
        let mut lp = Lp::new(d);
        for h in &p.halfspaces {
            lp.le(h.normal.clone(), h.offset.clone());
        }
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        for &j in &self.free {
            // y_j = x_j - Σ x_p r[j]
            let mut c = vec![Q::zero(); d];
            c[j] = Q::one();
            for (r, &p) in self.rows.iter().zip(&self.pivots) {
                c[p] -= &r[j];
            }
            match (lp.minimize(&c), lp.maximize(&c)) {
                (LpOutcome::Optimal { value: a, .. }, LpOutcome::Optimal { value: b, .. }) => {
                    lo.push(a);
                    hi.push(b);
                }
                _ => unreachable!("validated polyhedra are bounded"),
            }
        }
        (lo, hi)
    }
}

/// Drops trivial and redundant rows of `a·x <= c` (x of length `n`).
fn prune(rows: Vec<(Vec<Q>, Q)>, n: usize) -> Vec<(Vec<Q>, Q)> {
    let mut uniq: BTreeSet<(Vec<Q>, Q)> = BTreeSet::new();
    for (a, c) in rows {
        match a.iter().find(|x| !x.is_zero()).cloned() {
            None => continue,
            Some(lead) => {
                let s = lead.abs();
                uniq.insert((a.iter().map(|x| x / &s).collect(), c / s));
            }
        }
    }
    let mut rows: Vec<(Vec<Q>, Q)> = uniq.into_iter().collect();
    let mut i = 0;
    while i < rows.len() {
        let mut lp = Lp::new(n);
        for (j, (a, c)) in rows.iter().enumerate() {
            if j != i {
                lp.le(a.clone(), c.clone());
            }
        }
        // keep the row bounded so a lone row is never "redundant"
        let (a, c) = &rows[i];
        lp.le(a.clone(), c + Q::one());
        let redundant = match lp.maximize(a) {
            LpOutcome::Optimal { value, .. } => value <= *c,
            _ => false,
        };
        if redundant {
            rows.remove(i);
        } else {
            i += 1;
        }
    }
    rows
}

/// Integer shifts `k` with `[lo, hi] + k·A` meeting the box `[0, A]`.
fn box_shifts(lo: &[Q], hi: &[Q], blo: &[Q], bhi: &[Q]) -> Vec<Vec<i64>> {
    use num_traits::ToPrimitive;
    let mut out: Vec<Vec<i64>> = vec![vec![]];
    for j in 0..lo.len() {
        let a = &bhi[j] - &blo[j];
        let kmin = ((&blo[j] - &hi[j]) / &a).ceil().to_integer().to_i64().unwrap();
        let kmax = ((&bhi[j] - &lo[j]) / &a).floor().to_integer().to_i64().unwrap();
        let mut next = Vec::new();
        for pre in &out {
            for k in kmin..=kmax {
                let mut v = pre.clone();
                v.push(k);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Folded ambient base point of the orbit with transverse point `y`.
pub(crate) fn base_point(scene: &Scene, t: &Transversal, y: &[Q]) -> Vec<Q> {
    fold_point(&scene.torus, &t.lift(y, scene.dim()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};
    use crate::scene::preset_scene;

    #[test]
    fn vertical_projection_of_cube_tunnel() {
        let s = preset_scene("fig5_1").unwrap();
        let v = vec![q(0), q(0), q(2)];
        let t = Transversal::new(&s, &[v]).unwrap();
        assert_eq!(t.free, vec![0, 1]);
        assert_eq!(t.group.len(), 1);
        // the axis x = 0 avoids every open projection, the cube interiors do not
        assert!(t.avoids_open(&[q(0), q(0)]));
        assert!(!t.avoids_open(&[qf(1, 4), qf(1, 4)]));
        assert!(!t.avoids_open(&[q(1), qf(1, 4)]));
        let c = t.candidates();
        assert!(c.contains(&vec![q(0), q(0)]));
        assert!(c.iter().all(|y| t.avoids_open(y)));
    }

    #[test]
    fn diagonal_group_and_canonical() {
        let s = preset_scene("checkerboard2d:a").unwrap();
        let t = Transversal::new(&s, &[vec![q(1), q(1)]]).unwrap();
        assert_eq!(t.dim(), 1);
        // y = x2 - x1 on [0,1): the group is trivial mod 1
        assert_eq!(t.canonical(&[qf(3, 2)]), vec![qf(1, 2)]);
        let c = t.candidates();
        assert!(c.contains(&vec![qf(1, 2)]) || c.contains(&vec![q(0)]));
    }

    #[test]
    fn projection_of_triangle() {
        let t2 = crate::scene::FlatTorus::from_ints(&[4, 4]).unwrap();
        let tri = crate::scene::Polyhedron::new(vec![
            crate::scene::HalfSpace::new(vec![q(-1), q(0)], q(0)),
            crate::scene::HalfSpace::new(vec![q(0), q(-1)], q(0)),
            crate::scene::HalfSpace::new(vec![q(1), q(1)], q(1)),
        ]);
        let s = Scene::new(t2, crate::scene::Damping::new(vec![tri])).unwrap();
        // along (1,0): pivots x, keeps y in (0,1)
        let t = Transversal::new(&s, &[vec![q(4), q(0)]]).unwrap();
        assert!(t.avoids_open(&[q(0)]));
        assert!(!t.avoids_open(&[qf(1, 2)]));
        assert!(t.avoids_open(&[q(1)]));
        assert!(t.avoids_open(&[q(2)]));
    }

    proptest::proptest! {
        #[test]
        fn canonical_key_is_a_torus_invariant(
            x in proptest::collection::vec(-12i64..12, 3),
            k in proptest::collection::vec(-2i64..=2, 3),
            n in proptest::collection::vec(-2i64..=2, 3),
        ) {
            proptest::prop_assume!(n.iter().any(|&v| v != 0));
            let s = preset_scene("fig5_1").unwrap();
            let v = s.torus.lattice_vector(&n);
            let t = Transversal::new(&s, &[v.clone()]).unwrap();
            let x: Vec<Q> = x.iter().map(|&a| qf(a, 4)).collect();
            let y = t.project_point(&x);
            proptest::prop_assert_eq!(t.project_point(&t.lift(&y, 3)), y.clone());
            let shifted = crate::rational::add(&crate::rational::add(&x, &s.torus.lattice_vector(&k)), &v);
            proptest::prop_assert_eq!(t.canonical(&t.project_point(&shifted)), t.canonical(&y));
            // membership in an open projection is a property of the orbit
            proptest::prop_assert_eq!(t.avoids_open(&t.canonical(&y)), t.avoids_open(&y.iter().zip(&t.hi).map(|(a, p)| mod_q(a, p)).collect::<Vec<_>>()));
        }
    }
}
