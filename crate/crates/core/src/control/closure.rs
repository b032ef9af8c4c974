//! Does the closure `(X0 + F)/Γ` of a dense geodesic meet the interior of the support?
//!
//! `F ∩ Γ` has full rank in `F` because `F` is rational, so the coset is the
//! image of `X0 + Σ s_i L_i`, `s ∈ [0,1]^k`, for independent lattice vectors
//! `L_i ∈ F`. A point of some open polyhedron translate is found by linear
//! programming; failing that, the arrangement of face hyperplanes inside the
//! parameter box is searched for a cell that lies in the interior of the union.

use super::arrangement::Arrangement;
use super::{ControlError, Direction, Geodesic};
use crate::lp::strictly_feasible;
use crate::rational::{add, dot, fmt_q, rref, scale, Q};
use crate::scene::Scene;
use num_integer::Integer;
use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq)]
pub struct ClosureWitness {
    pub meets: bool,
    /// A point of the coset in the interior of the support.
    pub point: Option<Vec<Q>>,
}

impl ClosureWitness {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "meets": self.meets,
            "point": self.point.as_ref().map(|p| p.iter().map(fmt_q).collect::<Vec<_>>()),
        })
    }
}

/// Independent lattice vectors spanning `F`.
pub(crate) fn lattice_basis(scene: &Scene, basis: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let per = scene.torus.periods();
    let scaled: Vec<Vec<Q>> = basis.iter().map(|b| b.iter().zip(per).map(|(x, a)| x / a).collect()).collect();
    let (rows, _) = rref(&scaled);
    rows.into_iter()
        .map(|r| {
            let l = r.iter().fold(num_bigint::BigInt::one(), |l, x| l.lcm(x.denom()));
            let m = Q::from_integer(l);
            r.iter().zip(per).map(|(x, a)| x * &m * a).collect()
        })
        .collect()
}

pub fn orbit_closure_meets_interior(scene: &Scene, g: &Geodesic) -> Result<ClosureWitness, ControlError> {
    let Direction::Dense { basis, .. } = &g.direction else {
        return Err(ControlError::DenseBasis);
    };
    let lat = lattice_basis(scene, basis);
    let k = lat.len();
    let d = scene.dim();
    let x0 = &g.base;
    let point = |s: &[Q]| -> Vec<Q> {
        let mut x = x0.clone();
        for (si, l) in s.iter().zip(&lat) {
            x = add(&x, &scale(l, si));
        }
        x
    };
    // bounding box of the parametrized region
    let mut lo = x0.clone();
    let mut hi = x0.clone();
    for l in &lat {
        for j in 0..d {
            if l[j] < Q::zero() {
                lo[j] += &l[j];
            } else {
                hi[j] += &l[j];
            }
        }
    }
    let mut hyps = Vec::new();
    let box_rows: Vec<(Vec<Q>, Q)> = (0..k)
        .flat_map(|i| {
            let mut e = vec![Q::zero(); k];
            e[i] = Q::one();
            let ne: Vec<Q> = e.iter().map(|x| -x.clone()).collect();
            [(e, Q::one()), (ne, Q::zero())]
        })
        .collect();
    for (i, p) in scene.damping.polyhedra.iter().enumerate() {
        let (blo, bhi) = scene.bbox(i);
        for shift in scene.torus.shifts_meeting(blo, bhi, &lo, &hi) {
            let gam = scene.torus.lattice_vector(&shift);
            let rows: Vec<(Vec<Q>, Q)> = p
                .halfspaces
                .iter()
                .map(|h| {
                    let a: Vec<Q> = lat.iter().map(|l| dot(&h.normal, l)).collect();
                    let c = &h.offset - dot(&h.normal, x0) + dot(&h.normal, &gam);
                    (a, c)
                })
                .collect();
            if let Some(s) = strictly_feasible(k, &rows, &box_rows) {
                return Ok(ClosureWitness { meets: true, point: Some(point(&s)) });
            }
            for (a, c) in rows {
                if !a.iter().all(Zero::is_zero) {
                    hyps.push((a, c));
                }
            }
        }
    }
    let zero = vec![Q::zero(); k];
    let one = vec![Q::one(); k];
    let keep = |_: &[Q]| true;
    let mut arr = Arrangement::new(hyps, &zero, &one, &keep);
    for (s, dim) in arr.representatives() {
        if dim == k {
            let x = point(&s);
            if scene.classify_point(&x)?.is_interior() {
                return Ok(ClosureWitness { meets: true, point: Some(x) });
            }
        }
    }
    Ok(ClosureWitness { meets: false, point: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};
    use crate::scene::{preset_scene, Damping, FlatTorus, Polyhedron};

    fn e(d: usize, i: usize) -> Vec<Q> {
        let mut v = vec![q(0); d];
        v[i] = q(1);
        v
    }

    #[test]
    fn full_span_meets_any_damping() {
        let s = preset_scene("fig5_1").unwrap();
        let g = Geodesic::dense(&s.torus, &[q(0), q(0), q(0)], vec![e(3, 0), e(3, 1), e(3, 2)]).unwrap();
        assert!(orbit_closure_meets_interior(&s, &g).unwrap().meets);
    }

    #[test]
    fn plane_through_cube_tunnel() {
        let s = preset_scene("fig5_1").unwrap();
        let g = Geodesic::dense(&s.torus, &[q(0), q(0), q(0)], vec![e(3, 0), e(3, 2)]).unwrap();
        let w = orbit_closure_meets_interior(&s, &g).unwrap();
        assert!(w.meets);
        let p = w.point.unwrap();
        assert_eq!(p[1], q(0));
        assert!(s.classify_point(&p).unwrap().is_interior());
    }

    #[test]
    fn plane_missing_a_slab() {
        let t = FlatTorus::from_ints(&[2, 2, 2]).unwrap();
        let d = Damping::new(vec![Polyhedron::cuboid(&[q(0), qf(1, 4), q(0)], &[q(2), qf(1, 2), q(2)])]);
        let s = Scene::new(t, d).unwrap();
        let g = Geodesic::dense(&s.torus, &[q(0), q(0), q(0)], vec![e(3, 0), e(3, 2)]).unwrap();
        assert_eq!(orbit_closure_meets_interior(&s, &g).unwrap(), ClosureWitness { meets: false, point: None });
    }

    #[test]
    fn plane_in_a_shared_face() {
        // two slabs meeting along x2 = 0: the plane lies in no open slab but in the interior of the union
        let t = FlatTorus::from_ints(&[2, 2, 2]).unwrap();
        let d = Damping::new(vec![
            Polyhedron::cuboid(&[q(0), qf(-1, 4), q(0)], &[q(2), q(0), q(2)]),
            Polyhedron::cuboid(&[q(0), q(0), q(0)], &[q(2), qf(1, 4), q(2)]),
        ]);
        let s = Scene::new(t, d).unwrap();
        let g = Geodesic::dense(&s.torus, &[q(0), q(0), q(0)], vec![e(3, 0), e(3, 2)]).unwrap();
        assert!(orbit_closure_meets_interior(&s, &g).unwrap().meets);
    }

    #[test]
    fn lattice_basis_of_a_diagonal_plane() {
        let t = FlatTorus::new(vec![q(1), qf(3, 2), q(2)]).unwrap();
        let s = Scene::new(t, Damping::new(vec![])).unwrap();
        let l = lattice_basis(&s, &[vec![q(1), q(1), q(0)], e(3, 2)]);
        assert_eq!(l.len(), 2);
        for v in &l {
            for (x, a) in v.iter().zip(s.torus.periods()) {
                assert!((x / a).is_integer());
            }
        }
    }
}
