//! Built-in scenes.
//!
//! The three-dimensional tunnels live on `[-1, 1]^3` (periods 2) with
//! coordinates `(x1, x2, y)`: a damped shell `{|x1| >= 1/2 or |x2| >= 1/2}`
//! leaves an undamped square tunnel along `y`, inside which four prisms sit
//! one after another. The shell is split into convex pieces so that every
//! polyhedron is a plain intersection of half-spaces.

use super::{Damping, FlatTorus, HalfSpace, Polyhedron, Scene, SceneError};
use crate::rational::{parse_q, q, qf, Q};
use num_traits::Zero;

pub fn preset_names() -> &'static [&'static str] {
    &["fig4_1", "fig5_1", "checkerboard2d", "tunnel_d", "band2d", "full"]
}

/// Builds a preset from `name` or `name:params`.
///
/// * `fig4_1:aL,aR,aT,aB` (alias `prism_tunnel`) prism tunnel with the four slopes
/// * `fig5_1` (alias `cube_tunnel`) the same tunnel with all slopes zero
/// * `checkerboard2d:a|b|c` two-dimensional checkerboards
/// * `tunnel_d:d` the `d`-dimensional slab tunnel
/// * `band2d` a half-damped 2-torus leaving the band `0 < x2 < 1` free
/// * `full:d` the whole unit torus damped
pub fn preset_scene(spec: &str) -> Result<Scene, SceneError> {
    let (name, params) = match spec.split_once(':') {
        Some((n, p)) => (n.trim(), Some(p.trim())),
        None => (spec.trim(), None),
    };
    let bad = |reason: &str| SceneError::PresetParams { name: name.to_string(), reason: reason.to_string() };
    let scene = match name {
        "fig4_1" | "prism_tunnel" => {
            let p = params.ok_or_else(|| bad("expects four slopes aL,aR,aT,aB"))?;
            let a: Vec<Q> = p.split(',').map(parse_q).collect::<Result<_, _>>().map_err(|e| bad(&e.to_string()))?;
            if a.len() != 4 {
                return Err(bad("expects four slopes aL,aR,aT,aB"));
            }
            prism_tunnel(&a[0], &a[1], &a[2], &a[3])
        }
        "fig5_1" | "cube_tunnel" => prism_tunnel(&Q::zero(), &Q::zero(), &Q::zero(), &Q::zero()),
        "checkerboard2d" => checkerboard(params.unwrap_or("a")).ok_or_else(|| bad("variant must be a, b or c"))?,
        "tunnel_d" => {
            let d: usize = params.unwrap_or("3").parse().map_err(|_| bad("expects a dimension"))?;
            if !(3..=super::MAX_DIM).contains(&d) {
                return Err(bad("dimension must be in 3..=6"));
            }
            slab_tunnel(d)
        }
        "band2d" => {
            let t = FlatTorus::from_ints(&[2, 2]).unwrap();
            (t, Damping::new(vec![Polyhedron::cuboid(&[q(0), q(1)], &[q(2), q(2)])]))
        }
        "full" => {
            let d: usize = params.unwrap_or("2").parse().map_err(|_| bad("expects a dimension"))?;
            let t = FlatTorus::new(vec![q(1); d])?;
            (t, Damping::new(vec![Polyhedron::cuboid(&vec![q(0); d], &vec![q(1); d])]))
        }
        _ => return Err(SceneError::UnknownPreset(spec.to_string())),
    };
    Scene::new(scene.0, scene.1)
}

fn hs(n: &[Q], c: Q) -> HalfSpace {
    HalfSpace::new(n.to_vec(), c)
}

/// `lo <= x_axis <= hi` as two half-spaces.
fn between(d: usize, axis: usize, lo: Q, hi: Q) -> [HalfSpace; 2] {
    let mut e = vec![Q::zero(); d];
    e[axis] = q(1);
    let m: Vec<Q> = e.iter().map(|x| -x.clone()).collect();
    [hs(&m, -lo), hs(&e, hi)]
}

fn prism_tunnel(al: &Q, ar: &Q, at: &Q, ab: &Q) -> (FlatTorus, Damping) {
    let torus = FlatTorus::from_ints(&[2, 2, 2]).unwrap();
    let h = qf(1, 2);
    let mut polys = Vec::new();
    // shell pieces: x1 in [1/2, 3/2]; then |x1| <= 1/2 with x2 in [1/2, 3/2]
    polys.push(Polyhedron::cuboid(&[h.clone(), q(-1), q(-1)], &[qf(3, 2), q(1), q(1)]));
    polys.push(Polyhedron::cuboid(&[-h.clone(), h.clone(), q(-1)], &[h.clone(), qf(3, 2), q(1)]));

    let slope_cap = |a: &Q| a * &h > h;
    let (x1, x2, y) = (0, 1, 2);
    let ax = |j: usize, s: i64| {
        let mut v = vec![Q::zero(); 3];
        v[j] = q(s);
        v
    };

    // right: -1 <= y <= -1/2, 0 <= x1 <= 1/2, -1/2 <= x2 <= aR x1
    let mut r: Vec<HalfSpace> = between(3, y, q(-1), -h.clone()).into();
    r.extend(between(3, x1, q(0), h.clone()));
    r.push(hs(&ax(x2, -1), h.clone()));
    r.push(hs(&[-ar.clone(), q(1), q(0)], q(0)));
    if slope_cap(ar) {
        r.push(hs(&ax(x2, 1), h.clone()));
    }
    polys.push(Polyhedron::new(r));

    // top: -1/2 <= y <= 0, 0 <= x2 <= 1/2, -aT x2 <= x1 <= 1/2
    let mut t: Vec<HalfSpace> = between(3, y, -h.clone(), q(0)).into();
    t.extend(between(3, x2, q(0), h.clone()));
    t.push(hs(&ax(x1, 1), h.clone()));
    t.push(hs(&[q(-1), -at.clone(), q(0)], q(0)));
    if slope_cap(at) {
        t.push(hs(&ax(x1, -1), h.clone()));
    }
    polys.push(Polyhedron::new(t));

    // left: 0 <= y <= 1/2, -1/2 <= x1 <= 0, aL x1 <= x2 <= 1/2
    let mut l: Vec<HalfSpace> = between(3, y, q(0), h.clone()).into();
    l.extend(between(3, x1, -h.clone(), q(0)));
    l.push(hs(&ax(x2, 1), h.clone()));
    l.push(hs(&[al.clone(), q(-1), q(0)], q(0)));
    if slope_cap(al) {
        l.push(hs(&ax(x2, -1), h.clone()));
    }
    polys.push(Polyhedron::new(l));

    // bottom: 1/2 <= y <= 1, -1/2 <= x2 <= 0, -1/2 <= x1 <= -aB x2
    let mut b: Vec<HalfSpace> = between(3, y, h.clone(), q(1)).into();
    b.extend(between(3, x2, -h.clone(), q(0)));
    b.push(hs(&ax(x1, -1), h.clone()));
    b.push(hs(&[q(1), ab.clone(), q(0)], q(0)));
    if slope_cap(ab) {
        b.push(hs(&ax(x1, 1), h.clone()));
    }
    polys.push(Polyhedron::new(b));

    (torus, Damping::new(polys))
}

fn slab_tunnel(d: usize) -> (FlatTorus, Damping) {
    let torus = FlatTorus::new(vec![q(2); d]).unwrap();
    let h = qf(1, 2);
    let m = d - 1; // transverse axes 0..m, y = axis m
    let mut polys = Vec::new();
    for i in 0..m {
        let mut lo = vec![q(-1); d];
        let mut hi = vec![q(1); d];
        for j in 0..i {
            lo[j] = -h.clone();
            hi[j] = h.clone();
        }
        lo[i] = h.clone();
        hi[i] = qf(3, 2);
        polys.push(Polyhedron::cuboid(&lo, &hi));
    }
    let dm = m as i64;
    for (sign, y0) in [(-1i64, q(-1)), (1, q(0))] {
        for i in 0..m {
            let mut lo = vec![-h.clone(); d];
            let mut hi = vec![h.clone(); d];
            if sign < 0 {
                hi[i] = q(0);
            } else {
                lo[i] = q(0);
            }
            lo[m] = &y0 + qf(i as i64, dm);
            hi[m] = &y0 + qf(i as i64 + 1, dm);
            polys.push(Polyhedron::cuboid(&lo, &hi));
        }
    }
    (torus, Damping::new(polys))
}

fn checkerboard(variant: &str) -> Option<(FlatTorus, Damping)> {
    let h = qf(1, 2);
    Some(match variant {
        "a" => (
            FlatTorus::from_ints(&[1, 1]).unwrap(),
            Damping::new(vec![
                Polyhedron::cuboid(&[q(0), q(0)], &[h.clone(), h.clone()]),
                Polyhedron::cuboid(&[h.clone(), h.clone()], &[q(1), q(1)]),
            ]),
        ),
        "b" => (
            FlatTorus::from_ints(&[2, 1]).unwrap(),
            Damping::new(vec![
                Polyhedron::cuboid(&[q(0), q(0)], &[q(1), h.clone()]),
                Polyhedron::cuboid(&[q(1), h.clone()], &[q(2), q(1)]),
            ]),
        ),
        "c" => {
            let mut cells = Vec::new();
            for i in 0..4 {
                for j in 0..4 {
                    if (i + j) % 2 == 0 {
                        cells.push(Polyhedron::cuboid(&[qf(i, 4), qf(j, 4)], &[qf(i + 1, 4), qf(j + 1, 4)]));
                    }
                }
            }
            (FlatTorus::from_ints(&[1, 1]).unwrap(), Damping::new(cells))
        }
        _ => return None,
    })
}
