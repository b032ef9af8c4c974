//! Damped normal directions along a never-entering closed geodesic.
//!
//! Normals are written `Ξ = B w` with `B` the fixed basis `b_j = e_j - (v_j/v_k) e_k`
//! of `v^⊥` (`k` the largest entry of `v`), so the report does not depend on the
//! orientation of the geodesic. A face with outward normal `n` damps
//! `{w : (Bᵀn)·w < 0}`.
//!
//! In `d ≤ 3` contacts sharing a stretch of the geodesic are merged: the
//! stretch damps the interior of the union of their closed cones, which is the
//! set of `Ξ` with `X(t) + δΞ` in the interior of the support. In `d > 3` every
//! contact contributes its own open cone.

use super::trace::{Cell, LineStructure};
use super::{ControlError, Geodesic, NormalDirection};
use crate::lp::{open_cone_nonempty, strictly_feasible, Lp, LpOutcome};
use crate::rational::{dot, fmt_q, null_space, q, qf, Q};
use crate::scene::{PointClass, Scene};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeSet;

/// Open arc of the normal circle, running counterclockwise (in `w`) from `from` to `to`.
#[derive(Debug, Clone, PartialEq)]
pub struct OpenArc {
    pub from: Vec<Q>,
    pub to: Vec<Q>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DampedSet {
    /// Every normal direction.
    Full,
    /// `d = 2`: the damped sides among `±b`.
    Sides(Vec<Vec<Q>>),
    /// `d = 3`.
    Arcs(Vec<OpenArc>),
    /// `d > 3`: open cones `{Ξ ⊥ v : ν·Ξ > 0}` given by their inward normals `ν`.
    Cones(Vec<Vec<Vec<Q>>>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Complement {
    Empty,
    FiniteSet(Vec<Vec<Q>>),
    /// An undamped direction with an open neighbourhood of undamped directions.
    PositiveMeasure(Vec<Q>),
    /// `d > 3` with a complement that is neither finite nor of positive measure.
    Undetermined,
}

impl Complement {
    pub fn kind(&self) -> &'static str {
        match self {
            Complement::Empty => "empty",
            Complement::FiniteSet(_) => "finite_set",
            Complement::PositiveMeasure(_) => "positive_measure",
            Complement::Undetermined => "undetermined",
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let dirs = |v: &[Vec<Q>]| -> Vec<NormalDirection> { v.iter().map(|x| NormalDirection::from_q(x)).collect() };
        match self {
            Complement::Empty | Complement::Undetermined => serde_json::json!({"kind": self.kind()}),
            Complement::FiniteSet(v) => serde_json::json!({"kind": self.kind(), "directions": dirs(v)}),
            Complement::PositiveMeasure(w) => {
                serde_json::json!({"kind": self.kind(), "witness": NormalDirection::from_q(w)})
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct NormalDampingReport {
    pub geodesic: Geodesic,
    /// Basis of the normal space used for `w` coordinates.
    pub basis: Vec<Vec<Q>>,
    /// The coordinate left out of `w`.
    pub omitted: usize,
    pub damped: DampedSet,
    pub complement: Complement,
}

impl NormalDampingReport {
    pub fn to_json(&self) -> serde_json::Value {
        let s = |v: &[Q]| -> Vec<String> { v.iter().map(fmt_q).collect() };
        let damped = match &self.damped {
            DampedSet::Full => serde_json::json!({"kind": "full"}),
            DampedSet::Sides(v) => serde_json::json!({"kind": "sides", "sides": v.iter().map(|x| s(x)).collect::<Vec<_>>()}),
            DampedSet::Arcs(a) => serde_json::json!({
                "kind": "arcs",
                "arcs": a.iter().map(|a| serde_json::json!({"from": s(&a.from), "to": s(&a.to)})).collect::<Vec<_>>()
            }),
            DampedSet::Cones(c) => serde_json::json!({
                "kind": "cones",
                "cones": c.iter().map(|c| c.iter().map(|x| s(x)).collect::<Vec<_>>()).collect::<Vec<_>>()
            }),
        };
        serde_json::json!({"damped": damped, "complement": self.complement.to_json()})
    }

    /// Is the ambient normal direction `xi` damped?
    pub fn is_damped(&self, xi: &[Q]) -> bool {
        match &self.complement {
            Complement::Empty => true,
            Complement::FiniteSet(v) => !v.iter().any(|u| parallel_same(u, xi)),
            _ => match &self.damped {
                DampedSet::Full => true,
                DampedSet::Sides(v) => v.iter().any(|u| parallel_same(u, xi)),
                DampedSet::Cones(c) => c.iter().any(|nus| nus.iter().all(|nu| dot(nu, xi).is_positive())),
                DampedSet::Arcs(arcs) => {
                    let w = self.coords(xi);
                    let p = dia(&w);
                    arcs.iter().any(|a| {
                        let (s, e) = (dia(&self.coords(&a.from)), dia(&self.coords(&a.to)));
                        let e = if e <= s { e + q(4) } else { e };
                        (s < p && p < e) || (s < &p + q(4) && &p + q(4) < e)
                    })
                }
            },
        }
    }

    /// `w` coordinates of an ambient normal vector.
    fn coords(&self, xi: &[Q]) -> Vec<Q> {
        let k = self.omitted;
        (0..xi.len()).filter(|&j| j != k).map(|j| xi[j].clone()).collect()
    }
}

fn parallel_same(a: &[Q], b: &[Q]) -> bool {
    let ab = dot(a, b);
    ab.is_positive() && &ab * &ab == dot(a, a) * dot(b, b)
}

/// Basis of `v^⊥` skipping the largest entry of `v`; invariant under `v → -v`.
fn normal_basis(v: &[Q]) -> (usize, Vec<Vec<Q>>) {
    let k = (0..v.len()).max_by(|&a, &b| v[a].abs().cmp(&v[b].abs()).then(b.cmp(&a))).unwrap();
    let basis = (0..v.len())
        .filter(|&j| j != k)
        .map(|j| {
            let mut b = vec![Q::zero(); v.len()];
            b[j] = Q::one();
            b[k] = -(&v[j] / &v[k]);
            b
        })
        .collect();
    (k, basis)
}

fn to_ambient(basis: &[Vec<Q>], w: &[Q]) -> Vec<Q> {
    let mut x = vec![Q::zero(); basis[0].len()];
    for (b, c) in basis.iter().zip(w) {
        for (xi, bi) in x.iter_mut().zip(b) {
            *xi += c * bi;
        }
    }
    x
}

/// Pseudo-angle in `[0, 4)` of a nonzero plane vector, monotone in the true angle.
fn dia(w: &[Q]) -> Q {
    let (x, y) = (&w[0], &w[1]);
    if !y.is_negative() && !x.is_negative() {
        y / (x + y)
    } else if !y.is_negative() {
        q(1) + (-x) / (-x + y)
    } else if x.is_negative() {
        q(2) + (-y) / (-x - y)
    } else {
        q(3) + x / (x - y)
    }
}

fn undia(p: &Q) -> Vec<Q> {
    let p = crate::rational::mod_q(p, &q(4));
    let k = p.floor();
    let r = &p - &k;
    let one = Q::one();
    match k.to_integer().to_i64().unwrap() {
        0 => vec![&one - &r, r],
        1 => vec![-r.clone(), &one - &r],
        2 => vec![-(&one - &r), -r],
        _ => vec![r.clone(), -(&one - &r)],
    }
}

/// Per-stretch contact cones `(g_f)` in `w` coordinates; `None` for an interior stretch.
fn stretch_cones(scene: &Scene, cell: &Cell, v: &[Q], basis: &[Vec<Q>]) -> Result<Option<Vec<Vec<Vec<Q>>>>, ControlError> {
    match &cell.class {
        PointClass::Interior => Ok(None),
        PointClass::Exterior => Ok(Some(vec![])),
        PointClass::Boundary(contacts) => {
            let mut out = Vec::new();
            for c in contacts {
                let mut gs = Vec::new();
                for n in scene.contact_normals(c) {
                    if !dot(&n, v).is_zero() {
                        return Err(ControlError::Consistency(format!(
                            "face {:?} of polyhedron {} is active along the geodesic but not parallel to it",
                            c.faces, c.polyhedron
                        )));
                    }
                    let g: Vec<Q> = basis.iter().map(|b| dot(b, &n)).collect();
                    if g.iter().all(Zero::is_zero) {
                        return Err(ControlError::Consistency("face normal vanishes on the normal space".into()));
                    }
                    gs.push(g);
                }
                out.push(gs);
            }
            Ok(Some(out))
        }
    }
}

/// The set of normal directions in which the geodesic is damped, with its complement.
pub fn damped_normal_set(scene: &Scene, g: &Geodesic) -> Result<NormalDampingReport, ControlError> {
    let ls = LineStructure::for_geodesic(scene, g)?;
    report_from_line(scene, g, &ls)
}

pub(crate) fn report_from_line(scene: &Scene, g: &Geodesic, ls: &LineStructure) -> Result<NormalDampingReport, ControlError> {
    let v = &ls.velocity;
    let (k, basis) = normal_basis(v);
    // only open stretches count: breakpoints are punctual
    let mut stretches = Vec::new();
    let mut full = false;
    for cell in &ls.on_gaps {
        match stretch_cones(scene, cell, v, &basis)? {
            None => full = true,
            Some(c) if !c.is_empty() => stretches.push(c),
            Some(_) => {}
        }
    }
    let report = |damped, complement| NormalDampingReport { geodesic: g.clone(), basis: basis.clone(), omitted: k, damped, complement };
    if full {
        return Ok(report(DampedSet::Full, Complement::Empty));
    }
    let (damped, complement) = match scene.dim() {
        2 => sides(&stretches, &basis),
        3 => arcs(&stretches, &basis),
        _ => cones(&stretches, &basis, k),
    };
    Ok(report(damped, complement))
}

fn sides(stretches: &[Vec<Vec<Vec<Q>>>], basis: &[Vec<Q>]) -> (DampedSet, Complement) {
    let mut damped = Vec::new();
    let mut missing = Vec::new();
    for s in [q(1), q(-1)] {
        let hit = stretches.iter().flatten().any(|gs| gs.iter().all(|g| (&g[0] * &s).is_negative()));
        let xi = to_ambient(basis, &[s]);
        if hit {
            damped.push(xi);
        } else {
            missing.push(xi);
        }
    }
    let c = if missing.is_empty() { Complement::Empty } else { Complement::FiniteSet(missing) };
    if c == Complement::Empty {
        (DampedSet::Full, c)
    } else {
        (DampedSet::Sides(damped), c)
    }
}

fn rot90(g: &[Q]) -> Vec<Q> {
    vec![-g[1].clone(), g[0].clone()]
}

fn in_closed(gs: &[Vec<Q>], w: &[Q]) -> bool {
    gs.iter().all(|g| !dot(g, w).is_positive())
}

fn arcs(stretches: &[Vec<Vec<Vec<Q>>>], basis: &[Vec<Q>]) -> (DampedSet, Complement) {
    // contacts with a nonempty open cone, per stretch
    let live: Vec<Vec<&Vec<Vec<Q>>>> = stretches
        .iter()
        .map(|s| {
            s.iter()
                .filter(|gs| {
                    let neg: Vec<Vec<Q>> = gs.iter().map(|g| g.iter().map(|x| -x.clone()).collect()).collect();
                    open_cone_nonempty(&neg, 2).is_some()
                })
                .collect()
        })
        .collect();
    let mut pts: BTreeSet<Q> = BTreeSet::new();
    for gs in live.iter().flatten() {
        for g in gs.iter() {
            for r in [rot90(g), rot90(g).iter().map(|x| -x.clone()).collect()] {
                if in_closed(gs, &r) {
                    pts.insert(dia(&r));
                }
            }
        }
    }
    let pts: Vec<Q> = pts.into_iter().collect();
    let m = pts.len();
    if m == 0 {
        let witness = to_ambient(basis, &[q(1), q(0)]);
        return (DampedSet::Arcs(vec![]), Complement::PositiveMeasure(witness));
    }
    // elements: point i at 2i, gap (p_i, p_{i+1}) at 2i+1
    let gap_rep = |i: usize| -> Vec<Q> {
        let a = &pts[i];
        let b = if i + 1 < m { pts[i + 1].clone() } else { &pts[0] + q(4) };
        undia(&((a + b) * qf(1, 2)))
    };
    let reps: Vec<Vec<Q>> = (0..2 * m).map(|e| if e % 2 == 0 { undia(&pts[e / 2]) } else { gap_rep(e / 2) }).collect();
    let mut damped = vec![false; 2 * m];
    for s in &live {
        let cov: Vec<bool> = reps.iter().map(|w| s.iter().any(|gs| in_closed(gs, w))).collect();
        for e in 0..2 * m {
            let ok = if e % 2 == 1 { cov[e] } else { cov[e] && cov[(e + 1) % (2 * m)] && cov[(e + 2 * m - 1) % (2 * m)] };
            if ok {
                damped[e] = true;
            }
        }
    }
    if damped.iter().all(|&b| b) {
        return (DampedSet::Full, Complement::Empty);
    }
    let f = damped.iter().position(|&b| !b).unwrap();
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for s in 1..=2 * m {
        let e = (f + s) % (2 * m);
        if damped[e] {
            if start.is_none() {
                start = Some(e);
            }
        } else if let Some(st) = start.take() {
            // the run covers elements st..e (exclusive); bounded by points st-1 and e
            let from = (st + 2 * m - 1) % (2 * m);
            out.push(OpenArc { from: to_ambient(basis, &reps[from]), to: to_ambient(basis, &reps[e]) });
        }
    }
    let complement = match (0..m).find(|&i| !damped[2 * i + 1]) {
        Some(i) => Complement::PositiveMeasure(to_ambient(basis, &reps[2 * i + 1])),
        None => {
            Complement::FiniteSet((0..m).filter(|&i| !damped[2 * i]).map(|i| to_ambient(basis, &reps[2 * i])).collect())
        }
    };
    (DampedSet::Arcs(out), complement)
}

fn cones(stretches: &[Vec<Vec<Vec<Q>>>], basis: &[Vec<Q>], k: usize) -> (DampedSet, Complement) {
    let n = basis.len();
    let mut list: Vec<Vec<Vec<Q>>> = Vec::new();
    for gs in stretches.iter().flatten() {
        let neg: Vec<Vec<Q>> = gs.iter().map(|g| g.iter().map(|x| -x.clone()).collect()).collect();
        if open_cone_nonempty(&neg, n).is_some() && !list.contains(gs) {
            list.push(gs.clone());
        }
    }
    let ambient: Vec<Vec<Vec<Q>>> = list
        .iter()
        .map(|gs| gs.iter().map(|g| inward_ambient(basis.len() + 1, k, g)).collect())
        .collect();
    let damped = DampedSet::Cones(ambient);
    // the complement is the union over face choices of {g_i·w >= 0}
    let mut finite: Vec<Vec<Q>> = Vec::new();
    let mut undetermined = false;
    let mut chosen: Vec<Vec<Q>> = Vec::new();
    let mut witness = None;
    explore(&list, 0, n, &mut chosen, &mut finite, &mut undetermined, &mut witness);
    let complement = if let Some(w) = witness {
        Complement::PositiveMeasure(to_ambient(basis, &w))
    } else if undetermined {
        Complement::Undetermined
    } else if finite.is_empty() {
        Complement::Empty
    } else {
        Complement::FiniteSet(finite.iter().map(|w| to_ambient(basis, w)).collect())
    };
    if complement == Complement::Empty {
        return (DampedSet::Full, complement);
    }
    (damped, complement)
}

/// Ambient inward normal whose pairing with `Ξ = B w` equals `-g·w`.
fn inward_ambient(d: usize, k: usize, g: &[Q]) -> Vec<Q> {
    // Bᵀ ν = -g has the solution with ν_k = 0
    let mut nu = vec![Q::zero(); d];
    let mut it = g.iter();
    for (j, x) in nu.iter_mut().enumerate() {
        if j != k {
            *x = -it.next().unwrap().clone();
        }
    }
    nu
}

/// Does `{w : g·w >= 0, g in rows}` contain a nonzero vector?
fn weak_nonzero(rows: &[Vec<Q>], n: usize) -> bool {
    let mut lp = Lp::new(n);
    for g in rows {
        lp.ge(g.clone(), Q::zero());
    }
    for j in 0..n {
        let mut e = vec![Q::zero(); n];
        e[j] = Q::one();
        lp.le(e.clone(), Q::one());
        lp.ge(e, q(-1));
    }
    (0..n).any(|j| {
        [Q::one(), -Q::one()].into_iter().any(|s| {
            let mut c = vec![Q::zero(); n];
            c[j] = s;
            matches!(lp.maximize(&c), LpOutcome::Optimal { value, .. } if value.is_positive())
        })
    })
}

fn explore(
    list: &[Vec<Vec<Q>>],
    k: usize,
    n: usize,
    chosen: &mut Vec<Vec<Q>>,
    finite: &mut Vec<Vec<Q>>,
    undetermined: &mut bool,
    witness: &mut Option<Vec<Q>>,
) {
    if witness.is_some() || !weak_nonzero(chosen, n) {
        return;
    }
    if k == list.len() {
        let strict: Vec<(Vec<Q>, Q)> = chosen.iter().map(|g| (g.iter().map(|x| -x.clone()).collect(), Q::zero())).collect();
        if chosen.is_empty() {
            let mut w = vec![Q::zero(); n];
            w[0] = Q::one();
            *witness = Some(w);
            return;
        }
        if let Some(w) = strictly_feasible(n, &strict, &[]) {
            *witness = Some(w);
            return;
        }
        // implicit equalities: rows that vanish on the whole cone
        let eqs: Vec<Vec<Q>> = chosen
            .iter()
            .filter(|g| {
                let mut lp = Lp::new(n);
                for h in chosen.iter() {
                    lp.ge((*h).clone(), Q::zero());
                }
                for j in 0..n {
                    let mut e = vec![Q::zero(); n];
                    e[j] = Q::one();
                    lp.le(e.clone(), Q::one());
                    lp.ge(e, q(-1));
                }
                matches!(lp.maximize(g), LpOutcome::Optimal { value, .. } if value.is_zero())
            })
            .cloned()
            .collect();
        let ns = null_space(&eqs, n);
        if ns.len() == 1 {
            for s in [Q::one(), -Q::one()] {
                let r: Vec<Q> = ns[0].iter().map(|x| x * &s).collect();
                if chosen.iter().all(|g| !dot(g, &r).is_negative()) && !finite.iter().any(|u| parallel_same(u, &r)) {
                    finite.push(r);
                }
            }
        } else if ns.len() > 1 {
            *undetermined = true;
        }
        return;
    }
    if list[k].iter().any(|g| chosen.contains(g)) {
        explore(list, k + 1, n, chosen, finite, undetermined, witness);
        return;
    }
    for g in &list[k] {
        chosen.push(g.clone());
        explore(list, k + 1, n, chosen, finite, undetermined, witness);
        chosen.pop();
        if witness.is_some() {
            return;
        }
    }
}
