//! Flat tori, rational polyhedra and characteristic-function dampings.
//!
//! The support of the damping is the closed union of the polyhedra and their
//! lattice translates. "Interior" always means interior of that union, so two
//! boxes sharing a face behave like one bigger box.

mod io;
mod presets;

pub use io::{parse_scene_json, scene_to_json};
pub use presets::{preset_names, preset_scene};

use crate::lp::{strictly_feasible, Lp, LpOutcome};
use crate::rational::{dot, fmt_q, mod_q, q, to_f64, Q};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::fmt;
use std::sync::OnceLock;
use thiserror::Error;

pub const MAX_DIM: usize = 6;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("torus dimension {0} outside 2..=6")]
    Dimension(usize),
    #[error("torus period {index} is not positive")]
    Period { index: usize },
    #[error("invalid scene: {0}")]
    Invalid(ValidationReport),
    #[error("point has {got} coordinates, torus has dimension {want}")]
    PointDimension { got: usize, want: usize },
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("bad preset parameters for {name}: {reason}")]
    PresetParams { name: String, reason: String },
    #[error("scene file: {0}")]
    Format(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatTorus {
    periods: Vec<Q>,
}

impl FlatTorus {
    pub fn new(periods: Vec<Q>) -> Result<Self, SceneError> {
        if !(2..=MAX_DIM).contains(&periods.len()) {
            return Err(SceneError::Dimension(periods.len()));
        }
        if let Some(index) = periods.iter().position(|p| !p.is_positive()) {
            return Err(SceneError::Period { index });
        }
        Ok(FlatTorus { periods })
    }

    pub fn from_ints(periods: &[i64]) -> Result<Self, SceneError> {
        Self::new(periods.iter().map(|&p| q(p)).collect())
    }

    pub fn dim(&self) -> usize {
        self.periods.len()
    }

    pub fn periods(&self) -> &[Q] {
        &self.periods
    }

    pub fn periods_f64(&self) -> Vec<f64> {
        self.periods.iter().map(to_f64).collect()
    }

    pub fn volume(&self) -> Q {
        self.periods.iter().product()
    }

    /// Lattice vector with integer coordinates `k` in units of the periods.
    pub fn lattice_vector(&self, k: &[i64]) -> Vec<Q> {
        k.iter().zip(&self.periods).map(|(&k, a)| q(k) * a).collect()
    }

    /// All integer shifts `k` for which the box `[lo, hi] + k·A` meets the closed box `[rlo, rhi]`.
    pub fn shifts_meeting(&self, lo: &[Q], hi: &[Q], rlo: &[Q], rhi: &[Q]) -> Vec<Vec<i64>> {
        let mut ranges = Vec::with_capacity(self.dim());
        for j in 0..self.dim() {
            let a = &self.periods[j];
            let kmin = ((&rlo[j] - &hi[j]) / a).ceil().to_integer().to_i64().unwrap();
            let kmax = ((&rhi[j] - &lo[j]) / a).floor().to_integer().to_i64().unwrap();
            if kmin > kmax {
                return Vec::new();
            }
            ranges.push(kmin..=kmax);
        }
        let mut out: Vec<Vec<i64>> = vec![Vec::new()];
        for r in ranges {
            out = out
                .into_iter()
                .flat_map(|pre| {
                    r.clone().map(move |k| {
                        let mut v = pre.clone();
                        v.push(k);
                        v
                    })
                })
                .collect();
        }
        out
    }
}

/// Reduces `x` modulo the period lattice into `[0, A_1) × … × [0, A_d)`.
pub fn fold_point(torus: &FlatTorus, x: &[Q]) -> Vec<Q> {
    x.iter().zip(torus.periods()).map(|(x, a)| mod_q(x, a)).collect()
}

/// `{X : n·X <= c}`
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct HalfSpace {
    #[serde(serialize_with = "ser_qvec")]
    pub normal: Vec<Q>,
    #[serde(serialize_with = "ser_q")]
    pub offset: Q,
}

impl HalfSpace {
    pub fn new(normal: Vec<Q>, offset: Q) -> Self {
        HalfSpace { normal, offset }
    }

    /// `c - n·X`, nonnegative inside.
    pub fn slack(&self, x: &[Q]) -> Q {
        &self.offset - dot(&self.normal, x)
    }
}

fn ser_q<S: serde::Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_q(x))
}

fn ser_qvec<S: serde::Serializer>(v: &[Q], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&fmt_q(x))?;
    }
    seq.end()
}

#[derive(Debug, Clone, Default)]
pub struct Polyhedron {
    pub halfspaces: Vec<HalfSpace>,
    bbox: OnceLock<Option<(Vec<Q>, Vec<Q>)>>,
    vertices: OnceLock<Vec<Vec<Q>>>,
}

impl PartialEq for Polyhedron {
    fn eq(&self, other: &Self) -> bool {
        self.halfspaces == other.halfspaces
    }
}

impl Polyhedron {
    pub fn new(halfspaces: Vec<HalfSpace>) -> Self {
        Polyhedron { halfspaces, ..Default::default() }
    }

    /// Axis-aligned box `∏ [lo_j, hi_j]`.
    pub fn cuboid(lo: &[Q], hi: &[Q]) -> Self {
        let d = lo.len();
        let mut hs = Vec::with_capacity(2 * d);
        for j in 0..d {
            let mut e = vec![Q::zero(); d];
            e[j] = q(1);
            hs.push(HalfSpace::new(e.iter().map(|x| -x.clone()).collect(), -lo[j].clone()));
            hs.push(HalfSpace::new(e, hi[j].clone()));
        }
        Polyhedron::new(hs)
    }

    pub fn dim(&self) -> usize {
        self.halfspaces.first().map_or(0, |h| h.normal.len())
    }

    pub fn contains_closed(&self, x: &[Q]) -> bool {
        self.halfspaces.iter().all(|h| !h.slack(x).is_negative())
    }

    pub fn contains_open(&self, x: &[Q]) -> bool {
        self.halfspaces.iter().all(|h| h.slack(x).is_positive())
    }

    /// Indices of the faces whose equality holds at `x`.
    pub fn active_faces(&self, x: &[Q]) -> Vec<usize> {
        self.halfspaces.iter().enumerate().filter(|(_, h)| h.slack(x).is_zero()).map(|(i, _)| i).collect()
    }

    fn lp(&self) -> Lp {
        let mut lp = Lp::new(self.dim());
        for h in &self.halfspaces {
            lp.le(h.normal.clone(), h.offset.clone());
        }
        lp
    }

    /// A point of the open interior, if there is one.
    pub fn interior_point(&self) -> Option<Vec<Q>> {
        let rows: Vec<_> = self.halfspaces.iter().map(|h| (h.normal.clone(), h.offset.clone())).collect();
        strictly_feasible(self.dim(), &rows, &[])
    }

    /// Exact bounding box, `None` when unbounded or empty.
    pub fn bbox(&self) -> Option<&(Vec<Q>, Vec<Q>)> {
        self.bbox
            .get_or_init(|| {
                let d = self.dim();
                let lp = self.lp();
                let mut lo = Vec::with_capacity(d);
                let mut hi = Vec::with_capacity(d);
                for j in 0..d {
                    let mut e = vec![Q::zero(); d];
                    e[j] = q(1);
                    match (lp.minimize(&e), lp.maximize(&e)) {
                        (LpOutcome::Optimal { value: a, .. }, LpOutcome::Optimal { value: b, .. }) => {
                            lo.push(a);
                            hi.push(b);
                        }
                        _ => return None,
                    }
                }
                Some((lo, hi))
            })
            .as_ref()
    }

    /// Vertices by exact enumeration of d-subsets of faces; cached.
    pub fn vertices(&self) -> &[Vec<Q>] {
        self.vertices.get_or_init(|| {
            let d = self.dim();
            let m = self.halfspaces.len();
            let mut out: Vec<Vec<Q>> = Vec::new();
            let mut idx: Vec<usize> = (0..d).collect();
            if m < d {
                return out;
            }
            loop {
                let a: Vec<Vec<Q>> = idx.iter().map(|&i| self.halfspaces[i].normal.clone()).collect();
                let b: Vec<Q> = idx.iter().map(|&i| self.halfspaces[i].offset.clone()).collect();
                if let Some(x) = crate::rational::solve(&a, &b) {
                    if self.contains_closed(&x) && !out.contains(&x) {
                        out.push(x);
                    }
                }
                // next combination
                let mut i = d;
                loop {
                    if i == 0 {
                        out.sort();
                        return out;
                    }
                    i -= 1;
                    if idx[i] < m - d + i {
                        idx[i] += 1;
                        for k in i + 1..d {
                            idx[k] = idx[k - 1] + 1;
                        }
                        break;
                    }
                }
            }
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Damping {
    pub polyhedra: Vec<Polyhedron>,
}

impl Damping {
    pub fn new(polyhedra: Vec<Polyhedron>) -> Self {
        Damping { polyhedra }
    }

    pub fn is_empty(&self) -> bool {
        self.polyhedra.is_empty()
    }
}

/// One polyhedron translate touching a point, with the faces active there.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FaceContact {
    pub polyhedron: usize,
    pub shift: Vec<i64>,
    pub faces: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PointClass {
    Interior,
    Boundary(Vec<FaceContact>),
    Exterior,
}

impl PointClass {
    pub fn is_interior(&self) -> bool {
        matches!(self, PointClass::Interior)
    }
    pub fn in_support(&self) -> bool {
        !matches!(self, PointClass::Exterior)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DimensionMismatch { polyhedron: usize, face: usize },
    ZeroNormal { polyhedron: usize, face: usize },
    NoFaces { polyhedron: usize },
    EmptyInterior { polyhedron: usize },
    Unbounded { polyhedron: usize },
    WiderThanPeriod { polyhedron: usize, axis: usize },
    Overlap {
        first: usize,
        second: usize,
        shift: Vec<i64>,
        #[serde(serialize_with = "ser_qvec")]
        witness: Vec<Q>,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DimensionMismatch { polyhedron, face } => {
                write!(f, "polyhedron {polyhedron} face {face}: wrong dimension")
            }
            Violation::ZeroNormal { polyhedron, face } => write!(f, "polyhedron {polyhedron} face {face}: zero normal"),
            Violation::NoFaces { polyhedron } => write!(f, "polyhedron {polyhedron}: no half-spaces"),
            Violation::EmptyInterior { polyhedron } => write!(f, "polyhedron {polyhedron}: empty interior"),
            Violation::Unbounded { polyhedron } => write!(f, "polyhedron {polyhedron}: unbounded"),
            Violation::WiderThanPeriod { polyhedron, axis } => {
                write!(f, "polyhedron {polyhedron}: wider than the period along axis {axis}")
            }
            Violation::Overlap { first, second, shift, witness } => {
                let w: Vec<String> = witness.iter().map(fmt_q).collect();
                write!(f, "polyhedra {first} and {second} (shift {shift:?}) overlap at ({})", w.join(", "))
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return write!(f, "ok");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Checks every scene invariant exactly and reports all violations found.
pub fn validate_scene(damping: &Damping, torus: &FlatTorus) -> ValidationReport {
    let d = torus.dim();
    let mut violations = Vec::new();
    let mut usable = vec![true; damping.polyhedra.len()];
    for (i, p) in damping.polyhedra.iter().enumerate() {
        if p.halfspaces.is_empty() {
            violations.push(Violation::NoFaces { polyhedron: i });
            usable[i] = false;
            continue;
        }
        for (f, h) in p.halfspaces.iter().enumerate() {
            if h.normal.len() != d {
                violations.push(Violation::DimensionMismatch { polyhedron: i, face: f });
                usable[i] = false;
            } else if h.normal.iter().all(Zero::is_zero) {
                violations.push(Violation::ZeroNormal { polyhedron: i, face: f });
                usable[i] = false;
            }
        }
        if !usable[i] {
            continue;
        }
        if p.interior_point().is_none() {
            violations.push(Violation::EmptyInterior { polyhedron: i });
            usable[i] = false;
            continue;
        }
        match p.bbox() {
            None => {
                violations.push(Violation::Unbounded { polyhedron: i });
                usable[i] = false;
            }
            Some((lo, hi)) => {
                for j in 0..d {
                    if &hi[j] - &lo[j] > torus.periods()[j] {
                        violations.push(Violation::WiderThanPeriod { polyhedron: i, axis: j });
                        usable[i] = false;
                    }
                }
            }
        }
    }
    let n = damping.polyhedra.len();
    for i in 0..n {
        if !usable[i] {
            continue;
        }
        let (lo_i, hi_i) = damping.polyhedra[i].bbox().unwrap();
        for j in i..n {
            if !usable[j] {
                continue;
            }
            let (lo_j, hi_j) = damping.polyhedra[j].bbox().unwrap();
            for shift in torus.shifts_meeting(lo_j, hi_j, lo_i, hi_i) {
                if i == j && shift.iter().all(|&k| k == 0) {
                    continue;
                }
                let g = torus.lattice_vector(&shift);
                let mut rows: Vec<(Vec<Q>, Q)> = Vec::new();
                for h in &damping.polyhedra[i].halfspaces {
                    rows.push((h.normal.clone(), h.offset.clone()));
                }
                for h in &damping.polyhedra[j].halfspaces {
                    rows.push((h.normal.clone(), &h.offset + dot(&h.normal, &g)));
                }
                if let Some(w) = strictly_feasible(d, &rows, &[]) {
                    violations.push(Violation::Overlap { first: i, second: j, shift, witness: w });
                }
            }
        }
    }
    ValidationReport { violations }
}

/// A validated torus and damping.
#[derive(Debug, Clone)]
pub struct Scene {
    pub torus: FlatTorus,
    pub damping: Damping,
}

impl Scene {
    pub fn new(torus: FlatTorus, damping: Damping) -> Result<Self, SceneError> {
        let report = validate_scene(&damping, &torus);
        if !report.passed() {
            return Err(SceneError::Invalid(report));
        }
        Ok(Scene { torus, damping })
    }

    pub fn dim(&self) -> usize {
        self.torus.dim()
    }

    pub fn bbox(&self, i: usize) -> &(Vec<Q>, Vec<Q>) {
        self.damping.polyhedra[i].bbox().expect("validated polyhedra are bounded")
    }

    /// Every polyhedron translate whose closure contains `x`, with its active faces.
    pub fn contacts_at(&self, x: &[Q]) -> Vec<FaceContact> {
        let mut out = Vec::new();
        for (i, p) in self.damping.polyhedra.iter().enumerate() {
            let (lo, hi) = self.bbox(i);
            for shift in self.torus.shifts_meeting(lo, hi, x, x) {
                let g = self.torus.lattice_vector(&shift);
                let y: Vec<Q> = x.iter().zip(&g).map(|(a, b)| a - b).collect();
                if p.contains_closed(&y) {
                    out.push(FaceContact { polyhedron: i, shift, faces: p.active_faces(&y) });
                }
            }
        }
        out
    }

    /// Outward normals of the active faces of a contact.
    pub fn contact_normals(&self, c: &FaceContact) -> Vec<Vec<Q>> {
        let p = &self.damping.polyhedra[c.polyhedron];
        c.faces.iter().map(|&f| p.halfspaces[f].normal.clone()).collect()
    }

    /// Classifies from a precomputed contact list.
    pub fn classify_contacts(&self, contacts: Vec<FaceContact>) -> PointClass {
        if contacts.is_empty() {
            return PointClass::Exterior;
        }
        if contacts.iter().any(|c| c.faces.is_empty()) {
            return PointClass::Interior;
        }
        let cones: Vec<Vec<Vec<Q>>> = contacts.iter().map(|c| self.contact_normals(c)).collect();
        if tangent_cones_cover(&cones, self.dim()) {
            PointClass::Interior
        } else {
            PointClass::Boundary(contacts)
        }
    }

    pub fn classify_point(&self, x: &[Q]) -> Result<PointClass, SceneError> {
        if x.len() != self.dim() {
            return Err(SceneError::PointDimension { got: x.len(), want: self.dim() });
        }
        let x = fold_point(&self.torus, x);
        Ok(self.classify_contacts(self.contacts_at(&x)))
    }
}

/// Validating one-shot form; prefer [`Scene::classify_point`] in loops.
pub fn classify_point(damping: &Damping, torus: &FlatTorus, x: &[Q]) -> Result<PointClass, SceneError> {
    Scene::new(torus.clone(), damping.clone())?.classify_point(x)
}

/// Do the closed cones `{w : n·w <= 0 for n in cone}` cover all of `R^d`?
///
/// They fail to cover exactly when some `w` leaves every cone, i.e. when one
/// can pick a face per cone with all `n_f·w > 0` simultaneously. The choices
/// are searched depth-first with pruning on infeasible prefixes.
pub fn tangent_cones_cover(cones: &[Vec<Vec<Q>>], d: usize) -> bool {
    fn dfs(cones: &[Vec<Vec<Q>>], d: usize, k: usize, chosen: &mut Vec<Vec<Q>>) -> bool {
        // returns true if an escaping direction exists
        if k == cones.len() {
            return true;
        }
        for n in &cones[k] {
            if chosen.contains(n) {
                return dfs(cones, d, k + 1, chosen);
            }
        }
        for n in &cones[k] {
            chosen.push(n.clone());
            let ok = crate::lp::open_cone_nonempty(chosen, d).is_some() && dfs(cones, d, k + 1, chosen);
            chosen.pop();
            if ok {
                return true;
            }
        }
        false
    }
    if cones.iter().any(Vec::is_empty) {
        return true;
    }
    !dfs(cones, d, 0, &mut Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;

    fn unit_square_scene() -> Scene {
        let t = FlatTorus::from_ints(&[2, 2]).unwrap();
        let d = Damping::new(vec![Polyhedron::cuboid(&[q(0), q(0)], &[q(1), q(1)])]);
        Scene::new(t, d).unwrap()
    }

    #[test]
    fn fold_examples() {
        let t = FlatTorus::from_ints(&[2, 2, 2]).unwrap();
        assert_eq!(fold_point(&t, &[q(3), q(-1), q(0)]), vec![q(1), q(1), q(0)]);
        assert_eq!(fold_point(&t, &[q(0), q(0), q(0)]), vec![q(0), q(0), q(0)]);
        let t = FlatTorus::new(vec![q(1), qf(3, 2)]).unwrap();
        assert_eq!(fold_point(&t, &[qf(5, 2), qf(-1, 4)]), vec![qf(1, 2), qf(5, 4)]);
    }

    #[test]
    fn torus_rejects_bad_input() {
        assert!(FlatTorus::from_ints(&[1]).is_err());
        assert!(FlatTorus::from_ints(&[1, 1, 1, 1, 1, 1, 1]).is_err());
        assert!(FlatTorus::new(vec![q(1), q(0)]).is_err());
    }

    #[test]
    fn single_box_classes() {
        let s = unit_square_scene();
        assert_eq!(s.classify_point(&[qf(1, 2), qf(1, 2)]).unwrap(), PointClass::Interior);
        assert!(matches!(s.classify_point(&[q(1), qf(1, 2)]).unwrap(), PointClass::Boundary(_)));
        assert!(matches!(s.classify_point(&[q(0), q(0)]).unwrap(), PointClass::Boundary(_)));
        assert_eq!(s.classify_point(&[qf(3, 2), qf(1, 2)]).unwrap(), PointClass::Exterior);
        // wrap-around: x = 2 is x = 0
        assert!(matches!(s.classify_point(&[q(2), qf(1, 2)]).unwrap(), PointClass::Boundary(_)));
    }

    #[test]
    fn shared_face_is_interior() {
        let t = FlatTorus::from_ints(&[4, 4]).unwrap();
        let d = Damping::new(vec![
            Polyhedron::cuboid(&[q(0), q(0)], &[q(1), q(1)]),
            Polyhedron::cuboid(&[q(1), q(0)], &[q(2), q(1)]),
        ]);
        let s = Scene::new(t, d).unwrap();
        assert_eq!(s.classify_point(&[q(1), qf(1, 2)]).unwrap(), PointClass::Interior);
        assert!(matches!(s.classify_point(&[q(1), q(1)]).unwrap(), PointClass::Boundary(_)));
    }

    #[test]
    fn box_wrapping_the_whole_period_is_full_torus() {
        let t = FlatTorus::from_ints(&[1, 1]).unwrap();
        let d = Damping::new(vec![Polyhedron::cuboid(&[q(0), q(0)], &[q(1), q(1)])]);
        let s = Scene::new(t, d).unwrap();
        for x in [[q(0), q(0)], [qf(1, 3), q(0)], [qf(1, 2), qf(1, 2)]] {
            assert_eq!(s.classify_point(&x).unwrap(), PointClass::Interior);
        }
    }

    #[test]
    fn validation_failures() {
        let t = FlatTorus::from_ints(&[2, 2]).unwrap();
        let cube = Polyhedron::cuboid(&[q(0), q(0)], &[q(1), q(1)]);
        let r = validate_scene(&Damping::new(vec![cube.clone(), cube.clone()]), &t);
        match &r.violations[..] {
            [Violation::Overlap { witness, .. }] => {
                assert!(cube.contains_open(witness));
            }
            v => panic!("{v:?}"),
        }
        let bad = Polyhedron::new(vec![
            HalfSpace::new(vec![q(1), q(0)], q(0)),
            HalfSpace::new(vec![q(-1), q(0)], q(-1)),
        ]);
        let r = validate_scene(&Damping::new(vec![bad]), &t);
        assert_eq!(r.violations, vec![Violation::EmptyInterior { polyhedron: 0 }]);
        let half = Polyhedron::new(vec![HalfSpace::new(vec![q(1), q(0)], q(0))]);
        let r = validate_scene(&Damping::new(vec![half]), &t);
        assert_eq!(r.violations, vec![Violation::Unbounded { polyhedron: 0 }]);
        let wide = Polyhedron::cuboid(&[q(0), q(0)], &[q(3), q(1)]);
        let r = validate_scene(&Damping::new(vec![wide]), &t);
        assert_eq!(r.violations, vec![Violation::WiderThanPeriod { polyhedron: 0, axis: 0 }]);
        // overlap only through wrap-around
        let a = Polyhedron::cuboid(&[qf(3, 2), q(0)], &[qf(5, 2), q(1)]);
        let b = Polyhedron::cuboid(&[q(0), q(0)], &[q(1), q(1)]);
        let r = validate_scene(&Damping::new(vec![a, b]), &t);
        assert!(matches!(&r.violations[..], [Violation::Overlap { .. }]));
    }

    #[test]
    fn vertices_of_triangle() {
        let p = Polyhedron::new(vec![
            HalfSpace::new(vec![q(-1), q(0)], q(0)),
            HalfSpace::new(vec![q(0), q(-1)], q(0)),
            HalfSpace::new(vec![q(1), q(1)], q(1)),
        ]);
        assert_eq!(p.vertices(), &[vec![q(0), q(0)], vec![q(0), q(1)], vec![q(1), q(0)]]);
        assert_eq!(p.bbox().unwrap(), &(vec![q(0), q(0)], vec![q(1), q(1)]));
    }
}
