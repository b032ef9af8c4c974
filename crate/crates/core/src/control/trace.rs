//! Exact tracing of a closed geodesic against the damping.
//!
//! Each polyhedron translate meets the line in a closed parameter interval.
//! Between consecutive interval endpoints ("breakpoints") the set of
//! containing translates and their active faces is constant, so classifying
//! one point per open gap plus every breakpoint describes the whole orbit.

use super::{closed_velocity, ControlError, Geodesic};
use crate::rational::{add, dot, fmt_q, q, qf, scale, sub, to_f64, Q};
use crate::scene::{FaceContact, PointClass, Scene};
use num_traits::{One, Signed, Zero};
use serde::Serialize;

/// Closed parameter interval `[lo, hi]` on which one translate contains the line.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub polyhedron: usize,
    pub shift: Vec<i64>,
    pub lo: Q,
    pub hi: Q,
}

/// Open parameter interval on the circle `R/Z`: `start ∈ [0,1)`, `start < end <= start + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParamInterval {
    #[serde(serialize_with = "ser_q")]
    pub start: Q,
    #[serde(serialize_with = "ser_q")]
    pub end: Q,
}

fn ser_q<S: serde::Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_q(x))
}

impl ParamInterval {
    pub fn contains(&self, t: &Q) -> bool {
        let t = crate::rational::mod_q(t, &Q::one());
        (&self.start < &t && &t < &self.end) || (&self.start < &(&t + Q::one()) && &(&t + Q::one()) < &self.end)
    }

    pub fn length(&self) -> Q {
        &self.end - &self.start
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Entry {
    Never,
    /// The whole orbit lies in the interior.
    Always,
    Intervals(Vec<ParamInterval>),
}

impl Entry {
    pub fn enters(&self) -> bool {
        !matches!(self, Entry::Never)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ContactSegment {
    pub polyhedron: usize,
    pub shift: Vec<i64>,
    pub faces: Vec<usize>,
    #[serde(serialize_with = "ser_q")]
    pub t_a: Q,
    #[serde(serialize_with = "ser_q")]
    pub t_b: Q,
}

impl ContactSegment {
    pub fn punctual(&self) -> bool {
        self.t_a == self.t_b
    }
}

#[derive(Debug, Clone)]
pub struct Cell {
    pub contacts: Vec<FaceContact>,
    pub class: PointClass,
}

/// The line of a closed geodesic cut at every breakpoint, fully classified.
#[derive(Debug, Clone)]
pub struct LineStructure {
    pub base: Vec<Q>,
    pub velocity: Vec<Q>,
    pub pieces: Vec<Piece>,
    /// Sorted, starts with 0, all in `[0, 1)`.
    pub breakpoints: Vec<Q>,
    /// Class at each breakpoint.
    pub at_points: Vec<Cell>,
    /// Class on `(b_i, b_{i+1})`, the last gap ending at 1.
    pub on_gaps: Vec<Cell>,
}

impl LineStructure {
    pub fn new(scene: &Scene, base: &[Q], velocity: &[Q]) -> Self {
        let end = add(base, velocity);
        let lo: Vec<Q> = base.iter().zip(&end).map(|(a, b)| a.min(b).clone()).collect();
        let hi: Vec<Q> = base.iter().zip(&end).map(|(a, b)| a.max(b).clone()).collect();
        let mut pieces = Vec::new();
        for (i, p) in scene.damping.polyhedra.iter().enumerate() {
            let (blo, bhi) = scene.bbox(i);
            'shift: for shift in scene.torus.shifts_meeting(blo, bhi, &lo, &hi) {
                let g = scene.torus.lattice_vector(&shift);
                let x0 = sub(base, &g);
                let mut tlo: Option<Q> = None;
                let mut thi: Option<Q> = None;
                for h in &p.halfspaces {
                    let nv = dot(&h.normal, velocity);
                    let slack = h.slack(&x0);
                    if nv.is_zero() {
                        if slack.is_negative() {
                            continue 'shift;
                        }
                    } else {
                        let t = &slack / &nv;
                        if nv.is_positive() {
                            if thi.as_ref().map_or(true, |x| &t < x) {
                                thi = Some(t);
                            }
                        } else if tlo.as_ref().map_or(true, |x| &t > x) {
                            tlo = Some(t);
                        }
                    }
                }
                let (Some(a), Some(b)) = (tlo, thi) else { continue };
                if a <= b && b >= Q::zero() && a <= Q::one() {
                    pieces.push(Piece { polyhedron: i, shift, lo: a, hi: b });
                }
            }
        }
        let mut breakpoints = vec![Q::zero()];
        for p in &pieces {
            for t in [&p.lo, &p.hi] {
                if !t.is_negative() && t < &Q::one() {
                    breakpoints.push(t.clone());
                }
            }
        }
        breakpoints.sort();
        breakpoints.dedup();
        let mut ls = LineStructure {
            base: base.to_vec(),
            velocity: velocity.to_vec(),
            pieces,
            breakpoints,
            at_points: Vec::new(),
            on_gaps: Vec::new(),
        };
        let k = ls.breakpoints.len();
        for i in 0..k {
            let t = ls.breakpoints[i].clone();
            let c = ls.contacts(scene, &t);
            ls.at_points.push(Cell { class: scene.classify_contacts(c.clone()), contacts: c });
            let next = if i + 1 < k { ls.breakpoints[i + 1].clone() } else { Q::one() };
            let mid = (&t + &next) * qf(1, 2);
            let c = ls.contacts(scene, &mid);
            ls.on_gaps.push(Cell { class: scene.classify_contacts(c.clone()), contacts: c });
        }
        ls
    }

    pub fn for_geodesic(scene: &Scene, g: &Geodesic) -> Result<Self, ControlError> {
        let n = g.closed_n().ok_or(ControlError::NotClosed)?;
        Ok(Self::new(scene, &g.base, &closed_velocity(&scene.torus, n)))
    }

    pub fn point(&self, t: &Q) -> Vec<Q> {
        add(&self.base, &scale(&self.velocity, t))
    }

    pub fn gap_end(&self, i: usize) -> Q {
        self.breakpoints.get(i + 1).cloned().unwrap_or_else(Q::one)
    }

    fn contacts(&self, scene: &Scene, t: &Q) -> Vec<FaceContact> {
        let x = self.point(t);
        let mut out = Vec::new();
        for p in &self.pieces {
            if &p.lo <= t && t <= &p.hi {
                let poly = &scene.damping.polyhedra[p.polyhedron];
                let y = sub(&x, &scene.torus.lattice_vector(&p.shift));
                out.push(FaceContact { polyhedron: p.polyhedron, shift: p.shift.clone(), faces: poly.active_faces(&y) });
            }
        }
        out
    }

    /// Maximal open runs where `pred` holds, as circle intervals.
    fn runs(&self, pred: impl Fn(&PointClass) -> bool) -> Entry {
        // elements alternate: point 0, gap 0, point 1, gap 1, ...
        let total = 2 * self.breakpoints.len();
        let ok: Vec<bool> = (0..total)
            .map(|e| if e % 2 == 0 { pred(&self.at_points[e / 2].class) } else { pred(&self.on_gaps[e / 2].class) })
            .collect();
        if ok.iter().all(|&b| b) {
            return Entry::Always;
        }
        if !ok.iter().skip(1).step_by(2).any(|&b| b) {
            return Entry::Never;
        }
        let f = ok.iter().position(|&b| !b).unwrap();
        let mut out = Vec::new();
        let mut open: Option<Q> = None;
        for s in 1..=total {
            let idx = f + s;
            let e = idx % total;
            let pos = &self.breakpoints[e / 2] + q((idx / total) as i64);
            if ok[e] {
                if open.is_none() {
                    open = Some(pos);
                }
            } else if let Some(st) = open.take() {
                out.push(normalize(st, pos));
            }
        }
        out.sort_by(|a, b| a.start.cmp(&b.start));
        Entry::Intervals(out)
    }

    pub fn entry(&self) -> Entry {
        self.runs(PointClass::is_interior)
    }

    pub fn meets_support(&self) -> bool {
        self.at_points.iter().chain(&self.on_gaps).any(|c| c.class.in_support())
    }

    /// Longest parameter stretch outside the set selected by `pred` (a full period when never inside).
    fn longest_gap(&self, pred: impl Fn(&PointClass) -> bool) -> Q {
        let k = self.breakpoints.len();
        let mut best = Q::zero();
        // rotate so we start just after an element inside, if any
        let inside_pt: Vec<bool> = self.at_points.iter().map(|c| pred(&c.class)).collect();
        let inside_gap: Vec<bool> = self.on_gaps.iter().map(|c| pred(&c.class)).collect();
        if !inside_pt.iter().chain(&inside_gap).any(|&b| b) {
            return Q::one();
        }
        let mut cur = Q::zero();
        for _ in 0..2 {
            for i in 0..k {
                if inside_pt[i] {
                    cur = Q::zero();
                }
                if inside_gap[i] {
                    cur = Q::zero();
                } else {
                    cur += self.gap_end(i) - &self.breakpoints[i];
                    if cur > best {
                        best = cur.clone();
                    }
                }
            }
        }
        best.min(Q::one())
    }

    pub fn interior_gap(&self) -> Q {
        self.longest_gap(PointClass::is_interior)
    }

    pub fn support_gap(&self) -> Q {
        self.longest_gap(PointClass::in_support)
    }

    /// Arclength of a parameter span, for display.
    pub fn arclength(&self, t: &Q) -> f64 {
        to_f64(t) * to_f64(&dot(&self.velocity, &self.velocity)).sqrt()
    }

    pub fn contact_segments(&self) -> Vec<ContactSegment> {
        let mut out: Vec<ContactSegment> = Vec::new();
        let k = self.breakpoints.len();
        let mut running: Vec<ContactSegment> = Vec::new();
        for i in 0..k {
            let gap = &self.on_gaps[i];
            let mut next_running = Vec::new();
            if matches!(gap.class, PointClass::Boundary(_)) {
                for c in &gap.contacts {
                    let cont = running
                        .iter()
                        .position(|r| r.polyhedron == c.polyhedron && r.shift == c.shift && r.faces == c.faces);
                    let mut seg = match cont {
                        Some(j) => running.swap_remove(j),
                        None => ContactSegment {
                            polyhedron: c.polyhedron,
                            shift: c.shift.clone(),
                            faces: c.faces.clone(),
                            t_a: self.breakpoints[i].clone(),
                            t_b: Q::zero(),
                        },
                    };
                    seg.t_b = self.gap_end(i);
                    next_running.push(seg);
                }
            }
            out.append(&mut running);
            // a run only continues through breakpoint i+1 if that point is boundary too
            let cont_ok = i + 1 < k && matches!(self.at_points[i + 1].class, PointClass::Boundary(_));
            if cont_ok {
                running = next_running;
            } else {
                out.append(&mut next_running);
            }
        }
        out.append(&mut running);
        for p in &self.pieces {
            if p.lo == p.hi && !p.lo.is_negative() && p.lo < Q::one() {
                let i = self.breakpoints.binary_search(&p.lo).expect("punctual contact is a breakpoint");
                if let Some(c) = self.at_points[i]
                    .contacts
                    .iter()
                    .find(|c| c.polyhedron == p.polyhedron && c.shift == p.shift)
                {
                    if !self.at_points[i].class.is_interior() {
                        out.push(ContactSegment {
                            polyhedron: p.polyhedron,
                            shift: p.shift.clone(),
                            faces: c.faces.clone(),
                            t_a: p.lo.clone(),
                            t_b: p.lo.clone(),
                        });
                    }
                }
            }
        }
        out.sort();
        out
    }
}

fn normalize(start: Q, end: Q) -> ParamInterval {
    let k = start.floor();
    ParamInterval { start: &start - &k, end: &end - &k }
}

/// Maximal open parameter intervals of `[0, 1)` spent in the interior of the support.
pub fn trace_to_interior(scene: &Scene, g: &Geodesic) -> Result<Entry, ControlError> {
    Ok(LineStructure::for_geodesic(scene, g)?.entry())
}

/// Every maximal stretch along which the geodesic runs in the boundary of the
/// support, one entry per touching polyhedron translate; punctual contacts have `t_a = t_b`.
pub fn contact_segments(scene: &Scene, g: &Geodesic) -> Result<Vec<ContactSegment>, ControlError> {
    Ok(LineStructure::for_geodesic(scene, g)?.contact_segments())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};
    use crate::scene::preset_scene;

    fn tunnel(a: &str) -> Scene {
        preset_scene(a).unwrap()
    }

    #[test]
    fn axis_of_prism_tunnel_never_enters() {
        let s = tunnel("fig4_1:1/10,1/10,1/10,1/10");
        let g = Geodesic::closed(&s.torus, &[q(0), q(0), q(0)], &[0, 0, 1]).unwrap();
        assert_eq!(trace_to_interior(&s, &g).unwrap(), Entry::Never);
    }

    #[test]
    fn off_axis_enters_top_prism() {
        let s = tunnel("fig4_1:1/10,1/10,1/10,1/10");
        let g = Geodesic::closed(&s.torus, &[qf(1, 4), qf(1, 4), q(0)], &[0, 0, 1]).unwrap();
        // y = 2t, so y in (-1/2, 0) mod 2 is t in (3/4, 1)
        assert_eq!(
            trace_to_interior(&s, &g).unwrap(),
            Entry::Intervals(vec![ParamInterval { start: qf(3, 4), end: q(1) }])
        );
    }

    #[test]
    fn full_damping_always_inside() {
        let s = tunnel("full:3");
        let g = Geodesic::closed(&s.torus, &[qf(1, 3), q(0), q(0)], &[1, 2, 0]).unwrap();
        assert_eq!(trace_to_interior(&s, &g).unwrap(), Entry::Always);
    }

    #[test]
    fn cube_tunnel_contacts() {
        let s = tunnel("fig5_1");
        let g = Geodesic::closed(&s.torus, &[q(0), q(0), q(0)], &[0, 0, 1]).unwrap();
        let segs = contact_segments(&s, &g).unwrap();
        assert_eq!(segs.len(), 4);
        let mut spans: Vec<(Q, Q)> = segs.iter().map(|c| (c.t_a.clone(), c.t_b.clone())).collect();
        spans.sort();
        assert_eq!(
            spans,
            vec![(q(0), qf(1, 4)), (qf(1, 4), qf(1, 2)), (qf(1, 2), qf(3, 4)), (qf(3, 4), q(1))]
        );
        assert!(segs.iter().all(|c| c.faces.len() == 2));

        let g = Geodesic::closed(&s.torus, &[qf(1, 4), q(0), q(0)], &[0, 0, 1]).unwrap();
        let segs = contact_segments(&s, &g).unwrap();
        assert_eq!(segs.len(), 2);
        assert!(segs.iter().all(|c| c.faces.len() == 1 && !c.punctual()));
    }

    #[test]
    fn far_geodesic_has_no_contacts() {
        let t = crate::scene::FlatTorus::from_ints(&[4, 4]).unwrap();
        let d = crate::scene::Damping::new(vec![crate::scene::Polyhedron::cuboid(&[q(0), q(0)], &[q(1), q(1)])]);
        let s = Scene::new(t, d).unwrap();
        let g = Geodesic::closed(&s.torus, &[q(2), q(0)], &[0, 1]).unwrap();
        assert!(contact_segments(&s, &g).unwrap().is_empty());
        assert_eq!(trace_to_interior(&s, &g).unwrap(), Entry::Never);
        let ls = LineStructure::for_geodesic(&s, &g).unwrap();
        assert!(!ls.meets_support());
        assert_eq!(ls.interior_gap(), q(1));
    }

    #[test]
    fn punctual_contact_on_checkerboard_diagonal() {
        let s = tunnel("checkerboard2d:a");
        let g = Geodesic::closed(&s.torus, &[q(0), qf(1, 2)], &[1, 1]).unwrap();
        assert_eq!(trace_to_interior(&s, &g).unwrap(), Entry::Never);
        let segs = contact_segments(&s, &g).unwrap();
        assert!(!segs.is_empty());
        assert!(segs.iter().all(ContactSegment::punctual));
    }

    #[test]
    fn wrap_around_interval() {
        // box covering y in (3/2, 5/2) on a period-2 circle: t in (3/4, 5/4)
        let t = crate::scene::FlatTorus::from_ints(&[2, 2]).unwrap();
        let d = crate::scene::Damping::new(vec![crate::scene::Polyhedron::cuboid(
            &[q(0), qf(3, 2)],
            &[q(1), qf(5, 2)],
        )]);
        let s = Scene::new(t, d).unwrap();
        let g = Geodesic::closed(&s.torus, &[qf(1, 2), q(0)], &[0, 1]).unwrap();
        assert_eq!(
            trace_to_interior(&s, &g).unwrap(),
            Entry::Intervals(vec![ParamInterval { start: qf(3, 4), end: qf(5, 4) }])
        );
        let ls = LineStructure::for_geodesic(&s, &g).unwrap();
        assert_eq!(ls.interior_gap(), qf(1, 2));
    }
}
