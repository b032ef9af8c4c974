//! Direction survey and the four control conditions.
//!
//! For each primitive direction `n` with `max |n_j| ≤ N` the torus is
//! quotiented along `n`; every orbit avoiding all open polyhedra has its
//! transverse point in a closed union of arrangement cells, one representative
//! of which is traced exactly. Dense orbit closures are checked on subspaces
//! spanned by directions that already carry never-entering geodesics, plus any
//! subspaces supplied by the caller.

use super::closure::orbit_closure_meets_interior;
use super::normal::{report_from_line, Complement, NormalDampingReport};
use super::trace::LineStructure;
use super::transverse::{base_point, Transversal};
use super::{closed_velocity, period_length, ControlError, Geodesic};
use crate::rational::{rref, Q};
use crate::scene::Scene;
use num_integer::Integer;
use rayon::prelude::*;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Condition {
    Wgcc,
    Sgcc,
    Cond13,
    FiniteExceptions,
}

impl Condition {
    pub const ALL: [Condition; 4] = [Condition::Wgcc, Condition::Sgcc, Condition::Cond13, Condition::FiniteExceptions];

    pub fn token(self) -> &'static str {
        match self {
            Condition::Wgcc => "wgcc",
            Condition::Sgcc => "sgcc",
            Condition::Cond13 => "cond13",
            Condition::FiniteExceptions => "finexc",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Condition {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "wgcc" => Ok(Condition::Wgcc),
            "sgcc" => Ok(Condition::Sgcc),
            "cond13" => Ok(Condition::Cond13),
            "finexc" | "finite_exceptions" | "finiteexceptions" => Ok(Condition::FiniteExceptions),
            other => Err(format!("unknown condition `{other}` (expected wgcc, sgcc, cond13, finexc)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Holds,
    Fails,
    Unknown,
}

impl Outcome {
    pub fn token(self) -> &'static str {
        match self {
            Outcome::Holds => "holds",
            Outcome::Fails => "fails",
            Outcome::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone)]
pub enum Evidence {
    NeverEntersInterior,
    NeverMeetsSupport,
    Undamped(NormalDampingReport),
    ClosureAvoidsInterior,
    /// All geodesics in this direction enter, but only within a period longer than the horizon.
    PeriodBeyondHorizon { period: f64 },
    /// The transverse lattice group was too large to enumerate.
    DirectionSkipped,
}

impl Evidence {
    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::json;
        match self {
            Evidence::NeverEntersInterior => json!({"kind": "never_enters_interior"}),
            Evidence::NeverMeetsSupport => json!({"kind": "never_meets_support"}),
            Evidence::Undamped(r) => json!({"kind": "undamped_normals", "report": r.to_json()}),
            Evidence::ClosureAvoidsInterior => json!({"kind": "closure_avoids_interior"}),
            Evidence::PeriodBeyondHorizon { period } => {
                json!({"kind": "period_beyond_horizon", "period": crate::json::num(*period)})
            }
            Evidence::DirectionSkipped => json!({"kind": "direction_skipped"}),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Witness {
    pub geodesic: Geodesic,
    pub evidence: Evidence,
}

impl Witness {
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = self.geodesic.to_json();
        v["evidence"] = self.evidence.to_json();
        v
    }
}

#[derive(Debug, Clone)]
pub struct ConditionVerdict {
    pub condition: Condition,
    pub result: Outcome,
    pub bound: u32,
    pub witnesses: Vec<Witness>,
}

impl ConditionVerdict {
    /// `holds (bound N)` for bound-qualified verdicts.
    pub fn label(&self) -> String {
        match self.result {
            Outcome::Holds => format!("holds (bound {})", self.bound),
            r => r.token().to_string(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "schema": "1",
            "condition": self.condition.token(),
            "result": self.result.token(),
            "bound": self.bound,
            "witnesses": self.witnesses.iter().map(Witness::to_json).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct SurveyOptions {
    pub bound: u32,
    /// Arclength horizon for strong control.
    pub horizon: f64,
    /// Extra orbit-closure subspaces to check, each given by a spanning list.
    pub subspaces: Vec<Vec<Vec<Q>>>,
}

impl SurveyOptions {
    pub fn new(bound: u32, horizon: f64) -> Self {
        SurveyOptions { bound, horizon, subspaces: Vec::new() }
    }
}

/// A never-entering closed geodesic with its traced structure.
#[derive(Debug, Clone)]
pub struct Razing {
    pub geodesic: Geodesic,
    pub report: NormalDampingReport,
    pub meets_support: bool,
}

#[derive(Debug, Clone)]
pub struct Survey {
    pub options: SurveyOptions,
    pub directions: usize,
    pub razing: Vec<Razing>,
    pub dense: Vec<Geodesic>,
    /// Period length of each direction in which every geodesic enters.
    pub entering_periods: Vec<(Vec<i64>, f64)>,
    pub skipped: Vec<Vec<i64>>,
}

#[derive(Default)]
struct DirectionResult {
    razing: Vec<Razing>,
    skipped: bool,
}

/// Primitive directions with `max |n_j| ≤ bound`, one per line (first nonzero entry positive).
pub fn primitive_directions(d: usize, bound: u32) -> Vec<Vec<i64>> {
    let b = bound as i64;
    let mut out = Vec::new();
    let mut n = vec![-b; d];
    loop {
        let first = n.iter().find(|&&x| x != 0);
        if matches!(first, Some(&x) if x > 0) && n.iter().fold(0i64, |g, &x| g.gcd(&x)) == 1 {
            out.push(n.clone());
        }
        let mut i = 0;
        loop {
            if i == d {
                out.sort();
                return out;
            }
            if n[i] < b {
                n[i] += 1;
                break;
            }
            n[i] = -b;
            i += 1;
        }
    }
}

fn survey_direction(scene: &Scene, n: &[i64]) -> Result<DirectionResult, ControlError> {
    let v = closed_velocity(&scene.torus, n);
    let Some(tr) = Transversal::new(scene, std::slice::from_ref(&v)) else {
        return Ok(DirectionResult { razing: vec![], skipped: true });
    };
    let mut seen = BTreeSet::new();
    let mut razing = Vec::new();
    for y in tr.candidates() {
        let key = tr.canonical(&y);
        if !seen.insert(key.clone()) {
            continue;
        }
        let base = base_point(scene, &tr, &key);
        let ls = LineStructure::new(scene, &base, &v);
        if ls.entry().enters() {
            continue;
        }
        let g = Geodesic::closed(&scene.torus, &base, n)?;
        let report = report_from_line(scene, &g, &ls)?;
        razing.push(Razing { geodesic: g, report, meets_support: ls.meets_support() });
    }
    Ok(DirectionResult { razing, skipped: false })
}

/// Spans of `2..d` razing directions plus the caller's subspaces, deduplicated.
fn dense_subspaces(d: usize, dirs: &[Vec<Q>], extra: &[Vec<Vec<Q>>]) -> Vec<Vec<Vec<Q>>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut push = |span: Vec<Vec<Q>>| {
        let (r, _) = rref(&span);
        if r.len() >= 2 && r.len() < d && seen.insert(r.clone()) {
            out.push(r);
        }
    };
    fn rec(dirs: &[Vec<Q>], start: usize, cur: &mut Vec<Vec<Q>>, max: usize, push: &mut dyn FnMut(Vec<Vec<Q>>)) {
        if cur.len() >= 2 {
            push(cur.clone());
        }
        if cur.len() == max {
            return;
        }
        for i in start..dirs.len() {
            cur.push(dirs[i].clone());
            rec(dirs, i + 1, cur, max, push);
            cur.pop();
        }
    }
    rec(dirs, 0, &mut Vec::new(), d - 1, &mut push);
    let mut result = out;
    for s in extra {
        let (r, _) = rref(s);
        if r.len() >= 2 && r.len() < d && !result.contains(&r) {
            result.push(r);
        }
    }
    result
}

pub fn survey(scene: &Scene, options: &SurveyOptions) -> Result<Survey, ControlError> {
    if options.bound == 0 || !(options.horizon > 0.0) {
        return Err(ControlError::BadBound);
    }
    let d = scene.dim();
    let dirs = primitive_directions(d, options.bound);
    let results: Vec<Result<DirectionResult, ControlError>> = dirs.par_iter().map(|n| survey_direction(scene, n)).collect();
    let mut razing = Vec::new();
    let mut skipped = Vec::new();
    let mut entering_periods = Vec::new();
    let mut razing_dirs: Vec<Vec<Q>> = Vec::new();
    for (n, r) in dirs.iter().zip(results) {
        let r = r?;
        if r.skipped {
            skipped.push(n.clone());
        } else if r.razing.is_empty() {
            entering_periods.push((n.clone(), period_length(&scene.torus, n)));
        } else {
            razing_dirs.push(closed_velocity(&scene.torus, n));
        }
        razing.extend(r.razing);
    }
    razing.sort_by(|a, b| a.geodesic.cmp(&b.geodesic));

    let mut dense = Vec::new();
    if !scene.damping.is_empty() {
        for span in dense_subspaces(d, &razing_dirs, &options.subspaces) {
            let Some(tr) = Transversal::new(scene, &span) else { continue };
            let mut seen = BTreeSet::new();
            for y in tr.candidates() {
                let key = tr.canonical(&y);
                if !seen.insert(key.clone()) {
                    continue;
                }
                let g = Geodesic::dense(&scene.torus, &base_point(scene, &tr, &key), span.clone())?;
                if !orbit_closure_meets_interior(scene, &g)?.meets {
                    dense.push(g);
                }
            }
        }
    }
    dense.sort();
    Ok(Survey { options: options.clone(), directions: dirs.len(), razing, dense, entering_periods, skipped })
}

impl Survey {
    pub fn verdict(&self, condition: Condition) -> ConditionVerdict {
        let bound = self.options.bound;
        let mut witnesses = Vec::new();
        let mut unknown = Vec::new();
        let skipped = || -> Vec<Witness> {
            self.skipped
                .iter()
                .map(|n| Witness {
                    geodesic: Geodesic { base: vec![], direction: super::Direction::Closed(n.clone()) },
                    evidence: Evidence::DirectionSkipped,
                })
                .collect()
        };
        match condition {
            Condition::Wgcc | Condition::Sgcc => {
                for r in &self.razing {
                    if condition == Condition::Sgcc {
                        witnesses.push(Witness { geodesic: r.geodesic.clone(), evidence: Evidence::NeverEntersInterior });
                    } else if !r.meets_support {
                        witnesses.push(Witness { geodesic: r.geodesic.clone(), evidence: Evidence::NeverMeetsSupport });
                    }
                }
                if condition == Condition::Sgcc {
                    for g in &self.dense {
                        witnesses.push(Witness { geodesic: g.clone(), evidence: Evidence::ClosureAvoidsInterior });
                    }
                    for (n, p) in &self.entering_periods {
                        if *p > self.options.horizon {
                            unknown.push(Witness {
                                geodesic: Geodesic { base: vec![], direction: super::Direction::Closed(n.clone()) },
                                evidence: Evidence::PeriodBeyondHorizon { period: *p },
                            });
                        }
                    }
                }
                unknown.extend(skipped());
            }
            Condition::Cond13 | Condition::FiniteExceptions => {
                for r in &self.razing {
                    let bad = match (&r.report.complement, condition) {
                        (Complement::Empty, _) => None,
                        (Complement::FiniteSet(_), Condition::FiniteExceptions) => None,
                        (Complement::Undetermined, _) => Some(false),
                        (Complement::FiniteSet(_), _) | (Complement::PositiveMeasure(_), _) => Some(true),
                    };
                    let w = Witness { geodesic: r.geodesic.clone(), evidence: Evidence::Undamped(r.report.clone()) };
                    match bad {
                        Some(true) => witnesses.push(w),
                        Some(false) => unknown.push(w),
                        None => {}
                    }
                }
                for g in &self.dense {
                    let w = Witness { geodesic: g.clone(), evidence: Evidence::ClosureAvoidsInterior };
                    if condition == Condition::Cond13 {
                        witnesses.push(w);
                    } else {
                        unknown.push(w);
                    }
                }
                unknown.extend(skipped());
            }
        }
        let (result, witnesses) = if !witnesses.is_empty() {
            (Outcome::Fails, witnesses)
        } else if !unknown.is_empty() {
            (Outcome::Unknown, unknown)
        } else {
            (Outcome::Holds, vec![])
        };
        ConditionVerdict { condition, result, bound, witnesses }
    }
}

pub fn check_condition(
    scene: &Scene,
    condition: Condition,
    bound: u32,
    horizon: f64,
) -> Result<ConditionVerdict, ControlError> {
    Ok(survey(scene, &SurveyOptions::new(bound, horizon))?.verdict(condition))
}
