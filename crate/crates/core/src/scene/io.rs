//! Scene files: one JSON document with every rational written as a `"p/q"` string.
//!
//! ```json
//! {"periods": ["2", "2"],
//!  "polyhedra": [{"halfspaces": [{"n": ["1", "0"], "c": "1/2"}, ...]}]}
//! ```

use super::{Damping, FlatTorus, HalfSpace, Polyhedron, Scene, SceneError};
use crate::rational::{fmt_q, parse_q, Q};
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneFile {
    periods: Vec<String>,
    polyhedra: Vec<PolyFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyFile {
    halfspaces: Vec<HalfSpaceFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HalfSpaceFile {
    n: Vec<String>,
    c: String,
}

fn rat(s: &str, what: &str) -> Result<Q, SceneError> {
    parse_q(s).map_err(|e| SceneError::Format(format!("{what}: {e}")))
}

/// Parses and validates a scene document.
pub fn parse_scene_json(text: &str) -> Result<Scene, SceneError> {
    let file: SceneFile = serde_json::from_str(text).map_err(|e| SceneError::Format(e.to_string()))?;
    let periods = file
        .periods
        .iter()
        .enumerate()
        .map(|(i, s)| rat(s, &format!("periods[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let torus = FlatTorus::new(periods)?;
    let mut polys = Vec::with_capacity(file.polyhedra.len());
    for (i, p) in file.polyhedra.iter().enumerate() {
        let mut hs = Vec::with_capacity(p.halfspaces.len());
        for (f, h) in p.halfspaces.iter().enumerate() {
            let n = h
                .n
                .iter()
                .map(|s| rat(s, &format!("polyhedra[{i}].halfspaces[{f}].n")))
                .collect::<Result<Vec<_>, _>>()?;
            hs.push(HalfSpace::new(n, rat(&h.c, &format!("polyhedra[{i}].halfspaces[{f}].c"))?));
        }
        polys.push(Polyhedron::new(hs));
    }
    Scene::new(torus, Damping::new(polys))
}

pub fn scene_to_json(scene: &Scene) -> String {
    let file = SceneFile {
        periods: scene.torus.periods().iter().map(fmt_q).collect(),
        polyhedra: scene
            .damping
            .polyhedra
            .iter()
            .map(|p| PolyFile {
                halfspaces: p
                    .halfspaces
                    .iter()
                    .map(|h| HalfSpaceFile { n: h.normal.iter().map(fmt_q).collect(), c: fmt_q(&h.offset) })
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("scene serializes")
}
