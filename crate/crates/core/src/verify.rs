//! End-to-end check of the U4 circuit walks: the graph distance of the
//! antipodal vertex pair, the two hand-built walks of length at most 4, and
//! exhaustive search for the exact distances and the diameter.
//!
//! Labels here are 1-based (`V1234` is the vertex on rows 0..3).

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{normalize_primitive, RVector};
use crate::polyhedron::{FacetSet, HPolyhedron};
use crate::walks::{
    circuit_diameter, circuit_distance, max_step, validate_walk, CircuitWalk, Distance,
    SearchConfig, StepError, WalkMode,
};
use crate::{circuits::is_circuit, instances};

/// The vertices of U4 named in the walk construction.
pub const NAMED_VERTICES: [&str; 9] = [
    "V5678", "V1678", "V1478", "V1458", "V1345", "V1234", "V2346", "V3467", "V1467",
];

/// `prefix` followed by the 1-based row numbers, comma separated once any
/// exceeds 9.
pub fn label(prefix: &str, rows: &FacetSet) -> String {
    let sep = if rows.iter().any(|&r| r >= 9) {
        ","
    } else {
        ""
    };
    let parts: Vec<String> = rows.iter().map(|r| (r + 1).to_string()).collect();
    format!("{prefix}{}", parts.join(sep))
}

/// Rows of a single-digit label such as `V1478`.
pub fn label_rows(label: &str) -> Result<FacetSet> {
    let digits = label.trim_start_matches(|c: char| c.is_ascii_alphabetic());
    digits
        .chars()
        .map(|c| match c.to_digit(10) {
            Some(n) if n >= 1 => Ok(n as usize - 1),
            _ => Err(Error::Invalid(format!("bad label `{label}`"))),
        })
        .collect()
}

/// Where the maximal step inside the 2-face lands relative to the target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Landing {
    AtTarget,
    OnEdge { edge: String },
    OnRay { ray: String },
}

impl fmt::Display for Landing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Landing::AtTarget => write!(f, "exactly at the target"),
            Landing::OnEdge { edge } => write!(f, "on the edge {edge}"),
            Landing::OnRay { ray } => write!(f, "on the ray {ray}"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RecipeWalk {
    pub edge_path: Vec<String>,
    /// 1-based rows of the 2-face the walk finishes in.
    pub face: Vec<usize>,
    /// Edge whose direction is used for the third step.
    pub direction_edge: (String, String),
    pub landing: Landing,
    pub walk: CircuitWalk,
}

/// An unbounded edge: its vertex and the label of the ray.
#[derive(Clone, Debug, Serialize)]
pub struct UnboundedEdge {
    pub vertex: String,
    pub ray: String,
    pub direction: RVector,
}

#[derive(Clone, Debug, Serialize)]
pub struct U4Report {
    pub named_vertices: Vec<(String, RVector)>,
    pub rays: Vec<UnboundedEdge>,
    pub combinatorial_distance: usize,
    pub forward: RecipeWalk,
    pub reverse: RecipeWalk,
    pub circuit_distance_forward: Distance,
    pub circuit_distance_reverse: Distance,
    pub shortest_forward: Option<CircuitWalk>,
    pub shortest_reverse: Option<CircuitWalk>,
    /// `None` when the diameter search was skipped.
    pub circuit_diameter: Option<Distance>,
}

fn fail(stage: &str, detail: impl Into<String>) -> Error {
    Error::VerificationFailed {
        stage: stage.to_string(),
        detail: detail.into(),
    }
}

fn vertex(p: &HPolyhedron, name: &str) -> Result<RVector> {
    let rows = label_rows(name)?;
    let i = p
        .vertex_by_rows(&rows)
        .map_err(|e| fail("named vertices", format!("{name}: {e}")))?;
    if p.vertices()[i].active != rows {
        return Err(fail(
            "named vertices",
            format!("{name} is not a simple vertex"),
        ));
    }
    Ok(p.vertices()[i].point.clone())
}

/// Unbounded edges at the vertices of `p`, labelled by the rows tight along
/// them.
pub fn unbounded_edges(p: &HPolyhedron) -> Result<Vec<UnboundedEdge>> {
    let mut out = Vec::new();
    for v in p.vertices() {
        for c in p.circuits() {
            for g in c.signed() {
                if let Err(StepError::UnboundedDirection) = max_step(p, &v.point, &g)? {
                    let tight: FacetSet = v
                        .active
                        .iter()
                        .copied()
                        .filter(|&i| p.row(i).dot(&g).is_zero())
                        .collect();
                    if crate::exact::rank_of_rows(tight.iter().map(|&i| p.row(i)), p.dim()) + 1
                        == p.dim()
                    {
                        out.push(UnboundedEdge {
                            vertex: label("V", &v.active),
                            ray: label("R", &tight),
                            direction: g,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

fn classify(p: &HPolyhedron, x: &RVector, target: &FacetSet) -> Result<Landing> {
    let active = p.active_set(x)?;
    if active.is_superset(target) {
        return Ok(Landing::AtTarget);
    }
    if p.active_rank(x)? + 1 != p.dim() || !active.is_subset(target) {
        return Err(fail(
            "trichotomy",
            format!(
                "landing point {x} is on {} which is not incident to {}",
                label("", &active),
                label("V", target)
            ),
        ));
    }
    let other = p
        .vertices()
        .iter()
        .find(|w| w.active.is_superset(&active) && &w.active != target);
    Ok(match other {
        Some(w) => Landing::OnEdge {
            edge: format!("{}-{}", label("V", target), label("V", &w.active)),
        },
        None => Landing::OnRay {
            ray: label("R", &active),
        },
    })
}

/// Edge steps along `path`, then a maximal step along the edge direction
/// `dir_from -> dir_to` (or its negative if that one is blocked), then a
/// direct step to the end of `path`'s target if needed.
fn recipe(
    p: &HPolyhedron,
    path: &[&str],
    dir: (&str, &str),
    face: &str,
    target: &str,
) -> Result<RecipeWalk> {
    let mut pts: Vec<RVector> = path.iter().map(|n| vertex(p, n)).collect::<Result<_>>()?;
    validate_walk(p, &pts, WalkMode::Edge).map_err(|v| fail("edge steps", format!("{:?}", v)))?;
    let face_rows = label_rows(face)?;
    let target_rows = label_rows(target)?;
    let target_pt = vertex(p, target)?;
    let g = normalize_primitive(&vertex(p, dir.1)?.sub(&vertex(p, dir.0)?))?;
    if !is_circuit(p, &g)? || face_rows.iter().any(|&i| !p.row(i).dot(&g).is_zero()) {
        return Err(fail(
            "face direction",
            format!("{g} is not a circuit inside the face {face}"),
        ));
    }
    let here = pts.last().expect("non-empty path").clone();
    let (land, _) = [g.clone(), g.neg()]
        .into_iter()
        .find_map(|s| max_step(p, &here, &s).ok()?.ok())
        .ok_or_else(|| {
            fail(
                "face direction",
                format!(
                    "{g} is not a bounded feasible direction at {}",
                    path[path.len() - 1]
                ),
            )
        })?;
    if !p.active_set(&land)?.is_superset(&face_rows) {
        return Err(fail("face direction", "the step leaves the face"));
    }
    let landing = classify(p, &land, &target_rows)?;
    pts.push(land);
    if landing != Landing::AtTarget {
        pts.push(target_pt);
    }
    let walk = validate_walk(p, &pts, WalkMode::Maximal)
        .map_err(|v| fail("closing step", format!("{:?}", v)))?;
    if walk.len() > 4 {
        return Err(fail(
            "walk length",
            format!("walk has {} steps", walk.len()),
        ));
    }
    Ok(RecipeWalk {
        edge_path: path.iter().map(|s| s.to_string()).collect(),
        face: face_rows.iter().map(|r| r + 1).collect(),
        direction_edge: (dir.0.to_string(), dir.1.to_string()),
        landing,
        walk,
    })
}

/// The named vertices of U4 and the graph distance from `V5678` to `V1234`,
/// which must be 5.
pub fn u4_combinatorics(p: &HPolyhedron) -> Result<(Vec<(String, RVector)>, usize)> {
    let named = NAMED_VERTICES
        .iter()
        .map(|n| Ok((n.to_string(), vertex(p, n)?)))
        .collect::<Result<Vec<_>>>()?;
    let (u, v) = (
        p.vertex_by_rows(&label_rows("V5678")?)?,
        p.vertex_by_rows(&label_rows("V1234")?)?,
    );
    let distance = p.combinatorial_distance(u, v)?;
    if distance != 5 {
        return Err(fail(
            "graph distance",
            format!("found {distance}, expected 5"),
        ));
    }
    Ok((named, distance))
}

/// Runs the whole U4 check. The diameter search is the slow part and can be
/// skipped.
pub fn verify_u4(with_diameter: bool) -> Result<U4Report> {
    let p = instances::u4();
    p.validate()
        .into_result()
        .map_err(|e| fail("instance", e.to_string()))?;
    let (named_vertices, combinatorial_distance) = u4_combinatorics(&p)?;
    let forward = recipe(
        &p,
        &["V5678", "V1678", "V1478"],
        ("V1458", "V1345"),
        "F14",
        "V1234",
    )?;
    let reverse = recipe(
        &p,
        &["V1234", "V2346", "V3467"],
        ("V1467", "V1678"),
        "F67",
        "V5678",
    )?;

    let cfg = SearchConfig::default();
    let (a, b) = (&named_vertices[0].1, &named_vertices[5].1);
    let fwd = circuit_distance(&p, a, b, &cfg)?;
    let rev = circuit_distance(&p, b, a, &cfg)?;
    for (name, d) in [("forward", fwd.distance), ("reverse", rev.distance)] {
        if d != Distance::Exact(4) {
            return Err(fail(
                "exhaustive distance",
                format!("{name} distance is {d}, expected 4"),
            ));
        }
    }
    let circuit_diameter = if with_diameter {
        let d = circuit_diameter(&p, &cfg)?.diameter;
        if d != Distance::Exact(4) {
            return Err(fail(
                "exhaustive diameter",
                format!("diameter is {d}, expected 4"),
            ));
        }
        Some(d)
    } else {
        None
    };
    Ok(U4Report {
        named_vertices,
        rays: unbounded_edges(&p)?,
        combinatorial_distance,
        forward,
        reverse,
        circuit_distance_forward: fwd.distance,
        circuit_distance_reverse: rev.distance,
        shortest_forward: fwd.walk,
        shortest_reverse: rev.walk,
        circuit_diameter,
    })
}

/// Ray labels without duplicates, in order.
pub fn ray_labels(edges: &[UnboundedEdge]) -> Vec<String> {
    let set: BTreeSet<&str> = edges.iter().map(|e| e.ray.as_str()).collect();
    set.into_iter().map(str::to_string).collect()
}
