//! Text, JSON and DOT renderings. Row numbers are shown 1-based.

use std::fmt::Write as _;

use circdiam_core::exact::fmt_rational;
use circdiam_core::verify::{label, unbounded_edges};
use circdiam_core::walks::{CSimpleReport, NonSimpleStep};
use circdiam_core::{CircuitWalk, FacetSet, HPolyhedron, RVector, Result};
use serde_json::{json, Value};

pub fn one_based(rows: &FacetSet) -> Vec<usize> {
    rows.iter().map(|r| r + 1).collect()
}

pub fn vertex_label(p: &HPolyhedron, i: usize) -> String {
    label("V", &p.vertices()[i].active)
}

pub fn walk_json(w: &CircuitWalk) -> Value {
    let steps: Vec<Value> = w
        .steps
        .iter()
        .map(|s| {
            json!({
                "circuit": s.circuit,
                "alpha": fmt_rational(&s.alpha),
                "entered": one_based(&s.entered),
                "left": one_based(&s.left),
            })
        })
        .collect();
    json!({ "length": w.len(), "points": w.points, "steps": steps })
}

pub fn walk_text(w: &CircuitWalk) -> String {
    let mut out = w.start().to_string();
    for (s, x) in w.steps.iter().zip(&w.points[1..]) {
        write!(
            out,
            "\n  --[{} x {}]--> {}  enters {:?}",
            fmt_rational(&s.alpha),
            s.circuit,
            x,
            one_based(&s.entered)
        )
        .expect("writing to a String");
    }
    out
}

pub fn witness_json(w: &NonSimpleStep) -> Value {
    json!({
        "from": w.from,
        "to": w.to,
        "circuit": w.circuit,
        "alpha": fmt_rational(&w.alpha),
        "entered": one_based(&w.entered),
        "depth": w.depth,
    })
}

pub fn witness_text(w: &NonSimpleStep) -> String {
    format!(
        "step {} from {} along {} by {} to {} enters rows {:?}",
        w.depth,
        w.from,
        w.circuit,
        fmt_rational(&w.alpha),
        w.to,
        one_based(&w.entered)
    )
}

pub fn csimple_json(r: &CSimpleReport) -> Value {
    json!({
        "csimple": r.simple,
        "horizon": r.horizon,
        "explored": r.explored,
        "witness": r.witness.as_ref().map(witness_json),
    })
}

pub fn point_strings(x: &RVector) -> String {
    x.to_strings().join(" ")
}

/// Vertex-edge graph; unbounded edges end in point-shaped ray nodes.
pub fn dot(p: &HPolyhedron) -> Result<String> {
    let mut out = String::from("graph polyhedron {\n  node [shape=ellipse];\n");
    for (i, v) in p.vertices().iter().enumerate() {
        writeln!(
            out,
            "  \"{}\" [tooltip=\"{}\"];",
            vertex_label(p, i),
            v.point
        )
        .expect("writing to a String");
    }
    for (i, j) in p.edges() {
        writeln!(
            out,
            "  \"{}\" -- \"{}\";",
            vertex_label(p, i),
            vertex_label(p, j)
        )
        .expect("writing to a String");
    }
    for e in unbounded_edges(p)? {
        writeln!(out, "  \"{}\" [shape=point, xlabel=\"{}\"];", e.ray, e.ray)
            .expect("writing to a String");
        writeln!(out, "  \"{}\" -- \"{}\" [style=dashed];", e.vertex, e.ray)
            .expect("writing to a String");
    }
    out.push_str("}\n");
    Ok(out)
}
