mod render;

use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use circdiam_core::constructions::{
    boundedize, dantzig_from_pair, make_csimple, perturb, vertexify, wedge, Augmented,
    CSimpleOptions, DantzigOptions, WedgeRow,
};
use circdiam_core::exact::{fmt_rational, parse_vector};
use circdiam_core::walks::{
    circuit_diameter, circuit_distance, find_nonrevisiting_walk, ViolationKind,
};
use circdiam_core::{
    check_csimple, emit_hpoly, instances, parse_hpoly, parse_rational, validate_walk, verify_u4,
    Error, FacetSet, HPolyhedron, RVector, Rational, SearchConfig, StartPoints, WalkMode,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use render::{one_based, vertex_label};

/// Exact circuit walks and circuit diameters of rational polyhedra.
///
/// Polyhedra are read in HPOLY format (`d f`, then `f` rows `a_1 .. a_d b`
/// meaning `a . x >= b`) from `--input` or standard input. Facets are numbered
/// from 1; a vertex is addressed by facets containing it (`5,6,7,8`) and a
/// point by its coordinates in parentheses (`(1/2,0)`).
#[derive(Parser)]
#[command(name = "circdiam", version)]
struct Cli {
    /// Print a JSON report (schema 1) instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized constructions.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for parallel search.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// HPOLY input file; `-` or absent reads standard input.
    #[arg(short, long, global = true)]
    input: Option<PathBuf>,
    /// Write construction logs to this file instead of standard error.
    #[arg(long, global = true)]
    log: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Edge,
    Circuit,
}

#[derive(Args)]
struct Search {
    /// Maximum walk length to search.
    #[arg(long)]
    depth: Option<usize>,
}

impl Search {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            depth_limit: self.depth,
            ..Default::default()
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// List circuits, one primitive integer vector per line.
    Circuits,
    /// List vertices with their facets.
    Vertices,
    /// List the bounded edges of the vertex-edge graph.
    Edges {
        /// Emit the graph in DOT, with unbounded edges drawn to ray nodes.
        #[arg(long)]
        dot: bool,
    },
    /// Edge or circuit distance between two vertices (circuit mode allows any
    /// feasible start point).
    Distance {
        #[arg(long, value_enum, default_value = "circuit")]
        mode: Mode,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[command(flatten)]
        search: Search,
    },
    /// Edge or circuit diameter.
    Diameter {
        #[arg(long, value_enum, default_value = "circuit")]
        mode: Mode,
        #[command(flatten)]
        search: Search,
    },
    /// Circuit walk in which every step enters a facet not visited before.
    Nonrevisiting {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[command(flatten)]
        search: Search,
    },
    /// Whether every circuit walk up to the horizon enters one facet per step.
    CheckCsimple {
        #[command(flatten)]
        search: Search,
        /// Extra start points, one per line.
        #[arg(long)]
        points: Option<PathBuf>,
        /// Also start from the vertex centroid of every facet.
        #[arg(long)]
        facet_centroids: bool,
    },
    /// Re-check a walk given as points (one per line) or as a JSON report.
    ValidateWalk {
        #[arg(long)]
        walk: PathBuf,
        /// Require every step to be an edge step.
        #[arg(long)]
        edges_only: bool,
    },
    /// Wedge over a facet.
    Wedge {
        #[arg(long)]
        facet: usize,
        #[arg(long, default_value = "1")]
        slope: String,
    },
    /// Random right-hand-side perturbation of size below eps.
    Perturb {
        #[arg(long, default_value = "1/64")]
        eps: String,
    },
    /// Perturb until C-simple.
    MakeCsimple {
        #[command(flatten)]
        search: Search,
        #[arg(long, default_value = "1/64")]
        eps: String,
        #[arg(long, default_value_t = 12)]
        budget: usize,
        /// Only accept perturbations that do not lower the circuit diameter.
        #[arg(long)]
        certify_diameter: bool,
        #[arg(long)]
        facet_centroids: bool,
    },
    /// Add rows opposite to facets of v at u until bounded.
    Boundedize {
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
    },
    /// Make the point u a vertex with rows opposite to facets of v.
    Vertexify {
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
    },
    /// Wedge until every facet contains exactly one of u and v.
    Dantzig {
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        #[command(flatten)]
        search: Search,
        /// Fail if some stage cannot be made C-simple.
        #[arg(long)]
        require_csimple: bool,
    },
    /// Print a built-in instance: u4, q4[:margin], cube:d, simplex:d, square,
    /// triangle, hexagon, quadrant, pentagon.
    Instance { name: String },
    /// Check the circuit walks and exact circuit diameter of U4.
    VerifyU4 {
        /// Skip the exhaustive diameter search.
        #[arg(long)]
        skip_diameter: bool,
    },
}

struct CliError {
    code: u8,
    msg: String,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError {
            code: 2,
            msg: msg.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Exhausted(_)
            | Error::PerturbationFailed(_)
            | Error::VerificationFailed { .. }
            | Error::TransferFailed(_)
            | Error::NotTransferable { .. }
            | Error::NotASpindle(_) => 1,
            _ => 2,
        };
        CliError {
            code,
            msg: e.to_string(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

struct Report {
    text: String,
    json: Value,
    ok: bool,
    log: Option<Value>,
}

impl Report {
    fn ok(text: impl Into<String>, json: Value) -> Self {
        Report {
            text: text.into(),
            json,
            ok: true,
            log: None,
        }
    }

    fn construction(p: &HPolyhedron, log: Value) -> Self {
        Report {
            text: emit_hpoly(p),
            json: json!({ "hpoly": emit_hpoly(p), "polyhedron": p }),
            ok: true,
            log: Some(log),
        }
    }
}

fn read_source(path: Option<&Path>) -> CliResult<String> {
    let mut text = String::new();
    match path {
        Some(p) if p != Path::new("-") => {
            text = std::fs::read_to_string(p)
                .map_err(|e| CliError::usage(format!("{}: {e}", p.display())))?;
        }
        _ => {
            io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| CliError::usage(format!("reading standard input: {e}")))?;
        }
    }
    Ok(text)
}

fn load(path: Option<&Path>) -> CliResult<HPolyhedron> {
    let p = parse_hpoly(&read_source(path)?).map_err(|e| CliError::usage(e.to_string()))?;
    let report = p.validate();
    if !report.is_valid() {
        let mut why = Vec::new();
        if !report.pointed {
            why.push(format!("rank(A) = {} < d = {}", report.rank, report.dim));
        } else if !report.nonempty {
            why.push("empty".into());
        } else if !report.full_dimensional {
            why.push("not full-dimensional".into());
        }
        if !report.non_facet_rows.is_empty() {
            let rows: FacetSet = report.non_facet_rows.iter().copied().collect();
            why.push(format!("rows {:?} do not define facets", one_based(&rows)));
        }
        for (i, j) in &report.duplicate_rows {
            why.push(format!("row {} repeats row {}", j + 1, i + 1));
        }
        return Err(CliError::usage(format!(
            "invalid polyhedron: {}",
            why.join("; ")
        )));
    }
    Ok(p)
}

fn rational_arg(name: &str, s: &str) -> CliResult<Rational> {
    parse_rational(s).map_err(|e| CliError::usage(format!("--{name}: {e}")))
}

fn point_arg(s: &str) -> Option<CliResult<RVector>> {
    let inner = s.trim().strip_prefix(['(', '['])?;
    let inner = inner.strip_suffix([')', ']']).unwrap_or(inner);
    Some(parse_vector(inner).map_err(|e| CliError::usage(format!("bad point `{s}`: {e}"))))
}

fn vertex_arg(p: &HPolyhedron, s: &str) -> CliResult<usize> {
    let rows = s
        .split(',')
        .map(|t| match t.trim().parse::<usize>() {
            Ok(n) if (1..=p.num_rows()).contains(&n) => Ok(n - 1),
            _ => Err(CliError::usage(format!(
                "bad facet `{t}` in `{s}` (facets are 1..{})",
                p.num_rows()
            ))),
        })
        .collect::<CliResult<FacetSet>>()?;
    p.vertex_by_rows(&rows)
        .map_err(|_| CliError::usage(format!("facets {s} do not identify a unique vertex")))
}

/// A vertex by facets, or a feasible point by coordinates.
fn location_arg(p: &HPolyhedron, s: &str) -> CliResult<(RVector, Option<usize>)> {
    match point_arg(s) {
        Some(x) => {
            let x = x?;
            if x.dim() != p.dim() {
                return Err(CliError::usage(format!(
                    "point `{s}` must have {} coordinates",
                    p.dim()
                )));
            }
            if !p.is_feasible(&x)? {
                return Err(CliError::usage(format!("point `{s}` is not feasible")));
            }
            let v = p.vertex_index(&x);
            Ok((x, v))
        }
        None => {
            let v = vertex_arg(p, s)?;
            Ok((p.vertices()[v].point.clone(), Some(v)))
        }
    }
}

fn read_points(path: &Path, dim: usize) -> CliResult<Vec<RVector>> {
    let text = read_source(Some(path))?;
    if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        let pts = find_points(&v).ok_or_else(|| CliError::usage("JSON report contains no walk"))?;
        return pts
            .iter()
            .map(|p| {
                let coords: Vec<&str> = p
                    .as_array()
                    .into_iter()
                    .flatten()
                    .filter_map(Value::as_str)
                    .collect();
                parse_vector(&coords.join(" ")).map_err(|e| CliError::usage(e.to_string()))
            })
            .collect();
    }
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let body = body
            .trim_start_matches(['(', '['])
            .trim_end_matches([')', ']']);
        let x = parse_vector(body)
            .map_err(|e| CliError::usage(format!("{}:{}: {e}", path.display(), n + 1)))?;
        if x.dim() != dim {
            return Err(CliError::usage(format!(
                "{}:{}: expected {dim} coordinates",
                path.display(),
                n + 1
            )));
        }
        out.push(x);
    }
    Ok(out)
}

/// The `points` array of the first walk found in a JSON report.
fn find_points(v: &Value) -> Option<&Vec<Value>> {
    match v {
        Value::Object(m) => {
            if let (Some(Value::Array(pts)), Some(_)) = (m.get("points"), m.get("steps")) {
                return Some(pts);
            }
            m.values().find_map(find_points)
        }
        _ => None,
    }
}

fn augmented_log(a: &Augmented) -> Value {
    let added: Vec<Value> = a
        .added
        .iter()
        .map(|&(row, src)| json!({ "row": row + 1, "opposite_to": src + 1 }))
        .collect();
    json!({ "added": added, "bounded": a.poly.is_bounded() })
}

fn run(cli: &Cli) -> CliResult<Report> {
    let input = cli.input.as_deref();
    Ok(match &cli.cmd {
        Cmd::Instance { name } => {
            let p = instances::by_name(name)?;
            Report::ok(
                emit_hpoly(&p),
                json!({ "name": name, "hpoly": emit_hpoly(&p), "polyhedron": p }),
            )
        }
        Cmd::VerifyU4 { skip_diameter } => verify(!skip_diameter)?,
        Cmd::Circuits => {
            let p = load(input)?;
            let lines: Vec<String> = p
                .circuits()
                .iter()
                .map(|c| render::point_strings(c.direction()))
                .collect();
            let json = json!({ "count": lines.len(), "circuits": p.circuits().iter().map(|c| c.direction()).collect::<Vec<_>>() });
            Report::ok(
                lines.iter().map(|l| format!("{l}\n")).collect::<String>(),
                json,
            )
        }
        Cmd::Vertices => {
            let p = load(input)?;
            let mut text = String::new();
            let mut list = Vec::new();
            for (i, v) in p.vertices().iter().enumerate() {
                text.push_str(&format!("{} {}\n", vertex_label(&p, i), v.point));
                list.push(json!({ "label": vertex_label(&p, i), "facets": one_based(&v.active), "point": v.point }));
            }
            Report::ok(
                text,
                json!({ "count": list.len(), "bounded": p.is_bounded(), "vertices": list }),
            )
        }
        Cmd::Edges { dot } => {
            let p = load(input)?;
            let edges = p.edges();
            let rays = circdiam_core::verify::unbounded_edges(&p)?;
            let text = if *dot {
                render::dot(&p)?
            } else {
                edges
                    .iter()
                    .map(|&(i, j)| format!("{} {}\n", vertex_label(&p, i), vertex_label(&p, j)))
                    .chain(rays.iter().map(|r| format!("{} {}\n", r.vertex, r.ray)))
                    .collect()
            };
            let list: Vec<Value> = edges
                .iter()
                .map(|&(i, j)| json!([vertex_label(&p, i), vertex_label(&p, j)]))
                .collect();
            let rays: Vec<Value> = rays
                .iter()
                .map(|r| json!({ "vertex": r.vertex, "ray": r.ray, "direction": r.direction }))
                .collect();
            let mut json = json!({ "edges": list, "rays": rays });
            if *dot {
                json["dot"] = Value::String(text.clone());
            }
            Report::ok(text, json)
        }
        Cmd::Distance {
            mode,
            from,
            to,
            search,
        } => {
            let p = load(input)?;
            let (x, xv) = location_arg(&p, from)?;
            let (y, yv) = location_arg(&p, to)?;
            let yv = yv.ok_or_else(|| CliError::usage("--to must be a vertex"))?;
            match mode {
                Mode::Edge => {
                    let xv = xv.ok_or_else(|| {
                        CliError::usage("edge distance needs --from to be a vertex")
                    })?;
                    let d = p.combinatorial_distance(xv, yv)?;
                    Report::ok(format!("{d}\n"), json!({ "mode": "edge", "distance": d }))
                }
                Mode::Circuit => {
                    let r = circuit_distance(&p, &x, &y, &search.config())?;
                    let mut text = format!("{}\n", r.distance);
                    if let Some(w) = &r.walk {
                        text.push_str(&render::walk_text(w));
                        text.push('\n');
                    }
                    let json = json!({
                        "mode": "circuit",
                        "distance": r.distance,
                        "limit": search.config().horizon(&p)?,
                        "walk": r.walk.as_ref().map(render::walk_json),
                    });
                    Report::ok(text, json)
                }
            }
        }
        Cmd::Diameter { mode, search } => {
            let p = load(input)?;
            match mode {
                Mode::Edge => {
                    let d = p.combinatorial_diameter()?;
                    Report::ok(format!("{d}\n"), json!({ "mode": "edge", "diameter": d }))
                }
                Mode::Circuit => {
                    let r = circuit_diameter(&p, &search.config())?;
                    let pair = r
                        .pair
                        .map(|(i, j)| json!([vertex_label(&p, i), vertex_label(&p, j)]));
                    Report::ok(
                        format!("{}\n", r.diameter),
                        json!({ "mode": "circuit", "diameter": r.diameter, "pair": pair, "limit": r.limit }),
                    )
                }
            }
        }
        Cmd::Nonrevisiting { from, to, search } => {
            let p = load(input)?;
            let (x, _) = location_arg(&p, from)?;
            let (y, yv) = location_arg(&p, to)?;
            yv.ok_or_else(|| CliError::usage("--to must be a vertex"))?;
            match find_nonrevisiting_walk(&p, &x, &y, &search.config())? {
                Some(w) => Report::ok(
                    format!("{}\n{}\n", w.len(), render::walk_text(&w)),
                    json!({ "found": true, "walk": render::walk_json(&w) }),
                ),
                None => Report {
                    text: "none\n".into(),
                    json: json!({ "found": false, "walk": null }),
                    ok: false,
                    log: None,
                },
            }
        }
        Cmd::CheckCsimple {
            search,
            points,
            facet_centroids,
        } => {
            let p = load(input)?;
            let mut cfg = search.config();
            if let Some(path) = points {
                cfg.start_points = StartPoints::WithPoints(read_points(path, p.dim())?);
            } else if *facet_centroids {
                cfg.start_points = StartPoints::WithFacetCentroids;
            }
            let r = check_csimple(&p, &cfg)?;
            let mut text = format!("{}\n", r.simple);
            if let Some(w) = &r.witness {
                text.push_str(&render::witness_text(w));
                text.push('\n');
            }
            Report {
                text,
                json: render::csimple_json(&r),
                ok: r.simple,
                log: None,
            }
        }
        Cmd::ValidateWalk { walk, edges_only } => {
            let p = load(input)?;
            let pts = read_points(walk, p.dim())?;
            let mode = if *edges_only {
                WalkMode::Edge
            } else {
                WalkMode::Maximal
            };
            match validate_walk(&p, &pts, mode) {
                Ok(w) => Report::ok(
                    format!("valid walk of length {}\n", w.len()),
                    json!({ "valid": true, "walk": render::walk_json(&w) }),
                ),
                Err(v) => {
                    let kind = match &v.kind {
                        ViolationKind::NotMaximal { max_alpha: Some(a) } => {
                            format!("step is not maximal (maximal length {a})")
                        }
                        ViolationKind::NotMaximal { max_alpha: None } => {
                            "step is not maximal (unbounded)".into()
                        }
                        k => format!("{k:?}"),
                    };
                    Report {
                        text: format!("invalid at step {}: {kind}\n", v.step + 1),
                        json: json!({ "valid": false, "step": v.step + 1, "reason": kind }),
                        ok: false,
                        log: None,
                    }
                }
            }
        }
        Cmd::Wedge { facet, slope } => {
            let p = load(input)?;
            if *facet == 0 || *facet > p.num_rows() {
                return Err(CliError::usage(format!(
                    "--facet must be in 1..{}",
                    p.num_rows()
                )));
            }
            let w = wedge(&p, facet - 1, &rational_arg("slope", slope)?)?;
            let rows: Vec<String> = (0..w.poly.num_rows())
                .map(|r| match w.row_origin(r) {
                    WedgeRow::Side(i) => format!("side {}", i + 1),
                    WedgeRow::Lower => "lower base".into(),
                    WedgeRow::Upper => "upper base".into(),
                })
                .collect();
            Report::construction(
                &w.poly,
                json!({ "facet": facet, "slope": fmt_rational(&w.slope), "rows": rows }),
            )
        }
        Cmd::Perturb { eps } => {
            let p = load(input)?;
            let e = rational_arg("eps", eps)?;
            let q = perturb(&p, &e, cli.seed)?;
            Report::construction(&q, json!({ "eps": fmt_rational(&e), "seed": cli.seed }))
        }
        Cmd::MakeCsimple {
            search,
            eps,
            budget,
            certify_diameter,
            facet_centroids,
        } => {
            let p = load(input)?;
            let mut cfg = search.config();
            if *facet_centroids {
                cfg.start_points = StartPoints::WithFacetCentroids;
            }
            let opts = CSimpleOptions {
                cfg,
                eps: rational_arg("eps", eps)?,
                budget: *budget,
                certify_diameter: *certify_diameter,
            };
            let r = make_csimple(&p, &opts, cli.seed)?;
            let diameters = r.diameters.map(|(a, b)| json!({ "before": a, "after": b }));
            Report::construction(
                &r.poly,
                json!({
                    "seed": cli.seed,
                    "attempts": r.attempts,
                    "eps": r.eps.as_ref().map(fmt_rational),
                    "check": render::csimple_json(&r.report),
                    "diameters": diameters,
                }),
            )
        }
        Cmd::Boundedize { u, v } => {
            let p = load(input)?;
            let (ui, vi) = (vertex_arg(&p, u)?, vertex_arg(&p, v)?);
            let a = boundedize(&p, ui, vi)?;
            let mut log = augmented_log(&a);
            log["u"] = json!(vertex_label(&p, ui));
            log["v"] = json!(vertex_label(&p, vi));
            Report::construction(&a.poly, log)
        }
        Cmd::Vertexify { u, v } => {
            let p = load(input)?;
            let (x, _) = location_arg(&p, u)?;
            let vi = vertex_arg(&p, v)?;
            let a = vertexify(&p, &x, vi)?;
            let mut log = augmented_log(&a);
            log["u"] = json!(x);
            log["v"] = json!(vertex_label(&p, vi));
            Report::construction(&a.poly, log)
        }
        Cmd::Dantzig {
            u,
            v,
            search,
            require_csimple,
        } => {
            let p = load(input)?;
            let (ui, vi) = (vertex_arg(&p, u)?, vertex_arg(&p, v)?);
            let opts = DantzigOptions {
                cfg: search.config(),
                require_csimple: *require_csimple,
                ..Default::default()
            };
            let r = dantzig_from_pair(&p, ui, vi, &opts, cli.seed)?;
            let wedges: Vec<Value> = r
                .wedges
                .iter()
                .map(|w| {
                    json!({
                        "facet": w.facet + 1,
                        "slope": fmt_rational(&w.slope),
                        "perturbed": w.perturbed,
                        "csimple": w.csimple,
                        "dim": w.dim,
                        "rows": w.rows,
                    })
                })
                .collect();
            let (u2, v2) = (r.poly.vertex_index(&r.u), r.poly.vertex_index(&r.v));
            let label = |i: Option<usize>| i.map(|i| vertex_label(&r.poly, i));
            Report::construction(
                &r.poly,
                json!({
                    "seed": cli.seed,
                    "face_rows": one_based(&r.face_rows),
                    "perturbed_start": r.perturbed_start,
                    "start_csimple": r.start_csimple,
                    "wedges": wedges,
                    "u": { "point": r.u, "label": label(u2) },
                    "v": { "point": r.v, "label": label(v2) },
                }),
            )
        }
    })
}

fn verify(with_diameter: bool) -> CliResult<Report> {
    let r = match verify_u4(with_diameter) {
        Ok(r) => r,
        Err(e @ Error::VerificationFailed { .. }) => {
            return Ok(Report {
                text: format!("FAILED: {e}\n"),
                json: json!({ "ok": false, "error": e.to_string() }),
                ok: false,
                log: None,
            })
        }
        Err(e) => return Err(e.into()),
    };
    let mut t = String::from("U4: d = 4, f = 8\n");
    for (name, x) in &r.named_vertices {
        t.push_str(&format!("  {name} = {x}\n"));
    }
    t.push_str(&format!(
        "graph distance V5678 -> V1234: {}\n",
        r.combinatorial_distance
    ));
    for (title, w) in [("forward", &r.forward), ("reverse", &r.reverse)] {
        t.push_str(&format!(
            "{title} walk: {}, then the {} -> {} direction in face {:?}; landing {}\n  {}\n",
            w.edge_path.join(" -> "),
            w.direction_edge.0,
            w.direction_edge.1,
            w.face,
            w.landing,
            render::walk_text(&w.walk).replace('\n', "\n  ")
        ));
    }
    t.push_str(&format!(
        "circuit distance V5678 -> V1234: {}\n",
        r.circuit_distance_forward
    ));
    t.push_str(&format!(
        "circuit distance V1234 -> V5678: {}\n",
        r.circuit_distance_reverse
    ));
    match r.circuit_diameter {
        Some(d) => t.push_str(&format!("circuit diameter: {d}\n")),
        None => t.push_str("circuit diameter: skipped\n"),
    }
    t.push_str(&format!(
        "rays: {}\n",
        circdiam_core::verify::ray_labels(&r.rays).join(" ")
    ));
    t.push_str("OK\n");
    let recipe = |w: &circdiam_core::verify::RecipeWalk| {
        json!({
            "edge_path": w.edge_path,
            "face": w.face,
            "direction_edge": [w.direction_edge.0, w.direction_edge.1],
            "landing": w.landing,
            "walk": render::walk_json(&w.walk),
        })
    };
    let json = json!({
        "ok": true,
        "named_vertices": r.named_vertices.iter().map(|(n, x)| json!({ "label": n, "point": x })).collect::<Vec<_>>(),
        "combinatorial_distance": r.combinatorial_distance,
        "forward": recipe(&r.forward),
        "reverse": recipe(&r.reverse),
        "circuit_distance_forward": r.circuit_distance_forward,
        "circuit_distance_reverse": r.circuit_distance_reverse,
        "circuit_diameter": r.circuit_diameter,
        "rays": circdiam_core::verify::ray_labels(&r.rays),
    });
    Ok(Report::ok(t, json))
}

fn command_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Circuits => "circuits",
        Cmd::Vertices => "vertices",
        Cmd::Edges { .. } => "edges",
        Cmd::Distance { .. } => "distance",
        Cmd::Diameter { .. } => "diameter",
        Cmd::Nonrevisiting { .. } => "nonrevisiting",
        Cmd::CheckCsimple { .. } => "check-csimple",
        Cmd::ValidateWalk { .. } => "validate-walk",
        Cmd::Wedge { .. } => "wedge",
        Cmd::Perturb { .. } => "perturb",
        Cmd::MakeCsimple { .. } => "make-csimple",
        Cmd::Boundedize { .. } => "boundedize",
        Cmd::Vertexify { .. } => "vertexify",
        Cmd::Dantzig { .. } => "dantzig",
        Cmd::Instance { .. } => "instance",
        Cmd::VerifyU4 { .. } => "verify-u4",
    }
}

fn envelope(command: &str, body: Value) -> Value {
    let mut m = Map::new();
    m.insert("schema".into(), json!(1));
    m.insert("command".into(), json!(command));
    if let Value::Object(fields) = body {
        m.extend(fields);
    }
    Value::Object(m)
}

fn emit(cli: &Cli, report: Report) -> io::Result<()> {
    let name = command_name(&cli.cmd);
    let mut out = io::stdout().lock();
    if cli.json {
        let mut body = report.json;
        if let Some(log) = report.log {
            body["log"] = log;
        }
        serde_json::to_writer_pretty(&mut out, &envelope(name, body))?;
        writeln!(out)?;
        return Ok(());
    }
    out.write_all(report.text.as_bytes())?;
    if let Some(log) = report.log {
        let line = serde_json::to_string(&envelope(name, json!({ "log": log })))?;
        match &cli.log {
            Some(path) => std::fs::write(path, line + "\n")?,
            None => writeln!(io::stderr(), "{line}")?,
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("circdiam: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(report) => {
            let ok = report.ok;
            if let Err(e) = emit(&cli, report) {
                if e.kind() != io::ErrorKind::BrokenPipe {
                    eprintln!("circdiam: {e}");
                    return ExitCode::from(2);
                }
            }
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(e) => {
            if cli.json {
                let body = envelope(
                    command_name(&cli.cmd),
                    json!({ "error": e.msg, "exit_code": e.code }),
                );
                println!(
                    "{}",
                    serde_json::to_string_pretty(&body).unwrap_or_default()
                );
            }
            eprintln!("circdiam: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}
