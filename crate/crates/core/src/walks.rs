//! Circuit walks: maximal steps, walk validation, and exact breadth-first
//! searches over landing points.
//!
//! Every search deduplicates states by their exact coordinates, expands one
//! BFS layer at a time (in parallel, in fixed-size chunks) and merges results
//! in parent order, so outcomes do not depend on the number of worker threads.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::hash::Hash;

use indexmap::IndexSet;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::exact::{fmt_rational, normalize_primitive, RVector, Rational};
use crate::polyhedron::{FacetSet, HPolyhedron};
use crate::util::mask_to_set;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum StepError {
    /// No row decreases along the direction.
    #[error("direction is unbounded")]
    UnboundedDirection,
    /// Some tight row decreases along the direction, so the step length is 0.
    #[error("direction is blocked at this point")]
    BlockedDirection,
}

pub(crate) fn ser_rational<S: Serializer>(
    q: &Rational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(q))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WalkStep {
    /// Signed primitive circuit direction.
    pub circuit: RVector,
    #[serde(serialize_with = "ser_rational")]
    pub alpha: Rational,
    pub entered: FacetSet,
    pub left: FacetSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CircuitWalk {
    pub points: Vec<RVector>,
    pub steps: Vec<WalkStep>,
}

impl CircuitWalk {
    pub fn trivial(start: RVector) -> Self {
        CircuitWalk {
            points: vec![start],
            steps: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn start(&self) -> &RVector {
        &self.points[0]
    }

    pub fn end(&self) -> &RVector {
        self.points.last().expect("walk has a start point")
    }

    /// Every step enters exactly one new facet.
    pub fn is_simple(&self) -> bool {
        self.steps.iter().all(|s| s.entered.len() == 1)
    }

    /// Every step enters some facet that was not active at any earlier point.
    pub fn is_non_revisiting(&self, p: &HPolyhedron) -> bool {
        let mut seen = FacetSet::new();
        for (i, x) in self.points.iter().enumerate() {
            let act = p.active_set(x).unwrap_or_default();
            if i > 0 && act.is_subset(&seen) {
                return false;
            }
            seen.extend(act);
        }
        true
    }
}

impl fmt::Display for CircuitWalk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.points[0])?;
        for (s, x) in self.steps.iter().zip(&self.points[1..]) {
            writeln!(
                f,
                "  --[{} x {}]--> {}",
                fmt_rational(&s.alpha),
                s.circuit,
                x
            )?;
        }
        Ok(())
    }
}

/// Walk-search parameters.
#[derive(Clone, Debug, Default)]
pub struct SearchConfig {
    /// Maximum number of steps; `None` uses [`default_horizon`].
    pub depth_limit: Option<usize>,
    pub start_points: StartPoints,
}

/// The finite point set `M` searches start from. It always contains the
/// vertices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum StartPoints {
    #[default]
    Vertices,
    /// Vertices plus the given feasible points.
    WithPoints(Vec<RVector>),
    /// Vertices plus the vertex centroid of every facet.
    WithFacetCentroids,
}

impl SearchConfig {
    pub fn with_depth(depth: usize) -> Self {
        SearchConfig {
            depth_limit: Some(depth),
            ..Default::default()
        }
    }

    /// Effective depth: the explicit limit, or [`default_horizon`] (plus `d`
    /// when `M` contains non-vertex points).
    pub fn horizon(&self, p: &HPolyhedron) -> Result<usize> {
        match self.depth_limit {
            Some(d) => Ok(d.max(1)),
            None => {
                let extra = match self.start_points {
                    StartPoints::Vertices => 0,
                    _ => p.dim(),
                };
                Ok(default_horizon(p)? + extra)
            }
        }
    }

    /// The start set `M` for `p`.
    pub fn starts(&self, p: &HPolyhedron) -> Result<Vec<RVector>> {
        let mut pts: Vec<RVector> = p.vertices().iter().map(|v| v.point.clone()).collect();
        match &self.start_points {
            StartPoints::Vertices => {}
            StartPoints::WithPoints(extra) => {
                for x in extra {
                    if !p.is_feasible(x)? {
                        return Err(Error::InfeasiblePoint);
                    }
                    pts.push(x.clone());
                }
            }
            StartPoints::WithFacetCentroids => {
                for i in 0..p.num_rows() {
                    if let Some(c) = facet_centroid(p, i) {
                        pts.push(c);
                    }
                }
            }
        }
        let mut seen = HashSet::new();
        pts.retain(|x| seen.insert(x.clone()));
        Ok(pts)
    }
}

/// Average of the vertices on row `facet`.
pub fn facet_centroid(p: &HPolyhedron, facet: usize) -> Option<RVector> {
    let on: Vec<&RVector> = p
        .vertices()
        .iter()
        .filter(|v| v.active.contains(&facet))
        .map(|v| &v.point)
        .collect();
    let first = on.first()?;
    let sum = on[1..].iter().fold((*first).clone(), |acc, x| acc.add(x));
    Some(sum.scale(&Rational::from_integer((on.len() as i64).into()).recip()))
}

/// `max(edge diameter, f - d) + 1`: covers every walk relevant to the
/// `f - d` bound on this instance.
pub fn default_horizon(p: &HPolyhedron) -> Result<usize> {
    let de = p.combinatorial_diameter()?;
    Ok(de.max(p.num_rows().saturating_sub(p.dim())) + 1)
}

/// Precomputed signed circuits and their row products `A g`.
pub(crate) struct Stepper<'a> {
    p: &'a HPolyhedron,
    dirs: Vec<RVector>,
    products: Vec<Vec<Rational>>,
    by_direction: HashMap<RVector, usize>,
}

pub(crate) struct Landing {
    pub point: RVector,
    pub dir: usize,
    pub alpha: Rational,
    /// Rows tight at the landing point.
    pub active: u64,
}

impl<'a> Stepper<'a> {
    pub fn new(p: &'a HPolyhedron) -> Self {
        let dirs: Vec<RVector> = p.circuits().iter().flat_map(|c| c.signed()).collect();
        let products = dirs
            .iter()
            .map(|g| p.a().rows().iter().map(|a| a.dot(g)).collect())
            .collect();
        let by_direction = dirs
            .iter()
            .enumerate()
            .map(|(i, g)| (g.clone(), i))
            .collect();
        Stepper {
            p,
            dirs,
            products,
            by_direction,
        }
    }

    /// Whether one maximal circuit step leads from `y` to the vertex `target`
    /// with tight rows `target_active`.
    pub fn reaches(&self, y: &RVector, target: &RVector, target_active: u64) -> bool {
        let Ok(g) = normalize_primitive(&target.sub(y)) else {
            return false;
        };
        let Some(&dir) = self.by_direction.get(&g) else {
            return false;
        };
        self.products[dir]
            .iter()
            .enumerate()
            .any(|(i, ag)| target_active >> i & 1 == 1 && ag.is_negative())
    }

    pub fn direction(&self, i: usize) -> &RVector {
        &self.dirs[i]
    }

    fn step_from(
        &self,
        y: &RVector,
        slacks: &[Rational],
        dir: usize,
    ) -> std::result::Result<Landing, StepError> {
        let ag = &self.products[dir];
        let mut alpha: Option<Rational> = None;
        for (s, a) in slacks.iter().zip(ag) {
            if a.is_negative() {
                if s.is_zero() {
                    return Err(StepError::BlockedDirection);
                }
                let r = s / -a;
                if alpha.as_ref().is_none_or(|best| r < *best) {
                    alpha = Some(r);
                }
            }
        }
        let alpha = alpha.ok_or(StepError::UnboundedDirection)?;
        let mut active = 0u64;
        for (i, (s, a)) in slacks.iter().zip(ag).enumerate() {
            if (s + &alpha * a).is_zero() {
                active |= 1 << i;
            }
        }
        Ok(Landing {
            point: y.add_scaled(&alpha, &self.dirs[dir]),
            dir,
            alpha,
            active,
        })
    }

    /// Landings of every usable signed circuit, in circuit order.
    pub fn landings(&self, y: &RVector) -> Vec<Landing> {
        let slacks = self.p.slacks(y);
        (0..self.dirs.len())
            .filter_map(|d| self.step_from(y, &slacks, d).ok())
            .collect()
    }
}

/// Maximal step from `y` along `g`: returns the landing point and length.
pub fn max_step(
    p: &HPolyhedron,
    y: &RVector,
    g: &RVector,
) -> Result<std::result::Result<(RVector, Rational), StepError>> {
    if y.dim() != p.dim() || g.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: if y.dim() != p.dim() { y.dim() } else { g.dim() },
        });
    }
    if g.is_zero() {
        return Err(Error::ZeroVector);
    }
    let slacks = p.slacks(y);
    if slacks.iter().any(Signed::is_negative) {
        return Err(Error::InfeasiblePoint);
    }
    let mut alpha: Option<Rational> = None;
    for ((a, _), s) in p.rows().zip(&slacks) {
        let ag = a.dot(g);
        if ag.is_negative() {
            if s.is_zero() {
                return Ok(Err(StepError::BlockedDirection));
            }
            let r = s / -ag;
            if alpha.as_ref().is_none_or(|best| r < *best) {
                alpha = Some(r);
            }
        }
    }
    Ok(match alpha {
        None => Err(StepError::UnboundedDirection),
        Some(a) => Ok((y.add_scaled(&a, g), a)),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Successor {
    pub point: RVector,
    /// Every signed circuit landing here, with its step length.
    pub via: Vec<(RVector, String)>,
}

/// Landing points of all maximal steps from `y`, deduplicated.
pub fn successors(p: &HPolyhedron, y: &RVector) -> Result<Vec<Successor>> {
    if !p.is_feasible(y)? {
        return Err(Error::InfeasiblePoint);
    }
    let stepper = Stepper::new(p);
    let mut out: Vec<Successor> = Vec::new();
    for l in stepper.landings(y) {
        let via = (stepper.direction(l.dir).clone(), fmt_rational(&l.alpha));
        match out.iter_mut().find(|s| s.point == l.point) {
            Some(s) => s.via.push(via),
            None => out.push(Successor {
                point: l.point,
                via: vec![via],
            }),
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WalkMode {
    /// Maximal circuit steps.
    Maximal,
    /// Maximal steps that are additionally edges between vertices.
    Edge,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViolationKind {
    TooShort,
    DimensionMismatch,
    Infeasible,
    ZeroStep,
    NotCircuit,
    NotMaximal { max_alpha: Option<String> },
    NotEdge,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Error)]
#[error("walk invalid at step {step}: {kind:?}")]
pub struct WalkViolation {
    /// Index of the offending step (or point, for feasibility).
    pub step: usize,
    #[serde(flatten)]
    pub kind: ViolationKind,
}

/// Checks feasibility, circuit directions and maximality of every step, and
/// annotates each step with the facets it enters and leaves.
pub fn validate_walk(
    p: &HPolyhedron,
    points: &[RVector],
    mode: WalkMode,
) -> std::result::Result<CircuitWalk, WalkViolation> {
    let bad = |step, kind| WalkViolation { step, kind };
    if points.len() < 2 {
        return Err(bad(0, ViolationKind::TooShort));
    }
    let mut actives = Vec::with_capacity(points.len());
    for (i, x) in points.iter().enumerate() {
        if x.dim() != p.dim() {
            return Err(bad(i, ViolationKind::DimensionMismatch));
        }
        match p.active_set(x) {
            Ok(a) => actives.push(a),
            Err(_) => return Err(bad(i, ViolationKind::Infeasible)),
        }
    }
    let edges: Option<BTreeSet<(usize, usize)>> =
        (mode == WalkMode::Edge).then(|| p.edges().into_iter().collect());
    let mut steps = Vec::with_capacity(points.len() - 1);
    for (i, w) in points.windows(2).enumerate() {
        let diff = w[1].sub(&w[0]);
        if diff.is_zero() {
            return Err(bad(i, ViolationKind::ZeroStep));
        }
        let g = crate::exact::normalize_primitive(&diff).expect("nonzero");
        if !crate::circuits::is_circuit(p, &g).expect("nonzero") {
            return Err(bad(i, ViolationKind::NotCircuit));
        }
        let alpha = diff.ratio_to(&g).expect("parallel by construction");
        match max_step(p, &w[0], &g).expect("checked inputs") {
            Ok((_, a)) if a == alpha => {}
            Ok((_, a)) => {
                return Err(bad(
                    i,
                    ViolationKind::NotMaximal {
                        max_alpha: Some(fmt_rational(&a)),
                    },
                ))
            }
            Err(_) => return Err(bad(i, ViolationKind::NotMaximal { max_alpha: None })),
        }
        if let Some(edges) = &edges {
            let (a, b) = (p.vertex_index(&w[0]), p.vertex_index(&w[1]));
            let ok = matches!((a, b), (Some(a), Some(b)) if edges.contains(&(a.min(b), a.max(b))));
            if !ok {
                return Err(bad(i, ViolationKind::NotEdge));
            }
        }
        steps.push(WalkStep {
            circuit: g,
            alpha,
            entered: actives[i + 1].difference(&actives[i]).copied().collect(),
            left: actives[i].difference(&actives[i + 1]).copied().collect(),
        });
    }
    Ok(CircuitWalk {
        points: points.to_vec(),
        steps,
    })
}

fn annotate(p: &HPolyhedron, points: Vec<RVector>) -> CircuitWalk {
    if points.len() < 2 {
        return CircuitWalk::trivial(points.into_iter().next().expect("nonempty path"));
    }
    validate_walk(p, &points, WalkMode::Maximal).expect("search produced an invalid walk")
}

pub(crate) enum Flow {
    Continue,
    Stop,
}

/// Layered BFS with exact deduplication. States of depth `max_depth` are
/// reported to `on_edge` but never stored or expanded.
pub(crate) struct Bfs<S> {
    pub states: IndexSet<S>,
    pub parent: Vec<Option<usize>>,
}

const CHUNK: usize = 2048;

impl<S: Hash + Eq + Clone + Send + Sync> Bfs<S> {
    pub fn run<E: Send>(
        sources: Vec<S>,
        max_depth: usize,
        expand: impl Fn(&S) -> Vec<(S, E)> + Sync,
        on_edge: impl FnMut(usize, usize, &S, &E, bool) -> Flow,
    ) -> Self {
        Self::run_layered(sources, max_depth, expand, on_edge, |_, _, _| {
            Flow::Continue
        })
    }

    /// As [`run`](Self::run), calling `before_layer(depth, states, frontier)`
    /// before the states of depth `depth - 1` (indices `frontier`) are
    /// expanded.
    pub fn run_layered<E: Send>(
        sources: Vec<S>,
        max_depth: usize,
        expand: impl Fn(&S) -> Vec<(S, E)> + Sync,
        mut on_edge: impl FnMut(usize, usize, &S, &E, bool) -> Flow,
        mut before_layer: impl FnMut(usize, &IndexSet<S>, std::ops::Range<usize>) -> Flow,
    ) -> Self {
        let mut bfs = Bfs {
            states: IndexSet::new(),
            parent: Vec::new(),
        };
        for s in sources {
            if bfs.states.insert(s) {
                bfs.parent.push(None);
            }
        }
        let (mut lo, mut hi) = (0, bfs.states.len());
        for depth in 1..=max_depth {
            if let Flow::Stop = before_layer(depth, &bfs.states, lo..hi) {
                return bfs;
            }
            let mut start = lo;
            while start < hi {
                let end = (start + CHUNK).min(hi);
                let expanded: Vec<Vec<(S, E)>> = (start..end)
                    .into_par_iter()
                    .map(|i| expand(&bfs.states[i]))
                    .collect();
                for (offset, children) in expanded.into_iter().enumerate() {
                    let from = start + offset;
                    for (s, e) in children {
                        let is_new = !bfs.states.contains(&s);
                        if let Flow::Stop = on_edge(depth, from, &s, &e, is_new) {
                            return bfs;
                        }
                        if is_new && depth < max_depth {
                            bfs.states.insert(s);
                            bfs.parent.push(Some(from));
                        }
                    }
                }
                start = end;
            }
            lo = hi;
            hi = bfs.states.len();
            if lo == hi {
                break;
            }
        }
        bfs
    }

    /// States from a source to `idx`.
    pub fn path_to(&self, mut idx: usize) -> Vec<S> {
        let mut out = vec![self.states[idx].clone()];
        while let Some(p) = self.parent[idx] {
            out.push(self.states[p].clone());
            idx = p;
        }
        out.reverse();
        out
    }
}

/// A distance, or the statement that it exceeds the searched depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Distance {
    Exact(usize),
    Exceeds(usize),
}

impl Distance {
    pub fn exact(self) -> Option<usize> {
        match self {
            Distance::Exact(d) => Some(d),
            Distance::Exceeds(_) => None,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Exact(d) => write!(f, "{d}"),
            Distance::Exceeds(d) => write!(f, "> {d}"),
        }
    }
}

impl Serialize for Distance {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Distance::Exact(d) => s.serialize_u64(*d as u64),
            Distance::Exceeds(d) => s.serialize_str(&format!("> {d}")),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DistanceReport {
    pub distance: Distance,
    /// A shortest walk, when one was found.
    pub walk: Option<CircuitWalk>,
}

/// Directed circuit distance from a feasible point to a vertex.
pub fn circuit_distance(
    p: &HPolyhedron,
    from: &RVector,
    to: &RVector,
    cfg: &SearchConfig,
) -> Result<DistanceReport> {
    if !p.is_feasible(from)? {
        return Err(Error::InfeasiblePoint);
    }
    if !p.is_feasible(to)? || !p.is_vertex(to)? {
        return Err(Error::NotAVertex);
    }
    let limit = cfg.horizon(p)?;
    if from == to {
        return Ok(DistanceReport {
            distance: Distance::Exact(0),
            walk: Some(CircuitWalk::trivial(from.clone())),
        });
    }
    let stepper = Stepper::new(p);
    let to_mask = p.active_mask(to);
    let mut found: Option<(usize, usize)> = None;
    // Before expanding a layer, look for a single step to the target; this
    // finds the same parent the expansion would, without the expansion.
    let bfs = Bfs::run_layered(
        vec![from.clone()],
        limit,
        |y: &RVector| {
            stepper
                .landings(y)
                .into_iter()
                .map(|l| (l.point, ()))
                .collect()
        },
        |_, _, _, _, _| Flow::Continue,
        |depth, states, frontier| match frontier
            .into_par_iter()
            .find_first(|&i| stepper.reaches(&states[i], to, to_mask))
        {
            Some(parent) => {
                found = Some((depth, parent));
                Flow::Stop
            }
            None if depth == limit => Flow::Stop,
            None => Flow::Continue,
        },
    );
    Ok(match found {
        Some((depth, parent)) => {
            let mut path = bfs.path_to(parent);
            path.push(to.clone());
            DistanceReport {
                distance: Distance::Exact(depth),
                walk: Some(annotate(p, path)),
            }
        }
        None => DistanceReport {
            distance: Distance::Exceeds(limit),
            walk: None,
        },
    })
}

/// Circuit distances from `from` to every vertex (indexed like
/// [`HPolyhedron::vertices`]); `None` where the distance exceeds `limit`.
pub fn circuit_distances_from(
    p: &HPolyhedron,
    from: &RVector,
    limit: usize,
) -> Result<Vec<Option<usize>>> {
    if !p.is_feasible(from)? {
        return Err(Error::InfeasiblePoint);
    }
    let verts = p.vertices();
    let mut dist = vec![None; verts.len()];
    let mut remaining = verts.len();
    if let Some(i) = p.vertex_index(from) {
        dist[i] = Some(0);
        remaining -= 1;
    }
    if remaining == 0 {
        return Ok(dist);
    }
    let stepper = Stepper::new(p);
    let masks: Vec<u64> = verts.iter().map(|v| p.active_mask(&v.point)).collect();
    Bfs::run_layered(
        vec![from.clone()],
        limit,
        |y: &RVector| {
            stepper
                .landings(y)
                .into_iter()
                .map(|l| (l.point, ()))
                .collect()
        },
        |_, _, _, _, _| Flow::Continue,
        |depth, states, frontier| {
            let open: Vec<usize> = (0..verts.len()).filter(|&j| dist[j].is_none()).collect();
            let reached: Vec<usize> = open
                .into_par_iter()
                .filter(|&j| {
                    frontier
                        .clone()
                        .into_par_iter()
                        .any(|i| stepper.reaches(&states[i], &verts[j].point, masks[j]))
                })
                .collect();
            for j in reached {
                dist[j] = Some(depth);
                remaining -= 1;
            }
            if remaining == 0 || depth == limit {
                Flow::Stop
            } else {
                Flow::Continue
            }
        },
    );
    Ok(dist)
}

#[derive(Clone, Debug, Serialize)]
pub struct DiameterReport {
    pub diameter: Distance,
    /// Ordered vertex pair (indices) attaining the value, or the first pair
    /// whose distance exceeded the limit.
    pub pair: Option<(usize, usize)>,
    pub limit: usize,
}

/// Largest directed circuit distance over ordered vertex pairs.
pub fn circuit_diameter(p: &HPolyhedron, cfg: &SearchConfig) -> Result<DiameterReport> {
    let limit = cfg.horizon(p)?;
    let verts = p.vertices();
    let mut best = 0;
    let mut pair = None;
    for (i, v) in verts.iter().enumerate() {
        let dist = circuit_distances_from(p, &v.point, limit)?;
        for (j, d) in dist.into_iter().enumerate() {
            match d {
                None => {
                    return Ok(DiameterReport {
                        diameter: Distance::Exceeds(limit),
                        pair: Some((i, j)),
                        limit,
                    })
                }
                Some(d) if d > best || pair.is_none() => {
                    best = d;
                    pair = Some((i, j));
                }
                Some(_) => {}
            }
        }
    }
    Ok(DiameterReport {
        diameter: Distance::Exact(best),
        pair,
        limit,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NonSimpleStep {
    pub from: RVector,
    pub to: RVector,
    pub circuit: RVector,
    #[serde(serialize_with = "ser_rational")]
    pub alpha: Rational,
    /// Facets tight at `to` but not at `from` (two or more).
    pub entered: FacetSet,
    /// Steps from the start set to `from`.
    pub depth: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CSimpleReport {
    pub simple: bool,
    pub horizon: usize,
    /// Distinct points expanded.
    pub explored: usize,
    pub witness: Option<NonSimpleStep>,
}

/// Explores every circuit walk of length at most the horizon from the start
/// set and looks for a step entering more than one new facet.
pub fn check_csimple(p: &HPolyhedron, cfg: &SearchConfig) -> Result<CSimpleReport> {
    let horizon = cfg.horizon(p)?;
    let starts = cfg.starts(p)?;
    let stepper = Stepper::new(p);
    let mut witness = None;
    let mut depths: Vec<usize> = vec![0; starts.len()];
    let bfs = Bfs::run(
        starts,
        horizon,
        |y: &RVector| {
            let from_mask = p.active_mask(y);
            stepper
                .landings(y)
                .into_iter()
                .map(|l| {
                    let entered = l.active & !from_mask;
                    (l.point, (l.dir, l.alpha, entered))
                })
                .collect()
        },
        |depth, parent, s, (dir, alpha, entered), is_new| {
            if entered.count_ones() != 1 {
                witness = Some((parent, s.clone(), *dir, alpha.clone(), *entered));
                return Flow::Stop;
            }
            if is_new && depth < horizon {
                depths.push(depth);
            }
            Flow::Continue
        },
    );
    let explored = bfs.states.len();
    let witness = witness.map(|(parent, to, dir, alpha, entered)| NonSimpleStep {
        from: bfs.states[parent].clone(),
        to,
        circuit: stepper.direction(dir).clone(),
        alpha,
        entered: mask_to_set(entered),
        depth: depths[parent],
    });
    Ok(CSimpleReport {
        simple: witness.is_none(),
        horizon,
        explored,
        witness,
    })
}

/// Searches for a walk from `u` to the vertex `v` in which every step
/// activates a facet never active before. Depth is capped at `f - d'`, `d'`
/// the active rank at `u`.
pub fn find_nonrevisiting_walk(
    p: &HPolyhedron,
    u: &RVector,
    v: &RVector,
    cfg: &SearchConfig,
) -> Result<Option<CircuitWalk>> {
    if !p.is_feasible(u)? {
        return Err(Error::InfeasiblePoint);
    }
    if !p.is_feasible(v)? || !p.is_vertex(v)? {
        return Err(Error::NotAVertex);
    }
    let d_prime = p.active_rank(u)?;
    let mut cap = p.num_rows().saturating_sub(d_prime);
    if let Some(limit) = cfg.depth_limit {
        cap = cap.min(limit);
    }
    if u == v {
        return Ok(Some(CircuitWalk::trivial(u.clone())));
    }
    let stepper = Stepper::new(p);
    let start = (u.clone(), p.active_mask(u));
    let mut found = None;
    let bfs = Bfs::run(
        vec![start],
        cap,
        |(y, seen): &(RVector, u64)| {
            stepper
                .landings(y)
                .into_iter()
                .filter(|l| l.active & !seen != 0)
                .map(|l| ((l.point, seen | l.active), ()))
                .collect()
        },
        |_, parent, (x, _), _, _| {
            if x == v {
                found = Some(parent);
                Flow::Stop
            } else {
                Flow::Continue
            }
        },
    );
    Ok(found.map(|parent| {
        let mut path: Vec<RVector> = bfs.path_to(parent).into_iter().map(|(x, _)| x).collect();
        path.push(v.clone());
        annotate(p, path)
    }))
}

/// Edge walk from vertex `u` to vertex `v` (indices) in which every step
/// activates a row of `target` not activated earlier in the walk.
/// Returns the vertex indices along the walk.
pub fn facet_gaining_edge_walk(
    p: &HPolyhedron,
    u: usize,
    v: usize,
    target: &FacetSet,
) -> Option<Vec<usize>> {
    let verts = p.vertices();
    let adj = p.adjacency();
    let tmask = crate::util::set_to_mask(target);
    let mask_of = |i: usize| crate::util::set_to_mask(&verts[i].active) & tmask;
    let start = (u, mask_of(u));
    if u == v {
        return Some(vec![u]);
    }
    let mut seen: HashSet<(usize, u64)> = HashSet::from([start]);
    let mut parent: Vec<((usize, u64), Option<usize>)> = vec![(start, None)];
    let mut queue = VecDeque::from([0usize]);
    while let Some(idx) = queue.pop_front() {
        let ((x, got), _) = parent[idx];
        for &y in &adj[x] {
            let gain = mask_of(y) & !got;
            if gain == 0 {
                continue;
            }
            let state = (y, got | gain);
            if !seen.insert(state) {
                continue;
            }
            parent.push((state, Some(idx)));
            if y == v {
                let mut path = vec![y];
                let mut cur = Some(idx);
                while let Some(c) = cur {
                    path.push(parent[c].0 .0);
                    cur = parent[c].1;
                }
                path.reverse();
                return Some(path);
            }
            queue.push_back(parent.len() - 1);
        }
    }
    None
}

/// Every facet-gaining edge walk from `u` to `v`, shortest first, ties in
/// lexicographic order of vertex indices.
pub fn facet_gaining_edge_walks(
    p: &HPolyhedron,
    u: usize,
    v: usize,
    target: &FacetSet,
) -> Vec<Vec<usize>> {
    fn extend(
        adj: &[Vec<usize>],
        masks: &[u64],
        v: usize,
        path: &mut Vec<usize>,
        got: u64,
        out: &mut Vec<Vec<usize>>,
    ) {
        let x = *path.last().expect("nonempty path");
        if x == v {
            out.push(path.clone());
            return;
        }
        for &y in &adj[x] {
            let gain = masks[y] & !got;
            if gain != 0 {
                path.push(y);
                extend(adj, masks, v, path, got | gain, out);
                path.pop();
            }
        }
    }
    let tmask = crate::util::set_to_mask(target);
    let masks: Vec<u64> = p
        .vertices()
        .iter()
        .map(|w| crate::util::set_to_mask(&w.active) & tmask)
        .collect();
    let mut out = Vec::new();
    extend(&p.adjacency(), &masks, v, &mut vec![u], masks[u], &mut out);
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use crate::instances;

    fn pt(x: &[i64]) -> RVector {
        RVector::from_ints(x)
    }

    #[test]
    fn max_step_examples() {
        let sq = instances::square();
        assert_eq!(
            max_step(&sq, &pt(&[0, 0]), &pt(&[1, 0])).unwrap(),
            Ok((pt(&[1, 0]), int(1)))
        );
        let tri = instances::triangle();
        assert_eq!(
            max_step(&tri, &pt(&[0, 1]), &pt(&[1, -1])).unwrap(),
            Ok((pt(&[1, 0]), int(1)))
        );
        let q = instances::quadrant();
        assert_eq!(
            max_step(&q, &pt(&[0, 0]), &pt(&[1, 0])).unwrap(),
            Err(StepError::UnboundedDirection)
        );
        assert_eq!(
            max_step(&sq, &pt(&[0, 0]), &pt(&[-1, 0])).unwrap(),
            Err(StepError::BlockedDirection)
        );
        assert_eq!(
            max_step(&sq, &pt(&[2, 0]), &pt(&[1, 0])),
            Err(Error::InfeasiblePoint)
        );
    }

    #[test]
    fn successor_examples() {
        let sq = instances::square();
        let s: BTreeSet<RVector> = successors(&sq, &pt(&[0, 0]))
            .unwrap()
            .into_iter()
            .map(|s| s.point)
            .collect();
        assert_eq!(s, [pt(&[1, 0]), pt(&[0, 1])].into());
        let tri = instances::triangle();
        let s: BTreeSet<RVector> = successors(&tri, &pt(&[0, 0]))
            .unwrap()
            .into_iter()
            .map(|s| s.point)
            .collect();
        assert_eq!(s, [pt(&[1, 0]), pt(&[0, 1])].into());
        assert!(successors(&instances::quadrant(), &pt(&[0, 0]))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn walk_validation() {
        let sq = instances::square();
        let w = validate_walk(
            &sq,
            &[pt(&[0, 0]), pt(&[1, 0]), pt(&[1, 1])],
            WalkMode::Maximal,
        )
        .unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(w.steps[0].entered, [2].into());
        assert_eq!(w.steps[0].left, [0].into());
        assert!(validate_walk(
            &sq,
            &[pt(&[0, 0]), pt(&[1, 0]), pt(&[1, 1])],
            WalkMode::Edge
        )
        .is_ok());
        let half = RVector::new(vec![rat(1, 2), int(0)]);
        let err = validate_walk(&sq, &[pt(&[0, 0]), half], WalkMode::Maximal).unwrap_err();
        assert_eq!(err.step, 0);
        assert!(matches!(err.kind, ViolationKind::NotMaximal { .. }));
        let err = validate_walk(&sq, &[pt(&[0, 0]), pt(&[1, 1])], WalkMode::Maximal).unwrap_err();
        assert_eq!(err.kind, ViolationKind::NotCircuit);
        let err = validate_walk(&sq, &[pt(&[0, 0]), pt(&[2, 0])], WalkMode::Maximal).unwrap_err();
        assert_eq!((err.step, err.kind), (1, ViolationKind::Infeasible));
        assert_eq!(
            validate_walk(&sq, &[pt(&[0, 0])], WalkMode::Maximal)
                .unwrap_err()
                .kind,
            ViolationKind::TooShort
        );

        // Maximal but not an edge: the pentagon's diagonal step.
        let pent = instances::pentagon_degenerate();
        let w = [pt(&[0, 1]), pt(&[1, 0])];
        assert!(validate_walk(&pent, &w, WalkMode::Maximal).is_ok());
        assert_eq!(
            validate_walk(&pent, &w, WalkMode::Edge).unwrap_err().kind,
            ViolationKind::NotEdge
        );
    }

    #[test]
    fn small_distances() {
        let s3 = instances::simplex(3);
        let cfg = SearchConfig::default();
        for u in s3.vertices() {
            for v in s3.vertices() {
                let want = usize::from(u != v);
                assert_eq!(
                    circuit_distance(&s3, &u.point, &v.point, &cfg)
                        .unwrap()
                        .distance,
                    Distance::Exact(want)
                );
            }
        }
        let sq = instances::square();
        let r = circuit_distance(&sq, &pt(&[0, 0]), &pt(&[1, 1]), &cfg).unwrap();
        assert_eq!(r.distance, Distance::Exact(2));
        assert_eq!(r.walk.unwrap().len(), 2);
        let r = circuit_distance(
            &sq,
            &pt(&[0, 0]),
            &pt(&[1, 1]),
            &SearchConfig::with_depth(1),
        )
        .unwrap();
        assert_eq!(r.distance, Distance::Exceeds(1));
        assert_eq!(r.distance.to_string(), "> 1");
    }

    #[test]
    fn small_diameters() {
        let cfg = SearchConfig::default();
        assert_eq!(
            circuit_diameter(&instances::cube(3), &cfg)
                .unwrap()
                .diameter,
            Distance::Exact(3)
        );
        assert_eq!(
            circuit_diameter(&instances::simplex(4), &cfg)
                .unwrap()
                .diameter,
            Distance::Exact(1)
        );
        assert_eq!(
            circuit_diameter(&instances::hexagon(), &cfg)
                .unwrap()
                .diameter,
            Distance::Exact(2)
        );
    }

    #[test]
    fn csimple_examples() {
        let sq = instances::square();
        assert!(
            check_csimple(&sq, &SearchConfig::with_depth(2))
                .unwrap()
                .simple
        );
        assert!(
            check_csimple(&instances::quadrant(), &SearchConfig::default())
                .unwrap()
                .simple
        );
        let rep = check_csimple(
            &instances::pentagon_degenerate(),
            &SearchConfig::with_depth(2),
        )
        .unwrap();
        assert!(!rep.simple);
        let w = rep.witness.unwrap();
        assert_eq!(
            (w.from, w.to, w.circuit),
            (pt(&[0, 1]), pt(&[1, 0]), pt(&[1, -1]))
        );
        assert_eq!(w.alpha, int(1));
        assert_eq!(w.entered, [1, 2].into());
    }

    #[test]
    fn nonrevisiting_square() {
        let sq = instances::square();
        let w = find_nonrevisiting_walk(&sq, &pt(&[0, 0]), &pt(&[1, 1]), &SearchConfig::default())
            .unwrap()
            .unwrap();
        assert_eq!(w.len(), 2);
        assert!(w.is_non_revisiting(&sq));
    }

    #[test]
    fn facet_gaining_examples() {
        let sq = instances::square();
        let u = sq.vertex_index(&pt(&[0, 0])).unwrap();
        let v = sq.vertex_index(&pt(&[1, 1])).unwrap();
        let target = sq.vertices()[v].active.clone();
        let path = facet_gaining_edge_walk(&sq, u, v, &target).unwrap();
        assert_eq!(path.len(), 3);
        let c3 = instances::cube(3);
        let u = c3.vertex_index(&pt(&[0, 0, 0])).unwrap();
        let v = c3.vertex_index(&pt(&[1, 1, 1])).unwrap();
        let path = facet_gaining_edge_walk(&c3, u, v, &c3.vertices()[v].active.clone()).unwrap();
        assert_eq!(path.len(), 4);
        let all = facet_gaining_edge_walks(&c3, u, v, &c3.vertices()[v].active.clone());
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], path);
        // Nothing to gain: no walk leaves u.
        assert_eq!(facet_gaining_edge_walk(&c3, u, v, &FacetSet::new()), None);
    }

    #[test]
    fn max_step_overshoot_is_infeasible() {
        let u4 = instances::u4();
        let stepper = Stepper::new(&u4);
        for v in u4.vertices().iter().take(5) {
            for l in stepper.landings(&v.point) {
                let g = stepper.direction(l.dir);
                assert!(u4.is_feasible(&l.point).unwrap());
                let probe = &l.alpha + &l.alpha / Rational::from_integer((1i64 << 20).into());
                assert!(!u4.is_feasible(&v.point.add_scaled(&probe, g)).unwrap());
            }
        }
    }
}
