use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{rat, RVector, Rational};
use crate::polyhedron::{FacetSet, HPolyhedron};
use crate::walks::{
    check_csimple, facet_gaining_edge_walks, ser_rational, validate_walk, CircuitWalk,
    SearchConfig, WalkMode,
};

use super::perturb::{make_csimple_with, wedge_slopes, CSimpleOptions};
use super::wedge::wedge;

fn partition(p: &HPolyhedron, u: usize, v: usize) -> (bool, bool) {
    let (a, b) = (&p.vertices()[u].active, &p.vertices()[v].active);
    let disjoint = a.is_disjoint(b);
    let covers = a.len() + b.len() == p.num_rows() && disjoint;
    (disjoint, covers)
}

/// `2d` facets, `d` at each of the vertices `u` and `v`, none shared.
pub fn is_dantzig_figure(p: &HPolyhedron, u: usize, v: usize) -> bool {
    let d = p.dim();
    let verts = p.vertices();
    let (_, covers) = partition(p, u, v);
    p.num_rows() == 2 * d && verts[u].active.len() == d && verts[v].active.len() == d && covers
}

/// Bounded, and every facet contains exactly one of `u`, `v`.
pub fn is_spindle(p: &HPolyhedron, u: usize, v: usize) -> bool {
    partition(p, u, v).1 && p.is_bounded()
}

#[derive(Clone, Debug, Serialize)]
pub struct WedgeStep {
    /// Row wedged over, in the polyhedron of the previous stage.
    pub facet: usize,
    #[serde(serialize_with = "ser_rational")]
    pub slope: Rational,
    /// Whether the wedge had to be perturbed to become C-simple.
    pub perturbed: bool,
    /// Whether the stage passed the C-simplicity check.
    pub csimple: bool,
    pub dim: usize,
    pub rows: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DantzigFigure {
    pub poly: HPolyhedron,
    pub u: RVector,
    pub v: RVector,
    /// Rows shared by both endpoints; the construction works in their face.
    pub face_rows: FacetSet,
    /// Whether the starting polyhedron had to be perturbed first.
    pub perturbed_start: bool,
    pub start_csimple: bool,
    pub wedges: Vec<WedgeStep>,
}

#[derive(Clone, Debug)]
pub struct DantzigOptions {
    pub cfg: SearchConfig,
    pub eps: Rational,
    pub budget: usize,
    /// Fail with `Exhausted` instead of continuing with a stage that is not
    /// C-simple.
    pub require_csimple: bool,
}

impl Default for DantzigOptions {
    fn default() -> Self {
        DantzigOptions {
            cfg: SearchConfig::default(),
            eps: rat(1, 64),
            budget: 12,
            require_csimple: false,
        }
    }
}

struct Stage {
    poly: HPolyhedron,
    ua: FacetSet,
    va: FacetSet,
    perturbed: bool,
    csimple: bool,
}

/// Perturbs `p` to C-simplicity while the vertices on `ua` and `va` survive,
/// updating their active sets. Without `require_csimple`, an unsuccessful
/// search returns `p` unchanged and flagged.
fn ensure_csimple(
    p: HPolyhedron,
    ua: FacetSet,
    va: FacetSet,
    opts: &DantzigOptions,
    seed: u64,
) -> Result<Stage> {
    let copts = CSimpleOptions {
        cfg: opts.cfg.clone(),
        eps: opts.eps.clone(),
        budget: opts.budget,
        certify_diameter: false,
    };
    let keeps = |q: &HPolyhedron| q.vertex_by_rows(&ua).is_ok() && q.vertex_by_rows(&va).is_ok();
    match make_csimple_with(&p, &copts, seed, keeps) {
        Ok(out) => {
            let q = out.poly;
            let ua = q.vertices()[q.vertex_by_rows(&ua)?].active.clone();
            let va = q.vertices()[q.vertex_by_rows(&va)?].active.clone();
            Ok(Stage {
                poly: q,
                ua,
                va,
                perturbed: out.attempts > 0,
                csimple: true,
            })
        }
        Err(Error::Exhausted(_)) if !opts.require_csimple => Ok(Stage {
            poly: p,
            ua,
            va,
            perturbed: false,
            csimple: false,
        }),
        Err(e) => Err(e),
    }
}

/// Wedges over facets incident to neither endpoint until none is left,
/// starting in the smallest face containing both vertices. Each stage is
/// made C-simple where a slope or a mild perturbation achieves it; the log
/// records stages where neither did.
pub fn dantzig_from_pair(
    p: &HPolyhedron,
    u: usize,
    v: usize,
    opts: &DantzigOptions,
    seed: u64,
) -> Result<DantzigFigure> {
    let verts = p.vertices();
    let face_rows: FacetSet = verts[u]
        .active
        .intersection(&verts[v].active)
        .copied()
        .collect();
    let (start, ua, va) = if face_rows.is_empty() {
        (p.clone(), verts[u].active.clone(), verts[v].active.clone())
    } else {
        let face = p.face_restrict(&face_rows)?;
        let fu = face.to_face(&verts[u].point);
        let fv = face.to_face(&verts[v].point);
        let ua = face.poly.active_set(&fu)?;
        let va = face.poly.active_set(&fv)?;
        (face.poly, ua, va)
    };
    let first = ensure_csimple(start, ua, va, opts, seed)?;
    let (perturbed_start, start_csimple) = (first.perturbed, first.csimple);
    let (mut cur, mut ua, mut va) = (first.poly, first.ua, first.va);
    let mut wedges = Vec::new();
    let mut stage_seed = seed;
    while let Some(k) = (0..cur.num_rows()).find(|i| !ua.contains(i) && !va.contains(i)) {
        stage_seed = stage_seed.wrapping_add(1000);
        let mut chosen = None;
        for slope in wedge_slopes() {
            let w = wedge(&cur, k, &slope)?;
            if check_csimple(&w.poly, &opts.cfg)?.simple {
                chosen = Some(w);
                break;
            }
        }
        let found = chosen.is_some();
        let w = match chosen {
            Some(w) => w,
            None => wedge(&cur, k, &wedge_slopes()[0])?,
        };
        let lift = |s: &FacetSet, base: usize| -> FacetSet {
            s.iter()
                .filter_map(|&i| w.side_row(i))
                .chain([base])
                .collect()
        };
        let (nu, nv) = (lift(&ua, w.lower_row()), lift(&va, w.upper_row()));
        let stage = if found {
            Stage {
                poly: w.poly.clone(),
                ua: nu,
                va: nv,
                perturbed: false,
                csimple: true,
            }
        } else {
            ensure_csimple(w.poly.clone(), nu, nv, opts, stage_seed)?
        };
        wedges.push(WedgeStep {
            facet: k,
            slope: w.slope.clone(),
            perturbed: stage.perturbed,
            csimple: stage.csimple,
            dim: stage.poly.dim(),
            rows: stage.poly.num_rows(),
        });
        (cur, ua, va) = (stage.poly, stage.ua, stage.va);
    }
    let u = cur.vertices()[cur.vertex_by_rows(&ua)?].point.clone();
    let v = cur.vertices()[cur.vertex_by_rows(&va)?].point.clone();
    Ok(DantzigFigure {
        poly: cur,
        u,
        v,
        face_rows,
        perturbed_start,
        start_csimple,
        wedges,
    })
}

/// A circuit walk of `p` from `u` to `v` built as an edge walk of `p` cut by
/// the halfspaces at `u` opposite to the facets of `v`, in which every step
/// gains a facet of `v`. The first such walk that is also a circuit walk of
/// `p` is returned.
pub fn unbounded_spindle_walk(p: &HPolyhedron, u: usize, v: usize) -> Result<CircuitWalk> {
    let verts = p.vertices();
    let (disjoint, covers) = partition(p, u, v);
    if !disjoint {
        return Err(Error::NotASpindle("the two vertices share a facet".into()));
    }
    if !covers {
        return Err(Error::NotASpindle(
            "some facet contains neither vertex".into(),
        ));
    }
    if verts[v].active.len() != p.dim() {
        return Err(Error::NotASpindle("the cone at v is not simple".into()));
    }
    let target = verts[v].active.clone();
    let (up, vp) = (&verts[u].point, &verts[v].point);
    let cut = if p.is_bounded() {
        p.clone()
    } else {
        p.with_extra_rows(target.iter().map(|&i| (p.row(i).neg(), -p.row(i).dot(up))))?
    };
    let (cu, cv) = match (cut.vertex_index(up), cut.vertex_index(vp)) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::TransferFailed(
                "endpoints are not vertices after cutting".into(),
            ))
        }
    };
    let walks = facet_gaining_edge_walks(&cut, cu, cv, &target);
    if walks.is_empty() {
        return Err(Error::TransferFailed("no facet-gaining edge walk".into()));
    }
    let mut last = String::new();
    for path in walks {
        let points: Vec<RVector> = path
            .iter()
            .map(|&i| cut.vertices()[i].point.clone())
            .collect();
        match validate_walk(p, &points, WalkMode::Maximal) {
            Ok(w) => return Ok(w),
            Err(e) => last = e.to_string(),
        }
    }
    Err(Error::TransferFailed(last))
}
