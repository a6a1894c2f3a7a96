use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{greedy_independent, RVector};
use crate::polyhedron::HPolyhedron;

/// A polyhedron with extra rows appended after the original ones.
#[derive(Clone, Debug, Serialize)]
pub struct Augmented {
    pub poly: HPolyhedron,
    /// `(new row, original row it is opposite to)`.
    pub added: Vec<(usize, usize)>,
}

/// Row `(-a_i) . x >= -a_i . u`: the halfspace through `u` opposite to row `i`.
fn opposite_row(p: &HPolyhedron, i: usize, u: &RVector) -> (RVector, crate::exact::Rational) {
    let a = p.row(i);
    (a.neg(), -a.dot(u))
}

fn augment(p: &HPolyhedron, u: &RVector, sources: &[usize]) -> Result<Augmented> {
    let poly = p.with_extra_rows(sources.iter().map(|&i| opposite_row(p, i, u)))?;
    let added = sources
        .iter()
        .enumerate()
        .map(|(n, &i)| (p.num_rows() + n, i))
        .collect();
    Ok(Augmented { poly, added })
}

/// Makes `p` bounded by adding, at `u`, rows opposite to facets of `v`.
///
/// At `v`, `d - 1` independent rows of the edge to the first neighbouring
/// vertex are chosen; completed by one more row of `v` they span a simple
/// cone whose other edge directions each leave exactly one of them. The
/// opposite of each such row is added at `u`, then added rows that are not
/// needed for boundedness are dropped again.
pub fn boundedize(p: &HPolyhedron, u: usize, v: usize) -> Result<Augmented> {
    let verts = p.vertices();
    let (uv, vv) = (&verts[u], &verts[v]);
    let shared: Vec<usize> = uv.active.intersection(&vv.active).copied().collect();
    if !shared.is_empty() {
        return Err(Error::SharedFacet(shared));
    }
    if p.is_bounded() {
        return Err(Error::AlreadyBounded);
    }
    let d = p.dim();
    let neighbour = *p.adjacency()[v]
        .first()
        .ok_or_else(|| Error::Invalid("vertex has no neighbouring vertex".into()))?;
    let common = vv.active.intersection(&verts[neighbour].active);
    let sources: Vec<usize> =
        greedy_independent(&[], common.map(|&i| (i, p.row(i).clone())), d, d - 1);
    let mut kept = sources.clone();
    if !augment(p, &uv.point, &kept)?.poly.is_bounded() {
        return Err(Error::Invalid(
            "opposite rows at u do not bound the polyhedron".into(),
        ));
    }
    for row in sources {
        let trial: Vec<usize> = kept.iter().copied().filter(|&r| r != row).collect();
        if augment(p, &uv.point, &trial)?.poly.is_bounded() {
            kept = trial;
        }
    }
    augment(p, &uv.point, &kept)
}

/// Makes the feasible point `u` a vertex by adding, at `u`, rows opposite to
/// facets of the vertex `v` that complete the active normals at `u` to a
/// basis. Candidates are scanned in row order.
pub fn vertexify(p: &HPolyhedron, u: &RVector, v: usize) -> Result<Augmented> {
    let d = p.dim();
    let act_u = p.active_set(u)?;
    if p.active_rank(u)? == d {
        return Err(Error::RankComplete);
    }
    let start: Vec<RVector> = act_u.iter().map(|&i| p.row(i).clone()).collect();
    let cands = p.vertices()[v]
        .active
        .iter()
        .map(|&i| (i, p.row(i).clone()));
    let chosen = greedy_independent(&start, cands, d, d);
    augment(p, u, &chosen)
}
