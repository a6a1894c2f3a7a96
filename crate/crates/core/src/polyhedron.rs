//! Polyhedra in inequality form `{x : A x >= b}`.
//!
//! Rows are indexed from 0 throughout the library. Vertices are enumerated by
//! solving every `d`-subset of rows, which is exact and fine for the small
//! instances this crate targets.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::{Arc, OnceLock};

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::circuits::{self, Circuit};
use crate::error::{Error, Result};
use crate::exact::{rank, rank_of_rows, row_space_basis, solve_square, RMatrix, RVector, Rational};
use crate::util::combinations;

pub type FacetSet = BTreeSet<usize>;

/// Maximum number of rows; active sets are tracked as 64-bit masks.
pub const MAX_ROWS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Vertex {
    pub point: RVector,
    pub active: FacetSet,
}

/// `{x in Q^d : A x >= b}`.
///
/// The circuit set depends only on `A`; it is computed lazily and shared by
/// every polyhedron derived through [`HPolyhedron::with_rhs`].
#[derive(Clone, Debug)]
pub struct HPolyhedron {
    a: RMatrix,
    b: RVector,
    circuits: Arc<OnceLock<Vec<Circuit>>>,
    vertices: OnceLock<Vec<Vertex>>,
}

impl PartialEq for HPolyhedron {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b
    }
}

impl Eq for HPolyhedron {}

/// `{"dim": d, "rows": [[a_1, ..., a_d, b], ...]}` with exact rational strings.
impl Serialize for HPolyhedron {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let rows: Vec<Vec<String>> = self
            .rows()
            .map(|(a, b)| {
                let mut r = a.to_strings();
                r.push(crate::exact::fmt_rational(b));
                r
            })
            .collect();
        let mut st = s.serialize_struct("HPolyhedron", 2)?;
        st.serialize_field("dim", &self.dim())?;
        st.serialize_field("rows", &rows)?;
        st.end()
    }
}

impl HPolyhedron {
    pub fn new(a: RMatrix, b: RVector) -> Result<Self> {
        if a.ncols() == 0 {
            return Err(Error::ZeroDimension);
        }
        if b.dim() != a.nrows() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                found: b.dim(),
            });
        }
        if a.nrows() > MAX_ROWS {
            return Err(Error::TooManyRows(a.nrows()));
        }
        Ok(HPolyhedron {
            a,
            b,
            circuits: Arc::new(OnceLock::new()),
            vertices: OnceLock::new(),
        })
    }

    /// Integer rows `a_i` with right-hand sides `b_i`.
    pub fn from_ints(rows: &[&[i64]], b: &[i64]) -> Result<Self> {
        Self::new(RMatrix::from_ints(rows), RVector::from_ints(b))
    }

    /// Builds from `(a_i, b_i)` pairs in the given dimension.
    pub fn from_rows(dim: usize, rows: Vec<(RVector, Rational)>) -> Result<Self> {
        let (a, b): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
        Self::new(RMatrix::new(a, dim)?, RVector::new(b))
    }

    pub fn dim(&self) -> usize {
        self.a.ncols()
    }

    pub fn num_rows(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &RMatrix {
        &self.a
    }

    pub fn b(&self) -> &RVector {
        &self.b
    }

    pub fn row(&self, i: usize) -> &RVector {
        self.a.row(i)
    }

    pub fn rhs(&self, i: usize) -> &Rational {
        &self.b[i]
    }

    pub fn rows(&self) -> impl Iterator<Item = (&RVector, &Rational)> {
        self.a.rows().iter().zip(self.b.iter())
    }

    /// Same `A`, new right-hand side. Shares the circuit cache.
    pub fn with_rhs(&self, b: RVector) -> Result<Self> {
        if b.dim() != self.num_rows() {
            return Err(Error::DimensionMismatch {
                expected: self.num_rows(),
                found: b.dim(),
            });
        }
        Ok(HPolyhedron {
            a: self.a.clone(),
            b,
            circuits: Arc::clone(&self.circuits),
            vertices: OnceLock::new(),
        })
    }

    /// Appends rows `a x >= beta`.
    pub fn with_extra_rows(
        &self,
        extra: impl IntoIterator<Item = (RVector, Rational)>,
    ) -> Result<Self> {
        let mut rows: Vec<(RVector, Rational)> =
            self.rows().map(|(a, b)| (a.clone(), b.clone())).collect();
        rows.extend(extra);
        Self::from_rows(self.dim(), rows)
    }

    /// Drops the listed rows.
    pub fn without_rows(&self, drop: &FacetSet) -> Result<Self> {
        let rows = self
            .rows()
            .enumerate()
            .filter(|(i, _)| !drop.contains(i))
            .map(|(_, (a, b))| (a.clone(), b.clone()))
            .collect();
        Self::from_rows(self.dim(), rows)
    }

    fn check_dim(&self, x: &RVector) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        Ok(())
    }

    /// `a_i . x - b_i` for every row.
    pub fn slacks(&self, x: &RVector) -> Vec<Rational> {
        self.rows().map(|(a, b)| a.dot(x) - b).collect()
    }

    pub fn is_feasible(&self, x: &RVector) -> Result<bool> {
        self.check_dim(x)?;
        Ok(self.rows().all(|(a, b)| a.dot(x) >= *b))
    }

    pub fn active_set(&self, x: &RVector) -> Result<FacetSet> {
        self.check_dim(x)?;
        let s = self.slacks(x);
        if s.iter().any(Signed::is_negative) {
            return Err(Error::InfeasiblePoint);
        }
        Ok(s.iter()
            .enumerate()
            .filter(|(_, s)| s.is_zero())
            .map(|(i, _)| i)
            .collect())
    }

    pub(crate) fn active_mask(&self, x: &RVector) -> u64 {
        self.rows()
            .enumerate()
            .filter(|(_, (a, b))| a.dot(x) == **b)
            .fold(0, |m, (i, _)| m | 1 << i)
    }

    /// Rank of the rows tight at `x`.
    pub fn active_rank(&self, x: &RVector) -> Result<usize> {
        let act = self.active_set(x)?;
        Ok(rank_of_rows(act.iter().map(|&i| self.row(i)), self.dim()))
    }

    pub fn is_vertex(&self, x: &RVector) -> Result<bool> {
        Ok(self.active_rank(x)? == self.dim())
    }

    /// Circuits of `A` up to sign, lexicographically ordered.
    pub fn circuits(&self) -> &[Circuit] {
        self.circuits
            .get_or_init(|| circuits::compute_circuits(&self.a))
    }

    /// All vertices, sorted by point.
    pub fn vertices(&self) -> &[Vertex] {
        self.vertices.get_or_init(|| self.compute_vertices())
    }

    fn compute_vertices(&self) -> Vec<Vertex> {
        let d = self.dim();
        let found: Vec<RVector> = combinations(self.num_rows(), d)
            .into_par_iter()
            .filter_map(|subset| {
                let m = self.a.select_rows(subset.iter().copied());
                let rhs: RVector = subset.iter().map(|&i| self.b[i].clone()).collect();
                let x = solve_square(&m, &rhs)?;
                self.rows().all(|(a, b)| a.dot(&x) >= *b).then_some(x)
            })
            .collect();
        let unique: BTreeSet<RVector> = found.into_iter().collect();
        unique
            .into_iter()
            .map(|point| {
                let active = self.active_set(&point).expect("vertex is feasible");
                Vertex { point, active }
            })
            .collect()
    }

    /// Index of the vertex at `x`, if any.
    pub fn vertex_index(&self, x: &RVector) -> Option<usize> {
        self.vertices().binary_search_by(|v| v.point.cmp(x)).ok()
    }

    /// The unique vertex whose active set contains `rows`.
    pub fn vertex_by_rows(&self, rows: &FacetSet) -> Result<usize> {
        let hits: Vec<usize> = self
            .vertices()
            .iter()
            .enumerate()
            .filter(|(_, v)| rows.is_subset(&v.active))
            .map(|(i, _)| i)
            .collect();
        match hits.as_slice() {
            [i] => Ok(*i),
            [] => Err(Error::Invalid(format!("no vertex lies on rows {rows:?}"))),
            _ => Err(Error::Invalid(format!(
                "rows {rows:?} do not identify a unique vertex ({} candidates)",
                hits.len()
            ))),
        }
    }

    /// Signed circuits `g` with `A g >= 0`: the extreme rays of the recession cone.
    pub fn extreme_rays(&self) -> Vec<RVector> {
        self.circuits()
            .iter()
            .flat_map(|c| [c.direction().clone(), c.direction().neg()])
            .filter(|g| self.a.rows().iter().all(|a| !a.dot(g).is_negative()))
            .collect()
    }

    pub fn is_bounded(&self) -> bool {
        self.extreme_rays().is_empty()
    }

    /// Checks pointedness, nonemptiness, full dimension, and that every row
    /// supports its own facet.
    pub fn validate(&self) -> ValidationReport {
        let d = self.dim();
        let f = self.num_rows();
        let rank = rank(&self.a);
        let mut report = ValidationReport {
            dim: d,
            rows: f,
            rank,
            pointed: rank == d,
            nonempty: false,
            full_dimensional: false,
            non_facet_rows: Vec::new(),
            duplicate_rows: Vec::new(),
        };
        if !report.pointed {
            return report;
        }
        let verts = self.vertices();
        if verts.is_empty() {
            return report;
        }
        report.nonempty = true;
        let rays = self.extreme_rays();
        report.full_dimensional =
            affine_rank(verts.iter().map(|v| &v.point), rays.iter(), d) == Some(d);
        for i in 0..f {
            let a_i = self.row(i);
            let face_dim = affine_rank(
                verts
                    .iter()
                    .filter(|v| v.active.contains(&i))
                    .map(|v| &v.point),
                rays.iter().filter(|r| a_i.dot(r).is_zero()),
                d,
            );
            if face_dim != Some(d - 1) {
                report.non_facet_rows.push(i);
            }
        }
        for j in 0..f {
            if let Some(i) = (0..j).find(|&i| self.same_halfspace(i, j)) {
                report.duplicate_rows.push((i, j));
            }
        }
        report
    }

    /// Whether rows `i` and `j` are positive multiples of each other.
    fn same_halfspace(&self, i: usize, j: usize) -> bool {
        let ri = self.row(i).extend_one(self.b[i].clone());
        let rj = self.row(j).extend_one(self.b[j].clone());
        match rj.ratio_to(&ri) {
            Some(s) => s.is_positive(),
            None => false,
        }
    }

    /// Adjacent vertex pairs `(i, j)`, `i < j`, as indices into [`vertices`](Self::vertices).
    ///
    /// Two vertices are adjacent when their common active rows have rank
    /// `d - 1` and no other vertex lies strictly between them; this works for
    /// degenerate polyhedra too. Unbounded edges are not reported.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let verts = self.vertices();
        let d = self.dim();
        let pairs = combinations(verts.len(), 2);
        pairs
            .into_par_iter()
            .filter_map(|p| {
                let (i, j) = (p[0], p[1]);
                let (u, v) = (&verts[i], &verts[j]);
                let common = u.active.intersection(&v.active).map(|&r| self.row(r));
                if rank_of_rows(common, d) + 1 != d {
                    return None;
                }
                let dir = v.point.sub(&u.point);
                let between = verts.iter().enumerate().any(|(k, w)| {
                    k != i && k != j && {
                        match w.point.sub(&u.point).ratio_to(&dir) {
                            Some(t) => t.is_positive() && t < Rational::from_integer(1.into()),
                            None => false,
                        }
                    }
                });
                (!between).then_some((i, j))
            })
            .collect()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices().len()];
        for (i, j) in self.edges() {
            adj[i].push(j);
            adj[j].push(i);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Graph distances from vertex `src` (`None` for unreachable vertices).
    pub fn graph_distances(&self, src: usize) -> Vec<Option<usize>> {
        bfs_graph(&self.adjacency(), src)
    }

    /// Edge distance between two vertices, by index.
    pub fn combinatorial_distance(&self, u: usize, v: usize) -> Result<usize> {
        self.graph_distances(u)[v].ok_or(Error::Unreachable)
    }

    /// Largest edge distance over all vertex pairs.
    pub fn combinatorial_diameter(&self) -> Result<usize> {
        let adj = self.adjacency();
        let mut best = 0;
        for s in 0..adj.len() {
            for d in bfs_graph(&adj, s) {
                best = best.max(d.ok_or(Error::Unreachable)?);
            }
        }
        Ok(best)
    }

    /// The face where all of `rows` are tight, as a full-dimensional
    /// polyhedron in coordinates of its affine hull.
    pub fn face_restrict(&self, rows: &FacetSet) -> Result<Face> {
        let d = self.dim();
        if let Some(&bad) = rows.iter().find(|&&r| r >= self.num_rows()) {
            return Err(Error::InvalidFacet(bad));
        }
        let verts: Vec<&Vertex> = self
            .vertices()
            .iter()
            .filter(|v| rows.is_subset(&v.active))
            .collect();
        let origin = verts.first().ok_or(Error::EmptyFace)?.point.clone();
        let mut dirs: Vec<RVector> = verts.iter().skip(1).map(|v| v.point.sub(&origin)).collect();
        dirs.extend(
            self.extreme_rays()
                .into_iter()
                .filter(|r| rows.iter().all(|&i| self.row(i).dot(r).is_zero())),
        );
        let (basis, pivots) = row_space_basis(&dirs, d);
        let k = basis.len();
        if k == 0 {
            return Err(Error::PointFace);
        }
        // Induced rows in face coordinates: (a_j . B) y >= b_j - a_j . origin.
        let mut induced = Vec::new();
        let mut sources = Vec::new();
        for (j, (a, b)) in self.rows().enumerate() {
            let coeffs: RVector = basis.iter().map(|col| a.dot(col)).collect();
            if coeffs.is_zero() {
                continue;
            }
            induced.push((coeffs, b - a.dot(&origin)));
            sources.push(j);
        }
        let candidate = HPolyhedron::from_rows(k, induced)?;
        let report = candidate.validate();
        let mut drop: FacetSet = report.non_facet_rows.iter().copied().collect();
        drop.extend(report.duplicate_rows.iter().map(|&(_, j)| j));
        let poly = candidate.without_rows(&drop)?;
        let rows_map = sources
            .into_iter()
            .enumerate()
            .filter(|(i, _)| !drop.contains(i))
            .map(|(_, j)| j)
            .collect();
        Ok(Face {
            poly,
            origin,
            basis,
            pivots,
            source_rows: rows_map,
        })
    }
}

/// Dimension of `conv(points) + cone(rays)`; `None` when there are no points.
fn affine_rank<'a>(
    mut points: impl Iterator<Item = &'a RVector>,
    rays: impl Iterator<Item = &'a RVector>,
    d: usize,
) -> Option<usize> {
    let base = points.next()?;
    let dirs: Vec<RVector> = points.map(|p| p.sub(base)).chain(rays.cloned()).collect();
    Some(rank_of_rows(&dirs, d))
}

fn bfs_graph(adj: &[Vec<usize>], src: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[src] = Some(0);
    let mut queue = VecDeque::from([src]);
    while let Some(x) = queue.pop_front() {
        let dx = dist[x].unwrap();
        for &y in &adj[x] {
            if dist[y].is_none() {
                dist[y] = Some(dx + 1);
                queue.push_back(y);
            }
        }
    }
    dist
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub dim: usize,
    pub rows: usize,
    pub rank: usize,
    pub pointed: bool,
    pub nonempty: bool,
    pub full_dimensional: bool,
    /// Rows whose tight locus in P is not `(d-1)`-dimensional.
    pub non_facet_rows: Vec<usize>,
    /// `(i, j)`: row `j` is a positive multiple of earlier row `i`.
    pub duplicate_rows: Vec<(usize, usize)>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.pointed
            && self.nonempty
            && self.full_dimensional
            && self.non_facet_rows.is_empty()
            && self.duplicate_rows.is_empty()
    }

    pub fn violating_rows(&self) -> FacetSet {
        self.non_facet_rows
            .iter()
            .copied()
            .chain(self.duplicate_rows.iter().map(|&(_, j)| j))
            .collect()
    }

    pub fn summary(&self) -> String {
        if self.is_valid() {
            return "valid".into();
        }
        let mut parts = Vec::new();
        if !self.pointed {
            parts.push(format!("rank(A) = {} < d = {}", self.rank, self.dim));
        }
        if self.pointed && !self.nonempty {
            parts.push("empty".into());
        }
        if self.nonempty && !self.full_dimensional {
            parts.push("not full-dimensional".into());
        }
        if !self.non_facet_rows.is_empty() {
            parts.push(format!("rows {:?} support no facet", self.non_facet_rows));
        }
        if !self.duplicate_rows.is_empty() {
            parts.push(format!("duplicate rows {:?}", self.duplicate_rows));
        }
        parts.join("; ")
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::Invalid(self.summary()))
        }
    }
}

/// A face of a polyhedron, re-expressed in coordinates `y` of its affine
/// hull via `x = origin + sum_l y_l basis_l`.
#[derive(Clone, Debug)]
pub struct Face {
    pub poly: HPolyhedron,
    pub origin: RVector,
    /// Reduced row echelon basis of the face's direction space.
    pub basis: Vec<RVector>,
    /// Pivot coordinate of each basis vector.
    pub pivots: Vec<usize>,
    /// For each row of `poly`, the row of the ambient polyhedron it comes from.
    pub source_rows: Vec<usize>,
}

impl Face {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn to_ambient(&self, y: &RVector) -> RVector {
        self.basis
            .iter()
            .zip(y.iter())
            .fold(self.origin.clone(), |acc, (col, t)| acc.add_scaled(t, col))
    }

    /// Face coordinates of an ambient point lying in the affine hull.
    pub fn to_face(&self, x: &RVector) -> RVector {
        self.pivots
            .iter()
            .map(|&p| &x[p] - &self.origin[p])
            .collect()
    }

    /// Ambient image of a face direction.
    pub fn direction_to_ambient(&self, g: &RVector) -> RVector {
        self.basis
            .iter()
            .zip(g.iter())
            .fold(RVector::zeros(self.origin.dim()), |acc, (col, t)| {
                acc.add_scaled(t, col)
            })
    }

    /// Map from face row index to ambient row index.
    pub fn row_map(&self) -> BTreeMap<usize, usize> {
        self.source_rows.iter().copied().enumerate().collect()
    }
}
