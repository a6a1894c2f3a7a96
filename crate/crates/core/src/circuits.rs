//! Circuits (elementary vectors) of a constraint matrix.
//!
//! A nonzero `g` is a circuit of `A` when the rows orthogonal to it have rank
//! `d - 1`; equivalently `A g` has inclusion-minimal support. Circuits are
//! stored primitive (coprime integers) with a positive first nonzero entry.

use std::collections::BTreeSet;

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{
    canonical_sign, kernel_basis, normalize_primitive, rank_of_rows, RMatrix, RVector, Rational,
};
use crate::polyhedron::HPolyhedron;
use crate::util::combinations;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Circuit(RVector);

impl Circuit {
    /// Canonical circuit through `g` (any nonzero multiple).
    pub fn from_direction(g: &RVector) -> Result<Self> {
        Ok(Circuit(canonical_sign(&normalize_primitive(g)?)))
    }

    pub fn direction(&self) -> &RVector {
        &self.0
    }

    pub fn negated(&self) -> RVector {
        self.0.neg()
    }

    /// Both signed directions, positive first.
    pub fn signed(&self) -> [RVector; 2] {
        [self.0.clone(), self.0.neg()]
    }
}

impl std::fmt::Display for Circuit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let ints: Vec<String> = self.0.to_strings();
        write!(f, "{}", ints.join(" "))
    }
}

/// Kernel directions of every rank-`(d-1)` row subset, canonicalized.
pub(crate) fn compute_circuits(a: &RMatrix) -> Vec<Circuit> {
    let d = a.ncols();
    let found: Vec<Circuit> = combinations(a.nrows(), d - 1)
        .into_par_iter()
        .filter_map(|subset| {
            let sub = a.select_rows(subset);
            let kernel = kernel_basis(&sub);
            if kernel.len() != 1 {
                return None;
            }
            Circuit::from_direction(&kernel[0]).ok()
        })
        .collect();
    let set: BTreeSet<Circuit> = found.into_iter().collect();
    set.into_iter().collect()
}

pub fn enumerate_circuits(p: &HPolyhedron) -> Vec<Circuit> {
    p.circuits().to_vec()
}

/// Whether the rows orthogonal to `g` have rank `d - 1`.
pub fn is_circuit(p: &HPolyhedron, g: &RVector) -> Result<bool> {
    if g.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: g.dim(),
        });
    }
    if g.is_zero() {
        return Err(Error::ZeroVector);
    }
    let tight = p.a().rows().iter().filter(|a| a.dot(g).is_zero());
    Ok(rank_of_rows(tight, p.dim()) + 1 == p.dim())
}

/// Circuit set of the wedge over row `facet` with slope `slope`, assembled
/// from the circuits of `p`: each `(c, 0)`, each lift `(c, (a_k . c) / slope)`,
/// and the vertical axis when the rows other than `facet` have rank `d`.
pub fn predicted_wedge_circuits(
    p: &HPolyhedron,
    facet: usize,
    slope: &Rational,
) -> Result<Vec<Circuit>> {
    if facet >= p.num_rows() {
        return Err(Error::InvalidFacet(facet));
    }
    if *slope <= Rational::zero() {
        return Err(Error::NonPositiveSlope);
    }
    let d = p.dim();
    let a_k = p.row(facet);
    let mut out = BTreeSet::new();
    let sides = p
        .a()
        .rows()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != facet)
        .map(|(_, a)| a);
    if rank_of_rows(sides, d) == d {
        out.insert(Circuit(RVector::unit(d + 1, d)));
    }
    for c in p.circuits() {
        let g = c.direction();
        out.insert(Circuit::from_direction(&g.extend_one(Rational::zero()))?);
        out.insert(Circuit::from_direction(&g.extend_one(a_k.dot(g) / slope))?);
    }
    Ok(out.into_iter().collect())
}

/// `supp(A g)`: rows not orthogonal to `g`.
pub fn support(a: &RMatrix, g: &RVector) -> BTreeSet<usize> {
    a.rows()
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.dot(g).is_zero())
        .map(|(i, _)| i)
        .collect()
}
