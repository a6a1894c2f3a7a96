use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{normalize_primitive, RVector, Rational};
use crate::polyhedron::HPolyhedron;
use crate::walks::{ser_rational, validate_walk, CircuitWalk, WalkMode};

/// Where a row of the wedge comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "row", rename_all = "snake_case")]
pub enum WedgeRow {
    /// Lift `(a_i, 0)` of base row `i`.
    Side(usize),
    /// `t >= 0`.
    Lower,
    /// `(a_k, -slope) . (x, t) >= b_k`.
    Upper,
}

/// The wedge over facet `facet` of `base`: `P x [0, inf)` cut by the
/// halfspace `a_k . x - slope * t >= b_k`.
///
/// Row order: the sides in base order (row `facet` skipped), then the lower
/// base, then the upper base.
#[derive(Clone, Debug, Serialize)]
pub struct Wedge {
    #[serde(skip)]
    pub base: HPolyhedron,
    pub facet: usize,
    #[serde(serialize_with = "ser_rational")]
    pub slope: Rational,
    #[serde(skip)]
    pub poly: HPolyhedron,
}

pub fn wedge(p: &HPolyhedron, facet: usize, slope: &Rational) -> Result<Wedge> {
    if facet >= p.num_rows() {
        return Err(Error::InvalidFacet(facet));
    }
    if *slope <= Rational::zero() {
        return Err(Error::NonPositiveSlope);
    }
    let mut rows: Vec<(RVector, Rational)> = p
        .rows()
        .enumerate()
        .filter(|(i, _)| *i != facet)
        .map(|(_, (a, b))| (a.extend_one(Rational::zero()), b.clone()))
        .collect();
    rows.push((RVector::unit(p.dim() + 1, p.dim()), Rational::zero()));
    rows.push((p.row(facet).extend_one(-slope), p.rhs(facet).clone()));
    Ok(Wedge {
        base: p.clone(),
        facet,
        slope: slope.clone(),
        poly: HPolyhedron::from_rows(p.dim() + 1, rows)?,
    })
}

impl Wedge {
    pub fn lower_row(&self) -> usize {
        self.base.num_rows() - 1
    }

    pub fn upper_row(&self) -> usize {
        self.base.num_rows()
    }

    /// Wedge row lifted from base row `i` (`None` for the wedged facet).
    pub fn side_row(&self, i: usize) -> Option<usize> {
        match i.cmp(&self.facet) {
            std::cmp::Ordering::Less => Some(i),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(i - 1),
        }
    }

    pub fn row_origin(&self, row: usize) -> WedgeRow {
        if row == self.upper_row() {
            WedgeRow::Upper
        } else if row == self.lower_row() {
            WedgeRow::Lower
        } else if row < self.facet {
            WedgeRow::Side(row)
        } else {
            WedgeRow::Side(row + 1)
        }
    }

    /// Height of the upper base above `x`: `(a_k . x - b_k) / slope`.
    fn height(&self, x: &RVector) -> Rational {
        (self.base.row(self.facet).dot(x) - self.base.rhs(self.facet)) / &self.slope
    }

    /// `(x, 0)`.
    pub fn lower(&self, x: &RVector) -> RVector {
        x.extend_one(Rational::zero())
    }

    /// Vertical lift of `x` onto the upper base.
    pub fn phi(&self, x: &RVector) -> RVector {
        x.extend_one(self.height(x))
    }

    /// Drops the last coordinate.
    pub fn phi_inv(&self, y: &RVector) -> RVector {
        y.truncate_last()
    }

    /// Primitive form of `(c, (a_k . c) / slope)`.
    pub fn phi_direction(&self, c: &RVector) -> Result<RVector> {
        normalize_primitive(&c.extend_one(self.base.row(self.facet).dot(c) / &self.slope))
    }

    pub fn on_lower_base(&self, y: &RVector) -> bool {
        y[self.base.dim()].is_zero()
    }

    pub fn on_upper_base(&self, y: &RVector) -> bool {
        let x = y.truncate_last();
        self.height(&x) == y[self.base.dim()]
    }

    /// Projects a walk in the wedge to the base along the last coordinate,
    /// dropping vertical steps, and checks that the result is a circuit walk.
    pub fn project_walk(&self, walk: &CircuitWalk) -> Result<CircuitWalk> {
        let mut pts: Vec<RVector> = Vec::new();
        // Wedge step leading to each kept point.
        let mut origin: Vec<usize> = Vec::new();
        for (j, y) in walk.points.iter().enumerate() {
            let x = self.phi_inv(y);
            if pts.last() != Some(&x) {
                pts.push(x);
                origin.push(j.saturating_sub(1));
            }
        }
        if pts.len() == 1 {
            return Ok(CircuitWalk::trivial(pts.pop().expect("one point")));
        }
        validate_walk(&self.base, &pts, WalkMode::Maximal).map_err(|v| Error::NotTransferable {
            step: origin[(v.step + 1).min(origin.len() - 1)],
            reason: format!("{:?}", v.kind),
        })
    }
}
