//! Built-in exact instances.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::{int, rat, RVector, Rational};
use crate::polyhedron::HPolyhedron;

/// The Klee-Walkup polyhedron: 4-dimensional, 8 facets, unbounded,
/// combinatorial diameter 5. Rows are in the classical order, so row `i`
/// here is facet `i + 1` in the usual `V1234`-style labels.
pub fn u4() -> HPolyhedron {
    HPolyhedron::from_ints(
        &[
            &[-6, -3, 0, 1],
            &[-3, -6, 1, 0],
            &[-35, -45, 6, 3],
            &[-45, -35, 3, 6],
            &[1, 0, 0, 0],
            &[0, 1, 0, 0],
            &[0, 0, 1, 0],
            &[0, 0, 0, 1],
        ],
        &[-1, -1, -8, -8, 0, 0, 0, 0],
    )
    .expect("static instance")
}

/// U4 truncated by `-sum(x) >= -(S + margin)`, `S` the largest coordinate sum
/// over the vertices of U4. Bounded, 9 facets, same vertices plus the
/// truncation vertices.
pub fn q4(margin: &Rational) -> Result<HPolyhedron> {
    if *margin <= Rational::zero() {
        return Err(Error::Invalid("q4 margin must be positive".into()));
    }
    let base = u4();
    let s = base
        .vertices()
        .iter()
        .map(|v| v.point.iter().fold(Rational::zero(), |acc, x| acc + x))
        .max()
        .expect("U4 has vertices");
    base.with_extra_rows([(RVector::from_ints(&[-1, -1, -1, -1]), -(s + margin))])
}

/// Unit cube `0 <= x_i <= 1`: rows `x_i >= 0` first, then `-x_i >= -1`.
pub fn cube(d: usize) -> HPolyhedron {
    let mut rows = Vec::with_capacity(2 * d);
    for i in 0..d {
        rows.push((RVector::unit(d, i), int(0)));
    }
    for i in 0..d {
        rows.push((RVector::unit(d, i).neg(), int(-1)));
    }
    HPolyhedron::from_rows(d, rows).expect("cube dimension must be positive")
}

/// Standard simplex `x_i >= 0, -sum(x) >= -1`.
pub fn simplex(d: usize) -> HPolyhedron {
    let mut rows: Vec<(RVector, Rational)> =
        (0..d).map(|i| (RVector::unit(d, i), int(0))).collect();
    rows.push((RVector::from_ints(&vec![-1; d]), int(-1)));
    HPolyhedron::from_rows(d, rows).expect("simplex dimension must be positive")
}

/// `[0,1]^2` with rows `x >= 0, y >= 0, -x >= -1, -y >= -1`.
pub fn square() -> HPolyhedron {
    cube(2)
}

/// `x >= 0, y >= 0, -x - y >= -1`.
pub fn triangle() -> HPolyhedron {
    simplex(2)
}

/// Affinely regular hexagon with vertices `(1,0), (1,1), (0,1), (-1,0),
/// (-1,-1), (0,-1)`. A metrically regular hexagon has no rational
/// realization; this one has the same combinatorics and parallel-edge
/// structure.
pub fn hexagon() -> HPolyhedron {
    HPolyhedron::from_ints(
        &[&[-1, 0], &[0, -1], &[1, -1], &[1, 0], &[0, 1], &[-1, 1]],
        &[-1, -1, -1, -1, -1, -1],
    )
    .expect("static instance")
}

/// `x >= 0, y >= 0`.
pub fn quadrant() -> HPolyhedron {
    HPolyhedron::from_ints(&[&[1, 0], &[0, 1]], &[0, 0]).expect("static instance")
}

/// Unit square cut by `x + y <= 3/2`. Not C-simple: the step from `(0,1)`
/// along `(1,-1)` lands on `(1,0)` and enters two facets at once.
pub fn pentagon_degenerate() -> HPolyhedron {
    let rows = vec![
        (RVector::from_ints(&[1, 0]), int(0)),
        (RVector::from_ints(&[0, 1]), int(0)),
        (RVector::from_ints(&[-1, 0]), int(-1)),
        (RVector::from_ints(&[0, -1]), int(-1)),
        (RVector::from_ints(&[-1, -1]), rat(-3, 2)),
    ];
    HPolyhedron::from_rows(2, rows).expect("static instance")
}

/// Looks up an instance by its command-line name: `u4`, `q4:<margin>`,
/// `cube:<d>`, `simplex:<d>`, `square`, `triangle`, `hexagon`, `quadrant`,
/// `pentagon`.
pub fn by_name(text: &str) -> Result<HPolyhedron> {
    let (name, arg) = match text.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (text, None),
    };
    let dim = |arg: Option<&str>| -> Result<usize> {
        let d: usize = arg
            .ok_or_else(|| Error::Invalid(format!("`{name}` needs a dimension, e.g. {name}:3")))?
            .parse()
            .map_err(|_| Error::Invalid(format!("bad dimension in `{text}`")))?;
        if d == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(d)
    };
    match name {
        "u4" => Ok(u4()),
        "q4" => {
            let margin = match arg {
                Some(m) => crate::exact::parse_rational(m)
                    .map_err(|e| Error::Invalid(format!("bad q4 margin: {e}")))?,
                None => int(1),
            };
            q4(&margin)
        }
        "cube" => Ok(cube(dim(arg)?)),
        "simplex" => Ok(simplex(dim(arg)?)),
        "square" => Ok(square()),
        "triangle" => Ok(triangle()),
        "hexagon" => Ok(hexagon()),
        "quadrant" => Ok(quadrant()),
        "pentagon" => Ok(pentagon_degenerate()),
        _ => Err(Error::Invalid(format!("unknown instance `{text}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhedron::FacetSet;

    #[test]
    fn u4_rows() {
        let p = u4();
        assert_eq!(p.row(2), &RVector::from_ints(&[-35, -45, 6, 3]));
        assert_eq!(p.rhs(2), &int(-8));
        assert_eq!((p.dim(), p.num_rows()), (4, 8));
        assert!(p.validate().is_valid());
        let v1234: FacetSet = [0, 1, 2, 3].into();
        assert!(p.vertex_by_rows(&v1234).is_ok());
    }

    #[test]
    fn small_fixtures() {
        let c4 = cube(4);
        assert_eq!((c4.num_rows(), c4.dim()), (8, 4));
        let s3 = simplex(3);
        assert_eq!((s3.num_rows(), s3.dim()), (4, 3));
        assert_eq!(s3.combinatorial_diameter().unwrap(), 1);
        for p in [
            cube(2),
            cube(3),
            c4,
            s3,
            simplex(5),
            square(),
            triangle(),
            hexagon(),
            quadrant(),
            pentagon_degenerate(),
        ] {
            assert!(p.validate().is_valid(), "{:?}", p.validate());
        }
        assert_eq!(hexagon().vertices().len(), 6);
        assert_eq!(pentagon_degenerate().vertices().len(), 5);
    }

    #[test]
    fn cube_circuits_are_axes() {
        for d in 2..=4 {
            let p = cube(d);
            let axes: Vec<RVector> = (0..d).rev().map(|i| RVector::unit(d, i)).collect();
            let got: Vec<RVector> = p.circuits().iter().map(|c| c.direction().clone()).collect();
            assert_eq!(got, axes);
        }
    }

    #[test]
    fn q4_truncation() {
        let q = q4(&int(1)).unwrap();
        assert_eq!(q.num_rows(), 9);
        assert!(q.is_bounded());
        assert!(q.validate().is_valid());
        let base = u4();
        for v in base.vertices() {
            let act = q.active_set(&v.point).unwrap();
            assert_eq!(act, v.active);
            assert!(q.is_vertex(&v.point).unwrap());
        }
        let u = q.vertex_by_rows(&[4, 5, 6, 7].into()).unwrap();
        let v = q.vertex_by_rows(&[0, 1, 2, 3].into()).unwrap();
        assert_eq!(q.combinatorial_distance(u, v).unwrap(), 5);
        assert!(q4(&int(0)).is_err());
    }

    #[test]
    fn names() {
        assert_eq!(by_name("cube:3").unwrap(), cube(3));
        assert_eq!(by_name("pentagon").unwrap(), pentagon_degenerate());
        assert_eq!(by_name("q4:2").unwrap(), q4(&int(2)).unwrap());
        assert!(by_name("cube").is_err());
        assert!(by_name("cube:0").is_err());
        assert!(by_name("dodecahedron").is_err());
    }
}
