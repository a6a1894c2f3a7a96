//! Exact rational scalars, vectors and matrices, and the elimination kernels
//! (rank, kernel, square solves) everything else is built on.

use std::fmt;
use std::ops::{Deref, Index};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, ParseRationalError};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

/// Builds `num/den` from machine integers. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `-35`, `+4`, `8/3`, `-1/2`. Denominators must be positive.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let num = parse_int(num)?;
    match den {
        None => Ok(Rational::from_integer(num)),
        Some(d) => {
            if d.starts_with('-') || d.starts_with('+') {
                return Err(ParseRationalError::SignedDenominator(s.to_string()));
            }
            let den = parse_int(d)?;
            if den.is_zero() {
                return Err(ParseRationalError::DivisionByZeroDenominator);
            }
            Ok(Rational::new(num, den))
        }
    }
}

fn parse_int(s: &str) -> Result<BigInt, ParseRationalError> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseRationalError::Malformed(s.to_string()));
    }
    BigInt::from_str(s).map_err(|_| ParseRationalError::Malformed(s.to_string()))
}

/// Canonical textual form: `p` for integers, `p/q` otherwise.
pub fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// A point or direction in `Q^d`.
///
/// Entries of a [`Rational`] are always reduced, so structural equality,
/// hashing and ordering coincide with exact equality; the vector itself is the
/// canonical key used for deduplication.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct RVector(Vec<Rational>);

impl RVector {
    pub fn new(entries: Vec<Rational>) -> Self {
        RVector(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        RVector(vec![Rational::zero(); dim])
    }

    pub fn from_ints(v: &[i64]) -> Self {
        RVector(v.iter().map(|&x| int(x)).collect())
    }

    /// Unit vector `e_axis` in dimension `dim`.
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[axis] = Rational::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<Rational> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &RVector) -> Rational {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn add(&self, other: &RVector) -> RVector {
        RVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &RVector) -> RVector {
        RVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: &Rational) -> RVector {
        RVector(self.0.iter().map(|a| a * s).collect())
    }

    /// `self + s * dir`
    pub fn add_scaled(&self, s: &Rational, dir: &RVector) -> RVector {
        RVector(self.0.iter().zip(&dir.0).map(|(a, g)| a + s * g).collect())
    }

    pub fn neg(&self) -> RVector {
        RVector(self.0.iter().map(|a| -a).collect())
    }

    /// Appends one coordinate.
    pub fn extend_one(&self, last: Rational) -> RVector {
        let mut v = self.0.clone();
        v.push(last);
        RVector(v)
    }

    /// Drops the last coordinate.
    pub fn truncate_last(&self) -> RVector {
        RVector(self.0[..self.0.len() - 1].to_vec())
    }

    /// If `self = s * dir` for some rational `s`, returns `s`.
    pub fn ratio_to(&self, dir: &RVector) -> Option<Rational> {
        let pivot = dir.0.iter().position(|x| !x.is_zero())?;
        let s = &self.0[pivot] / &dir.0[pivot];
        (dir.scale(&s) == *self).then_some(s)
    }

    /// Entry-wise `(numerator, denominator)` pairs.
    pub fn key(&self) -> Vec<(BigInt, BigInt)> {
        self.0
            .iter()
            .map(|q| (q.numer().clone(), q.denom().clone()))
            .collect()
    }

    /// Integer entries; `None` if some entry is fractional.
    pub fn to_integers(&self) -> Option<Vec<BigInt>> {
        self.0
            .iter()
            .map(|q| q.is_integer().then(|| q.numer().clone()))
            .collect()
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(fmt_rational).collect()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.0.iter()
    }
}

impl Deref for RVector {
    type Target = [Rational];
    fn deref(&self) -> &[Rational] {
        &self.0
    }
}

impl From<Vec<Rational>> for RVector {
    fn from(v: Vec<Rational>) -> Self {
        RVector(v)
    }
}

impl FromIterator<Rational> for RVector {
    fn from_iter<I: IntoIterator<Item = Rational>>(iter: I) -> Self {
        RVector(iter.into_iter().collect())
    }
}

impl fmt::Display for RVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, q) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", fmt_rational(q))?;
        }
        write!(f, ")")
    }
}

impl Serialize for RVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

/// Parses a coordinate list such as `1/2,0,3` or `1/2 0 3`.
pub fn parse_vector(s: &str) -> Result<RVector, ParseRationalError> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(parse_rational)
        .collect()
}

/// Rectangular matrix stored row-wise.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RMatrix {
    rows: Vec<RVector>,
    cols: usize,
}

impl RMatrix {
    pub fn new(rows: Vec<RVector>, cols: usize) -> Result<Self, Error> {
        if let Some(bad) = rows.iter().find(|r| r.dim() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                found: bad.dim(),
            });
        }
        Ok(RMatrix { rows, cols })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows = rows.iter().map(|r| RVector::from_ints(r)).collect();
        RMatrix::new(rows, cols).expect("ragged integer matrix")
    }

    pub fn identity(n: usize) -> Self {
        RMatrix {
            rows: (0..n).map(|i| RVector::unit(n, i)).collect(),
            cols: n,
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[RVector] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &RVector {
        &self.rows[i]
    }

    /// The submatrix made of the given rows, in the given order.
    pub fn select_rows(&self, idx: impl IntoIterator<Item = usize>) -> RMatrix {
        RMatrix {
            rows: idx.into_iter().map(|i| self.rows[i].clone()).collect(),
            cols: self.cols,
        }
    }

    pub fn mul_vec(&self, x: &RVector) -> RVector {
        self.rows.iter().map(|r| r.dot(x)).collect()
    }

    pub fn push_row(&mut self, row: RVector) -> Result<(), Error> {
        if row.dim() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: row.dim(),
            });
        }
        self.rows.push(row);
        Ok(())
    }
}

impl Index<usize> for RMatrix {
    type Output = RVector;
    fn index(&self, i: usize) -> &RVector {
        &self.rows[i]
    }
}

/// In-place reduced row echelon form. Pivot is the first nonzero entry in
/// the column at or below the current row. Returns the pivot columns.
fn rref(rows: &mut [Vec<Rational>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &factor * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn to_rows(m: &RMatrix) -> Vec<Vec<Rational>> {
    m.rows.iter().map(|r| r.0.clone()).collect()
}

pub fn rank(m: &RMatrix) -> usize {
    rank_of_rows(&m.rows, m.cols)
}

/// Rank of an arbitrary collection of equal-length vectors.
pub fn rank_of_rows<'a>(rows: impl IntoIterator<Item = &'a RVector>, cols: usize) -> usize {
    let mut rows: Vec<Vec<Rational>> = rows.into_iter().map(|r| r.0.clone()).collect();
    rref(&mut rows, cols).len()
}

/// Basis of the right kernel `{x : M x = 0}`; one vector per free column.
pub fn kernel_basis(m: &RMatrix) -> Vec<RVector> {
    let mut rows = to_rows(m);
    let pivots = rref(&mut rows, m.cols);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![Rational::zero(); m.cols];
            v[fc] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -rows[r][fc].clone();
            }
            RVector(v)
        })
        .collect()
}

/// Reduced row echelon basis of the row space of `rows`, with pivot columns.
pub fn row_space_basis(rows: &[RVector], cols: usize) -> (Vec<RVector>, Vec<usize>) {
    let mut m: Vec<Vec<Rational>> = rows.iter().map(|r| r.0.clone()).collect();
    let pivots = rref(&mut m, cols);
    let basis = m.into_iter().take(pivots.len()).map(RVector).collect();
    (basis, pivots)
}

/// Scales `v` by a positive rational so its entries are coprime integers.
pub fn normalize_primitive(v: &RVector) -> Result<RVector, Error> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    let lcm = v.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<BigInt> = v.iter().map(|q| q.numer() * (&lcm / q.denom())).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    Ok(ints
        .into_iter()
        .map(|x| Rational::from_integer(x / &gcd))
        .collect())
}

/// `v` or `-v`, whichever has a positive first nonzero entry.
pub fn canonical_sign(v: &RVector) -> RVector {
    match v.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => v.neg(),
        _ => v.clone(),
    }
}

/// Unique solution of `M x = rhs` for square nonsingular `M`.
pub fn solve_square(m: &RMatrix, rhs: &RVector) -> Option<RVector> {
    let n = m.nrows();
    if m.ncols() != n || rhs.dim() != n {
        return None;
    }
    let mut aug: Vec<Vec<Rational>> = m
        .rows
        .iter()
        .zip(rhs.iter())
        .map(|(r, b)| {
            let mut row = r.0.clone();
            row.push(b.clone());
            row
        })
        .collect();
    let pivots = rref(&mut aug, n);
    if pivots.len() < n {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n].clone()).collect())
}

/// Greedily picks indices (in the given order) whose vectors extend the rank
/// of `start`, stopping once `target` is reached.
pub fn greedy_independent(
    start: &[RVector],
    candidates: impl IntoIterator<Item = (usize, RVector)>,
    cols: usize,
    target: usize,
) -> Vec<usize> {
    let mut basis: Vec<RVector> = start.to_vec();
    let mut r = rank_of_rows(&basis, cols);
    let mut chosen = Vec::new();
    for (i, v) in candidates {
        if r >= target {
            break;
        }
        basis.push(v);
        let nr = rank_of_rows(&basis, cols);
        if nr > r {
            r = nr;
            chosen.push(i);
        } else {
            basis.pop();
        }
    }
    chosen
}
