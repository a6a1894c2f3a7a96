//! HPOLY text format.
//!
//! ```text
//! # unit square
//! 2 4
//! 1 0 0
//! 0 1 0
//! -1 0 -1
//! 0 -1 -1
//! ```
//!
//! The header is `d f`; each of the `f` rows lists `a_i1 .. a_id b_i` for the
//! inequality `a_i . x >= b_i`. `#` starts a comment and blank lines are
//! ignored.

use std::fmt::Write as _;

use thiserror::Error;

use crate::error::{Error, ParseRationalError};
use crate::exact::{fmt_rational, parse_rational, RVector, Rational};
use crate::polyhedron::HPolyhedron;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HpolyErrorKind {
    #[error("missing header `d f`")]
    MissingHeader,
    #[error("header must be two non-negative integers `d f`, found `{0}`")]
    BadHeader(String),
    #[error("{0}")]
    Rational(ParseRationalError),
    #[error("row has {found} entries, expected {expected}")]
    RowLength { expected: usize, found: usize },
    #[error("expected {expected} rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("{0}")]
    Polyhedron(Error),
}

/// Parse failure anchored at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct HpolyError {
    pub line: usize,
    pub column: usize,
    pub kind: HpolyErrorKind,
}

/// Whitespace-separated tokens of `line` with their 1-based columns, comment
/// stripped.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let body = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in body.char_indices().chain([(body.len(), ' ')]) {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((body[..s].chars().count() + 1, &body[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    out
}

pub fn parse_hpoly(text: &str) -> Result<HPolyhedron, HpolyError> {
    let err = |line, column, kind| HpolyError { line, column, kind };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, tokens(l)))
        .filter(|(_, t)| !t.is_empty());
    let last_line = text.lines().count().max(1);

    let (hline, header) = lines
        .next()
        .ok_or_else(|| err(last_line, 1, HpolyErrorKind::MissingHeader))?;
    let bad_header = || {
        let shown: Vec<&str> = header.iter().map(|t| t.1).collect();
        err(
            hline,
            header[0].0,
            HpolyErrorKind::BadHeader(shown.join(" ")),
        )
    };
    let [(_, d), (_, f)] = header[..] else {
        return Err(bad_header());
    };
    let (d, f): (usize, usize) = match (d.parse(), f.parse()) {
        (Ok(d), Ok(f)) => (d, f),
        _ => return Err(bad_header()),
    };
    if d == 0 {
        return Err(err(
            hline,
            header[0].0,
            HpolyErrorKind::Polyhedron(Error::ZeroDimension),
        ));
    }

    let mut rows: Vec<(RVector, Rational)> = Vec::with_capacity(f.min(1024));
    for (lno, toks) in lines {
        if rows.len() == f {
            return Err(err(
                lno,
                toks[0].0,
                HpolyErrorKind::RowCount {
                    expected: f,
                    found: f + 1,
                },
            ));
        }
        if toks.len() != d + 1 {
            let column = toks.get(d + 1).map_or(toks[0].0, |t| t.0);
            return Err(err(
                lno,
                column,
                HpolyErrorKind::RowLength {
                    expected: d + 1,
                    found: toks.len(),
                },
            ));
        }
        let mut vals = Vec::with_capacity(d + 1);
        for (col, tok) in toks {
            vals.push(parse_rational(tok).map_err(|e| err(lno, col, HpolyErrorKind::Rational(e)))?);
        }
        let b = vals.pop().expect("d + 1 entries");
        rows.push((RVector::new(vals), b));
    }
    if rows.len() != f {
        return Err(err(
            last_line,
            1,
            HpolyErrorKind::RowCount {
                expected: f,
                found: rows.len(),
            },
        ));
    }
    HPolyhedron::from_rows(d, rows).map_err(|e| err(hline, 1, HpolyErrorKind::Polyhedron(e)))
}

pub fn emit_hpoly(p: &HPolyhedron) -> String {
    let mut out = format!("{} {}\n", p.dim(), p.num_rows());
    for (a, b) in p.rows() {
        let entries: Vec<String> = a.iter().chain([b]).map(fmt_rational).collect();
        writeln!(out, "{}", entries.join(" ")).expect("writing to a String");
    }
    out
}
