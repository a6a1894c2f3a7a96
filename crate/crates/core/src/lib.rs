//! Exact circuit walks on rational polyhedra.
//!
//! Polyhedra are given as `{x : A x >= b}` over the rationals. The crate
//! enumerates circuits, vertices and edges, computes maximal circuit steps,
//! searches for shortest circuit walks, and implements the wedge, perturbation
//! and boundedness constructions used to study circuit diameters.

pub mod circuits;
pub mod constructions;
pub mod error;
pub mod exact;
pub mod hpoly;
pub mod instances;
pub mod polyhedron;
pub mod util;
pub mod verify;
pub mod walks;

pub use circuits::{enumerate_circuits, is_circuit, Circuit};
pub use error::{Error, ParseRationalError, Result};
pub use exact::{int, parse_rational, rat, RMatrix, RVector, Rational};
pub use hpoly::{emit_hpoly, parse_hpoly, HpolyError, HpolyErrorKind};
pub use polyhedron::{Face, FacetSet, HPolyhedron, ValidationReport, Vertex};
pub use verify::{verify_u4, U4Report};
pub use walks::{
    check_csimple, circuit_diameter, circuit_distance, max_step, successors, validate_walk,
    CircuitWalk, Distance, SearchConfig, StartPoints, StepError, WalkMode,
};
