//! Polyhedron transformations: wedges, mild perturbations, boundedization,
//! vertexification, and Dantzig figures.

mod bounded;
mod dantzig;
mod perturb;
mod wedge;

pub use bounded::{boundedize, vertexify, Augmented};
pub use dantzig::{
    dantzig_from_pair, is_dantzig_figure, is_spindle, unbounded_spindle_walk, DantzigFigure,
    DantzigOptions, WedgeStep,
};
pub use perturb::{
    check_wedge_simple, make_csimple, perturb, perturbation_vector, wedge_slopes, CSimpleOptions,
    CSimplification, FacetWedge, PerturbedWitness, WedgeSimpleOptions, WedgeSimpleReport,
    PERTURBATION_DENOMINATOR, PERTURBATION_RETRIES,
};
pub use wedge::{wedge, Wedge, WedgeRow};
