//! Discretization of the exponentially weighted space on a finite window:
//! norms, the nonlocal operator, the energy functional and the admissible
//! set projection.

mod functional;
mod grid;
mod nonlocal;
mod profile;
mod projection;

pub use functional::{evaluate_j, gradient_j, normalized_j, seminorm, weighted_norms, Evaluation, Functional, JParts};
pub use grid::WeightedGrid;
pub use nonlocal::{apply_nonlocal, apply_nonlocal_green, NonlocalOperator};
pub use profile::{fmt as fmt_f64, grid_from_nodes, read_pair_csv, write_pair_csv, Frame, Profile};
pub use projection::{apply_splits, best_splits, project_admissible, AdmissibleKind, AdmissibleSpec};
