//! Sturm-Liouville problems `-y'' + q y = lambda y` on `[0, pi]` with
//! interior transmission conditions `y(d+) = a y(d-)`,
//! `y'(d+) = b y'(d-) + c y(d-)`.
//!
//! Forward side: characteristic function, eigenvalues with contour
//! certification, norming constants, Weyl function, asymptotics.
//! Inverse side: least-squares recovery of parameters from spectral data.

pub mod asymptotics;
pub mod eigenparameter;
pub mod error;
pub mod export;
pub mod inverse;
mod magnus;
pub mod problem;
pub mod propagator;
pub mod quadrature;
pub mod spectrum;
pub mod weyl;

pub use error::{Error, Result};
pub use inverse::{FitMode, FitResult, FitSpec, Param, Targets};
pub use problem::{
    gauge_transform, validate, BoundaryCondition, JumpCondition, Potential, ProblemSpec, ValidatedProblem,
};
pub use propagator::{PiecewiseSolution, SolutionKind, SpectralPoint, StateVector};
pub use spectrum::{Certification, EigenRecord, SpectralData};
pub use weyl::WeylSample;
