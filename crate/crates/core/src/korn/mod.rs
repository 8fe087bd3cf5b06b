//! Korn constant of the thin cylinder and the gradient-component bounds,
//! reduced to one generalized eigenproblem per Fourier mode.

pub mod basis;
pub mod eigen;
pub mod forms;
pub mod scan;
pub mod sweep;

pub use crate::scaling::{fit_exponent, ScalingFit};
pub use basis::{RadialGrid, RadialScheme};
pub use eigen::{min_rayleigh, RayleighMin};
pub use forms::{
    assemble_forms, assemble_mode_forms, ComponentGroup, FormKind, Parity, QuadraticFormPair,
};
pub use scan::{
    component_bound, korn_constant, mode_component_ratio, mode_korn_quotient, ScanBounds,
    ScanOutcome,
};
pub use sweep::{sweep, SweepQuantity, SweepReport, SweepRow};
