//! Cylindrical-coordinate field calculus: displacement fields with analytic
//! partials, gradients and strains, quadrature, and the stability and
//! compressiveness functionals.

pub mod displacement;
pub mod functionals;
pub mod quadrature;
pub mod surface;
pub mod tensors;

pub use displacement::{
    linearize_radial, verify_bc, BcTag, Component, DisplacementField, FieldTerm, LinearizedField,
    MidSurfaceProfile, SeparableField,
};
pub use functionals::{
    axial_gradient_norm_sq, functional_family, functionals, gradient_and_strain_norms,
    integrate_pointwise, kstar, surface_forms, FunctionalFamily, FunctionalValue, PointData,
    SurfaceForms,
};
pub use quadrature::{gauss_legendre, Measure, QuadratureGrid, Rule};
pub use surface::{DerivedSurface, Factor, SeparableSurface, SurfaceFunction};
pub use tensors::{gradient, simplified, GradientTensor, SimplifiedTensors};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub r: f64,
    pub theta: f64,
    pub z: f64,
}
