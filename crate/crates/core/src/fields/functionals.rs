use serde::Serialize;

use super::displacement::{Component, DisplacementField, MidSurfaceProfile};
use super::quadrature::{Measure, QuadratureGrid};
use super::tensors::{gradient_from_partials, norm_sq, simplified_from_partials, sym, Mat3};
use super::Point;
use crate::error::{Error, Result};
use crate::material::{Material, ShellGeometry, StressWeight};

/// Everything first-order at one quadrature point.
pub struct PointData {
    pub p: Point,
    pub u: [f64; 3],
    /// Plain partials ∂_β u_α.
    pub d: Mat3,
    pub grad: Mat3,
}

impl PointData {
    pub fn at(field: &dyn DisplacementField, p: Point) -> Self {
        let mut d = [[0.0; 3]; 3];
        let mut u = [0.0; 3];
        for c in Component::ALL {
            let i = c as usize;
            u[i] = field.eval_partial(c, [0, 0, 0], p);
            d[i] = [
                field.eval_partial(c, [1, 0, 0], p),
                field.eval_partial(c, [0, 1, 0], p),
                field.eval_partial(c, [0, 0, 1], p),
            ];
        }
        let grad = gradient_from_partials(&d, u[0], u[1], p.r).0;
        PointData { p, u, d, grad }
    }

    pub fn strain(&self) -> Mat3 {
        sym(&self.grad)
    }

    /// E(u) = sym G(u).
    pub fn simplified_strain(&self) -> Mat3 {
        simplified_from_partials(&self.d, self.u[0], self.u[1], self.p.r).e_g()
    }
}

/// Integrates pointwise first-order quantities of a field over the grid.
pub fn integrate_pointwise<const K: usize, F>(
    field: &dyn DisplacementField,
    grid: &QuadratureGrid,
    f: F,
) -> Result<[f64; K]>
where
    F: Fn(&PointData) -> [f64; K] + Sync,
{
    if field.max_order() < 1 {
        return Err(Error::Capability {
            required: 1,
            available: field.max_order(),
        });
    }
    Ok(grid.integrate_many(|p| f(&PointData::at(field, p))))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionalValue {
    /// Stability ∫(L0 e, e).
    pub s: f64,
    /// Compressiveness ∫(σ, ∇φᵀ∇φ).
    pub c: f64,
}

impl FunctionalValue {
    pub fn ratio(&self) -> Result<f64> {
        if self.c > 0.0 {
            Ok(self.s / self.c)
        } else {
            Err(Error::NotDestabilizing(self.c))
        }
    }
}

fn contract(sigma: &Mat3, grad: &Mat3) -> f64 {
    // (σ, ∇φᵀ∇φ) = Σ_βγ σ_βγ Σ_α ∇φ_αβ ∇φ_αγ
    let mut acc = 0.0;
    for b in 0..3 {
        for c in 0..3 {
            if sigma[b][c] != 0.0 {
                let ftf: f64 = (0..3).map(|a| grad[a][b] * grad[a][c]).sum();
                acc += sigma[b][c] * ftf;
            }
        }
    }
    acc
}

fn require_volume(grid: &QuadratureGrid) -> Result<()> {
    if grid.measure != Measure::Volume {
        return Err(Error::Precondition(format!(
            "3-D functionals need the volume measure, grid has {:?}",
            grid.measure
        )));
    }
    Ok(())
}

pub fn functionals(
    field: &dyn DisplacementField,
    stress: &StressWeight,
    material: &Material,
    grid: &QuadratureGrid,
) -> Result<FunctionalValue> {
    require_volume(grid)?;
    let [s, c] = integrate_pointwise(field, grid, |q| {
        let e = q.strain();
        [
            material.energy_density(&e),
            contract(&stress.tensor(q.p.theta, q.p.z), &q.grad),
        ]
    })?;
    Ok(FunctionalValue { s, c })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionalFamily {
    pub k: f64,
    pub k1: f64,
    pub k0: f64,
    pub kstar: Option<f64>,
}

pub fn functional_family(
    field: &dyn DisplacementField,
    material: &Material,
    geometry: &ShellGeometry,
    grid: &QuadratureGrid,
) -> Result<FunctionalFamily> {
    require_volume(grid)?;
    let [s, c, urz, s0] = integrate_pointwise(field, grid, |q| {
        let e = q.strain();
        let big_e = q.simplified_strain();
        let c = q.d[0][2].powi(2) + q.d[1][2].powi(2) + q.d[2][2].powi(2);
        [
            material.energy_density(&e),
            c,
            q.d[0][2].powi(2),
            material.energy_density(&big_e) / q.p.r,
        ]
    })?;
    if !(urz > 0.0) {
        return Err(Error::DivisionByZero("‖u_{r,z}‖² vanishes".into()));
    }
    let k = FunctionalValue { s, c }.ratio()?;
    let kstar = match field.mid_surface() {
        Some(profile) => Some(kstar(
            profile,
            material,
            geometry,
            &grid.with_measure(Measure::Surface),
        )?),
        None => None,
    };
    Ok(FunctionalFamily {
        k,
        k1: s / urz,
        k0: s0 / urz,
        kstar,
    })
}

/// Mid-surface integrals of Q0, Q1, Q1* and B for the profile f.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfaceForms {
    pub q0: f64,
    pub q1: f64,
    pub q1star: f64,
    pub b: f64,
}

pub fn surface_forms(
    profile: &MidSurfaceProfile,
    big_lambda: f64,
    grid: &QuadratureGrid,
) -> Result<SurfaceForms> {
    if grid.measure != Measure::Surface {
        return Err(Error::Precondition(
            "surface forms need the surface measure".into(),
        ));
    }
    let avail = profile
        .fr
        .max_order()
        .min(profile.ftheta.max_order().saturating_add(1))
        .min(profile.fz.max_order().saturating_add(1));
    if avail < 2 {
        return Err(Error::Capability {
            required: 2,
            available: avail,
        });
    }
    let (fr, ft, fz) = (&profile.fr, &profile.ftheta, &profile.fz);
    let l = big_lambda;
    let [q0, q1, q1star, b] = grid.integrate_many(|p| {
        let (t, z) = (p.theta, p.z);
        let r = fr.partial(0, 0, t, z);
        let r_tt = fr.partial(2, 0, t, z);
        let r_zz = fr.partial(0, 2, t, z);
        let r_tz = fr.partial(1, 1, t, z);
        let t_t = ft.partial(1, 0, t, z);
        let t_z = ft.partial(0, 1, t, z);
        let z_z = fz.partial(0, 1, t, z);
        let z_t = fz.partial(1, 0, t, z);
        let q0 = l * (t_t + z_z + r).powi(2)
            + 2.0 * (t_t + r).powi(2)
            + 2.0 * z_z * z_z
            + (z_t + t_z).powi(2);
        let q1 = l * (t_t - r_tt - r_zz).powi(2)
            + 2.0 * (t_t - r_tt).powi(2)
            + 2.0 * r_zz * r_zz
            + (t_z - 2.0 * r_tz).powi(2);
        let q1s =
            l * (r_tt + r_zz).powi(2) + 2.0 * r_tt * r_tt + 2.0 * r_zz * r_zz + 4.0 * r_tz * r_tz;
        [q0, q1, q1s, fr.partial(0, 1, t, z).powi(2)]
    });
    Ok(SurfaceForms { q0, q1, q1star, b })
}

/// K* = μ (Q0 + h²/12 Q1*) / B on the mid-surface.
pub fn kstar(
    profile: &MidSurfaceProfile,
    material: &Material,
    geometry: &ShellGeometry,
    grid: &QuadratureGrid,
) -> Result<f64> {
    let f = surface_forms(profile, material.big_lambda, grid)?;
    if !(f.b > 0.0) {
        return Err(Error::DivisionByZero("B = ‖f_{r,z}‖² vanishes".into()));
    }
    Ok(material.mu * (f.q0 + geometry.h * geometry.h / 12.0 * f.q1star) / f.b)
}

/// ‖u_{r,z}‖² + ‖u_{θ,z}‖² + ‖u_{z,z}‖², the perfect-stress compressiveness.
pub fn axial_gradient_norm_sq(field: &dyn DisplacementField, grid: &QuadratureGrid) -> Result<f64> {
    let [c] = integrate_pointwise(field, grid, |q| {
        [q.d[0][2].powi(2) + q.d[1][2].powi(2) + q.d[2][2].powi(2)]
    })?;
    Ok(c)
}

/// (‖∇u‖², ‖e(u)‖²) under the grid's measure.
pub fn gradient_and_strain_norms(
    field: &dyn DisplacementField,
    grid: &QuadratureGrid,
) -> Result<(f64, f64)> {
    let [g, e] = integrate_pointwise(field, grid, |q| [norm_sq(&q.grad), norm_sq(&q.strain())])?;
    Ok((g, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::displacement::{BcTag, FieldTerm, LinearizedField, SeparableField};
    use crate::fields::surface::{Factor, SeparableSurface};
    use crate::material::derive_material;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn setup() -> (Material, ShellGeometry) {
        (
            derive_material(1.0, 0.3).unwrap(),
            ShellGeometry::new(0.05, 2.0).unwrap(),
        )
    }

    #[test]
    fn z_independent_field_not_destabilizing() {
        let (m, g) = setup();
        let u = SeparableField::new(
            vec![FieldTerm::new(
                1.0,
                vec![1.0],
                Factor::Cos(2.0),
                Factor::one(),
            )],
            vec![],
            vec![],
        );
        let grid = QuadratureGrid::new(&g, 4, 16, 8, Measure::Volume);
        let v = functionals(&u, &StressWeight::Perfect, &m, &grid).unwrap();
        assert_eq!(v.c, 0.0);
        assert!(matches!(v.ratio(), Err(Error::NotDestabilizing(_))));
    }

    #[test]
    fn axial_contraction_compressiveness() {
        let (m, g) = setup();
        let u = SeparableField::new(
            vec![],
            vec![],
            vec![FieldTerm::new(
                -1.0,
                vec![1.0],
                Factor::one(),
                Factor::Poly(vec![0.0, 1.0]),
            )],
        );
        let grid = QuadratureGrid::new(&g, 4, 8, 4, Measure::Volume);
        let v = functionals(&u, &StressWeight::Perfect, &m, &grid).unwrap();
        assert_relative_eq!(v.c, g.volume(), max_relative = 1e-12);
    }

    #[test]
    fn rigid_motion_has_no_energy() {
        let (m, g) = setup();
        let u = SeparableField::new(
            vec![],
            vec![FieldTerm::new(
                2.0,
                vec![0.0, 1.0],
                Factor::one(),
                Factor::one(),
            )],
            vec![],
        );
        let grid = QuadratureGrid::new(&g, 4, 8, 4, Measure::Volume);
        let v = functionals(&u, &StressWeight::Perfect, &m, &grid).unwrap();
        assert!(v.s < 1e-25);
    }

    #[test]
    fn surface_forms_match_hand_integrals() {
        // f_r = sin(z) cos(3θ) on L = π: ∫ f_{r,z}² = π·π/2
        let (m, _) = setup();
        let g = ShellGeometry::new(0.01, PI).unwrap();
        let prof = MidSurfaceProfile {
            fr: Arc::new(SeparableSurface::term(
                1.0,
                Factor::Cos(3.0),
                Factor::Sin(1.0),
            )),
            ftheta: Arc::new(SeparableSurface::zero()),
            fz: Arc::new(SeparableSurface::zero()),
        };
        let grid = QuadratureGrid::new(&g, 1, 16, 24, Measure::Surface);
        let f = surface_forms(&prof, m.big_lambda, &grid).unwrap();
        let norm = PI * PI / 2.0;
        assert_relative_eq!(f.b, norm, max_relative = 1e-12);
        assert_relative_eq!(
            f.q1star,
            (m.big_lambda + 2.0) * 100.0 * norm,
            max_relative = 1e-12
        );
        assert_relative_eq!(f.q0, (m.big_lambda + 2.0) * norm, max_relative = 1e-12);
        let u = LinearizedField::new(prof, BcTag::AverageTop);
        let vgrid = QuadratureGrid::new(&g, 6, 16, 24, Measure::Volume);
        let fam = functional_family(&u, &m, &g, &vgrid).unwrap();
        // with f_θ = 0 the bending forms coincide, and K0 is exactly K*
        assert_relative_eq!(fam.k0, fam.kstar.unwrap(), max_relative = 1e-10);
        assert!(fam.k <= fam.k1 * (1.0 + 1e-12));
    }
}
