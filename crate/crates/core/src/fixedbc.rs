//! Two-mode superpositions (m, m+2) that satisfy the fixed-bottom conditions
//! and still attain the classical load as m → ∞.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{
    integrate_pointwise, verify_bc, BcTag, DisplacementField, Factor, LinearizedField, Measure,
    MidSurfaceProfile, QuadratureGrid, SeparableSurface,
};
use crate::koiter::{classical_load, koiter_circle_n, max_axial_index};
use crate::material::{Material, ShellGeometry};
use crate::scaling::{fit_exponent, ScalingFit};

/// γ(m, n) = 1/m̂ + Λ m̂ / ((Λ+2) n²).
pub fn gamma(m: u32, n: u32, geometry: &ShellGeometry, big_lambda: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::domain("m", "γ needs m ≥ 1"));
    }
    if n == 0 {
        return Err(Error::DivisionByZero("γ(m, n) needs n ≥ 1".into()));
    }
    let mh = geometry.m_hat(m);
    Ok(1.0 / mh + big_lambda * mh / ((big_lambda + 2.0) * (n * n) as f64))
}

/// T(m, n) = ((Λ+2)n² − Λm̂²) / ((Λ+2)(n² + m̂²)²); tends to 1/n² when m̂ ≪ n.
pub fn t_coefficient(m: u32, n: u32, geometry: &ShellGeometry, big_lambda: f64) -> Result<f64> {
    let mh = geometry.m_hat(m);
    let n2 = (n * n) as f64;
    let k2 = n2 + mh * mh;
    if k2 == 0.0 {
        return Err(Error::DivisionByZero("T(0, 0)".into()));
    }
    Ok(((big_lambda + 2.0) * n2 - big_lambda * mh * mh) / ((big_lambda + 2.0) * k2 * k2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FixedBcVariant {
    /// φ_z with the 1/n² coefficient and φ_θ through γ(m, n).
    Simplified,
    /// φ_z with T(m, n) and φ_θ minimizing the membrane energy mode by mode.
    Refined,
}

/// Fourier data of one axial mode: f_r = a sin(m̂z) cos nθ,
/// f_θ = −c sin(m̂z) sin nθ, f_z = b cos(m̂z) cos nθ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxialMode {
    pub m: u32,
    pub m_hat: f64,
    pub radial: f64,
    pub theta: f64,
    pub axial: f64,
}

#[derive(Clone)]
pub struct FixedBcMode {
    pub m: u32,
    pub n: u32,
    pub variant: FixedBcVariant,
    pub modes: [AxialMode; 2],
    pub field: LinearizedField,
}

impl FixedBcMode {
    /// Σ m·φ̂_r(m), zero by construction.
    pub fn radial_constraint(&self) -> f64 {
        self.modes.iter().map(|k| k.m as f64 * k.radial).sum()
    }

    /// Σ φ̂_z(m), zero by construction.
    pub fn axial_constraint(&self) -> f64 {
        self.modes.iter().map(|k| k.axial).sum()
    }
}

fn profile(modes: &[AxialMode; 2], n: u32) -> MidSurfaceProfile {
    let nf = n as f64;
    let mut fr = SeparableSurface::zero();
    let mut ft = SeparableSurface::zero();
    let mut fz = SeparableSurface::zero();
    for k in modes {
        fr = fr.plus(k.radial, Factor::Cos(nf), Factor::Sin(k.m_hat));
        ft = ft.plus(-k.theta, Factor::Sin(nf), Factor::Sin(k.m_hat));
        fz = fz.plus(k.axial, Factor::Cos(nf), Factor::Cos(k.m_hat));
    }
    MidSurfaceProfile {
        fr: Arc::new(fr),
        ftheta: Arc::new(ft),
        fz: Arc::new(fz),
    }
}

/// The (m, m+2) mode at n = n(m) on the Koiter circle.
pub fn fixedbc_mode(
    m: u32,
    geometry: &ShellGeometry,
    material: &Material,
    variant: FixedBcVariant,
) -> Result<FixedBcMode> {
    let l = material.big_lambda;
    let m_max = max_axial_index(geometry, l);
    if m == 0 || m + 2 > m_max {
        return Err(Error::OutOfCircle { m: m + 2, m_max });
    }
    let n = koiter_circle_n(m, geometry, l)?;
    fixedbc_mode_at(m, n, geometry, material, variant)
}

/// As [`fixedbc_mode`] with an explicit circumferential wavenumber.
pub fn fixedbc_mode_at(
    m: u32,
    n: u32,
    geometry: &ShellGeometry,
    material: &Material,
    variant: FixedBcVariant,
) -> Result<FixedBcMode> {
    if m == 0 || n == 0 {
        return Err(Error::domain(
            "m, n",
            "the fixed-bottom family needs m ≥ 1 and n ≥ 1",
        ));
    }
    let l = material.big_lambda;
    let nf = n as f64;
    let ms = [m, m + 2];
    let sign = [1.0, -1.0];
    let t = match variant {
        FixedBcVariant::Simplified => 1.0 / (nf * nf),
        FixedBcVariant::Refined => t_coefficient(m, n, geometry, l)?,
    };
    let mut modes = [AxialMode {
        m: 0,
        m_hat: 0.0,
        radial: 0.0,
        theta: 0.0,
        axial: 0.0,
    }; 2];
    for k in 0..2 {
        let mh = geometry.m_hat(ms[k]);
        let radial = sign[k] / mh;
        let axial = -sign[k] * t;
        let theta = match variant {
            FixedBcVariant::Simplified => sign[k] * gamma(ms[k], n, geometry, l)? / nf,
            FixedBcVariant::Refined => {
                nf * ((l + 2.0) * radial - (l + 1.0) * mh * axial) / ((l + 2.0) * nf * nf + mh * mh)
            }
        };
        modes[k] = AxialMode {
            m: ms[k],
            m_hat: mh,
            radial,
            theta,
            axial,
        };
    }
    let field = LinearizedField::new(profile(&modes, n), BcTag::FixedBottom);
    verify_bc(&field, geometry, BcTag::FixedBottom)?;
    Ok(FixedBcMode {
        m,
        n,
        variant,
        modes,
        field,
    })
}

/// Gauss grid that integrates the (m+2)-mode products exactly in θ and z.
pub fn mode_grid(mode: &FixedBcMode, geometry: &ShellGeometry) -> QuadratureGrid {
    QuadratureGrid::new(
        geometry,
        6,
        2 * mode.n as usize + 4,
        2 * mode.m as usize + 28,
        Measure::Volume,
    )
}

/// K0 = ∫ r⁻¹ (L0 E, E) / ‖u_{r,z}‖², by full quadrature.
pub fn k0_by_quadrature(
    field: &dyn DisplacementField,
    material: &Material,
    grid: &QuadratureGrid,
) -> Result<f64> {
    let [s0, urz] = integrate_pointwise(field, grid, |q| {
        [
            material.energy_density(&q.simplified_strain()) / q.p.r,
            q.d[0][2].powi(2),
        ]
    })?;
    if !(urz > 0.0) {
        return Err(Error::DivisionByZero("‖u_{r,z}‖² vanishes".into()));
    }
    Ok(s0 / urz)
}

/// (2 + m̂'²/m̂² + m̂²/m̂'²)/4 with m̂' the (m+2)-wavenumber.
pub fn limit_expression(m: u32) -> f64 {
    let q = ((m + 2) as f64 / m as f64).powi(2);
    (2.0 + q + 1.0 / q) / 4.0
}

/// m(h) = round(c h^{−α}).
pub fn axial_index_for(h: f64, alpha: f64, c: f64) -> Result<u32> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::Precondition(format!(
            "α = {alpha} must lie in (0, 1/2) so that m(h) → ∞ while m(h)√h → 0"
        )));
    }
    if !(c > 0.0) {
        return Err(Error::domain("c", format!("{c} is not positive")));
    }
    Ok(((c * h.powf(-alpha)).round() as u32).max(1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedBcRow {
    pub h: f64,
    pub m: u32,
    pub n: u32,
    pub k0: f64,
    /// K0 / (2μh√((Λ+1)/3))
    pub ratio: f64,
    pub limit_expression: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedBcReport {
    pub alpha: f64,
    pub c: f64,
    pub variant: FixedBcVariant,
    pub rows: Vec<FixedBcRow>,
}

pub fn fixedbc_row(
    h: f64,
    m: u32,
    l: f64,
    material: &Material,
    variant: FixedBcVariant,
) -> Result<FixedBcRow> {
    let geo = ShellGeometry::new(h, l)?;
    let mode = fixedbc_mode(m, &geo, material, variant)?;
    let k0 = k0_by_quadrature(&mode.field, material, &mode_grid(&mode, &geo))?;
    Ok(FixedBcRow {
        h,
        m,
        n: mode.n,
        k0,
        ratio: k0 / classical_load(&geo, material),
        limit_expression: limit_expression(m),
    })
}

pub fn fixedbc_limit(
    h_list: &[f64],
    alpha: f64,
    c: f64,
    l: f64,
    material: &Material,
    variant: FixedBcVariant,
) -> Result<FixedBcReport> {
    if h_list.is_empty() {
        return Err(Error::Arity { needed: 1, got: 0 });
    }
    let rows: Vec<Result<FixedBcRow>> = h_list
        .par_iter()
        .map(|&h| fixedbc_row(h, axial_index_for(h, alpha, c)?, l, material, variant))
        .collect();
    Ok(FixedBcReport {
        alpha,
        c,
        variant,
        rows: rows.into_iter().collect::<Result<_>>()?,
    })
}

/// Fit of ratio − 1 against m at fixed h; the expected slope is −2.
pub fn m_sweep(
    h: f64,
    ms: &[u32],
    l: f64,
    material: &Material,
    variant: FixedBcVariant,
) -> Result<(Vec<FixedBcRow>, ScalingFit)> {
    let rows: Vec<Result<FixedBcRow>> = ms
        .par_iter()
        .map(|&m| fixedbc_row(h, m, l, material, variant))
        .collect();
    let rows: Vec<FixedBcRow> = rows.into_iter().collect::<Result<_>>()?;
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.m as f64, r.ratio - 1.0)).collect();
    let fit = fit_exponent(&pts)?;
    Ok((rows, fit))
}
