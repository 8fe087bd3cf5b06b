//! Per-mode algebra of the linearized buckling problem: reduced quadratic
//! forms, optimal tangential amplitudes, the load surface λ̂*(h; m, n), its
//! integer minimization and the Koiter circle.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{BcTag, Factor, LinearizedField, MidSurfaceProfile, SeparableSurface};
use crate::material::{Material, ShellGeometry};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveNumbers {
    pub m: u32,
    pub n: u32,
    pub m_hat: f64,
}

impl WaveNumbers {
    pub fn new(m: u32, n: u32, geometry: &ShellGeometry) -> Self {
        WaveNumbers {
            m,
            n,
            m_hat: geometry.m_hat(m),
        }
    }

    /// Non-integer axial wavenumber, for continuum checks.
    pub fn with_m_hat(m_hat: f64, n: u32) -> Self {
        WaveNumbers { m: 0, n, m_hat }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeAmplitudes {
    pub f_r: Complex64,
    pub f_theta: Complex64,
    pub f_z: Complex64,
}

impl ModeAmplitudes {
    pub fn new(f_r: Complex64, f_theta: Complex64, f_z: Complex64) -> Self {
        ModeAmplitudes { f_r, f_theta, f_z }
    }

    pub fn radial(f_r: f64) -> Self {
        Self::new(f_r.into(), 0.0.into(), 0.0.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedForms {
    pub q0: f64,
    pub q1: f64,
    pub q1star: f64,
    pub b: f64,
}

pub fn reduced_forms(wn: &WaveNumbers, amp: &ModeAmplitudes, big_lambda: f64) -> ReducedForms {
    let (mh, n) = (wn.m_hat, wn.n as f64);
    let i = Complex64::i();
    let (fr, ft, fz) = (amp.f_r, amp.f_theta, amp.f_z);
    let l = big_lambda;
    let k2 = mh * mh + n * n;
    let q0 = l * (i * n * ft - mh * fz + fr).norm_sqr()
        + 2.0 * (i * n * ft + fr).norm_sqr()
        + 2.0 * mh * mh * fz.norm_sqr()
        + (i * n * fz + mh * ft).norm_sqr();
    let q1 = l * (k2 * fr + i * n * ft).norm_sqr()
        + 2.0 * (n * n * fr + i * n * ft).norm_sqr()
        + 2.0 * mh.powi(4) * fr.norm_sqr()
        + mh * mh * (ft - 2.0 * i * n * fr).norm_sqr();
    ReducedForms {
        q0,
        q1,
        q1star: (l + 2.0) * k2 * k2 * fr.norm_sqr(),
        b: mh * mh * fr.norm_sqr(),
    }
}

/// Minimizer of Q0 over (f_θ, f_z) for fixed f_r.
pub fn optimal_tangential(
    f_r: Complex64,
    wn: &WaveNumbers,
    big_lambda: f64,
) -> Result<(Complex64, Complex64)> {
    let (mh, n) = (wn.m_hat, wn.n as f64);
    let k2 = n * n + mh * mh;
    if k2 == 0.0 {
        return Err(Error::domain(
            "wavenumbers",
            "m̂ = n = 0 has no tangential minimizer",
        ));
    }
    let l = big_lambda;
    let den = (l + 2.0) * k2 * k2;
    let ft = Complex64::i() * n * f_r * ((3.0 * l + 4.0) * mh * mh + (l + 2.0) * n * n) / den;
    let fz = mh * f_r * (l * mh * mh - (l + 2.0) * n * n) / den;
    Ok((ft, fz))
}

/// Q0 at the tangential optimum, 4|f_r|² m̂⁴ (Λ+1) / ((Λ+2)(n²+m̂²)²).
pub fn q0_at_optimum(f_r: Complex64, wn: &WaveNumbers, big_lambda: f64) -> f64 {
    let k2 = wn.n as f64 * wn.n as f64 + wn.m_hat * wn.m_hat;
    4.0 * f_r.norm_sqr() * wn.m_hat.powi(4) * (big_lambda + 1.0) / ((big_lambda + 2.0) * k2 * k2)
}

/// The two terms of λ̂*/μ: membrane and bending.
pub fn load_terms(h: f64, big_lambda: f64, m_hat: f64, n: f64) -> (f64, f64) {
    let l = big_lambda;
    let k2 = m_hat * m_hat + n * n;
    let membrane = 4.0 * m_hat * m_hat * (l + 1.0) / ((l + 2.0) * k2 * k2);
    let bending = h * h * (l + 2.0) * k2 * k2 / (12.0 * m_hat * m_hat);
    (membrane, bending)
}

/// λ̂*(h; m, n) = μ [4m̂²(Λ+1)/((Λ+2)(n²+m̂²)²) + h²(Λ+2)(m̂²+n²)²/(12m̂²)].
pub fn lambda_star(geometry: &ShellGeometry, material: &Material, wn: &WaveNumbers) -> Result<f64> {
    if wn.m_hat == 0.0 {
        return Err(Error::DivisionByZero("λ̂* needs m ≥ 1".into()));
    }
    let (a, b) = load_terms(geometry.h, material.big_lambda, wn.m_hat, wn.n as f64);
    Ok(material.mu * (a + b))
}

/// The continuum minimum 2μh√((Λ+1)/3).
pub fn classical_load(geometry: &ShellGeometry, material: &Material) -> f64 {
    2.0 * material.mu * geometry.h * ((material.big_lambda + 1.0) / 3.0).sqrt()
}

/// Relative defect of h(Λ+2)(n²+m̂²)² = 4m̂²√(3(Λ+1)).
pub fn circle_residual(h: f64, big_lambda: f64, m_hat: f64, n: f64) -> f64 {
    let k2 = n * n + m_hat * m_hat;
    let rhs = 4.0 * m_hat * m_hat * (3.0 * (big_lambda + 1.0)).sqrt();
    (h * (big_lambda + 2.0) * k2 * k2 - rhs).abs() / rhs
}

fn circle_scale(h: f64, big_lambda: f64) -> f64 {
    (3.0 * (big_lambda + 1.0)).powf(0.25) / (h * (big_lambda + 2.0)).sqrt()
}

/// M(h): the largest axial index that meets the Koiter circle.
pub fn max_axial_index(geometry: &ShellGeometry, big_lambda: f64) -> u32 {
    (2.0 * geometry.l / PI * circle_scale(geometry.h, big_lambda)).floor() as u32
}

/// n(m) = floor √(2m̂ (3(Λ+1))^{1/4} / √(h(Λ+2)) − m̂²).
pub fn koiter_circle_n(m: u32, geometry: &ShellGeometry, big_lambda: f64) -> Result<u32> {
    let m_max = max_axial_index(geometry, big_lambda);
    let mh = geometry.m_hat(m);
    let radicand = 2.0 * mh * circle_scale(geometry.h, big_lambda) - mh * mh;
    if m == 0 || radicand < 0.0 {
        return Err(Error::OutOfCircle { m, m_max });
    }
    Ok(radicand.sqrt().floor() as u32)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchBounds {
    pub m_max: u32,
    pub n_max: u32,
}

pub fn default_bounds(geometry: &ShellGeometry, material: &Material) -> SearchBounds {
    let l = material.big_lambda;
    let m_max = 2 * max_axial_index(geometry, l).max(1);
    let c = 4.0 * (3.0 * (l + 1.0)).sqrt() / (geometry.h * (l + 2.0));
    let n_max = (2.0 * c.powf(0.25) * (m_max as f64).sqrt()).ceil() as u32;
    SearchBounds { m_max, n_max }
}

/// Amplitudes of a real mode
/// f_r = sin(m̂z)cos(nθ), f_θ = −c_θ sin(nθ) sin(m̂z), f_z = c_z cos(nθ) cos(m̂z),
/// i.e. complex amplitudes (1, i c_θ, c_z).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeCoefficients {
    pub wave: WaveNumbers,
    pub c_theta: f64,
    pub c_z: f64,
}

impl ModeCoefficients {
    pub fn amplitudes(&self) -> ModeAmplitudes {
        ModeAmplitudes::new(
            1.0.into(),
            Complex64::new(0.0, self.c_theta),
            self.c_z.into(),
        )
    }

    /// Exact minimizer of Q0 for these wavenumbers.
    pub fn optimal(wave: WaveNumbers, big_lambda: f64) -> Result<Self> {
        let (ft, fz) = optimal_tangential(1.0.into(), &wave, big_lambda)?;
        Ok(ModeCoefficients {
            wave,
            c_theta: ft.im,
            c_z: fz.re,
        })
    }

    /// The closed-form coefficients that use the circle identity.
    pub fn on_circle(wave: WaveNumbers, h: f64, big_lambda: f64) -> Self {
        let (mh, n) = (wave.m_hat, wave.n as f64);
        let l = big_lambda;
        let s = (3.0 * (l + 1.0)).sqrt();
        ModeCoefficients {
            wave,
            c_theta: h * n * ((3.0 * l + 4.0) * mh * mh + (l + 2.0) * n * n) / (4.0 * mh * mh * s),
            c_z: h * (l * mh * mh - (l + 2.0) * n * n) / (4.0 * mh * s),
        }
    }

    pub fn profile(&self) -> MidSurfaceProfile {
        let (mh, n) = (self.wave.m_hat, self.wave.n as f64);
        MidSurfaceProfile {
            fr: Arc::new(SeparableSurface::term(1.0, Factor::Cos(n), Factor::Sin(mh))),
            ftheta: Arc::new(SeparableSurface::term(
                -self.c_theta,
                Factor::Sin(n),
                Factor::Sin(mh),
            )),
            fz: Arc::new(SeparableSurface::term(
                self.c_z,
                Factor::Cos(n),
                Factor::Cos(mh),
            )),
        }
    }

    pub fn field(&self) -> LinearizedField {
        LinearizedField::new(self.profile(), BcTag::AverageTop)
    }

    /// K* computed from the reduced forms.
    pub fn kstar(&self, h: f64, material: &Material) -> f64 {
        let f = reduced_forms(&self.wave, &self.amplitudes(), material.big_lambda);
        material.mu * (f.q0 + h * h / 12.0 * f.q1star) / f.b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KoiterResult {
    pub lambda_hat: f64,
    pub m_star: u32,
    pub n_star: u32,
    pub circle_residual: f64,
    pub closed_form: f64,
    pub bounds: SearchBounds,
    pub mode: ModeCoefficients,
}

/// Integer minimization of λ̂*(h; m, n) over 1 ≤ m ≤ m_max, 0 ≤ n ≤ n_max.
/// Ties go to the smallest m, then the smallest n.
pub fn minimize_load(
    geometry: &ShellGeometry,
    material: &Material,
    bounds: Option<SearchBounds>,
) -> Result<KoiterResult> {
    let bounds = bounds.unwrap_or_else(|| default_bounds(geometry, material));
    if bounds.m_max < 1 {
        return Err(Error::Configuration(
            "empty search window: m_max < 1".into(),
        ));
    }
    let l = material.big_lambda;
    let per_m: Vec<(f64, u32)> = (1..=bounds.m_max)
        .into_par_iter()
        .map(|m| {
            let mh = geometry.m_hat(m);
            let mut best = (f64::INFINITY, 0);
            let mut consider = |n: u32| {
                let (a, b) = load_terms(geometry.h, l, mh, n as f64);
                let v = material.mu * (a + b);
                if v < best.0 || (v == best.0 && n < best.1) {
                    best = (v, n);
                }
            };
            for n in 0..=bounds.n_max {
                consider(n);
            }
            if let Ok(nm) = koiter_circle_n(m, geometry, l) {
                consider(nm + 1);
            }
            best
        })
        .collect();
    let mut best = (f64::INFINITY, 0, 0);
    for (k, (v, n)) in per_m.into_iter().enumerate() {
        if v < best.0 {
            best = (v, k as u32 + 1, n);
        }
    }
    let (lambda_hat, m_star, n_star) = best;
    let wave = WaveNumbers::new(m_star, n_star, geometry);
    Ok(KoiterResult {
        lambda_hat,
        m_star,
        n_star,
        circle_residual: circle_residual(geometry.h, l, wave.m_hat, n_star as f64),
        closed_form: classical_load(geometry, material),
        bounds,
        mode: ModeCoefficients::optimal(wave, l)?,
    })
}

/// The explicit buckling mode for axial index m with n = n(m), using the
/// closed-form coefficients that assume (m̂, n) on the circle.
pub fn buckling_mode(
    m: u32,
    geometry: &ShellGeometry,
    material: &Material,
) -> Result<(ModeCoefficients, LinearizedField)> {
    let l = material.big_lambda;
    let n = koiter_circle_n(m, geometry, l)?;
    let coef = ModeCoefficients::on_circle(WaveNumbers::new(m, n, geometry), geometry.h, l);
    Ok((coef, coef.field()))
}

/// The mode at (m, n(m)) with the tangential amplitudes that minimize Q0
/// exactly; its K* equals λ̂*(h; m, n(m)).
pub fn optimal_buckling_mode(
    m: u32,
    geometry: &ShellGeometry,
    material: &Material,
) -> Result<(ModeCoefficients, LinearizedField)> {
    let l = material.big_lambda;
    let n = koiter_circle_n(m, geometry, l)?;
    let coef = ModeCoefficients::optimal(WaveNumbers::new(m, n, geometry), l)?;
    Ok((coef, coef.field()))
}
