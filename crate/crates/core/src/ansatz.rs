//! The compressed-bump bending ansatz U^h, its limit identities, component
//! scalings and the compressiveness scaling under perfect and imperfect
//! prestress.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::quadrature::{gauss_legendre, QuadratureGrid, Rule};
use crate::fields::surface::poly_derivative;
use crate::fields::{
    functionals, integrate_pointwise, verify_bc, BcTag, DerivedSurface, LinearizedField, Measure,
    MidSurfaceProfile, SurfaceFunction,
};
use crate::material::{Material, ShellGeometry, StressWeight};
use crate::scaling::{fit_exponent, quartic_index, ScalingFit};

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// φ(η, z) = P(η − κ(z − L/2)) · Z(z) with P(s) = (1 − (s/η0)²)⁵ on
/// |s| < η0 and Z(z) = (z(L − z)/L²)⁵. κ = 0 is the separable bump.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BumpProfile {
    pub eta0: f64,
    pub l: f64,
    /// Shear κ of the support; zero for the product bump.
    pub shear: f64,
    pub amplitude: f64,
    #[serde(skip)]
    p: Vec<f64>,
    #[serde(skip)]
    zp: Vec<f64>,
}

impl BumpProfile {
    pub fn new(eta0: f64, l: f64) -> Result<Self> {
        if !(eta0 > 0.0 && eta0 < PI) {
            return Err(Error::domain("eta0", format!("{eta0} is not in (0, π)")));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::domain("L", format!("{l} is not positive")));
        }
        let mut p = vec![0.0; 11];
        let mut zp = vec![0.0; 11];
        for k in 0..=5u32 {
            let c = binomial(5, k) * if k % 2 == 0 { 1.0 } else { -1.0 };
            p[2 * k as usize] = c / eta0.powi(2 * k as i32);
            // (zL − z²)⁵ / L¹⁰
            zp[5 + k as usize] = c * l.powi(5 - k as i32) / l.powi(10);
        }
        Ok(BumpProfile {
            eta0,
            l,
            shear: 0.0,
            amplitude: 1.0,
            p,
            zp,
        })
    }

    /// Shears the support along z: the bump is centred at η = κ(z − L/2).
    pub fn with_shear(mut self, kappa: f64) -> Result<Self> {
        if self.eta0 + kappa.abs() * self.l / 2.0 >= PI {
            return Err(Error::domain(
                "shear",
                "sheared support does not fit in one period",
            ));
        }
        self.shear = kappa;
        Ok(self)
    }

    pub fn scaled(mut self, amplitude: f64) -> Self {
        self.amplitude *= amplitude;
        self
    }

    /// Largest |η| reached by the support.
    pub fn eta_extent(&self) -> f64 {
        self.eta0 + self.shear.abs() * self.l / 2.0
    }

    fn p_derivative(&self, k: u32, s: f64) -> f64 {
        if s.abs() >= self.eta0 {
            0.0
        } else {
            poly_derivative(&self.p, k, s)
        }
    }

    /// ∂η^i ∂z^j φ(η, z).
    pub fn partial(&self, i: u32, j: u32, eta: f64, z: f64) -> f64 {
        let xi = eta - self.shear * (z - self.l / 2.0);
        if xi.abs() >= self.eta0 {
            return 0.0;
        }
        let mut acc = 0.0;
        for k in 0..=j {
            let c = binomial(j, k) * (-self.shear).powi(k as i32);
            if c != 0.0 {
                acc += c * self.p_derivative(i + k, xi) * poly_derivative(&self.zp, j - k, z);
            }
        }
        self.amplitude * acc
    }

    /// Exact ∫∫ (∂η^i ∂z^j φ)² dη dz. In the sheared coordinates the integrand
    /// is a polynomial on a rectangle, so Gauss quadrature is exact.
    pub fn norm_sq(&self, i: u32, j: u32) -> f64 {
        let (x, w) = gauss_legendre(16);
        let mut acc = 0.0;
        for (xa, wa) in x.iter().zip(&w) {
            let xi = self.eta0 * xa;
            for (xb, wb) in x.iter().zip(&w) {
                let z = 0.5 * self.l * (xb + 1.0);
                let eta = xi + self.shear * (z - self.l / 2.0);
                acc += wa * wb * self.partial(i, j, eta, z).powi(2);
            }
        }
        acc * self.eta0 * 0.5 * self.l
    }

    /// ‖φ_ηηη‖²
    pub fn gradient_limit(&self) -> f64 {
        self.norm_sq(3, 0)
    }

    /// ‖φ_zz‖² + ‖φ_ηηηη‖²/12
    pub fn strain_limit(&self) -> f64 {
        self.norm_sq(0, 2) + self.norm_sq(4, 0) / 12.0
    }
}

/// φ^h(θ, z) = φ(n θ, z) for θ in (−π, π], extended periodically.
struct CompressedBump {
    bump: BumpProfile,
    n: f64,
}

impl SurfaceFunction for CompressedBump {
    fn partial(&self, i: u32, j: u32, theta: f64, z: f64) -> f64 {
        let t = theta - 2.0 * PI * ((theta + PI) / (2.0 * PI)).floor();
        let t = if t > PI { t - 2.0 * PI } else { t };
        self.n.powi(i as i32) * self.bump.partial(i, j, self.n * t, z)
    }

    fn max_order(&self) -> u32 {
        4
    }
}

#[derive(Clone)]
pub struct AnsatzField {
    pub h: f64,
    pub n_h: u32,
    pub bump: BumpProfile,
    /// U(f) with f = (−φ^h_θθ, φ^h_θ, −φ^h_z).
    pub field: LinearizedField,
}

pub fn build_ansatz(h: f64, bump: &BumpProfile, geometry: &ShellGeometry) -> Result<AnsatzField> {
    if (bump.l - geometry.l).abs() > 1e-12 * geometry.l {
        return Err(Error::domain(
            "bump",
            "bump length differs from the shell length",
        ));
    }
    let n_h = quartic_index(h);
    if n_h == 0 {
        return Err(Error::domain("h", format!("{h} gives n_h = 0")));
    }
    let base: Arc<dyn SurfaceFunction> = Arc::new(CompressedBump {
        bump: bump.clone(),
        n: n_h as f64,
    });
    let derived = |d_theta, d_z, coef| -> Arc<dyn SurfaceFunction> {
        Arc::new(DerivedSurface {
            base: base.clone(),
            d_theta,
            d_z,
            coef,
        })
    };
    let profile = MidSurfaceProfile {
        fr: derived(2, 0, -1.0),
        ftheta: derived(1, 0, 1.0),
        fz: derived(0, 1, -1.0),
    };
    Ok(AnsatzField {
        h,
        n_h,
        bump: bump.clone(),
        field: LinearizedField::new(profile, BcTag::FixedBottom),
    })
}

impl AnsatzField {
    /// Half-width of the θ-support.
    pub fn theta_support(&self) -> f64 {
        self.bump.eta_extent() / self.n_h as f64
    }

    /// Composite Gauss grid on the support, at least 64 n_h nodes in θ.
    /// `refine` multiplies the panel counts in θ and z.
    pub fn grid(&self, geometry: &ShellGeometry, refine: usize) -> QuadratureGrid {
        let w = self.theta_support();
        let (r0, r1) = geometry.radial_interval();
        QuadratureGrid {
            r: Rule::gauss(r0, r1, 4),
            theta: Rule::composite_gauss(-w, w, 8 * self.n_h as usize * refine, 8),
            z: Rule::composite_gauss(0.0, geometry.l, 24 * refine, 8),
            measure: Measure::Volume,
        }
    }

    pub fn verify_bc(&self, geometry: &ShellGeometry) -> Result<()> {
        verify_bc(&self.field, geometry, BcTag::FixedBottom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitRow {
    pub h: f64,
    pub n_h: u32,
    /// h^{1/4} ‖∇U^h‖²
    pub gradient: f64,
    /// |gradient / ‖φ_ηηη‖² − 1|
    pub gradient_deviation: f64,
    /// |gradient / (2‖φ_ηηη‖²) − 1|; θr and rθ each carry ‖φ_ηηη‖².
    pub gradient_deviation_both: f64,
    /// h^{-5/4} ‖e(U^h)‖²
    pub strain: f64,
    pub strain_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitReport {
    pub gradient_target: f64,
    pub strain_target: f64,
    pub rows: Vec<LimitRow>,
}

impl LimitReport {
    fn monotone(&self, f: impl Fn(&LimitRow) -> f64) -> bool {
        self.rows.windows(2).all(|w| f(&w[1]) < f(&w[0]))
    }

    /// Strain deviations shrink along the list.
    pub fn strain_monotone(&self) -> bool {
        self.monotone(|r| r.strain_deviation)
    }

    pub fn gradient_monotone(&self) -> bool {
        self.monotone(|r| r.gradient_deviation)
    }
}

fn check_h_list(h_list: &[f64]) -> Result<()> {
    if h_list.is_empty() {
        return Err(Error::Arity { needed: 1, got: 0 });
    }
    for &h in h_list {
        if !(h > 0.0 && h < 1.0) {
            return Err(Error::domain("h", format!("{h} is not in (0, 1)")));
        }
    }
    Ok(())
}

/// Normalized ‖∇U^h‖² and ‖e(U^h)‖² against their h → 0 limits.
pub fn verify_limits(
    bump: &BumpProfile,
    h_list: &[f64],
    geometry: &ShellGeometry,
) -> Result<LimitReport> {
    check_h_list(h_list)?;
    let g_target = bump.gradient_limit();
    let e_target = bump.strain_limit();
    let rows: Vec<Result<LimitRow>> = h_list
        .par_iter()
        .map(|&h| {
            let geo = ShellGeometry::new(h, geometry.l)?;
            let a = build_ansatz(h, bump, &geo)?;
            let (g, e) = crate::fields::gradient_and_strain_norms(&a.field, &a.grid(&geo, 1))?;
            let gradient = h.powf(0.25) * g;
            let strain = h.powf(-1.25) * e;
            Ok(LimitRow {
                h,
                n_h: a.n_h,
                gradient,
                gradient_deviation: (gradient / g_target - 1.0).abs(),
                gradient_deviation_both: (gradient / (2.0 * g_target) - 1.0).abs(),
                strain,
                strain_deviation: (strain / e_target - 1.0).abs(),
            })
        })
        .collect();
    Ok(LimitReport {
        gradient_target: g_target,
        strain_target: e_target,
        rows: rows.into_iter().collect::<Result<_>>()?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingRow {
    pub h: f64,
    pub value: f64,
    /// value · h^{−predicted}
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantityScaling {
    pub name: String,
    pub predicted: f64,
    pub rows: Vec<ScalingRow>,
    /// h values left out of the fit, with the reason.
    pub excluded: Vec<(f64, String)>,
    pub fit: Option<ScalingFit>,
}

impl QuantityScaling {
    fn from_values(
        name: &str,
        predicted: f64,
        values: Vec<(f64, f64)>,
        excluded: Vec<(f64, String)>,
    ) -> Self {
        let rows: Vec<ScalingRow> = values
            .iter()
            .map(|&(h, value)| ScalingRow {
                h,
                value,
                normalized: value * h.powf(-predicted),
            })
            .collect();
        let fit = fit_exponent(&values).ok();
        QuantityScaling {
            name: name.to_string(),
            predicted,
            rows,
            excluded,
            fit,
        }
    }

    pub fn exponent(&self) -> Option<f64> {
        self.fit.map(|f| f.exponent)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub quantities: Vec<QuantityScaling>,
}

impl ScalingReport {
    pub fn get(&self, name: &str) -> Option<&QuantityScaling> {
        self.quantities.iter().find(|q| q.name == name)
    }
}

/// Component groups of ∇U^h with their absolute rates in h.
pub const ANSATZ_GROUPS: [(&str, f64); 5] = [
    ("thr-rth", -0.25),
    ("zr-rz", 0.25),
    ("thz-zth", 0.75),
    ("thth-zz", 1.25),
    ("ur", 0.25),
];

pub fn component_scalings(
    bump: &BumpProfile,
    h_list: &[f64],
    geometry: &ShellGeometry,
) -> Result<ScalingReport> {
    check_h_list(h_list)?;
    let per_h: Vec<Result<[f64; 5]>> = h_list
        .par_iter()
        .map(|&h| {
            let geo = ShellGeometry::new(h, geometry.l)?;
            let a = build_ansatz(h, bump, &geo)?;
            // rows/columns ordered (r, θ, z); entry [α][β] is (∇U)_{αβ}
            integrate_pointwise(&a.field, &a.grid(&geo, 1), |q| {
                let g = &q.grad;
                [
                    g[1][0].powi(2) + g[0][1].powi(2),
                    g[2][0].powi(2) + g[0][2].powi(2),
                    g[1][2].powi(2) + g[2][1].powi(2),
                    g[1][1].powi(2) + g[2][2].powi(2),
                    q.u[0].powi(2),
                ]
            })
        })
        .collect();
    let per_h: Vec<[f64; 5]> = per_h.into_iter().collect::<Result<_>>()?;
    let quantities = ANSATZ_GROUPS
        .iter()
        .enumerate()
        .map(|(k, (name, p))| {
            let values = h_list.iter().zip(&per_h).map(|(&h, v)| (h, v[k])).collect();
            QuantityScaling::from_values(name, *p, values, vec![])
        })
        .collect();
    Ok(ScalingReport { quantities })
}

/// Rate of S_h/C_h expected for each stress weight.
pub fn predicted_load_exponent(stress: &StressWeight) -> f64 {
    match stress {
        StressWeight::Perfect => 1.0,
        StressWeight::ShearImperfection { .. } => 1.25,
        StressWeight::HoopImperfection { .. } => 1.5,
    }
}

/// S_h(U^h)/C_h(U^h) across h. Points with C_h ≤ 0 are excluded from the fit
/// and listed in the report.
pub fn compressiveness_scaling(
    bump: &BumpProfile,
    h_list: &[f64],
    geometry: &ShellGeometry,
    material: &Material,
    stress: &StressWeight,
) -> Result<ScalingReport> {
    check_h_list(h_list)?;
    let per_h: Vec<Result<(f64, f64, f64)>> = h_list
        .par_iter()
        .map(|&h| {
            let geo = ShellGeometry::new(h, geometry.l)?;
            let a = build_ansatz(h, bump, &geo)?;
            let v = functionals(&a.field, stress, material, &a.grid(&geo, 1))?;
            Ok((h, v.s, v.c))
        })
        .collect();
    let mut values = vec![];
    let mut excluded = vec![];
    let mut s_vals = vec![];
    let mut c_vals = vec![];
    for r in per_h {
        let (h, s, c) = r?;
        s_vals.push((h, s));
        c_vals.push((h, c.abs()));
        if c > 0.0 {
            values.push((h, s / c));
        } else {
            excluded.push((h, format!("C = {c:e} is not positive")));
        }
    }
    let p = predicted_load_exponent(stress);
    Ok(ScalingReport {
        quantities: vec![
            QuantityScaling::from_values("S/C", p, values, excluded),
            QuantityScaling::from_values("S", 1.25, s_vals, vec![]),
            QuantityScaling::from_values("|C|", 1.25 - p, c_vals, vec![]),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Component, DisplacementField, Point};
    use approx::assert_relative_eq;

    fn bump() -> BumpProfile {
        BumpProfile::new(1.5, PI).unwrap()
    }

    #[test]
    fn bump_derivatives_match_differences() {
        let b = bump().with_shear(-0.4).unwrap();
        let (eta, z, d) = (0.3, 1.1, 1e-5);
        for (i, j) in [(0, 0), (1, 0), (2, 1), (0, 2), (3, 0)] {
            let fd_eta = (b.partial(i, j, eta + d, z) - b.partial(i, j, eta - d, z)) / (2.0 * d);
            assert_relative_eq!(b.partial(i + 1, j, eta, z), fd_eta, max_relative = 1e-6);
            let fd_z = (b.partial(i, j, eta, z + d) - b.partial(i, j, eta, z - d)) / (2.0 * d);
            assert_relative_eq!(b.partial(i, j + 1, eta, z), fd_z, max_relative = 1e-6);
        }
    }

    #[test]
    fn bump_vanishes_outside_support() {
        let b = bump();
        assert_eq!(b.partial(0, 0, 1.6, 1.0), 0.0);
        assert_eq!(b.partial(2, 0, -1.5, 1.0), 0.0);
        // derivatives through order 4 vanish continuously at the edge
        assert!(b.partial(4, 0, 1.5 - 1e-6, 1.0).abs() < 1e-4);
        assert_relative_eq!(
            b.partial(0, 0, 0.0, PI / 2.0),
            1.0 / 1024.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn trace_at_mid_surface() {
        let b = bump();
        let g = ShellGeometry::new(1e-4, PI).unwrap();
        let a = build_ansatz(1e-4, &b, &g).unwrap();
        assert_eq!(a.n_h, 10);
        assert_relative_eq!(a.theta_support(), 0.15, epsilon = 1e-15);
        for (t, z) in [(0.02, 0.7), (-0.1, 2.0)] {
            let p = Point {
                r: 1.0,
                theta: t,
                z,
            };
            assert_relative_eq!(
                a.field.value(Component::R, p),
                -100.0 * b.partial(2, 0, 10.0 * t, z),
                max_relative = 1e-12
            );
            assert_relative_eq!(
                a.field.value(Component::Theta, p),
                10.0 * b.partial(1, 0, 10.0 * t, z),
                max_relative = 1e-12
            );
            assert_relative_eq!(
                a.field.value(Component::Z, p),
                -b.partial(0, 1, 10.0 * t, z),
                max_relative = 1e-12
            );
        }
        a.verify_bc(&g).unwrap();
    }

    #[test]
    fn zero_bump_gives_zero_field() {
        let b = bump().scaled(0.0);
        let g = ShellGeometry::new(1.0 / 81.0, PI).unwrap();
        let a = build_ansatz(g.h, &b, &g).unwrap();
        let (gr, e) = crate::fields::gradient_and_strain_norms(&a.field, &a.grid(&g, 1)).unwrap();
        assert_eq!((gr, e), (0.0, 0.0));
    }

    #[test]
    fn empty_h_list_rejected() {
        let g = ShellGeometry::new(1e-3, PI).unwrap();
        assert!(matches!(
            verify_limits(&bump(), &[], &g),
            Err(Error::Arity { .. })
        ));
    }

    #[test]
    fn shear_preserves_eta_norms() {
        let b = bump();
        let s = bump().with_shear(-1.0).unwrap();
        assert_relative_eq!(b.gradient_limit(), s.gradient_limit(), max_relative = 1e-12);
        assert!(s.norm_sq(0, 2) > b.norm_sq(0, 2));
        assert!(BumpProfile::new(3.0, PI).unwrap().with_shear(1.0).is_err());
    }
}
