//! Korn-type inequalities on the flattened strip [0, h] × [0, L]: modified
//! gradients, explicit-constant inequalities, the harmonic lemma and the
//! harmonic projection.

mod harmonic;
mod trials;

pub use harmonic::{
    extremal_equality_error, harmonic_lemma_check, harmonic_projection, mainest_check, phi_tau,
    psi, HarmonicLemmaReport, HarmonicSolution, MainestReport, SineHarmonic,
};
pub use trials::{
    near_isometry, periodic_near_isometry, random_periodic_field, random_strip_field, run_trials,
    trial_rng, RectKornConfig, RectKornReport, TrialCounts, PERIODIC_C0, PERIODIC_SIGMA,
};

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::quadrature::Rule;
use crate::fields::Factor;

pub type Mat2 = [[f64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PlanarBc {
    /// u = 0 at y ∈ {0, L}.
    ZeroHorizontal,
    /// u = v = 0 at y ∈ {0, L}.
    ZeroBoth,
    /// (u, v) 2π-periodic in y.
    PeriodicY,
    None,
}

/// coef · X(x) · Y(y).
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarTerm {
    pub coef: f64,
    pub x: Factor,
    pub y: Factor,
}

impl PlanarTerm {
    pub fn new(coef: f64, x: Factor, y: Factor) -> Self {
        PlanarTerm { coef, x, y }
    }

    /// coef · p(x) · Y(y) with p given by its coefficients.
    pub fn poly(coef: f64, p: Vec<f64>, y: Factor) -> Self {
        Self::new(coef, Factor::Poly(p), y)
    }

    fn eval(&self, i: u32, j: u32, x: f64, y: f64) -> f64 {
        self.coef * self.x.eval(i, x) * self.y.eval(j, y)
    }
}

/// (u, v) on the strip as finite sums of separable terms.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarField {
    pub u: Vec<PlanarTerm>,
    pub v: Vec<PlanarTerm>,
    pub bc: PlanarBc,
}

/// (value, ∂x, ∂y)
pub type Jet = [f64; 3];

fn jet(terms: &[PlanarTerm], x: f64, y: f64) -> Jet {
    let mut out = [0.0; 3];
    for t in terms {
        out[0] += t.eval(0, 0, x, y);
        out[1] += t.eval(1, 0, x, y);
        out[2] += t.eval(0, 1, x, y);
    }
    out
}

impl PlanarField {
    pub fn new(u: Vec<PlanarTerm>, v: Vec<PlanarTerm>, bc: PlanarBc) -> Self {
        PlanarField { u, v, bc }
    }

    pub fn zero(bc: PlanarBc) -> Self {
        Self::new(vec![], vec![], bc)
    }

    pub fn u(&self, x: f64, y: f64) -> Jet {
        jet(&self.u, x, y)
    }

    pub fn v(&self, x: f64, y: f64) -> Jet {
        jet(&self.v, x, y)
    }

    /// Sum of two fields; the tag of `self` is kept.
    pub fn plus(mut self, other: &PlanarField, scale: f64) -> Self {
        let sc = |t: &PlanarTerm| PlanarTerm::new(scale * t.coef, t.x.clone(), t.y.clone());
        self.u.extend(other.u.iter().map(sc));
        self.v.extend(other.v.iter().map(sc));
        self
    }

    /// Samples the tagged boundary conditions at 64 points per edge.
    pub fn verify_bc(&self, h: f64, l: f64) -> Result<()> {
        let tol = 1e-10 * (1.0 + self.scale(h, l));
        for k in 0..64 {
            let x = h * k as f64 / 63.0;
            let bad = match self.bc {
                PlanarBc::None => None,
                PlanarBc::ZeroHorizontal => [0.0, l]
                    .into_iter()
                    .map(|y| self.u(x, y)[0].abs())
                    .find(|d| *d > tol),
                PlanarBc::ZeroBoth => [0.0, l]
                    .into_iter()
                    .map(|y| self.u(x, y)[0].abs().max(self.v(x, y)[0].abs()))
                    .find(|d| *d > tol),
                PlanarBc::PeriodicY => {
                    let p = 2.0 * PI;
                    let d = (0..3)
                        .map(|c| {
                            (self.u(x, 0.0)[c] - self.u(x, p)[c])
                                .abs()
                                .max((self.v(x, 0.0)[c] - self.v(x, p)[c]).abs())
                        })
                        .fold(0.0, f64::max);
                    (d > tol).then_some(d)
                }
            };
            if let Some(d) = bad {
                return Err(Error::Precondition(format!(
                    "boundary condition {:?} violated by {d:e} at x = {x}",
                    self.bc
                )));
            }
        }
        Ok(())
    }

    fn scale(&self, h: f64, l: f64) -> f64 {
        let mut s: f64 = 0.0;
        for k in 0..8 {
            let (x, y) = (h * k as f64 / 7.0, l * (k as f64 + 0.5) / 8.0);
            s = s.max(self.u(x, y)[0].abs()).max(self.v(x, y)[0].abs());
        }
        s
    }
}

/// G_α = [[u_x, u_y], [v_x, v_y + αu]].
pub fn g_alpha(u: &Jet, v: &Jet, alpha: f64) -> Mat2 {
    [[u[1], u[2]], [v[1], v[2] + alpha * u[0]]]
}

/// G_* = [[u_x, u_y − v], [v_x, v_y + u]].
pub fn g_star(u: &Jet, v: &Jet) -> Mat2 {
    [[u[1], u[2] - v[0]], [v[1], v[2] + u[0]]]
}

pub fn sym2(g: &Mat2) -> Mat2 {
    let off = 0.5 * (g[0][1] + g[1][0]);
    [[g[0][0], off], [off, g[1][1]]]
}

fn frob(g: &Mat2) -> f64 {
    g[0][0].powi(2) + g[0][1].powi(2) + g[1][0].powi(2) + g[1][1].powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum GradientKind {
    Alpha(f64),
    Star,
}

/// The modified gradient and its symmetric part at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModifiedGradients {
    pub g: Mat2,
    pub e: Mat2,
}

impl ModifiedGradients {
    pub fn at(field: &PlanarField, kind: GradientKind, x: f64, y: f64) -> Self {
        let (u, v) = (field.u(x, y), field.v(x, y));
        let g = match kind {
            GradientKind::Alpha(a) => g_alpha(&u, &v, a),
            GradientKind::Star => g_star(&u, &v),
        };
        ModifiedGradients { g, e: sym2(&g) }
    }
}

/// L² norms over the strip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlanarNorms {
    /// ‖G‖²
    pub g_sq: f64,
    /// ‖e‖
    pub e: f64,
    /// ‖u‖
    pub u: f64,
    /// ‖v‖
    pub v: f64,
}

/// Gauss quadrature over [0, h] × [0, l]: 12 nodes in x, 16 panels of 12
/// nodes in y.
pub fn planar_norms(field: &PlanarField, kind: GradientKind, h: f64, l: f64) -> PlanarNorms {
    let rx = Rule::gauss(0.0, h, 12);
    let ry = Rule::composite_gauss(0.0, l, 16, 12);
    let mut acc = [0.0; 4];
    for (x, wx) in rx.nodes.iter().zip(&rx.weights) {
        for (y, wy) in ry.nodes.iter().zip(&ry.weights) {
            let (u, v) = (field.u(*x, *y), field.v(*x, *y));
            let g = match kind {
                GradientKind::Alpha(a) => g_alpha(&u, &v, a),
                GradientKind::Star => g_star(&u, &v),
            };
            let w = wx * wy;
            acc[0] += w * frob(&g);
            acc[1] += w * frob(&sym2(&g));
            acc[2] += w * u[0] * u[0];
            acc[3] += w * v[0] * v[0];
        }
    }
    PlanarNorms {
        g_sq: acc[0],
        e: acc[1].sqrt(),
        u: acc[2].sqrt(),
        v: acc[3].sqrt(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// (rhs − lhs) / rhs, or 0 when both sides vanish.
    pub margin: f64,
    pub holds: bool,
}

impl InequalityCheck {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        let holds = lhs <= rhs * (1.0 + 1e-12) + 1e-300;
        let margin = if rhs > 0.0 { (rhs - lhs) / rhs } else { 0.0 };
        InequalityCheck {
            lhs,
            rhs,
            margin,
            holds,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BasicInequalityReport {
    pub alpha: f64,
    pub h: f64,
    pub norms: PlanarNorms,
    /// ‖G_α‖² ≤ 100 ‖e_α‖ (‖u‖/h + ‖e_α‖)
    pub hundred: InequalityCheck,
    /// ‖G_α‖² ≤ 99 ‖e_α‖² + (57/h) ‖u‖ ‖e_α‖
    pub rounded: InequalityCheck,
}

fn check_alpha_h(alpha: f64, h: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&alpha) {
        return Err(Error::domain("alpha", format!("{alpha} is not in [−1, 1]")));
    }
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::domain("h", format!("{h} is not in (0, 1)")));
    }
    Ok(())
}

pub fn check_basic_inequality(
    field: &PlanarField,
    alpha: f64,
    h: f64,
    l: f64,
) -> Result<BasicInequalityReport> {
    check_alpha_h(alpha, h)?;
    if !(l > 0.0) {
        return Err(Error::domain("L", format!("{l} is not positive")));
    }
    if !matches!(field.bc, PlanarBc::ZeroHorizontal | PlanarBc::ZeroBoth) {
        return Err(Error::Precondition(
            "u must vanish on the horizontal sides".into(),
        ));
    }
    field.verify_bc(h, l)?;
    let n = planar_norms(field, GradientKind::Alpha(alpha), h, l);
    Ok(BasicInequalityReport {
        alpha,
        h,
        norms: n,
        hundred: InequalityCheck::new(n.g_sq, 100.0 * n.e * (n.u / h + n.e)),
        rounded: InequalityCheck::new(n.g_sq, 99.0 * n.e * n.e + 57.0 / h * n.u * n.e),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeriodicReport {
    pub alpha: f64,
    pub h: f64,
    pub c0: f64,
    /// ‖G_α‖² / (‖e_α‖(‖u‖/h + ‖e_α‖))
    pub alpha_ratio: f64,
    /// ‖G_*‖² / (‖e_*‖² + ‖e_*‖‖u‖/h + ‖v‖²)
    pub star_ratio: f64,
    pub alpha_check: InequalityCheck,
    pub star_check: InequalityCheck,
}

fn ratio(lhs: f64, bracket: f64) -> f64 {
    if bracket > 0.0 {
        lhs / bracket
    } else if lhs > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// Periodic-in-y inequalities on [0, h] × [0, 2π] with constant C₀; the
/// starred form additionally needs h < σ.
pub fn check_periodic_inequalities(
    field: &PlanarField,
    alpha: f64,
    h: f64,
    c0: f64,
    sigma: f64,
) -> Result<PeriodicReport> {
    check_alpha_h(alpha, h)?;
    if field.bc != PlanarBc::PeriodicY {
        return Err(Error::Precondition(
            "field is not tagged periodic in y".into(),
        ));
    }
    if !(h < sigma) {
        return Err(Error::Precondition(format!(
            "h = {h} is not below σ = {sigma}"
        )));
    }
    let l = 2.0 * PI;
    field.verify_bc(h, l)?;
    let a = planar_norms(field, GradientKind::Alpha(alpha), h, l);
    let s = planar_norms(field, GradientKind::Star, h, l);
    let a_bracket = a.e * (a.u / h + a.e);
    let s_bracket = s.e * s.e + s.e * s.u / h + s.v * s.v;
    Ok(PeriodicReport {
        alpha,
        h,
        c0,
        alpha_ratio: ratio(a.g_sq, a_bracket),
        star_ratio: ratio(s.g_sq, s_bracket),
        alpha_check: InequalityCheck::new(a.g_sq, c0 * a_bracket),
        star_check: InequalityCheck::new(s.g_sq, c0 * s_bracket),
    })
}
