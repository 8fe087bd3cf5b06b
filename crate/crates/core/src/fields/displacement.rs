use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use super::quadrature::Rule;
use super::surface::{poly_derivative, Factor, SurfaceFunction};
use super::Point;
use crate::error::{Error, Result};
use crate::material::ShellGeometry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Component {
    R = 0,
    Theta = 1,
    Z = 2,
}

impl Component {
    pub const ALL: [Component; 3] = [Component::R, Component::Theta, Component::Z];
}

/// Which boundary conditions a field claims to satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BcTag {
    /// u_r = u_θ = 0 on both ends, zero mean of u_z on the bottom.
    AverageTop,
    /// u = 0 on the bottom, u_r = u_θ = 0 on the top.
    FixedBottom,
    None,
}

/// A displacement in cylindrical components with analytic partials.
pub trait DisplacementField: Send + Sync {
    /// Highest total derivative order the field can evaluate.
    fn max_order(&self) -> u32;

    /// ∂r^a ∂θ^b ∂z^c of one component, order [a, b, c]; unchecked.
    fn eval_partial(&self, c: Component, order: [u32; 3], p: Point) -> f64;

    fn bc_tag(&self) -> BcTag {
        BcTag::None
    }

    /// The mid-surface profile f when the field is U(f).
    fn mid_surface(&self) -> Option<&MidSurfaceProfile> {
        None
    }

    fn partial(&self, c: Component, order: [u32; 3], p: Point) -> Result<f64> {
        let required = order.iter().sum();
        if required > self.max_order() {
            return Err(Error::Capability {
                required,
                available: self.max_order(),
            });
        }
        Ok(self.eval_partial(c, order, p))
    }

    fn value(&self, c: Component, p: Point) -> f64 {
        self.eval_partial(c, [0, 0, 0], p)
    }
}

/// coef · R(r) · Θ(θ) · Z(z) with R a polynomial in r.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldTerm {
    pub coef: f64,
    pub r: Vec<f64>,
    pub theta: Factor,
    pub z: Factor,
}

impl FieldTerm {
    pub fn new(coef: f64, r: Vec<f64>, theta: Factor, z: Factor) -> Self {
        FieldTerm { coef, r, theta, z }
    }
}

/// Sum of separable terms per component; derivatives of every order exist.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableField {
    pub terms: [Vec<FieldTerm>; 3],
    pub bc: BcTag,
}

impl SeparableField {
    pub fn new(ur: Vec<FieldTerm>, ut: Vec<FieldTerm>, uz: Vec<FieldTerm>) -> Self {
        SeparableField {
            terms: [ur, ut, uz],
            bc: BcTag::None,
        }
    }

    pub fn with_bc(mut self, bc: BcTag) -> Self {
        self.bc = bc;
        self
    }

    pub fn zero() -> Self {
        Self::new(vec![], vec![], vec![])
    }
}

impl DisplacementField for SeparableField {
    fn max_order(&self) -> u32 {
        u32::MAX
    }

    fn eval_partial(&self, c: Component, order: [u32; 3], p: Point) -> f64 {
        self.terms[c as usize]
            .iter()
            .map(|t| {
                t.coef
                    * poly_derivative(&t.r, order[0], p.r)
                    * t.theta.eval(order[1], p.theta)
                    * t.z.eval(order[2], p.z)
            })
            .sum()
    }

    fn bc_tag(&self) -> BcTag {
        self.bc
    }
}

/// Mid-surface data f = (f_r, f_θ, f_z).
#[derive(Clone)]
pub struct MidSurfaceProfile {
    pub fr: Arc<dyn SurfaceFunction>,
    pub ftheta: Arc<dyn SurfaceFunction>,
    pub fz: Arc<dyn SurfaceFunction>,
}

/// The field U(f), affine in r − 1:
/// u_r = f_r, u_θ = r f_θ − (r−1) f_{r,θ}, u_z = f_z − (r−1) f_{r,z}.
#[derive(Clone)]
pub struct LinearizedField {
    pub profile: MidSurfaceProfile,
    pub bc: BcTag,
}

impl LinearizedField {
    pub fn new(profile: MidSurfaceProfile, bc: BcTag) -> Self {
        LinearizedField { profile, bc }
    }
}

impl DisplacementField for LinearizedField {
    fn max_order(&self) -> u32 {
        let f = &self.profile;
        f.ftheta
            .max_order()
            .min(f.fz.max_order())
            .min(f.fr.max_order().saturating_sub(1))
    }

    fn eval_partial(&self, c: Component, order: [u32; 3], p: Point) -> f64 {
        let [a, i, j] = order;
        let f = &self.profile;
        let (t, z) = (p.theta, p.z);
        let d = p.r - 1.0;
        match (c, a) {
            (Component::R, 0) => f.fr.partial(i, j, t, z),
            (Component::Theta, 0) => {
                p.r * f.ftheta.partial(i, j, t, z) - d * f.fr.partial(i + 1, j, t, z)
            }
            (Component::Theta, 1) => f.ftheta.partial(i, j, t, z) - f.fr.partial(i + 1, j, t, z),
            (Component::Z, 0) => f.fz.partial(i, j, t, z) - d * f.fr.partial(i, j + 1, t, z),
            (Component::Z, 1) => -f.fr.partial(i, j + 1, t, z),
            _ => 0.0,
        }
    }

    fn bc_tag(&self) -> BcTag {
        self.bc
    }

    fn mid_surface(&self) -> Option<&MidSurfaceProfile> {
        Some(&self.profile)
    }
}

struct RadialAverage {
    field: Arc<dyn DisplacementField>,
    rule: Rule,
    h: f64,
}

impl SurfaceFunction for RadialAverage {
    fn partial(&self, i: u32, j: u32, theta: f64, z: f64) -> f64 {
        self.rule.integrate(|r| {
            self.field
                .eval_partial(Component::R, [0, i, j], Point { r, theta, z })
        }) / self.h
    }

    fn max_order(&self) -> u32 {
        self.field.max_order()
    }
}

struct MidTrace {
    field: Arc<dyn DisplacementField>,
    component: Component,
}

impl SurfaceFunction for MidTrace {
    fn partial(&self, i: u32, j: u32, theta: f64, z: f64) -> f64 {
        self.field
            .eval_partial(self.component, [0, i, j], Point { r: 1.0, theta, z })
    }

    fn max_order(&self) -> u32 {
        self.field.max_order()
    }
}

/// The linearization L(u): radial average of u_r, mid-surface traces of u_θ
/// and u_z, assembled into U(f). The radial average uses a 12-point Gauss rule,
/// exact for polynomial dependence on r up to degree 23.
pub fn linearize_radial(
    field: Arc<dyn DisplacementField>,
    geometry: &ShellGeometry,
) -> LinearizedField {
    if let Some(profile) = field.mid_surface() {
        return LinearizedField::new(profile.clone(), field.bc_tag());
    }
    let (r0, r1) = geometry.radial_interval();
    let profile = MidSurfaceProfile {
        fr: Arc::new(RadialAverage {
            field: field.clone(),
            rule: Rule::gauss(r0, r1, 12),
            h: geometry.h,
        }),
        ftheta: Arc::new(MidTrace {
            field: field.clone(),
            component: Component::Theta,
        }),
        fz: Arc::new(MidTrace {
            field: field.clone(),
            component: Component::Z,
        }),
    };
    LinearizedField::new(profile, field.bc_tag())
}

/// Samples the boundary conditions of `tag` at 64 points per edge.
pub fn verify_bc(
    field: &dyn DisplacementField,
    geometry: &ShellGeometry,
    tag: BcTag,
) -> Result<()> {
    if tag == BcTag::None {
        return Ok(());
    }
    let (r0, r1) = geometry.radial_interval();
    let samples: Vec<(f64, f64)> = (0..64)
        .map(|k| {
            let s = (k as f64 + 0.5) / 64.0;
            (r0 + (r1 - r0) * ((7.0 * s) % 1.0), 2.0 * PI * s)
        })
        .collect();
    let scale = samples
        .iter()
        .flat_map(|&(r, theta)| {
            Component::ALL.into_iter().map(move |c| {
                field
                    .value(
                        c,
                        Point {
                            r,
                            theta,
                            z: 0.5 * geometry.l,
                        },
                    )
                    .abs()
            })
        })
        .fold(1.0, f64::max);
    let tol = 1e-10 * scale;
    let mut zero_on = vec![
        (Component::R, 0.0),
        (Component::Theta, 0.0),
        (Component::R, geometry.l),
        (Component::Theta, geometry.l),
    ];
    if tag == BcTag::FixedBottom {
        zero_on.push((Component::Z, 0.0));
    }
    for (c, z) in zero_on {
        for &(r, theta) in &samples {
            let v = field.value(c, Point { r, theta, z });
            if v.abs() > tol {
                return Err(Error::Validation(format!(
                    "{tag:?} violated: u_{c:?} = {v:e} at (r, θ, z) = ({r}, {theta}, {z})"
                )));
            }
        }
    }
    if tag == BcTag::AverageTop {
        let rr = Rule::gauss(r0, r1, 8);
        let rt = Rule::periodic(256);
        let mean = rr.integrate(|r| {
            rt.integrate(|theta| field.value(Component::Z, Point { r, theta, z: 0.0 }))
        });
        if mean.abs() > tol * geometry.h * 2.0 * PI {
            return Err(Error::Validation(format!(
                "bottom mean of u_z is {mean:e}, not zero"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::surface::SeparableSurface;
    use approx::assert_relative_eq;

    fn sample_points() -> Vec<Point> {
        vec![
            Point {
                r: 0.95,
                theta: 0.3,
                z: 0.4,
            },
            Point {
                r: 1.0,
                theta: 2.0,
                z: 1.7,
            },
            Point {
                r: 1.04,
                theta: 5.5,
                z: 2.9,
            },
        ]
    }

    #[test]
    fn linearized_fixed_point() {
        let g = ShellGeometry::new(0.1, 3.0).unwrap();
        let f = MidSurfaceProfile {
            fr: Arc::new(SeparableSurface::term(
                1.0,
                Factor::Cos(3.0),
                Factor::Sin(1.2),
            )),
            ftheta: Arc::new(SeparableSurface::term(
                0.3,
                Factor::Sin(3.0),
                Factor::Sin(1.2),
            )),
            fz: Arc::new(SeparableSurface::term(
                -0.2,
                Factor::Cos(3.0),
                Factor::Cos(1.2),
            )),
        };
        let u: Arc<dyn DisplacementField> = Arc::new(LinearizedField::new(f, BcTag::AverageTop));
        let lu = linearize_radial(u.clone(), &g);
        for p in sample_points() {
            for c in Component::ALL {
                for order in [[0, 0, 0], [1, 0, 0], [0, 1, 1], [1, 2, 0]] {
                    let a = u.eval_partial(c, order, p);
                    let b = lu.eval_partial(c, order, p);
                    assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn linearize_separable_field() {
        let g = ShellGeometry::new(0.2, 3.0).unwrap();
        // u_r = (r−1) cos 2θ sin z has zero radial average
        let u = SeparableField::new(
            vec![FieldTerm::new(
                1.0,
                vec![-1.0, 1.0],
                Factor::Cos(2.0),
                Factor::Sin(1.0),
            )],
            vec![FieldTerm::new(
                1.0,
                vec![0.0, 0.0, 1.0],
                Factor::Sin(2.0),
                Factor::Sin(1.0),
            )],
            vec![],
        );
        let lu = linearize_radial(Arc::new(u), &g);
        for p in sample_points() {
            assert!(lu.value(Component::R, p).abs() < 1e-15);
            // u_θ(1) = sin 2θ sin z, so the linearization gives r sin 2θ sin z
            assert_relative_eq!(
                lu.value(Component::Theta, p),
                p.r * (2.0 * p.theta).sin() * p.z.sin(),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn radial_average_of_quadratic() {
        let g = ShellGeometry::new(0.3, 1.0).unwrap();
        let u = SeparableField::new(
            vec![FieldTerm::new(
                1.0,
                vec![0.0, 0.0, 1.0],
                Factor::one(),
                Factor::one(),
            )],
            vec![],
            vec![],
        );
        let lu = linearize_radial(Arc::new(u), &g);
        // mean of r² over [0.85, 1.15] is 1 + h²/12
        let v = lu.value(
            Component::R,
            Point {
                r: 1.0,
                theta: 0.0,
                z: 0.0,
            },
        );
        assert_relative_eq!(v, 1.0 + 0.09 / 12.0, max_relative = 1e-14);
    }

    #[test]
    fn capability_error() {
        let f = MidSurfaceProfile {
            fr: Arc::new(crate::fields::surface::DerivedSurface {
                base: Arc::new(SeparableSurface::zero()),
                d_theta: 0,
                d_z: 0,
                coef: 1.0,
            }),
            ftheta: Arc::new(SeparableSurface::zero()),
            fz: Arc::new(SeparableSurface::zero()),
        };
        struct Limited(LinearizedField);
        impl DisplacementField for Limited {
            fn max_order(&self) -> u32 {
                1
            }
            fn eval_partial(&self, c: Component, o: [u32; 3], p: Point) -> f64 {
                self.0.eval_partial(c, o, p)
            }
        }
        let u = Limited(LinearizedField::new(f, BcTag::None));
        let p = Point {
            r: 1.0,
            theta: 0.0,
            z: 0.0,
        };
        assert!(u.partial(Component::R, [0, 1, 0], p).is_ok());
        assert!(matches!(
            u.partial(Component::R, [0, 1, 1], p),
            Err(Error::Capability {
                required: 2,
                available: 1
            })
        ));
    }

    #[test]
    fn bc_sampling() {
        let g = ShellGeometry::new(0.01, 2.0).unwrap();
        let w = PI / 2.0;
        let ok = SeparableField::new(
            vec![FieldTerm::new(
                1.0,
                vec![1.0],
                Factor::Cos(3.0),
                Factor::Sin(w),
            )],
            vec![FieldTerm::new(
                1.0,
                vec![1.0],
                Factor::Sin(3.0),
                Factor::Sin(w),
            )],
            vec![FieldTerm::new(
                1.0,
                vec![1.0],
                Factor::Cos(3.0),
                Factor::Cos(w),
            )],
        );
        assert!(verify_bc(&ok, &g, BcTag::AverageTop).is_ok());
        assert!(verify_bc(&ok, &g, BcTag::FixedBottom).is_err());
        let bad = SeparableField::new(
            vec![],
            vec![],
            vec![FieldTerm::new(1.0, vec![1.0], Factor::one(), Factor::one())],
        );
        assert!(verify_bc(&bad, &g, BcTag::AverageTop).is_err());
    }
}
