use super::displacement::{Component, DisplacementField};
use super::Point;
use crate::error::Result;

pub type Mat3 = [[f64; 3]; 3];

/// Row α, column β: (∇u)_{αβ}, both ordered (r, θ, z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientTensor(pub Mat3);

impl GradientTensor {
    pub fn sym(&self) -> Mat3 {
        sym(&self.0)
    }

    pub fn norm_sq(&self) -> f64 {
        norm_sq(&self.0)
    }
}

pub fn sym(a: &Mat3) -> Mat3 {
    let mut s = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            s[i][j] = 0.5 * (a[i][j] + a[j][i]);
        }
    }
    s
}

pub fn norm_sq(a: &Mat3) -> f64 {
    a.iter().flatten().map(|x| x * x).sum()
}

/// First partials ∂_β u_α with β over (r, θ, z).
pub fn partials(field: &dyn DisplacementField, p: Point) -> Result<Mat3> {
    let mut d = [[0.0; 3]; 3];
    for c in Component::ALL {
        d[c as usize] = [
            field.partial(c, [1, 0, 0], p)?,
            field.partial(c, [0, 1, 0], p)?,
            field.partial(c, [0, 0, 1], p)?,
        ];
    }
    Ok(d)
}

pub fn gradient(field: &dyn DisplacementField, p: Point) -> Result<GradientTensor> {
    let d = partials(field, p)?;
    let u = [
        field.value(Component::R, p),
        field.value(Component::Theta, p),
    ];
    Ok(gradient_from_partials(&d, u[0], u[1], p.r))
}

pub(crate) fn gradient_from_partials(d: &Mat3, ur: f64, ut: f64, r: f64) -> GradientTensor {
    let mut g = *d;
    g[0][1] = (d[0][1] - ut) / r;
    g[1][1] = (d[1][1] + ur) / r;
    g[2][1] = d[2][1] / r;
    GradientTensor(g)
}

/// G(u), keeping 1/r only on the (rθ) entry, and the appendix matrix A(u),
/// which drops it there as well.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplifiedTensors {
    pub g: Mat3,
    pub a: Mat3,
}

impl SimplifiedTensors {
    /// E(u) = sym G(u)
    pub fn e_g(&self) -> Mat3 {
        sym(&self.g)
    }

    pub fn e_a(&self) -> Mat3 {
        sym(&self.a)
    }
}

pub fn simplified(field: &dyn DisplacementField, p: Point) -> Result<SimplifiedTensors> {
    let d = partials(field, p)?;
    let ur = field.value(Component::R, p);
    let ut = field.value(Component::Theta, p);
    Ok(simplified_from_partials(&d, ur, ut, p.r))
}

pub(crate) fn simplified_from_partials(d: &Mat3, ur: f64, ut: f64, r: f64) -> SimplifiedTensors {
    let mut a = *d;
    a[0][1] = d[0][1] - ut;
    a[1][1] = d[1][1] + ur;
    let mut g = a;
    g[0][1] /= r;
    SimplifiedTensors { g, a }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::displacement::{FieldTerm, SeparableField};
    use crate::fields::surface::Factor;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn rigid_rotation_has_zero_strain() {
        let u = SeparableField::new(
            vec![],
            vec![FieldTerm::new(
                0.7,
                vec![0.0, 1.0],
                Factor::one(),
                Factor::one(),
            )],
            vec![],
        );
        for r in [0.9, 1.0, 1.1] {
            let g = gradient(
                &u,
                Point {
                    r,
                    theta: 1.0,
                    z: 0.3,
                },
            )
            .unwrap();
            assert!(norm_sq(&g.sym()) < 1e-28);
        }
    }

    #[test]
    fn homogeneous_deformation() {
        let (a, b) = (0.02, 0.05);
        let u = SeparableField::new(
            vec![FieldTerm::new(
                a,
                vec![0.0, 1.0],
                Factor::one(),
                Factor::one(),
            )],
            vec![],
            vec![FieldTerm::new(
                -b,
                vec![1.0],
                Factor::one(),
                Factor::Poly(vec![0.0, 1.0]),
            )],
        );
        let g = gradient(
            &u,
            Point {
                r: 1.03,
                theta: 0.5,
                z: 2.0,
            },
        )
        .unwrap();
        let expect = [[a, 0.0, 0.0], [0.0, a, 0.0], [0.0, 0.0, -b]];
        for i in 0..3 {
            for j in 0..3 {
                assert_relative_eq!(g.0[i][j], expect[i][j], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn hand_differentiated_radial_mode() {
        let l = 2.0;
        let w = PI / l;
        let u = SeparableField::new(
            vec![FieldTerm::new(
                1.0,
                vec![1.0],
                Factor::one(),
                Factor::Sin(w),
            )],
            vec![],
            vec![],
        );
        let z = 0.3;
        let g = gradient(
            &u,
            Point {
                r: 1.0,
                theta: 0.0,
                z,
            },
        )
        .unwrap();
        assert_relative_eq!(g.0[0][2], w * (w * z).cos(), epsilon = 1e-15);
        assert_relative_eq!(g.0[1][1], (w * z).sin(), epsilon = 1e-15);
    }

    #[test]
    fn simplified_tensors_reduce_at_mid_surface() {
        let u = SeparableField::new(
            vec![FieldTerm::new(
                1.0,
                vec![0.2, 1.0],
                Factor::Cos(3.0),
                Factor::Sin(1.0),
            )],
            vec![FieldTerm::new(
                0.4,
                vec![1.0, -1.0, 0.5],
                Factor::Sin(3.0),
                Factor::Sin(1.0),
            )],
            vec![FieldTerm::new(
                -0.3,
                vec![1.0, 2.0],
                Factor::Cos(3.0),
                Factor::Cos(1.0),
            )],
        );
        let p = Point {
            r: 1.0,
            theta: 0.7,
            z: 1.3,
        };
        let g = gradient(&u, p).unwrap();
        let s = simplified(&u, p).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_relative_eq!(s.g[i][j], g.0[i][j], epsilon = 1e-15);
                assert_relative_eq!(s.a[i][j], g.0[i][j], epsilon = 1e-15);
            }
        }
        let p = Point { r: 1.05, ..p };
        let g = gradient(&u, p).unwrap();
        let s = simplified(&u, p).unwrap();
        assert_relative_eq!(s.g[0][1], g.0[0][1], epsilon = 1e-15);
        assert_relative_eq!(s.g[1][1], g.0[1][1] * p.r, epsilon = 1e-14);
        assert_relative_eq!(s.a[0][1], g.0[0][1] * p.r, epsilon = 1e-14);
    }
}
