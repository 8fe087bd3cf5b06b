//! Scalar functions of (θ, z) with closed-form partial derivatives.

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

pub trait SurfaceFunction: Send + Sync {
    /// ∂θ^i ∂z^j at (θ, z).
    fn partial(&self, i: u32, j: u32, theta: f64, z: f64) -> f64;

    /// Highest total derivative order that is available.
    fn max_order(&self) -> u32 {
        u32::MAX
    }

    fn value(&self, theta: f64, z: f64) -> f64 {
        self.partial(0, 0, theta, z)
    }
}

/// One-dimensional building block.
#[derive(Debug, Clone, PartialEq)]
pub enum Factor {
    /// Σ c_k x^k
    Poly(Vec<f64>),
    /// cos(ωx)
    Cos(f64),
    /// sin(ωx)
    Sin(f64),
}

impl Factor {
    pub fn one() -> Self {
        Factor::Poly(vec![1.0])
    }

    /// k-th derivative at x.
    pub fn eval(&self, k: u32, x: f64) -> f64 {
        match self {
            Factor::Poly(c) => poly_derivative(c, k, x),
            Factor::Cos(w) => w.powi(k as i32) * (w * x + k as f64 * FRAC_PI_2).cos(),
            Factor::Sin(w) => w.powi(k as i32) * (w * x + k as f64 * FRAC_PI_2).sin(),
        }
    }

    /// First derivative as (coefficient, factor).
    pub fn derive(&self) -> (f64, Factor) {
        match self {
            Factor::Poly(c) => {
                let d: Vec<f64> = c
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, ck)| k as f64 * ck)
                    .collect();
                (1.0, Factor::Poly(if d.is_empty() { vec![0.0] } else { d }))
            }
            Factor::Cos(w) => (-w, Factor::Sin(*w)),
            Factor::Sin(w) => (*w, Factor::Cos(*w)),
        }
    }
}

pub(crate) fn poly_derivative(c: &[f64], k: u32, x: f64) -> f64 {
    let k = k as usize;
    if k >= c.len() {
        return 0.0;
    }
    let mut acc = 0.0;
    for j in (k..c.len()).rev() {
        let mut fall = 1.0;
        for t in 0..k {
            fall *= (j - t) as f64;
        }
        acc = acc * x + fall * c[j];
    }
    acc
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceTerm {
    pub coef: f64,
    pub theta: Factor,
    pub z: Factor,
}

/// Σ coef · Θ(θ) · Z(z)
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SeparableSurface {
    pub terms: Vec<SurfaceTerm>,
}

impl SeparableSurface {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(coef: f64, theta: Factor, z: Factor) -> Self {
        SeparableSurface {
            terms: vec![SurfaceTerm { coef, theta, z }],
        }
    }

    pub fn plus(mut self, coef: f64, theta: Factor, z: Factor) -> Self {
        self.terms.push(SurfaceTerm { coef, theta, z });
        self
    }
}

impl SurfaceFunction for SeparableSurface {
    fn partial(&self, i: u32, j: u32, theta: f64, z: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coef * t.theta.eval(i, theta) * t.z.eval(j, z))
            .sum()
    }
}

/// coef · ∂θ^i ∂z^j of another surface function.
#[derive(Clone)]
pub struct DerivedSurface {
    pub base: Arc<dyn SurfaceFunction>,
    pub d_theta: u32,
    pub d_z: u32,
    pub coef: f64,
}

impl SurfaceFunction for DerivedSurface {
    fn partial(&self, i: u32, j: u32, theta: f64, z: f64) -> f64 {
        self.coef * self.base.partial(i + self.d_theta, j + self.d_z, theta, z)
    }

    fn max_order(&self) -> u32 {
        self.base
            .max_order()
            .saturating_sub(self.d_theta + self.d_z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn factor_derivatives_match_symbolic() {
        let fs = [
            Factor::Poly(vec![1.0, -2.0, 0.5, 3.0]),
            Factor::Cos(2.5),
            Factor::Sin(0.7),
        ];
        for f in fs {
            let (c, d) = f.derive();
            for x in [-1.3, 0.0, 0.4, 2.2] {
                assert_relative_eq!(f.eval(1, x), c * d.eval(0, x), epsilon = 1e-12);
                assert_relative_eq!(f.eval(3, x), c * d.eval(2, x), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn poly_derivative_by_hand() {
        // 1 + 2x + 3x² + 4x³
        let c = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(poly_derivative(&c, 0, 2.0), 49.0);
        assert_eq!(poly_derivative(&c, 1, 2.0), 2.0 + 12.0 + 48.0);
        assert_eq!(poly_derivative(&c, 2, 2.0), 6.0 + 48.0);
        assert_eq!(poly_derivative(&c, 3, 2.0), 24.0);
        assert_eq!(poly_derivative(&c, 4, 2.0), 0.0);
    }

    #[test]
    fn finite_difference_check() {
        let s = SeparableSurface::term(1.5, Factor::Cos(3.0), Factor::Sin(0.5)).plus(
            -0.2,
            Factor::Sin(2.0),
            Factor::Poly(vec![0.0, 1.0, 1.0]),
        );
        let (t, z, eps) = (0.3, 1.1, 1e-6);
        let fd = (s.value(t + eps, z) - s.value(t - eps, z)) / (2.0 * eps);
        assert_relative_eq!(s.partial(1, 0, t, z), fd, epsilon = 1e-8);
        let fd = (s.value(t, z + eps) - s.value(t, z - eps)) / (2.0 * eps);
        assert_relative_eq!(s.partial(0, 1, t, z), fd, epsilon = 1e-8);
    }
}
