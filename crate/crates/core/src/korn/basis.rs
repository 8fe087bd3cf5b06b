use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::quadrature::{gauss_legendre, legendre_with_derivative};
use crate::material::ShellGeometry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RadialScheme {
    /// Hierarchical Legendre basis 1, s, (P_k − P_{k−2}) on s ∈ [−1, 1],
    /// whose derivatives are orthonormal.
    Legendre,
    /// Piecewise-linear hat functions on a uniform mesh.
    LinearElements,
}

/// Radial trial space on I_h, tabulated at quadrature nodes.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    pub scheme: RadialScheme,
    /// Quadrature nodes in r.
    pub r: Vec<f64>,
    /// Quadrature weights for dr.
    pub w: Vec<f64>,
    /// Basis values, one row per node.
    pub val: DMatrix<f64>,
    /// d/dr of the basis, one row per node.
    pub der: DMatrix<f64>,
    /// ∫ basis dr over I_h.
    pub mean: Vec<f64>,
}

impl RadialGrid {
    pub fn new(geometry: &ShellGeometry, scheme: RadialScheme, n: usize) -> Result<Self> {
        match scheme {
            RadialScheme::Legendre => Self::legendre(geometry, n),
            RadialScheme::LinearElements => Self::linear_elements(geometry, n),
        }
    }

    /// n basis functions of degree < n.
    pub fn legendre(geometry: &ShellGeometry, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(
                "N",
                "Legendre basis needs at least 2 functions",
            ));
        }
        let h = geometry.h;
        let (s, ws) = gauss_legendre(n + 8);
        let nq = s.len();
        let mut val = DMatrix::zeros(nq, n);
        let mut der = DMatrix::zeros(nq, n);
        for (q, &x) in s.iter().enumerate() {
            let p: Vec<f64> = (0..n).map(|k| legendre_with_derivative(k, x).0).collect();
            val[(q, 0)] = 1.0;
            val[(q, 1)] = x;
            der[(q, 1)] = 2.0 / h;
            for k in 2..n {
                let kf = k as f64;
                let pk = legendre_with_derivative(k, x).0;
                val[(q, k)] = (pk - p[k - 2]) / (2.0 * (2.0 * kf - 1.0)).sqrt();
                der[(q, k)] = ((2.0 * kf - 1.0) / 2.0).sqrt() * p[k - 1] * 2.0 / h;
            }
        }
        let mut mean = vec![0.0; n];
        mean[0] = h;
        if n > 2 {
            mean[2] = -h / 6f64.sqrt();
        }
        Ok(RadialGrid {
            scheme: RadialScheme::Legendre,
            r: s.iter().map(|x| 1.0 + 0.5 * h * x).collect(),
            w: ws.iter().map(|w| 0.5 * h * w).collect(),
            val,
            der,
            mean,
        })
    }

    /// n elements, n + 1 hat functions, three Gauss points per element.
    pub fn linear_elements(geometry: &ShellGeometry, n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::domain("N", "need at least one element"));
        }
        let (r0, r1) = geometry.radial_interval();
        let el = (r1 - r0) / n as f64;
        let (gx, gw) = gauss_legendre(3);
        let nq = 3 * n;
        let mut r = Vec::with_capacity(nq);
        let mut w = Vec::with_capacity(nq);
        let mut val = DMatrix::zeros(nq, n + 1);
        let mut der = DMatrix::zeros(nq, n + 1);
        for e in 0..n {
            for (x, wx) in gx.iter().zip(&gw) {
                let q = r.len();
                let t = 0.5 * (x + 1.0);
                r.push(r0 + (e as f64 + t) * el);
                w.push(0.5 * el * wx);
                val[(q, e)] = 1.0 - t;
                val[(q, e + 1)] = t;
                der[(q, e)] = -1.0 / el;
                der[(q, e + 1)] = 1.0 / el;
            }
        }
        let mut mean = vec![el; n + 1];
        mean[0] = 0.5 * el;
        mean[n] = 0.5 * el;
        Ok(RadialGrid {
            scheme: RadialScheme::LinearElements,
            r,
            w,
            val,
            der,
            mean,
        })
    }

    /// Number of basis functions per displacement component.
    pub fn dim(&self) -> usize {
        self.val.ncols()
    }

    pub fn nodes(&self) -> usize {
        self.r.len()
    }

    /// The same scheme with twice the resolution.
    pub fn refined(&self, geometry: &ShellGeometry) -> Result<Self> {
        match self.scheme {
            RadialScheme::Legendre => Self::legendre(geometry, 2 * self.dim()),
            RadialScheme::LinearElements => Self::linear_elements(geometry, 2 * (self.dim() - 1)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn derivatives_orthonormal_and_means() {
        let g = ShellGeometry::new(0.1, 1.0).unwrap();
        let rg = RadialGrid::legendre(&g, 8).unwrap();
        // ∫ ψ_j' ψ_k' ds is δ_jk for j, k ≥ 2; in r that carries a factor 2/h
        for j in 2..8 {
            for k in 2..8 {
                let v: f64 = (0..rg.nodes())
                    .map(|q| rg.w[q] * rg.der[(q, j)] * rg.der[(q, k)])
                    .sum();
                let expect = if j == k { 2.0 / g.h } else { 0.0 };
                assert_relative_eq!(v, expect, epsilon = 1e-10);
            }
        }
        for k in 0..8 {
            let m: f64 = (0..rg.nodes()).map(|q| rg.w[q] * rg.val[(q, k)]).sum();
            assert_relative_eq!(m, rg.mean[k], epsilon = 1e-15);
        }
    }

    #[test]
    fn hat_functions_partition_unity() {
        let g = ShellGeometry::new(0.2, 1.0).unwrap();
        let rg = RadialGrid::linear_elements(&g, 5).unwrap();
        for q in 0..rg.nodes() {
            let s: f64 = (0..rg.dim()).map(|k| rg.val[(q, k)]).sum();
            assert_relative_eq!(s, 1.0, epsilon = 1e-14);
        }
        assert_relative_eq!(rg.mean.iter().sum::<f64>(), g.h, epsilon = 1e-15);
    }
}
