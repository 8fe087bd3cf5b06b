use std::f64::consts::PI;

use rayon::prelude::*;

use super::Point;
use crate::material::ShellGeometry;

/// Gauss–Legendre nodes and weights on [−1, 1], by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss–Legendre rule needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut t = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, t);
            dp = d;
            let dt = p / d;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, t);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - t * t) * dp * dp);
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
pub fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = if (x * x - 1.0).abs() < 1e-300 {
        // endpoint limit
        0.5 * nf * (nf + 1.0) * x.powi(n as i32 + 1)
    } else {
        nf * (x * p1 - p0) / (x * x - 1.0)
    };
    (p1, d)
}

/// A one-dimensional quadrature rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn gauss(a: f64, b: f64, n: usize) -> Self {
        Self::composite_gauss(a, b, 1, n)
    }

    pub fn composite_gauss(a: f64, b: f64, panels: usize, order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        let width = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let lo = a + p as f64 * width;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(lo + 0.5 * width * (xi + 1.0));
                weights.push(0.5 * width * wi);
            }
        }
        Rule { nodes, weights }
    }

    /// Uniform trapezoid rule on [0, 2π), exact for trigonometric polynomials
    /// of degree < n.
    pub fn periodic(n: usize) -> Self {
        let step = 2.0 * PI / n as f64;
        Rule {
            nodes: (0..n).map(|i| i as f64 * step).collect(),
            weights: vec![step; n],
        }
    }

    pub fn single(x: f64) -> Self {
        Rule {
            nodes: vec![x],
            weights: vec![1.0],
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(*x))
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    /// r dr dθ dz
    Volume,
    /// dr dθ dz
    Flat,
    /// dθ dz on the mid-surface r = 1
    Surface,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    pub r: Rule,
    pub theta: Rule,
    pub z: Rule,
    pub measure: Measure,
}

impl QuadratureGrid {
    /// Gauss in r and z, periodic trapezoid in θ.
    pub fn new(
        geometry: &ShellGeometry,
        n_r: usize,
        n_theta: usize,
        n_z: usize,
        measure: Measure,
    ) -> Self {
        let (r0, r1) = geometry.radial_interval();
        let r = match measure {
            Measure::Surface => Rule::single(1.0),
            _ => Rule::gauss(r0, r1, n_r),
        };
        QuadratureGrid {
            r,
            theta: Rule::periodic(n_theta),
            z: Rule::gauss(0.0, geometry.l, n_z),
            measure,
        }
    }

    /// Grid sized for fields built from the modes sin/cos(m̂z)·cos/sin(nθ).
    pub fn for_modes(geometry: &ShellGeometry, m_max: u32, n_max: u32, measure: Measure) -> Self {
        let n_theta = 2 * n_max as usize + 4;
        let n_z = m_max as usize + 24;
        Self::new(geometry, 6, n_theta, n_z, measure)
    }

    pub fn with_measure(&self, measure: Measure) -> Self {
        let r = match measure {
            Measure::Surface => Rule::single(1.0),
            _ if self.measure == Measure::Surface => {
                panic!("cannot recover a radial rule from a surface grid")
            }
            _ => self.r.clone(),
        };
        QuadratureGrid {
            r,
            theta: self.theta.clone(),
            z: self.z.clone(),
            measure,
        }
    }

    pub fn len(&self) -> usize {
        self.r.len() * self.theta.len() * self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Integrates K quantities at once. The reduction runs in parallel over θ
    /// but partial sums are combined in a fixed order, so results do not
    /// depend on the thread count.
    pub fn integrate_many<const K: usize, F>(&self, f: F) -> [f64; K]
    where
        F: Fn(Point) -> [f64; K] + Sync,
    {
        let partials: Vec<[f64; K]> = (0..self.theta.len())
            .into_par_iter()
            .map(|it| {
                let theta = self.theta.nodes[it];
                let wt = self.theta.weights[it];
                let mut acc = [0.0; K];
                for (r, wr) in self.r.nodes.iter().zip(&self.r.weights) {
                    let jac = match self.measure {
                        Measure::Volume => *r,
                        _ => 1.0,
                    };
                    for (z, wz) in self.z.nodes.iter().zip(&self.z.weights) {
                        let v = f(Point {
                            r: *r,
                            theta,
                            z: *z,
                        });
                        let w = wt * wr * wz * jac;
                        for k in 0..K {
                            acc[k] += w * v[k];
                        }
                    }
                }
                acc
            })
            .collect();
        let mut total = [0.0; K];
        for p in partials {
            for k in 0..K {
                total[k] += p[k];
            }
        }
        total
    }

    pub fn integrate<F>(&self, f: F) -> f64
    where
        F: Fn(Point) -> f64 + Sync,
    {
        self.integrate_many(|p| [f(p)])[0]
    }
}
