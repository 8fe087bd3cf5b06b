use std::f64::consts::PI;

use serde::Serialize;

use super::{planar_norms, GradientKind, InequalityCheck, PlanarField};
use crate::error::{Error, Result};
use crate::fields::quadrature::Rule;

/// ψ(x) = sinh(x)/x, by its Taylor series near the removable singularity.
pub fn psi(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 + x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sinh() / x
    }
}

/// Φ(τ) = τ⁴ / (sinh²τ − τ²), decreasing from Φ(0) = 3.
pub fn phi_tau(tau: f64) -> f64 {
    let t = tau.abs();
    if t < 1.0 {
        // sinh²τ − τ² = Σ_{k≥2} (2τ)^{2k} / (2 (2k)!), divided by τ⁴
        let x2 = 4.0 * t * t;
        let mut term = 16.0 / (2.0 * 24.0);
        let mut sum = term;
        for k in 3..20 {
            let k2 = 2.0 * k as f64;
            term *= x2 / (k2 * (k2 - 1.0));
            sum += term;
        }
        1.0 / sum
    } else {
        t.powi(4) / (t.sinh().powi(2) - t * t)
    }
}

/// w = Σ_n (A_n e^{πnx/L} + B_n e^{−πnx/L}) sin(πny/L), harmonic with w = 0
/// on the horizontal sides.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SineHarmonic {
    pub l: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl SineHarmonic {
    /// cosh(π(x − h/2)/L) sin(πy/L), the equality case of the sharp lemma.
    pub fn extremal(h: f64, l: f64) -> Self {
        let c = PI * h / (2.0 * l);
        SineHarmonic {
            l,
            a: vec![0.5 * (-c).exp()],
            b: vec![0.5 * c.exp()],
        }
    }

    /// (w, w_x, w_y)
    pub fn jet(&self, x: f64, y: f64) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (k, (a, b)) in self.a.iter().zip(&self.b).enumerate() {
            let q = PI * (k + 1) as f64 / self.l;
            let (ep, em) = ((q * x).exp(), (-q * x).exp());
            let (s, c) = (q * y).sin_cos();
            out[0] += (a * ep + b * em) * s;
            out[1] += q * (a * ep - b * em) * s;
            out[2] += q * (a * ep + b * em) * c;
        }
        out
    }

    /// (‖w‖², ‖w_x‖², ‖w_y‖²) over [0, h] × [0, L].
    pub fn norms_sq(&self, h: f64) -> [f64; 3] {
        let rx = Rule::gauss(0.0, h, 16);
        let ry = Rule::composite_gauss(0.0, self.l, 2 * self.a.len().max(1), 16);
        let mut acc = [0.0; 3];
        for (x, wx) in rx.nodes.iter().zip(&rx.weights) {
            for (y, wy) in ry.nodes.iter().zip(&ry.weights) {
                let j = self.jet(*x, *y);
                for k in 0..3 {
                    acc[k] += wx * wy * j[k] * j[k];
                }
            }
        }
        acc
    }
}

/// |LHS − RHS| / RHS for ‖w_y‖² − ‖w_x‖² ≤ (2√Φ(πh/L)/h) ‖w‖ ‖w_x‖ on the extremal.
pub fn extremal_equality_error(h: f64, l: f64) -> f64 {
    let [w, wx, wy] = SineHarmonic::extremal(h, l).norms_sq(h);
    let lhs = wy - wx;
    let rhs = 2.0 * phi_tau(PI * h / l).sqrt() / h * (w * wx).sqrt();
    (lhs - rhs).abs() / rhs
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicLemmaReport {
    pub h: f64,
    pub l: f64,
    pub extremal_equality_error: f64,
    pub samples: usize,
    /// ‖w_y‖² ≤ (2√3/h)‖w‖‖w_x‖ + ‖w_x‖²
    pub hi_violations: usize,
    /// ‖w_y‖² − ‖w_x‖² ≤ (2√Φ(πh/L)/h)‖w‖‖w_x‖
    pub sharp_violations: usize,
    pub min_hi_margin: f64,
    pub min_sharp_margin: f64,
}

pub fn harmonic_lemma_check(
    h: f64,
    l: f64,
    samples: &[SineHarmonic],
) -> Result<HarmonicLemmaReport> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::domain("h", format!("{h} is not in (0, 1)")));
    }
    if !(l > 0.0) {
        return Err(Error::domain("L", format!("{l} is not positive")));
    }
    let phi = phi_tau(PI * h / l);
    let mut report = HarmonicLemmaReport {
        h,
        l,
        extremal_equality_error: extremal_equality_error(h, l),
        samples: samples.len(),
        hi_violations: 0,
        sharp_violations: 0,
        min_hi_margin: f64::INFINITY,
        min_sharp_margin: f64::INFINITY,
    };
    for s in samples {
        if (s.l - l).abs() > 1e-12 * l {
            return Err(Error::domain("samples", "sample period differs from L"));
        }
        let [w, wx, wy] = s.norms_sq(h);
        let hi = InequalityCheck::new(wy, 2.0 * 3f64.sqrt() / h * (w * wx).sqrt() + wx);
        // compare ‖w_y‖² against ‖w_x‖² + bound so that both margins share a scale
        let sharp = InequalityCheck::new(wy, wx + 2.0 * phi.sqrt() / h * (w * wx).sqrt());
        report.hi_violations += usize::from(!hi.holds);
        report.sharp_violations += usize::from(!sharp.holds);
        report.min_hi_margin = report.min_hi_margin.min(hi.margin);
        report.min_sharp_margin = report.min_sharp_margin.min(sharp.margin);
    }
    Ok(report)
}

/// Discrete harmonic extension of u from the boundary of [0, h] × [0, L].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicSolution {
    pub h: f64,
    pub l: f64,
    pub nx: usize,
    pub ny: usize,
    /// Node values, index i + (nx + 1) j.
    #[serde(skip)]
    pub w: Vec<f64>,
    /// Boundary data u sampled at the same nodes.
    #[serde(skip)]
    pub u: Vec<f64>,
    pub iterations: usize,
    /// max |Δ_h w| over interior nodes, divided by the stencil diagonal.
    pub laplacian_residual: f64,
}

impl HarmonicSolution {
    fn idx(&self, i: usize, j: usize) -> usize {
        i + (self.nx + 1) * j
    }

    pub fn hx(&self) -> f64 {
        self.h / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        self.l / self.ny as f64
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.w[self.idx(i, j)]
    }

    /// Discrete (‖∇(u − w)‖, ‖u − w‖).
    pub fn differences(&self) -> (f64, f64) {
        let (hx, hy) = (self.hx(), self.hy());
        let d: Vec<f64> = self.u.iter().zip(&self.w).map(|(a, b)| a - b).collect();
        let mut grad = 0.0;
        let mut l2 = 0.0;
        for j in 0..=self.ny {
            for i in 0..=self.nx {
                let k = self.idx(i, j);
                if i < self.nx {
                    grad += hy / hx * (d[k + 1] - d[k]).powi(2);
                }
                if j < self.ny {
                    grad += hx / hy * (d[self.idx(i, j + 1)] - d[k]).powi(2);
                }
                l2 += hx * hy * d[k] * d[k];
            }
        }
        (grad.sqrt(), l2.sqrt())
    }
}

/// Second-order 5-point solve of Δw = 0, w = u on the boundary, by conjugate
/// gradients to relative residual 1e-12. The grid has `nx` cells across the
/// thickness and square-ish cells along y.
pub fn harmonic_projection(
    field: &PlanarField,
    h: f64,
    l: f64,
    nx: usize,
) -> Result<HarmonicSolution> {
    if nx < 2 {
        return Err(Error::domain("nx", "need at least two cells"));
    }
    let ny = ((nx as f64 * l / h).round() as usize).max(2);
    let (hx, hy) = (h / nx as f64, l / ny as f64);
    let (cx, cy) = (1.0 / (hx * hx), 1.0 / (hy * hy));
    let diag = 2.0 * (cx + cy);
    let stride = nx + 1;
    let mut u = vec![0.0; stride * (ny + 1)];
    for j in 0..=ny {
        for i in 0..=nx {
            u[i + stride * j] = field.u(i as f64 * hx, j as f64 * hy)[0];
        }
    }
    let (mi, mj) = (nx - 1, ny - 1);
    let at = |i: usize, j: usize| (i - 1) + mi * (j - 1);
    let apply = |x: &[f64], out: &mut [f64]| {
        for j in 1..=mj {
            for i in 1..=mi {
                let mut s = diag * x[at(i, j)];
                if i > 1 {
                    s -= cx * x[at(i - 1, j)];
                }
                if i < mi {
                    s -= cx * x[at(i + 1, j)];
                }
                if j > 1 {
                    s -= cy * x[at(i, j - 1)];
                }
                if j < mj {
                    s -= cy * x[at(i, j + 1)];
                }
                out[at(i, j)] = s;
            }
        }
    };
    let n = mi * mj;
    let mut b = vec![0.0; n];
    for j in 1..=mj {
        for i in 1..=mi {
            let mut s = 0.0;
            if i == 1 {
                s += cx * u[stride * j];
            }
            if i == mi {
                s += cx * u[nx + stride * j];
            }
            if j == 1 {
                s += cy * u[i];
            }
            if j == mj {
                s += cy * u[i + stride * ny];
            }
            b[at(i, j)] = s;
        }
    }
    let dot = |a: &[f64], c: &[f64]| a.iter().zip(c).map(|(x, y)| x * y).sum::<f64>();
    let bnorm = dot(&b, &b).sqrt();
    let mut x = vec![0.0; n];
    let mut iterations = 0;
    if bnorm > 0.0 {
        let mut r = b.clone();
        let mut p = r.clone();
        let mut ap = vec![0.0; n];
        let mut rr = dot(&r, &r);
        let cap = 20 * (mi + mj) + 1000;
        while rr.sqrt() > 1e-12 * bnorm {
            if iterations >= cap {
                return Err(Error::Solver {
                    residual: rr.sqrt() / bnorm,
                    iterations,
                });
            }
            apply(&p, &mut ap);
            let step = rr / dot(&p, &ap);
            for k in 0..n {
                x[k] += step * p[k];
                r[k] -= step * ap[k];
            }
            let rr_new = dot(&r, &r);
            let beta = rr_new / rr;
            rr = rr_new;
            for k in 0..n {
                p[k] = r[k] + beta * p[k];
            }
            iterations += 1;
        }
    }
    let mut w = u.clone();
    for j in 1..=mj {
        for i in 1..=mi {
            w[i + stride * j] = x[at(i, j)];
        }
    }
    let mut res: f64 = 0.0;
    for j in 1..ny {
        for i in 1..nx {
            let k = i + stride * j;
            let lap =
                cx * (w[k - 1] + w[k + 1]) + cy * (w[k - stride] + w[k + stride]) - diag * w[k];
            res = res.max(lap.abs() / diag);
        }
    }
    Ok(HarmonicSolution {
        h,
        l,
        nx,
        ny,
        w,
        u,
        iterations,
        laplacian_residual: res,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MainestReport {
    pub alpha: f64,
    pub e_alpha: f64,
    pub grad_diff: f64,
    pub l2_diff: f64,
    /// ‖∇u − ∇w‖ / ((√2 + 1/π)‖e_α‖)
    pub grad_ratio: f64,
    /// ‖u − w‖ / ((h/π)(√2 + 1/π)‖e_α‖)
    pub l2_ratio: f64,
    /// Both ratios within 1 + allowance.
    pub holds: bool,
}

/// Both projection bounds, with the grid error absorbed by `allowance`.
pub fn mainest_check(
    field: &PlanarField,
    alpha: f64,
    sol: &HarmonicSolution,
    allowance: f64,
) -> MainestReport {
    let e = planar_norms(field, GradientKind::Alpha(alpha), sol.h, sol.l).e;
    let (g, d) = sol.differences();
    let k = 2f64.sqrt() + 1.0 / PI;
    let rat = |x: f64, b: f64| {
        if b > 0.0 {
            x / b
        } else if x > 1e-12 {
            f64::INFINITY
        } else {
            0.0
        }
    };
    let grad_ratio = rat(g, k * e);
    let l2_ratio = rat(d, sol.h / PI * k * e);
    MainestReport {
        alpha,
        e_alpha: e,
        grad_diff: g,
        l2_diff: d,
        grad_ratio,
        l2_ratio,
        holds: grad_ratio <= 1.0 + allowance && l2_ratio <= 1.0 + allowance,
    }
}

#[cfg(test)]
mod tests {
    use super::super::{PlanarBc, PlanarTerm};
    use super::*;
    use crate::fields::Factor;
    use approx::assert_relative_eq;

    #[test]
    fn psi_and_phi_values() {
        assert_eq!(psi(0.0), 1.0);
        assert_relative_eq!(psi(1e-5), 1.0 + 1e-10 / 6.0, epsilon = 1e-16);
        assert_relative_eq!(psi(2.0), 2f64.sinh() / 2.0, epsilon = 1e-15);
        assert_eq!(phi_tau(0.0), 3.0);
        assert_relative_eq!(phi_tau(0.999999), phi_tau(1.000001), max_relative = 1e-5);
        let direct = |t: f64| t.powi(4) / (t.sinh().powi(2) - t * t);
        assert_relative_eq!(phi_tau(0.5), direct(0.5), max_relative = 1e-12);
        let mut prev = 3.0;
        for k in 1..100 {
            let v = phi_tau(0.05 * k as f64);
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn extremal_is_sharp() {
        for (h, l) in [(0.1, 1.0), (0.01, 2.0), (0.5, 0.7)] {
            assert!(extremal_equality_error(h, l) < 1e-10, "{h} {l}");
        }
    }

    #[test]
    fn harmonic_data_is_fixed_point() {
        // xy is reproduced exactly by the 5-point stencil
        let f = PlanarField::new(
            vec![PlanarTerm::poly(
                1.0,
                vec![0.0, 1.0],
                Factor::Poly(vec![0.0, 1.0]),
            )],
            vec![],
            PlanarBc::None,
        );
        let s = harmonic_projection(&f, 0.1, 1.0, 8).unwrap();
        let (g, d) = s.differences();
        assert!(g < 1e-9 && d < 1e-10, "{g} {d}");
        assert!(s.laplacian_residual < 1e-10);
    }

    #[test]
    fn second_order_convergence() {
        let (h, l) = (0.2, 1.0);
        // e^{πx} sin(πy) is harmonic
        let f = PlanarField::new(
            vec![PlanarTerm::poly(
                1.0,
                (0..30)
                    .map(|k| PI.powi(k) / (1..=k).map(|j| j as f64).product::<f64>())
                    .collect(),
                Factor::Sin(PI),
            )],
            vec![],
            PlanarBc::ZeroHorizontal,
        );
        let err = |nx| {
            let s = harmonic_projection(&f, h, l, nx).unwrap();
            let mut e: f64 = 0.0;
            for j in 0..=s.ny {
                for i in 0..=s.nx {
                    let exact = (PI * i as f64 * s.hx()).exp() * (PI * j as f64 * s.hy()).sin();
                    e = e.max((s.value(i, j) - exact).abs());
                }
            }
            e
        };
        let (e1, e2) = (err(4), err(8));
        assert!((e1 / e2 - 4.0).abs() < 0.4, "{e1} {e2}");
    }

    #[test]
    fn sine_product_example() {
        // u = sin(πy/L) sin(πx/h) vanishes on the boundary, so w = 0
        let (h, l) = (0.1, 1.0);
        let f = PlanarField::new(
            vec![PlanarTerm::new(
                1.0,
                Factor::Sin(PI / h),
                Factor::Sin(PI / l),
            )],
            vec![],
            PlanarBc::ZeroBoth,
        );
        let s = harmonic_projection(&f, h, l, 24).unwrap();
        assert!(s.w.iter().all(|w| w.abs() < 1e-12));
        let r = mainest_check(&f, 0.0, &s, 0.05);
        assert!(r.holds, "{r:?}");
        assert!(r.grad_ratio < 1.0 && r.l2_ratio < 1.0);
    }
}
