//! Elastic constants, the homogeneous trivial branch and the stress tensors
//! that weight the compressiveness functional.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Material {
    pub e: f64,
    pub nu: f64,
    pub mu: f64,
    pub lambda_lame: f64,
    /// Dimensionless 2ν/(1−2ν).
    pub big_lambda: f64,
}

pub fn derive_material(e: f64, nu: f64) -> Result<Material> {
    if !(e > 0.0) || !e.is_finite() {
        return Err(Error::domain("E", format!("{e} must be positive")));
    }
    if !(nu > 0.0 && nu < 0.5) {
        return Err(Error::domain("nu", format!("{nu} must lie in (0, 1/2)")));
    }
    let mu = e / (2.0 * (1.0 + nu));
    let big_lambda = 2.0 * nu / (1.0 - 2.0 * nu);
    Ok(Material {
        e,
        nu,
        mu,
        lambda_lame: mu * big_lambda,
        big_lambda,
    })
}

impl Material {
    /// (L0 e, e) = λ (tr e)² + 2μ |e|² for a symmetric 3×3 tensor.
    pub fn energy_density(&self, e: &[[f64; 3]; 3]) -> f64 {
        let tr = e[0][0] + e[1][1] + e[2][2];
        let mut sq = 0.0;
        for row in e {
            for x in row {
                sq += x * x;
            }
        }
        self.lambda_lame * tr * tr + 2.0 * self.mu * sq
    }

    /// Coercivity constant of L0 with respect to |e|².
    pub fn coercivity(&self) -> f64 {
        2.0 * self.mu
    }

    /// Largest load with a trivial branch, E/(3√3).
    pub fn critical_trivial_load(&self) -> f64 {
        self.e / (3.0 * 3f64.sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShellGeometry {
    pub h: f64,
    pub l: f64,
}

impl ShellGeometry {
    pub fn new(h: f64, l: f64) -> Result<Self> {
        if !(h > 0.0 && h < 1.0) {
            return Err(Error::domain("h", format!("{h} must lie in (0, 1)")));
        }
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::domain("L", format!("{l} must be positive")));
        }
        Ok(ShellGeometry { h, l })
    }

    /// The radial interval I_h = [1 − h/2, 1 + h/2].
    pub fn radial_interval(&self) -> (f64, f64) {
        (1.0 - 0.5 * self.h, 1.0 + 0.5 * self.h)
    }

    pub fn m_hat(&self, m: u32) -> f64 {
        PI * m as f64 / self.l
    }

    pub fn volume(&self) -> f64 {
        2.0 * PI * self.l * self.h
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrivialBranch {
    pub load: f64,
    pub a: f64,
    pub b: f64,
}

impl TrivialBranch {
    /// |E b(1−b)(2−b) − 2λ|
    pub fn residual(&self, material: &Material) -> f64 {
        let b = self.b;
        (material.e * b * (1.0 - b) * (2.0 - b) - 2.0 * self.load).abs()
    }
}

pub fn solve_trivial_branch(material: &Material, load: f64) -> Result<TrivialBranch> {
    let max = material.critical_trivial_load();
    if !(load >= 0.0) {
        return Err(Error::domain(
            "lambda",
            format!("{load} must be non-negative"),
        ));
    }
    if load >= max {
        return Err(Error::NoTrivialBranch { load, max });
    }
    let g = |b: f64| material.e * b * (1.0 - b) * (2.0 - b) - 2.0 * load;
    // g is increasing on [0, 1 − 1/√3], negative at 0 and non-negative at the top
    let (mut lo, mut hi) = (0.0, 1.0 - 1.0 / 3f64.sqrt());
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let b = if load == 0.0 { 0.0 } else { 0.5 * (lo + hi) };
    let a = (1.0 + material.nu * (2.0 * b - b * b)).sqrt() - 1.0;
    Ok(TrivialBranch { load, a, b })
}

/// A 2π-periodic function of θ together with its derivative.
#[derive(Clone)]
pub struct ThetaFunction {
    value: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    derivative: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for ThetaFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ThetaFunction(f(0) = {})", self.eval(0.0))
    }
}

impl ThetaFunction {
    pub fn new(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let f = ThetaFunction {
            value: Arc::new(value),
            derivative: Arc::new(derivative),
        };
        f.check_periodic()?;
        Ok(f)
    }

    pub fn constant(c: f64) -> Self {
        ThetaFunction {
            value: Arc::new(move |_| c),
            derivative: Arc::new(|_| 0.0),
        }
    }

    /// amplitude · cos(kθ)
    pub fn cos(k: u32, amplitude: f64) -> Self {
        let k = k as f64;
        ThetaFunction {
            value: Arc::new(move |t| amplitude * (k * t).cos()),
            derivative: Arc::new(move |t| -amplitude * k * (k * t).sin()),
        }
    }

    /// amplitude · sin(kθ)
    pub fn sin(k: u32, amplitude: f64) -> Self {
        let k = k as f64;
        ThetaFunction {
            value: Arc::new(move |t| amplitude * (k * t).sin()),
            derivative: Arc::new(move |t| amplitude * k * (k * t).cos()),
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        (self.value)(theta)
    }

    pub fn derivative(&self, theta: f64) -> f64 {
        (self.derivative)(theta)
    }

    fn check_periodic(&self) -> Result<()> {
        for (name, f) in [("value", &self.value), ("derivative", &self.derivative)] {
            let (a, b) = (f(0.0), f(2.0 * PI));
            let scale = a.abs().max(b.abs()).max(1.0);
            if (a - b).abs() > 1e-10 * scale {
                return Err(Error::Validation(format!(
                    "θ-function {name} is not 2π-periodic: f(0) = {a}, f(2π) = {b}"
                )));
            }
        }
        Ok(())
    }
}

/// Unit-normalized prestress σ⁰(θ, z); the load magnitude enters separately.
#[derive(Debug, Clone)]
pub enum StressWeight {
    Perfect,
    /// σθz = s(θ), σzz = t(θ) − z s′(θ).
    ShearImperfection {
        s: ThetaFunction,
        t: ThetaFunction,
    },
    HoopImperfection {
        sigma: ThetaFunction,
    },
}

/// Description of a stress weight, checked when turned into a [`StressWeight`].
pub enum StressSpec {
    Perfect,
    Shear { s: ThetaFunction, t: ThetaFunction },
    Hoop { sigma: ThetaFunction },
}

pub fn stress_weight(spec: StressSpec) -> Result<StressWeight> {
    Ok(match spec {
        StressSpec::Perfect => StressWeight::Perfect,
        StressSpec::Shear { s, t } => {
            s.check_periodic()?;
            t.check_periodic()?;
            StressWeight::ShearImperfection { s, t }
        }
        StressSpec::Hoop { sigma } => {
            sigma.check_periodic()?;
            StressWeight::HoopImperfection { sigma }
        }
    })
}

impl StressWeight {
    /// Cylindrical components, rows and columns ordered (r, θ, z).
    pub fn tensor(&self, theta: f64, z: f64) -> [[f64; 3]; 3] {
        let mut s = [[0.0; 3]; 3];
        match self {
            StressWeight::Perfect => s[2][2] = 1.0,
            StressWeight::ShearImperfection { s: sf, t } => {
                let shear = sf.eval(theta);
                s[1][2] = shear;
                s[2][1] = shear;
                s[2][2] = t.eval(theta) - z * sf.derivative(theta);
            }
            StressWeight::HoopImperfection { sigma } => s[1][1] = sigma.eval(theta),
        }
        s
    }

    pub fn name(&self) -> &'static str {
        match self {
            StressWeight::Perfect => "perfect",
            StressWeight::ShearImperfection { .. } => "shear",
            StressWeight::HoopImperfection { .. } => "hoop",
        }
    }
}
