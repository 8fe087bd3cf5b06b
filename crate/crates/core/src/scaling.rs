use serde::Serialize;

use crate::error::{Error, Result};

/// Power law value ≈ prefactor · h^exponent fitted in log-log coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingFit {
    pub exponent: f64,
    pub prefactor: f64,
    /// Largest |log value − fitted log value|.
    pub max_residual: f64,
}

pub fn fit_exponent(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < 4 {
        return Err(Error::Arity {
            needed: 4,
            got: points.len(),
        });
    }
    for (i, &(h, v)) in points.iter().enumerate() {
        if !(h > 0.0) || !(v > 0.0) {
            return Err(Error::domain(
                "points",
                format!("({h}, {v}) is not positive"),
            ));
        }
        if points[..i].iter().any(|p| p.0 == h) {
            return Err(Error::domain("points", format!("h = {h} appears twice")));
        }
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).abs())
        .fold(0.0, f64::max);
    Ok(ScalingFit {
        exponent: slope,
        prefactor: intercept.exp(),
        max_residual,
    })
}

/// h-values n^{-4}, so that floor(h^{-1/4}) recovers n without rounding loss.
pub fn quartic_h_list(ns: &[u32]) -> Vec<f64> {
    ns.iter().map(|&n| (n as f64).powi(-4)).collect()
}

/// floor(h^{-1/4}), robust to rounding when h is (nearly) an inverse fourth power.
pub fn quartic_index(h: f64) -> u32 {
    let x = h.powf(-0.25);
    let r = x.round();
    if (x - r).abs() < 1e-9 * r {
        r as u32
    } else {
        x.floor() as u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn synthetic_power_laws() {
        let hs = [1e-1, 1e-2, 1e-3, 1e-4];
        let pts: Vec<_> = hs.iter().map(|&h: &f64| (h, h.powf(1.5))).collect();
        let f = fit_exponent(&pts).unwrap();
        assert_relative_eq!(f.exponent, 1.5, epsilon = 1e-12);
        assert!(f.max_residual <= 1e-12);
        let pts: Vec<_> = hs.iter().map(|&h: &f64| (h, 3.0 * h.powf(1.25))).collect();
        let f = fit_exponent(&pts).unwrap();
        assert_relative_eq!(f.exponent, 1.25, epsilon = 1e-12);
        assert_relative_eq!(f.prefactor, 3.0, max_relative = 1e-10);
    }

    #[test]
    fn arity_and_domain_errors() {
        assert!(matches!(
            fit_exponent(&[(0.1, 1.0); 3]),
            Err(Error::Arity { needed: 4, got: 3 })
        ));
        assert!(fit_exponent(&[(0.1, 1.0), (0.1, 2.0), (0.2, 1.0), (0.3, 1.0)]).is_err());
        assert!(fit_exponent(&[(0.1, -1.0), (0.2, 2.0), (0.3, 1.0), (0.4, 1.0)]).is_err());
    }

    #[test]
    fn quartic_indices() {
        for n in 2..40 {
            assert_eq!(quartic_index(quartic_h_list(&[n])[0]), n);
        }
        assert_eq!(quartic_index(1e-4), 10);
        assert_eq!(quartic_index(2e-4), 8);
    }
}
