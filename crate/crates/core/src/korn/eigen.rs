use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct RayleighMin {
    pub value: f64,
    pub vector: DVector<f64>,
    /// ‖Sv − λMv‖ / ‖Mv‖
    pub residual: f64,
}

fn check_symmetric(a: &DMatrix<f64>, name: &str) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Shape(format!("{name} is not square")));
    }
    let scale = a.amax().max(f64::MIN_POSITIVE);
    let asym = (a - a.transpose()).amax();
    if asym > 1e-12 * scale {
        return Err(Error::Shape(format!(
            "{name} is not symmetric (defect {asym:e})"
        )));
    }
    Ok(())
}

/// Smallest generalized eigenvalue of S v = λ M v with M positive-definite.
///
/// Both matrices are first scaled by diag(M)^{-1/2}; the scaled M is
/// Cholesky-factored and the standard problem L⁻¹ S L⁻ᵀ is handed to a dense
/// symmetric eigensolver.
pub fn min_rayleigh(s: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<RayleighMin> {
    check_symmetric(s, "S")?;
    check_symmetric(m, "M")?;
    if s.shape() != m.shape() {
        return Err(Error::Shape("S and M differ in size".into()));
    }
    let n = m.nrows();
    let mut d = DVector::zeros(n);
    for i in 0..n {
        let mii = m[(i, i)];
        if !(mii > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        d[i] = 1.0 / mii.sqrt();
    }
    let scale = |a: &DMatrix<f64>| DMatrix::from_fn(n, n, |i, j| d[i] * a[(i, j)] * d[j]);
    let ms = scale(m);
    let ss = scale(s);
    let chol = ms.cholesky().ok_or(Error::NotPositiveDefinite)?;
    let l = chol.l();
    // C = L⁻¹ S L⁻ᵀ
    let x = l
        .solve_lower_triangular(&ss)
        .ok_or(Error::NotPositiveDefinite)?;
    let c = l
        .solve_lower_triangular(&x.transpose())
        .ok_or(Error::NotPositiveDefinite)?;
    let c = 0.5 * (&c + c.transpose());
    let eig = SymmetricEigen::new(c);
    let (k, &value) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::Shape("empty matrices".into()))?;
    let y = eig.eigenvectors.column(k).into_owned();
    let z = l
        .transpose()
        .solve_upper_triangular(&y)
        .ok_or(Error::NotPositiveDefinite)?;
    let v = z.component_mul(&d);
    let mv = m * &v;
    let residual = (s * &v - value * &mv).norm() / mv.norm();
    Ok(RayleighMin {
        value,
        vector: v,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn trivial_pairs() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let r = min_rayleigh(&m, &m).unwrap();
        assert_relative_eq!(r.value, 1.0, epsilon = 1e-14);
        let s = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 3.0]));
        let r = min_rayleigh(&s, &DMatrix::identity(2, 2)).unwrap();
        assert_relative_eq!(r.value, 2.0, epsilon = 1e-14);
        assert!(r.residual < 1e-14);
    }

    #[test]
    fn indefinite_denominator_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(
            min_rayleigh(&m, &m),
            Err(Error::NotPositiveDefinite)
        ));
    }

    #[test]
    fn badly_scaled_pair() {
        // diagonal scales spanning 16 orders of magnitude
        let n = 6;
        let scales: Vec<f64> = (0..n).map(|i| 10f64.powi(3 * i as i32 - 8)).collect();
        let base_m = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                2.0
            } else {
                0.3 / (1.0 + (i as f64 - j as f64).abs())
            }
        });
        let base_s = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 + i as f64 } else { 0.1 });
        let sc =
            |a: &DMatrix<f64>| DMatrix::from_fn(n, n, |i, j| scales[i] * a[(i, j)] * scales[j]);
        let a = min_rayleigh(&base_s, &base_m).unwrap();
        let b = min_rayleigh(&sc(&base_s), &sc(&base_m)).unwrap();
        assert_relative_eq!(a.value, b.value, max_relative = 1e-12);
        assert!(b.residual < 1e-10);
    }
}
