use rayon::prelude::*;
use serde::Serialize;

use super::basis::{RadialGrid, RadialScheme};
use super::forms::ComponentGroup;
use super::scan::{component_bound, korn_constant, ScanBounds, ScanOutcome};
use crate::error::{Error, Result};
use crate::material::ShellGeometry;
use crate::scaling::{fit_exponent, ScalingFit};

/// Which extremal quantity a sweep tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepQuantity {
    Korn,
    Component(ComponentGroup),
}

impl SweepQuantity {
    pub fn name(&self) -> &'static str {
        match self {
            SweepQuantity::Korn => "K",
            SweepQuantity::Component(g) => g.tag(),
        }
    }

    pub fn predicted_exponent(&self) -> f64 {
        match self {
            SweepQuantity::Korn => 1.5,
            SweepQuantity::Component(g) => g.predicted_exponent(),
        }
    }

    fn evaluate(
        &self,
        geometry: &ShellGeometry,
        bounds: ScanBounds,
        grid: &RadialGrid,
    ) -> Result<ScanOutcome> {
        match *self {
            SweepQuantity::Korn => korn_constant(geometry, bounds, grid),
            SweepQuantity::Component(g) => component_bound(geometry, g, bounds, grid),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub h: f64,
    pub value: f64,
    pub m: u32,
    pub n: u32,
    /// value / h^predicted
    pub normalized: f64,
    /// The same scan with the radial resolution doubled.
    pub refined: f64,
    /// |refined / value − 1|
    pub drift: f64,
    pub on_boundary: bool,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub quantity: SweepQuantity,
    pub predicted: f64,
    pub l: f64,
    pub basis_size: usize,
    pub rows: Vec<SweepRow>,
    pub fit: ScalingFit,
}

impl SweepReport {
    pub fn max_drift(&self) -> f64 {
        self.rows.iter().map(|r| r.drift).fold(0.0, f64::max)
    }

    pub fn max_value(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.value)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Scan the quantity at every h with a Legendre radial basis of the given
/// size, repeat with double the size, and fit the exponent.
pub fn sweep(
    quantity: SweepQuantity,
    h_list: &[f64],
    l: f64,
    basis_size: usize,
    bounds: Option<ScanBounds>,
) -> Result<SweepReport> {
    if h_list.len() < 4 {
        return Err(Error::Arity {
            needed: 4,
            got: h_list.len(),
        });
    }
    let rows: Vec<Result<SweepRow>> = h_list
        .par_iter()
        .map(|&h| {
            let geometry = ShellGeometry::new(h, l)?;
            let b = bounds.unwrap_or_else(|| ScanBounds::default_for(&geometry));
            let grid = RadialGrid::new(&geometry, RadialScheme::Legendre, basis_size)?;
            let out = quantity.evaluate(&geometry, b, &grid)?;
            let fine = quantity.evaluate(&geometry, b, &grid.refined(&geometry)?)?;
            Ok(SweepRow {
                h,
                value: out.value,
                m: out.m,
                n: out.n,
                normalized: out.value / h.powf(quantity.predicted_exponent()),
                refined: fine.value,
                drift: (fine.value / out.value - 1.0).abs(),
                on_boundary: out.on_boundary,
                max_residual: out.max_residual.max(fine.max_residual),
            })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.h, r.value)).collect();
    Ok(SweepReport {
        quantity,
        predicted: quantity.predicted_exponent(),
        l,
        basis_size,
        fit: fit_exponent(&pts)?,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn too_few_points() {
        let err = sweep(SweepQuantity::Korn, &[1e-2, 1e-3], 1.0, 6, None).unwrap_err();
        assert!(matches!(err, Error::Arity { needed: 4, got: 2 }));
    }

    #[test]
    fn thick_korn_sweep_is_stable() {
        let hs = [0.2, 0.1, 0.05, 0.025];
        let b = ScanBounds {
            m_max: 30,
            n_max: 30,
        };
        let rep = sweep(SweepQuantity::Korn, &hs, 1.0, 6, Some(b)).unwrap();
        assert!(rep.max_drift() < 1e-6, "{rep:?}");
        assert!(rep.rows.windows(2).all(|w| w[1].value < w[0].value));
    }
}
