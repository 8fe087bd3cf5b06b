use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::basis::RadialGrid;
use super::eigen::{min_rayleigh, RayleighMin};
use super::forms::{assemble_forms, reduce, ComponentGroup, FormKind, Parity};
use crate::error::{Error, Result};
use crate::koiter::WaveNumbers;
use crate::material::ShellGeometry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScanBounds {
    pub m_max: u32,
    pub n_max: u32,
}

impl ScanBounds {
    /// min(512, ⌈3 h^{-1/2}⌉) in both directions.
    pub fn default_for(geometry: &ShellGeometry) -> Self {
        let c = (3.0 / geometry.h.sqrt()).ceil().min(512.0) as u32;
        ScanBounds { m_max: c, n_max: c }
    }
}

/// Parities that carry distinct modes for these wavenumbers.
fn parities(m: u32, n: u32) -> &'static [Parity] {
    if n == 0 && m > 0 {
        &[Parity::Even, Parity::Odd]
    } else {
        &[Parity::Even]
    }
}

/// min ‖e‖²/‖∇u‖² over one mode.
pub fn mode_korn_quotient(
    wn: &WaveNumbers,
    parity: Parity,
    geometry: &ShellGeometry,
    grid: &RadialGrid,
) -> Result<RayleighMin> {
    let mut mats = assemble_forms(
        wn,
        parity,
        geometry,
        grid,
        &[FormKind::StrainNormSq, FormKind::GradNormSq],
    )?;
    let m = mats.pop().unwrap();
    let s = mats.pop().unwrap();
    let (s, m, _) = reduce(wn, parity, grid, s, m)?;
    min_rayleigh(&s, &m)
}

/// max |group|²/‖e‖² over one mode, through the pencil (‖e‖², ‖e‖² + |group|²).
pub fn mode_component_ratio(
    wn: &WaveNumbers,
    parity: Parity,
    group: ComponentGroup,
    geometry: &ShellGeometry,
    grid: &RadialGrid,
) -> Result<(f64, f64)> {
    let mut mats = assemble_forms(
        wn,
        parity,
        geometry,
        grid,
        &[FormKind::StrainNormSq, FormKind::Group(group)],
    )?;
    let c = mats.pop().unwrap();
    let s = mats.pop().unwrap();
    let denom = &s + &c;
    let (s, denom, _) = reduce(wn, parity, grid, s, denom)?;
    let r = min_rayleigh(&s, &denom)?;
    Ok((1.0 / r.value - 1.0, r.residual))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanOutcome {
    pub value: f64,
    pub m: u32,
    pub n: u32,
    /// The extremal mode sits on the edge of the scanned window.
    pub on_boundary: bool,
    pub evaluations: usize,
    /// Largest relative eigen residual among evaluated modes.
    pub max_residual: f64,
}

fn axis(max: u32) -> Vec<u32> {
    let mut v: Vec<u32> = (0..=max.min(12)).collect();
    let mut x = 12.0f64;
    loop {
        x *= 1.2;
        let k = x.round() as u32;
        if k >= max {
            break;
        }
        v.push(k);
    }
    if *v.last().unwrap() != max {
        v.push(max);
    }
    v
}

/// Coarse grid over the wavenumber box followed by local integer refinement
/// around the current extremum until it stops moving.
fn scan<F>(bounds: ScanBounds, minimize: bool, m_min: u32, eval: F) -> Result<ScanOutcome>
where
    F: Fn(u32, u32) -> Result<(f64, f64)> + Sync,
{
    if bounds.m_max < m_min {
        return Err(Error::Configuration("empty wavenumber window".into()));
    }
    let mut memo: BTreeMap<(u32, u32), (f64, f64)> = BTreeMap::new();
    let better = |a: f64, b: f64| if minimize { a < b } else { a > b };
    let run = |pairs: Vec<(u32, u32)>, memo: &mut BTreeMap<(u32, u32), (f64, f64)>| -> Result<()> {
        let todo: Vec<(u32, u32)> = pairs
            .into_iter()
            .filter(|p| !memo.contains_key(p))
            .collect();
        let vals: Vec<Result<(f64, f64)>> = todo.par_iter().map(|&(m, n)| eval(m, n)).collect();
        for (p, v) in todo.into_iter().zip(vals) {
            memo.insert(p, v?);
        }
        Ok(())
    };
    let ms: Vec<u32> = axis(bounds.m_max)
        .into_iter()
        .filter(|m| *m >= m_min)
        .collect();
    let ns = axis(bounds.n_max);
    let coarse: Vec<(u32, u32)> = ms
        .iter()
        .flat_map(|&m| ns.iter().map(move |&n| (m, n)))
        .collect();
    run(coarse, &mut memo)?;
    let best_of = |memo: &BTreeMap<(u32, u32), (f64, f64)>| {
        let mut best: Option<((u32, u32), f64)> = None;
        for (&p, &(v, _)) in memo.iter() {
            if best.is_none_or(|(_, b)| better(v, b)) {
                best = Some((p, v));
            }
        }
        best.unwrap()
    };
    let mut best = best_of(&memo);
    for _ in 0..50 {
        let (bm, bn) = best.0;
        let rm = 3.max(bm / 5);
        let rn = 3.max(bn / 5);
        let window: Vec<(u32, u32)> = (bm.saturating_sub(rm).max(m_min)
            ..=(bm + rm).min(bounds.m_max))
            .flat_map(|m| {
                (bn.saturating_sub(rn)..=(bn + rn).min(bounds.n_max)).map(move |n| (m, n))
            })
            .collect();
        run(window, &mut memo)?;
        let next = best_of(&memo);
        if next.0 == best.0 {
            break;
        }
        best = next;
    }
    let ((m, n), value) = best;
    Ok(ScanOutcome {
        value,
        m,
        n,
        on_boundary: m == bounds.m_max || n == bounds.n_max,
        evaluations: memo.len(),
        max_residual: memo.values().map(|v| v.1).fold(0.0, f64::max),
    })
}

/// K(V_h) restricted to the scanned modes: min over (m, n) of the smallest
/// generalized eigenvalue of (‖e‖², ‖∇u‖²).
pub fn korn_constant(
    geometry: &ShellGeometry,
    bounds: ScanBounds,
    grid: &RadialGrid,
) -> Result<ScanOutcome> {
    scan(bounds, true, 0, |m, n| {
        let wn = WaveNumbers::new(m, n, geometry);
        let mut best = (f64::INFINITY, 0.0);
        for &p in parities(m, n) {
            let r = mode_korn_quotient(&wn, p, geometry, grid)?;
            if r.value < best.0 {
                best = (r.value, r.residual.max(best.1));
            }
        }
        Ok(best)
    })
}

/// sup over the scanned modes of |group|²/‖e‖².
pub fn component_bound(
    geometry: &ShellGeometry,
    group: ComponentGroup,
    bounds: ScanBounds,
    grid: &RadialGrid,
) -> Result<ScanOutcome> {
    scan(bounds, false, 0, |m, n| {
        let wn = WaveNumbers::new(m, n, geometry);
        let mut best = (f64::NEG_INFINITY, 0.0);
        for &p in parities(m, n) {
            let (v, res) = mode_component_ratio(&wn, p, group, geometry, grid)?;
            if v > best.0 {
                best = (v, res.max(best.1));
            }
        }
        Ok(best)
    })
}

/// Largest |group|²/‖e‖² over every mode in the full box; exhaustive, meant
/// for small boxes.
pub fn component_ratio_all_modes(
    geometry: &ShellGeometry,
    group: ComponentGroup,
    bounds: ScanBounds,
    grid: &RadialGrid,
) -> Result<f64> {
    let pairs: Vec<(u32, u32)> = (0..=bounds.m_max)
        .flat_map(|m| (0..=bounds.n_max).map(move |n| (m, n)))
        .collect();
    let vals: Vec<Result<f64>> = pairs
        .par_iter()
        .map(|&(m, n)| {
            let wn = WaveNumbers::new(m, n, geometry);
            let mut best = f64::NEG_INFINITY;
            for &p in parities(m, n) {
                best = best.max(mode_component_ratio(&wn, p, group, geometry, grid)?.0);
            }
            Ok(best)
        })
        .collect();
    let mut best = f64::NEG_INFINITY;
    for v in vals {
        best = best.max(v?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_is_sorted_and_capped() {
        for max in [0, 5, 12, 13, 40, 512] {
            let a = axis(max);
            assert!(a.windows(2).all(|w| w[0] < w[1]), "{a:?}");
            assert_eq!(*a.last().unwrap(), max);
        }
    }

    #[test]
    fn scan_finds_quadratic_minimum() {
        let b = ScanBounds {
            m_max: 300,
            n_max: 300,
        };
        let out = scan(b, true, 1, |m, n| {
            let (x, y) = (m as f64 - 37.0, n as f64 - 151.0);
            Ok((x * x + 2.0 * y * y + 0.1 * x * y, 0.0))
        })
        .unwrap();
        assert_eq!((out.m, out.n), (37, 151));
        assert!(!out.on_boundary);
    }
}
