//! Quadratic forms of single Fourier modes
//! u_r = a(r) sin(m̂z) cos(nθ), u_θ = b(r) sin(m̂z) sin(nθ), u_z = c(r) cos(m̂z) cos(nθ),
//! and the torsional partner with cos and sin in θ exchanged, which only
//! differs from the first family when n = 0.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;

use super::basis::RadialGrid;
use crate::error::{Error, Result};
use crate::koiter::WaveNumbers;
use crate::material::ShellGeometry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Parity {
    /// u_r ∝ cos nθ
    Even,
    /// u_r ∝ sin nθ; only distinct for n = 0 (pure torsion).
    Odd,
}

/// The four gradient groups bounded by ‖e‖² with different powers of h.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ComponentGroup {
    /// (θθ) and (zz)
    ThetaThetaZz,
    /// (rθ) and (θr)
    RThetaThetaR,
    /// u_r, (rz) and (zr)
    UrRzZr,
    /// (θz) and (zθ)
    ThetaZZTheta,
}

impl ComponentGroup {
    pub const ALL: [ComponentGroup; 4] = [
        ComponentGroup::ThetaThetaZz,
        ComponentGroup::RThetaThetaR,
        ComponentGroup::UrRzZr,
        ComponentGroup::ThetaZZTheta,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            ComponentGroup::ThetaThetaZz => "thth-zz",
            ComponentGroup::RThetaThetaR => "rth-thr",
            ComponentGroup::UrRzZr => "ur-rz-zr",
            ComponentGroup::ThetaZZTheta => "thz-zth",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.tag() == tag)
    }

    /// Exponent of h in the predicted growth of sup |group|²/‖e‖².
    pub fn predicted_exponent(&self) -> f64 {
        match self {
            ComponentGroup::ThetaThetaZz => 0.0,
            ComponentGroup::RThetaThetaR => -1.5,
            ComponentGroup::UrRzZr => -1.0,
            ComponentGroup::ThetaZZTheta => -0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FormKind {
    StrainNormSq,
    GradNormSq,
    /// ‖(∇u)_{αβ}‖², indices ordered (r, θ, z).
    ComponentNormSq(usize, usize),
    Group(ComponentGroup),
    UrNormSq,
    UrzNormSq,
    UthzNormSq,
}

const UR: usize = 9;
const fn idx(a: usize, b: usize) -> usize {
    3 * a + b
}

/// Trigonometric type of each of the ten tabulated quantities (nine
/// gradient entries and u_r): (sin m̂z or cos m̂z, cos nθ or sin nθ).
fn entry_types(parity: Parity) -> [(bool, bool); 10] {
    // (z is sine, θ is cosine) for the even family
    let even = [
        (true, true),   // rr
        (true, false),  // rθ
        (false, true),  // rz
        (true, false),  // θr
        (true, true),   // θθ
        (false, false), // θz
        (false, true),  // zr
        (false, false), // zθ
        (true, true),   // zz
        (true, true),   // u_r
    ];
    match parity {
        Parity::Even => even,
        Parity::Odd => even.map(|(z, t)| (z, !t)),
    }
}

/// ∫∫ T² dθ dz for each tabulated quantity.
fn trig_weights(wn: &WaveNumbers, l: f64, parity: Parity) -> [f64; 10] {
    let wz = |sine: bool| match (sine, wn.m) {
        (true, 0) => 0.0,
        (false, 0) => l,
        _ => 0.5 * l,
    };
    let wt = |cosine: bool| match (cosine, wn.n) {
        (true, 0) => 2.0 * PI,
        (false, 0) => 0.0,
        _ => PI,
    };
    entry_types(parity).map(|(z, t)| wz(z) * wt(t))
}

/// 10×10 weight matrix W such that the integrand of the form is vᵀWv for
/// v = (entries of ∇u, u_r).
fn weight_matrix(kind: FormKind, tw: &[f64; 10]) -> [[f64; 10]; 10] {
    let mut w = [[0.0; 10]; 10];
    let diag = |w: &mut [[f64; 10]; 10], i: usize| w[i][i] += tw[i];
    match kind {
        FormKind::GradNormSq => (0..9).for_each(|i| diag(&mut w, i)),
        FormKind::StrainNormSq => {
            for a in 0..3 {
                diag(&mut w, idx(a, a));
                for b in (a + 1)..3 {
                    // 2 |½(x + y)|² = ½ (x + y)²
                    let (i, j) = (idx(a, b), idx(b, a));
                    w[i][i] += 0.5 * tw[i];
                    w[j][j] += 0.5 * tw[i];
                    w[i][j] += 0.5 * tw[i];
                    w[j][i] += 0.5 * tw[i];
                }
            }
        }
        FormKind::ComponentNormSq(a, b) => diag(&mut w, idx(a, b)),
        FormKind::UrNormSq => diag(&mut w, UR),
        FormKind::UrzNormSq => diag(&mut w, idx(0, 2)),
        FormKind::UthzNormSq => diag(&mut w, idx(1, 2)),
        FormKind::Group(g) => {
            let ids: &[usize] = match g {
                ComponentGroup::ThetaThetaZz => &[idx(1, 1), idx(2, 2)],
                ComponentGroup::RThetaThetaR => &[idx(0, 1), idx(1, 0)],
                ComponentGroup::UrRzZr => &[UR, idx(0, 2), idx(2, 0)],
                ComponentGroup::ThetaZZTheta => &[idx(1, 2), idx(2, 1)],
            };
            ids.iter().for_each(|&i| diag(&mut w, i));
        }
    }
    w
}

/// Which of (a, b, c) carry a nonzero form for this mode.
fn active_components(wn: &WaveNumbers, parity: Parity) -> [bool; 3] {
    match (parity, wn.m, wn.n) {
        (Parity::Even, 0, _) => [false, false, true],
        (Parity::Even, _, 0) => [true, false, true],
        (Parity::Even, _, _) => [true, true, true],
        (Parity::Odd, 0, _) => [false, false, false],
        (Parity::Odd, _, 0) => [false, true, false],
        (Parity::Odd, _, _) => [true, true, true],
    }
}

#[derive(Debug, Clone)]
pub struct QuadraticFormPair {
    pub s: DMatrix<f64>,
    pub m: DMatrix<f64>,
    /// For each reduced DOF, (component 0..3, basis index); a DOF eliminated
    /// by the zero-mean constraint is not listed.
    pub dof_map: Vec<(usize, usize)>,
}

/// Assembler for one mode: the ten tabulated quantities at each radial node
/// as linear functionals of the radial coefficients.
struct ModeTable<'a> {
    grid: &'a RadialGrid,
    wn: WaveNumbers,
    parity: Parity,
}

impl ModeTable<'_> {
    /// Row vectors (length 3N) of the ten quantities at node q.
    fn rows(&self, q: usize) -> [Vec<(usize, f64)>; 10] {
        let g = self.grid;
        let nb = g.dim();
        let r = g.r[q];
        let mh = self.wn.m_hat;
        let n = match self.parity {
            Parity::Even => self.wn.n as f64,
            Parity::Odd => -(self.wn.n as f64),
        };
        let (a0, b0, c0) = (0, nb, 2 * nb);
        let v = |k: usize| g.val[(q, k)];
        let d = |k: usize| g.der[(q, k)];
        let mut rows: [Vec<(usize, f64)>; 10] = Default::default();
        for k in 0..nb {
            rows[idx(0, 0)].push((a0 + k, d(k)));
            rows[idx(0, 1)].push((a0 + k, -n * v(k) / r));
            rows[idx(0, 1)].push((b0 + k, -v(k) / r));
            rows[idx(0, 2)].push((a0 + k, mh * v(k)));
            rows[idx(1, 0)].push((b0 + k, d(k)));
            rows[idx(1, 1)].push((b0 + k, n * v(k) / r));
            rows[idx(1, 1)].push((a0 + k, v(k) / r));
            rows[idx(1, 2)].push((b0 + k, mh * v(k)));
            rows[idx(2, 0)].push((c0 + k, d(k)));
            rows[idx(2, 1)].push((c0 + k, -n * v(k) / r));
            rows[idx(2, 2)].push((c0 + k, -mh * v(k)));
            rows[UR].push((a0 + k, v(k)));
        }
        rows
    }

    fn assemble(&self, kinds: &[FormKind], l: f64) -> Vec<DMatrix<f64>> {
        let dim = 3 * self.grid.dim();
        let tw = trig_weights(&self.wn, l, self.parity);
        let ws: Vec<[[f64; 10]; 10]> = kinds.iter().map(|k| weight_matrix(*k, &tw)).collect();
        let mut out = vec![DMatrix::zeros(dim, dim); kinds.len()];
        for q in 0..self.grid.nodes() {
            let jac = self.grid.w[q] * self.grid.r[q];
            let rows = self.rows(q);
            for (w, mat) in ws.iter().zip(out.iter_mut()) {
                for i in 0..10 {
                    for j in 0..10 {
                        let wij = w[i][j];
                        if wij == 0.0 {
                            continue;
                        }
                        let c = jac * wij;
                        for &(p, x) in &rows[i] {
                            for &(s, y) in &rows[j] {
                                mat[(p, s)] += c * x * y;
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// Assembles the forms of a single mode. Inactive components are dropped and
/// for m = n = 0 the zero-mean condition on u_z removes one DOF.
pub fn assemble_mode_forms(
    wn: &WaveNumbers,
    parity: Parity,
    geometry: &ShellGeometry,
    grid: &RadialGrid,
    numerator: FormKind,
    denominator: FormKind,
) -> Result<QuadraticFormPair> {
    let mut mats = assemble_forms(wn, parity, geometry, grid, &[numerator, denominator])?;
    let m = mats.pop().unwrap();
    let s = mats.pop().unwrap();
    let (s, m, dof_map) = reduce(wn, parity, grid, s, m)?;
    Ok(QuadraticFormPair { s, m, dof_map })
}

/// Full 3N×3N matrices of several forms, before any DOF elimination.
pub fn assemble_forms(
    wn: &WaveNumbers,
    parity: Parity,
    geometry: &ShellGeometry,
    grid: &RadialGrid,
    kinds: &[FormKind],
) -> Result<Vec<DMatrix<f64>>> {
    if wn.n == 0 && parity == Parity::Odd && wn.m == 0 {
        return Err(Error::Shape("the odd family is empty for m = n = 0".into()));
    }
    let t = ModeTable {
        grid,
        wn: *wn,
        parity,
    };
    Ok(t.assemble(kinds, geometry.l))
}

/// Restricts a pair of full matrices to the active DOFs of the mode.
pub fn reduce(
    wn: &WaveNumbers,
    parity: Parity,
    grid: &RadialGrid,
    s: DMatrix<f64>,
    m: DMatrix<f64>,
) -> Result<(DMatrix<f64>, DMatrix<f64>, Vec<(usize, usize)>)> {
    let nb = grid.dim();
    let active = active_components(wn, parity);
    let mut dofs: Vec<(usize, usize)> = Vec::new();
    for (c, on) in active.iter().enumerate() {
        if *on {
            dofs.extend((0..nb).map(|k| (c, k)));
        }
    }
    // T maps reduced coordinates to full ones
    let full = |&(c, k): &(usize, usize)| c * nb + k;
    let mut cols: Vec<Vec<(usize, f64)>> = dofs.iter().map(|d| vec![(full(d), 1.0)]).collect();
    let mut map = dofs.clone();
    if wn.m == 0 && wn.n == 0 {
        // eliminate the c-coefficient with the largest mean: c_p = −Σ g_k c_k / g_p
        let g = &grid.mean;
        let p = (0..nb)
            .max_by(|i, j| g[*i].abs().total_cmp(&g[*j].abs()))
            .unwrap();
        let pos = dofs.iter().position(|d| *d == (2, p)).unwrap();
        cols.remove(pos);
        map.remove(pos);
        for col in cols.iter_mut() {
            let (c, k) = (col[0].0 / nb, col[0].0 % nb);
            if c == 2 {
                col.push((2 * nb + p, -g[k] / g[p]));
            }
        }
    }
    let dim = cols.len();
    if dim == 0 {
        return Err(Error::Shape(format!(
            "mode {wn:?} {parity:?} has no degrees of freedom"
        )));
    }
    let project = |a: &DMatrix<f64>| {
        let mut out = DMatrix::zeros(dim, dim);
        for (i, ci) in cols.iter().enumerate() {
            for (j, cj) in cols.iter().enumerate() {
                let mut acc = 0.0;
                for &(p, x) in ci {
                    for &(q, y) in cj {
                        acc += x * a[(p, q)] * y;
                    }
                }
                out[(i, j)] = acc;
            }
        }
        out
    };
    Ok((project(&s), project(&m), map))
}
