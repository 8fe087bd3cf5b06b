use std::path::Path;

use serde_json::json;

use cylbuck::ansatz::{component_scalings, compressiveness_scaling, verify_limits, BumpProfile};
use cylbuck::fixedbc::{fixedbc_limit, fixedbc_mode, FixedBcVariant};
use cylbuck::koiter::{
    buckling_mode, circle_residual, classical_load, default_bounds, koiter_circle_n, lambda_star,
    max_axial_index, minimize_load, optimal_buckling_mode, SearchBounds,
};
use cylbuck::korn::{sweep, ComponentGroup, ScanBounds, SweepQuantity, SweepReport};
use cylbuck::material::{
    derive_material, solve_trivial_branch, stress_weight, Material, ShellGeometry, StressSpec,
    StressWeight, ThetaFunction,
};
use cylbuck::rect::{run_trials, RectKornConfig};
use cylbuck::scaling::quartic_h_list;

use crate::args::*;
use crate::export::{export_surface, tagged_path};
use crate::output::{Outcome, Table};
use crate::{row, CliError};

type Res = Result<Outcome, CliError>;

fn material(a: &MaterialArgs) -> Result<Material, CliError> {
    Ok(derive_material(a.e, a.nu)?)
}

pub fn dispatch(command: &Command, seed: u64) -> Res {
    match command {
        Command::TrivialBranch(a) => trivial_branch(a),
        Command::ClassicalLoad(a) => classical_load_cmd(a),
        Command::KoiterModes(a) => koiter_modes(a),
        Command::Korn(a) => korn(a),
        Command::Components(a) => components(a),
        Command::Ansatz(a) => ansatz(a),
        Command::Fixedbc(a) => fixedbc(a),
        Command::RectKorn(a) => rect_korn(a, seed),
    }
}

fn trivial_branch(a: &TrivialBranchArgs) -> Res {
    let mat = material(&a.material)?;
    let tb = solve_trivial_branch(&mat, a.lambda)?;
    let residual = tb.residual(&mat);
    let mut t = Table::new(&["load", "a", "b", "residual"]);
    t.push(row![tb.load, tb.a, tb.b, residual]);
    let out = Outcome::new(
        json!({"a": tb.a, "b": tb.b, "residual": residual, "load": tb.load, "material": mat}),
        Format::Json,
    );
    Ok(out.with_table(t))
}

fn classical_load_cmd(a: &ClassicalLoadArgs) -> Res {
    let geo = ShellGeometry::new(a.h, a.l)?;
    let mat = material(&a.material)?;
    let bounds = match (a.bounds.mmax, a.bounds.nmax) {
        (None, None) => None,
        (m, n) => {
            let d = default_bounds(&geo, &mat);
            Some(SearchBounds {
                m_max: m.unwrap_or(d.m_max),
                n_max: n.unwrap_or(d.n_max),
            })
        }
    };
    let r = minimize_load(&geo, &mat, bounds)?;
    let excess = r.lambda_hat / r.closed_form - 1.0;
    let result = json!({
        "lambda_hat": r.lambda_hat,
        "m": r.m_star,
        "n": r.n_star,
        "circle_residual": r.circle_residual,
        "closed_form": r.closed_form,
        "relative_excess": excess,
        "circle_n_of_1": koiter_circle_n(1, &geo, mat.big_lambda).ok(),
        "circle_m_max": max_axial_index(&geo, mat.big_lambda),
        "bounds": r.bounds,
        "mode": r.mode,
    });
    let mut t = Table::new(&[
        "lambda_hat",
        "m",
        "n",
        "circle_residual",
        "closed_form",
        "relative_excess",
    ]);
    t.push(row![
        r.lambda_hat,
        r.m_star,
        r.n_star,
        r.circle_residual,
        r.closed_form,
        excess
    ]);
    let mut out = Outcome::new(result, Format::Json).with_table(t);
    out.check(
        excess >= -1e-12,
        format!("discrete load lies below the continuum minimum ({excess:e})"),
    );
    Ok(out)
}

fn koiter_modes(a: &KoiterModesArgs) -> Res {
    let geo = ShellGeometry::new(a.h, a.l)?;
    let mat = material(&a.material)?;
    let closed = classical_load(&geo, &mat);
    let mut t = Table::new(&[
        "m",
        "n",
        "m_hat",
        "lambda_star",
        "ratio",
        "kstar",
        "circle_residual",
        "c_theta",
        "c_z",
    ]);
    let mut modes = vec![];
    let mut artifacts = vec![];
    for &m in &a.m {
        let (coef, field) = match a.coefficients {
            CoefficientsArg::Optimal => optimal_buckling_mode(m, &geo, &mat)?,
            CoefficientsArg::Displayed => buckling_mode(m, &geo, &mat)?,
        };
        let w = coef.wave;
        let lam = lambda_star(&geo, &mat, &w)?;
        let res = circle_residual(geo.h, mat.big_lambda, w.m_hat, w.n as f64);
        let ks = coef.kstar(geo.h, &mat);
        t.push(row![
            m,
            w.n,
            w.m_hat,
            lam,
            lam / closed,
            ks,
            res,
            coef.c_theta,
            coef.c_z
        ]);
        modes.push(coef);
        if let Some(path) = &a.export {
            let path = if a.m.len() > 1 {
                tagged_path(path, &format!("m{m}"))
            } else {
                path.clone()
            };
            artifacts.extend(export_surface(
                &field,
                a.amplitude,
                a.n_theta,
                a.n_z,
                geo.l,
                &path,
            )?);
        }
    }
    let mut out = Outcome::new(json!({"closed_form": closed, "modes": modes}), Format::Csv)
        .with_summary(json!({"closed_form": closed}))
        .with_table(t);
    out.artifacts = artifacts;
    Ok(out)
}

fn scan_bounds(b: &BoundsArgs, h_list: &[f64], l: f64) -> Result<Option<ScanBounds>, CliError> {
    if b.mmax.is_none() && b.nmax.is_none() {
        return Ok(None);
    }
    let h_min = h_list.iter().cloned().fold(f64::INFINITY, f64::min);
    let d = ScanBounds::default_for(&ShellGeometry::new(h_min, l)?);
    Ok(Some(ScanBounds {
        m_max: b.mmax.unwrap_or(d.m_max),
        n_max: b.nmax.unwrap_or(d.n_max),
    }))
}

fn sweep_rows(t: &mut Table, rep: &SweepReport, with_group: bool) {
    for r in &rep.rows {
        let mut cells = row![
            r.h,
            r.value,
            r.m,
            r.n,
            r.normalized,
            r.refined,
            r.drift,
            r.on_boundary,
            r.max_residual
        ];
        if with_group {
            cells.insert(0, rep.quantity.name().to_string());
        }
        t.push(cells);
    }
}

fn sweep_summary(rep: &SweepReport) -> serde_json::Value {
    json!({
        "quantity": rep.quantity.name(),
        "predicted": rep.predicted,
        "fit": rep.fit,
        "max_drift": rep.max_drift(),
        "basis_size": rep.basis_size,
    })
}

fn korn(a: &KornArgs) -> Res {
    let bounds = scan_bounds(&a.bounds, &a.h_list, a.l)?;
    let rep = sweep(SweepQuantity::Korn, &a.h_list, a.l, a.n, bounds)?;
    let mut t = Table::new(&[
        "h",
        "K",
        "m",
        "n",
        "K_over_h1.5",
        "K_refined",
        "drift",
        "on_boundary",
        "max_residual",
    ]);
    sweep_rows(&mut t, &rep, false);
    Ok(Outcome::new(&rep, Format::Csv)
        .with_summary(sweep_summary(&rep))
        .with_table(t))
}

fn components(a: &ComponentsArgs) -> Res {
    let groups: Vec<ComponentGroup> = if a.which == "all" {
        ComponentGroup::ALL.to_vec()
    } else {
        vec![ComponentGroup::from_tag(&a.which).ok_or_else(|| {
            CliError::Usage(format!(
                "unknown group '{}': expected all, thth-zz, rth-thr, ur-rz-zr or thz-zth",
                a.which
            ))
        })?]
    };
    let k = &a.korn;
    let bounds = scan_bounds(&k.bounds, &k.h_list, k.l)?;
    let mut t = Table::new(&[
        "group",
        "h",
        "ratio",
        "m",
        "n",
        "normalized",
        "ratio_refined",
        "drift",
        "on_boundary",
        "max_residual",
    ]);
    let mut reports = vec![];
    for g in groups {
        let rep = sweep(SweepQuantity::Component(g), &k.h_list, k.l, k.n, bounds)?;
        sweep_rows(&mut t, &rep, true);
        reports.push(rep);
    }
    let summary: Vec<_> = reports.iter().map(sweep_summary).collect();
    let mut out = Outcome::new(&reports, Format::Csv)
        .with_summary(summary)
        .with_table(t);
    for rep in &reports {
        if rep.quantity == SweepQuantity::Component(ComponentGroup::ThetaThetaZz) {
            let max = rep.max_value();
            out.check(max <= 1.0 + 1e-10, format!("thth-zz ratio {max} exceeds 1"));
        }
    }
    Ok(out)
}

fn ansatz(a: &AnsatzArgs) -> Res {
    let h_list = a
        .h_list
        .clone()
        .unwrap_or_else(|| quartic_h_list(&[3, 4, 5, 6, 8, 10]));
    let geo = ShellGeometry::new(h_list[0], a.l)?;
    let mat = material(&a.material)?;
    let bump = BumpProfile::new(a.eta0, a.l)?;
    let (bump, stress) = match a.stress {
        StressArg::Perfect => (bump, StressWeight::Perfect),
        StressArg::Shear => (
            bump.with_shear(a.kappa)?,
            stress_weight(StressSpec::Shear {
                s: ThetaFunction::cos(1, 1.0),
                t: ThetaFunction::constant(0.0),
            })?,
        ),
        StressArg::Hoop => (
            bump,
            stress_weight(StressSpec::Hoop {
                sigma: ThetaFunction::constant(1.0),
            })?,
        ),
    };
    let limits = verify_limits(&bump, &h_list, &geo)?;
    let comps = component_scalings(&bump, &h_list, &geo)?;
    let load = compressiveness_scaling(&bump, &h_list, &geo, &mat, &stress)?;
    let (s_q, c_q, ratio_q) = (
        load.get("S").unwrap(),
        load.get("|C|").unwrap(),
        load.get("S/C").unwrap(),
    );
    let mut t = Table::new(&[
        "h",
        "n_h",
        "grad_scaled",
        "grad_deviation",
        "grad_deviation_both",
        "strain_scaled",
        "strain_deviation",
        "S",
        "abs_C",
        "S_over_C",
    ]);
    for (k, r) in limits.rows.iter().enumerate() {
        let ratio = ratio_q
            .rows
            .iter()
            .find(|x| x.h == r.h)
            .map(|x| x.value.to_string())
            .unwrap_or_default();
        let mut cells = row![
            r.h,
            r.n_h,
            r.gradient,
            r.gradient_deviation,
            r.gradient_deviation_both,
            r.strain,
            r.strain_deviation,
            s_q.rows[k].value,
            c_q.rows[k].value
        ];
        cells.push(ratio);
        t.push(cells);
    }
    let fits = |rep: &cylbuck::ansatz::ScalingReport| {
        rep.quantities
            .iter()
            .map(|q| json!({"name": q.name, "predicted": q.predicted, "exponent": q.exponent(), "excluded": q.excluded}))
            .collect::<Vec<_>>()
    };
    let summary = json!({
        "stress": stress.name(),
        "gradient_target": limits.gradient_target,
        "strain_target": limits.strain_target,
        "strain_monotone": limits.strain_monotone(),
        "gradient_monotone": limits.gradient_monotone(),
        "components": fits(&comps),
        "load": fits(&load),
    });
    let result =
        json!({"stress": stress.name(), "limits": limits, "components": comps, "load": load});
    Ok(Outcome::new(result, Format::Csv)
        .with_summary(summary)
        .with_table(t))
}

fn fixedbc(a: &FixedbcArgs) -> Res {
    let mat = material(&a.material)?;
    let variant = match a.variant {
        VariantArg::Simplified => FixedBcVariant::Simplified,
        VariantArg::Refined => FixedBcVariant::Refined,
    };
    let rep = fixedbc_limit(&a.h_list, a.alpha, a.c, a.l, &mat, variant)?;
    let mut t = Table::new(&["h", "m", "n", "k0", "ratio", "limit_expression"]);
    let mut artifacts = vec![];
    for (k, r) in rep.rows.iter().enumerate() {
        t.push(row![r.h, r.m, r.n, r.k0, r.ratio, r.limit_expression]);
        if let Some(path) = &a.export {
            let geo = ShellGeometry::new(r.h, a.l)?;
            let mode = fixedbc_mode(r.m, &geo, &mat, variant)?;
            let path = if rep.rows.len() > 1 {
                tagged_path(path, &format!("h{k}"))
            } else {
                path.clone()
            };
            artifacts.extend(export_surface(
                &mode.field,
                a.amplitude,
                a.n_theta,
                a.n_z,
                a.l,
                Path::new(&path),
            )?);
        }
    }
    let summary = json!({"alpha": rep.alpha, "c": rep.c, "variant": rep.variant});
    let mut out = Outcome::new(&rep, Format::Csv)
        .with_summary(summary)
        .with_table(t);
    out.artifacts = artifacts;
    Ok(out)
}

fn rect_korn(a: &RectKornArgs, seed: u64) -> Res {
    if a.trials == 0 {
        return Err(CliError::Usage("--trials must be positive".into()));
    }
    let cfg = RectKornConfig::new(a.h, a.l, a.trials, seed);
    let rep = run_trials(&cfg)?;
    let mut t = Table::new(&[
        "trials",
        "violations",
        "min_margin",
        "extremal_equality_error",
        "mainest_gradient_ratio",
        "mainest_l2_ratio",
    ]);
    t.push(row![
        a.trials,
        rep.violations,
        rep.min_margin,
        rep.extremal_equality_error,
        rep.mainest_gradient.extreme,
        rep.mainest_l2.extreme
    ]);
    let summary = json!({
        "violations": rep.violations,
        "min_margin": rep.min_margin,
        "extremal_equality_error": rep.extremal_equality_error,
    });
    let mut out = Outcome::new(&rep, Format::Json)
        .with_summary(summary)
        .with_table(t);
    out.check(
        rep.violations == 0,
        format!("{} inequality violations", rep.violations),
    );
    Ok(out)
}
