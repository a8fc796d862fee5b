use std::fmt::Write as _;

use serde_json::{json, Value};
use wigner_bounds::bounds::{
    branch_point, coherent_lower_estimate_with, cs_delta_lower, displacement_for_mu_g, surface_parameters,
    surface_section, ultimate_upper,
};
use wigner_bounds::extremal::verify_against_closed_form_with;
use wigner_bounds::phase_core::{
    covariance_of_with, gaussian_reference, non_gaussianity, normalization, overlap_with, purity_with,
};
use wigner_bounds::physicality::check_candidate_with;
use wigner_bounds::{BoundCurve, Error, ExtremalSpec, Verdict, Wigner};

use crate::input::parse_wigner_file;
use crate::output::{metadata_json, metadata_line, num};
use crate::{CliError, Settings, SurfaceArgs, UltimateArgs, VerifyArgs};

/// Numerical errors keep their category but gain the grid point they occurred at.
fn at_point(mu_g: f64, param: f64) -> impl Fn(Error) -> CliError {
    move |e| match CliError::from(e) {
        CliError::Numerical(m) => CliError::Numerical(format!("at mu_g={mu_g}, param={param}: {m}")),
        other => other,
    }
}

fn linear_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|i| {
            if i + 1 == steps {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (steps - 1) as f64
            }
        })
        .collect()
}

/// Ultimate-curve grid `μ_G = i/N`, `i = 1..=N`.
pub(crate) fn ultimate_grid(steps: usize) -> Vec<f64> {
    (1..=steps).map(|i| i as f64 / steps as f64).collect()
}

pub fn surface_csv(args: &SurfaceArgs, settings: &Settings) -> Result<String, CliError> {
    let (lo, hi) = (args.mu_g_min, args.mu_g_max);
    if !(lo > 0.0 && lo < hi && hi <= 1.0) {
        return Err(CliError::Usage(format!(
            "--mu-g-min/--mu-g-max must satisfy 0 < min < max <= 1, got {lo} and {hi}"
        )));
    }
    if args.mu_g_steps < 2 {
        return Err(CliError::Usage(format!(
            "--mu-g-steps must be >= 2, got {}",
            args.mu_g_steps
        )));
    }
    if args.params_per_branch < 2 {
        return Err(CliError::Usage(format!(
            "--params-per-branch must be >= 2, got {}",
            args.params_per_branch
        )));
    }
    let params = surface_parameters(args.params_per_branch)?;
    let mut out = metadata_line("surface", settings);
    out.push_str("\nmu_g,branch,param,mu_ex,overlap_ex,delta_ex\n");
    for mu_g in linear_grid(lo, hi, args.mu_g_steps) {
        for &(branch, param) in &params {
            let p = branch_point(mu_g, branch, param).map_err(at_point(mu_g, param))?;
            if !(p.mu_ex.is_finite() && p.overlap_ex.is_finite() && p.delta_ex.is_finite()) {
                return Err(CliError::Numerical(format!(
                    "at mu_g={mu_g}, param={param}: non-finite surface point"
                )));
            }
            writeln!(
                out,
                "{},{},{},{},{},{}",
                num(mu_g),
                branch,
                num(param),
                num(p.mu_ex),
                num(p.overlap_ex),
                num(p.delta_ex)
            )
            .expect("writing to a String cannot fail");
        }
    }
    Ok(out)
}

pub fn ultimate_csv(args: &UltimateArgs, settings: &Settings) -> Result<String, CliError> {
    if args.mu_g_steps < 2 {
        return Err(CliError::Usage(format!(
            "--mu-g-steps must be >= 2, got {}",
            args.mu_g_steps
        )));
    }
    let grid = ultimate_grid(args.mu_g_steps);
    let lower = if args.with_lower {
        let ds: Vec<f64> = grid.iter().map(|&m| displacement_for_mu_g(m)).collect();
        Some(
            coherent_lower_estimate_with(&ds, &settings.numerics).map_err(|e| match CliError::from(e) {
                CliError::Numerical(m) => CliError::Numerical(format!("coherent lower estimate: {m}")),
                other => other,
            })?,
        )
    } else {
        None
    };
    let mut out = metadata_line("ultimate", settings);
    out.push_str(if lower.is_some() {
        "\nmu_g,delta_upper,delta_lower\n"
    } else {
        "\nmu_g,delta_upper\n"
    });
    for &mu_g in &grid {
        let upper = ultimate_upper(mu_g).map_err(at_point(mu_g, 1.0))?;
        write!(out, "{},{}", num(mu_g), num(upper)).expect("writing to a String cannot fail");
        if let Some(curve) = &lower {
            let v = resample(curve, mu_g)
                .ok_or_else(|| CliError::Numerical(format!("lower estimate does not cover mu_g={mu_g}")))?;
            write!(out, ",{}", num(v)).expect("writing to a String cannot fail");
        }
        out.push('\n');
    }
    Ok(out)
}

/// Monotone interpolation, extended to the nearest sample when `mu_g` lies
/// just outside the sampled range through quadrature rounding.
fn resample(curve: &BoundCurve, mu_g: f64) -> Option<f64> {
    curve.interpolate(mu_g).or_else(|| {
        let pts = curve.points();
        let (first, last) = (pts.first()?, pts.last()?);
        if (mu_g - first.0).abs() <= 1e-8 {
            Some(first.1)
        } else if (mu_g - last.0).abs() <= 1e-8 {
            Some(last.1)
        } else {
            None
        }
    })
}

fn verdict_json(v: Verdict) -> Value {
    match v {
        Verdict::PassedUpToNmax => json!({"kind": "PassedUpToNmax", "n": null}),
        Verdict::FailedAtN(n) => json!({"kind": "FailedAtN", "n": n}),
        Verdict::MarginalNegative => json!({"kind": "MarginalNegative", "n": null}),
    }
}

pub fn check_report(text: &str, max_n: u32, settings: &Settings) -> Result<Value, CliError> {
    let input = parse_wigner_file(text)?;
    let num = settings.numerics;
    let f = input.function;
    let w = Wigner::Radial(f.clone());
    let norm = normalization(&w, &num)?;
    let loose = num.unchecked();
    let cov = covariance_of_with(&w, &num)?;
    let reference = gaussian_reference(&cov)?;
    let mu_g = reference.purity();
    let mu = purity_with(&w, &loose)?;
    let tr = overlap_with(&w, &reference.wigner(), &loose)?;
    let delta = non_gaussianity(mu, mu_g, tr);
    let extremal_upper = if mu_g <= 1.0 {
        surface_section(mu, mu_g)?.max_delta()
    } else {
        None
    };
    let exceeds = extremal_upper.is_some_and(|u| delta > u + 1e-9);
    let report = check_candidate_with(&f, max_n, &num)?;
    Ok(json!({
        "metadata": metadata_json("check", settings),
        "input_type": input.kind,
        "approximate": f.is_sampled(),
        "normalization": norm,
        "normalization_residual": norm - 1.0,
        "covariance": {"g_xx": cov.g_xx, "g_xp": cov.g_xp, "g_pp": cov.g_pp},
        "purity": mu,
        "mu_g": mu_g,
        "overlap_gaussian": tr,
        "delta": delta,
        "cs_lower": cs_delta_lower(mu, mu_g),
        "extremal_upper": extremal_upper,
        "exceeds_upper_bound": exceeds,
        "physicality": {
            "verdict": verdict_json(report.verdict),
            "n_max": report.n_max,
            "marginal_min": report.marginal_min,
            "first_negative_n": report.first_negative_n,
            "indeterminate": report.indeterminate,
            "overlaps": report.overlaps.iter().map(|&(n, v)| json!([n, v])).collect::<Vec<_>>(),
        },
    }))
}

/// Oracle report and its largest relative error.
pub fn verify_report(args: &VerifyArgs, settings: &Settings) -> Result<(Value, f64), CliError> {
    let spec = ExtremalSpec::new(args.mu_g, args.branch.into(), args.param)?;
    let rep = verify_against_closed_form_with(&spec, &settings.numerics).map_err(at_point(args.mu_g, args.param))?;
    let value = json!({
        "metadata": metadata_json("verify", settings),
        "branch": rep.branch.as_str(),
        "mu_g": rep.mu_g,
        "param": rep.param,
        "r_lo": rep.r_lo,
        "r_hi": rep.r_hi,
        "purity_numeric": rep.purity_num,
        "purity_closed_form": rep.purity_formula,
        "overlap_numeric": rep.overlap_num,
        "overlap_closed_form": rep.overlap_formula,
        "purity_rel_err": rep.purity_rel_err,
        "overlap_rel_err": rep.overlap_rel_err,
        "max_rel_err": rep.max_rel_err,
        "purity_ratio": rep.purity_ratio,
        "tolerance": crate::ORACLE_TOL,
        "pass": rep.max_rel_err <= crate::ORACLE_TOL,
    });
    Ok((value, rep.max_rel_err))
}
