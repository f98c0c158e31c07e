//! The six subcommands. Each returns JSON results, the flat CSV table, the
//! settings actually used and free-form notes.

use serde_json::{json, Value};
use tra_core::asymptotics::{closed_form_scattering, fit_scattering, phase_distance};
use tra_core::physics::{
    bound_spectrum, eigen_oracle_spectrum, hamiltonian_matrix, map_to_polynomial, max_basis_size, phase_shift,
    reconstruct_wavefunction, representative_models, table1_samples, tridiagonality_audit, EnergyLabel, MatrixOptions,
    PotentialModel, Route, DEFAULT_WILSON_A,
};
use tra_core::polyfam::{
    generalized_orthogonality_defect, orthogonality_defect, poly_eval_closed, poly_eval_recursion, FamilyParams, QuadSpec,
};
use tra_core::quadrature::DeConfig;

use crate::config::{Command, JobConfig};
use crate::output::{Cell, Table};
use crate::{parse, CliError};

pub const DEFAULT_ORACLE_SIZE: usize = 100;
pub const DEFAULT_KMAX: usize = 4;
pub const DEFAULT_DEGREE: usize = 5;
pub const DEFAULT_AUDIT_SIZE: usize = 20;
pub const DEFAULT_CONTROL_SHIFT: f64 = 0.3;
pub const DEFAULT_TRUNCATION: usize = 80;

pub struct Outcome {
    pub results: Value,
    pub table: Table,
    pub settings: Value,
    pub notes: Vec<String>,
}

pub fn run(job: &JobConfig) -> Result<Outcome, CliError> {
    match job.command {
        Command::Spectrum => spectrum(job),
        Command::Phaseshift => phaseshift(job),
        Command::Orthocheck => orthocheck(job),
        Command::Tridiag => tridiag(job),
        Command::Wavefunction => wavefunction(job),
        Command::PolyEval => poly_eval(job),
    }
}

fn require_model(job: &JobConfig) -> Result<PotentialModel, CliError> {
    let name = job.model.as_deref().ok_or_else(|| CliError::usage(format!("{} needs --model", job.command.name())))?;
    parse::model(name, &job.params)
}

fn require_family(job: &JobConfig) -> Result<FamilyParams, CliError> {
    let name = job.family.as_deref().ok_or_else(|| CliError::usage(format!("{} needs --family", job.command.name())))?;
    parse::family(name, &job.params)
}

fn matrix_options(job: &JobConfig) -> MatrixOptions {
    MatrixOptions { tol: job.tolerances.quadrature }
}

fn uses_wilson_a(model: &PotentialModel) -> Option<Option<f64>> {
    match *model {
        PotentialModel::PoschlTeller { a, .. }
        | PotentialModel::TrigScarf { a, .. }
        | PotentialModel::Eckart { a, .. }
        | PotentialModel::RosenMorse { a, .. } => Some(a),
        _ => None,
    }
}

fn wilson_default_note(model: &PotentialModel, notes: &mut Vec<String>) {
    if uses_wilson_a(model) == Some(None) {
        notes.push(format!("Wilson basis parameter a not configured; default a = b = {DEFAULT_WILSON_A} used"));
    }
}

fn spectrum(job: &JobConfig) -> Result<Outcome, CliError> {
    let model = require_model(job)?;
    if let PotentialModel::Table1 { .. } = model {
        return Err(CliError::usage(
            "table1 potentials have no closed-form spectrum (the measure of their H_n polynomials is unknown); use tridiag",
        ));
    }
    let route = parse::route(&model, job.route.as_deref())?;
    let kmax = job.kmax.unwrap_or(DEFAULT_KMAX);
    let mut notes = Vec::new();
    wilson_default_note(&model, &mut notes);
    let closed = bound_spectrum(&model, route, kmax)?;

    let oracle = if let PotentialModel::LogSpectrum { .. } = model {
        notes.push("no Rayleigh-Ritz oracle: no potential is known for this spectrum".into());
        None
    } else {
        Some(eigen_oracle_spectrum(&model, route, job.size.unwrap_or(DEFAULT_ORACLE_SIZE), kmax, matrix_options(job))?)
    };

    let mut levels = Vec::new();
    let mut table = Table { columns: vec!["k", "closed_form", "oracle", "abs_delta", "rel_delta"], rows: Vec::new() };
    let tol = job.tolerances.oracle_relative;
    for level in &closed.energies {
        let o = oracle.as_ref().and_then(|o| o.spectrum.energies.get(level.k)).map(|l| l.value).filter(|v| v.is_finite());
        let abs = o.map(|v| (v - level.value).abs());
        let rel = abs.map(|d| d / level.value.abs().max(f64::MIN_POSITIVE));
        if let Some(r) = rel.filter(|&r| r > tol) {
            notes.push(format!("level {}: oracle deviates by {r:.3e} (relative), above {tol:e}", level.k));
        }
        if oracle.is_some() && o.is_none() {
            notes.push(format!("level {}: oracle produced no eigenvalue", level.k));
        }
        levels.push(json!({ "k": level.k, "closed_form": level.value, "oracle": o, "abs_delta": abs, "rel_delta": rel }));
        table.rows.push(vec![level.k.into(), level.value.into(), o.into(), abs.into(), rel.into()]);
    }
    if closed.boundary {
        notes.push("the last level sits exactly on the threshold".into());
    }

    let results = json!({
        "model": model,
        "route": route,
        "energies": closed.values(),
        "levels": levels,
        "finite": closed.finite,
        "n_max": closed.n_max,
        "boundary": closed.boundary,
        "formula": closed.source,
        "oracle": oracle.as_ref().map(|o| json!({ "M": o.size, "half_size_change": o.half_size_change, "source": o.spectrum.source })),
    });
    let settings = json!({
        "route": route,
        "kmax": kmax,
        "M": oracle.as_ref().map(|o| o.size),
        "quadrature_tol": job.tolerances.quadrature,
        "oracle_relative_tol": tol,
        "wilson_a": uses_wilson_a(&model).map(|_| model.wilson_a()),
    });
    Ok(Outcome { results, table, settings, notes })
}

fn energies(job: &JobConfig, what: &str) -> Result<Vec<f64>, CliError> {
    match (job.energy, job.grid) {
        (Some(e), None) => Ok(vec![e]),
        (None, Some(g)) => Ok(g.points()),
        (Some(_), Some(_)) => Err(CliError::usage(format!("{what}: give --energy or --grid, not both"))),
        (None, None) => Err(CliError::usage(format!("{what} needs --energy or --grid start:stop:count"))),
    }
}

fn phaseshift(job: &JobConfig) -> Result<Outcome, CliError> {
    let model = require_model(job)?;
    let grid = energies(job, "phaseshift")?;
    let mut notes = Vec::new();
    wilson_default_note(&model, &mut notes);
    // the closed Morse phase is the continuous-dual-Hahn one, when that route applies
    let fit_route = match (job.route.as_deref(), &model) {
        (None, PotentialModel::Morse { .. }) if model.validate_for(Route::Cdh).is_ok() => Route::Cdh,
        _ => parse::route(&model, job.route.as_deref())?,
    };
    let window = job.tolerances.fit_window;

    let mut rows = Vec::new();
    let mut table = Table { columns: vec!["energy", "phase"], rows: Vec::new() };
    if job.fit {
        table.columns.extend(["family_phase", "fit_phase", "fit_amplitude", "closed_amplitude", "fit_phase_error", "fit_residual"]);
    }
    for &e in &grid {
        let delta = phase_shift(&model, e)?;
        let mut row = json!({ "energy": e, "phase": delta.phase });
        let mut cells: Vec<Cell> = vec![e.into(), delta.phase.into()];
        if job.fit {
            let map = map_to_polynomial(&model, fit_route, e)?;
            let z = map.z.re;
            let closed = closed_form_scattering(&map.family, z)?;
            let fit = fit_scattering(&map.family, z, &window)?;
            let err = phase_distance(fit.phase, closed.phase);
            row["fit"] = json!({
                "family": map.family,
                "z": z,
                "closed_phase": closed.phase,
                "closed_amplitude": closed.amplitude,
                "phase": fit.phase,
                "amplitude": fit.amplitude,
                "phase_error": err,
                "residual": fit.residual,
            });
            cells.extend([closed.phase.into(), fit.phase.into(), fit.amplitude.into(), closed.amplitude.into(), err.into(), fit.residual.into()]);
        }
        rows.push(row);
        table.rows.push(cells);
    }
    let results = json!({ "model": model, "points": rows });
    let settings = json!({
        "fit": job.fit,
        "fit_route": if job.fit { Some(fit_route) } else { None },
        "fit_window": window,
        "wilson_a": uses_wilson_a(&model).map(|_| model.wilson_a()),
    });
    Ok(Outcome { results, table, settings, notes })
}

fn mixed_regime(p: &FamilyParams) -> bool {
    matches!(*p, FamilyParams::ContinuousDualHahn { mu, .. } | FamilyParams::Wilson { mu, .. } if mu < 0.0)
}

fn orthocheck(job: &JobConfig) -> Result<Outcome, CliError> {
    let family = require_family(job)?;
    let degree = job.degree.unwrap_or(DEFAULT_DEGREE);
    let spec = QuadSpec { de: DeConfig::with_tol(job.tolerances.quadrature), ..QuadSpec::default() };
    let generalized = mixed_regime(&family);
    let mut notes = Vec::new();
    if generalized {
        notes.push("mu < 0: integral plus discrete-sum (generalized) orthogonality relation".into());
    }
    let mut matrix = vec![vec![0.0; degree + 1]; degree + 1];
    let mut table = Table { columns: vec!["n", "m", "defect"], rows: Vec::new() };
    for n in 0..=degree {
        for m in n..=degree {
            let d = if generalized {
                generalized_orthogonality_defect(&family, n, m, &spec)?
            } else {
                orthogonality_defect(&family, n, m, &spec)?
            };
            matrix[n][m] = d;
            matrix[m][n] = d;
        }
    }
    for (n, row) in matrix.iter().enumerate() {
        for (m, &d) in row.iter().enumerate() {
            table.rows.push(vec![n.into(), m.into(), d.into()]);
        }
    }
    let max = matrix.iter().flatten().copied().fold(0.0, f64::max);
    let max_diagonal = (0..=degree).map(|n| matrix[n][n]).fold(0.0, f64::max);
    let results = json!({
        "family": family,
        "relation": if generalized { "generalized" } else { "standard" },
        "degree": degree,
        "defects": matrix,
        "max_defect": max,
        "max_diagonal_defect": max_diagonal,
    });
    let settings = json!({ "degree": degree, "quadrature_tol": spec.de.tol, "tail_tol": spec.tail_tol });
    Ok(Outcome { results, table, settings, notes })
}

fn label(model: &PotentialModel) -> String {
    match model {
        PotentialModel::Table1 { row, .. } => format!("table1 row {row}"),
        m => m.name().to_string(),
    }
}

fn tridiag(job: &JobConfig) -> Result<Outcome, CliError> {
    let single = job.model.is_some();
    let cases: Vec<(PotentialModel, Option<Route>)> = if single {
        let model = require_model(job)?;
        let route = match model {
            PotentialModel::Table1 { .. } => None,
            _ => Some(parse::route(&model, job.route.as_deref())?),
        };
        vec![(model, route)]
    } else {
        representative_models().into_iter().map(|(m, r)| (m, Some(r))).chain(table1_samples().into_iter().map(|m| (m, None))).collect()
    };
    let requested = job.size.unwrap_or(DEFAULT_AUDIT_SIZE);
    let shift = job.control_shift.unwrap_or(DEFAULT_CONTROL_SHIFT);
    let tol = job.tolerances.tridiagonal;
    let opts = matrix_options(job);
    let mut notes = Vec::new();
    if requested < 3 {
        notes.push(format!("M = {requested}: every matrix is trivially tridiagonal and the control cannot fail"));
    }
    let mut audits = Vec::new();
    let mut table =
        Table { columns: vec!["model", "route", "M", "energy", "defect", "tridiagonal", "control_defect", "control_detected"], rows: Vec::new() };
    for (model, route) in &cases {
        let size = match max_basis_size(model, *route)? {
            Some(limit) if limit < requested => {
                notes.push(format!("{}: only {limit} square-integrable basis functions, M reduced from {requested}", label(model)));
                limit
            }
            _ => requested,
        };
        let audit = tridiagonality_audit(model, *route, size, Some(shift), opts)?;
        let yes = audit.defect <= tol;
        let control = audit.control_defect;
        let detected = control.map(|c| c > tol);
        let mut entry = json!({
            "model": model,
            "label": label(model),
            "route": route,
            "basis": audit.basis,
            "M": size,
            "energy": audit.energy,
            "defect": audit.defect,
            "tridiagonal": if yes { "yes" } else { "no" },
            "control_shift": shift,
            "control_defect": control,
            "control_detected": detected,
        });
        if single {
            let pair = hamiltonian_matrix(model, *route, size, None, opts)?;
            let rows: Vec<Vec<f64>> =
                (0..size).map(|i| (0..size).map(|j| pair.h[(i, j)] - audit.energy * pair.s[(i, j)]).collect()).collect();
            entry["matrix"] = json!(rows);
        }
        table.rows.push(vec![
            label(model).into(),
            route.map(|r| r.name()).into(),
            size.into(),
            audit.energy.into(),
            audit.defect.into(),
            (if yes { "yes" } else { "no" }).into(),
            control.into(),
            detected.into(),
        ]);
        audits.push(entry);
    }
    let all = audits.iter().all(|a| a["tridiagonal"] == "yes");
    let results = json!({ "audits": audits, "all_tridiagonal": all });
    let settings = json!({ "M": requested, "control_shift": shift, "tridiagonal_tol": tol, "quadrature_tol": opts.tol });
    Ok(Outcome { results, table, settings, notes })
}

fn wavefunction(job: &JobConfig) -> Result<Outcome, CliError> {
    let model = require_model(job)?;
    let route = match job.route.as_deref() {
        Some(r) => parse::route(&model, Some(r))?,
        None => Route::Mp,
    };
    let label = match (job.state, job.energy) {
        (Some(k), None) => EnergyLabel::Bound(k),
        (None, Some(e)) => EnergyLabel::Continuum(e),
        _ => return Err(CliError::usage("wavefunction needs exactly one of --state K or --energy E")),
    };
    let grid = job.grid.ok_or_else(|| CliError::usage("wavefunction needs --grid start:stop:count for x"))?;
    let truncation = job.size.unwrap_or(DEFAULT_TRUNCATION);
    let sample = reconstruct_wavefunction(&model, route, label, &grid.points(), truncation)?;
    let mut notes = Vec::new();
    if matches!(label, EnergyLabel::Bound(_)) {
        notes.push("bound states are defined up to a constant; norm reports sqrt(c^T S c)".into());
    }
    let mut table = Table { columns: vec!["x", "psi"], rows: Vec::new() };
    for (&x, &v) in sample.x.iter().zip(&sample.values) {
        table.rows.push(vec![x.into(), v.into()]);
    }
    let results = json!({
        "model": model,
        "route": route,
        "label": sample.label,
        "energy": sample.energy,
        "truncation": sample.truncation,
        "tail_estimate": sample.tail_estimate,
        "norm": sample.norm,
        "x": sample.x,
        "psi": sample.values,
    });
    let settings = json!({ "route": route, "M": truncation });
    Ok(Outcome { results, table, settings, notes })
}

fn poly_eval(job: &JobConfig) -> Result<Outcome, CliError> {
    let family = require_family(job)?;
    let degree = job.degree.unwrap_or(DEFAULT_DEGREE);
    let args = match (job.grid, job.energy) {
        (Some(g), None) => g.points(),
        _ => return Err(CliError::usage("poly-eval needs --grid start:stop:count for the arguments")),
    };
    let has_closed = !matches!(family, FamilyParams::HPoly { .. });
    let mut notes = Vec::new();
    if !has_closed {
        notes.push("H_n has no closed form; recursion values only".into());
    }
    let mut points = Vec::new();
    let mut table = Table { columns: vec!["arg", "n", "recursion", "closed_form", "abs_diff"], rows: Vec::new() };
    let mut worst: f64 = 0.0;
    for &x in &args {
        for n in 0..=degree {
            let r = poly_eval_recursion(&family, n, x)?;
            let c = if has_closed { Some(poly_eval_closed(&family, n, x)?) } else { None };
            let d = c.map(|c| (r - c).abs());
            if let Some(d) = d {
                worst = worst.max(d / r.abs().max(1.0));
            }
            points.push(json!({ "arg": x, "n": n, "recursion": r, "closed_form": c, "abs_diff": d }));
            table.rows.push(vec![x.into(), n.into(), r.into(), c.into(), d.into()]);
        }
    }
    let results = json!({
        "family": family,
        "degree": degree,
        "values": points,
        "max_scaled_diff": if has_closed { Some(worst) } else { None },
    });
    let settings = json!({ "degree": degree });
    Ok(Outcome { results, table, settings, notes })
}
