//! Batch commands: each reads a resolved [`RunConfig`], computes, and
//! returns its output files in memory so nothing is written on failure.

use crate::audit::run_audit;
use crate::circle::{
    collet_eckmann_check, critical_points, graph, lambda_a_n, misiurewicz_check, accumulation_conditions,
    rotation_interval, singular_limit_convergence, superstable_search, CircleMap, CircleMapFamily,
    confirm_in_plane, DEFAULT_CRITICAL_CELLS,
};
use crate::io::svg::{circle_panels_svg, orbit_svg, regime_svg, CirclePanel};
use crate::io::{boundaries_csv, convergence_csv, orbit_csv, scan_csv, Provenance, Report, RunConfig};
use crate::model::{CylinderPoint, ModelParams, Perturbation, ReturnMap};
use crate::orbit::{autocorrelation, birkhoff_average, iterate, lyapunov_along, rotation_set_2d, scan};
use crate::verdict::{combine, Verdict, Witness};
use crate::{Error, Result};
use rayon::prelude::*;
use serde_json::json;
use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

/// Multiplier bound used to call a confirmed superstable orbit attracting.
pub const CONFIRM_MULTIPLIER_BOUND: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Iterate,
    Lyapunov,
    Scan,
    Audit,
    Misiurewicz,
    /// Period override for the search; the config value when `None`.
    Superstable(Option<usize>),
    Rotation,
    SingularLimit,
    PlotCircle,
}

/// A file produced by a command, relative to the output directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Clone, Default)]
pub struct CommandResult {
    pub outputs: Vec<Output>,
    pub warnings: Vec<String>,
    pub summary: String,
}

impl CommandResult {
    fn push(&mut self, name: &str, contents: String) {
        self.outputs.push(Output { name: name.into(), contents });
    }
}

/// Runs a command on the current rayon pool.
pub fn execute(command: Command, config: &RunConfig) -> Result<CommandResult> {
    let (params, pert) = config.resolve()?;
    let prov = Provenance::new(config);
    match command {
        Command::Iterate => cmd_iterate(config, &params, &pert, &prov),
        Command::Lyapunov => cmd_lyapunov(config, &params, &pert),
        Command::Scan => cmd_scan(config, &params, &pert, &prov),
        Command::Audit => cmd_audit(config, &params, &pert),
        Command::Misiurewicz => cmd_misiurewicz(config, &params, &pert),
        Command::Superstable(period) => cmd_superstable(config, &params, &pert, period),
        Command::Rotation => cmd_rotation(config, &params, &pert),
        Command::SingularLimit => cmd_singular_limit(config, &params, &pert, &prov),
        Command::PlotCircle => cmd_plot_circle(config, &params, &pert),
    }
}

/// Writes every output into `dir`. If any write fails, files written so far
/// are removed before the error is returned.
pub fn write_outputs(dir: &Path, outputs: &[Output]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for o in outputs {
        let path = dir.join(&o.name);
        if let Err(e) = std::fs::write(&path, &o.contents) {
            let _ = std::fs::remove_file(&path);
            for p in &written {
                let _ = std::fs::remove_file(p);
            }
            return Err(e.into());
        }
        written.push(path);
    }
    Ok(written)
}

fn start_point(x: f64, y: f64) -> Result<CylinderPoint> {
    CylinderPoint::try_new(x, y).map_err(|e| Error::Config(format!("start point: {e}")))
}

fn cmd_iterate(config: &RunConfig, params: &ModelParams, pert: &Perturbation, prov: &Provenance) -> Result<CommandResult> {
    let s = &config.iterate;
    let map = ReturnMap::new(params.clone(), pert.clone());
    let record = iterate(&map, start_point(s.x0, s.y0)?, s.iterates, s.burn_in);
    let mut r = CommandResult::default();
    r.push("orbit.csv", orbit_csv(&record, prov, config)?);
    match orbit_svg(&record.points) {
        Some(svg) => r.push("orbit.svg", svg),
        None => r.warnings.push("orbit is empty; no plot written".into()),
    }
    r.summary = match record.escape_index {
        Some(k) => format!("orbit escaped after {} stored points", k),
        None => format!("{} points stored", record.points.len()),
    };
    Ok(r)
}

fn cmd_lyapunov(config: &RunConfig, params: &ModelParams, pert: &Perturbation) -> Result<CommandResult> {
    let s = &config.lyapunov;
    let o = s.options;
    if o.iterates < 10_000 {
        return Err(Error::Config(format!("lyapunov needs at least 10^4 iterates, got {}", o.iterates)));
    }
    let map = ReturnMap::new(params.clone(), pert.clone());
    let record = iterate(&map, start_point(s.x0, s.y0)?, o.iterates + o.transient, o.burn_in);
    let est = lyapunov_along(&map, &record, o.cadence, o.transient)?;
    let birkhoff = birkhoff_average(&record, |p| p.x.cos()).ok();
    let series: Vec<f64> = record.mapped_points().iter().map(|p| p.x.cos()).collect();
    let acf = autocorrelation(&series, s.max_lag).ok();
    let mut report = Report::new(
        "lyapunov",
        config,
        params.derived(),
        json!({ "iterates": o.iterates, "burn_in": o.burn_in, "transient": o.transient, "cadence": o.cadence }),
        json!({ "estimate": est, "birkhoff_cos_x": birkhoff, "autocorrelation_cos_x": acf }),
    );
    report.verdicts.push(Verdict::check(
        "exponent_sum",
        est.sum_defect <= 1e-2 && !est.inconclusive,
        Witness::note("|chi1 + chi2(QR) - mean ln|det||").compare(est.sum_defect, 1e-2),
    ));
    let mut r = CommandResult::default();
    r.summary = format!("chi1 = {:.6}, chi2 = {:.6}", est.chi1, est.chi2);
    r.push("lyapunov.json", report.to_json()?);
    Ok(r)
}

fn cmd_scan(config: &RunConfig, params: &ModelParams, pert: &Perturbation, prov: &Provenance) -> Result<CommandResult> {
    let s = &config.scan;
    let lambdas = s.lambda_grid()?;
    let ks = s.k_omegas.clone().unwrap_or_else(|| vec![params.k_omega()]);
    let result = scan(params, pert, &lambdas, &ks, &s.budget)?;
    let mut r = CommandResult::default();
    r.push("scan.csv", scan_csv(&result, prov, config)?);
    r.push("scan_boundaries.csv", boundaries_csv(&result.boundaries, prov, config)?);
    match regime_svg(&result) {
        Some(svg) => r.push("scan.svg", svg),
        None => r.warnings.push("scan is empty; no plot written".into()),
    }
    let failed = result.cells.iter().filter(|c| c.is_err()).count();
    if failed > 0 {
        r.warnings.push(format!("{failed} cells failed to classify"));
    }
    r.summary = format!("{} cells classified", result.cells.len() - failed);
    Ok(r)
}

fn cmd_audit(config: &RunConfig, params: &ModelParams, pert: &Perturbation) -> Result<CommandResult> {
    let t = &config.audit;
    let audit = run_audit(params, pert, t, config.seed)?;
    let horizon = json!({
        "h1_lambdas": t.h1.lambda_count,
        "h2_h3_n_max": t.h2_h3.resolved_n_max(params.k_omega()),
        "h4_horizon": t.h4.misiurewicz.horizon,
        "h5_horizon": t.h5.horizon,
    });
    let mut report = Report::new("audit", config, params.derived(), horizon, &audit);
    report.verdicts = audit.verdicts.clone();
    report.overall = Some(audit.overall);
    report.statement = Some(audit.statement.clone());
    report.thresholds = Some(serde_json::to_value(t)?);
    let mut r = CommandResult::default();
    r.summary = format!("overall {:?}: {}", audit.overall, audit.statement);
    r.push("audit.json", report.to_json()?);
    Ok(r)
}

fn cmd_misiurewicz(config: &RunConfig, params: &ModelParams, pert: &Perturbation) -> Result<CommandResult> {
    let s = &config.misiurewicz;
    let family = CircleMapFamily::from_model(params, pert)?;
    let a_values = s
        .a_values
        .clone()
        .unwrap_or_else(|| (0..s.a_points.max(1)).map(|i| TAU * i as f64 / s.a_points.max(1) as f64).collect());
    let entries: Vec<Result<serde_json::Value>> = a_values
        .par_iter()
        .map(|&a| {
            let cert = misiurewicz_check(&family, a, &s.options)?;
            let (ce, accumulation) = if cert.passed() && !cert.vacuous {
                let ce = collet_eckmann_check(&family, &cert, s.ce.rate_fraction * cert.lambda0, s.ce.alpha, s.ce.horizon)?;
                (Some(ce), Some(accumulation_conditions(&family, &cert)?))
            } else {
                (None, None)
            };
            Ok(json!({ "certificate": cert, "collet_eckmann": ce, "accumulation": accumulation }))
        })
        .collect();
    let entries = entries.into_iter().collect::<Result<Vec<_>>>()?;
    let passing = entries.iter().filter(|e| e["certificate"]["verdicts"].as_array().is_some_and(|v| v.iter().all(|v| v["pass"] == true))).count();
    let mut report = Report::new(
        "misiurewicz",
        config,
        params.derived(),
        json!({ "horizon": s.options.horizon, "seeds": s.options.seeds, "delta0": s.options.delta0, "ce_horizon": s.ce.horizon }),
        json!({ "entries": entries }),
    );
    report.verdicts.push(Verdict::check(
        "misiurewicz",
        passing > 0,
        Witness::note("parameters with a passing certificate").compare(passing as f64, 1.0),
    ));
    let mut r = CommandResult::default();
    r.summary = format!("{passing} of {} parameters certified", a_values.len());
    r.push("misiurewicz.json", report.to_json()?);
    Ok(r)
}

fn cmd_superstable(config: &RunConfig, params: &ModelParams, pert: &Perturbation, period: Option<usize>) -> Result<CommandResult> {
    let s = &config.superstable;
    let mut opts = s.options;
    if let Some(p) = period {
        opts.period = p;
    }
    let family = CircleMapFamily::from_model(params, pert)?;
    let roots = superstable_search(&family, &opts)?;
    let k = params.k_omega();
    let blocks: Vec<Result<serde_json::Value>> = roots
        .par_iter()
        .map(|o| {
            let lambda1 = lambda_a_n(k, o.a_star, 1);
            let map = ReturnMap::new(params.with_lambda(lambda1)?, pert.clone());
            let confirmation = confirm_in_plane(&map, CylinderPoint::new(o.critical_point, 0.0), s.confirm_burn_in, s.confirm_max_period).ok();
            let attracting = confirmation.as_ref().is_some_and(|c| c.is_attracting_with(CONFIRM_MULTIPLIER_BOUND));
            Ok(json!({
                "orbit": o,
                "lambdas": o.pullbacks(k, s.pullbacks),
                "confirmation": confirmation,
                "attracting": attracting,
            }))
        })
        .collect();
    let blocks = blocks.into_iter().collect::<Result<Vec<_>>>()?;
    let minimal = roots.iter().filter(|o| o.minimal_period == opts.period).count();
    let confirmed = blocks.iter().filter(|b| b["attracting"] == true && b["orbit"]["minimal_period"] == opts.period).count();
    let mut report = Report::new(
        "superstable",
        config,
        params.derived(),
        json!({ "period": opts.period, "grid": opts.grid, "tolerance": opts.tolerance, "confirm_burn_in": s.confirm_burn_in }),
        json!({ "roots": blocks }),
    );
    report.verdicts.push(Verdict::check(
        "superstable",
        minimal > 0,
        Witness::note("roots with the requested minimal period").compare(minimal as f64, 1.0),
    ));
    report.verdicts.push(Verdict::check(
        "confirmed",
        confirmed > 0,
        Witness::note("roots whose return-map orbit at lambda_(a*,1) is an attracting cycle").compare(confirmed as f64, 1.0),
    ));
    let mut r = CommandResult::default();
    r.summary = format!("{} roots, {minimal} of minimal period {}, {confirmed} confirmed", roots.len(), opts.period);
    r.push("superstable.json", report.to_json()?);
    Ok(r)
}

fn cmd_rotation(config: &RunConfig, params: &ModelParams, pert: &Perturbation) -> Result<CommandResult> {
    let s = &config.rotation;
    let family = CircleMapFamily::from_model(params, pert)?;
    let interval = rotation_interval(&family, s.a, s.iterates, s.seeds)?;
    let plane = if params.lambda() > 0.0 {
        let map = ReturnMap::new(params.clone(), pert.clone());
        let seeds: Vec<CylinderPoint> =
            (0..s.seeds).map(|i| CylinderPoint::new(TAU * (i as f64 + 0.5) / s.seeds as f64, 0.0)).collect();
        Some(rotation_set_2d(&map, &seeds, s.iterates, s.burn_in)?)
    } else {
        None
    };
    let report = Report::new(
        "rotation",
        config,
        params.derived(),
        json!({ "iterates": s.iterates, "seeds": s.seeds, "burn_in": s.burn_in }),
        json!({ "circle": interval, "return_map": plane }),
    );
    let mut r = CommandResult::default();
    r.summary = format!("circle rotation interval [{:.6}, {:.6}]", interval.rho_min, interval.rho_max);
    r.push("rotation.json", report.to_json()?);
    Ok(r)
}

fn cmd_singular_limit(config: &RunConfig, params: &ModelParams, pert: &Perturbation, prov: &Provenance) -> Result<CommandResult> {
    let s = &config.singular_limit;
    if s.n_min > s.n_max {
        return Err(Error::Config("singular_limit needs n_min <= n_max".into()));
    }
    let map = ReturnMap::new(params.clone(), pert.clone());
    let ns: Vec<u32> = (s.n_min..=s.n_max).collect();
    let table = singular_limit_convergence(&map, s.a, &ns, s.grid)?;
    let mut report = Report::new(
        "singular_limit",
        config,
        params.derived(),
        json!({ "n_min": s.n_min, "n_max": s.n_max }),
        &table,
    );
    for (name, ok) in
        [("values_decreasing", table.values_decreasing()), ("d1_decreasing", table.d1_decreasing()), ("d2_decreasing", table.d2_decreasing())]
    {
        report.verdicts.push(Verdict::check(name, ok, Witness::note("strictly decreasing over n")));
    }
    let mut r = CommandResult::default();
    r.summary = format!("{} rows, monotone: {:?}", table.rows.len(), combine(&report.verdicts));
    r.push("singular_limit.csv", convergence_csv(&table, prov, config)?);
    r.push("singular_limit.json", report.to_json()?);
    Ok(r)
}

fn cmd_plot_circle(config: &RunConfig, params: &ModelParams, pert: &Perturbation) -> Result<CommandResult> {
    let s = &config.plot;
    let family = CircleMapFamily::from_model(params, pert)?;
    let mut r = CommandResult::default();
    let mut panels = Vec::new();
    for &k in &s.k_omegas {
        let f = family.with_k_omega(k)?;
        let critical = match critical_points(&f, DEFAULT_CRITICAL_CELLS) {
            Ok(c) => c.xs().into_iter().map(|x| (x, f.eval(s.a, x))).collect(),
            Err(e) => {
                r.warnings.push(format!("K_omega = {k}: {e}"));
                Vec::new()
            }
        };
        panels.push(CirclePanel { title: format!("K_omega = {k}, a = {}", s.a), graph: graph(&f, s.a, s.points), critical });
    }
    match circle_panels_svg(&panels) {
        Some(svg) => r.push("circle.svg", svg),
        None => r.warnings.push("no circle-map data; no plot written".into()),
    }
    r.summary = format!("{} panels", panels.len());
    Ok(r)
}
