use super::{Provenance, RunConfig};
use crate::circle::ConvergenceTable;
use crate::orbit::{Boundary, OrbitRecord, ScanResult};
use crate::Result;

pub const SCAN_HEADER: [&str; 9] =
    ["lambda", "K_omega", "label", "chi1", "chi2", "period", "rho_min", "rho_max", "escaped_fraction"];

fn finish(header: String, w: csv::Writer<Vec<u8>>) -> Result<String> {
    let body = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(header + &String::from_utf8(body).expect("csv output is utf-8"))
}

fn csv_err(e: csv::Error) -> crate::Error {
    std::io::Error::other(e.to_string()).into()
}

/// One row per cell, grouped by `K_ω`. Failed cells keep their
/// coordinates with label `Error`.
pub fn scan_csv(result: &ScanResult, prov: &Provenance, config: &RunConfig) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SCAN_HEADER).map_err(csv_err)?;
    for (ki, &k) in result.k_omegas.iter().enumerate() {
        for (li, &l) in result.lambdas.iter().enumerate() {
            let row = match result.cell(ki, li) {
                Ok(c) => vec![
                    l.to_string(),
                    k.to_string(),
                    c.label.to_string(),
                    c.chi1.to_string(),
                    c.chi2.to_string(),
                    c.period.map_or(String::new(), |p| p.to_string()),
                    c.rho_min.to_string(),
                    c.rho_max.to_string(),
                    c.escaped_fraction.to_string(),
                ],
                Err(_) => {
                    let mut r = vec![l.to_string(), k.to_string(), "Error".to_string()];
                    r.extend(std::iter::repeat_n(String::new(), 6));
                    r
                }
            };
            w.write_record(&row).map_err(csv_err)?;
        }
    }
    finish(prov.comment_lines(config), w)
}

pub fn boundaries_csv(boundaries: &[Boundary], prov: &Provenance, config: &RunConfig) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["K_omega", "t2", "t1", "ordered"]).map_err(csv_err)?;
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
    for b in boundaries {
        w.write_record([b.k_omega.to_string(), opt(b.t2), opt(b.t1), b.ordered.to_string()]).map_err(csv_err)?;
    }
    finish(prov.comment_lines(config), w)
}

/// Orbit points after burn-in, numbered from the start of the run; an
/// escape adds a comment line with the index of the last point.
pub fn orbit_csv(record: &OrbitRecord, prov: &Provenance, config: &RunConfig) -> Result<String> {
    let mut header = prov.comment_lines(config);
    if let Some(k) = record.escape_index {
        header.push_str(&format!("# escaped_at: {}\n", record.burn_in + k));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["iterate", "x", "y"]).map_err(csv_err)?;
    for (i, p) in record.points.iter().enumerate() {
        w.write_record([(record.burn_in + i).to_string(), p.x.to_string(), p.y.to_string()]).map_err(csv_err)?;
    }
    finish(header, w)
}

pub fn convergence_csv(table: &ConvergenceTable, prov: &Provenance, config: &RunConfig) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "n",
        "lambda",
        "first_component_error",
        "second_component_error",
        "value_error",
        "d1_error",
        "d2_error",
        "second_component_bound",
        "second_component_on_axis",
        "excluded",
    ])
    .map_err(csv_err)?;
    for r in &table.rows {
        w.write_record([
            r.n.to_string(),
            r.lambda.to_string(),
            r.first_component_error.to_string(),
            r.second_component_error.to_string(),
            r.value_error.to_string(),
            r.d1_error.to_string(),
            r.d2_error.to_string(),
            r.second_component_bound.to_string(),
            r.second_component_on_axis.to_string(),
            r.excluded.to_string(),
        ])
        .map_err(csv_err)?;
    }
    finish(prov.comment_lines(config), w)
}
