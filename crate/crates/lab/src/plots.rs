//! CSV tables and gnuplot scripts for the cases that carry series:
//! integrator convergence, analytic against numeric spectra, partial sums
//! of the example series and the zeta-type probe.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde_json::Value;

use crate::error::LabError;
use crate::report::{CaseRecord, RunReport};

fn stem(id: &str) -> String {
    id.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect()
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> LabError + '_ {
    move |e| LabError::Io { path: path.display().to_string(), source: e }
}

fn write_csv<R: serde::Serialize>(path: &Path, header: &[&str], rows: &[R]) -> Result<(), LabError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| LabError::Io { path: path.display().to_string(), source: e.into() })?;
    let err = |e: csv::Error| LabError::Io { path: path.display().to_string(), source: e.into() };
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.serialize(r).map_err(err)?;
    }
    w.flush().map_err(io(path))
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

/// Writes the artifacts for every case that has series data and returns the
/// file names written per case id, relative to `dir`. Nothing is written for
/// a report without such cases.
pub fn emit_plots(report: &RunReport, dir: &Path) -> Result<BTreeMap<String, Vec<String>>, LabError> {
    let mut out = BTreeMap::new();
    for case in &report.cases {
        let files = match case.operation.as_str() {
            "convergence" => convergence(case, dir)?,
            "shape_spectrum" => spectrum(case, dir)?,
            "example_partial_sums" => partial_sums(case, dir)?,
            "zeta_probe" => zeta(case, dir)?,
            _ => continue,
        };
        if !files.is_empty() {
            out.insert(case.id.clone(), files);
        }
    }
    Ok(out)
}

fn finish(dir: &Path, case: &CaseRecord, rows_written: bool, script: String) -> Result<Vec<String>, LabError> {
    if !rows_written {
        return Ok(Vec::new());
    }
    let s = stem(&case.id);
    let gp = dir.join(format!("{s}.gp"));
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    std::fs::write(&gp, script).map_err(io(&gp))?;
    Ok(vec![format!("{s}.csv"), format!("{s}.gp")])
}

fn convergence(case: &CaseRecord, dir: &Path) -> Result<Vec<String>, LabError> {
    let s = stem(&case.id);
    let mut rows: Vec<(String, u64, String, u64, f64)> = Vec::new();
    let mut orders: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for st in case.data["studies"].as_array().into_iter().flatten() {
        let group = st["group"].as_str().unwrap_or_default().to_string();
        let l = st["loop"].as_u64().unwrap_or_default();
        let study = &st["study"];
        let scheme = study["scheme"].as_str().unwrap_or_default().to_string();
        orders.entry(scheme.clone()).or_default().push(f(&study["order"]));
        let grids = study["grids"].as_array().cloned().unwrap_or_default();
        let errors = study["errors"].as_array().cloned().unwrap_or_default();
        for (n, e) in grids.iter().zip(&errors) {
            rows.push((group.clone(), l, scheme.clone(), n.as_u64().unwrap_or_default(), f(e)));
        }
    }
    if rows.is_empty() {
        return Ok(Vec::new());
    }
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    write_csv(&dir.join(format!("{s}.csv")), &["group", "loop", "scheme", "n", "error"], &rows)?;
    let mut gp = String::new();
    let _ = writeln!(gp, "set datafile separator ','\nset logscale xy 2\nset xlabel 'N'\nset ylabel 'endpoint error'\nset key outside");
    for (i, (scheme, o)) in orders.iter().enumerate() {
        let mean = o.iter().sum::<f64>() / o.len() as f64;
        let _ = writeln!(gp, "set label {} sprintf('{scheme}: fitted order %.3f', {mean}) at graph 0.05, graph {:.2}", i + 1, 0.95 - 0.06 * i as f64);
    }
    let plots: Vec<String> = orders
        .keys()
        .map(|sch| format!("'{s}.csv' every ::1 using (strcol(3) eq '{sch}' ? $4 : 1/0):5 with linespoints title '{sch}'"))
        .collect();
    let _ = writeln!(gp, "plot {}", plots.join(", \\\n     "));
    finish(dir, case, true, gp)
}

fn spectrum(case: &CaseRecord, dir: &Path) -> Result<Vec<String>, LabError> {
    let s = stem(&case.id);
    let mut rows: Vec<(String, u64, usize, f64, f64)> = Vec::new();
    for sample in case.data["samples"].as_array().into_iter().flatten() {
        let group = sample["group"].as_str().unwrap_or_default().to_string();
        let idx = sample["sample"].as_u64().unwrap_or_default();
        let a = sample["analytic"].as_array().cloned().unwrap_or_default();
        let b = sample["numeric"].as_array().cloned().unwrap_or_default();
        for (i, (x, y)) in a.iter().zip(&b).enumerate() {
            rows.push((group.clone(), idx, i, f(x), f(y)));
        }
    }
    if rows.is_empty() {
        return Ok(Vec::new());
    }
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    write_csv(&dir.join(format!("{s}.csv")), &["group", "sample", "index", "analytic", "numeric"], &rows)?;
    let gp = format!(
        "set datafile separator ','\nset xlabel 'analytic eigenvalue'\nset ylabel 'numeric eigenvalue'\nset key left\n\
         plot '{s}.csv' every ::1 using 4:5 with points pt 7 title 'eigenvalues', x with lines title 'y = x'\n"
    );
    finish(dir, case, true, gp)
}

fn partial_sums(case: &CaseRecord, dir: &Path) -> Result<Vec<String>, LabError> {
    let s = stem(&case.id);
    let gamma = f(&case.data["model"]) - f(&case.data["m"]).ln();
    let rows: Vec<(u64, f64, f64)> = case.data["partial_sums"]
        .as_array()
        .into_iter()
        .flatten()
        .filter_map(|p| {
            let m = p[0].as_u64()?;
            Some((m, f(&p[1]), (m as f64).ln() + gamma))
        })
        .collect();
    if rows.is_empty() {
        return Ok(Vec::new());
    }
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    write_csv(&dir.join(format!("{s}.csv")), &["m", "partial_sum", "log_model"], &rows)?;
    let gp = format!(
        "set datafile separator ','\nset logscale x 10\nset xlabel 'm'\nset ylabel 'S_m'\nset key left\n\
         plot '{s}.csv' every ::1 using 1:2 with linespoints title 'partial sums', '' every ::1 using 1:3 with lines title 'ln m + gamma'\n"
    );
    finish(dir, case, true, gp)
}

fn zeta(case: &CaseRecord, dir: &Path) -> Result<Vec<String>, LabError> {
    let s = stem(&case.id);
    let reference = f(&case.data["reference"]);
    let rows: Vec<(f64, f64, f64)> =
        case.data["rows"].as_array().into_iter().flatten().map(|r| (f(&r["s"]), f(&r["value"]), reference)).collect();
    if rows.is_empty() {
        return Ok(Vec::new());
    }
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    write_csv(&dir.join(format!("{s}.csv")), &["s", "value", "reference"], &rows)?;
    let gp = format!(
        "set datafile separator ','\nset logscale x 10\nset xlabel 's - 1'\nset ylabel 'probe value'\nset key left\n\
         plot '{s}.csv' every ::1 using ($1-1):2 with linespoints title 'probe', '' every ::1 using ($1-1):3 with lines title 'reference bound'\n"
    );
    finish(dir, case, true, gp)
}
