//! Verification suite over `holonomy-core`: configuration, case execution
//! on a worker pool, JSON reports and plot data.

pub mod cases;
pub mod config;
mod error;
pub mod plots;
pub mod report;

use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;

pub use config::{Config, Filter, Params, VerificationCase};
pub use error::LabError;
pub use report::{CaseRecord, RunReport, Status};

pub const THREADS_VAR: &str = "HOLONOMY_LAB_THREADS";

/// Worker cap from the environment; `None` lets the pool pick.
pub fn threads_from_env() -> Result<Option<usize>, LabError> {
    match std::env::var(THREADS_VAR) {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(0) | Err(_) => Err(LabError::Threads(format!("expected a positive integer, got {s:?}"))),
            Ok(n) => Ok(Some(n)),
        },
        Err(_) => Ok(None),
    }
}

fn run_case(case: &VerificationCase, cfg: &Config) -> (CaseRecord, f64) {
    let params = Params::new(case, &cfg.environment);
    let mut rec = CaseRecord {
        id: case.id.clone(),
        module: case.module.clone(),
        operation: case.operation.clone(),
        status: Status::Skip,
        measured: None,
        tolerance: case.tolerance,
        seed: case.seed,
        message: None,
        artifacts: Vec::new(),
        data: serde_json::Value::Null,
    };
    if !cases::is_group_free(case) {
        match params.groups() {
            Ok(g) if g.is_empty() => {
                rec.message = Some("no enabled group".into());
                return (rec, 0.0);
            }
            Ok(_) => {}
            Err(e) => {
                rec.status = Status::Fail;
                rec.message = Some(e.to_string());
                return (rec, 0.0);
            }
        }
    }
    let start = Instant::now();
    let result = cases::run(case, &params);
    let secs = start.elapsed().as_secs_f64();
    match result {
        Ok(out) => {
            let within = match case.compare {
                config::Comparison::AtMost => out.measured <= case.tolerance,
                config::Comparison::Report => true,
            };
            let mut ok = within && out.holds != Some(false);
            let mut message = out.note;
            if let Ok(Some(limit)) = params.optional_f64("max_seconds") {
                if secs > limit {
                    ok = false;
                    message = Some(format!("took {secs:.1} s, limit {limit} s"));
                }
            }
            rec.status = if ok { Status::Pass } else { Status::Fail };
            rec.measured = Some(out.measured).filter(|m| m.is_finite());
            rec.message = message;
            rec.data = out.data;
        }
        Err(e) => {
            rec.status = Status::Fail;
            rec.message = Some(e.to_string());
        }
    }
    (rec, secs)
}

/// Runs the selected cases on a pool of at most `threads` workers. Each case
/// draws only from its own seed, so the result does not depend on the
/// schedule; records come back ordered by id.
pub fn run_suite(cfg: &Config, filter: &str, threads: Option<usize>) -> Result<RunReport, LabError> {
    let selected = Filter::parse(filter).select(&cfg.cases)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| LabError::Threads(e.to_string()))?;
    let start = Instant::now();
    let results: Vec<(CaseRecord, f64)> = pool.install(|| selected.par_iter().map(|c| run_case(c, cfg)).collect());
    let mut timing = report::Timing {
        generated_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or_default(),
        total_seconds: start.elapsed().as_secs_f64(),
        ..Default::default()
    };
    let mut records = Vec::with_capacity(results.len());
    for (rec, secs) in results {
        timing.case_seconds.insert(rec.id.clone(), secs);
        records.push(rec);
    }
    let env = report::EnvironmentRecord {
        n: cfg.environment.n,
        kmax: cfg.environment.kmax,
        groups: cfg.environment.groups.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    Ok(RunReport::new(env, filter.to_string(), records, timing))
}

/// `run_suite`, then plots and `report.json` under `out`.
pub fn verify(config: &Path, filter: &str, out: &Path, threads: Option<usize>) -> Result<RunReport, LabError> {
    let cfg = Config::load(config)?;
    let mut report = run_suite(&cfg, filter, threads)?;
    std::fs::create_dir_all(out).map_err(|e| LabError::Io { path: out.display().to_string(), source: e })?;
    let artifacts = plots::emit_plots(&report, out)?;
    for c in &mut report.cases {
        if let Some(files) = artifacts.get(&c.id) {
            c.artifacts = files.clone();
        }
    }
    report.write(&out.join("report.json"))?;
    Ok(report)
}
