//! Runs the default suite and checks the twelve acceptance criteria, one
//! line per criterion. The configured tolerances and sample sizes are
//! compared with the required ones first, so loosening the configuration
//! cannot turn a criterion green.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use holonomy_lab::{run_suite, threads_from_env, Config, RunReport, Status};

struct Need {
    id: &'static str,
    tolerance: f64,
    params: &'static [(&'static str, f64)],
}

const fn need(id: &'static str, tolerance: f64, params: &'static [(&'static str, f64)]) -> Need {
    Need { id, tolerance, params }
}

struct Criterion {
    number: usize,
    name: &'static str,
    cases: &'static [Need],
}

const CRITERIA: &[Criterion] = &[
    Criterion { number: 1, name: "transport of constant loops", cases: &[need("transport.exp-agreement", 1e-10, &[("n", 1024.0), ("count", 50.0), ("max_seconds", 5.0)])] },
    Criterion {
        number: 2,
        name: "integrator order and agreement",
        cases: &[
            need("transport.convergence-order", 0.2, &[("loops", 10.0), ("order", 4.0)]),
            need("transport.cross-scheme", 1e-9, &[("n", 1024.0), ("loops", 10.0)]),
        ],
    },
    Criterion { number: 3, name: "gauge equivariance", cases: &[need("transport.equivariance", 1e-6, &[("n", 1024.0), ("pairs", 100.0)])] },
    Criterion {
        number: 4,
        name: "riemannian submersion",
        cases: &[
            need("transport.submersion-isometry", 1e-5, &[("kmax", 8.0), ("translates", 20.0)]),
            need("transport.submersion-kernel", 1e-10, &[("kmax", 8.0)]),
        ],
    },
    Criterion { number: 5, name: "loop basis orthonormality", cases: &[need("transport.basis-gram", 1e-12, &[("n", 1024.0), ("kmax", 8.0)])] },
    Criterion {
        number: 6,
        name: "fibre shape operator spectrum",
        cases: &[
            need("spectra.shape-spectrum", 1e-4, &[("kmax", 4.0), ("samples", 5.0)]),
            need("spectra.zero-space", 1e-6, &[("kmax", 4.0), ("samples", 5.0)]),
        ],
    },
    Criterion {
        number: 7,
        name: "minimality and square trace",
        cases: &[need("spectra.hlo-minimality", 0.0, &[]), need("spectra.trace-square", 1e-12, &[])],
    },
    Criterion {
        number: 8,
        name: "homothety along loops",
        cases: &[
            need("bundle.homothety-pointwise", 1e-10, &[("samples", 20.0)]),
            need("bundle.homothety-ratio", 1e-8, &[("samples", 20.0)]),
        ],
    },
    Criterion {
        number: 9,
        name: "holonomy factorization and gauge invariance",
        cases: &[
            need("bundle.factorization", 1e-8, &[("configs", 100.0)]),
            need("bundle.based-gauge", 1e-8, &[]),
            need("bundle.class-function", 1e-8, &[]),
        ],
    },
    Criterion {
        number: 10,
        name: "two-to-one example series",
        cases: &[
            need("traces.example-partial-sums", 0.01, &[("partial_sum_limit", 1e6)]),
            need("traces.example-divergence", 1e-3, &[("partial_sum_limit", 1e6), ("r_squared_threshold", 0.999)]),
            need("traces.zeta-probe", 0.0, &[]),
        ],
    },
    Criterion {
        number: 11,
        name: "isoparametric probe, distance sphere",
        cases: &[need("spectra.isoparametric", 1e-3, &[("radius_over_pi", 0.25), ("kmax", 4.0), ("max_seconds", 60.0)])],
    },
];

fn config_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/default.toml")
}

/// Problems with the configuration of one required case.
fn audit(cfg: &Config, n: &Need) -> Vec<String> {
    let Some(case) = cfg.cases.iter().find(|c| c.id == n.id) else {
        return vec![format!("{} missing from the configuration", n.id)];
    };
    let mut out = Vec::new();
    if case.tolerance != n.tolerance {
        out.push(format!("{} tolerance {} instead of {}", n.id, case.tolerance, n.tolerance));
    }
    for (key, want) in n.params {
        let got = case.parameters.get(*key).and_then(|v| v.as_float().or_else(|| v.as_integer().map(|i| i as f64)));
        if got != Some(*want) {
            out.push(format!("{} parameter {key} = {got:?} instead of {want}", n.id));
        }
    }
    out
}

fn zeta_table_ok(report: &RunReport) -> Result<(), String> {
    let c = report.case("traces.zeta-probe").ok_or("no zeta probe record")?;
    let rows = c.data["rows"].as_array().ok_or("no zeta probe table")?;
    let s: Vec<f64> = rows.iter().filter_map(|r| r["s"].as_f64()).collect();
    if s != [1.1, 1.05, 1.01, 1.001] {
        return Err(format!("zeta probe exponents {s:?}"));
    }
    if rows.iter().any(|r| !r["exceeds_reference"].is_boolean()) {
        return Err("zeta probe rows not flagged against the bound".into());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cfg = Config::load(&config_path()).expect("default configuration parses");
    let threads = threads_from_env().expect("valid worker cap");
    let start = Instant::now();
    let first = run_suite(&cfg, "", threads).expect("suite runs");
    let first_secs = start.elapsed().as_secs_f64();
    let mut failures = 0;
    let mut line = |number: usize, name: &str, problems: Vec<String>| {
        let status = if problems.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {number:>2} {status}  {name}{}", if problems.is_empty() { String::new() } else { format!(": {}", problems.join("; ")) });
        if !problems.is_empty() {
            failures += 1;
        }
    };
    for c in CRITERIA {
        let mut problems: Vec<String> = c.cases.iter().flat_map(|n| audit(&cfg, n)).collect();
        for n in c.cases {
            match first.case(n.id) {
                Some(r) if r.status == Status::Pass => {}
                Some(r) => problems.push(format!(
                    "{} {:?} measured {} tolerance {:e}{}",
                    n.id,
                    r.status,
                    r.measured.map_or("-".into(), |m| format!("{m:e}")),
                    r.tolerance,
                    r.message.as_deref().map(|m| format!(" ({m})")).unwrap_or_default()
                )),
                None => problems.push(format!("{} did not run", n.id)),
            }
        }
        if c.number == 10 {
            if let Err(e) = zeta_table_ok(&first) {
                problems.push(e);
            }
        }
        let detail: Vec<String> = c.cases.iter().filter_map(|n| first.case(n.id)).filter_map(|r| r.measured.map(|m| format!("{} {m:.2e}", r.id))).collect();
        line(c.number, &format!("{} [{}]", c.name, detail.join(", ")), problems);
    }
    // rerun on a different worker count and compare everything but timings
    let second = run_suite(&cfg, "", Some(2)).expect("suite reruns");
    let mut problems = Vec::new();
    let a = first.without_timing().to_json().expect("serializes");
    let b = second.without_timing().to_json().expect("serializes");
    if a != b {
        problems.push("reports differ between runs".into());
    }
    if first_secs > 600.0 {
        problems.push(format!("suite took {first_secs:.0} s"));
    }
    line(12, &format!("determinism and wall clock [{first_secs:.1} s per run]"), problems);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
