use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use holonomy_core::bundle::{hol_direct, BaseManifold, ConnectionForm, LoopFrame};
use holonomy_core::lie::{AlgebraVector, GroupId};
use holonomy_core::loops::AlgebraLoop;
use holonomy_core::random::{random_base_loop, random_loop, random_sphere_form, random_torus_form, random_vector, rng};
use holonomy_core::records::GroupElementRecord;
use holonomy_core::spectra::isoparametric::{isoparametric_probe, ProbeOptions, ProbeTarget};
use holonomy_core::spectra::traces::{regularized_traces, TailModel, TraceOptions};
use holonomy_core::spectra::{analytic_fiber_spectrum, numeric_shape_operator_with, ShapeOptions, SpectrumTable};
use holonomy_core::transport::convergence_study;
use holonomy_core::{root_decomposition, solve_transport, Scheme};
use holonomy_lab::{plots, threads_from_env, RunReport, Status};
use serde_json::json;

#[derive(Parser)]
#[command(name = "holonomy-lab", version, about = "Numerical checks for transport, holonomy and fibre spectra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured verification cases and write report.json plus plots.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated terms; `id=X` selects one case, `!term` excludes.
        #[arg(long, default_value = "")]
        filter: String,
        #[arg(long, default_value = "lab-out")]
        out: PathBuf,
    },
    /// Transport a constant or random loop and print the endpoint.
    Transport {
        #[arg(long, default_value = "su2")]
        group: GroupId,
        /// Coordinates of a constant loop; a random loop is drawn otherwise.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        coords: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1024)]
        n: usize,
        #[arg(long, default_value = "rkmk4")]
        scheme: Scheme,
        /// Also fit the convergence order on these grids against 8 times the largest.
        #[arg(long, value_delimiter = ',')]
        study: Option<Vec<usize>>,
    },
    /// Holonomy of a random connection along a random loop, by both routes.
    Holonomy {
        #[arg(long, default_value = "su2")]
        group: GroupId,
        #[arg(long, value_enum, default_value = "torus")]
        base: BaseKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1024)]
        n: usize,
    },
    /// Fibre spectrum at the origin, analytic and optionally numeric.
    Spectrum {
        #[arg(long, default_value = "su2")]
        group: GroupId,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        coords: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        kmax: usize,
        #[arg(long)]
        numeric: bool,
        #[arg(long, default_value_t = 1e-4)]
        eps: f64,
        #[arg(long, default_value_t = 512)]
        n: usize,
    },
    /// Regularized traces of a fibre spectrum or of the two-to-one example.
    Traces {
        #[arg(long)]
        example: bool,
        #[arg(long, default_value = "su2")]
        group: GroupId,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        coords: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        kmax: usize,
        #[arg(long, default_value_t = 1_000_000)]
        partial_sum_limit: usize,
        /// Bound the zeta-type probe is compared against.
        #[arg(long)]
        reference: Option<f64>,
    },
    /// Spectral comparison between sample points of a distance sphere preimage.
    Isoparametric {
        #[arg(long, default_value = "su2")]
        group: GroupId,
        #[arg(long, default_value_t = 0.25)]
        radius_over_pi: f64,
        #[arg(long, default_value_t = 4)]
        kmax: usize,
        #[arg(long, default_value_t = 3)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Regenerate CSV tables and gnuplot scripts from a report.
    Plots {
        #[arg(long)]
        report: PathBuf,
        #[arg(long, default_value = "lab-out")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BaseKind {
    Torus,
    Sphere,
}

fn vector(group: GroupId, coords: &Option<Vec<f64>>, seed: u64) -> Result<AlgebraVector> {
    Ok(match coords {
        Some(c) => AlgebraVector::from_coords(group, c)?,
        None => random_vector(group, 1.0, &mut rng(seed)),
    })
}

fn print(v: &serde_json::Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Verify { config, filter, out } => {
            let report = holonomy_lab::verify(&config, &filter, &out, threads_from_env()?)?;
            for c in &report.cases {
                let tag = match c.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    Status::Skip => "SKIP",
                };
                let measured = c.measured.map_or("-".to_string(), |m| format!("{m:.3e}"));
                let note = c.message.as_deref().map(|m| format!("  ({m})")).unwrap_or_default();
                println!("{tag}  {:<36} measured {measured:>10}  tolerance {:.1e}{note}", c.id, c.tolerance);
            }
            let s = &report.summary;
            println!("{} passed, {} failed, {} skipped; report in {}", s.pass, s.fail, s.skip, out.join("report.json").display());
            return Ok(ExitCode::from(report.exit_code() as u8));
        }
        Command::Transport { group, coords, seed, n, scheme, study } => {
            let u = match &coords {
                Some(_) => AlgebraLoop::constant(&vector(group, &coords, seed)?, n)?,
                None => random_loop(group, n, 3, 1.0, &mut rng(seed))?,
            };
            let sol = solve_transport(&u, scheme)?;
            let mut out = json!({
                "group": group,
                "scheme": scheme,
                "n": n,
                "endpoint": GroupElementRecord::from(&sol.endpoint),
                "ode_residual": sol.ode_residual(),
                "unitarity_drift": sol.unitarity_drift(),
            });
            if let Some(grids) = study {
                let reference = 8 * grids.iter().copied().max().unwrap_or(n);
                let v = vector(group, &coords, seed)?;
                let sample = |m| match &coords {
                    Some(_) => AlgebraLoop::constant(&v, m),
                    None => random_loop(group, m, 3, 1.0, &mut rng(seed)),
                };
                out["study"] = serde_json::to_value(convergence_study(sample, &grids, reference, scheme)?)?;
            }
            print(&out)?;
        }
        Command::Holonomy { group, base, seed, n } => {
            let mut r = rng(seed);
            let (b, omega) = match base {
                BaseKind::Torus => {
                    let b = BaseManifold::flat_torus(0.8, 1.1)?;
                    (b, random_torus_form(b, group, 2, 1, 0.4, &mut r)?)
                }
                BaseKind::Sphere => {
                    let b = BaseManifold::round_sphere(1.2)?;
                    (b, random_sphere_form(b, group, 0.4, &mut r)?)
                }
            };
            let c = random_base_loop(b, 2, 0.05, 1.2, &mut r)?;
            let omega0 = ConnectionForm::zero(b, group);
            let via_pullback = LoopFrame::new(c.clone(), omega0.clone(), n, Scheme::Rkmk4)?.hol(&omega)?;
            let direct = hol_direct(&omega, &omega0, &c, n)?;
            print(&json!({
                "group": group,
                "loop_speed": c.speed(),
                "hol": GroupElementRecord::from(&via_pullback),
                "hol_direct": GroupElementRecord::from(&direct),
                "difference": via_pullback.frobenius_distance(&direct),
            }))?;
        }
        Command::Spectrum { group, coords, seed, kmax, numeric, eps, n } => {
            let v = vector(group, &coords, seed)?;
            let analytic = analytic_fiber_spectrum(&v, kmax)?;
            let mut out = json!({ "group": group, "v": v.coords(), "kmax": kmax, "analytic": analytic });
            if numeric {
                let op = numeric_shape_operator_with(&v, kmax, eps, ShapeOptions { n, scheme: Scheme::Rkmk4 })?;
                out["distance"] = json!(analytic.multiset_distance(&op.table));
                out["asymmetry"] = json!(op.asymmetry);
                out["numeric"] = serde_json::to_value(&op.table)?;
            }
            print(&out)?;
        }
        Command::Traces { example, group, coords, seed, kmax, partial_sum_limit, reference } => {
            let opts = TraceOptions { partial_sum_limit, zeta_reference: reference, ..TraceOptions::default() };
            let rep = if example {
                regularized_traces(&SpectrumTable::default(), Some(&TailModel::two_to_one()), &opts)?
            } else {
                let v = vector(group, &coords, seed)?;
                let dec = root_decomposition(&v)?;
                let roots: Vec<(f64, usize)> = dec.roots.iter().map(|r| (r.alpha_value, dec.multiplicity(r.alpha_value))).collect();
                regularized_traces(&analytic_fiber_spectrum(&v, kmax)?, Some(&TailModel::fibre(kmax, &roots)), &opts)?
            };
            print(&serde_json::to_value(rep)?)?;
        }
        Command::Isoparametric { group, radius_over_pi, kmax, points, seed } => {
            if group != GroupId::Su2 {
                bail!("distance spheres are only available in su2");
            }
            let opts = ProbeOptions { kmax, point_count: points, seed, ..ProbeOptions::default() };
            let rep = isoparametric_probe(group, ProbeTarget::DistanceSphere { radius: radius_over_pi * std::f64::consts::PI }, &opts)?;
            print(&serde_json::to_value(rep)?)?;
        }
        Command::Plots { report, out } => {
            let rep = RunReport::read(&report).with_context(|| format!("reading {}", report.display()))?;
            let files = plots::emit_plots(&rep, &out)?;
            for (id, f) in &files {
                println!("{id}: {}", f.join(", "));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
