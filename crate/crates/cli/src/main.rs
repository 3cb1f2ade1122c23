mod svg;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde_json::{json, Value};

use meshroute::advisor::{check_feasibility, minimal_sizes, minimal_square_size, DEFAULT_SEARCH_CAP};
use meshroute::characterize::{
    estimate_alpha, estimate_length, simulate_measurements, MeasurementSet, Optics, ProcessVariation,
};
use meshroute::construct::{
    construct_extremal, construct_max_snake, construct_modified_snake, construct_single_path,
    SnakeModification,
};
use meshroute::oracle::{
    oracle_max_profile, oracle_realizable_lengths, verify_theorem_suite, OracleOptions,
};
use meshroute::theory::{
    max_path_length, multi_path_upper_bound, realizable_lengths, single_path_realizable, MultiPathBound,
};
use meshroute::trace::{classify_path, path_stats, sum_format};
use meshroute::response::bar_parity;
use meshroute::{
    build_mesh, trace, Configuration, EnumerationLimit, MeshGraph, MeshSpec, TracedPath,
};

const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "meshroute", version, about = "Path-length analysis for bar/cross photonic meshes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Trace every path and loop of one configuration.
    Trace {
        #[arg(long)]
        mesh: MeshSpec,
        /// Bitstring ('0' bar, '1' cross) or a file containing one.
        #[arg(long)]
        config: String,
        /// Write a diagram highlighting the longest path.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Decide single-path realizability in closed form.
    Realizable {
        #[arg(long)]
        mesh: MeshSpec,
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        x: Option<u64>,
        /// List every realizable length.
        #[arg(long)]
        all: bool,
    },
    /// Build a configuration containing a path of the requested length.
    Construct {
        #[arg(long)]
        mesh: MeshSpec,
        #[arg(long, required_unless_present_any = ["extremal", "snake"])]
        x: Option<u64>,
        /// Instead: one path of sides·k0+1 and all others of length 1.
        #[arg(long, conflicts_with_all = ["x", "snake"])]
        extremal: Option<u64>,
        /// Instead: the longest snake, optionally modified.
        #[arg(long, value_enum, conflicts_with = "x")]
        snake: Option<SnakeArg>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Evaluate the multi-path upper bound over a range of lengths.
    Bounds {
        #[arg(long)]
        mesh: MeshSpec,
        /// Inclusive range `a..b`; defaults to `1..max length`.
        #[arg(long)]
        x_range: Option<String>,
        /// Also write the curve as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Exhaustive sweeps over every configuration.
    Oracle {
        #[arg(long)]
        mesh: MeshSpec,
        #[arg(long, value_enum)]
        task: OracleTask,
        #[arg(long)]
        jobs: Option<usize>,
        /// Largest TBU count to enumerate.
        #[arg(long, default_value_t = meshroute::config::DEFAULT_ENUMERATION_CAP)]
        cap: u32,
    },
    /// Estimate loss and waveguide length from path measurements.
    Characterize {
        #[arg(long)]
        mesh: MeshSpec,
        /// CSV (`start,end,length,re,im[,q]`) or JSON measurement file.
        #[arg(long, required_unless_present = "simulate")]
        measurements: Option<PathBuf>,
        /// Generate measurements from the forward model instead.
        #[arg(long, conflicts_with = "measurements")]
        simulate: bool,
        /// Configuration for simulation and k0; defaults to all cross.
        #[arg(long)]
        config: Option<String>,
        /// Consumed cells; defaults to the value implied by the configuration.
        #[arg(long)]
        k0: Option<u64>,
        #[arg(long, default_value_t = 0.99)]
        alpha: f64,
        /// Draw per-TBU α uniformly from `[alpha - spread, alpha]`.
        #[arg(long, default_value_t = 0.0)]
        alpha_spread: f64,
        /// TBU length in meters.
        #[arg(long, default_value_t = 100e-6)]
        length: f64,
        /// Vacuum wavelength in meters.
        #[arg(long, default_value_t = 1550e-9)]
        wavelength: f64,
        #[arg(long, default_value_t = 2.35)]
        n_eff: f64,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Length window in meters for the phase estimator.
        #[arg(long, default_value_t = 90e-6)]
        window_min: f64,
        #[arg(long, default_value_t = 110e-6)]
        window_max: f64,
    },
    /// Screen a collection of path lengths against necessary conditions.
    Advise {
        /// Comma-separated list or JSON array.
        #[arg(long)]
        lambda: String,
        /// Smallest balanced size (default).
        #[arg(long, conflicts_with_all = ["grid", "frontier"])]
        square: bool,
        /// Check one `NxM` mesh.
        #[arg(long, conflicts_with = "frontier")]
        grid: Option<String>,
        /// Pareto frontier within `NmaxxMmax`.
        #[arg(long)]
        frontier: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleTask {
    Lengths,
    Maxy,
    Verify,
}

#[derive(Clone, Copy, ValueEnum)]
enum SnakeArg {
    Max,
    TopLeft,
    SecondRight,
}

fn ratio(r: Ratio<i64>) -> Value {
    json!({ "exact": r.to_string(), "value": *r.numer() as f64 / *r.denom() as f64 })
}

fn read_config(mesh: &MeshGraph, arg: &str) -> Result<Configuration> {
    let text = if arg.chars().all(|c| c == '0' || c == '1') && !arg.is_empty() {
        arg.to_string()
    } else {
        fs::read_to_string(arg).with_context(|| format!("reading configuration file {arg}"))?
    };
    Ok(Configuration::from_bits(mesh, &text)?)
}

fn path_json(mesh: &MeshGraph, config: &Configuration, p: &TracedPath) -> Value {
    json!({
        "start": p.start.0,
        "end": p.end.0,
        "start_label": mesh.node(p.start).label(),
        "end_label": mesh.node(p.end).label(),
        "start_side": p.start_side,
        "end_side": p.end_side,
        "length": p.length,
        "type": classify_path(mesh, p).ok(),
        "q": bar_parity(p, config),
        "tbus": p.tbus,
    })
}

fn trace_json(mesh: &MeshGraph, config: &Configuration) -> Result<Value> {
    let t = trace(mesh, config);
    let stats = path_stats(&t.paths, mesh.spec())?;
    Ok(json!({
        "config": config.to_bits(),
        "paths": t.paths.iter().map(|p| path_json(mesh, config, p)).collect::<Vec<_>>(),
        "loops": t.loops.iter().map(|l| json!({ "length": l.length, "tbus": l.tbus })).collect::<Vec<_>>(),
        "stats": {
            "lengths": stats.lengths,
            "sum": stats.sum,
            "k0": stats.k0,
            "mean": ratio(stats.mean),
            "variance": ratio(stats.variance),
            "max": stats.max,
        },
    }))
}

fn write_svg(path: &Path, mesh: &MeshGraph, config: &Configuration, highlight: Option<&TracedPath>) -> Result<()> {
    fs::write(path, svg::render(mesh, config, highlight)).with_context(|| format!("writing {}", path.display()))
}

fn parse_range(s: &str) -> Result<(u64, u64)> {
    let (a, b) = s
        .split_once("..")
        .with_context(|| format!("range {s:?} must look like a..b"))?;
    let a: u64 = a.trim().parse().context("range start")?;
    let b: u64 = b.trim().trim_start_matches('=').parse().context("range end")?;
    if a == 0 || a > b {
        bail!("range {s:?} must satisfy 1 <= a <= b");
    }
    Ok((a, b))
}

fn parse_dims(s: &str) -> Result<(u32, u32)> {
    let (n, m) = s
        .split_once(['x', 'X'])
        .with_context(|| format!("size {s:?} must look like NxM"))?;
    Ok((n.trim().parse()?, m.trim().parse()?))
}

fn parse_lambda(s: &str) -> Result<Vec<u64>> {
    let s = s.trim();
    if s.starts_with('[') {
        return Ok(serde_json::from_str(s)?);
    }
    s.split(',')
        .map(|t| t.trim().parse::<u64>().with_context(|| format!("bad length {t:?}")))
        .collect()
}

fn opt_cell(v: Option<u64>) -> String {
    v.map_or_else(|| "inf".to_string(), |x| x.to_string())
}

fn bound_json(b: &MultiPathBound) -> Value {
    json!({
        "x": b.x,
        "floor_component": b.floor_component,
        "count_component": b.count_component,
        "C1": b.c1,
        "C2": b.c2,
        "y_bound": b.y_max,
        "binding": b.binding,
        "infeasible_by_realizability": b.infeasible_by_realizability(),
        "c1_assumption_holds": b.c1_assumption_holds,
    })
}

fn run(cmd: Command) -> Result<(Option<MeshSpec>, &'static str, Value)> {
    Ok(match cmd {
        Command::Trace { mesh, config, svg } => {
            let g = build_mesh(mesh);
            let c = read_config(&g, &config)?;
            if let Some(path) = svg {
                let t = trace(&g, &c);
                let longest = t.paths.iter().max_by_key(|p| (p.length, std::cmp::Reverse(p.start)));
                write_svg(&path, &g, &c, longest)?;
            }
            (Some(mesh), "trace", trace_json(&g, &c)?)
        }
        Command::Realizable { mesh, x, all } => {
            let result = if all {
                json!({
                    "max_length": max_path_length(&mesh),
                    "lengths": realizable_lengths(&mesh),
                })
            } else {
                serde_json::to_value(single_path_realizable(&mesh, x.expect("clap requires x")))?
            };
            (Some(mesh), "realizable", result)
        }
        Command::Construct { mesh, x, extremal, snake, svg } => {
            let g = build_mesh(mesh);
            let (config, report) = if let Some(x) = x {
                let c = construct_single_path(&g, x)?;
                let report = serde_json::to_value(&c)?;
                (c.config, report)
            } else if let Some(k0) = extremal {
                (construct_extremal(&g, k0)?, json!({ "k0": k0 }))
            } else {
                let c = match snake.expect("clap requires one mode") {
                    SnakeArg::Max => construct_max_snake(&g)?,
                    SnakeArg::TopLeft => construct_modified_snake(&g, SnakeModification::TopLeftHorizontal)?,
                    SnakeArg::SecondRight => {
                        construct_modified_snake(&g, SnakeModification::SecondRightVertical)?
                    }
                };
                (c, json!({}))
            };
            let t = trace(&g, &config);
            let highlight = match x {
                Some(x) => t.paths.iter().find(|p| p.length as u64 == x),
                None => t.paths.iter().max_by_key(|p| (p.length, std::cmp::Reverse(p.start))),
            };
            if let Some(path) = svg {
                write_svg(&path, &g, &config, highlight)?;
            }
            let mut result = report;
            result["bits"] = json!(config.to_bits());
            result["path"] = highlight.map_or(Value::Null, |p| path_json(&g, &config, p));
            result["trace"] = trace_json(&g, &config)?;
            (Some(mesh), "construct", result)
        }
        Command::Bounds { mesh, x_range, csv } => {
            let (a, b) = match x_range {
                Some(r) => parse_range(&r)?,
                None => (1, max_path_length(&mesh)),
            };
            let bounds: Vec<MultiPathBound> = (a..=b)
                .map(|x| multi_path_upper_bound(&mesh, x))
                .collect::<Result<_, _>>()?;
            if let Some(path) = &csv {
                let mut out = String::from("x,floor_component,count_component,C1,C2,y_bound\n");
                for bd in &bounds {
                    out.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        bd.x,
                        opt_cell(bd.floor_component),
                        bd.count_component,
                        opt_cell(bd.c1),
                        opt_cell(bd.c2),
                        bd.y_max
                    ));
                }
                fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
            }
            let flagged: Vec<u64> = bounds
                .iter()
                .filter(|b| b.c1.is_some() && !b.c1_assumption_holds)
                .map(|b| b.x)
                .collect();
            (
                Some(mesh),
                "bounds",
                json!({
                    "range": [a, b],
                    "csv": csv.map(|p| p.display().to_string()),
                    "c1_assumption_violated_at": flagged,
                    "rows": bounds.iter().map(bound_json).collect::<Vec<_>>(),
                }),
            )
        }
        Command::Oracle { mesh, task, jobs, cap } => {
            let g = build_mesh(mesh);
            let opts = OracleOptions {
                limit: EnumerationLimit {
                    cap,
                    allow_override: false,
                },
                jobs,
            };
            let result = match task {
                OracleTask::Lengths => {
                    let r = oracle_realizable_lengths(&g, &opts)?;
                    let closed: Vec<u64> = realizable_lengths(&mesh).into_iter().collect();
                    json!({
                        "configurations": r.configurations,
                        "lengths": r.set(),
                        "closed_form": closed,
                        "agrees": r.set() == closed,
                        "witnesses": r.lengths,
                    })
                }
                OracleTask::Maxy => {
                    let prof = oracle_max_profile(&g, &opts)?;
                    let rows: Vec<Value> = prof
                        .iter()
                        .map(|p| -> Result<Value> {
                            let b = multi_path_upper_bound(&mesh, p.x as u64)?;
                            Ok(json!({
                                "x": p.x,
                                "y_true": p.y_true,
                                "y_bound": b.y_max,
                                "witness": p.witness,
                            }))
                        })
                        .collect::<Result<_>>()?;
                    let dominated = rows.iter().all(|r| r["y_true"].as_u64() <= r["y_bound"].as_u64());
                    json!({ "configurations": 1u64 << g.tbu_count(), "bound_dominates": dominated, "rows": rows })
                }
                OracleTask::Verify => {
                    let r = verify_theorem_suite(&g, &opts)?;
                    json!({ "passed": r.passed(), "report": r })
                }
            };
            (Some(mesh), "oracle", result)
        }
        Command::Characterize {
            mesh,
            measurements,
            simulate,
            config,
            k0,
            alpha,
            alpha_spread,
            length,
            wavelength,
            n_eff,
            noise,
            seed,
            window_min,
            window_max,
        } => {
            let g = build_mesh(mesh);
            let optics = Optics::at_wavelength(n_eff, wavelength);
            let cfg = match &config {
                Some(c) => Some(read_config(&g, c)?),
                None if simulate => Some(Configuration::all_cross(&g)),
                None => None,
            };
            let ms = if simulate {
                let var = if alpha_spread > 0.0 {
                    ProcessVariation::random(&g, (alpha - alpha_spread, alpha), (length, length), seed)
                } else {
                    ProcessVariation::uniform(&g, alpha, length)
                };
                let var = var.with_noise(noise, seed);
                simulate_measurements(&g, cfg.as_ref().expect("set above"), &var, optics)?
            } else {
                let path = measurements.expect("clap requires a source");
                let file = fs::File::open(&path).with_context(|| format!("opening {}", path.display()))?;
                if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
                    MeasurementSet::from_json(file)?
                } else {
                    MeasurementSet::from_csv(file)?
                }
            };
            let (base, step) = sum_format(g.spec());
            let k0 = match (k0, &cfg) {
                (Some(k), _) => k,
                (None, Some(c)) => path_stats(&trace(&g, c).paths, g.spec())?.k0,
                (None, None) => ms.length_sum().saturating_sub(base) / step,
            };
            let alpha_hat = estimate_alpha(&ms, &g, k0)?;
            let length_est = estimate_length(&ms, &g, optics, k0, (window_min, window_max));
            (
                Some(mesh),
                "characterize",
                json!({
                    "k0": k0,
                    "measurements": ms.len(),
                    "alpha_hat": alpha_hat,
                    "length": match length_est {
                        Ok(l) => serde_json::to_value(l)?,
                        Err(e) => json!({ "error": e.to_string() }),
                    },
                }),
            )
        }
        Command::Advise { lambda, square: _, grid, frontier } => {
            let lambda = parse_lambda(&lambda)?;
            let result = if let Some(g) = grid {
                let (n, m) = parse_dims(&g)?;
                serde_json::to_value(check_feasibility(n, m, &lambda)?)?
            } else if let Some(f) = frontier {
                let (n, m) = parse_dims(&f)?;
                serde_json::to_value(minimal_sizes(&lambda, n, m)?)?
            } else {
                serde_json::to_value(minimal_square_size(&lambda, DEFAULT_SEARCH_CAP)?)?
            };
            (None, "advise", result)
        }
    })
}

fn error_kind(e: &anyhow::Error) -> &'static str {
    use meshroute::*;
    if e.is::<MeshError>() {
        "mesh"
    } else if e.is::<ConfigError>() {
        "config"
    } else if e.is::<TraceError>() {
        "trace"
    } else if e.is::<TheoryError>() {
        "theory"
    } else if e.is::<ConstructError>() {
        "construct"
    } else if e.is::<CharacterizationError>() {
        "characterization"
    } else if e.is::<AdvisorError>() {
        "advisor"
    } else {
        "io"
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((mesh, command, result)) => {
            let report = json!({
                "tool_version": TOOL_VERSION,
                "mesh": mesh.map(|m| m.to_string()),
                "command": command,
                "result": result,
            });
            let mut out = std::io::stdout().lock();
            let written = serde_json::to_writer_pretty(&mut out, &report)
                .map_err(std::io::Error::from)
                .and_then(|()| writeln!(out));
            match written {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
                Err(_) => ExitCode::FAILURE,
            }
        }
        Err(e) => {
            let err = json!({
                "tool_version": TOOL_VERSION,
                "error": { "kind": error_kind(&e), "message": format!("{e:#}") },
            });
            eprintln!("{err}");
            ExitCode::FAILURE
        }
    }
}
