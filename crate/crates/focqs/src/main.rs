//! Command-line entry point: instance generation, controller runs,
//! seeded sweeps, schedule replay, and the exact solver.

use clap::{Parser, Subcommand};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use focqs::controllers::{
    falqon_run, focqs_run, focqs_windowed_run, iterative_focqs_run, read_schedule,
    write_schedule, ControlLaw, ControlMode, ControlSchedule, FeedbackRecord, FocqsParams,
    Provenance, DEFAULT_BETA0, DEFAULT_FALLOFF, DEFAULT_GRAD_TOLERANCE, DEFAULT_INNER_STEPS,
    DEFAULT_WARMUP_LAYERS,
};
use focqs::experiment::{
    replay_schedule, run_batch, write_summary, write_trace, RunTrace, TraceHeader,
};
use focqs::problems::{
    exact_ground_energy, gen_ising, gen_mis, read_instance, write_instance, ProblemInstance,
    DEFAULT_PENALTY_WEIGHT,
};
use focqs::statevector::{EvolutionScheme, SchemeKind};

const EXIT_RUNTIME: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "focqs",
    version,
    about = "Feedback-controlled quantum optimization simulator (FALQON / FOCQS family)"
)]
struct Cli {
    /// Suppress progress output on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random problem instance file.
    Gen {
        /// Problem family: ising | mis
        #[arg(long)]
        kind: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// Penalty weight for MIS instances.
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a feedback controller on a stored instance.
    Run {
        /// falqon | falqon-bounded-clipped | falqon-bounded-bang |
        /// focqs | focqs-windowed | focqs-iter
        #[arg(long)]
        algo: String,
        #[arg(long)]
        instance: PathBuf,
        /// Circuit depth; for focqs-iter defaults to the input schedule's
        /// length.
        #[arg(long)]
        layers: Option<usize>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        beta0: Option<f64>,
        #[arg(long)]
        falloff: Option<f64>,
        /// Retroactive-update window in layers; omit for unbounded.
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        warmup: Option<usize>,
        #[arg(long)]
        inner_steps: Option<usize>,
        #[arg(long)]
        grad_tolerance: Option<f64>,
        /// Input schedule for focqs-iter.
        #[arg(long)]
        u0: Option<PathBuf>,
        #[arg(long, default_value = "first-order-trotter")]
        scheme: String,
        #[arg(long, default_value_t = 1)]
        substeps: usize,
        /// Trace output path.
        #[arg(long)]
        out: PathBuf,
        /// Schedule output path; defaults to "<out>.schedule.json".
        #[arg(long)]
        schedule_out: Option<PathBuf>,
    },
    /// Run a seeded sweep described by a config file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Trial parallelism; overrides the config value.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Re-evaluate a stored schedule with no feedback.
    Replay {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long, default_value = "first-order-trotter")]
        scheme: String,
        #[arg(long, default_value_t = 1)]
        substeps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the exact ground energy and argmin bitstring of an instance.
    Solve {
        #[arg(long)]
        instance: PathBuf,
    },
}

enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<focqs::Error> for CliError {
    fn from(e: focqs::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}

fn parse_scheme(kind: &str, substeps: usize) -> Result<EvolutionScheme, CliError> {
    let kind: SchemeKind = kind
        .parse()
        .map_err(|e: focqs::Error| usage(e.to_string()))?;
    if substeps == 0 {
        return Err(usage("substeps must be >= 1"));
    }
    Ok(EvolutionScheme { kind, substeps })
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen {
            kind,
            n,
            seed,
            lambda,
            out,
        } => cmd_gen(&kind, n, seed, lambda, &out, cli.quiet),
        Command::Run {
            algo,
            instance,
            layers,
            dt,
            beta0,
            falloff,
            window,
            warmup,
            inner_steps,
            grad_tolerance,
            u0,
            scheme,
            substeps,
            out,
            schedule_out,
        } => {
            let scheme = parse_scheme(&scheme, substeps)?;
            let args = RunArgs {
                algo,
                instance,
                layers,
                dt,
                beta0,
                falloff,
                window,
                warmup,
                inner_steps,
                grad_tolerance,
                u0,
                scheme,
                out,
                schedule_out,
                quiet: cli.quiet,
            };
            cmd_run(args)
        }
        Command::Sweep {
            config,
            out,
            threads,
        } => cmd_sweep(&config, &out, threads, cli.quiet),
        Command::Replay {
            instance,
            schedule,
            scheme,
            substeps,
            out,
        } => {
            let scheme = parse_scheme(&scheme, substeps)?;
            cmd_replay(&instance, &schedule, scheme, &out)
        }
        Command::Solve { instance } => cmd_solve(&instance),
    }
}

fn cmd_gen(
    kind: &str,
    n: usize,
    seed: u64,
    lambda: Option<f64>,
    out: &Path,
    quiet: bool,
) -> Result<(), CliError> {
    let inst = match kind {
        "ising" => {
            if lambda.is_some() {
                return Err(usage("--lambda only applies to MIS instances"));
            }
            gen_ising(n, seed)?
        }
        "mis" => gen_mis(n, seed, lambda.unwrap_or(DEFAULT_PENALTY_WEIGHT))?,
        other => return Err(usage(format!("unknown problem kind \"{other}\""))),
    };
    write_instance(out, &inst)?;
    if !quiet {
        eprintln!(
            "wrote {} ({} cost terms) to {}",
            inst.label(),
            inst.cost.len(),
            out.display()
        );
    }
    Ok(())
}

struct RunArgs {
    algo: String,
    instance: PathBuf,
    layers: Option<usize>,
    dt: Option<f64>,
    beta0: Option<f64>,
    falloff: Option<f64>,
    window: Option<usize>,
    warmup: Option<usize>,
    inner_steps: Option<usize>,
    grad_tolerance: Option<f64>,
    u0: Option<PathBuf>,
    scheme: EvolutionScheme,
    out: PathBuf,
    schedule_out: Option<PathBuf>,
    quiet: bool,
}

fn focqs_params_from(args: &RunArgs, mode: ControlMode) -> FocqsParams {
    FocqsParams {
        beta0: args.beta0.unwrap_or(DEFAULT_BETA0),
        falloff: args.falloff.unwrap_or(DEFAULT_FALLOFF),
        window: args.window,
        mode,
    }
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let known = [
        "falqon",
        "falqon-bounded-clipped",
        "falqon-bounded-bang",
        "focqs",
        "focqs-windowed",
        "focqs-iter",
    ];
    if !known.contains(&args.algo.as_str()) {
        return Err(usage(format!(
            "unknown algorithm \"{}\"; expected one of {}",
            args.algo,
            known.join(", ")
        )));
    }
    if args.algo == "focqs-iter" && args.u0.is_none() {
        return Err(usage("focqs-iter requires --u0 <schedule file>"));
    }
    if args.algo == "focqs-windowed" && args.window.is_none() {
        return Err(usage("focqs-windowed requires --window <layers>"));
    }

    let inst = read_instance(&args.instance)?;
    let dt = args.dt.unwrap_or(0.1);
    let scheme = args.scheme;
    let layers = args.layers.unwrap_or(100);

    let (schedule, record, params_json): (ControlSchedule, FeedbackRecord, serde_json::Value) =
        match args.algo.as_str() {
            "falqon" | "falqon-bounded-clipped" | "falqon-bounded-bang" => {
                let law = match args.algo.as_str() {
                    "falqon" => ControlLaw::Unbounded,
                    "falqon-bounded-clipped" => ControlLaw::BoundedClipped,
                    _ => ControlLaw::BoundedBang,
                };
                let (s, r) = falqon_run(&inst, layers, dt, scheme, law)?;
                (s, r, json!({ "law": law, "layers": layers }))
            }
            "focqs" => {
                let params = focqs_params_from(&args, ControlMode::Unbounded);
                let (s, r) = focqs_run(&inst, layers, dt, &params, scheme)?;
                (s, r, json!({ "params": params, "layers": layers }))
            }
            "focqs-windowed" => {
                let params = focqs_params_from(&args, ControlMode::Unbounded);
                let inner_steps = args.inner_steps.unwrap_or(DEFAULT_INNER_STEPS);
                let grad_tolerance = args.grad_tolerance.unwrap_or(DEFAULT_GRAD_TOLERANCE);
                let warmup = args.warmup.unwrap_or(DEFAULT_WARMUP_LAYERS);
                let (s, r) = focqs_windowed_run(
                    &inst,
                    layers,
                    dt,
                    &params,
                    inner_steps,
                    grad_tolerance,
                    warmup,
                    scheme,
                )?;
                (
                    s,
                    r,
                    json!({
                        "params": params,
                        "layers": layers,
                        "inner_steps": inner_steps,
                        "grad_tolerance": grad_tolerance,
                        "warmup_layers": warmup,
                    }),
                )
            }
            "focqs-iter" => {
                let u0_path = args.u0.as_ref().expect("checked above");
                let (u0, _prov) = read_schedule(u0_path)?;
                if let Some(flag_dt) = args.dt {
                    if flag_dt != u0.dt {
                        return Err(usage(format!(
                            "--dt {} conflicts with the input schedule's dt {}",
                            flag_dt, u0.dt
                        )));
                    }
                }
                let dt = u0.dt;
                let layers = args.layers.unwrap_or(u0.len());
                if layers > u0.len() {
                    return Err(usage(format!(
                        "--layers {} exceeds the input schedule's length {}",
                        layers,
                        u0.len()
                    )));
                }
                let params = focqs_params_from(&args, u0.mode);
                let (s, r) = iterative_focqs_run(&inst, &u0, layers, dt, &params, scheme)?;
                (
                    s,
                    r,
                    json!({
                        "params": params,
                        "layers": layers,
                        "u0": u0_path.display().to_string(),
                    }),
                )
            }
            _ => unreachable!(),
        };

    let dt = schedule.dt;
    let header = TraceHeader {
        instance: args.instance.display().to_string(),
        algorithm: args.algo.clone(),
        params: params_json.clone(),
        dt,
        scheme,
    };
    let trace = RunTrace::from_run(header, &schedule, &record);
    write_trace(&args.out, &trace)?;

    let schedule_path = args
        .schedule_out
        .clone()
        .unwrap_or_else(|| derived_schedule_path(&args.out));
    let provenance = Provenance {
        algorithm: args.algo.clone(),
        params: params_json,
        instance: args.instance.display().to_string(),
    };
    write_schedule(&schedule_path, &schedule, &provenance)?;

    if !args.quiet {
        eprintln!(
            "{}: final energy {:.6}, trace {}, schedule {}",
            args.algo,
            record.energy.last().copied().unwrap_or(f64::NAN),
            args.out.display(),
            schedule_path.display()
        );
    }
    Ok(())
}

fn derived_schedule_path(out: &Path) -> PathBuf {
    let mut os = out.as_os_str().to_owned();
    os.push(".schedule.json");
    PathBuf::from(os)
}

fn cmd_sweep(
    config_path: &Path,
    out: &Path,
    threads: Option<usize>,
    quiet: bool,
) -> Result<(), CliError> {
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", config_path.display())))?;
    let mut config = serde_json::from_str::<focqs::experiment::SweepConfig>(&text)
        .map_err(|e| usage(format!("config {}: {e}", config_path.display())))?;
    if threads.is_some() {
        config.threads = threads;
    }
    if !quiet {
        eprintln!(
            "sweep: {} algorithms x {:?} x {} seeds, {} layers",
            config.algorithms.len(),
            config.n,
            config.resolved_seeds().map(|s| s.len()).unwrap_or(0),
            config.layers
        );
    }
    let summary = run_batch(&config)?;
    write_summary(out, &summary)?;
    if !quiet {
        for cell in &summary.cells {
            eprintln!(
                "  {} n={}: best ratio {:.4} +/- {:.4} ({} trials)",
                cell.algorithm, cell.n, cell.mean_ratio_best, cell.sem_best, cell.trials
            );
        }
    }
    if !summary.failures.is_empty() {
        for f in &summary.failures {
            eprintln!(
                "trial failed: {} n={} seed={}: {}",
                f.algorithm, f.n, f.seed, f.message
            );
        }
        return Err(CliError::Runtime(format!(
            "{} trial(s) failed; summary written to {}",
            summary.failures.len(),
            out.display()
        )));
    }
    Ok(())
}

fn cmd_replay(
    instance: &Path,
    schedule_path: &Path,
    scheme: EvolutionScheme,
    out: &Path,
) -> Result<(), CliError> {
    let inst: ProblemInstance = read_instance(instance)?;
    let (schedule, _prov) = read_schedule(schedule_path)?;
    let mut trace = replay_schedule(&inst, &schedule, scheme)?;
    trace.header.instance = instance.display().to_string();
    trace.header.params = json!({ "schedule": schedule_path.display().to_string() });
    write_trace(out, &trace)?;
    Ok(())
}

fn cmd_solve(instance: &Path) -> Result<(), CliError> {
    let inst: ProblemInstance = read_instance(instance)?;
    let ground = exact_ground_energy(&inst)?;
    println!("energy: {:.16e}", ground.energy);
    println!("bitstring: {}", ground.bitstring_string(inst.n));
    Ok(())
}
