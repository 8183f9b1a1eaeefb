mod spec;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use ifipm_core::drivers::{IfConfig, Termination};
use ifipm_core::instances::normalized_objective_gap;
use ifipm_core::output::write_trace_csv;
use ifipm_core::qcost::{cost_table_rows, predict_if_totals, CostInputs, MODEL_LABEL};
use ifipm_core::study::kappa_study;
use ifipm_core::{Error, Result};

use spec::{build_instance, execute, Algorithm, InstanceKind, RunSpec, Scaling};

#[derive(Parser)]
#[command(name = "ifipm", version, about = "Inexact interior point methods for semidefinite optimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and write its trace and summary.
    Run(RunArgs),
    /// Write a generated instance in SDPA sparse format.
    Generate(GenerateArgs),
    /// Fit the growth of the Newton condition number against ν on an LP.
    KappaStudy(StudyArgs),
    /// Evaluate the quantum cost model.
    Qcost(QcostArgs),
    /// Run one solve per seed on worker threads.
    Batch(BatchArgs),
}

#[derive(Args)]
struct OutputArgs {
    /// Directory receiving trace.csv and summary.json.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    trace_csv: Option<PathBuf>,
    #[arg(long)]
    summary_json: Option<PathBuf>,
    /// Also write the cost-model prediction for this run.
    #[arg(long)]
    qcost_json: Option<PathBuf>,
    /// Write zeros in the wall_ms column so traces are reproducible.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    spec: RunSpec,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    spec: RunSpec,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StudyArgs {
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of positive entries of the optimal x; 0 draws a generic LP.
    #[arg(long, default_value_t = 2)]
    support: usize,
    #[arg(long, value_enum, default_value_t = Scaling::Nt)]
    scaling: Scaling,
    /// Comma-separated target accuracies, one study per value.
    #[arg(long, value_delimiter = ',', default_value = "1e-10")]
    eps_list: Vec<f64>,
}

#[derive(Args)]
struct QcostArgs {
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 10.0)]
    kappa: f64,
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
    #[arg(long, default_value_t = 1.0)]
    kappa_a: f64,
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    #[arg(long, default_value_t = 1.0)]
    a_frob: f64,
}

#[derive(Args)]
struct BatchArgs {
    #[command(flatten)]
    spec: RunSpec,
    /// First seed of the batch.
    #[arg(long, default_value_t = 0)]
    first_seed: u64,
    #[arg(long, default_value_t = 4)]
    count: u64,
    #[arg(long, default_value_t = 2)]
    threads: usize,
    /// Each run writes into <out-dir>/seed-<seed>/.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    no_timing: bool,
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or("IFIPM_LOG", "warn");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

/// Writes to standard output; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value).map_err(json_err)?;
    writeln!(w)?;
    Ok(())
}

/// Solves `spec`, writes the requested files and returns the summary.
fn run_one(spec: &RunSpec, out: &OutputArgs) -> Result<serde_json::Value> {
    let inst = build_instance(spec)?;
    log::info!(
        "solving {:?} instance n={} m={} with {:?}",
        spec.instance(),
        inst.problem.n,
        inst.problem.m,
        spec.algorithm()
    );
    let started = std::time::Instant::now();
    let outcome = execute(spec, &inst)?;
    let trace = &outcome.trace;
    let last = trace.records.last().expect("trace has a start row");
    log::info!("{:?} after {} iterations", trace.termination, trace.iterations());
    let p = &inst.problem;
    let config = match spec.algorithm() {
        Algorithm::If => serde_json::to_value(spec.if_config()),
        Algorithm::Ii => serde_json::to_value(spec.ii_config(outcome.rho.unwrap_or(f64::NAN))),
    }
    .map_err(json_err)?;
    let summary = json!({
        "termination": trace.termination,
        "iterations": trace.iterations(),
        "final_nu": trace.iterate.nu(),
        "final_gap": normalized_objective_gap(p, &trace.iterate),
        "primal_objective": p.primal_objective(&trace.iterate.x),
        "dual_objective": p.dual_objective(&trace.iterate.y),
        "rp_norm": last.rp_norm,
        "rd_norm": last.rd_norm,
        "tau": last.tau,
        "theta": last.theta,
        "rho": outcome.rho,
        "seed": spec.seed(),
        "n": p.n,
        "m": p.m,
        "wall_ms": if out.no_timing { 0.0 } else { started.elapsed().as_secs_f64() * 1e3 },
        "spec": spec,
        "config": config,
    });

    let in_dir = |name: &str| out.out_dir.as_ref().map(|d| d.join(name));
    if let Some(d) = &out.out_dir {
        std::fs::create_dir_all(d)?;
    }
    if let Some(path) = out.trace_csv.clone().or_else(|| in_dir("trace.csv")) {
        write_trace_csv(BufWriter::new(File::create(&path)?), &trace.records, !out.no_timing)?;
    }
    if let Some(path) = out.summary_json.clone().or_else(|| in_dir("summary.json")) {
        write_json(&path, &summary)?;
    }
    if let Some(path) = &out.qcost_json {
        let kappa = trace
            .records
            .iter()
            .filter_map(|r| r.kappa_newton)
            .fold(1.0, f64::max);
        let eps = spec.eps.unwrap_or(IfConfig::default().epsilon);
        let report = predict_if_totals(&CostInputs::new(p.n, p.m, kappa, eps))?;
        write_json(path, &report)?;
    }
    if let Termination::Failed { reason } = &trace.termination {
        return Err(Error::NonConvergence(format!("solver failed: {reason}")));
    }
    if trace.termination == Termination::MaxIter {
        return Err(Error::MaxIter(trace.iterations()));
    }
    Ok(summary)
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let spec = args.spec.resolve()?;
    let summary = run_one(&spec, &args.out)?;
    if args.out.summary_json.is_none() && args.out.out_dir.is_none() {
        emit(&(serde_json::to_string_pretty(&summary).map_err(json_err)? + "\n"))?;
    }
    Ok(())
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    let spec = args.spec.resolve()?;
    if spec.instance() == InstanceKind::Sdpa {
        return Err(Error::Config("generate needs a generated instance kind".into()));
    }
    let inst = build_instance(&spec)?;
    let text = ifipm_core::sdpa::format_sdpa(&inst.problem);
    match args.out {
        Some(path) => std::fs::write(path, text)?,
        None => emit(&text)?,
    }
    Ok(())
}

fn cmd_kappa_study(args: StudyArgs) -> Result<()> {
    let mut reports = Vec::new();
    for eps in &args.eps_list {
        let (inst, a) = if args.support == 0 {
            let lo = ifipm_core::instances::gen_random_lo(args.n, args.m, args.seed)?;
            (spec::Instance { problem: lo.problem, start: Some(lo.start) }, lo.a)
        } else {
            let (lo, _) = ifipm_core::instances::gen_degenerate_lo(args.n, args.m, args.support, args.seed)?;
            (spec::Instance { problem: lo.problem, start: Some(lo.start) }, lo.a)
        };
        let cfg = IfConfig {
            epsilon: *eps,
            scaling: args.scaling.into(),
            ..IfConfig::default()
        };
        let st = kappa_study(&inst.problem, inst.start.as_ref().expect("generated start"), &cfg, Some(&a))?;
        reports.push(json!({
            "epsilon": eps,
            "iterations": st.iterations,
            "nullspace_slope": st.fit.slope,
            "nullspace_r2": st.fit.r2,
            "compact_slope": st.compact_fit.as_ref().map(|f| f.slope),
            "compact_r2": st.compact_fit.as_ref().map(|f| f.r2),
            "spread_slope": st.spread_fit.as_ref().map(|f| f.slope),
            "tail_inversions": st.tail_inversions,
            "study": st,
        }));
    }
    emit(&(serde_json::to_string_pretty(&reports).map_err(json_err)? + "\n"))?;
    Ok(())
}

fn cmd_qcost(args: QcostArgs) -> Result<()> {
    let inputs = CostInputs {
        kappa_a: args.kappa_a,
        rho: args.rho,
        a_frob: args.a_frob,
        ..CostInputs::new(args.n, args.m.unwrap_or(args.n * args.n), args.kappa, args.eps)
    };
    let report = predict_if_totals(&inputs)?;
    let table: Vec<_> = cost_table_rows()
        .iter()
        .map(|r| {
            json!({
                "method": r.method,
                "runtime": r.render(),
                "n_exponent": r.n_exponent(),
                "value": r.eval(&inputs),
            })
        })
        .collect();
    let out = json!({ "model": MODEL_LABEL, "inputs": inputs, "report": report, "table": table });
    emit(&(serde_json::to_string_pretty(&out).map_err(json_err)? + "\n"))?;
    Ok(())
}

fn cmd_batch(args: BatchArgs) -> Result<()> {
    let base = args.spec.resolve()?;
    let seeds: Vec<u64> = (args.first_seed..args.first_seed + args.count).collect();
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<std::result::Result<serde_json::Value, String>>>> =
        Mutex::new(vec![None; seeds.len()]);
    std::thread::scope(|scope| {
        for _ in 0..args.threads.max(1) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= seeds.len() {
                    break;
                }
                let spec = RunSpec { seed: Some(seeds[i]), ..base.clone() };
                let out = OutputArgs {
                    out_dir: args.out_dir.as_ref().map(|d| d.join(format!("seed-{}", seeds[i]))),
                    trace_csv: None,
                    summary_json: None,
                    qcost_json: None,
                    no_timing: args.no_timing,
                };
                let r = run_one(&spec, &out).map_err(|e| e.to_string());
                results.lock().expect("no poisoned lock")[i] = Some(r);
            });
        }
    });
    let mut failures = 0;
    for (seed, r) in seeds.iter().zip(results.into_inner().expect("no poisoned lock")) {
        match r.expect("every seed ran") {
            Ok(s) => println!(
                "seed {seed}: ok iterations={} final_nu={:e}",
                s["iterations"], s["final_nu"].as_f64().unwrap_or(f64::NAN)
            ),
            Err(e) => {
                failures += 1;
                println!("seed {seed}: failed: {e}");
            }
        }
    }
    if failures > 0 {
        return Err(Error::NonConvergence(format!("{failures} of {} runs", seeds.len())));
    }
    Ok(())
}

fn main() -> ExitCode {
    init_logging();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Generate(a) => cmd_generate(a),
        Command::KappaStudy(a) => cmd_kappa_study(a),
        Command::Qcost(a) => cmd_qcost(a),
        Command::Batch(a) => cmd_batch(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            let reason = json!({ "error": e.to_string() });
            eprintln!("{reason}");
            ExitCode::from(1)
        }
    }
}
