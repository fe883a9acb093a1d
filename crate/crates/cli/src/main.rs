//! `sparse-bellman`: evaluate the closed-form Bellman surface and sharp
//! constants, apply sparse operators to dyadic data, run the verification
//! suite, and drive the lower-bound oracles.
//!
//! Exit codes: 0 = success / all checks passed, 1 = a property or
//! soundness check failed, 2 = usage or domain error.

mod config;
mod output;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sparse_bellman_core::closedform::{
    bellman_b, bellman_m, classify_region, envelope_phi, limit_surface_inf, limit_surface_zero,
    omega_seq, power_mean_constant, weak_norm_constant, BellmanPoint,
};
use sparse_bellman_core::operators::{
    apply_maximal, apply_power_mean, apply_sparse_power, level_set_fraction, weak_quotient,
};
use sparse_bellman_core::oracle::{
    build_vertex_extremizer, dp_compare, dp_value_iteration, enumerate_lower_bound,
    replay_vertex_extremizer, standard_checkpoints, AscentOptions, GridSpec, DEFAULT_GAP_TOL,
    DEFAULT_INTERP_TOL,
};
use sparse_bellman_core::supersolution::{
    check_envelope, check_norm_constant, check_operator_identities, check_r_ordering,
    check_supersolution_suite, Candidate, SampleSpec,
};
use sparse_bellman_core::{CarlesonSequence, OperatorOutput, StepFunction};

use config::{merge, merge_opt, Config};
use output::{fmt_f64, report_line, JsonObj};

#[derive(Parser)]
#[command(
    name = "sparse-bellman",
    version,
    about = "Dyadic sparse operators and their sharp weak-type Bellman surface"
)]
struct Cli {
    /// Worker threads for verify/oracle (0 = auto). Falls back to the
    /// SPARSE_BELLMAN_THREADS environment variable.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Optional JSON config file with the same keys as the long flags;
    /// explicit flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the Bellman surface at (ω, A) or the full function at (x, A, λ).
    Eval(EvalArgs),
    /// Print sharp constants and the ω_n table.
    Constants(ConstantsArgs),
    /// Export a surface over a grid as CSV (ω-major row order).
    Surface(SurfaceArgs),
    /// Run the verification suite against a candidate surface.
    Verify(VerifyArgs),
    /// Lower-bound oracles.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Apply sparse operators to dyadic data files.
    #[command(subcommand)]
    Op(OpCommand),
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long = "A")]
    a: Option<f64>,
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
}

#[derive(Args)]
struct ConstantsArgs {
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    /// Also print ω_0..ω_n for the given r.
    #[arg(long = "omega-n")]
    omega_n: Option<u32>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SurfaceKind {
    #[value(name = "M")]
    M,
    #[value(name = "envelope")]
    Envelope,
    #[value(name = "limit0")]
    Limit0,
    #[value(name = "limitinf")]
    LimitInf,
}

#[derive(Args)]
struct SurfaceArgs {
    #[arg(long)]
    r: Option<f64>,
    #[arg(long, value_enum)]
    what: SurfaceKind,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    #[arg(long = "omega-max")]
    omega_max: Option<f64>,
    /// Output file (stdout when omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Parameter r; repeat the flag to verify several values.
    #[arg(long)]
    r: Vec<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long = "omega-max")]
    omega_max: Option<f64>,
    /// closedform | mutant-minsurface | const-one
    #[arg(long)]
    candidate: Option<String>,
    /// Sample count for the operator-identity check.
    #[arg(long = "op-samples")]
    op_samples: Option<usize>,
    /// Tree depth for the operator-identity check.
    #[arg(long = "op-depth")]
    op_depth: Option<u32>,
    /// Sample count for the r-ordering check.
    #[arg(long = "ordering-samples")]
    ordering_samples: Option<usize>,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Value iteration on an (ω, A) grid, compared to the closed form.
    Dp(DpArgs),
    /// Exhaustive enumeration at small depth.
    Enum(EnumArgs),
    /// Replay a vertex extremizer exactly.
    Extremizer(ExtremizerArgs),
}

#[derive(Args)]
struct DpArgs {
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    #[arg(long)]
    stride: Option<usize>,
    #[arg(long = "gap-tol")]
    gap_tol: Option<f64>,
    #[arg(long = "interp-tol")]
    interp_tol: Option<f64>,
    /// Export the final table as CSV (omega,A,W_k,M,gap).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct EnumArgs {
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    depth: Option<u32>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long = "A")]
    a: Option<f64>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    sweeps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Args)]
struct ExtremizerArgs {
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    n: Option<u32>,
    /// Write the selection as CarlesonSequence JSON.
    #[arg(long = "seq-out")]
    seq_out: Option<PathBuf>,
    /// Write the function as StepFunction JSON.
    #[arg(long = "f-out")]
    f_out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum OpCommand {
    /// r-power sparse operator A^r_{α,r} f (leafwise r-power form).
    Sparse(OpArgs),
    /// Power-mean operator Q_{α,p} f.
    Powermean(OpArgs),
    /// Adapted maximal operator A_{α,∞} f.
    Maximal(OpArgs),
}

#[derive(Args)]
struct OpArgs {
    /// CarlesonSequence JSON file: {"depth": N, "selected": [[d,k], ...]}.
    #[arg(long)]
    seq: PathBuf,
    /// StepFunction JSON file: {"depth": N, "values": [...]}.
    #[arg(long)]
    f: PathBuf,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    /// Also report the level-set fraction and weak quotient at this level.
    #[arg(long)]
    lambda: Option<f64>,
    /// Output file for the operator payload (stdout when omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match &cli.config {
        Some(path) => match Config::load(path) {
            Ok(cfg) => cfg,
            Err(message) => {
                eprintln!("error: {message}");
                return ExitCode::from(2);
            }
        },
        None => Config::empty(),
    };
    init_threads(cli.threads, &cfg);
    match run(cli.command, &cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn init_threads(flag: Option<usize>, cfg: &Config) {
    let env = std::env::var("SPARSE_BELLMAN_THREADS")
        .ok()
        .and_then(|v| v.parse().ok());
    let threads = merge(flag, cfg.u64("threads").map(|v| v as usize).or(env), 0);
    if threads > 0 {
        // failure here only means a pool already exists, which is fine
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
}

fn run(command: Command, cfg: &Config) -> Result<bool, String> {
    match command {
        Command::Eval(args) => cmd_eval(args, cfg),
        Command::Constants(args) => cmd_constants(args, cfg),
        Command::Surface(args) => cmd_surface(args, cfg),
        Command::Verify(args) => cmd_verify(args, cfg),
        Command::Oracle(OracleCommand::Dp(args)) => cmd_oracle_dp(args, cfg),
        Command::Oracle(OracleCommand::Enum(args)) => cmd_oracle_enum(args, cfg),
        Command::Oracle(OracleCommand::Extremizer(args)) => cmd_oracle_extremizer(args, cfg),
        Command::Op(op) => cmd_op(op, cfg),
    }
}

fn require<T>(value: Option<T>, what: &str) -> Result<T, String> {
    value.ok_or_else(|| format!("missing required parameter {what}"))
}

fn cmd_eval(args: EvalArgs, cfg: &Config) -> Result<bool, String> {
    let r = require(merge_opt(args.r, cfg.f64("r")), "--r")?;
    let a = require(merge_opt(args.a, cfg.f64("A")), "--A")?;
    match (args.omega, args.x) {
        (Some(omega), None) => {
            let m = bellman_m(r, omega, a).map_err(|e| e.to_string())?;
            let region = classify_region(r, omega, a).map_err(|e| e.to_string())?;
            let c = weak_norm_constant(r).map_err(|e| e.to_string())?;
            let mut obj = JsonObj::new()
                .f64("r", r)
                .f64("omega", omega)
                .f64("A", a)
                .f64("M", m)
                .str("region", region.as_str());
            if omega <= a {
                obj = obj.f64("Phi", envelope_phi(r, omega, a).map_err(|e| e.to_string())?);
            }
            println!("{}", obj.f64("C", c).finish());
            Ok(true)
        }
        (None, Some(x)) => {
            let lambda = require(merge_opt(args.lambda, cfg.f64("lambda")), "--lambda")?;
            let point = BellmanPoint::new(x, a, lambda).map_err(|e| e.to_string())?;
            let b = bellman_b(r, &point).map_err(|e| e.to_string())?;
            let mut obj = JsonObj::new()
                .f64("r", r)
                .f64("x", x)
                .f64("A", a)
                .f64("lambda", lambda)
                .f64("B", b);
            if lambda > 0.0 {
                let omega = if x == 0.0 {
                    0.0
                } else {
                    x * lambda.powf(-1.0 / r)
                };
                obj = obj.f64("omega", omega);
                if omega.is_finite() {
                    let region = classify_region(r, omega, a).map_err(|e| e.to_string())?;
                    obj = obj.str("region", region.as_str());
                }
            }
            println!("{}", obj.finish());
            Ok(true)
        }
        (Some(_), Some(_)) => Err("use either --omega or --x, not both".into()),
        (None, None) => Err("need --omega (surface) or --x with --lambda (full function)".into()),
    }
}

fn cmd_constants(args: ConstantsArgs, cfg: &Config) -> Result<bool, String> {
    let r = merge_opt(args.r, cfg.f64("r"));
    let p = merge_opt(args.p, cfg.f64("p"));
    if r.is_none() && p.is_none() {
        return Err("need --r and/or --p".into());
    }
    let mut obj = JsonObj::new();
    if let Some(r) = r {
        obj = obj
            .f64("r", r)
            .f64("C", weak_norm_constant(r).map_err(|e| e.to_string())?);
        if let Some(n_max) = merge_opt(args.omega_n, cfg.u64("omega-n").map(|v| v as u32)) {
            let table = (0..=n_max)
                .map(|n| omega_seq(r, n))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            obj = obj.f64_array("omega_n", &table);
        }
    }
    if let Some(p) = p {
        obj = obj
            .f64("p", p)
            .f64("C_p", power_mean_constant(p).map_err(|e| e.to_string())?);
    }
    println!("{}", obj.finish());
    Ok(true)
}

fn cmd_surface(args: SurfaceArgs, cfg: &Config) -> Result<bool, String> {
    let nx = merge(args.nx, cfg.u64("nx").map(|v| v as usize), 201);
    let ny = merge(args.ny, cfg.u64("ny").map(|v| v as usize), 101);
    let omega_max = merge(args.omega_max, cfg.f64("omega-max"), 2.0);
    if nx < 2 || ny < 2 || omega_max.is_nan() || omega_max <= 0.0 {
        return Err("grid needs nx ≥ 2, ny ≥ 2, omega-max > 0".into());
    }
    let r = merge_opt(args.r, cfg.f64("r"));
    // value is None where the surface is undefined (envelope needs ω ≤ A)
    type SurfaceEval = Box<dyn Fn(f64, f64) -> Result<Option<f64>, String>>;
    let (name, eval): (&str, SurfaceEval) = match args.what {
        SurfaceKind::M => {
            let r = require(r, "--r")?;
            weak_norm_constant(r).map_err(|e| e.to_string())?;
            (
                "M",
                Box::new(move |w, a| bellman_m(r, w, a).map(Some).map_err(|e| e.to_string())),
            )
        }
        SurfaceKind::Envelope => {
            let r = require(r, "--r")?;
            weak_norm_constant(r).map_err(|e| e.to_string())?;
            (
                "Phi",
                Box::new(move |w, a| {
                    if w > a {
                        Ok(None) // outside the envelope domain ω ≤ A
                    } else {
                        envelope_phi(r, w, a).map(Some).map_err(|e| e.to_string())
                    }
                }),
            )
        }
        SurfaceKind::Limit0 => ("M0", Box::new(|w, a| Ok(Some(limit_surface_zero(w, a))))),
        SurfaceKind::LimitInf => ("Minf", Box::new(|w, a| Ok(Some(limit_surface_inf(w, a))))),
    };

    let mut out: Box<dyn Write> = match &args.output {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| format!("cannot write {}: {e}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(std::io::stdout())),
    };
    writeln!(out, "omega,A,{name}").map_err(|e| e.to_string())?;
    for i in 0..nx {
        let omega = omega_max * i as f64 / (nx - 1) as f64;
        for j in 0..ny {
            let a = 2.0 * j as f64 / (ny - 1) as f64;
            if let Some(value) = eval(omega, a)? {
                writeln!(out, "{omega:.16e},{a:.16e},{value:.16e}").map_err(|e| e.to_string())?;
            }
        }
    }
    out.flush().map_err(|e| e.to_string())?;
    Ok(true)
}

fn cmd_verify(args: VerifyArgs, cfg: &Config) -> Result<bool, String> {
    let r_values = if args.r.is_empty() {
        vec![merge(None, cfg.f64("r"), 1.0)]
    } else {
        args.r.clone()
    };
    let spec = SampleSpec::new(
        merge(
            args.samples,
            cfg.u64("samples").map(|v| v as usize),
            100_000,
        ),
        merge(args.seed, cfg.u64("seed"), 7),
        merge(args.tolerance, cfg.f64("tolerance"), 1e-9),
        merge(args.omega_max, cfg.f64("omega-max"), 8.0),
    );
    let candidate: Candidate = merge(args.candidate, cfg.string("candidate"), "closedform".into())
        .parse()
        .map_err(|e: String| e)?;
    let op_samples = merge(
        args.op_samples,
        cfg.u64("op-samples").map(|v| v as usize),
        10_000,
    );
    let op_depth = merge(args.op_depth, cfg.u64("op-depth").map(|v| v as u32), 6);
    let ordering_samples = merge(
        args.ordering_samples,
        cfg.u64("ordering-samples").map(|v| v as usize),
        10_000,
    );

    let mut all_passed = true;
    let mut emit = |report: &sparse_bellman_core::PropertyReport, r: Option<f64>| {
        let prefix = match r {
            Some(r) => format!("{{\"r\": {}, ", fmt_f64(r)),
            None => "{".to_string(),
        };
        // splice r into the front of the report object
        let line = report_line(report);
        println!("{prefix}{}", &line[1..]);
        all_passed &= report.passed;
    };

    for &r in &r_values {
        if !r.is_finite() || r <= 0.0 {
            return Err(format!("--r must be positive, got {r}"));
        }
        let surface = candidate.surface(r);
        for report in check_supersolution_suite(r, &spec, &*surface) {
            emit(&report, Some(r));
        }
        if candidate == Candidate::ClosedForm {
            emit(&check_envelope(r, &spec), Some(r));
            emit(&check_norm_constant(r, 6), Some(r));
        }
    }
    if candidate == Candidate::ClosedForm {
        let op_spec = SampleSpec {
            sample_count: op_samples,
            ..spec
        };
        emit(&check_operator_identities(&op_spec, op_depth), None);
        let ord_spec = SampleSpec {
            sample_count: ordering_samples,
            ..spec
        };
        emit(
            &check_r_ordering(&ord_spec, &[0.01, 0.1, 1.0, 10.0, 100.0]),
            None,
        );
    }
    Ok(all_passed)
}

fn cmd_oracle_dp(args: DpArgs, cfg: &Config) -> Result<bool, String> {
    let r = merge(args.r, cfg.f64("r"), 1.0);
    let depth = merge(args.depth, cfg.u64("depth").map(|v| v as usize), 12);
    let nx = merge(args.nx, cfg.u64("nx").map(|v| v as usize), 401);
    let ny = merge(args.ny, cfg.u64("ny").map(|v| v as usize), 101);
    let stride = merge(args.stride, cfg.u64("stride").map(|v| v as usize), 4);
    let gap_tol = merge(args.gap_tol, cfg.f64("gap-tol"), DEFAULT_GAP_TOL);
    let interp_tol = merge(args.interp_tol, cfg.f64("interp-tol"), DEFAULT_INTERP_TOL);

    let grid = GridSpec::with_resolution(r, nx, ny, depth, stride).map_err(|e| e.to_string())?;
    let table = dp_value_iteration(r, &grid).map_err(|e| e.to_string())?;
    let report = dp_compare(&table, r, &standard_checkpoints(r), interp_tol, gap_tol);

    for gap in &report.checkpoints {
        println!(
            "{}",
            JsonObj::new()
                .f64("omega", gap.omega)
                .f64("A", gap.a)
                .f64("W", gap.value)
                .f64("M", gap.closed_form)
                .f64("gap", gap.gap)
                .finish()
        );
    }
    println!(
        "{}",
        JsonObj::new()
            .f64("r", r)
            .u64("depth", depth as u64)
            .f64("max_excess", report.max_excess)
            .f64("worst_omega", report.worst_cell.0)
            .f64("worst_A", report.worst_cell.1)
            .f64("max_iteration_decrease", table.max_iteration_decrease())
            .bool("passed", report.passed)
            .finish()
    );
    if let Some(path) = &args.csv {
        let file =
            File::create(path).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        table
            .write_csv(r, BufWriter::new(file))
            .map_err(|e| e.to_string())?;
    }
    Ok(report.passed && table.max_iteration_decrease() <= 0.0)
}

fn cmd_oracle_enum(args: EnumArgs, cfg: &Config) -> Result<bool, String> {
    let r = merge(args.r, cfg.f64("r"), 1.0);
    let depth = merge(args.depth, cfg.u64("depth").map(|v| v as u32), 3);
    let omega = require(merge_opt(args.omega, cfg.f64("omega")), "--omega")?;
    let a = require(merge_opt(args.a, cfg.f64("A")), "--A")?;
    let tolerance = merge(args.tolerance, cfg.f64("tolerance"), 1e-9);
    let opts = AscentOptions {
        random_restarts: merge(args.restarts, cfg.u64("restarts").map(|v| v as usize), 3),
        max_sweeps: merge(args.sweeps, cfg.u64("sweeps").map(|v| v as usize), 40),
        seed: merge(args.seed, cfg.u64("seed"), 7),
    };
    let value = enumerate_lower_bound(r, depth, omega, a, &opts).map_err(|e| e.to_string())?;
    let closed_form = bellman_m(r, omega, a).map_err(|e| e.to_string())?;
    let sound = value <= closed_form + tolerance;
    println!(
        "{}",
        JsonObj::new()
            .f64("r", r)
            .u64("depth", depth as u64)
            .f64("omega", omega)
            .f64("A", a)
            .f64("value", value)
            .f64("M", closed_form)
            .f64("gap", closed_form - value)
            .bool("passed", sound)
            .finish()
    );
    Ok(sound)
}

fn cmd_oracle_extremizer(args: ExtremizerArgs, cfg: &Config) -> Result<bool, String> {
    let r = merge(args.r, cfg.f64("r"), 1.0);
    let n = require(merge_opt(args.n, cfg.u64("n").map(|v| v as u32)), "--n")?;
    if args.seq_out.is_some() || args.f_out.is_some() {
        let (seq, f) = build_vertex_extremizer(r, n).map_err(|e| e.to_string())?;
        if let Some(path) = &args.seq_out {
            let text = serde_json::to_string(&seq).expect("serializable");
            std::fs::write(path, text + "\n")
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        }
        if let Some(path) = &args.f_out {
            let text = serde_json::to_string(&f).expect("serializable");
            std::fs::write(path, text + "\n")
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        }
    }
    let replay = replay_vertex_extremizer(r, n).map_err(|e| e.to_string())?;
    let target = 2f64.powi(-(n as i32));
    let mean_ok = (replay.mean - replay.omega_n).abs() <= 1e-12 * replay.omega_n;
    let passed =
        replay.fraction == target && replay.root_mass == 2.0 && replay.two_carleson && mean_ok;
    println!(
        "{}",
        JsonObj::new()
            .f64("r", r)
            .u64("n", n as u64)
            .f64("omega_n", replay.omega_n)
            .f64("mean", replay.mean)
            .f64("root_mass", replay.root_mass)
            .bool("two_carleson", replay.two_carleson)
            .f64("fraction", replay.fraction)
            .f64("quotient", replay.quotient)
            .bool("passed", passed)
            .finish()
    );
    Ok(passed)
}

fn load_inputs(args: &OpArgs) -> Result<(CarlesonSequence, StepFunction), String> {
    let seq_text = std::fs::read_to_string(&args.seq)
        .map_err(|e| format!("cannot read {}: {e}", args.seq.display()))?;
    let seq: CarlesonSequence =
        serde_json::from_str(&seq_text).map_err(|e| format!("{}: {e}", args.seq.display()))?;
    let f_text = std::fs::read_to_string(&args.f)
        .map_err(|e| format!("cannot read {}: {e}", args.f.display()))?;
    let f: StepFunction =
        serde_json::from_str(&f_text).map_err(|e| format!("{}: {e}", args.f.display()))?;
    Ok((seq, f))
}

fn write_payload(output: &Option<PathBuf>, payload: &OperatorOutput) -> Result<(), String> {
    let text = serde_json::to_string(payload).expect("serializable");
    match output {
        Some(path) => std::fs::write(path, text + "\n")
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn cmd_op(op: OpCommand, cfg: &Config) -> Result<bool, String> {
    match op {
        OpCommand::Sparse(args) => {
            let r = require(merge_opt(args.r, cfg.f64("r")), "--r")?;
            let (seq, f) = load_inputs(&args)?;
            let out = apply_sparse_power(&seq, &f, r).map_err(|e| e.to_string())?;
            write_payload(&args.output, &out)?;
            if let Some(lambda) = args.lambda {
                let fraction = level_set_fraction(&out, lambda);
                let quotient = weak_quotient(&seq, &f, r, lambda).map_err(|e| e.to_string())?;
                println!(
                    "{}",
                    JsonObj::new()
                        .f64("lambda", lambda)
                        .f64("fraction", fraction)
                        .f64("quotient", quotient)
                        .finish()
                );
            }
            Ok(true)
        }
        OpCommand::Powermean(args) => {
            let p = require(merge_opt(args.p, cfg.f64("p")), "--p")?;
            let (seq, f) = load_inputs(&args)?;
            let out = apply_power_mean(&seq, &f, p).map_err(|e| e.to_string())?;
            write_payload(&args.output, &out)?;
            if let Some(lambda) = args.lambda {
                println!(
                    "{}",
                    JsonObj::new()
                        .f64("lambda", lambda)
                        .f64("fraction", level_set_fraction(&out, lambda))
                        .finish()
                );
            }
            Ok(true)
        }
        OpCommand::Maximal(args) => {
            let (seq, f) = load_inputs(&args)?;
            let out = apply_maximal(&seq, &f).map_err(|e| e.to_string())?;
            write_payload(&args.output, &out)?;
            if let Some(lambda) = args.lambda {
                println!(
                    "{}",
                    JsonObj::new()
                        .f64("lambda", lambda)
                        .f64("fraction", level_set_fraction(&out, lambda))
                        .finish()
                );
            }
            Ok(true)
        }
    }
}
