//! Command-line front end: load, normalize, solve, pull back, certify, save.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::Error;
use crate::instance::{load_instance, load_solution, CertificateSummary, PackCoverInstance, Variant};
use crate::instance::{solution_doc, variant_name};
use crate::logpot::{self, SolverConfig, ThetaStrategy};
use crate::mwu;
use crate::normalize::{normalize, pull_back};
use crate::verify::{certify, CertifyOptions, GapBound, SolverKind, Target};

/// Exit code for malformed command lines.
pub const EXIT_USAGE: i32 = 1;
/// Exit code when a certificate check fails.
pub const EXIT_CERTIFICATE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "pcsdp", version, about = "Packing and covering SDP solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an instance and write the certified primal-dual pair.
    Solve(CommonArgs),
    /// Check a stored solution against its instance.
    Verify(VerifyArgs),
    /// Write the normalized instance (C = I, b = 1).
    Normalize(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverChoice {
    Log,
    Mwu,
}

impl From<SolverChoice> for SolverKind {
    fn from(s: SolverChoice) -> Self {
        match s {
            SolverChoice::Log => SolverKind::Log,
            SolverChoice::Mwu => SolverKind::Mwu,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ThetaChoice {
    Search,
    Direct,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Instance JSON.
    #[arg(long)]
    pub input: PathBuf,
    /// Output path; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, value_enum, default_value_t = SolverChoice::Log)]
    pub solver: SolverChoice,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the per-iteration trace as NDJSON.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Start from uniform dual weights over all constraints.
    #[arg(long)]
    pub dense_init: bool,
    /// Root finder for θ.
    #[arg(long, value_enum, default_value_t = ThetaChoice::Search)]
    pub theta: ThetaChoice,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Solution JSON produced by `solve`.
    #[arg(long)]
    pub solution: PathBuf,
}

enum Failure {
    Usage(String),
    Run(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    let mut body = text.to_string();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match path {
        Some(p) => fs::write(p, body).map_err(|e| Failure::Io(format!("cannot write {}: {e}", p.display()))),
        None => out.write_all(body.as_bytes()).map_err(|e| Failure::Io(e.to_string())),
    }
}

fn check_eps(eps: f64) -> std::result::Result<(), Failure> {
    if eps > 0.0 && eps < 0.5 {
        Ok(())
    } else {
        Err(Failure::Usage(format!("--eps must lie in (0, 0.5), got {eps}")))
    }
}

fn load(args: &CommonArgs) -> std::result::Result<PackCoverInstance, Failure> {
    check_eps(args.eps)?;
    let inst = load_instance(&read(&args.input)?)?;
    if args.solver == SolverChoice::Mwu && inst.variant() != Variant::TypeII {
        return Err(Failure::Usage("the mwu solver supports type2 instances only".into()));
    }
    Ok(inst)
}

/// Parses `argv` (including the program name) and runs the command, writing
/// results to `out` and diagnostics to `err`. Returns the process exit code.
pub fn run_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a, out, err),
        Command::Verify(a) => cmd_verify(a, out, err),
        Command::Normalize(a) => cmd_normalize(a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Run(e)) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Runs with the process arguments and standard streams.
pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

fn cmd_solve(args: &CommonArgs, out: &mut dyn Write, err: &mut dyn Write) -> std::result::Result<i32, Failure> {
    let inst = load(args)?;
    let variant = inst.variant();
    let norm = normalize(&inst, args.eps, args.seed)?;

    let (pair, bound, psi, trace) = match args.solver {
        SolverChoice::Log => {
            let cfg = SolverConfig {
                eps: args.eps,
                seed: args.seed,
                max_iterations: 0,
                theta_strategy: match args.theta {
                    ThetaChoice::Search => ThetaStrategy::BinarySearch,
                    ThetaChoice::Direct => ThetaStrategy::DirectRoot,
                },
                dense_init: args.dense_init,
                debug_checks: false,
            };
            match logpot::solve(&norm, &cfg) {
                Ok(run) => (run.pair, run.iteration_bound, Some(run.psi), run.trace.to_ndjson()),
                Err(Error::IterationCapExceeded { iterations, trace }) => {
                    if let Some(p) = &args.trace {
                        emit(Some(p), &trace, out)?;
                    }
                    return Err(Failure::Run(Error::IterationCapExceeded { iterations, trace }));
                }
                Err(e) => return Err(e.into()),
            }
        }
        SolverChoice::Mwu => {
            let run = mwu::solve_mwu(&norm, args.eps)?;
            (run.pair, run.iteration_bound, None, run.trace.to_ndjson())
        }
    };
    if let Some(p) = &args.trace {
        emit(Some(p), &trace, out)?;
    }

    let kind: SolverKind = args.solver.into();
    let mut original = pull_back(&inst, &norm, &pair)?;
    let opts = CertifyOptions { solver: kind, eps: args.eps, iteration_bound: Some(bound) };
    let cert = certify(Target::Original(&inst), &original, &opts)?;
    original.certificates = CertificateSummary {
        max_violation: cert.max_primal_violation.max(0.0),
        dual_min_eig: -cert.dual_spectral_residual,
        gap: cert.gap_ratio,
    };

    let claim = GapBound::claim(variant, kind, pair.epsilon);
    let mut doc = solution_doc(&original);
    doc.report = Some(json!({
        "variant": variant_name(variant),
        "solver": kind,
        "eps_requested": args.eps,
        "eps_working": pair.epsilon,
        "normalized_dim": norm.dim,
        "normalized_gap": pair.primal_objective / pair.dual_objective,
        "claim_gap_bound": claim,
        "pipeline_gap_bound": cert.gap_bound,
        "psi": psi,
        "iteration_bound": bound,
        "dropped": norm.record.dropped.iter().map(|(i, _)| *i).collect::<Vec<_>>(),
        "trimmed": norm.record.trimmed,
        "perturbation": norm.record.delta,
        "certificate": cert,
    }));
    let text = serde_json::to_string_pretty(&doc).expect("solution serializes");
    emit(args.output.as_deref(), &text, out)?;
    if cert.passed {
        Ok(0)
    } else {
        let _ = writeln!(
            err,
            "certificate failed: violation {:e}, dual residual {:e}, gap {} vs {:?}",
            cert.max_primal_violation, cert.dual_spectral_residual, cert.gap_ratio, cert.gap_bound
        );
        Ok(EXIT_CERTIFICATE)
    }
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> std::result::Result<i32, Failure> {
    let common = &args.common;
    let inst = load(common)?;
    let text = read(&args.solution)?;
    let pair = load_solution(&text)?;
    let bound = serde_json::from_str::<serde_json::Value>(&text)
        .ok()
        .and_then(|v| v.get("report")?.get("iteration_bound")?.as_u64());
    let opts = CertifyOptions { solver: common.solver.into(), eps: common.eps, iteration_bound: bound };
    let cert = certify(Target::Original(&inst), &pair, &opts)?;
    let body = serde_json::to_string_pretty(&cert).expect("certificate serializes");
    emit(common.output.as_deref(), &body, out)?;
    if cert.passed {
        Ok(0)
    } else {
        let _ = writeln!(err, "certificate failed");
        Ok(EXIT_CERTIFICATE)
    }
}

fn cmd_normalize(args: &CommonArgs, out: &mut dyn Write) -> std::result::Result<i32, Failure> {
    let inst = load(args)?;
    let norm = normalize(&inst, args.eps, args.seed)?;
    let text = crate::instance::save_instance(&norm.to_instance()?);
    emit(args.output.as_deref(), &text, out)?;
    Ok(0)
}
