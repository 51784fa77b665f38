use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rug::{Float, Rational};
use serde::Serialize;

use sixvertex::asymptotics::{fit_constant, fit_free_energy, fit_kappa, predict, FitWindow};
use sixvertex::hankel::toda_residual;
use sixvertex::lattice::{enumerate_dfs, transfer_matrix_zn};
use sixvertex::orthopoly::{norms_from_moments, zn_sequence};
use sixvertex::report::{compare_row, decimal, CompareRow, FitReport, NormsReport, PredictionReport};
use sixvertex::scalar::{parse_rational, rational_string};
use sixvertex::specfun::MomentSequence;
use sixvertex::{Error, Execution, Phase, PhaseParams, PrecisionContext, Weights};

mod output;

use output::{emit, Format, Table};

#[derive(Parser)]
#[command(name = "sixv", version, about = "Six-vertex model with domain wall boundary conditions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Anisotropy Delta and phase of a weight triple.
    Phase {
        #[command(flatten)]
        weights: WeightArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Exact Z_n by enumeration or transfer matrix.
    Exact {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        weights: WeightArgs,
        #[arg(long, value_enum, default_value_t = Method::Dfs)]
        method: Method,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Z_n against the asymptotic prediction for n = 1..nmax.
    Compare {
        #[command(flatten)]
        phase: PhaseArgs,
        #[arg(long)]
        nmax: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Relative residual of the Toda equation for tau_n.
    Toda {
        #[command(flatten)]
        phase: PhaseArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        h: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Free energy, exponent and constant fitted from Z_1..Z_nmax.
    Fit {
        #[command(flatten)]
        phase: PhaseArgs,
        #[arg(long)]
        nmax: usize,
        /// Inclusive range LO:HI of n (default: top third).
        #[arg(long)]
        window: Option<String>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Orthogonal-polynomial norms h_0..h_{n-1} of the phase's weight.
    Norms {
        #[command(flatten)]
        phase: PhaseArgs,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args)]
struct WeightArgs {
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: String,
    #[arg(long)]
    c: String,
}

#[derive(Args)]
struct PhaseArgs {
    #[arg(long, value_enum)]
    phase: PhaseArg,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
}

#[derive(Args)]
struct OutArgs {
    #[arg(long, default_value_t = 256)]
    bits: u32,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PhaseArg {
    Disordered,
    Ferro,
    Af,
    CriticalFd,
    CriticalAfd,
}

impl From<PhaseArg> for Phase {
    fn from(p: PhaseArg) -> Phase {
        match p {
            PhaseArg::Disordered => Phase::Disordered,
            PhaseArg::Ferro => Phase::Ferroelectric,
            PhaseArg::Af => Phase::Antiferroelectric,
            PhaseArg::CriticalFd => Phase::CriticalFd,
            PhaseArg::CriticalAfd => Phase::CriticalAfd,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    Dfs,
    Transfer,
}

/// Failures mapped to exit codes.
enum Failure {
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CmdResult = Result<(), Failure>;

fn rational(name: &str, text: &str) -> Result<Rational, Error> {
    parse_rational(text).ok_or_else(|| Error::Domain(format!("--{name} must be a decimal literal, got {text:?}")))
}

/// Parameters enter as exact rationals and are rounded once, well above the
/// working precision.
fn param_bits(bits: u32) -> u32 {
    (4 * bits).max(1024)
}

fn float_param(name: &str, text: &str, bits: u32) -> Result<Float, Error> {
    Ok(Float::with_val(param_bits(bits), rational(name, text)?))
}

fn phase_params(args: &PhaseArgs, bits: u32) -> Result<PhaseParams, Error> {
    let phase: Phase = args.phase.into();
    let get = |name: &str, v: &Option<String>| v.as_deref().map(|s| float_param(name, s, bits)).transpose();
    let (t, gamma, alpha) = (get("t", &args.t)?, get("gamma", &args.gamma)?, get("alpha", &args.alpha)?);
    if phase.is_critical() {
        if t.is_some() || gamma.is_some() {
            return Err(Error::Domain(format!("{phase} takes --alpha, not --t/--gamma")));
        }
        if alpha.is_none() {
            return Err(Error::Domain(format!("{phase} requires --alpha")));
        }
    } else {
        if alpha.is_some() {
            return Err(Error::Domain(format!("{phase} takes --t and --gamma, not --alpha")));
        }
        if t.is_none() || gamma.is_none() {
            return Err(Error::Domain(format!("{phase} requires both --t and --gamma")));
        }
    }
    PhaseParams::new(phase, t, gamma, alpha)
}

fn context(bits: u32) -> Result<PrecisionContext, Error> {
    PrecisionContext::new(bits)
}

#[derive(Serialize)]
struct PhaseOut {
    delta: String,
    phase: Phase,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    borderline: bool,
}

fn cmd_phase(weights: &WeightArgs, out: &OutArgs) -> CmdResult {
    let w = Weights::new(rational("a", &weights.a)?, rational("b", &weights.b)?, rational("c", &weights.c)?)?;
    let class = w.classify(&context(out.bits)?);
    let result = PhaseOut { delta: rational_string(&class.delta), phase: class.phase, borderline: class.borderline };
    let table = Table::new(&["delta", "phase"]).row(vec![result.delta.clone(), class.phase.to_string()]);
    emit(out.format, out.out.as_deref(), &result, &table)
}

#[derive(Serialize)]
struct ExactOut {
    n: usize,
    method: Method,
    #[serde(rename = "Z_n")]
    z: String,
}

fn cmd_exact(n: usize, weights: &WeightArgs, method: Method, out: &OutArgs) -> CmdResult {
    let w = Weights::new(rational("a", &weights.a)?, rational("b", &weights.b)?, rational("c", &weights.c)?)?;
    let z = match method {
        Method::Dfs => enumerate_dfs(n, &w)?.0,
        Method::Transfer => transfer_matrix_zn(n, &w)?,
    };
    let result = ExactOut { n, method, z: rational_string(&z) };
    let table = Table::new(&["n", "Z_n"]).row(vec![n.to_string(), result.z.clone()]);
    emit(out.format, out.out.as_deref(), &result, &table)
}

#[derive(Serialize)]
struct CompareOut {
    phase: Phase,
    nmax: usize,
    bits: u32,
    rows: Vec<CompareRow>,
}

fn cmd_compare(args: &PhaseArgs, nmax: usize, out: &OutArgs) -> CmdResult {
    let p = phase_params(args, out.bits)?;
    let ctx = context(out.bits)?;
    let seq = zn_sequence(&p, nmax, &ctx)?;
    let exec = Execution::default();
    let rows = exec
        .map_slice(&seq, |v| predict(&p, v.n, &ctx.at_bits(v.bits)).and_then(|pred| compare_row(v, &pred)))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["n", "Z_n", "log_Zn", "prediction", "log_prediction", "ratio"]);
    for r in &rows {
        table = table.row(vec![
            r.n.to_string(),
            r.z.clone(),
            r.log_zn.clone(),
            r.prediction.clone(),
            r.log_prediction.clone(),
            r.ratio.clone(),
        ]);
    }
    let bits = seq.first().map_or(out.bits, |v| v.bits);
    emit(out.format, out.out.as_deref(), &CompareOut { phase: p.phase(), nmax, bits, rows }, &table)
}

#[derive(Serialize)]
struct TodaOut {
    phase: Phase,
    n: usize,
    h: String,
    bits: u32,
    residual: String,
}

fn cmd_toda(args: &PhaseArgs, n: usize, h: &str, out: &OutArgs) -> CmdResult {
    let p = phase_params(args, out.bits)?;
    let ctx = context(out.bits)?;
    let step = float_param("h", h, out.bits)?;
    let r = toda_residual(&p, n, &step, &ctx)?;
    let result = TodaOut { phase: p.phase(), n, h: h.to_string(), bits: out.bits, residual: decimal(&r) };
    let table = Table::new(&["n", "h", "residual"]).row(vec![n.to_string(), result.h.clone(), result.residual.clone()]);
    emit(out.format, out.out.as_deref(), &result, &table)
}

#[derive(Serialize)]
struct FitOut {
    phase: Phase,
    nmax: usize,
    prediction: Option<PredictionReport>,
    fits: Vec<FitReport>,
}

fn cmd_fit(args: &PhaseArgs, nmax: usize, window: Option<&str>, out: &OutArgs) -> CmdResult {
    let p = phase_params(args, out.bits)?;
    let ctx = context(out.bits)?;
    let window = window.map(str::parse::<FitWindow>).transpose()?;
    let seq = zn_sequence(&p, nmax, &ctx)?;
    let series: Vec<(usize, Float)> = seq.iter().map(|v| (v.n, v.log_z.clone())).collect();
    let mut fits = vec![fit_free_energy(&series, window)?];
    let prediction = match p.phase() {
        Phase::CriticalAfd => None,
        _ => Some(predict(&p, nmax, &ctx)?),
    };
    if let Some(pred) = &prediction {
        let log_f = Float::with_val(pred.f.prec(), pred.f.ln_ref());
        let log_g = pred.g.as_ref().map(|g| Float::with_val(g.prec(), g.ln_ref()));
        if pred.kappa.is_some() {
            fits.push(fit_kappa(&series, &log_f, log_g.as_ref(), pred.g_exponent, window)?);
        } else {
            let preds = (1..=nmax).map(|n| predict(&p, n, &ctx)).collect::<Result<Vec<_>, _>>()?;
            let without_c: Vec<_> = preds
                .iter()
                .map(|q| match &q.c {
                    Some(c) => q.with_constant(Float::with_val(c.prec(), 1)),
                    None => q.clone(),
                })
                .collect();
            fits.push(fit_constant(&series, &without_c, window)?);
        }
    }
    let reports: Vec<FitReport> = fits.iter().map(FitReport::from).collect();
    let mut table = Table::new(&["target", "window_lo", "window_hi", "extrapolated", "residual_norm"]);
    for r in &reports {
        table = table.row(vec![
            r.target.clone(),
            r.window[0].to_string(),
            r.window[1].to_string(),
            r.extrapolated.clone(),
            r.residual_norm.clone(),
        ]);
    }
    let result = FitOut { phase: p.phase(), nmax, prediction: prediction.as_ref().map(PredictionReport::from), fits: reports };
    emit(out.format, out.out.as_deref(), &result, &table)
}

fn cmd_norms(args: &PhaseArgs, n: usize, out: &OutArgs) -> CmdResult {
    let p = phase_params(args, out.bits)?;
    if n == 0 {
        return Err(Error::Domain("--n must be at least 1".into()).into());
    }
    let ctx = context(out.bits)?.for_hankel(n);
    let m = MomentSequence::weight(&p, 2 * n - 2, &ctx)?;
    let ns = norms_from_moments(&m, n, &ctx)?;
    let report = NormsReport::from(&ns);
    let mut table = Table::new(&["k", "h_k", "R_k"]);
    for (k, h) in report.h.iter().enumerate() {
        let r = if k == 0 { String::new() } else { report.r[k - 1].clone() };
        table = table.row(vec![k.to_string(), h.clone(), r]);
    }
    emit(out.format, out.out.as_deref(), &report, &table)
}

fn run(cli: Cli) -> CmdResult {
    match &cli.command {
        Command::Phase { weights, out } => cmd_phase(weights, out),
        Command::Exact { n, weights, method, out } => cmd_exact(*n, weights, *method, out),
        Command::Compare { phase, nmax, out } => cmd_compare(phase, *nmax, out),
        Command::Toda { phase, n, h, out } => cmd_toda(phase, *n, h, out),
        Command::Fit { phase, nmax, window, out } => cmd_fit(phase, *nmax, window.as_deref(), out),
        Command::Norms { phase, n, out } => cmd_norms(phase, *n, out),
    }
}

/// 0 on success, 2 for parameter-domain and size-guard errors, 3 when more
/// precision is needed, 1 for output failures.
fn exit_code(f: &Failure) -> u8 {
    match f {
        Failure::Lib(e) if e.is_precision() => 3,
        Failure::Lib(_) => 2,
        Failure::Io(_) => 1,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Lib(e) => eprintln!("error: {e}"),
                Failure::Io(msg) => eprintln!("error: {msg}"),
            }
            ExitCode::from(exit_code(&f))
        }
    }
}
