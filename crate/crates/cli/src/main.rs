mod config;
mod matrix_file;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use alpha_compound::{
    alpha_add_compound, alpha_measure, alpha_mult_compound_detailed, certify_alpha_contraction,
    douady_oesterle_check, eigenvalues, integrate, laplacian_system, lti_system, measure_chain,
    minimal_alpha, path3_laplacian, reached_equilibrium, terminal_residual, thomas_closed_loop,
    thomas_system, AlphaIndex, Domain, FnSystem, IntegratorConfig, Matrix, MeasureNorm,
    SampleSet, System, Verdict, C64,
};
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

const SUBCOMMANDS: [&str; 6] = ["compound", "measure", "certify", "alpha-star", "hausdorff", "simulate"];

#[derive(Parser)]
#[command(
    name = "alphac",
    version,
    about = "Compound matrices, matrix measures and alpha-contraction checks",
    after_help = "Any long option can also come from --config FILE, a JSON object keyed by option \
                  name (e.g. {\"alpha\": 2.5, \"x0\": [-1, 1, 1]}); the command line wins on conflicts.\n\
                  Set RAYON_NUM_THREADS to bound the worker pool."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Form a multiplicative or additive compound of integer or real order.
    #[command(args_override_self = true)]
    Compound(CompoundArgs),
    /// μ_p of the α additive compound, plus the integer chain μ_p(A^[k]).
    #[command(args_override_self = true)]
    Measure(MeasureArgs),
    /// Sampled α-contraction certificate for a builtin system.
    #[command(args_override_self = true)]
    Certify(CertifyArgs),
    /// Bisection for the least certified α.
    #[command(name = "alpha-star", args_override_self = true)]
    AlphaStar(AlphaStarArgs),
    /// Douady-Oesterlé test on sampled Jacobians of a map.
    #[command(args_override_self = true)]
    Hausdorff(HausdorffArgs),
    /// Integrate a builtin system and write the trajectory as CSV.
    #[command(args_override_self = true)]
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Mult,
    Add,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum SystemName {
    Thomas,
    ThomasCl,
    LaplacianPath3,
    Lti,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodName {
    Dopri5,
    Rk4,
}

fn parse_norm(s: &str) -> std::result::Result<MeasureNorm, String> {
    s.parse().map_err(|e: alpha_compound::Error| e.to_string())
}

fn parse_alpha(s: &str) -> std::result::Result<AlphaIndex, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    AlphaIndex::new(v).map_err(|e| e.to_string())
}

#[derive(Args)]
struct CompoundArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Order k (integer) or α = k + s.
    #[arg(long, value_parser = parse_alpha)]
    order: AlphaIndex,
    /// Matrix file (JSON).
    #[arg(long)]
    input: PathBuf,
    /// Where to write the compound; without it the matrix is printed.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct MeasureArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_parser = parse_norm, default_value = "2")]
    p: MeasureNorm,
    #[arg(long, value_parser = parse_alpha)]
    alpha: AlphaIndex,
}

#[derive(Args)]
struct SystemArgs {
    #[arg(long, value_enum)]
    system: SystemName,
    /// Dissipation of the Thomas systems.
    #[arg(long, default_value_t = 0.3)]
    b: f64,
    /// Feedback gain of thomas-cl; defaults to 2b - 1.1.
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    /// System matrix for `lti`.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Constant metric Θ; measures are then taken of Θ J Θ⁻¹.
    #[arg(long)]
    weight: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    /// Grid points per axis.
    #[arg(long, default_value_t = 9)]
    grid: usize,
    /// Half-width of the sampled cube for systems without a built-in domain.
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Sample times are spread evenly over [0, horizon].
    #[arg(long, default_value_t = 0.0)]
    horizon: f64,
    #[arg(long, default_value_t = 1)]
    time_samples: usize,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    sys: SystemArgs,
    #[arg(long, value_parser = parse_alpha)]
    alpha: AlphaIndex,
    #[arg(long, value_parser = parse_norm, default_value = "1")]
    p: MeasureNorm,
    #[command(flatten)]
    samples: SampleArgs,
}

#[derive(Args)]
struct AlphaStarArgs {
    #[command(flatten)]
    sys: SystemArgs,
    #[arg(long, value_parser = parse_norm, default_value = "1")]
    p: MeasureNorm,
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    #[command(flatten)]
    samples: SampleArgs,
}

#[derive(Args)]
struct HausdorffArgs {
    /// One Jacobian or a JSON array of them.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_parser = parse_alpha)]
    alpha: AlphaIndex,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    sys: SystemArgs,
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    x0: Vec<f64>,
    /// Final time.
    #[arg(long)]
    t: f64,
    #[arg(long, value_enum, default_value = "dopri5")]
    method: MethodName,
    /// Fixed step for rk4.
    #[arg(long, default_value_t = 1e-2)]
    step: f64,
    #[arg(long, default_value_t = 1e-9)]
    abs_tol: f64,
    #[arg(long, default_value_t = 1e-9)]
    rel_tol: f64,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn build_system(args: &SystemArgs) -> Result<FnSystem> {
    let sys = match args.system {
        SystemName::Thomas => thomas_system(args.b)?,
        SystemName::ThomasCl => thomas_closed_loop(args.b, args.c.unwrap_or(2.0 * args.b - 1.1))?,
        SystemName::LaplacianPath3 => laplacian_system(&path3_laplacian())?,
        SystemName::Lti => {
            let Some(path) = &args.matrix else {
                bail!("--system lti needs --matrix FILE");
            };
            lti_system(&matrix_file::read(path)?)?
        }
    };
    let Some(path) = &args.weight else {
        return Ok(sys);
    };
    let theta = matrix_file::read(path)?;
    let n = sys.dim();
    if theta.shape() != (n, n) {
        bail!("weight is {}x{}, system has dimension {n}", theta.rows(), theta.cols());
    }
    if theta.inverse().is_err() {
        bail!("weight matrix is singular");
    }
    Ok(sys
        .with_scaling(move |_: &[f64]| theta.clone())
        .with_scaling_rate(move |_, _| Matrix::zeros(n, n)))
}

fn samples_for(sys: &FnSystem, args: &SampleArgs) -> Result<(SampleSet, Vec<f64>)> {
    let samples = match sys.domain() {
        Some(d) => d.grid(args.grid)?,
        None => Domain::cube(sys.dim(), args.radius)?.grid(args.grid)?,
    };
    if args.time_samples == 0 {
        bail!("--time-samples must be at least 1");
    }
    if !(args.horizon >= 0.0 && args.horizon.is_finite()) {
        bail!("--horizon must be a finite non-negative time");
    }
    let times = if args.time_samples == 1 {
        vec![0.0]
    } else {
        let m = (args.time_samples - 1) as f64;
        (0..args.time_samples).map(|i| args.horizon * i as f64 / m).collect()
    };
    Ok((samples, times))
}

/// Eigenvalues ordered by decreasing real part, then decreasing imaginary part.
fn sorted_spectrum(m: &Matrix) -> Result<Vec<[f64; 2]>> {
    let mut ev: Vec<C64> = eigenvalues(m)?;
    ev.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    Ok(ev.iter().map(|z| [z.re, z.im]).collect())
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Serialize)]
struct CompoundReport {
    kind: &'static str,
    order: f64,
    rows: usize,
    cols: usize,
    perturbed: bool,
    spectrum: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    matrix: Option<serde_json::Value>,
}

fn cmd_compound(args: CompoundArgs) -> Result<ExitCode> {
    let a = matrix_file::read(&args.input)?;
    let (m, perturbed) = match args.kind {
        Kind::Add => (alpha_add_compound(&a, args.order)?, false),
        Kind::Mult => {
            let r = alpha_mult_compound_detailed(&a, args.order)?;
            (r.matrix, r.perturbed)
        }
    };
    if perturbed {
        eprintln!("warning: A was nearly defective; its powers came from a perturbed copy");
    }
    let spectrum = sorted_spectrum(&m)?;
    let matrix = match &args.output {
        Some(path) => {
            matrix_file::write(path, &m)?;
            None
        }
        None => Some(serde_json::from_str(&matrix_file::to_json(&m))?),
    };
    print_json(&CompoundReport {
        kind: match args.kind {
            Kind::Add => "add",
            Kind::Mult => "mult",
        },
        order: args.order.alpha(),
        rows: m.rows(),
        cols: m.cols(),
        perturbed,
        spectrum,
        output: args.output.map(|p| p.display().to_string()),
        matrix,
    })?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct MeasureReport {
    p: String,
    alpha: f64,
    measure: f64,
    chain: Vec<f64>,
}

fn cmd_measure(args: MeasureArgs) -> Result<ExitCode> {
    let a = matrix_file::read(&args.input)?;
    let measure = alpha_measure(&a, args.alpha, args.p)?;
    let chain = measure_chain(&a, args.p)?;
    print_json(&MeasureReport { p: args.p.to_string(), alpha: args.alpha.alpha(), measure, chain })?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct Worst {
    t: f64,
    x: Vec<f64>,
    value: f64,
}

#[derive(Serialize)]
struct CertificateReport {
    system: String,
    alpha: f64,
    p: String,
    verdict: &'static str,
    eta: f64,
    max_measure: f64,
    sample_count: usize,
    time_count: usize,
    spacing: Option<Vec<f64>>,
    scaled: bool,
    worst: Worst,
    /// Closed-form μ1 bound for the Thomas family at 2 <= α < 3.
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form_bound: Option<f64>,
}

fn thomas_bound(args: &SystemArgs, alpha: AlphaIndex, p: MeasureNorm) -> Option<f64> {
    if p != MeasureNorm::One || alpha.k() != 2 {
        return None;
    }
    let (b, s) = (args.b, alpha.s());
    let base = 1.0 - 2.0 * b - s * (b + 1.0);
    match args.system {
        SystemName::Thomas => Some(base),
        SystemName::ThomasCl => Some(base + (1.0 + s) * args.c.unwrap_or(2.0 * b - 1.1)),
        _ => None,
    }
}

fn verdict_exit(v: Verdict) -> ExitCode {
    match v {
        Verdict::Certified => ExitCode::SUCCESS,
        Verdict::Refuted => ExitCode::from(2),
        Verdict::Inconclusive => ExitCode::from(3),
    }
}

fn cmd_certify(args: CertifyArgs) -> Result<ExitCode> {
    let sys = build_system(&args.sys)?;
    let (samples, times) = samples_for(&sys, &args.samples)?;
    let cert = certify_alpha_contraction(&sys, args.alpha, args.p, &samples, &times)?;
    print_json(&CertificateReport {
        system: sys.name().to_string(),
        alpha: args.alpha.alpha(),
        p: args.p.to_string(),
        verdict: cert.verdict.as_str(),
        eta: cert.eta,
        max_measure: cert.max_measure(),
        sample_count: cert.sample_count,
        time_count: cert.time_count,
        spacing: cert.spacing.clone(),
        scaled: cert.scaled,
        worst: Worst { t: cert.worst.t, x: cert.worst.x.clone(), value: cert.worst.value },
        closed_form_bound: thomas_bound(&args.sys, args.alpha, args.p),
    })?;
    Ok(verdict_exit(cert.verdict))
}

#[derive(Serialize)]
struct Probe {
    alpha: f64,
    max_measure: f64,
    verdict: &'static str,
}

#[derive(Serialize)]
struct AlphaStarReport {
    system: String,
    p: String,
    alpha_star: f64,
    tol: f64,
    sample_count: usize,
    trace: Vec<Probe>,
}

fn cmd_alpha_star(args: AlphaStarArgs) -> Result<ExitCode> {
    let sys = build_system(&args.sys)?;
    let (samples, times) = samples_for(&sys, &args.samples)?;
    let search = minimal_alpha(&sys, args.p, &samples, &times, args.tol)?;
    print_json(&AlphaStarReport {
        system: sys.name().to_string(),
        p: args.p.to_string(),
        alpha_star: search.alpha_star,
        tol: search.tol,
        sample_count: samples.len(),
        trace: search
            .trace
            .iter()
            .map(|pr| Probe { alpha: pr.alpha, max_measure: pr.max_measure, verdict: pr.verdict.as_str() })
            .collect(),
    })?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct HausdorffReport {
    alpha: f64,
    omega_max: f64,
    conclusive: bool,
    sample_count: usize,
    worst_index: usize,
}

fn cmd_hausdorff(args: HausdorffArgs) -> Result<ExitCode> {
    let js = matrix_file::read_many(&args.input)?;
    let bound = douady_oesterle_check(&js, args.alpha)?;
    print_json(&HausdorffReport {
        alpha: bound.alpha.alpha(),
        omega_max: bound.omega_max,
        conclusive: bound.conclusive,
        sample_count: bound.sample_count,
        worst_index: bound.worst_index,
    })?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct SimulationReport {
    system: String,
    output: String,
    points: usize,
    final_time: f64,
    final_state: Vec<f64>,
    terminal_residual: f64,
    reached_equilibrium: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    stayed_in_domain: Option<bool>,
}

fn cmd_simulate(args: SimulateArgs) -> Result<ExitCode> {
    let sys = build_system(&args.sys)?;
    if args.x0.len() != sys.dim() {
        bail!("--x0 has {} components, system {} has dimension {}", args.x0.len(), sys.name(), sys.dim());
    }
    let cfg = match args.method {
        MethodName::Dopri5 => IntegratorConfig::dopri5(args.abs_tol, args.rel_tol),
        MethodName::Rk4 => IntegratorConfig::rk4(args.step),
    };
    let traj = match integrate(&sys, &args.x0, (0.0, args.t), &cfg) {
        Ok(t) => t,
        Err(fail) => {
            if !fail.partial.is_empty() {
                eprintln!("integration stopped at t = {}", fail.partial.final_time().unwrap_or(0.0));
            }
            bail!("{}", fail.message);
        }
    };
    let Some(path) = args.output else {
        let out = io::stdout().lock();
        traj.write_csv(BufWriter::new(out))?;
        return Ok(ExitCode::SUCCESS);
    };
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    traj.write_csv(BufWriter::new(file)).with_context(|| format!("writing {}", path.display()))?;
    print_json(&SimulationReport {
        system: sys.name().to_string(),
        output: path.display().to_string(),
        points: traj.len(),
        final_time: traj.final_time().unwrap_or(0.0),
        final_state: traj.final_state().map(<[f64]>::to_vec).unwrap_or_default(),
        terminal_residual: terminal_residual(&sys, &traj)?,
        reached_equilibrium: reached_equilibrium(&sys, &traj)?,
        stayed_in_domain: sys.domain().map(|d| traj.states.iter().all(|x| d.contains(x))),
    })?;
    Ok(ExitCode::SUCCESS)
}

fn run() -> Result<ExitCode> {
    let argv = config::expand(std::env::args_os().collect(), &SUBCOMMANDS)?;
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { ExitCode::FAILURE } else { ExitCode::SUCCESS };
            e.print()?;
            return Ok(code);
        }
    };
    match cli.cmd {
        Cmd::Compound(a) => cmd_compound(a),
        Cmd::Measure(a) => cmd_measure(a),
        Cmd::Certify(a) => cmd_certify(a),
        Cmd::AlphaStar(a) => cmd_alpha_star(a),
        Cmd::Hausdorff(a) => cmd_hausdorff(a),
        Cmd::Simulate(a) => cmd_simulate(a),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
