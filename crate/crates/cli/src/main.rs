// `!(x > 0.0)` style guards reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dea_core::autobuild::{build_sector_circuit, verify_sector_circuit};
use dea_core::bestapprox::{self, Domain, ProbeOptions, Quadrature, SampleSet, StateSpace};
use dea_core::dea::{classify_parameters, random_theta, remove_symmetry, FreezePolicy};
use dea_core::sectors::{sector_table, SectorSpec};
use dea_core::shots::{classify_with_noise, steps_csv, NoiseConfig, Shots, DEFAULT_RESAMPLES};
use dea_core::{parse_circuit, Error, ParametricCircuit, TolerancePolicy};

#[derive(Parser)]
#[command(name = "dea", version, about = "Dimensional expressivity analysis of parametric quantum circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify circuit parameters as independent or redundant.
    Analyze(AnalyzeArgs),
    /// Remove symmetry parameters and redundant parameters from a circuit.
    Reduce(ReduceArgs),
    /// Print the translation sector dimensions for Q qubits.
    Sectors(SectorsArgs),
    /// Build and verify the translation-invariant sector circuit for Q qubits.
    Build(BuildArgs),
    /// Estimate the best-approximation error of a circuit.
    Bestapprox(BestApproxArgs),
}

#[derive(Args)]
struct ThetaArgs {
    /// JSON file with parameter values: an array in roster order or an object keyed by name.
    #[arg(long, conflicts_with = "random_theta")]
    theta: Option<PathBuf>,
    /// Draw parameter values uniformly from [0, 2π) (requires --seed).
    #[arg(long)]
    random_theta: bool,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct TolArgs {
    #[arg(long, default_value_t = TolerancePolicy::default().abs)]
    tol_abs: f64,
    #[arg(long, default_value_t = TolerancePolicy::default().rel)]
    tol_rel: f64,
}

impl TolArgs {
    fn policy(&self) -> Result<TolerancePolicy, Failure> {
        for (name, v) in [("--tol-abs", self.tol_abs), ("--tol-rel", self.tol_rel)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Failure::input(format!("{name} must be a finite non-negative number")));
            }
        }
        Ok(TolerancePolicy { abs: self.tol_abs, rel: self.tol_rel })
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    circuit: PathBuf,
    #[command(flatten)]
    theta: ThetaArgs,
    /// Shot count per matrix entry, or `exact`.
    #[arg(long, default_value = "exact")]
    shots: String,
    /// Bootstrap replicas for eigenvalue error bars.
    #[arg(long, default_value_t = DEFAULT_RESAMPLES)]
    resamples: usize,
    /// A candidate is independent when λ_min exceeds this many standard deviations.
    #[arg(long, default_value_t = 3.0)]
    z_threshold: f64,
    #[arg(long)]
    cap: Option<usize>,
    #[command(flatten)]
    tol: TolArgs,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Write per-step eigenvalues as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FreezeArg {
    Current,
    Zero,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(long)]
    circuit: PathBuf,
    #[command(flatten)]
    theta: ThetaArgs,
    /// Symmetry parameter values that recover the original circuit.
    #[arg(long, value_delimiter = ',')]
    phi0: Option<Vec<f64>>,
    /// Value given to redundant parameters.
    #[arg(long, value_enum, default_value_t = FreezeArg::Current)]
    freeze: FreezeArg,
    #[command(flatten)]
    tol: TolArgs,
    /// Write the reduced circuit here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Write the classification report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct SectorsArgs {
    #[arg(long)]
    qubits: usize,
    /// Emit JSON instead of a text table.
    #[arg(long)]
    json: bool,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    qubits: usize,
    /// Random parameter points checked in addition to θ = 0.
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Skip DEA verification (for circuits too large to simulate).
    #[arg(long)]
    no_verify: bool,
    /// Write the circuit here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Write the verification report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct BestApproxArgs {
    #[arg(long)]
    circuit: PathBuf,
    /// Tensor grid with this many cells per parameter (comma separated).
    #[arg(long, value_delimiter = ',', conflicts_with = "sobol")]
    grid: Option<Vec<usize>>,
    /// Number of Sobol' samples.
    #[arg(long)]
    sobol: Option<usize>,
    /// Scrambling seed for Sobol' samples and probe directions.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 0.0)]
    domain_lower: f64,
    #[arg(long, default_value_t = std::f64::consts::TAU)]
    domain_width: f64,
    /// State space: `span`, `full`, or `sector:<p>`.
    #[arg(long, default_value = "full")]
    space: String,
    #[arg(long, default_value_t = ProbeOptions::default().probes)]
    probes: usize,
    /// Parameter-space dispersion bound of a non-grid sample set.
    #[arg(long)]
    dispersion: Option<f64>,
    /// Also integrate the volume of the image and evaluate the covering lower bound.
    #[arg(long)]
    volume: bool,
    /// Quadrature nodes (per dimension for the trapezoid rule, total for Sobol').
    #[arg(long)]
    quad_nodes: Option<usize>,
    #[command(flatten)]
    tol: TolArgs,
    #[arg(long)]
    report: Option<PathBuf>,
}

struct Failure {
    input: bool,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self { input: true, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self { input: e.is_input_error(), message: e.to_string() }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::input(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn load_circuit(path: &Path) -> Result<ParametricCircuit, Failure> {
    Ok(parse_circuit(&read(path)?)?)
}

/// Values for `names` from `--theta` or `--random-theta`.
fn load_theta(args: &ThetaArgs, names: &[String]) -> Result<Vec<f64>, Failure> {
    match (&args.theta, args.random_theta) {
        (Some(path), _) => {
            let text = read(path)?;
            let value: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| Failure::input(format!("theta file: {e}")))?;
            let theta = match value {
                serde_json::Value::Array(items) => items
                    .iter()
                    .map(|v| v.as_f64().ok_or_else(|| Failure::input("theta file: array entries must be numbers")))
                    .collect::<Result<Vec<f64>, _>>()?,
                serde_json::Value::Object(map) => {
                    if let Some(extra) = map.keys().find(|k| !names.contains(k)) {
                        return Err(Failure::input(format!("theta file: unknown parameter `{extra}`")));
                    }
                    names
                        .iter()
                        .map(|n| {
                            map.get(n)
                                .and_then(|v| v.as_f64())
                                .ok_or_else(|| Failure::input(format!("theta file: missing value for `{n}`")))
                        })
                        .collect::<Result<Vec<f64>, _>>()?
                }
                _ => return Err(Failure::input("theta file must hold an array or an object")),
            };
            if theta.len() != names.len() {
                return Err(Error::RosterMismatch { expected: names.len(), got: theta.len() }.into());
            }
            Ok(theta)
        }
        (None, true) => {
            let seed = args.seed.ok_or_else(|| Failure::input("--random-theta requires --seed"))?;
            Ok(random_theta(names.len(), seed))
        }
        (None, false) => Err(Failure::input("give parameter values with --theta <file> or --random-theta --seed <n>")),
    }
}

fn parse_shots(s: &str) -> Result<Shots, Failure> {
    if s == "exact" {
        return Ok(Shots::Exact);
    }
    match s.parse::<u64>() {
        Ok(0) => Err(Error::ZeroShots.into()),
        Ok(n) => Ok(Shots::Count(n)),
        Err(_) => Err(Failure::input(format!("--shots expects a positive integer or `exact`, got `{s}`"))),
    }
}

fn analyze(a: AnalyzeArgs) -> Result<(), Failure> {
    let c = load_circuit(&a.circuit)?;
    let theta = load_theta(&a.theta, c.roster())?;
    let tol = a.tol.policy()?;
    let shots = parse_shots(&a.shots)?;
    let report = match shots {
        Shots::Exact => {
            let mut r = classify_parameters(&c, &theta, tol, a.cap)?;
            r.seed = a.theta.seed.filter(|_| a.theta.random_theta);
            r
        }
        Shots::Count(_) => {
            let seed = a.theta.seed.ok_or_else(|| Failure::input("--shots requires --seed"))?;
            if !(a.z_threshold >= 0.0) {
                return Err(Failure::input("--z-threshold must be non-negative"));
            }
            let noise = NoiseConfig { shots, seed, z_threshold: a.z_threshold, resamples: a.resamples };
            classify_with_noise(&c, &theta, noise, tol, a.cap)?
        }
    };
    if let Some(csv) = &a.csv {
        write_or_print(Some(csv), &steps_csv(&report))?;
    }
    write_or_print(a.report.as_deref(), &with_newline(report.to_json()))
}

fn reduce(a: ReduceArgs) -> Result<(), Failure> {
    let c = load_circuit(&a.circuit)?;
    let n_sym = c.symmetry_params().len();
    if n_sym == 0 {
        return Err(Error::MissingSymmetry.into());
    }
    let rest: Vec<String> = c.roster()[n_sym..].to_vec();
    let theta = load_theta(&a.theta, &rest)?;
    let phi0 = a.phi0.clone().unwrap_or_else(|| vec![0.0; n_sym]);
    let freeze = match a.freeze {
        FreezeArg::Current => FreezePolicy::CurrentValue,
        FreezeArg::Zero => FreezePolicy::Zero,
    };
    let (reduced, report) = remove_symmetry(&c, &phi0, &theta, a.tol.policy()?, freeze)?;
    if let Some(r) = &a.report {
        write_or_print(Some(r), &with_newline(report.to_json()))?;
    }
    write_or_print(a.output.as_deref(), &with_newline(reduced.to_json()))
}

fn sectors(a: SectorsArgs) -> Result<(), Failure> {
    let table = sector_table(a.qubits)?;
    let text = if a.json { with_newline(table.to_json()) } else { table.to_text() };
    write_or_print(a.report.as_deref(), &text)
}

fn build(a: BuildArgs) -> Result<(), Failure> {
    let c = build_sector_circuit(a.qubits)?;
    if !a.no_verify {
        let v = verify_sector_circuit(&c, a.trials, a.seed)?;
        let text = with_newline(v.to_json());
        match &a.report {
            Some(p) => write_or_print(Some(p), &text)?,
            None => eprint!("{text}"),
        }
        if !v.passed {
            write_or_print(a.output.as_deref(), &with_newline(c.to_json()))?;
            return Err(Failure { input: false, message: "sector circuit verification failed".into() });
        }
    }
    write_or_print(a.output.as_deref(), &with_newline(c.to_json()))
}

fn parse_space(s: &str, qubits: usize) -> Result<StateSpace, Failure> {
    match s {
        "span" => Ok(StateSpace::SampleSpan),
        "full" => Ok(StateSpace::Full),
        _ => {
            let p = s
                .strip_prefix("sector:")
                .and_then(|p| p.parse::<usize>().ok())
                .ok_or_else(|| Failure::input(format!("--space expects span, full or sector:<p>, got `{s}`")))?;
            Ok(StateSpace::Sector(SectorSpec::new(qubits, p)?))
        }
    }
}

fn bestapprox_cmd(a: BestApproxArgs) -> Result<(), Failure> {
    let c = load_circuit(&a.circuit)?;
    let domain = Domain::new(a.domain_lower, a.domain_width)?;
    let set = match (&a.grid, a.sobol) {
        (Some(g), _) => SampleSet::grid(&c, g, domain)?,
        (None, Some(n)) => SampleSet::sobol(&c, n, a.seed, domain)?,
        (None, None) => return Err(Failure::input("give a sample set with --grid or --sobol")),
    };
    let space = parse_space(&a.space, c.qubits())?;
    let opts = ProbeOptions { probes: a.probes, seed: a.seed.unwrap_or(0), ..ProbeOptions::default() };
    if let Some(d) = a.dispersion {
        if !(d >= 0.0) || !d.is_finite() {
            return Err(Failure::input("--dispersion must be a finite non-negative number"));
        }
    }
    let mut est = bestapprox::estimate(&c, &set, space, &opts, a.dispersion)?;
    if a.volume {
        let m = c.num_params();
        let quad = match (a.quad_nodes, Quadrature::default_for(m)) {
            (Some(n), Quadrature::Trapezoid { .. }) => Quadrature::Trapezoid { nodes_per_dim: n },
            (Some(n), Quadrature::Sobol { seed, .. }) => Quadrature::Sobol { nodes: n, seed },
            (None, q) => q,
        };
        let vol = bestapprox::volume(&c, domain, quad, a.tol.policy()?)?;
        let bound = bestapprox::lower_bound(m, vol.volume)?;
        est = est.with_lower_bound(vol.volume, bound);
    }
    write_or_print(a.report.as_deref(), &with_newline(est.to_json()))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Reduce(a) => reduce(a),
        Command::Sectors(a) => sectors(a),
        Command::Build(a) => build(a),
        Command::Bestapprox(a) => bestapprox_cmd(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("error: input: {}", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) if f.input => {
            eprintln!("error: input: {}", f.message);
            ExitCode::from(2)
        }
        Err(f) => {
            eprintln!("error: numerical: {}", f.message);
            ExitCode::from(3)
        }
    }
}
