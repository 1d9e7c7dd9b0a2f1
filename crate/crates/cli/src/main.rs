//! Command-line front end: compile, verify, trotter-error, resources, correlate.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use hubbard_qsim::gate_compiler::resources::{count_resources, render_table, ResourceReport, REFERENCE_VALUES};
use hubbard_qsim::gate_compiler::{compile_term, term_distance, units, units_commute, Strategy, Term};
use hubbard_qsim::greens_function::{
    correlation_csv, greens_csv, linspace, run_pipeline, spectral_peaks, Component, Evolution, PipelineConfig,
};
use hubbard_qsim::trotter::{fit_power_law, logspace, sweep, to_csv, EvolutionMode, Nesting, Scheme, SweepConfig};
use hubbard_qsim::{Circuit, ClusterSpec, Error, Geometry};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_INVALID_INPUT: u8 = 2;

#[derive(Parser)]
#[command(name = "hubbard-qsim", version, about = "Compile and verify Fermi-Hubbard cluster circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile one or all terms to a probe-controlled circuit.
    Compile(CompileArgs),
    /// Compare compiled terms with their exact controlled exponentials.
    Verify(VerifyArgs),
    /// Split-evolution error against the exact propagator over a step sweep.
    TrotterError(TrotterArgs),
    /// Qubit, correlator and gate counts per geometry.
    Resources(ResourcesArgs),
    /// Correlation functions, Nambu components and the retarded Green's function.
    Correlate(CorrelateArgs),
}

/// Cluster geometry and couplings. Couplings default to `t = 1` and zero
/// for everything else; `--stress` starts from `U = 8` with every
/// variational field at 3. Explicit flags override either.
#[derive(Args, Clone)]
struct ClusterArgs {
    /// `1d:N`, `AxB` or `AxBxC`.
    #[arg(long)]
    cluster: Option<String>,
    /// JSON cluster spec; replaces --cluster and the preset.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    stress: bool,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long = "U")]
    u: Option<f64>,
    #[arg(long = "mu-p")]
    mu_p: Option<f64>,
    #[arg(long = "M-p")]
    m_p: Option<f64>,
    #[arg(long = "delta-s")]
    delta_s: Option<f64>,
    #[arg(long = "delta-d")]
    delta_d: Option<f64>,
    /// Reserved; the exact pipeline is deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

impl ClusterArgs {
    fn build(&self) -> Result<ClusterSpec, Error> {
        let mut spec = match (&self.spec, &self.cluster) {
            (Some(path), _) => ClusterSpec::from_json(&read(path)?)?,
            (None, Some(text)) => {
                let geometry: Geometry = text.parse()?;
                if self.stress {
                    ClusterSpec::stress(geometry)
                } else {
                    ClusterSpec::new(geometry)
                }
            }
            (None, None) => return Err(Error::InvalidParameter("one of --cluster or --spec is required".into())),
        };
        let fields = [
            (&mut spec.t, self.t),
            (&mut spec.u, self.u),
            (&mut spec.mu_p, self.mu_p),
            (&mut spec.m_p, self.m_p),
            (&mut spec.delta_s, self.delta_s),
            (&mut spec.delta_d, self.delta_d),
        ];
        for (slot, value) in fields {
            if let Some(v) = value {
                *slot = v;
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Table,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Templates,
    Exact,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Templates => Strategy::Templates,
            StrategyArg::Exact => Strategy::Exact,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Ts2,
    Ruth,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Ts2 => Scheme::Ts2,
            SchemeArg::Ruth => Scheme::Ruth,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Compiled,
}

impl From<ModeArg> for EvolutionMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => EvolutionMode::Exact,
            ModeArg::Compiled => EvolutionMode::Compiled,
        }
    }
}

#[derive(Args)]
struct CompileArgs {
    #[command(flatten)]
    cluster: ClusterArgs,
    /// local, interaction, hopping, spair, dpair or all.
    #[arg(long, default_value = "all")]
    term: String,
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    /// Templates give the resource-counted circuits; exact adds Givens
    /// networks where template pieces do not commute.
    #[arg(long, value_enum, default_value = "templates")]
    strategy: StrategyArg,
    /// Circuit JSON output; a single term writes one circuit, `all` a list.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    cluster: ClusterArgs,
    /// Term to check, or all.
    #[arg(long, default_value = "all")]
    term: String,
    /// Steps to check; repeatable.
    #[arg(long = "dt", default_values_t = [0.01, 0.05, 0.2])]
    dts: Vec<f64>,
    #[arg(long, value_enum, default_value = "exact")]
    strategy: StrategyArg,
    /// Check a circuit file instead of compiling; its label names the term.
    #[arg(long)]
    circuit: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Args)]
struct TrotterArgs {
    #[command(flatten)]
    cluster: ClusterArgs,
    #[arg(long, default_value_t = 3.0)]
    tau: f64,
    /// `lo:hi:points`, log-spaced.
    #[arg(long = "dt-sweep", default_value = "3e-3:3e-1:12")]
    dt_sweep: String,
    /// Scheme to run; repeatable, both by default.
    #[arg(long, value_enum)]
    scheme: Vec<SchemeArg>,
    /// Nesting of the three-block formula, e.g. `z,s,kd`.
    #[arg(long, default_value = "z,s,kd")]
    nesting: String,
    #[arg(long, value_enum, default_value = "exact")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Omit the timestamp line.
    #[arg(long)]
    no_header: bool,
    /// Report zero wall time so output is reproducible.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct ResourcesArgs {
    /// Geometry; repeatable. Defaults to every geometry with published values.
    #[arg(long)]
    cluster: Vec<String>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CorrelateArgs {
    #[command(flatten)]
    cluster: ClusterArgs,
    #[arg(long, default_value_t = 2.0)]
    beta: f64,
    #[arg(long, default_value_t = 0.05)]
    eta: f64,
    /// Length of the sampled window.
    #[arg(long, default_value_t = 50.0)]
    tau: f64,
    #[arg(long = "tau-step", default_value_t = 0.05)]
    tau_step: f64,
    #[arg(long = "omega-max", default_value_t = 8.0)]
    omega_max: f64,
    #[arg(long = "omega-points", default_value_t = 801)]
    omega_points: usize,
    /// Split evolution instead of the exact propagator.
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    /// Split step; required with --scheme.
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, value_enum, default_value = "exact")]
    mode: ModeArg,
    /// Output directory for correlation.csv and greens.csv.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Omit the timestamp line.
    #[arg(long)]
    no_header: bool,
}

/// Failure of a command: bad input or a failed check.
enum Failure {
    Invalid(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::InvalidParameter(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn stamp(command: &str) -> String {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    format!("# hubbard-qsim {command} generated at unix time {secs}\n")
}

fn terms_for(spec: &ClusterSpec, name: &str) -> Result<Vec<Term>, Error> {
    if name == "all" {
        return Ok(Term::present(spec));
    }
    let term: Term = name.parse()?;
    if !Term::present(spec).contains(&term) {
        return Err(Error::Unsupported(format!("{term} is not defined for {}", spec.geometry)));
    }
    Ok(vec![term])
}

fn is_exact(spec: &ClusterSpec, term: Term, strategy: Strategy) -> Result<bool, Error> {
    Ok(match term {
        Term::Local | Term::Interaction => true,
        _ => strategy == Strategy::Exact || units_commute(&units(spec, term)?)?,
    })
}

fn cmd_compile(args: &CompileArgs) -> Outcome {
    let spec = args.cluster.build()?;
    let strategy = Strategy::from(args.strategy);
    let terms = terms_for(&spec, &args.term)?;
    let mut circuits = Vec::new();
    for &term in &terms {
        let circ = compile_term(&spec, term, args.dt, strategy)?;
        let n = circ.counts();
        let note = if is_exact(&spec, term, strategy)? { "exact" } else { "approximate: pieces do not commute" };
        println!("{:<12} gates {:>6}  c-sqg {:>6}  c-iswap {:>6}  {note}", term.name(), n.total, n.c_sqg, n.c_iswap());
        circuits.push(circ);
    }
    if let Some(path) = &args.out {
        let text = if circuits.len() == 1 {
            circuits[0].to_json()
        } else {
            let docs: Vec<serde_json::Value> =
                circuits.iter().map(|c| serde_json::from_str(&c.to_json())).collect::<Result<_, _>>().map_err(Error::from)?;
            serde_json::to_string_pretty(&docs).map_err(Error::from)?
        };
        write_output(Some(path), &text)?;
    }
    Ok(())
}

struct VerifyRow {
    term: String,
    dt: f64,
    distance: f64,
    gates: usize,
    violations: usize,
    pass: bool,
}

fn check_circuit(spec: &ClusterSpec, term: Term, circ: &Circuit, tol: f64) -> Result<VerifyRow, Error> {
    let distance = term_distance(spec, term, circ)?;
    let violations = circ.validate_gate_set().len();
    Ok(VerifyRow {
        term: term.name().to_string(),
        dt: circ.dt,
        distance,
        gates: circ.len(),
        violations,
        pass: distance <= tol && violations == 0,
    })
}

fn cmd_verify(args: &VerifyArgs) -> Outcome {
    let spec = args.cluster.build()?;
    let mut rows = Vec::new();
    if let Some(path) = &args.circuit {
        let circ = Circuit::from_json(&read(path)?)?;
        let term: Term = circ.label.parse()?;
        rows.push(check_circuit(&spec, term, &circ, args.tol)?);
    } else {
        for term in terms_for(&spec, &args.term)? {
            for &dt in &args.dts {
                let circ = compile_term(&spec, term, dt, args.strategy.into())?;
                rows.push(check_circuit(&spec, term, &circ, args.tol)?);
            }
        }
    }
    let text = match args.format {
        Format::Json => {
            let docs: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "term": r.term, "dt": r.dt, "distance": r.distance,
                        "gates": r.gates, "violations": r.violations, "pass": r.pass,
                    })
                })
                .collect();
            serde_json::to_string_pretty(&docs).map_err(Error::from)? + "\n"
        }
        Format::Csv => {
            let mut s = String::from("term,dt,distance,gates,violations,status\n");
            for r in &rows {
                let status = if r.pass { "pass" } else { "fail" };
                s.push_str(&format!("{},{},{:.3e},{},{},{status}\n", r.term, r.dt, r.distance, r.gates, r.violations));
            }
            s
        }
        Format::Table => {
            let mut s = format!("{:<12} {:>8} {:>12} {:>7} {:>10}  status\n", "term", "dt", "distance", "gates", "violations");
            for r in &rows {
                let status = if r.pass { "pass" } else { "FAIL" };
                s.push_str(&format!("{:<12} {:>8} {:>12.3e} {:>7} {:>10}  {status}\n", r.term, r.dt, r.distance, r.gates, r.violations));
            }
            s
        }
    };
    print!("{text}");
    let failed: Vec<String> = rows.iter().filter(|r| !r.pass).map(|r| format!("{} (dt {})", r.term, r.dt)).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(format!("verification failed for {}", failed.join(", "))))
    }
}

fn parse_sweep(text: &str) -> Result<Vec<f64>, Error> {
    let bad = || Error::Parse(format!("--dt-sweep expects lo:hi:points, got `{text}`"));
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else { return Err(bad()) };
    let lo: f64 = lo.parse().map_err(|_| bad())?;
    let hi: f64 = hi.parse().map_err(|_| bad())?;
    let n: usize = n.parse().map_err(|_| bad())?;
    logspace(lo, hi, n)
}

fn cmd_trotter_error(args: &TrotterArgs) -> Outcome {
    let spec = args.cluster.build()?;
    let mut dtaus = parse_sweep(&args.dt_sweep)?;
    dtaus.sort_by(|a, b| b.total_cmp(a));
    let mut config = SweepConfig::new(args.tau, dtaus);
    if !args.scheme.is_empty() {
        config.schemes = args.scheme.iter().map(|&s| s.into()).collect();
    }
    config.nesting = args.nesting.parse::<Nesting>()?;
    config.mode = args.mode.into();
    config.timing = !args.no_timing;
    let points = sweep(&spec, &config)?;
    let mut text = String::new();
    match args.format {
        Format::Json => text.push_str(&(serde_json::to_string_pretty(&points).map_err(Error::from)? + "\n")),
        Format::Csv | Format::Table => {
            if !args.no_header {
                text.push_str(&stamp("trotter-error"));
            }
            text.push_str(&to_csv(&points, true));
        }
    }
    write_output(args.out.as_deref(), &text)?;
    for scheme in &config.schemes {
        let own: Vec<_> = points.iter().filter(|p| p.scheme == *scheme).cloned().collect();
        if let Some((slope, r2)) = fit_power_law(&own) {
            eprintln!("{scheme}: log-log slope {slope:.3}, R² {r2:.5}");
        }
    }
    Ok(())
}

fn resources_csv(reports: &[ResourceReport]) -> String {
    let mut s = String::from(
        "geometry,orbitals,hilbert_dim_log2,qubits,correlators,tune_c_sqg,tune_c_iswap,hopping_gates,hopping_gates_formula,reference_hopping_gates,flag\n",
    );
    for r in reports {
        let reference = r.reference.map_or(String::new(), |x| x.hopping_gates.to_string());
        let flag = if r.mismatches.is_empty() { "" } else { "MISMATCH" };
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.geometry,
            r.orbitals,
            r.hilbert_dim_log2,
            r.qubits,
            r.correlators,
            r.tune_c_sqg,
            r.tune_c_iswap,
            r.hopping_gates_emitted,
            r.hopping_gates_formula,
            reference,
            flag
        ));
    }
    s
}

fn cmd_resources(args: &ResourcesArgs) -> Outcome {
    let names: Vec<String> =
        if args.cluster.is_empty() { REFERENCE_VALUES.iter().map(|r| r.geometry.to_string()).collect() } else { args.cluster.clone() };
    let reports: Vec<ResourceReport> =
        names.iter().map(|n| count_resources(&ClusterSpec::new(n.parse()?))).collect::<Result<_, Error>>()?;
    let text = match args.format {
        Format::Table => {
            let mut t = render_table(&reports);
            for r in reports.iter().filter(|r| !r.mismatches.is_empty()) {
                t.push_str(&format!("{}: {}\n", r.geometry, r.mismatches.join("; ")));
            }
            t
        }
        Format::Json => serde_json::to_string_pretty(&reports).map_err(Error::from)? + "\n",
        Format::Csv => resources_csv(&reports),
    };
    write_output(args.out.as_deref(), &text)?;
    Ok(())
}

fn cmd_correlate(args: &CorrelateArgs) -> Outcome {
    let spec = args.cluster.build()?;
    let mut config = PipelineConfig::new(args.beta);
    config.tau_max = args.tau;
    config.tau_step = args.tau_step;
    config.spectral.eta = args.eta;
    config.spectral.omegas = linspace(-args.omega_max, args.omega_max, args.omega_points);
    config.evolution = match (args.scheme, args.dt) {
        (None, None) => Evolution::Exact,
        (Some(scheme), Some(dt)) => Evolution::Trotter { scheme: scheme.into(), dt, mode: args.mode.into() },
        _ => return Err(Failure::Invalid("--scheme and --dt go together".into())),
    };
    let out = run_pipeline(&spec, &config)?;
    fs::create_dir_all(&args.out).map_err(|e| Failure::Invalid(format!("cannot create {}: {e}", args.out.display())))?;
    let header = if args.no_header { String::new() } else { stamp("correlate") };
    write_output(Some(&args.out.join("correlation.csv")), &(header.clone() + &correlation_csv(&out.series, true)))?;
    write_output(Some(&args.out.join("greens.csv")), &(header + &greens_csv(&out.greens, true)))?;

    let mut worst: f64 = 0.0;
    for a in out.nambu.iter().filter(|n| n.i == n.j && n.component == Component::CCdag) {
        let b = out.nambu.iter().find(|n| n.i == a.i && n.j == a.j && n.component == Component::CdagC);
        if let Some(b) = b {
            worst = worst.max((a.values[0] + b.values[0] - 1.0).norm());
        }
    }
    println!("series {}  τ points {}  sum rule deviation {worst:.3e}", out.series.len(), out.series[0].taus.len());
    for a in out.greens.greens.iter().filter(|e| e.i == e.j && e.component == Component::CCdag) {
        if let Some(b) = out.greens.get(Component::CdagC, a.i, a.j) {
            let total: Vec<_> = a.values.iter().zip(&b.values).map(|(x, y)| x + y).collect();
            let peaks: Vec<String> = spectral_peaks(&out.greens.omegas, &total, 0.1).iter().map(|w| format!("{w:.3}")).collect();
            println!("{}: spectral peaks at ω = {}", a.i, peaks.join(", "));
        }
    }
    if worst > 1e-10 {
        return Err(Failure::Verification(format!("sum rule violated by {worst:.3e}")));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Compile(a) => cmd_compile(a),
        Command::Verify(a) => cmd_verify(a),
        Command::TrotterError(a) => cmd_trotter_error(a),
        Command::Resources(a) => cmd_resources(a),
        Command::Correlate(a) => cmd_correlate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INVALID_INPUT)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(EXIT_VERIFY_FAILED)
        }
    }
}
