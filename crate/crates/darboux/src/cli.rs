//! Command-line front end.
//!
//! Subcommands: `simulate`, `verify`, `classify`, `bracket`,
//! `symplectify-check`, `lift`. Machine-readable reports go to standard
//! output, human diagnostics to standard error. Exit codes: 0 when the
//! requested check passes (or the command succeeds), 1 when a check fails
//! (residual above tolerance, aborted simulation), 2 on usage, parse or
//! evaluation errors.
//!
//! Identical invocations produce byte-identical standard output; all
//! sampling is driven by the explicit `--seed` (default 0).

use std::collections::BTreeMap;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::contact::{jacobi_bracket, ContactState};
use crate::expr::{compile_str, VariableLayout};
use crate::flow::{dissipation_report, integrate, FieldKind};
use crate::sampling::SplitMix64;
use crate::section::{
    classify_section, hj_residual_evolution, hj_residual_evolution_jet,
    hj_residual_hamiltonian, hj_residual_hamiltonian_jet, legendrian_check, Assumptions, Grid,
    JetSection, MomentumSection,
};
use crate::symplectify::{
    exp_z_form_check, homogenize, lift_section_with, pushforward_check, HomogeneousState,
    LiftError, LiftOptions, SymplecticSection,
};
use crate::systems::{ideal_gas, linear_dissipation, SystemPreset};

/// Parse `argv` and run; returns the process exit code.
pub fn run() -> i32 {
    let argv: Vec<String> = std::env::args().collect();
    dispatch(&argv)
}

/// Testable entry point: dispatch an argument vector.
pub fn dispatch<S: AsRef<str>>(argv: &[S]) -> i32 {
    let cli = match Cli::try_parse_from(argv.iter().map(AsRef::as_ref)) {
        Ok(cli) => cli,
        Err(err) => {
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                write_stdout(&err.to_string());
                return 0;
            }
            eprint!("{err}");
            return 2;
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            2
        }
    }
}

/// Write to stdout, exiting quietly when the consumer closed the pipe
/// (so `darboux simulate ... | head` behaves like any other filter).
fn write_stdout(text: &str) {
    use std::io::{ErrorKind, Write};
    let mut out = std::io::stdout().lock();
    let outcome = out.write_all(text.as_bytes()).and_then(|()| out.flush());
    if let Err(err) = outcome {
        if err.kind() == ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: cannot write to stdout: {err}");
        std::process::exit(2);
    }
}

#[derive(Parser)]
#[command(
    name = "darboux",
    version,
    about = "Contact Hamiltonian dynamics on T*Q x R: simulation, Hamilton-Jacobi verification, symplectification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the Hamiltonian or evolution dynamics of a system.
    Simulate(SimulateArgs),
    /// Check a candidate section against a Hamilton-Jacobi equation.
    Verify(VerifyArgs),
    /// Classify a section (coisotropic / Lagrangian leaves / Legendrian).
    Classify(ClassifyArgs),
    /// Evaluate the Jacobi bracket {f, g} at a state.
    Bracket(BracketArgs),
    /// Verify the homogeneous symplectic model of a system.
    SymplectifyCheck(SymplectifyCheckArgs),
    /// Lift a contact section to a Lagrangian section of T*(Q x R).
    Lift(LiftArgs),
}

#[derive(Args)]
struct SystemArgs {
    /// Preset name (`linear-dissipation`, `ideal-gas`) or path to a system
    /// JSON file `{"n", "H", "layout"?, "params"?}`.
    #[arg(long)]
    system: String,
    /// Parameter binding `name=value`; repeatable. Overrides file/preset
    /// defaults.
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, f64)>,
    /// Potential expression in `q1` for the `linear-dissipation` preset.
    #[arg(long, allow_hyphen_values = true)]
    potential: Option<String>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Which dynamics to integrate.
    #[arg(long, value_enum)]
    field: FieldArg,
    /// Initial state, comma-separated in the chart order `q..,p..,z`.
    #[arg(long, allow_hyphen_values = true)]
    x0: String,
    #[arg(long = "t-end")]
    t_end: f64,
    #[arg(long)]
    dt: f64,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Section JSON file.
    #[arg(long)]
    section: String,
    /// Which Hamilton-Jacobi equation to check.
    #[arg(long, value_enum)]
    equation: EquationArg,
    /// Grid `lo:hi:count[,lo:hi:count...]`; a single spec is broadcast to
    /// every axis.
    #[arg(long, default_value = "-1:1:5", allow_hyphen_values = true)]
    grid: String,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Section JSON file.
    #[arg(long)]
    section: String,
    /// Optional system providing the chart variable names and parameters.
    #[arg(long)]
    system: Option<String>,
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, f64)>,
    #[arg(long, allow_hyphen_values = true)]
    potential: Option<String>,
    #[arg(long, default_value = "-1:1:5", allow_hyphen_values = true)]
    grid: String,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct BracketArgs {
    /// First function of the chart variables.
    #[arg(long, allow_hyphen_values = true)]
    f: String,
    /// Second function of the chart variables.
    #[arg(long, allow_hyphen_values = true)]
    g: String,
    /// Evaluation state, comma-separated `q..,p..,z` (odd length).
    #[arg(long, allow_hyphen_values = true)]
    at: String,
    /// Optional system providing the chart variable names and parameters.
    #[arg(long)]
    system: Option<String>,
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, f64)>,
    #[arg(long, allow_hyphen_values = true)]
    potential: Option<String>,
}

#[derive(Args)]
struct SymplectifyCheckArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Number of random phase-space points.
    #[arg(long, default_value_t = 50)]
    points: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Range `lo:hi` of |P_z| for the sampled points.
    #[arg(long = "pz-range", default_value = "0.1:10")]
    pz_range: String,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Optional section file with `gamma_t` to run the exponential
    /// z-profile check on.
    #[arg(long = "tilde-section")]
    tilde_section: Option<String>,
    /// Grid for the z-profile check.
    #[arg(long, default_value = "-1:1:5", allow_hyphen_values = true)]
    grid: String,
}

#[derive(Args)]
struct LiftArgs {
    /// Section JSON file over `Q x R`.
    #[arg(long)]
    section: String,
    /// Proportionality function `sigma(q, z)` with
    /// `dgamma/dz = sigma gamma`.
    #[arg(long, allow_hyphen_values = true)]
    sigma: String,
    /// Optional system providing variable names and parameters.
    #[arg(long)]
    system: Option<String>,
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, f64)>,
    #[arg(long, allow_hyphen_values = true)]
    potential: Option<String>,
    #[arg(long, default_value = "-1:1:5", allow_hyphen_values = true)]
    grid: String,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long = "steps-per-unit", default_value_t = 256.0)]
    steps_per_unit: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldArg {
    Hamiltonian,
    Evolution,
}

impl From<FieldArg> for FieldKind {
    fn from(value: FieldArg) -> Self {
        match value {
            FieldArg::Hamiltonian => FieldKind::Hamiltonian,
            FieldArg::Evolution => FieldKind::Evolution,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum EquationArg {
    /// Hamiltonian field, momentum section over `Q x R`.
    Xh,
    /// Hamiltonian field, jet section over `Q`.
    XhAlt,
    /// Evolution field, momentum section over `Q x R`.
    Ev,
    /// Evolution field, jet section over `Q`.
    EvAlt,
}

fn parse_param(raw: &str) -> Result<(String, f64), String> {
    let (name, value) = raw
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got `{raw}`"))?;
    let value: f64 = value
        .parse()
        .map_err(|_| format!("`{value}` is not a number"))?;
    Ok((name.to_string(), value))
}

/// Report printed by every checking subcommand.
#[derive(Serialize)]
struct Report {
    command: String,
    pass: bool,
    max_residual: f64,
    witness: Option<Vec<f64>>,
    samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    assumptions: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    constant: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coisotropic: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lagrangian_leaves: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    legendrian: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    related: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    homogeneity_defect: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exp_z_defect: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    path_independence_defect: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_t_samples: Option<Vec<Vec<f64>>>,
}

impl Report {
    fn new(command: &str, pass: bool, max_residual: f64, samples: usize) -> Self {
        Report {
            command: command.to_string(),
            pass,
            max_residual,
            witness: None,
            samples,
            assumptions: None,
            constant: None,
            coisotropic: None,
            lagrangian_leaves: None,
            legendrian: None,
            related: None,
            homogeneity_defect: None,
            exp_z_defect: None,
            path_independence_defect: None,
            value: None,
            gamma_t_samples: None,
        }
    }

    fn emit(&self) -> i32 {
        let line = serde_json::to_string(self).expect("report serialization cannot fail");
        write_stdout(&line);
        write_stdout("\n");
        if self.pass {
            0
        } else {
            1
        }
    }
}

fn assumptions_string(a: &Assumptions) -> String {
    match a {
        Assumptions::Satisfied => "satisfied".to_string(),
        Assumptions::Violated { details } => format!("violated: {details}"),
    }
}

fn execute(command: Command) -> Result<i32, String> {
    match command {
        Command::Simulate(args) => simulate(args),
        Command::Verify(args) => verify(args),
        Command::Classify(args) => classify(args),
        Command::Bracket(args) => bracket(args),
        Command::SymplectifyCheck(args) => symplectify_check(args),
        Command::Lift(args) => lift(args),
    }
}

// ---------------------------------------------------------------------------
// system and section loading

#[derive(Deserialize)]
struct SystemFile {
    n: usize,
    #[serde(rename = "H")]
    hamiltonian: String,
    layout: Option<LayoutSpec>,
    #[serde(default)]
    params: BTreeMap<String, f64>,
}

#[derive(Deserialize)]
struct LayoutSpec {
    q: Vec<String>,
    p: Vec<String>,
    z: String,
}

fn resolve_system(
    spec: &str,
    params: &[(String, f64)],
    potential: Option<&str>,
) -> Result<SystemPreset, String> {
    let lookup = |name: &str, default: f64| {
        params
            .iter()
            .rev()
            .find(|(key, _)| key == name)
            .map(|(_, v)| *v)
            .unwrap_or(default)
    };
    match spec {
        "linear-dissipation" => linear_dissipation(
            lookup("m", 1.0),
            lookup("lam", 0.1),
            potential.unwrap_or("q1^2/2"),
        )
        .map_err(|e| e.to_string()),
        "ideal-gas" => ideal_gas(lookup("R", 2.0)).map_err(|e| e.to_string()),
        path => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read system file `{path}`: {e}"))?;
            let file: SystemFile = serde_json::from_str(&text)
                .map_err(|e| format!("invalid system file `{path}`: {e}"))?;
            let mut layout = match &file.layout {
                Some(spec) => {
                    if spec.q.len() != file.n || spec.p.len() != file.n {
                        return Err(format!(
                            "layout of `{path}` must name {0} q's and {0} p's",
                            file.n
                        ));
                    }
                    VariableLayout::contact_named(&spec.q, &spec.p, &spec.z)
                        .map_err(|e| e.to_string())?
                }
                None => VariableLayout::contact(file.n),
            };
            for (name, value) in &file.params {
                layout = layout.with_param(name, *value).map_err(|e| e.to_string())?;
            }
            for (name, value) in params {
                layout = layout.with_param(name, *value).map_err(|e| e.to_string())?;
            }
            let hamiltonian =
                compile_str(&file.hamiltonian, &layout).map_err(|e| e.to_string())?;
            Ok(SystemPreset {
                name: path.to_string(),
                n: file.n,
                layout,
                hamiltonian,
                notes: String::new(),
            })
        }
    }
}

#[derive(Deserialize)]
struct SectionFile {
    n: usize,
    domain: String,
    components: Vec<String>,
    gamma_z: Option<String>,
    gamma_t: Option<String>,
    #[serde(default)]
    params: BTreeMap<String, f64>,
}

enum LoadedSection {
    Momentum(MomentumSection),
    Jet(JetSection),
    Symplectic(SymplecticSection),
}

/// Variable names of the section base: the system's q-names (plus its
/// z-name over `Q x R`), or generic `q1..qn, z` without a system.
fn section_layout(
    file: &SectionFile,
    system: Option<&SystemPreset>,
    over_qz: bool,
) -> Result<VariableLayout, String> {
    let mut names: Vec<String> = match system {
        Some(preset) => {
            if preset.n != file.n {
                return Err(format!(
                    "section has n = {} but the system has n = {}",
                    file.n, preset.n
                ));
            }
            preset.layout.vars()[..file.n].to_vec()
        }
        None => (1..=file.n).map(|i| format!("q{i}")).collect(),
    };
    if over_qz {
        names.push(match system {
            Some(preset) => preset.layout.vars()[2 * file.n].clone(),
            None => "z".to_string(),
        });
    }
    let mut layout = VariableLayout::new(&names).map_err(|e| e.to_string())?;
    if let Some(preset) = system {
        for (name, value) in preset.layout.params() {
            layout = layout.with_param(name, *value).map_err(|e| e.to_string())?;
        }
    }
    for (name, value) in &file.params {
        layout = layout.with_param(name, *value).map_err(|e| e.to_string())?;
    }
    Ok(layout)
}

fn read_section_file(path: &str) -> Result<SectionFile, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read section file `{path}`: {e}"))?;
    let file: SectionFile = serde_json::from_str(&text)
        .map_err(|e| format!("invalid section file `{path}`: {e}"))?;
    if file.components.len() != file.n {
        return Err(format!(
            "section file `{path}` declares n = {} but has {} components",
            file.n,
            file.components.len()
        ));
    }
    Ok(file)
}

fn load_section(
    path: &str,
    system: Option<&SystemPreset>,
) -> Result<LoadedSection, String> {
    let file = read_section_file(path)?;
    build_section(&file, system, path)
}

fn build_section(
    file: &SectionFile,
    system: Option<&SystemPreset>,
    path: &str,
) -> Result<LoadedSection, String> {
    match file.domain.as_str() {
        "QxR" => {
            let layout = section_layout(file, system, true)?;
            let components = file
                .components
                .iter()
                .map(|src| compile_str(src, &layout))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            match &file.gamma_t {
                Some(src) => {
                    let gamma_t = compile_str(src, &layout).map_err(|e| e.to_string())?;
                    Ok(LoadedSection::Symplectic(SymplecticSection::new(
                        components, gamma_t,
                    )))
                }
                None => Ok(LoadedSection::Momentum(MomentumSection::new(components))),
            }
        }
        "Q" => {
            let layout = section_layout(file, system, false)?;
            let gamma_z = file
                .gamma_z
                .as_deref()
                .ok_or_else(|| format!("section file `{path}` needs `gamma_z` over Q"))?;
            let components = file
                .components
                .iter()
                .map(|src| compile_str(src, &layout))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            let z_map = compile_str(gamma_z, &layout).map_err(|e| e.to_string())?;
            Ok(LoadedSection::Jet(JetSection::new(components, z_map)))
        }
        other => Err(format!("unknown section domain `{other}` (use \"QxR\" or \"Q\")")),
    }
}

fn parse_grid(spec: &str, dim: usize) -> Result<Grid, String> {
    let mut axes = Vec::new();
    for part in spec.split(',') {
        let pieces: Vec<&str> = part.split(':').collect();
        if pieces.len() != 3 {
            return Err(format!("grid axis `{part}` is not lo:hi:count"));
        }
        let lo: f64 = pieces[0].parse().map_err(|_| format!("bad grid bound `{}`", pieces[0]))?;
        let hi: f64 = pieces[1].parse().map_err(|_| format!("bad grid bound `{}`", pieces[1]))?;
        let count: usize = pieces[2]
            .parse()
            .map_err(|_| format!("bad grid count `{}`", pieces[2]))?;
        if count == 0 || !(lo <= hi) {
            return Err(format!("grid axis `{part}` is empty"));
        }
        axes.push(((lo, hi), count));
    }
    let axes = if axes.len() == 1 && dim > 1 {
        vec![axes[0]; dim]
    } else {
        axes
    };
    if axes.len() != dim {
        return Err(format!(
            "grid has {} axes but the section base has dimension {dim}",
            axes.len()
        ));
    }
    let (bounds, counts) = axes.into_iter().unzip();
    Ok(Grid::mesh(bounds, counts))
}

fn parse_state(raw: &str) -> Result<ContactState, String> {
    let values: Vec<f64> = raw
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| format!("bad state entry `{v}`")))
        .collect::<Result<_, _>>()?;
    ContactState::from_slice(&values)
        .map_err(|_| format!("a state has odd length 2n+1 >= 3, got {}", values.len()))
}

// ---------------------------------------------------------------------------
// subcommands

fn simulate(args: SimulateArgs) -> Result<i32, String> {
    let preset = resolve_system(
        &args.system.system,
        &args.system.params,
        args.system.potential.as_deref(),
    )?;
    let x0 = parse_state(&args.x0)?;
    if x0.n() != preset.n {
        return Err(format!(
            "x0 has n = {} but the system expects n = {}",
            x0.n(),
            preset.n
        ));
    }
    let traj = integrate(
        &preset.hamiltonian,
        args.field.into(),
        &x0,
        args.t_end,
        args.dt,
    )
    .map_err(|e| e.to_string())?;
    let report = dissipation_report(&traj, &preset.hamiltonian).map_err(|e| e.to_string())?;
    match args.format {
        FormatArg::Csv => {
            write_stdout(&traj.to_csv());
            write_stdout(&format!("# H-drift: {}\n", report.conservation_drift));
            if matches!(traj.field_kind, FieldKind::Hamiltonian) {
                write_stdout(&format!("# decay-defect: {}\n", report.decay_defect));
            }
            if traj.blew_up {
                write_stdout("# aborted: a state component exceeded the blow-up limit\n");
            }
        }
        FormatArg::Json => {
            write_stdout(&traj.to_json());
            write_stdout("\n");
            eprintln!("H-drift: {}", report.conservation_drift);
        }
    }
    if traj.blew_up {
        eprintln!("integration aborted early at t = {}", traj.times.last().unwrap());
        return Ok(1);
    }
    Ok(0)
}

fn verify(args: VerifyArgs) -> Result<i32, String> {
    let preset = resolve_system(
        &args.system.system,
        &args.system.params,
        args.system.potential.as_deref(),
    )?;
    let section = load_section(&args.section, Some(&preset))?;
    let h = &preset.hamiltonian;
    let result = match (args.equation, section) {
        (EquationArg::Xh, LoadedSection::Momentum(gamma)) => {
            let grid = parse_grid(&args.grid, gamma.n() + 1)?;
            hj_residual_hamiltonian(h, &gamma, &grid, args.tol)
        }
        (EquationArg::Ev, LoadedSection::Momentum(gamma)) => {
            let grid = parse_grid(&args.grid, gamma.n() + 1)?;
            hj_residual_evolution(h, &gamma, &grid, args.tol)
        }
        (EquationArg::XhAlt, LoadedSection::Jet(gamma)) => {
            let grid = parse_grid(&args.grid, gamma.n())?;
            hj_residual_hamiltonian_jet(h, &gamma, &grid, args.tol)
        }
        (EquationArg::EvAlt, LoadedSection::Jet(gamma)) => {
            let grid = parse_grid(&args.grid, gamma.n())?;
            hj_residual_evolution_jet(h, &gamma, &grid, args.tol)
        }
        (EquationArg::Xh | EquationArg::Ev, _) => {
            return Err("equations xh/ev need a section with domain \"QxR\"".to_string());
        }
        (EquationArg::XhAlt | EquationArg::EvAlt, _) => {
            return Err("equations xh-alt/ev-alt need a section with domain \"Q\"".to_string());
        }
    }
    .map_err(|e| e.to_string())?;
    let mut report = Report::new("verify", result.pass, result.max_residual, result.samples);
    report.witness = result.witness.clone();
    report.assumptions = Some(assumptions_string(&result.assumptions));
    report.constant = result.constant;
    Ok(report.emit())
}

fn classify(args: ClassifyArgs) -> Result<i32, String> {
    let preset = match &args.system {
        Some(spec) => Some(resolve_system(spec, &args.params, args.potential.as_deref())?),
        None => None,
    };
    let section = load_section(&args.section, preset.as_ref())?;
    match section {
        LoadedSection::Momentum(gamma) => {
            let grid = parse_grid(&args.grid, gamma.n() + 1)?;
            let result =
                classify_section(&gamma, &grid, args.tol).map_err(|e| e.to_string())?;
            let mut report = Report::new(
                "classify",
                result.coisotropic,
                result.curl_defect.max(result.proportionality_defect),
                result.samples,
            );
            report.witness = result
                .curl_witness
                .clone()
                .or_else(|| result.proportionality_witness.clone());
            report.coisotropic = Some(result.coisotropic);
            report.lagrangian_leaves = Some(result.lagrangian_leaves);
            Ok(report.emit())
        }
        LoadedSection::Jet(gamma) => {
            let grid = parse_grid(&args.grid, gamma.n())?;
            let result =
                legendrian_check(&gamma, &grid, args.tol).map_err(|e| e.to_string())?;
            let mut report =
                Report::new("classify", result.legendrian, result.max_defect, result.samples);
            report.witness = result.witness.clone();
            report.legendrian = Some(result.legendrian);
            Ok(report.emit())
        }
        LoadedSection::Symplectic(_) => {
            Err("classify expects a contact section, not a symplectic one".to_string())
        }
    }
}

fn bracket(args: BracketArgs) -> Result<i32, String> {
    let state = parse_state(&args.at)?;
    let layout = match &args.system {
        Some(spec) => {
            let preset = resolve_system(spec, &args.params, args.potential.as_deref())?;
            if preset.n != state.n() {
                return Err(format!(
                    "state has n = {} but the system expects n = {}",
                    state.n(),
                    preset.n
                ));
            }
            preset.layout
        }
        None => {
            let mut layout = VariableLayout::contact(state.n());
            for (name, value) in &args.params {
                layout = layout.with_param(name, *value).map_err(|e| e.to_string())?;
            }
            layout
        }
    };
    let f = compile_str(&args.f, &layout).map_err(|e| e.to_string())?;
    let g = compile_str(&args.g, &layout).map_err(|e| e.to_string())?;
    let value = jacobi_bracket(&f, &g, &state).map_err(|e| e.to_string())?;
    let mut report = Report::new("bracket", true, 0.0, 1);
    report.witness = Some(state.to_vec());
    report.value = Some(value);
    Ok(report.emit())
}

fn symplectify_check(args: SymplectifyCheckArgs) -> Result<i32, String> {
    let preset = resolve_system(
        &args.system.system,
        &args.system.params,
        args.system.potential.as_deref(),
    )?;
    let n = preset.n;
    let (pz_lo, pz_hi) = {
        let parts: Vec<&str> = args.pz_range.split(':').collect();
        if parts.len() != 2 {
            return Err("--pz-range must be lo:hi".to_string());
        }
        let lo: f64 = parts[0].parse().map_err(|_| "bad pz-range".to_string())?;
        let hi: f64 = parts[1].parse().map_err(|_| "bad pz-range".to_string())?;
        if !(0.0 < lo && lo <= hi) {
            return Err("--pz-range needs 0 < lo <= hi".to_string());
        }
        (lo, hi)
    };
    let mut rng = SplitMix64::new(args.seed);
    let points: Vec<HomogeneousState> = (0..args.points.max(1))
        .map(|_| {
            HomogeneousState::new(
                (0..n).map(|_| rng.uniform(-2.0, 2.0)).collect(),
                rng.uniform(-2.0, 2.0),
                (0..n).map(|_| rng.uniform(-2.0, 2.0)).collect(),
                rng.uniform(pz_lo, pz_hi) * rng.sign(),
            )
        })
        .collect();
    let push = pushforward_check(&preset.hamiltonian, &points, args.tol)
        .map_err(|e| e.to_string())?;

    // degree-1 homogeneity at the same points, relative with a unit floor
    let h_tilde = homogenize(&preset.hamiltonian);
    let mut homo_defect = 0.0f64;
    for x in &points {
        let value = h_tilde.eval(&x.to_vec()).map_err(|e| e.to_string())?;
        for lambda in [-2.0, 0.5, 3.0] {
            let scaled = HomogeneousState::new(
                x.q.clone(),
                x.z,
                x.p.iter().map(|v| lambda * v).collect(),
                lambda * x.pz,
            );
            let scaled_value = h_tilde.eval(&scaled.to_vec()).map_err(|e| e.to_string())?;
            let defect =
                (scaled_value - lambda * value).abs() / (lambda * value).abs().max(1.0);
            homo_defect = homo_defect.max(defect);
        }
    }

    let mut exp_z_defect = None;
    if let Some(path) = &args.tilde_section {
        match load_section(path, Some(&preset))? {
            LoadedSection::Symplectic(section) => {
                let grid = parse_grid(&args.grid, section.n() + 1)?;
                let result = exp_z_form_check(&section, &grid, args.tol)
                    .map_err(|e| e.to_string())?;
                exp_z_defect = Some(result.max_defect);
            }
            _ => {
                return Err("--tilde-section needs a QxR section with gamma_t".to_string());
            }
        }
    }

    let pass = push.pass
        && homo_defect <= 1e-12
        && exp_z_defect.map(|d| d <= args.tol).unwrap_or(true);
    let mut report = Report::new("symplectify-check", pass, push.max_error, points.len());
    report.witness = push.witness.map(|w| w.to_vec());
    report.homogeneity_defect = Some(homo_defect);
    report.exp_z_defect = exp_z_defect;
    Ok(report.emit())
}

fn lift(args: LiftArgs) -> Result<i32, String> {
    let preset = match &args.system {
        Some(spec) => Some(resolve_system(spec, &args.params, args.potential.as_deref())?),
        None => None,
    };
    let file = read_section_file(&args.section)?;
    let gamma = match build_section(&file, preset.as_ref(), &args.section)? {
        LoadedSection::Momentum(gamma) => gamma,
        _ => return Err("lift expects a section with domain \"QxR\"".to_string()),
    };
    let grid = parse_grid(&args.grid, gamma.n() + 1)?;
    // sigma lives on the same base as the section, with the same
    // parameters in scope
    let sigma_layout = section_layout(&file, preset.as_ref(), true)?;
    let sigma = compile_str(&args.sigma, &sigma_layout).map_err(|e| e.to_string())?;

    let options = LiftOptions {
        steps_per_unit: args.steps_per_unit,
        ..LiftOptions::default()
    };
    match lift_section_with(&gamma, &sigma, &grid, args.tol, options) {
        Ok(result) => {
            let mut samples = Vec::new();
            for x in grid.points() {
                let value = result
                    .section
                    .gamma_t()
                    .eval(&x)
                    .map_err(|e| e.to_string())?;
                let mut row = x.clone();
                row.push(value);
                samples.push(row);
            }
            let pass = result.lagrangian_defect <= args.tol;
            let mut report = Report::new(
                "lift",
                pass,
                result.lagrangian_defect,
                samples.len(),
            );
            report.path_independence_defect = Some(result.path_independence_defect);
            report.gamma_t_samples = Some(samples);
            Ok(report.emit())
        }
        Err(err @ (LiftError::Assumption(_)
        | LiftError::Integrability { .. }
        | LiftError::PathDependence { .. })) => {
            let mut report = Report::new("lift", false, 0.0, 0);
            report.assumptions = Some(format!("violated: {err}"));
            Ok(report.emit())
        }
        Err(LiftError::Eval(e)) => Err(e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn param_parsing() {
        assert_eq!(parse_param("m=1.5").unwrap(), ("m".to_string(), 1.5));
        assert!(parse_param("m").is_err());
        assert!(parse_param("m=x").is_err());
    }

    #[test]
    fn grid_parsing_and_broadcast() {
        let grid = parse_grid("0.5:2:8", 3).unwrap();
        assert_eq!(grid.dim(), 3);
        assert_eq!(grid.points().len(), 512);
        let grid = parse_grid("0:1:2,0:2:3", 2).unwrap();
        assert_eq!(grid.points().len(), 6);
        assert!(parse_grid("0:1:2,0:2:3", 3).is_err());
        assert!(parse_grid("0:1", 1).is_err());
        assert!(parse_grid("1:0:2", 1).is_err());
    }

    #[test]
    fn state_parsing() {
        let state = parse_state("1,2,3").unwrap();
        assert_eq!(state.to_vec(), vec![1.0, 2.0, 3.0]);
        assert!(parse_state("1,2").is_err());
        assert!(parse_state("1,x,3").is_err());
    }

    #[test]
    fn preset_resolution_and_overrides() {
        let preset = resolve_system("ideal-gas", &[("R".to_string(), 3.0)], None).unwrap();
        assert_eq!(preset.n, 3);
        let r = preset
            .layout
            .params()
            .iter()
            .find(|(n, _)| n == "R")
            .unwrap()
            .1;
        assert_eq!(r, 3.0);
        assert!(resolve_system("no-such-file.json", &[], None).is_err());
    }
}
