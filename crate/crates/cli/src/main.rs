//! `squidgate`: build SQUID-cavity gate schedules, simulate them, and
//! report truth tables, fidelities, gate times and flux-qubit levels.
//!
//! Exit status: 0 on success, 1 when an analytic-mode gate misses its ideal
//! by more than `1e-6` in fidelity, 2 on bad arguments, configs or violated
//! device constraints.

mod angle;
mod output;

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use serde::Serialize;

use squidgate_core::flux_levels::{solve_levels_auto, sweep_flux, sweep_csv, LevelStructure, SquidCircuitParams};
use squidgate_core::scheduler::{
    build_ntcp_gate, build_phase_gate, build_qft3, build_simultaneous_multiphase_gate, build_three_qubit_gate,
    emit_timing_curve, schedule_duration, standard_thetas, timing_csv,
};
use squidgate_core::verification::{
    dft_matrix, dispersive_validity_report, gate_fidelity, logical_propagator, qft_check, qubit_reversal,
    truth_table, verify_schedule, FidelityReport, QftPermutation, QftReport, TruthTable,
};
use squidgate_core::{DeviceParams, Error, Schedule, SimulationMode, SpaceDescriptor, TargetPhase, C64};

use output::{emit, json, Csv, Format};

/// Analytic runs below this fidelity exit with status 1.
const FIDELITY_THRESHOLD: f64 = 1.0 - 1e-6;

#[derive(Parser)]
#[command(name = "squidgate", version, about = "SQUID-cavity phase gates: schedules, simulation and checks")]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunConfig {
    /// Device parameter JSON (circuit JSON for `levels`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Mode::Analytic)]
    mode: Mode,
    /// Cavity Fock-space truncation.
    #[arg(long, global = true, default_value_t = 2)]
    cavity_dim: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Analytic,
    ExactDispersive,
}

impl From<Mode> for SimulationMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Analytic => SimulationMode::Analytic,
            Mode::ExactDispersive => SimulationMode::ExactDispersive,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Truth table and fidelity of a controlled-phase gate.
    Gate(GateArgs),
    /// Three-qubit Fourier transform against the DFT.
    Qft,
    /// Closed-form gate times for n = 2..=N, multi-target vs decomposed.
    Timing {
        /// Largest qubit count, 2..=20.
        #[arg(long, default_value_t = 10)]
        n: usize,
    },
    /// Lowest levels of an rf-SQUID, optionally swept over external flux.
    Levels(LevelsArgs),
    /// Exact detuned exchange against the dispersive approximation.
    DispersiveCheck(DispersiveArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GateKind {
    ThreeQubit,
    NQubit,
    TwoQubit,
    Ntcp,
    Multiphase,
}

#[derive(Args)]
struct GateArgs {
    #[arg(value_enum)]
    kind: GateKind,
    /// Number of qubits (control plus targets).
    #[arg(long)]
    n: Option<usize>,
    /// Target phases, e.g. `pi/2,pi/4`.
    #[arg(long)]
    theta: Option<String>,
    /// Share microwave pulses between neighbouring steps.
    #[arg(long)]
    merged: bool,
}

#[derive(Args)]
struct LevelsArgs {
    /// Number of levels.
    #[arg(long, default_value_t = 4)]
    levels: usize,
    /// External flux in units of the flux quantum, overriding the config.
    #[arg(long)]
    bias: Option<f64>,
    /// Sweep the bias over this many points instead of a single solve.
    #[arg(long)]
    points: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    sweep_from: f64,
    #[arg(long, default_value_t = 0.5)]
    sweep_to: f64,
}

#[derive(Args)]
struct DispersiveArgs {
    /// Coupling (s^-1).
    #[arg(long, default_value_t = 3e9)]
    g: f64,
    /// Detuning (s^-1); defaults to 10 g.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value = "pi/2")]
    theta: String,
}

/// A failure that ends the run with status 2.
struct Failure(String);

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure(s)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(match e {
            Error::ConstraintViolation { message, squids } => {
                let names: Vec<String> = squids.iter().map(|s| format!("SQUID {}", s + 1)).collect();
                format!("constraint violated for {}: {message}", names.join(", "))
            }
            other => other.to_string(),
        })
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(Failure(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Failure> {
    let cfg = &cli.run;
    match &cli.command {
        Command::Gate(args) => cmd_gate(cfg, args),
        Command::Qft => cmd_qft(cfg),
        Command::Timing { n } => cmd_timing(cfg, *n),
        Command::Levels(args) => cmd_levels(cfg, args),
        Command::DispersiveCheck(args) => cmd_dispersive_check(cfg, args),
    }
}

fn read_config(path: &Path) -> Result<String, Failure> {
    log::info!("reading {}", path.display());
    Ok(fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?)
}

fn device(cfg: &RunConfig, n: usize) -> Result<DeviceParams, Failure> {
    let params = match &cfg.config {
        Some(path) => DeviceParams::from_json(&read_config(path)?)?,
        None => DeviceParams::reference(n),
    };
    params.require(n)?;
    Ok(params)
}

fn space(cfg: &RunConfig, n: usize) -> Result<SpaceDescriptor, Failure> {
    Ok(SpaceDescriptor::new(n, cfg.cavity_dim)?)
}

fn passes(mode: Mode, fidelity: f64) -> bool {
    matches!(mode, Mode::ExactDispersive) || fidelity >= FIDELITY_THRESHOLD
}

fn thetas_for(args: &GateArgs, n: usize) -> Result<Vec<f64>, Failure> {
    match &args.theta {
        Some(text) => {
            let thetas = angle::parse_angles(text)?;
            if thetas.len() != n - 1 {
                return Err(Failure(format!("{n} qubits need {} phases, got {}", n - 1, thetas.len())));
            }
            Ok(thetas)
        }
        None => Ok(standard_thetas(n)),
    }
}

fn qubit_count(args: &GateArgs) -> Result<usize, Failure> {
    let fixed = match args.kind {
        GateKind::ThreeQubit => Some(3),
        GateKind::TwoQubit => Some(2),
        _ => None,
    };
    let from_theta = match (&args.theta, args.kind) {
        (Some(t), GateKind::NQubit | GateKind::Multiphase) => Some(t.split(',').count() + 1),
        _ => None,
    };
    let n = match (fixed, args.n) {
        (Some(f), Some(n)) if n != f => return Err(Failure(format!("this gate has {f} qubits, not {n}"))),
        (Some(f), _) => f,
        (None, Some(n)) => n,
        (None, None) => from_theta.unwrap_or(3),
    };
    if n < 2 {
        return Err(Failure(format!("a gate needs at least 2 qubits, got {n}")));
    }
    Ok(n)
}

fn targets(thetas: &[f64]) -> Vec<TargetPhase> {
    thetas.iter().enumerate().map(|(i, &theta)| TargetPhase { squid: i + 1, theta }).collect()
}

/// Reference device retuned so every target's dispersive wait has the same
/// length: `delta_t` scales as `max(theta) / theta_t` from `10 g`.
fn equal_wait_device(n: usize, thetas: &[f64]) -> DeviceParams {
    let mut p = DeviceParams::reference(n);
    let top = thetas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for (i, theta) in thetas.iter().enumerate() {
        if let Some(s) = p.squid_mut(i + 1) {
            s.delta *= top / theta;
        }
    }
    p
}

fn build_gate(cfg: &RunConfig, args: &GateArgs, n: usize) -> Result<Schedule, Failure> {
    if args.merged && matches!(args.kind, GateKind::Ntcp | GateKind::Multiphase) {
        return Err(Failure("--merged applies to sequential gates only".into()));
    }
    let schedule = match args.kind {
        GateKind::ThreeQubit => {
            let t = thetas_for(args, 3)?;
            build_three_qubit_gate(&device(cfg, 3)?, t[0], t[1], args.merged)?
        }
        GateKind::TwoQubit => {
            let t = match &args.theta {
                Some(_) => thetas_for(args, 2)?,
                None => vec![PI],
            };
            build_phase_gate(&device(cfg, 2)?, 0, &targets(&t), args.merged)?
        }
        GateKind::NQubit => build_phase_gate(&device(cfg, n)?, 0, &targets(&thetas_for(args, n)?), args.merged)?,
        GateKind::Ntcp => {
            if args.theta.is_some() {
                return Err(Failure("an NTCP gate always applies pi; drop --theta".into()));
            }
            build_ntcp_gate(&device(cfg, n)?, n)?
        }
        GateKind::Multiphase => {
            let thetas = thetas_for(args, n)?;
            let params = match cfg.config {
                Some(_) => device(cfg, n)?,
                None => equal_wait_device(n, &thetas),
            };
            build_simultaneous_multiphase_gate(&params, &thetas)?
        }
    };
    Ok(schedule)
}

#[derive(Serialize)]
struct GateReport {
    duration_s: f64,
    truth_table: TruthTable,
    fidelity: FidelityReport,
}

fn cmd_gate(cfg: &RunConfig, args: &GateArgs) -> Result<ExitCode, Failure> {
    let n = qubit_count(args)?;
    let schedule = build_gate(cfg, args, n)?;
    let sp = space(cfg, schedule.n_squids)?;
    let mode = cfg.mode.into();
    let report = GateReport {
        duration_s: schedule_duration(&schedule),
        truth_table: truth_table(&schedule, sp, mode)?,
        fidelity: verify_schedule(&schedule, sp, mode)?,
    };
    let text = match cfg.format {
        Format::Text => {
            let f = &report.fidelity;
            format!(
                "{}\nduration        {:.6} ns\nfidelity        {:.12}\nmax deviation   {:.3e}\nleakage         {:.3e}\n",
                report.truth_table.to_text(),
                report.duration_s * 1e9,
                f.fidelity,
                f.max_deviation,
                f.leakage
            )
        }
        Format::Json => json(&report)?,
        Format::Csv => {
            let mut csv = Csv::new(&[
                "input",
                "phase",
                "ideal_phase",
                "return_population",
                "leakage",
                "vacuum_population",
                "flagged",
            ]);
            for (row, ideal) in report.truth_table.rows.iter().zip(&report.fidelity.phases) {
                csv.row([
                    row.input.clone(),
                    row.phase.to_string(),
                    ideal.ideal.to_string(),
                    row.fidelity.to_string(),
                    row.leakage.to_string(),
                    row.vacuum_population.to_string(),
                    row.flagged.to_string(),
                ]);
            }
            csv.finish()
        }
    };
    emit(&text, cfg.out.as_deref())?;
    Ok(exit_for(passes(cfg.mode, report.fidelity.fidelity), &report.fidelity.gate))
}

fn exit_for(ok: bool, what: &str) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        eprintln!("{what}: fidelity below {FIDELITY_THRESHOLD}");
        ExitCode::from(1)
    }
}

#[derive(Serialize)]
struct QftOutput {
    duration_s: f64,
    qft: QftReport,
    fidelity: FidelityReport,
}

fn cmd_qft(cfg: &RunConfig) -> Result<ExitCode, Failure> {
    let schedule = build_qft3(&device(cfg, 3)?)?;
    let u = logical_propagator(&schedule, space(cfg, 3)?, cfg.mode.into())?;
    let qft = qft_check(&u)?;
    let (f, r) = (dft_matrix(8), qubit_reversal(3));
    let best: DMatrix<C64> = match qft.permutation {
        QftPermutation::Identity => f,
        QftPermutation::ReverseInput => &f * &r,
        QftPermutation::ReverseOutput => &r * &f,
    };
    let report = QftOutput {
        duration_s: schedule_duration(&schedule),
        fidelity: gate_fidelity(&schedule.name, &u, &best)?,
        qft,
    };
    let permutation = |p: QftPermutation| match p {
        QftPermutation::Identity => "identity",
        QftPermutation::ReverseInput => "reverse-input",
        QftPermutation::ReverseOutput => "reverse-output",
    };
    let text = match cfg.format {
        Format::Text => {
            let mut s = format!(
                "{}\nduration          {:.6} ns\nfidelity vs DFT   {:.12} ({})\nleakage           {:.3e}\ncandidates\n",
                schedule.name,
                report.duration_s * 1e9,
                report.qft.fidelity_vs_dft,
                permutation(report.qft.permutation),
                report.fidelity.leakage
            );
            for (p, fid) in &report.qft.candidates {
                s.push_str(&format!("  {:<15} {fid:.12}\n", permutation(*p)));
            }
            s
        }
        Format::Json => json(&report)?,
        Format::Csv => {
            let mut csv = Csv::new(&["permutation", "fidelity", "best"]);
            for (p, fid) in &report.qft.candidates {
                csv.row([permutation(*p).to_string(), fid.to_string(), (*p == report.qft.permutation).to_string()]);
            }
            csv.finish()
        }
    };
    emit(&text, cfg.out.as_deref())?;
    Ok(exit_for(passes(cfg.mode, report.qft.fidelity_vs_dft), &schedule.name))
}

fn cmd_timing(cfg: &RunConfig, n_max: usize) -> Result<ExitCode, Failure> {
    if !(2..=20).contains(&n_max) {
        return Err(Failure(format!("--n must lie in 2..=20, got {n_max}")));
    }
    let rows = emit_timing_curve(&device(cfg, n_max)?, n_max)?;
    let text = match cfg.format {
        Format::Csv => timing_csv(&rows),
        Format::Json => json(&rows)?,
        Format::Text => {
            let mut s = format!("{:>3}  {:>14}  {:>18}  {:>10}\n", "n", "multi (ns)", "decomposed (ns)", "gap (ns)");
            for r in &rows {
                s.push_str(&format!(
                    "{:>3}  {:>14.4}  {:>18.4}  {:>10.4}\n",
                    r.n,
                    r.tau_multi_s * 1e9,
                    r.tau_decomposed_s * 1e9,
                    r.gap() * 1e9
                ));
            }
            s
        }
    };
    emit(&text, cfg.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

/// rf-SQUID used when `levels` runs without a config: 1 pF, 100 pH and
/// `beta_L = 1.5`.
fn default_circuit() -> SquidCircuitParams {
    let p = SquidCircuitParams::new(1e-12, 1e-10, 0.0, 0.0).expect("valid constants");
    SquidCircuitParams { critical_current: 1.5 * p.flux_quantum / (2.0 * PI * p.inductance), ..p }
}

fn cmd_levels(cfg: &RunConfig, args: &LevelsArgs) -> Result<ExitCode, Failure> {
    let mut circuit = match &cfg.config {
        Some(path) => {
            let c: SquidCircuitParams =
                serde_json::from_str(&read_config(path)?).map_err(|e| format!("{}: {e}", path.display()))?;
            c.validate()?;
            c
        }
        None => default_circuit(),
    };
    if let Some(ratio) = args.bias {
        circuit = circuit.at_bias(ratio);
    }
    let text = match args.points {
        Some(points) => {
            let rows = sweep_flux(&circuit, args.sweep_from, args.sweep_to, points, args.levels)?;
            match cfg.format {
                Format::Json => json(&rows)?,
                Format::Csv | Format::Text => sweep_csv(&rows),
            }
        }
        None => {
            let levels = solve_levels_auto(&circuit, args.levels)?;
            match cfg.format {
                Format::Json => json(&levels)?,
                Format::Csv => {
                    let mut csv = Csv::new(&["level", "energy_j", "omega_0k"]);
                    for (k, e) in levels.energies.iter().enumerate() {
                        csv.row([k.to_string(), format!("{e:e}"), format!("{:e}", levels.omega(0, k).unwrap_or(0.0))]);
                    }
                    csv.finish()
                }
                Format::Text => levels_text(&circuit, &levels),
            }
        }
    };
    emit(&text, cfg.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn levels_text(circuit: &SquidCircuitParams, levels: &LevelStructure) -> String {
    let mut s = format!(
        "beta_L {:.4}, phi_x/phi0 {:.4}, plasma frequency {:.6e} s^-1\n{:>5}  {:>16}  {:>16}\n",
        circuit.beta_l(),
        circuit.phi_x / circuit.flux_quantum,
        circuit.plasma_frequency(),
        "level",
        "energy (J)",
        "omega_0k (s^-1)"
    );
    for (k, e) in levels.energies.iter().enumerate() {
        s.push_str(&format!("{k:>5}  {e:>16.9e}  {:>16.9e}\n", levels.omega(0, k).unwrap_or(0.0)));
    }
    if let Some(a) = levels.anharmonicity() {
        s.push_str(&format!("omega01 {:.9e}\n", a.omega01));
        if let Some(w) = a.omega12 {
            s.push_str(&format!("omega12 {w:.9e}\n"));
        }
        if let Some(w) = a.omega23 {
            s.push_str(&format!("omega23 {w:.9e}\n"));
        }
        if let Some(alpha) = a.alpha {
            s.push_str(&format!("alpha   {alpha:.9e}\n"));
        }
    }
    s.push_str(&format!("drift   {:.3e}\n", levels.drift));
    s
}

fn cmd_dispersive_check(cfg: &RunConfig, args: &DispersiveArgs) -> Result<ExitCode, Failure> {
    let theta = angle::parse_angle(&args.theta)?;
    let delta = args.delta.unwrap_or(10.0 * args.g);
    let r = dispersive_validity_report(args.g, delta, theta)?;
    let text = match cfg.format {
        Format::Json => json(&r)?,
        Format::Csv => {
            let mut csv =
                Csv::new(&["g", "delta", "theta", "p3_exact", "p3_formula", "phase_error", "population_error"]);
            csv.row(
                [r.g, r.delta, r.theta, r.p3_exact, r.p3_formula, r.phase_error, r.population_error]
                    .map(|v| v.to_string()),
            );
            csv.finish()
        }
        Format::Text => format!(
            "g {:e} s^-1, delta {:e} s^-1 ({:.3} g), theta {:.6} pi\npeak |3> occupation  {:.6} (formula {:.6})\nphase error          {:.3e} rad\npopulation error     {:.3e}\n",
            r.g,
            r.delta,
            r.delta / r.g,
            r.theta / PI,
            r.p3_exact,
            r.p3_formula,
            r.phase_error,
            r.population_error
        ),
    };
    emit(&text, cfg.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fidelity_threshold_applies_to_analytic_runs_only() {
        assert!(passes(Mode::Analytic, 1.0));
        assert!(passes(Mode::Analytic, 1.0 - 1e-7));
        assert!(!passes(Mode::Analytic, 1.0 - 2e-6));
        assert!(passes(Mode::ExactDispersive, 0.5));
    }

    #[test]
    fn equal_wait_device_balances_dispersive_times() {
        let thetas = standard_thetas(4);
        let p = equal_wait_device(4, &thetas);
        let waits: Vec<f64> = thetas
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let s = p.squid(i + 1).unwrap();
                t * s.delta / (s.g * s.g)
            })
            .collect();
        assert!(waits.iter().all(|w| (w / waits[0] - 1.0).abs() < 1e-12), "{waits:?}");
    }

    #[test]
    fn constraint_errors_use_one_based_names() {
        let Failure(msg) = Error::ConstraintViolation { message: "x".into(), squids: vec![1, 2] }.into();
        assert_eq!(msg, "constraint violated for SQUID 2, SQUID 3: x");
    }
}
