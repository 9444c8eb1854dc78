//! Gate-quality checks: ideal unitaries, truth tables, fidelity reports,
//! the dispersive-approximation error and the three-qubit Fourier check.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dynamics::{jc_detuned_exact, peak_upper_level_population};
use crate::error::{Error, Result};
use crate::scheduler::{simulate_state, Schedule, SimulationMode, TargetPhase};
use crate::state_space::{basis_state, BasisLabel, LogicalMap, SpaceDescriptor, C64, ONE, ZERO};

/// Rows whose leakage exceeds this are flagged in truth tables.
pub const LEAKAGE_FLAG: f64 = 1e-8;

/// Wraps to `[0, 2π)`, snapping values within `1e-9` of `2π` to zero.
pub fn wrap_phase(phase: f64) -> f64 {
    let p = phase.rem_euclid(TAU);
    if TAU - p < 1e-9 {
        0.0
    } else {
        // -0.0 comes back from rem_euclid unchanged
        p + 0.0
    }
}

fn bits(k: usize, n: usize) -> String {
    (0..n).map(|s| if (k >> (n - 1 - s)) & 1 == 1 { '1' } else { '0' }).collect()
}

/// Diagonal phase gate on `n` qubits where `control` (0-based, qubit 0 is
/// the most significant bit) adds `theta` to each target it finds in `|1>`.
pub fn ideal_controlled_phases(n: usize, control: usize, targets: &[TargetPhase]) -> Result<DMatrix<C64>> {
    if n == 0 || control >= n || targets.iter().any(|t| t.squid >= n || t.squid == control) {
        return Err(Error::InvalidParameter("control or target outside the register".into()));
    }
    let d = 1usize << n;
    let bit = |k: usize, q: usize| (k >> (n - 1 - q)) & 1 == 1;
    let mut m = DMatrix::from_element(d, d, ZERO);
    for k in 0..d {
        let phase: f64 = if bit(k, control) {
            targets.iter().filter(|t| bit(k, t.squid)).map(|t| t.theta).sum()
        } else {
            0.0
        };
        m[(k, k)] = C64::from_polar(1.0, phase);
    }
    Ok(m)
}

/// Phase gate with qubit 1 controlling qubits `2..=n`, `thetas[t]` for
/// qubit `t + 2`.
pub fn ideal_phase_gate(n: usize, thetas: &[f64]) -> Result<DMatrix<C64>> {
    if n < 2 || thetas.len() != n - 1 {
        return Err(Error::InvalidParameter(format!(
            "{n}-qubit phase gate needs {} phases, got {}",
            n.saturating_sub(1),
            thetas.len()
        )));
    }
    let targets: Vec<TargetPhase> =
        thetas.iter().enumerate().map(|(i, &theta)| TargetPhase { squid: i + 1, theta }).collect();
    ideal_controlled_phases(n, 0, &targets)
}

/// Ideal logical unitary of a phase-gate schedule.
pub fn ideal_for_schedule(schedule: &Schedule) -> Result<DMatrix<C64>> {
    let control = schedule
        .control
        .ok_or_else(|| Error::InvalidParameter(format!("\"{}\" is not a controlled-phase gate", schedule.name)))?;
    ideal_controlled_phases(schedule.n_squids, control, &schedule.targets)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Amplitude {
    pub label: String,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthRow {
    /// Logical input, SQUID 1 first.
    pub input: String,
    /// Phase of the output on the input state, relative to the `|0...0>` row.
    pub phase: f64,
    /// Population returned to the input state.
    pub fidelity: f64,
    /// Population outside the computational subspace with cavity vacuum.
    pub leakage: f64,
    pub vacuum_population: f64,
    pub flagged: bool,
    /// Output amplitudes above `1e-6` in magnitude.
    pub output: Vec<Amplitude>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthTable {
    pub gate: String,
    pub mode: SimulationMode,
    pub rows: Vec<TruthRow>,
}

impl TruthTable {
    pub fn phases(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.phase).collect()
    }

    pub fn max_leakage(&self) -> f64 {
        self.rows.iter().map(|r| r.leakage).fold(0.0, f64::max)
    }

    pub fn to_text(&self) -> String {
        let n = self.rows.first().map(|r| r.input.len()).unwrap_or(0);
        let width = n.max(5);
        let mut out = format!("{} ({})\n", self.gate, self.mode);
        out.push_str(&format!(
            "{:<width$}  {:>10}  {:>8}  {:>12}  {:>12}  {:>12}\n",
            "input", "phase/pi", "phase", "return", "leakage", "vacuum"
        ));
        for r in &self.rows {
            out.push_str(&format!(
                "{:<width$}  {:>10.6}  {:>8.5}  {:>12.3e}  {:>12.3e}  {:>12.10}{}\n",
                r.input,
                r.phase / PI,
                r.phase,
                r.fidelity,
                r.leakage,
                r.vacuum_population,
                if r.flagged { "  LEAK" } else { "" }
            ));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Simulates every computational input of `schedule` (cavity in vacuum).
pub fn truth_table(schedule: &Schedule, space: SpaceDescriptor, mode: SimulationMode) -> Result<TruthTable> {
    let n = space.n_squids();
    let map = LogicalMap::standard(n);
    let logical: Vec<usize> = (0..1usize << n).map(|k| space.index_of(&map.label(k))).collect::<Result<_>>()?;
    let mut raw = Vec::with_capacity(logical.len());
    for (k, &idx) in logical.iter().enumerate() {
        let input = basis_state(space, &map.label(k))?;
        let out = simulate_state(schedule, space, mode, &input)?;
        let amps = out.amplitudes();
        let in_subspace: f64 = logical.iter().map(|&i| amps[i].norm_sqr()).sum();
        let output = out
            .support(1e-6)
            .into_iter()
            .map(|(label, a)| Amplitude { label: label.to_string(), re: a.re, im: a.im })
            .collect();
        raw.push((amps[idx], (1.0 - in_subspace).max(0.0), out.cavity_population(0)?, output));
    }
    let reference = raw[0].0.arg();
    let rows = raw
        .into_iter()
        .enumerate()
        .map(|(k, (a, leakage, vacuum_population, output))| TruthRow {
            input: bits(k, n),
            phase: wrap_phase(a.arg() - reference),
            fidelity: a.norm_sqr(),
            leakage,
            vacuum_population,
            flagged: leakage > LEAKAGE_FLAG,
            output,
        })
        .collect();
    Ok(TruthTable { gate: schedule.name.clone(), mode, rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseEntry {
    pub input: String,
    pub phase: f64,
    pub ideal: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub gate: String,
    pub logical_dim: usize,
    /// `|Tr(U_ideal† U)| / d`.
    pub fidelity: f64,
    /// Largest `|e^{-iα} U - U_ideal|` entry after global-phase alignment.
    pub max_deviation: f64,
    /// Largest population any input loses from the logical subspace.
    pub leakage: f64,
    pub phases: Vec<PhaseEntry>,
}

impl FidelityReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn trace_overlap(ideal: &DMatrix<C64>, actual: &DMatrix<C64>) -> C64 {
    ideal.iter().zip(actual.iter()).map(|(a, b)| a.conj() * b).sum()
}

/// Compares a logical-subspace restriction against the ideal gate.
pub fn gate_fidelity(name: &str, actual: &DMatrix<C64>, ideal: &DMatrix<C64>) -> Result<FidelityReport> {
    if actual.shape() != ideal.shape() || !actual.is_square() {
        return Err(Error::DimensionMismatch { expected: ideal.nrows(), found: actual.nrows() });
    }
    let d = actual.nrows();
    let overlap = trace_overlap(ideal, actual);
    let align = if overlap.norm() > 0.0 { overlap.conj() / overlap.norm() } else { ONE };
    let max_deviation = actual
        .iter()
        .zip(ideal.iter())
        .map(|(a, b)| (a * align - b).norm())
        .fold(0.0, f64::max);
    let leakage = (0..d)
        .map(|c| (1.0 - actual.column(c).norm_squared()).max(0.0))
        .fold(0.0, f64::max);
    let n = d.trailing_zeros() as usize;
    let (ref_a, ref_i) = (actual[(0, 0)].arg(), ideal[(0, 0)].arg());
    let phases = (0..d)
        .map(|k| PhaseEntry {
            input: bits(k, n),
            phase: wrap_phase(actual[(k, k)].arg() - ref_a),
            ideal: wrap_phase(ideal[(k, k)].arg() - ref_i),
        })
        .collect();
    Ok(FidelityReport {
        gate: name.to_string(),
        logical_dim: d,
        fidelity: overlap.norm() / d as f64,
        max_deviation,
        leakage,
        phases,
    })
}

/// Logical block of the schedule's propagator, one evolved column per
/// computational input (cavity in vacuum). Cheaper than restricting the
/// full [`simulate`](crate::scheduler::simulate) result once the full space gets large.
pub fn logical_propagator(schedule: &Schedule, space: SpaceDescriptor, mode: SimulationMode) -> Result<DMatrix<C64>> {
    let map = LogicalMap::standard(space.n_squids());
    let d = space.logical_dim();
    let idx: Vec<usize> = (0..d).map(|k| space.index_of(&map.label(k))).collect::<Result<_>>()?;
    let mut u = DMatrix::from_element(d, d, ZERO);
    for c in 0..d {
        let out = simulate_state(schedule, space, mode, &basis_state(space, &map.label(c))?)?;
        for (r, &i) in idx.iter().enumerate() {
            u[(r, c)] = out.amplitudes()[i];
        }
    }
    Ok(u)
}

/// Simulates a phase-gate schedule and compares it with its ideal gate.
pub fn verify_schedule(schedule: &Schedule, space: SpaceDescriptor, mode: SimulationMode) -> Result<FidelityReport> {
    let restricted = logical_propagator(schedule, space, mode)?;
    gate_fidelity(&schedule.name, &restricted, &ideal_for_schedule(schedule)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersiveValidity {
    pub g: f64,
    pub delta: f64,
    pub theta: f64,
    /// Peak `|3>` occupation under the exact detuned exchange.
    pub p3_exact: f64,
    /// `1 / (1 + Δ²/4g²)`.
    pub p3_formula: f64,
    /// Phase picked up by `|2>|1>` after `θΔ/g²`, minus `θ`, wrapped to
    /// `[-π, π)` and taken in magnitude.
    pub phase_error: f64,
    /// Population missing from `|2>|1>` at that time.
    pub population_error: f64,
}

pub fn p3_formula(g: f64, delta: f64) -> f64 {
    1.0 / (1.0 + delta * delta / (4.0 * g * g))
}

pub fn dispersive_validity_report(g: f64, delta: f64, theta: f64) -> Result<DispersiveValidity> {
    if !(g > 0.0 && delta > 0.0 && g.is_finite() && delta.is_finite() && theta.is_finite()) {
        return Err(Error::InvalidParameter("g and delta must be positive".into()));
    }
    let space = SpaceDescriptor::new(1, 2)?;
    let idx = space.index_of(&BasisLabel::new(vec![2], 1))?;
    let t = theta * delta / (g * g);
    let mut v = DVector::from_element(space.total_dim(), ZERO);
    v[idx] = ONE;
    jc_detuned_exact(space, 0, g, delta, t)?.apply_to_vector(&mut v);
    let a = v[idx];
    let diff = (a.arg() - theta + PI).rem_euclid(TAU) - PI;
    Ok(DispersiveValidity {
        g,
        delta,
        theta,
        p3_exact: peak_upper_level_population(g, delta)?,
        p3_formula: p3_formula(g, delta),
        phase_error: diff.abs(),
        population_error: 1.0 - a.norm_sqr(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QftPermutation {
    /// Compared with `F` directly.
    Identity,
    /// Compared with `F R`: qubit order reversed on the input side.
    ReverseInput,
    /// Compared with `R F`: qubit order reversed on the output side.
    ReverseOutput,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QftReport {
    pub fidelity_vs_dft: f64,
    pub permutation: QftPermutation,
    /// Fidelity against every candidate, in declaration order.
    pub candidates: Vec<(QftPermutation, f64)>,
}

/// `F_jk = e^{2πijk/d} / √d`.
pub fn dft_matrix(d: usize) -> DMatrix<C64> {
    let norm = 1.0 / (d as f64).sqrt();
    DMatrix::from_fn(d, d, |j, k| C64::from_polar(norm, TAU * ((j * k) % d) as f64 / d as f64))
}

/// Permutation reversing the order of `n` qubits.
pub fn qubit_reversal(n: usize) -> DMatrix<C64> {
    let d = 1usize << n;
    let rev = |k: usize| (0..n).fold(0, |acc, b| acc | (((k >> b) & 1) << (n - 1 - b)));
    DMatrix::from_fn(d, d, |r, c| if r == rev(c) { ONE } else { ZERO })
}

/// Best match of `u` against the discrete Fourier transform, with or without
/// qubit reversal on either side.
pub fn qft_check(u: &DMatrix<C64>) -> Result<QftReport> {
    let d = u.nrows();
    if !u.is_square() || d < 2 || !d.is_power_of_two() {
        return Err(Error::DimensionMismatch { expected: 8, found: d });
    }
    let n = d.trailing_zeros() as usize;
    let f = dft_matrix(d);
    let r = qubit_reversal(n);
    let candidates: Vec<(QftPermutation, f64)> = [
        (QftPermutation::Identity, f.clone()),
        (QftPermutation::ReverseInput, &f * &r),
        (QftPermutation::ReverseOutput, &r * &f),
    ]
    .into_iter()
    .map(|(p, c)| (p, trace_overlap(&c, u).norm() / d as f64))
    .collect();
    let (permutation, fidelity_vs_dft) = candidates
        .iter()
        .copied()
        .fold((QftPermutation::Identity, f64::NEG_INFINITY), |best, c| if c.1 > best.1 + 1e-12 { c } else { best });
    Ok(QftReport { fidelity_vs_dft, permutation, candidates })
}
