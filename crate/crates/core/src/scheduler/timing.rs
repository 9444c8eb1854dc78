use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{PulseStep, Schedule};
use crate::error::{Error, Result};
use crate::params::DeviceParams;

/// Total duration in seconds. Retunes cost nothing.
pub fn schedule_duration(schedule: &Schedule) -> f64 {
    schedule_duration_with_latency(schedule, 0.0)
}

/// Total duration with a fixed cost added per retune.
pub fn schedule_duration_with_latency(schedule: &Schedule, retune_latency: f64) -> f64 {
    schedule
        .pulses()
        .map(|p| match p {
            PulseStep::Retune { .. } => retune_latency,
            other => other.duration(),
        })
        .sum()
}

/// Phase `π / 2^(k-1)` of target `k` (1-based SQUID number) in the standard
/// n-qubit gate.
pub fn standard_theta(k: usize) -> f64 {
    PI / 2f64.powi(k as i32 - 1)
}

/// Standard phases for targets 2..=n.
pub fn standard_thetas(n: usize) -> Vec<f64> {
    (2..=n).map(standard_theta).collect()
}

fn dispersive_sum(params: &DeviceParams, n: usize) -> Result<f64> {
    (2..=n)
        .map(|k| Ok(standard_theta(k) * params.squid(k - 1)?.dispersive_time_per_radian()))
        .sum()
}

fn check_n(params: &DeviceParams, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n must be at least 2, got {n}")));
    }
    params.require(n)
}

/// Closed-form length of the merged n-qubit gate with the standard phases:
/// `π/Ω13 + π/g1 + n π/(2 Ω02) + Σ θ_k Δ_k / g_k²`.
pub fn closed_form_tau(n: usize, params: &DeviceParams) -> Result<f64> {
    check_n(params, n)?;
    let c = params.squid(0)?;
    Ok(PI / c.rabi.omega_13 + PI / c.g + n as f64 * PI / (2.0 * c.rabi.omega_02) + dispersive_sum(params, n)?)
}

/// `(π/g)((22+n)/20 + 10(2^(n-1) - 1)/2^(n-1))`, the merged-gate length for
/// `Δ = Ω = 10 g`.
pub fn uniform_tau_multi(n: usize, g: f64) -> f64 {
    let p = 2f64.powi(n as i32 - 1);
    PI / g * ((22.0 + n as f64) / 20.0 + 10.0 * (p - 1.0) / p)
}

/// `(π/g)(6(n-1)/5 + 10(2^(n-1) - 1)/2^(n-1))`, the decomposed-circuit length
/// for `Δ = Ω = 10 g`.
pub fn uniform_tau_decomposed(n: usize, g: f64) -> f64 {
    let p = 2f64.powi(n as i32 - 1);
    PI / g * (6.0 * (n as f64 - 1.0) / 5.0 + 10.0 * (p - 1.0) / p)
}

fn uniform_coupling(params: &DeviceParams, n: usize) -> Result<f64> {
    let g = params.squid(0)?.g;
    for k in 1..n {
        if params.squid(k)?.g != g {
            return Err(Error::InvalidParameter(
                "decomposed closed form needs the same g on every SQUID".into(),
            ));
        }
    }
    Ok(g)
}

/// Decomposed-circuit length from the uniform-coupling closed form. Only
/// `g` is read from `params`; the form assumes `Δ = Ω = 10 g`.
pub fn closed_form_tau_decomposed(n: usize, params: &DeviceParams) -> Result<f64> {
    check_n(params, n)?;
    Ok(uniform_tau_decomposed(n, uniform_coupling(params, n)?))
}

/// Sum of the decomposed schedule's step durations for the standard phases.
pub fn decomposed_step_sum(n: usize, params: &DeviceParams) -> Result<f64> {
    check_n(params, n)?;
    let c = params.squid(0)?;
    let per_gate = PI / c.rabi.omega_13 + PI / c.g + PI / c.rabi.omega_02;
    Ok((n - 1) as f64 * per_gate + dispersive_sum(params, n)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecomposedTimingReport {
    pub n: usize,
    pub closed_form_s: f64,
    pub step_sum_s: f64,
    /// `(step_sum - closed_form) / closed_form`.
    pub relative_mismatch: f64,
}

/// Compares the closed form against the step sum; disagreement is reported,
/// not corrected.
pub fn decomposed_timing_report(n: usize, params: &DeviceParams) -> Result<DecomposedTimingReport> {
    let closed_form_s = closed_form_tau_decomposed(n, params)?;
    let step_sum_s = decomposed_step_sum(n, params)?;
    Ok(DecomposedTimingReport {
        n,
        closed_form_s,
        step_sum_s,
        relative_mismatch: (step_sum_s - closed_form_s) / closed_form_s,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub n: usize,
    pub tau_multi_s: f64,
    pub tau_decomposed_s: f64,
}

impl TimingRow {
    pub fn gap(&self) -> f64 {
        self.tau_decomposed_s - self.tau_multi_s
    }
}

/// Rows for `n = 2..=n_max`. `params` must describe at least `n_max` SQUIDs
/// with a common `g`.
pub fn emit_timing_curve(params: &DeviceParams, n_max: usize) -> Result<Vec<TimingRow>> {
    if n_max < 2 {
        return Err(Error::InvalidParameter(format!("n_max must be at least 2, got {n_max}")));
    }
    (2..=n_max)
        .map(|n| {
            Ok(TimingRow {
                n,
                tau_multi_s: closed_form_tau(n, params)?,
                tau_decomposed_s: closed_form_tau_decomposed(n, params)?,
            })
        })
        .collect()
}

/// True when the decomposed-minus-multi gap never shrinks from one row to
/// the next.
pub fn gap_is_monotone(rows: &[TimingRow]) -> bool {
    rows.windows(2).all(|w| w[1].gap() >= w[0].gap() - 1e-15 * w[0].tau_decomposed_s.abs())
}

pub fn timing_csv(rows: &[TimingRow]) -> String {
    let mut out = String::from("n,tau_multi_ns,tau_decomposed_ns\n");
    for r in rows {
        out.push_str(&format!("{},{:.6},{:.6}\n", r.n, r.tau_multi_s * 1e9, r.tau_decomposed_s * 1e9));
    }
    out
}
