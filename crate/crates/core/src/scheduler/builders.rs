use std::f64::consts::{FRAC_PI_2, PI, TAU};

use super::{PulseStep, Role, Schedule, Step, TargetPhase};
use crate::error::{Error, Result};
use crate::params::DeviceParams;

fn squid_name(i: usize) -> String {
    format!("SQUID {}", i + 1)
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < TAU) {
        return Err(Error::InvalidTheta(theta));
    }
    Ok(())
}

/// `|1> -> i|3>` on the control, then wait `π/2g` so `i|3>|0> -> |2>|1>`.
fn forward_resonant(params: &DeviceParams, control: usize) -> Result<Vec<PulseStep>> {
    let p = params.squid(control)?;
    let omega = p.rabi.omega_13;
    Ok(vec![
        PulseStep::Microwave {
            squid: control,
            levels: [1, 3],
            omega,
            phi: PI,
            duration_s: FRAC_PI_2 / omega,
        },
        PulseStep::ResonantWait { squid: control, g: p.g, duration_s: FRAC_PI_2 / p.g },
    ])
}

/// Inverse of [`forward_resonant`]: absorb the photon, then `|3> -> i|1>`.
fn backward_resonant(params: &DeviceParams, control: usize) -> Result<Vec<PulseStep>> {
    let mut steps = forward_resonant(params, control)?;
    steps.reverse();
    Ok(steps)
}

/// Control `|2> <-> |0>` swap with phase `phi` (`π/2` parks, `-π/2` restores).
fn control_swap(params: &DeviceParams, control: usize, phi: f64) -> Result<PulseStep> {
    let omega = params.squid(control)?.rabi.omega_02;
    Ok(PulseStep::Microwave { squid: control, levels: [0, 2], omega, phi, duration_s: FRAC_PI_2 / omega })
}

/// Target `|1> <-> |2>` swap with phase `phi` (`-π/2` prepares, `π/2` returns).
fn target_swap(params: &DeviceParams, target: usize, phi: f64) -> Result<PulseStep> {
    let omega = params.squid(target)?.rabi.omega_12;
    Ok(PulseStep::Microwave { squid: target, levels: [1, 2], omega, phi, duration_s: FRAC_PI_2 / omega })
}

fn dispersive_wait(params: &DeviceParams, target: usize, theta: f64) -> Result<PulseStep> {
    let p = params.squid(target)?;
    Ok(PulseStep::DispersiveWait {
        squid: target,
        g: p.g,
        delta: p.delta,
        duration_s: theta * p.dispersive_time_per_radian(),
    })
}

fn validate_gate(params: &DeviceParams, control: usize, targets: &[TargetPhase]) -> Result<usize> {
    if targets.is_empty() {
        return Err(Error::InvalidParameter("a phase gate needs at least one target".into()));
    }
    let mut used = vec![control];
    for t in targets {
        check_theta(t.theta)?;
        if used.contains(&t.squid) {
            return Err(Error::ConstraintViolation {
                message: "control and targets must be distinct SQUIDs".into(),
                squids: vec![t.squid],
            });
        }
        used.push(t.squid);
    }
    let n = used.iter().max().expect("nonempty") + 1;
    params.require(n)?;
    Ok(n)
}

fn initial_roles(n: usize, control: usize) -> Vec<Role> {
    (0..n).map(|i| if i == control { Role::Resonant } else { Role::Dispersive }).collect()
}

/// Control SQUID `control` imprinting `e^{i θ_t}` on each target `t` whose
/// logical state is `|1>` when the control is `|1>`. Targets disperse one
/// after another. With `merged`, each target-return pulse runs together with
/// the next preparation pulse (and the first preparation with the control
/// park), which needs the involved Rabi frequencies to give equal durations.
pub fn build_phase_gate(
    params: &DeviceParams,
    control: usize,
    targets: &[TargetPhase],
    merged: bool,
) -> Result<Schedule> {
    let n = validate_gate(params, control, targets)?;
    let c = squid_name(control);
    let mut steps = vec![Step::new(format!("forward resonant on {c}"), forward_resonant(params, control)?)];

    if merged {
        let mut pending = vec![control_swap(params, control, FRAC_PI_2)?];
        let mut label = format!("park {c}");
        for t in targets {
            let name = squid_name(t.squid);
            pending.push(target_swap(params, t.squid, -FRAC_PI_2)?);
            label.push_str(&format!(" + prepare {name}"));
            steps.push(Step::new(label, vec![PulseStep::simultaneous(pending)?]));
            steps.push(Step::new(
                format!("dispersive phase on {name}"),
                vec![dispersive_wait(params, t.squid, t.theta)?],
            ));
            pending = vec![target_swap(params, t.squid, FRAC_PI_2)?];
            label = format!("return {name}");
        }
        pending.push(control_swap(params, control, -FRAC_PI_2)?);
        label.push_str(&format!(" + restore {c}"));
        steps.push(Step::new(label, vec![PulseStep::simultaneous(pending)?]));
    } else {
        steps.push(Step::new(format!("park {c}"), vec![control_swap(params, control, FRAC_PI_2)?]));
        for t in targets {
            let name = squid_name(t.squid);
            steps.push(Step::new(format!("prepare {name}"), vec![target_swap(params, t.squid, -FRAC_PI_2)?]));
            steps.push(Step::new(
                format!("dispersive phase on {name}"),
                vec![dispersive_wait(params, t.squid, t.theta)?],
            ));
            steps.push(Step::new(format!("return {name}"), vec![target_swap(params, t.squid, FRAC_PI_2)?]));
        }
        steps.push(Step::new(format!("restore {c}"), vec![control_swap(params, control, -FRAC_PI_2)?]));
    }
    steps.push(Step::new(format!("backward resonant on {c}"), backward_resonant(params, control)?));

    Ok(Schedule {
        name: format!("{}-qubit phase gate", targets.len() + 1),
        n_squids: n,
        control: Some(control),
        targets: targets.to_vec(),
        initial_roles: initial_roles(n, control),
        steps,
    })
}

fn sequential_targets(thetas: &[f64]) -> Vec<TargetPhase> {
    thetas.iter().enumerate().map(|(k, &theta)| TargetPhase { squid: k + 1, theta }).collect()
}

/// Three-qubit gate with SQUID 1 controlling SQUIDs 2 and 3: ten steps, or
/// seven when `merged`.
pub fn build_three_qubit_gate(params: &DeviceParams, theta2: f64, theta3: f64, merged: bool) -> Result<Schedule> {
    let mut s = build_phase_gate(params, 0, &sequential_targets(&[theta2, theta3]), merged)?;
    s.name = "three-qubit phase gate".into();
    Ok(s)
}

/// `n = thetas.len() + 1` qubit gate with SQUID 1 as control, merged to
/// `2n + 1` steps.
pub fn build_n_qubit_gate(params: &DeviceParams, thetas: &[f64]) -> Result<Schedule> {
    if thetas.is_empty() {
        return Err(Error::InvalidParameter("an n-qubit gate needs n >= 2".into()));
    }
    build_phase_gate(params, 0, &sequential_targets(thetas), true)
}

pub fn build_two_qubit_gate(params: &DeviceParams, theta: f64) -> Result<Schedule> {
    let mut s = build_phase_gate(params, 0, &sequential_targets(&[theta]), true)?;
    s.name = "two-qubit phase gate".into();
    Ok(s)
}

/// The same phases realized as a chain of two-qubit gates sharing SQUID 1,
/// five steps each.
pub fn build_decomposed_gate(params: &DeviceParams, thetas: &[f64]) -> Result<Schedule> {
    let targets = sequential_targets(thetas);
    let n = validate_gate(params, 0, &targets)?;
    let mut out = Schedule {
        name: format!("decomposed {n}-qubit phase gate"),
        n_squids: n,
        control: Some(0),
        targets: targets.clone(),
        initial_roles: initial_roles(n, 0),
        steps: Vec::new(),
    };
    for t in &targets {
        out.append(build_phase_gate(params, 0, std::slice::from_ref(t), true)?);
    }
    Ok(out)
}

/// Five-step variant with every target dispersing at once: forward
/// resonant, park + prepare all, common dispersive wait, return all +
/// restore, backward resonant.
fn build_parallel_gate(params: &DeviceParams, targets: &[TargetPhase], name: &str) -> Result<Schedule> {
    let n = validate_gate(params, 0, targets)?;
    let c = squid_name(0);

    let durations: Vec<f64> = targets
        .iter()
        .map(|t| Ok(t.theta * params.squid(t.squid)?.dispersive_time_per_radian()))
        .collect::<Result<_>>()?;
    let reference = durations[0];
    let offenders: Vec<usize> = targets
        .iter()
        .zip(&durations)
        .filter(|(_, &d)| (d - reference).abs() > 1e-9 * reference.abs())
        .map(|(t, _)| t.squid)
        .collect();
    if !offenders.is_empty() {
        return Err(Error::ConstraintViolation {
            message: format!(
                "dispersive durations theta*delta/g^2 must match {} ({reference:e} s)",
                squid_name(targets[0].squid)
            ),
            squids: offenders,
        });
    }

    let mut prepare = vec![control_swap(params, 0, FRAC_PI_2)?];
    let mut disperse = Vec::new();
    let mut ret = Vec::new();
    for t in targets {
        prepare.push(target_swap(params, t.squid, -FRAC_PI_2)?);
        let mut wait = dispersive_wait(params, t.squid, t.theta)?;
        if let PulseStep::DispersiveWait { duration_s, .. } = &mut wait {
            *duration_s = reference;
        }
        disperse.push(wait);
        ret.push(target_swap(params, t.squid, FRAC_PI_2)?);
    }
    ret.push(control_swap(params, 0, -FRAC_PI_2)?);

    Ok(Schedule {
        name: name.into(),
        n_squids: n,
        control: Some(0),
        targets: targets.to_vec(),
        initial_roles: initial_roles(n, 0),
        steps: vec![
            Step::new(format!("forward resonant on {c}"), forward_resonant(params, 0)?),
            Step::new(format!("park {c} + prepare targets"), vec![PulseStep::simultaneous(prepare)?]),
            Step::new("dispersive phase on all targets", vec![PulseStep::simultaneous(disperse)?]),
            Step::new(format!("return targets + restore {c}"), vec![PulseStep::simultaneous(ret)?]),
            Step::new(format!("backward resonant on {c}"), backward_resonant(params, 0)?),
        ],
    })
}

/// Phase `π` on every one of the `n - 1` targets; needs `delta/g^2` equal
/// across targets.
pub fn build_ntcp_gate(params: &DeviceParams, n: usize) -> Result<Schedule> {
    if n < 2 {
        return Err(Error::InvalidParameter("an NTCP gate needs n >= 2".into()));
    }
    let targets = sequential_targets(&vec![PI; n - 1]);
    build_parallel_gate(params, &targets, &format!("{n}-qubit NTCP gate"))
}

/// Distinct phases with all targets dispersing at once; needs
/// `theta_t * delta_t / g_t^2` equal across targets.
pub fn build_simultaneous_multiphase_gate(params: &DeviceParams, thetas: &[f64]) -> Result<Schedule> {
    if thetas.is_empty() {
        return Err(Error::InvalidParameter("a multiphase gate needs n >= 2".into()));
    }
    let targets = sequential_targets(thetas);
    build_parallel_gate(params, &targets, &format!("{}-qubit simultaneous multiphase gate", thetas.len() + 1))
}

/// Hadamard on one SQUID through auxiliary level |3>:
/// `|1> -> -|3>`, then a `π/4` rotation on `|0>-|3>`, then `|3> -> |1>`.
pub fn build_hadamard(params: &DeviceParams, squid: usize) -> Result<Schedule> {
    let p = params.squid(squid)?;
    let flip = PulseStep::Microwave {
        squid,
        levels: [1, 3],
        omega: p.rabi.omega_13,
        phi: FRAC_PI_2,
        duration_s: FRAC_PI_2 / p.rabi.omega_13,
    };
    let mix = PulseStep::Microwave {
        squid,
        levels: [0, 3],
        omega: p.rabi.omega_03,
        phi: -FRAC_PI_2,
        duration_s: std::f64::consts::FRAC_PI_4 / p.rabi.omega_03,
    };
    let name = squid_name(squid);
    let n = squid + 1;
    Ok(Schedule {
        name: format!("Hadamard on {name}"),
        n_squids: n,
        control: None,
        targets: Vec::new(),
        initial_roles: vec![Role::Decoupled; n],
        steps: vec![
            Step::new(format!("|1> -> -|3> on {name}"), vec![flip.clone()]),
            Step::new(format!("mix |0>,|3> on {name}"), vec![mix]),
            Step::new(format!("|3> -> |1> on {name}"), vec![flip]),
        ],
    })
}

fn retune(label: &str, changes: &[(usize, Role)]) -> Step {
    Step::new(
        label,
        changes.iter().map(|&(squid, role)| PulseStep::Retune { squid, role }).collect(),
    )
}

/// Three-qubit QFT: H on SQUID 3; SQUID 3 retuned into resonance controls a
/// `π/2` phase on SQUID 2; H on SQUID 2; SQUID 3 detuned again and SQUID 1
/// controls `(π/2, π/4)` on SQUIDs 2 and 3; H on SQUID 1. SQUID 1 is
/// decoupled while SQUID 3 holds the resonant role.
pub fn build_qft3(params: &DeviceParams) -> Result<Schedule> {
    params.require(3)?;
    let mut qft = Schedule {
        name: "three-qubit QFT".into(),
        n_squids: 3,
        control: None,
        targets: Vec::new(),
        initial_roles: initial_roles(3, 0),
        steps: Vec::new(),
    };
    qft.append(build_hadamard(params, 2)?);
    qft.steps.push(retune(
        "retune SQUID 3 into resonance",
        &[(0, Role::Decoupled), (2, Role::Resonant)],
    ));
    qft.append(build_phase_gate(params, 2, &[TargetPhase { squid: 1, theta: FRAC_PI_2 }], true)?);
    qft.append(build_hadamard(params, 1)?);
    qft.steps.push(retune(
        "retune SQUID 3 out of resonance",
        &[(2, Role::Dispersive), (0, Role::Resonant)],
    ));
    qft.append(build_three_qubit_gate(params, FRAC_PI_2, std::f64::consts::FRAC_PI_4, true)?);
    qft.append(build_hadamard(params, 0)?);
    Ok(qft)
}
