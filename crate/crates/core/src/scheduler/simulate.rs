use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{PulseStep, Role, Schedule};
use crate::dynamics::{self, expm_oracle, truncation_leak, Propagator};
use crate::error::{Error, Result};
use crate::state_space::{DenseOperator, SpaceDescriptor, StateVector, C64};

/// Population in a truncation-coupled state above which state simulation
/// refuses to continue.
pub const LEAK_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimulationMode {
    /// Closed-form propagators, effective dispersive Hamiltonian.
    #[default]
    Analytic,
    /// Dispersive waits evolve under the full detuned exchange.
    ExactDispersive,
}

impl std::fmt::Display for SimulationMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SimulationMode::Analytic => "analytic",
            SimulationMode::ExactDispersive => "exact-dispersive",
        })
    }
}

enum Action {
    Sparse(Propagator),
    Dense(DenseOperator),
}

impl Action {
    fn apply_matrix(&self, m: &mut DMatrix<C64>) {
        match self {
            Action::Sparse(p) => p.apply_to_matrix(m),
            Action::Dense(d) => *m = d.matrix() * &*m,
        }
    }

    fn apply_state(&self, s: &mut StateVector) {
        match self {
            Action::Sparse(p) => p.apply_to_vector(s.amplitudes_mut()),
            Action::Dense(d) => *s.amplitudes_mut() = d.matrix() * s.amplitudes(),
        }
    }
}

/// Tracks cavity roles while walking a schedule.
struct RoleTracker {
    roles: Vec<Role>,
}

impl RoleTracker {
    fn require(&self, squid: usize, wanted: Role, what: &str) -> Result<()> {
        let have = self.roles[squid];
        if have != wanted {
            return Err(Error::RoleConflict(format!(
                "{what} on SQUID {} needs role {wanted:?}, it is {have:?}",
                squid + 1
            )));
        }
        let resonant: Vec<usize> = (0..self.roles.len()).filter(|&i| self.roles[i] == Role::Resonant).collect();
        if resonant.len() > 1 {
            return Err(Error::RoleConflict(format!(
                "SQUIDs {:?} are resonant with the cavity at the same time",
                resonant.iter().map(|i| i + 1).collect::<Vec<_>>()
            )));
        }
        Ok(())
    }
}

fn single_action(pulse: &PulseStep, space: SpaceDescriptor, mode: SimulationMode, roles: &RoleTracker) -> Result<Action> {
    let p = match *pulse {
        PulseStep::Microwave { squid, levels, omega, phi, duration_s } => {
            dynamics::microwave(space, squid, (levels[0], levels[1]), omega, phi, duration_s)?
        }
        PulseStep::ResonantWait { squid, g, duration_s } => {
            roles.require(squid, Role::Resonant, "resonant wait")?;
            dynamics::jc_resonant(space, squid, g, duration_s)?
        }
        PulseStep::DispersiveWait { squid, g, delta, duration_s } => {
            roles.require(squid, Role::Dispersive, "dispersive wait")?;
            match mode {
                SimulationMode::Analytic => dynamics::dispersive(space, squid, g, delta, duration_s)?,
                SimulationMode::ExactDispersive => dynamics::jc_detuned_exact(space, squid, g, delta, duration_s)?,
            }
        }
        PulseStep::Simultaneous { .. } | PulseStep::Retune { .. } => {
            unreachable!("handled by the caller")
        }
    };
    Ok(Action::Sparse(p))
}

/// SQUIDs whose state must be checked for truncation leaks before `pulse`.
fn leak_sensitive(pulse: &PulseStep, mode: SimulationMode) -> Vec<usize> {
    match pulse {
        PulseStep::ResonantWait { squid, .. } => vec![*squid],
        PulseStep::DispersiveWait { squid, .. } if mode == SimulationMode::ExactDispersive => vec![*squid],
        PulseStep::Simultaneous { members, .. } => members.iter().flat_map(|m| leak_sensitive(m, mode)).collect(),
        _ => Vec::new(),
    }
}

/// Propagators for one pulse, in application order, plus the SQUIDs whose
/// truncation leak must be checked beforehand. Updates `roles` on retunes.
fn pulse_actions(
    pulse: &PulseStep,
    space: SpaceDescriptor,
    mode: SimulationMode,
    roles: &mut RoleTracker,
) -> Result<Vec<Action>> {
    match pulse {
        PulseStep::Retune { squid, role } => {
            roles.roles[*squid] = *role;
            Ok(Vec::new())
        }
        PulseStep::Simultaneous { members, duration_s } => {
            let cavity: Vec<&PulseStep> = members
                .iter()
                .filter(|m| matches!(m, PulseStep::ResonantWait { .. } | PulseStep::DispersiveWait { .. }))
                .collect();
            if cavity.len() > 1 && cavity.iter().any(|m| matches!(m, PulseStep::ResonantWait { .. })) {
                return Err(Error::RoleConflict(
                    "a resonant exchange cannot overlap other cavity interactions".into(),
                ));
            }
            let mut actions = Vec::new();
            let joint_exact = mode == SimulationMode::ExactDispersive && cavity.len() > 1;
            if joint_exact {
                // detuned exchanges sharing the cavity do not commute
                let mut h = DenseOperator::zeros(space);
                for m in &cavity {
                    if let PulseStep::DispersiveWait { squid, g, delta, .. } = **m {
                        roles.require(squid, Role::Dispersive, "dispersive wait")?;
                        h = h.add(&dynamics::detuned_jc_hamiltonian(space, squid, g, delta)?)?;
                    }
                }
                actions.push(Action::Dense(expm_oracle(&h, *duration_s)?));
            }
            for m in members {
                if joint_exact && matches!(m, PulseStep::DispersiveWait { .. }) {
                    continue;
                }
                actions.push(single_action(m, space, mode, roles)?);
            }
            Ok(actions)
        }
        other => Ok(vec![single_action(other, space, mode, roles)?]),
    }
}

fn prepare(schedule: &Schedule, space: SpaceDescriptor) -> Result<RoleTracker> {
    schedule.validate()?;
    if space.n_squids() < schedule.n_squids {
        return Err(Error::InvalidSpace(format!(
            "schedule needs {} SQUIDs, space has {}",
            schedule.n_squids,
            space.n_squids()
        )));
    }
    let mut roles = schedule.initial_roles.clone();
    roles.resize(space.n_squids(), Role::Decoupled);
    Ok(RoleTracker { roles })
}

/// Full-space propagator of `schedule`, the ordered product of its pulse
/// propagators.
pub fn simulate(schedule: &Schedule, space: SpaceDescriptor, mode: SimulationMode) -> Result<DenseOperator> {
    let mut roles = prepare(schedule, space)?;
    let mut u = DenseOperator::identity(space);
    for pulse in schedule.pulses() {
        for action in pulse_actions(pulse, space, mode, &mut roles)? {
            action.apply_matrix(u.matrix_mut());
        }
    }
    Ok(u)
}

#[derive(Debug, Clone)]
pub struct TraceEntry {
    pub label: String,
    pub state: StateVector,
}

/// State after every step of `schedule`, starting from `initial`. Fails if a
/// resonant or exact detuned exchange would act on population in a state
/// the cavity truncation cannot represent.
pub fn simulate_trace(
    schedule: &Schedule,
    space: SpaceDescriptor,
    mode: SimulationMode,
    initial: &StateVector,
) -> Result<Vec<TraceEntry>> {
    if initial.space() != space {
        return Err(Error::SpaceMismatch);
    }
    let mut roles = prepare(schedule, space)?;
    let mut state = initial.clone();
    let mut trace = Vec::with_capacity(schedule.steps.len());
    for step in &schedule.steps {
        for pulse in &step.pulses {
            for squid in leak_sensitive(pulse, mode) {
                let population = truncation_leak(&state, squid);
                if population > LEAK_TOLERANCE {
                    return Err(Error::TruncationLeak { squid, population });
                }
            }
            for action in pulse_actions(pulse, space, mode, &mut roles)? {
                action.apply_state(&mut state);
            }
        }
        trace.push(TraceEntry { label: step.label.clone(), state: state.clone() });
    }
    Ok(trace)
}

pub fn simulate_state(
    schedule: &Schedule,
    space: SpaceDescriptor,
    mode: SimulationMode,
    initial: &StateVector,
) -> Result<StateVector> {
    let trace = simulate_trace(schedule, space, mode, initial)?;
    Ok(trace.last().map(|e| e.state.clone()).unwrap_or_else(|| initial.clone()))
}
