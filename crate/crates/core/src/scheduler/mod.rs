//! Pulse schedules: the timed protocol primitives, builders for each gate
//! protocol, simulation of a schedule into a propagator, and timing.
//!
//! A [`Schedule`] is an ordered list of [`Step`]s. A step is one protocol
//! step as counted when comparing gate lengths (for example "apply the pulse
//! and then wait for the photon to be emitted"), and it holds one or more
//! [`PulseStep`]s that run back to back.

mod builders;
mod simulate;
mod timing;

pub use builders::*;
pub use simulate::*;
pub use timing::*;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What a SQUID's |2>-|3> transition is tuned to do with the cavity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Resonant,
    Dispersive,
    Decoupled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PulseStep {
    /// Square microwave pulse on `(lower, upper)` levels of one SQUID.
    Microwave {
        squid: usize,
        levels: [usize; 2],
        omega: f64,
        phi: f64,
        duration_s: f64,
    },
    ResonantWait {
        squid: usize,
        g: f64,
        duration_s: f64,
    },
    DispersiveWait {
        squid: usize,
        g: f64,
        delta: f64,
        duration_s: f64,
    },
    /// Members on pairwise-disjoint SQUIDs sharing one duration.
    Simultaneous {
        members: Vec<PulseStep>,
        duration_s: f64,
    },
    /// Instantaneous level-spacing adjustment.
    Retune { squid: usize, role: Role },
}

impl PulseStep {
    pub fn duration(&self) -> f64 {
        match self {
            PulseStep::Microwave { duration_s, .. }
            | PulseStep::ResonantWait { duration_s, .. }
            | PulseStep::DispersiveWait { duration_s, .. }
            | PulseStep::Simultaneous { duration_s, .. } => *duration_s,
            PulseStep::Retune { .. } => 0.0,
        }
    }

    /// SQUIDs touched by this pulse.
    pub fn squids(&self) -> Vec<usize> {
        match self {
            PulseStep::Microwave { squid, .. }
            | PulseStep::ResonantWait { squid, .. }
            | PulseStep::DispersiveWait { squid, .. }
            | PulseStep::Retune { squid, .. } => vec![*squid],
            PulseStep::Simultaneous { members, .. } => members.iter().flat_map(|m| m.squids()).collect(),
        }
    }

    /// Groups `members` into one simultaneous pulse. A single member is
    /// returned unchanged.
    pub fn simultaneous(mut members: Vec<PulseStep>) -> Result<PulseStep> {
        if members.len() == 1 {
            return Ok(members.pop().expect("one member"));
        }
        let step = PulseStep::Simultaneous {
            duration_s: members.first().map(|m| m.duration()).unwrap_or(0.0),
            members,
        };
        step.validate()?;
        Ok(step)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.duration();
        if !(d.is_finite() && d >= 0.0) {
            return Err(Error::InvalidParameter(format!("pulse duration {d} is not valid")));
        }
        if let PulseStep::Simultaneous { members, duration_s } = self {
            if members.is_empty() {
                return Err(Error::InvalidParameter("empty simultaneous group".into()));
            }
            let mut seen = Vec::new();
            for m in members {
                if matches!(m, PulseStep::Simultaneous { .. } | PulseStep::Retune { .. }) {
                    return Err(Error::InvalidParameter(
                        "simultaneous groups hold only pulses and waits".into(),
                    ));
                }
                m.validate()?;
                let squid = m.squids()[0];
                if seen.contains(&squid) {
                    return Err(Error::ConstraintViolation {
                        message: "simultaneous members must address distinct SQUIDs".into(),
                        squids: vec![squid],
                    });
                }
                seen.push(squid);
            }
            let mismatched: Vec<usize> = members
                .iter()
                .filter(|m| !same_duration(m.duration(), *duration_s))
                .map(|m| m.squids()[0])
                .collect();
            if !mismatched.is_empty() {
                return Err(Error::ConstraintViolation {
                    message: format!(
                        "simultaneous members must share the group duration {duration_s:e} s"
                    ),
                    squids: mismatched,
                });
            }
        }
        Ok(())
    }
}

pub(crate) fn same_duration(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub label: String,
    pub pulses: Vec<PulseStep>,
}

impl Step {
    pub fn new(label: impl Into<String>, pulses: Vec<PulseStep>) -> Self {
        Self { label: label.into(), pulses }
    }

    pub fn duration(&self) -> f64 {
        self.pulses.iter().map(PulseStep::duration).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetPhase {
    pub squid: usize,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub name: String,
    pub n_squids: usize,
    /// Control SQUID of a phase gate, if the schedule is one.
    pub control: Option<usize>,
    /// Intended phase per target SQUID.
    pub targets: Vec<TargetPhase>,
    /// Cavity role of each SQUID before the first step.
    pub initial_roles: Vec<Role>,
    pub steps: Vec<Step>,
}

impl Schedule {
    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    /// Appends `other`'s steps; `other`'s initial roles are dropped, so any
    /// role change it needs must be expressed with retune steps.
    pub fn append(&mut self, other: Schedule) {
        self.steps.extend(other.steps);
    }

    pub fn pulses(&self) -> impl Iterator<Item = &PulseStep> {
        self.steps.iter().flat_map(|s| s.pulses.iter())
    }

    pub fn validate(&self) -> Result<()> {
        if self.initial_roles.len() != self.n_squids {
            return Err(Error::InvalidParameter(format!(
                "{} initial roles for {} SQUIDs",
                self.initial_roles.len(),
                self.n_squids
            )));
        }
        for p in self.pulses() {
            p.validate()?;
            if let Some(&s) = p.squids().iter().find(|&&s| s >= self.n_squids) {
                return Err(Error::InvalidParameter(format!(
                    "pulse addresses SQUID {s} in a {}-SQUID schedule",
                    self.n_squids
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Schedule = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }
}
