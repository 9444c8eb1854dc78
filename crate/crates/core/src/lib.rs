//! Small-Hilbert-space simulator for cavity-mediated multiqubit phase gates
//! on four-level SQUIDs.
//!
//! The crate builds timed pulse schedules for each gate protocol, propagates
//! them through closed-form propagators of the interaction Hamiltonians, and
//! checks the resulting logical unitaries, phases and durations. A separate
//! eigensolver gives the flux-tunable level structure of a single rf-SQUID.
//!
//! Units: `ħ = 1`, frequencies are angular (s^-1), times are seconds. The
//! [`flux_levels`] module is the exception and works in SI with `ħ` explicit.

pub mod dynamics;
pub mod error;
pub mod flux_levels;
pub mod params;
pub mod scheduler;
pub mod state_space;
pub mod verification;

pub use error::{Error, Result};
pub use params::{DeviceParams, RabiFrequencies, SquidParams};
pub use scheduler::{PulseStep, Role, Schedule, SimulationMode, Step, TargetPhase};
pub use state_space::{BasisLabel, DenseOperator, LogicalMap, SpaceDescriptor, StateVector, C64};
