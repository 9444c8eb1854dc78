//! Device parameters for the SQUID array and cavity.
//!
//! Everything is an angular frequency in s^-1 with hbar = 1, so a coupling
//! `g` rotates the resonant block by `g * t` radians after `t` seconds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reference coupling strength, `3e9 s^-1`.
pub const REFERENCE_COUPLING: f64 = 3.0e9;

/// Below this `delta / g` ratio the effective dispersive Hamiltonian is
/// flagged as unreliable (`p3 > 0.14`).
pub const DISPERSIVE_VALIDITY_RATIO: f64 = 5.0;

/// Rabi frequencies for the four microwave-addressed transitions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RabiFrequencies {
    pub omega_02: f64,
    pub omega_12: f64,
    pub omega_13: f64,
    pub omega_03: f64,
}

impl RabiFrequencies {
    pub fn uniform(omega: f64) -> Self {
        Self { omega_02: omega, omega_12: omega, omega_13: omega, omega_03: omega }
    }

    /// Rabi frequency of the `(lower, upper)` transition, if it is driven.
    pub fn for_pair(&self, pair: (usize, usize)) -> Option<f64> {
        match pair {
            (0, 2) => Some(self.omega_02),
            (1, 2) => Some(self.omega_12),
            (1, 3) => Some(self.omega_13),
            (0, 3) => Some(self.omega_03),
            _ => None,
        }
    }

    fn scaled(&self, factor: f64) -> Self {
        Self {
            omega_02: self.omega_02 * factor,
            omega_12: self.omega_12 * factor,
            omega_13: self.omega_13 * factor,
            omega_03: self.omega_03 * factor,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquidParams {
    /// Coupling of the |2>-|3> transition to the cavity.
    pub g: f64,
    /// `omega_c - omega_32` for this SQUID when it is detuned from the cavity.
    pub delta: f64,
    pub rabi: RabiFrequencies,
}

impl SquidParams {
    /// `delta / g^2`, the dispersive wait per radian of phase.
    pub fn dispersive_time_per_radian(&self) -> f64 {
        self.delta / (self.g * self.g)
    }

    pub fn dispersive_valid(&self) -> bool {
        self.delta >= DISPERSIVE_VALIDITY_RATIO * self.g
    }

    fn validate(&self, index: usize) -> Result<()> {
        let r = &self.rabi;
        let all = [
            ("g", self.g),
            ("delta", self.delta),
            ("omega_02", r.omega_02),
            ("omega_12", r.omega_12),
            ("omega_13", r.omega_13),
            ("omega_03", r.omega_03),
        ];
        for (name, v) in all {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "SQUID {index}: {name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviceParams {
    squids: Vec<SquidParams>,
    /// Cavity angular frequency; informational only.
    pub cavity_frequency: Option<f64>,
}

impl DeviceParams {
    pub fn new(squids: Vec<SquidParams>) -> Result<Self> {
        if squids.is_empty() {
            return Err(Error::InvalidParameter("no SQUIDs given".into()));
        }
        for (i, s) in squids.iter().enumerate() {
            s.validate(i)?;
        }
        Ok(Self { squids, cavity_frequency: None })
    }

    /// `n` identical SQUIDs with `delta = delta_over_g * g` and every Rabi
    /// frequency equal to `omega_over_g * g`.
    pub fn uniform(n: usize, g: f64, delta_over_g: f64, omega_over_g: f64) -> Result<Self> {
        let s = SquidParams {
            g,
            delta: delta_over_g * g,
            rabi: RabiFrequencies::uniform(omega_over_g * g),
        };
        Self::new(vec![s; n])
    }

    /// `g = 3e9 s^-1`, `delta = 10 g`, `Omega = 10 g` for every SQUID.
    pub fn reference(n: usize) -> Self {
        Self::uniform(n, REFERENCE_COUPLING, 10.0, 10.0).expect("reference parameters are valid")
    }

    pub fn len(&self) -> usize {
        self.squids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.squids.is_empty()
    }

    pub fn squids(&self) -> &[SquidParams] {
        &self.squids
    }

    pub fn squid(&self, index: usize) -> Result<&SquidParams> {
        self.squids.get(index).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "no parameters for SQUID {index} ({} configured)",
                self.squids.len()
            ))
        })
    }

    pub fn squid_mut(&mut self, index: usize) -> Option<&mut SquidParams> {
        self.squids.get_mut(index)
    }

    /// Every Rabi frequency multiplied by `factor`.
    pub fn with_scaled_rabi(&self, factor: f64) -> Self {
        let squids = self
            .squids
            .iter()
            .map(|s| SquidParams { rabi: s.rabi.scaled(factor), ..*s })
            .collect();
        Self { squids, cavity_frequency: self.cavity_frequency }
    }

    pub fn require(&self, n: usize) -> Result<()> {
        if self.squids.len() < n {
            return Err(Error::InvalidParameter(format!(
                "{n} SQUIDs needed, parameters describe {}",
                self.squids.len()
            )));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: DeviceParamsFile = serde_json::from_str(text)?;
        file.try_into()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&DeviceParamsFile::from(self))?)
    }
}

/// On-disk layout: one array per quantity, indexed by SQUID.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceParamsFile {
    /// Always `"s^-1"`.
    pub units: String,
    pub g: Vec<f64>,
    pub delta: Vec<f64>,
    pub omega_02: Vec<f64>,
    pub omega_12: Vec<f64>,
    pub omega_13: Vec<f64>,
    pub omega_03: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cavity_frequency: Option<f64>,
}

impl TryFrom<DeviceParamsFile> for DeviceParams {
    type Error = Error;

    fn try_from(f: DeviceParamsFile) -> Result<Self> {
        if f.units != "s^-1" {
            return Err(Error::InvalidParameter(format!(
                "units must be \"s^-1\", got \"{}\"",
                f.units
            )));
        }
        let n = f.g.len();
        let lengths = [
            f.delta.len(),
            f.omega_02.len(),
            f.omega_12.len(),
            f.omega_13.len(),
            f.omega_03.len(),
        ];
        if lengths.iter().any(|&l| l != n) {
            return Err(Error::InvalidParameter("per-SQUID arrays differ in length".into()));
        }
        let squids = (0..n)
            .map(|i| SquidParams {
                g: f.g[i],
                delta: f.delta[i],
                rabi: RabiFrequencies {
                    omega_02: f.omega_02[i],
                    omega_12: f.omega_12[i],
                    omega_13: f.omega_13[i],
                    omega_03: f.omega_03[i],
                },
            })
            .collect();
        let mut params = DeviceParams::new(squids)?;
        params.cavity_frequency = f.cavity_frequency;
        Ok(params)
    }
}

impl From<&DeviceParams> for DeviceParamsFile {
    fn from(p: &DeviceParams) -> Self {
        let col = |f: fn(&SquidParams) -> f64| p.squids.iter().map(f).collect::<Vec<_>>();
        Self {
            units: "s^-1".into(),
            g: col(|s| s.g),
            delta: col(|s| s.delta),
            omega_02: col(|s| s.rabi.omega_02),
            omega_12: col(|s| s.rabi.omega_12),
            omega_13: col(|s| s.rabi.omega_13),
            omega_03: col(|s| s.rabi.omega_03),
            cavity_frequency: p.cavity_frequency,
        }
    }
}
