//! Energy levels of an rf-SQUID loop from its circuit Hamiltonian
//!
//! `H = Q²/2C + (φ - φx)²/2L - EJ cos(2πφ/φ0)`, discretized in flux with
//! second-order central differences between hard walls. Energies are SI
//! (joules) and transition frequencies are angular (s^-1), unlike the
//! dynamics code which works with hbar = 1.
//!
//! Internally the problem is scaled by the bare oscillator: energies in units
//! of `ħω` with `ω = 1/√(LC)` and flux in units of `√(ħ√(L/C))`. The
//! tridiagonal eigenvalues are found by Sturm-sequence bisection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const HBAR: f64 = 1.054_571_817e-34;
pub const PLANCK: f64 = 6.626_070_15e-34;
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// `ħ/2e`, the flux unit used in the Josephson term by default.
pub const FLUX_QUANTUM_REDUCED: f64 = HBAR / (2.0 * ELEMENTARY_CHARGE);
/// `h/2e`, the conventional superconducting flux quantum.
pub const FLUX_QUANTUM: f64 = PLANCK / (2.0 * ELEMENTARY_CHARGE);

/// Bisection stops once brackets are this narrow, in units of `ħω`.
const BISECTION_TOLERANCE: f64 = 1e-13;
/// Largest grid-refinement drift accepted by [`solve_levels`].
pub const MAX_DRIFT: f64 = 1e-4;
pub const MIN_GRID_POINTS: usize = 201;
pub const MAX_LEVELS: usize = 10;

fn default_flux_quantum() -> f64 {
    FLUX_QUANTUM_REDUCED
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquidCircuitParams {
    /// Junction capacitance (F).
    pub capacitance: f64,
    /// Loop inductance (H).
    pub inductance: f64,
    /// Junction critical current (A).
    pub critical_current: f64,
    /// External flux (Wb).
    pub phi_x: f64,
    /// Flux quantum used in `EJ` and the cosine (Wb).
    #[serde(default = "default_flux_quantum")]
    pub flux_quantum: f64,
}

impl SquidCircuitParams {
    pub fn new(capacitance: f64, inductance: f64, critical_current: f64, phi_x: f64) -> Result<Self> {
        let p = Self { capacitance, inductance, critical_current, phi_x, flux_quantum: FLUX_QUANTUM_REDUCED };
        p.validate()?;
        Ok(p)
    }

    pub fn with_flux_quantum(mut self, flux_quantum: f64) -> Result<Self> {
        self.flux_quantum = flux_quantum;
        self.validate()?;
        Ok(self)
    }

    /// Same circuit with the external flux set to `ratio · φ0`.
    pub fn at_bias(&self, ratio: f64) -> Self {
        Self { phi_x: ratio * self.flux_quantum, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.capacitance.is_finite()
            && self.capacitance > 0.0
            && self.inductance.is_finite()
            && self.inductance > 0.0
            && self.critical_current.is_finite()
            && self.critical_current >= 0.0
            && self.phi_x.is_finite()
            && self.flux_quantum.is_finite()
            && self.flux_quantum > 0.0;
        if !ok {
            return Err(Error::InvalidParameter(format!("invalid SQUID circuit parameters {self:?}")));
        }
        Ok(())
    }

    /// `I_c φ0 / 2π` (J).
    pub fn josephson_energy(&self) -> f64 {
        self.critical_current * self.flux_quantum / (2.0 * std::f64::consts::PI)
    }

    /// `1/√(LC)` (s^-1).
    pub fn plasma_frequency(&self) -> f64 {
        1.0 / (self.inductance * self.capacitance).sqrt()
    }

    /// `2π L I_c / φ0`; above 1 the potential can hold more than one well.
    pub fn beta_l(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.inductance * self.critical_current / self.flux_quantum
    }

    /// Harmonic flux length `√(ħ√(L/C))` (Wb).
    pub fn flux_scale(&self) -> f64 {
        (HBAR * (self.inductance / self.capacitance).sqrt()).sqrt()
    }

    /// Potential energy at flux `phi` (J).
    pub fn potential(&self, phi: f64) -> f64 {
        let d = phi - self.phi_x;
        d * d / (2.0 * self.inductance)
            - self.josephson_energy() * (2.0 * std::f64::consts::PI * phi / self.flux_quantum).cos()
    }

    fn scaled(&self) -> Scaled {
        let hw = HBAR * self.plasma_frequency();
        let x0 = self.flux_scale();
        Scaled {
            x_x: self.phi_x / x0,
            beta: self.josephson_energy() / hw,
            kappa: 2.0 * std::f64::consts::PI * x0 / self.flux_quantum,
            x0,
            hw,
        }
    }
}

/// Dimensionless potential `½(x - x_x)² - β cos(κx)`.
#[derive(Debug, Clone, Copy)]
struct Scaled {
    x_x: f64,
    beta: f64,
    kappa: f64,
    x0: f64,
    hw: f64,
}

impl Scaled {
    fn v(&self, x: f64) -> f64 {
        let d = x - self.x_x;
        0.5 * d * d - self.beta * (self.kappa * x).cos()
    }

    fn curvature(&self, x: f64) -> f64 {
        1.0 + self.beta * self.kappa * self.kappa * (self.kappa * x).cos()
    }
}

/// Flux grid with `n_points` interior nodes; the wave function vanishes at
/// `phi_min` and `phi_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub phi_min: f64,
    pub phi_max: f64,
    pub n_points: usize,
}

impl GridSpec {
    pub fn new(phi_min: f64, phi_max: f64, n_points: usize) -> Result<Self> {
        let g = Self { phi_min, phi_max, n_points };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        if !(self.phi_min.is_finite() && self.phi_max.is_finite() && self.phi_max > self.phi_min) {
            return Err(Error::InvalidParameter(format!(
                "grid bounds [{}, {}] are not an interval",
                self.phi_min, self.phi_max
            )));
        }
        if self.n_points < MIN_GRID_POINTS {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least {MIN_GRID_POINTS} points, got {}",
                self.n_points
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.phi_max - self.phi_min) / (self.n_points + 1) as f64
    }

    /// Same interval with half the spacing (`2n + 1` interior nodes).
    pub fn refined(&self) -> Self {
        Self { n_points: 2 * self.n_points + 1, ..*self }
    }

    /// Grid around every low-lying well of the potential, extending
    /// `6 + √(2k+1)` local oscillator lengths past the outermost minima.
    pub fn auto(params: &SquidCircuitParams, k: usize) -> Result<Self> {
        params.validate()?;
        let s = params.scaled();
        // every stationary point satisfies |x - x_x| <= β κ
        let reach = s.beta * s.kappa + 1.0;
        let fine = (0.02f64).min(0.05 / s.kappa.max(1e-12));
        let steps = ((2.0 * reach / fine).ceil() as usize).clamp(200, 2_000_000);
        let h = 2.0 * reach / steps as f64;
        let xs: Vec<f64> = (0..=steps).map(|i| s.x_x - reach + i as f64 * h).collect();
        let vs: Vec<f64> = xs.iter().map(|&x| s.v(x)).collect();
        let mut minima: Vec<usize> = (1..steps).filter(|&i| vs[i] <= vs[i - 1] && vs[i] <= vs[i + 1]).collect();
        if minima.is_empty() {
            let i = (0..=steps).min_by(|&a, &b| vs[a].total_cmp(&vs[b])).expect("non-empty");
            minima.push(i);
        }
        let v_min = minima.iter().map(|&i| vs[i]).fold(f64::INFINITY, f64::min);
        let window = k as f64 + 6.0;
        minima.retain(|&i| vs[i] <= v_min + window);

        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut shortest = 1.0f64;
        for &i in &minima {
            let local = s.curvature(xs[i]).max(1e-6).powf(-0.25);
            shortest = shortest.min(local);
            let margin = (6.0 + (2.0 * k as f64 + 1.0).sqrt()) * local.max(1.0);
            lo = lo.min(xs[i] - margin);
            hi = hi.max(xs[i] + margin);
        }
        let dx = shortest.min(1.0 / s.kappa.max(1e-12)) / 1000.0;
        let n_points = (((hi - lo) / dx).ceil() as usize).clamp(MIN_GRID_POINTS.max(401), 400_001);
        Self::new(lo * s.x0, hi * s.x0, n_points)
    }
}

/// Symmetric tridiagonal matrix of the scaled problem: diagonal and the
/// constant off-diagonal.
fn tridiagonal(s: &Scaled, x_min: f64, x_max: f64, n: usize) -> (Vec<f64>, f64) {
    let h = (x_max - x_min) / (n + 1) as f64;
    let kinetic = 1.0 / (h * h);
    let diag = (1..=n).map(|i| kinetic + s.v(x_min + i as f64 * h)).collect();
    (diag, -0.5 * kinetic)
}

/// Number of eigenvalues below `x`.
fn sturm_count(diag: &[f64], off: f64, x: f64) -> usize {
    let off2 = off * off;
    let mut count = 0;
    let mut q = 1.0;
    for (i, &d) in diag.iter().enumerate() {
        q = if i == 0 { d - x } else { d - x - off2 / q };
        if q == 0.0 {
            q = -f64::EPSILON * (off.abs() + d.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Lowest `k` eigenvalues, ascending.
fn lowest_eigenvalues(diag: &[f64], off: f64, k: usize) -> Vec<f64> {
    let lo0 = diag.iter().cloned().fold(f64::INFINITY, f64::min) - 2.0 * off.abs();
    let hi0 = diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 2.0 * off.abs();
    let mut out = Vec::with_capacity(k);
    let mut lo_prev = lo0;
    for j in 0..k {
        let (mut lo, mut hi) = (lo_prev, hi0);
        while hi - lo > BISECTION_TOLERANCE * (1.0 + lo.abs().max(hi.abs())) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if sturm_count(diag, off, mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let e = 0.5 * (lo + hi);
        out.push(e);
        lo_prev = lo;
    }
    out
}

fn check_request(params: &SquidCircuitParams, grid: &GridSpec, k: usize) -> Result<Scaled> {
    params.validate()?;
    grid.validate()?;
    if k == 0 || k > MAX_LEVELS {
        return Err(Error::InvalidParameter(format!("level count must be 1..={MAX_LEVELS}, got {k}")));
    }
    if k > grid.n_points {
        return Err(Error::InvalidParameter("more levels than grid points".into()));
    }
    Ok(params.scaled())
}

/// Lowest `k` eigenvalues (J) of the discretized Hamiltonian on exactly this
/// grid, without extrapolation.
pub fn discretized_levels(params: &SquidCircuitParams, grid: &GridSpec, k: usize) -> Result<Vec<f64>> {
    let s = check_request(params, grid, k)?;
    let (diag, off) = tridiagonal(&s, grid.phi_min / s.x0, grid.phi_max / s.x0, grid.n_points);
    Ok(lowest_eigenvalues(&diag, off, k).into_iter().map(|e| e * s.hw).collect())
}

/// Dense discretized Hamiltonian (J) on `grid`, for inspection and tests.
pub fn discretized_hamiltonian(params: &SquidCircuitParams, grid: &GridSpec) -> Result<nalgebra::DMatrix<f64>> {
    let s = check_request(params, grid, 1)?;
    let (diag, off) = tridiagonal(&s, grid.phi_min / s.x0, grid.phi_max / s.x0, grid.n_points);
    let n = diag.len();
    let mut m = nalgebra::DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = diag[i] * s.hw;
        if i + 1 < n {
            m[(i, i + 1)] = off * s.hw;
            m[(i + 1, i)] = off * s.hw;
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Anharmonicity {
    pub omega01: f64,
    pub omega12: Option<f64>,
    pub omega23: Option<f64>,
    /// `ω12 - ω01`.
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelStructure {
    /// Lowest energies (J), ascending.
    pub energies: Vec<f64>,
    /// `ω_ij = (E_j - E_i)/ħ` (s^-1), indexed `[i][j]`.
    pub transition_frequencies: Vec<Vec<f64>>,
    /// Largest refinement drift `|E(2n+1) - E(n)| / (E(2n+1) - V_min)` over
    /// the returned levels.
    pub drift: f64,
    pub grid: GridSpec,
}

impl LevelStructure {
    fn from_energies(energies: Vec<f64>, drift: f64, grid: GridSpec) -> Self {
        let transition_frequencies = energies
            .iter()
            .map(|ei| energies.iter().map(|ej| (ej - ei) / HBAR).collect())
            .collect();
        Self { energies, transition_frequencies, drift, grid }
    }

    pub fn omega(&self, i: usize, j: usize) -> Option<f64> {
        self.transition_frequencies.get(i)?.get(j).copied()
    }

    /// `None` with fewer than two levels.
    pub fn anharmonicity(&self) -> Option<Anharmonicity> {
        let omega01 = self.omega(0, 1)?;
        let omega12 = self.omega(1, 2);
        Some(Anharmonicity {
            omega01,
            omega12,
            omega23: self.omega(2, 3),
            alpha: omega12.map(|w| w - omega01),
        })
    }
}

/// Lowest `k` levels. The grid is solved at `n` and `2n + 1` points; the
/// result is the Richardson extrapolation of the two, and drift above
/// [`MAX_DRIFT`] is reported as non-convergence.
pub fn solve_levels(params: &SquidCircuitParams, grid: &GridSpec, k: usize) -> Result<LevelStructure> {
    let s = check_request(params, grid, k)?;
    let (x_min, x_max) = (grid.phi_min / s.x0, grid.phi_max / s.x0);

    let (diag, off) = tridiagonal(&s, x_min, x_max, grid.n_points);
    let v_min = diag.iter().map(|d| d + 2.0 * off).fold(f64::INFINITY, f64::min);
    let edge = diag.len() - 1;
    let min_at = (0..=edge).min_by(|&a, &b| diag[a].total_cmp(&diag[b])).expect("non-empty");
    if min_at == 0 || min_at == edge {
        return Err(Error::InvalidParameter(
            "grid does not contain the potential minimum".into(),
        ));
    }
    let coarse = lowest_eigenvalues(&diag, off, k);
    let fine_grid = grid.refined();
    let (diag_f, off_f) = tridiagonal(&s, x_min, x_max, fine_grid.n_points);
    let fine = lowest_eigenvalues(&diag_f, off_f, k);

    let mut drift = 0.0f64;
    let mut energies = Vec::with_capacity(k);
    for (c, f) in coarse.iter().zip(&fine) {
        let scale = (f - v_min).abs().max(f64::MIN_POSITIVE);
        drift = drift.max((f - c).abs() / scale);
        energies.push((4.0 * f - c) / 3.0 * s.hw);
    }
    log::debug!("flux levels: {k} levels on {} points, drift {drift:.3e}", grid.n_points);
    if drift > MAX_DRIFT {
        return Err(Error::NonConvergence { drift });
    }
    // a doublet split by less than the extrapolation step can swap order
    energies.sort_by(f64::total_cmp);
    Ok(LevelStructure::from_energies(energies, drift, *grid))
}

/// [`solve_levels`] on [`GridSpec::auto`].
pub fn solve_levels_auto(params: &SquidCircuitParams, k: usize) -> Result<LevelStructure> {
    solve_levels(params, &GridSpec::auto(params, k)?, k)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxSweepRow {
    pub phi_x_over_phi0: f64,
    pub omega01: f64,
    pub omega12: f64,
    pub omega23: f64,
}

/// `points` evenly spaced biases from `start` to `stop` (in units of φ0),
/// each solved on an automatic grid with `max(k, 4)` levels.
pub fn sweep_flux(
    params: &SquidCircuitParams,
    start: f64,
    stop: f64,
    points: usize,
    k: usize,
) -> Result<Vec<FluxSweepRow>> {
    if points == 0 {
        return Err(Error::InvalidParameter("sweep needs at least one point".into()));
    }
    let k = k.max(4);
    (0..points)
        .map(|i| {
            let ratio = if points == 1 { start } else { start + (stop - start) * i as f64 / (points - 1) as f64 };
            let levels = solve_levels_auto(&params.at_bias(ratio), k)?;
            Ok(FluxSweepRow {
                phi_x_over_phi0: ratio,
                omega01: levels.omega(0, 1).expect("k >= 4"),
                omega12: levels.omega(1, 2).expect("k >= 4"),
                omega23: levels.omega(2, 3).expect("k >= 4"),
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[FluxSweepRow]) -> String {
    let mut out = String::from("phi_x_over_phi0,omega01,omega12,omega23\n");
    for r in rows {
        out.push_str(&format!("{},{:e},{:e},{:e}\n", r.phi_x_over_phi0, r.omega01, r.omega12, r.omega23));
    }
    out
}
