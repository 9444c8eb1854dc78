//! Propagators for the three SQUID interactions: resonant Jaynes-Cummings
//! exchange with the cavity, the effective dispersive phase, and ideal
//! microwave rotations. Every closed-form propagator is a direct sum of 1x1
//! and 2x2 blocks on the flat basis, stored as a [`Propagator`] so schedules
//! can be simulated without dense matrix products. [`expm_oracle`] provides
//! an independent dense path through hermitian eigendecomposition.

use nalgebra::{DMatrix, DVector, Matrix2};

use crate::error::{Error, Result};
use crate::state_space::{
    annihilation, cavity_operator, squid_operator, transition, DenseOperator, SpaceDescriptor,
    StateVector, C64, ONE, SQUID_LEVELS, ZERO,
};

const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
pub enum Block {
    /// Unitary on `span{|a>, |b>}`, with `|a>` the first basis vector.
    Pair { a: usize, b: usize, u: Matrix2<C64> },
    Phase { a: usize, z: C64 },
}

/// Block-sparse unitary; indices not covered by any block are left alone.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagator {
    space: SpaceDescriptor,
    blocks: Vec<Block>,
}

impl Propagator {
    pub fn identity(space: SpaceDescriptor) -> Self {
        Self { space, blocks: Vec::new() }
    }

    pub fn space(&self) -> SpaceDescriptor {
        self.space
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn apply_to_vector(&self, v: &mut DVector<C64>) {
        for block in &self.blocks {
            match *block {
                Block::Pair { a, b, u } => {
                    let (x, y) = (v[a], v[b]);
                    v[a] = u[(0, 0)] * x + u[(0, 1)] * y;
                    v[b] = u[(1, 0)] * x + u[(1, 1)] * y;
                }
                Block::Phase { a, z } => v[a] *= z,
            }
        }
    }

    /// Left-multiplies `m` in place.
    pub fn apply_to_matrix(&self, m: &mut DMatrix<C64>) {
        let cols = m.ncols();
        for block in &self.blocks {
            match *block {
                Block::Pair { a, b, u } => {
                    for c in 0..cols {
                        let (x, y) = (m[(a, c)], m[(b, c)]);
                        m[(a, c)] = u[(0, 0)] * x + u[(0, 1)] * y;
                        m[(b, c)] = u[(1, 0)] * x + u[(1, 1)] * y;
                    }
                }
                Block::Phase { a, z } => {
                    for c in 0..cols {
                        m[(a, c)] *= z;
                    }
                }
            }
        }
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.space() != self.space {
            return Err(Error::SpaceMismatch);
        }
        let mut out = state.clone();
        self.apply_to_vector(out.amplitudes_mut());
        Ok(out)
    }

    pub fn to_dense(&self) -> DenseOperator {
        let mut op = DenseOperator::identity(self.space);
        self.apply_to_matrix(op.matrix_mut());
        op
    }
}

/// Microwave rotation on the ordered pair `(|i>, |j>)` of one SQUID, `i` the
/// lower level:
/// `|i> -> cos(Ωt)|i> - i e^{-iφ} sin(Ωt)|j>`,
/// `|j> -> cos(Ωt)|j> - i e^{iφ} sin(Ωt)|i>`.
pub fn mw_rotation_block(omega: f64, phi: f64, t: f64) -> Matrix2<C64> {
    let (s, c) = (omega * t).sin_cos();
    let c = C64::new(c, 0.0);
    Matrix2::new(
        c,
        -I * C64::from_polar(s, phi),
        -I * C64::from_polar(s, -phi),
        c,
    )
}

fn check_squid(space: &SpaceDescriptor, squid: usize) -> Result<()> {
    if squid >= space.n_squids() {
        return Err(Error::InvalidParameter(format!(
            "SQUID index {squid} out of range for {} SQUIDs",
            space.n_squids()
        )));
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter(format!("duration must be non-negative, got {t}")));
    }
    Ok(())
}

/// Indices whose SQUID `squid` is at `level`, in increasing order.
fn indices_at_level(space: &SpaceDescriptor, squid: usize, level: usize) -> impl Iterator<Item = usize> + '_ {
    (0..space.total_dim()).filter(move |&i| space.level_at(i, squid) == level)
}

pub fn microwave(
    space: SpaceDescriptor,
    squid: usize,
    levels: (usize, usize),
    omega: f64,
    phi: f64,
    t: f64,
) -> Result<Propagator> {
    check_squid(&space, squid)?;
    check_positive("Rabi frequency", omega)?;
    check_time(t)?;
    let (i, j) = levels;
    if i >= j || j >= SQUID_LEVELS {
        return Err(Error::InvalidParameter(format!(
            "microwave pair ({i}, {j}) must be (lower, upper) levels in 0..=3"
        )));
    }
    let u = mw_rotation_block(omega, phi, t);
    let shift = (j - i) * space.stride(squid);
    let blocks = indices_at_level(&space, squid, i)
        .map(|a| Block::Pair { a, b: a + shift, u })
        .collect();
    Ok(Propagator { space, blocks })
}

pub fn microwave_propagator(
    space: SpaceDescriptor,
    squid: usize,
    levels: (usize, usize),
    omega: f64,
    phi: f64,
    t: f64,
) -> Result<DenseOperator> {
    Ok(microwave(space, squid, levels, omega, phi, t)?.to_dense())
}

/// Resonant exchange `g (a^dag |2><3| + a |3><2|)` on one SQUID. Each block
/// `{|3>|m>, |2>|m+1>}` rotates by `g sqrt(m+1) t`. The state `|3>|N_c-1>`
/// couples outside the truncated space and is left untouched; see
/// [`truncation_leak`].
pub fn jc_resonant(space: SpaceDescriptor, squid: usize, g: f64, t: f64) -> Result<Propagator> {
    check_squid(&space, squid)?;
    check_positive("coupling g", g)?;
    check_time(t)?;
    let stride = space.stride(squid);
    let top = space.cavity_dim() - 1;
    let blocks = indices_at_level(&space, squid, 3)
        .filter(|&a| space.photons_at(a) < top)
        .map(|a| {
            let m = space.photons_at(a) as f64;
            let (s, c) = (g * (m + 1.0).sqrt() * t).sin_cos();
            let u = Matrix2::new(C64::new(c, 0.0), -I * s, -I * s, C64::new(c, 0.0));
            // |3>|m>  <->  |2>|m+1>
            Block::Pair { a, b: a - stride + 1, u }
        })
        .collect();
    Ok(Propagator { space, blocks })
}

pub fn jc_resonant_propagator(space: SpaceDescriptor, squid: usize, g: f64, t: f64) -> Result<DenseOperator> {
    Ok(jc_resonant(space, squid, g, t)?.to_dense())
}

/// Effective dispersive evolution under `(g^2/Δ)(|3><3| - |2><2|) a^dag a`:
/// `|2>|m>` picks up `e^{+i g^2 m t/Δ}` and `|3>|m>` picks up the conjugate.
pub fn dispersive(space: SpaceDescriptor, squid: usize, g: f64, delta: f64, t: f64) -> Result<Propagator> {
    check_squid(&space, squid)?;
    check_positive("coupling g", g)?;
    check_positive("detuning", delta)?;
    check_time(t)?;
    if delta < crate::params::DISPERSIVE_VALIDITY_RATIO * g {
        log::warn!(
            "SQUID {squid}: detuning/g = {:.2} is below {}; dispersive approximation is poor",
            delta / g,
            crate::params::DISPERSIVE_VALIDITY_RATIO
        );
    }
    let chi = g * g / delta;
    let mut blocks = Vec::new();
    for level in [2usize, 3] {
        let sign = if level == 2 { 1.0 } else { -1.0 };
        for a in indices_at_level(&space, squid, level) {
            let m = space.photons_at(a);
            if m > 0 {
                blocks.push(Block::Phase { a, z: C64::from_polar(1.0, sign * chi * m as f64 * t) });
            }
        }
    }
    Ok(Propagator { space, blocks })
}

pub fn dispersive_propagator(
    space: SpaceDescriptor,
    squid: usize,
    g: f64,
    delta: f64,
    t: f64,
) -> Result<DenseOperator> {
    Ok(dispersive(space, squid, g, delta, t)?.to_dense())
}

/// Exact evolution of a detuned SQUID under
/// `H = Δ|3><3| + g (a^dag |2><3| + a |3><2|)`, written in the frame rotating
/// at the cavity frequency with `|3>|m>` lying `Δ` above `|2>|m+1>`. This
/// ordering is the one whose second-order limit reproduces the sign of the
/// effective dispersive phase: `|2>|1>` acquires `≈ e^{+i g^2 t/Δ}`. Each
/// block `{|2>|m+1>, |3>|m>}` is diagonalized in closed form; `|2>|0>`
/// carries zero energy, so phases on `|2>|1>` are measured against the
/// uncoupled reference.
pub fn jc_detuned_exact(
    space: SpaceDescriptor,
    squid: usize,
    g: f64,
    delta: f64,
    t: f64,
) -> Result<Propagator> {
    check_squid(&space, squid)?;
    check_positive("coupling g", g)?;
    if !(delta.is_finite() && delta != 0.0) {
        return Err(Error::InvalidParameter(format!("detuning must be nonzero, got {delta}")));
    }
    check_time(t)?;
    let stride = space.stride(squid);
    let top = space.cavity_dim() - 1;
    let mut blocks = Vec::new();
    for a3 in indices_at_level(&space, squid, 3) {
        let m = space.photons_at(a3);
        if m == top {
            blocks.push(Block::Phase { a: a3, z: C64::from_polar(1.0, -delta * t) });
            continue;
        }
        let coupling = g * ((m + 1) as f64).sqrt();
        let rabi = (delta * delta + 4.0 * coupling * coupling).sqrt();
        let (s, c) = (0.5 * rabi * t).sin_cos();
        let global = C64::from_polar(1.0, -0.5 * delta * t);
        let nz = delta / rabi;
        let nx = 2.0 * coupling / rabi;
        // e^{-iΔt/2} (cos I - i sin M), M = [[-Δ/Ω, 2G/Ω], [2G/Ω, Δ/Ω]]
        let u = Matrix2::new(
            global * C64::new(c, s * nz),
            global * C64::new(0.0, -s * nx),
            global * C64::new(0.0, -s * nx),
            global * C64::new(c, -s * nz),
        );
        let a2 = a3 - stride + 1; // |2>|m+1>
        blocks.push(Block::Pair { a: a2, b: a3, u });
    }
    Ok(Propagator { space, blocks })
}

pub fn jc_detuned_exact_propagator(
    space: SpaceDescriptor,
    squid: usize,
    g: f64,
    delta: f64,
    t: f64,
) -> Result<DenseOperator> {
    Ok(jc_detuned_exact(space, squid, g, delta, t)?.to_dense())
}

/// Population of `|3>` on `squid` with the cavity at its highest kept Fock
/// level; a resonant or exact detuned exchange from there would need a
/// photon state the truncation dropped.
pub fn truncation_leak(state: &StateVector, squid: usize) -> f64 {
    let space = state.space();
    let top = space.cavity_dim() - 1;
    state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| space.level_at(*i, squid) == 3 && space.photons_at(*i) == top)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

fn exchange_term(space: SpaceDescriptor, squid: usize, g: f64) -> Result<DenseOperator> {
    let a = annihilation(space.cavity_dim());
    let a_dag = cavity_operator(space, &a.adjoint())?;
    let lower = squid_operator(space, squid, &transition(2, 3))?;
    let forward = lower.compose(&a_dag)?;
    Ok(forward.add(&forward.adjoint())?.scale(C64::new(g, 0.0)))
}

/// `g (a^dag |2><3| + a |3><2|)` built from tensor products.
pub fn resonant_hamiltonian(space: SpaceDescriptor, squid: usize, g: f64) -> Result<DenseOperator> {
    exchange_term(space, squid, g)
}

/// `(g^2/Δ)(|3><3| - |2><2|) a^dag a` built from tensor products.
pub fn dispersive_hamiltonian(space: SpaceDescriptor, squid: usize, g: f64, delta: f64) -> Result<DenseOperator> {
    let a = annihilation(space.cavity_dim());
    let number = cavity_operator(space, &(a.adjoint() * &a))?;
    let p3 = squid_operator(space, squid, &transition(3, 3))?;
    let p2 = squid_operator(space, squid, &transition(2, 2))?;
    let diff = p3.add(&p2.scale(-ONE))?;
    Ok(diff.compose(&number)?.scale(C64::new(g * g / delta, 0.0)))
}

/// `Δ|3><3| + g (a^dag |2><3| + a |3><2|)`, the Hamiltonian behind
/// [`jc_detuned_exact`].
pub fn detuned_jc_hamiltonian(space: SpaceDescriptor, squid: usize, g: f64, delta: f64) -> Result<DenseOperator> {
    let p3 = squid_operator(space, squid, &transition(3, 3))?.scale(C64::new(delta, 0.0));
    p3.add(&exchange_term(space, squid, g)?)
}

/// `Ω e^{iφ}|i><j| + h.c.` on one SQUID.
pub fn microwave_hamiltonian(
    space: SpaceDescriptor,
    squid: usize,
    levels: (usize, usize),
    omega: f64,
    phi: f64,
) -> Result<DenseOperator> {
    let (i, j) = levels;
    let up = squid_operator(space, squid, &transition(i, j))?.scale(C64::from_polar(omega, phi));
    up.add(&up.adjoint())
}

/// `e^{-iHt}` from the eigendecomposition of a hermitian `H`.
pub fn expm_oracle(h: &DenseOperator, t: f64) -> Result<DenseOperator> {
    let scale = h.matrix().iter().map(|z| z.norm()).fold(1.0, f64::max);
    let dev = h.hermiticity_deviation();
    if dev > 1e-10 * scale {
        return Err(Error::NonHermitian { deviation: dev });
    }
    // symmetrize away rounding before decomposing
    let sym = (h.matrix() + h.matrix().adjoint()) * C64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| C64::from_polar(1.0, -e * t)));
    DenseOperator::from_matrix(h.space(), v * phases * v.adjoint())
}

/// Peak `|3>|0>` occupation reached from `|2>|1>` under the exact detuned
/// exchange, located by scanning one full oscillation window and refining
/// the best sample with a golden-section search.
pub fn peak_upper_level_population(g: f64, delta: f64) -> Result<f64> {
    let space = SpaceDescriptor::new(1, 2)?;
    let start = space.index_of(&crate::state_space::BasisLabel::new(vec![2], 1))?;
    let target = space.index_of(&crate::state_space::BasisLabel::new(vec![3], 0))?;
    let transfer = |t: f64| -> Result<f64> {
        let p = jc_detuned_exact(space, 0, g, delta, t)?;
        let mut v = DVector::from_element(space.total_dim(), ZERO);
        v[start] = ONE;
        p.apply_to_vector(&mut v);
        Ok(v[target].norm_sqr())
    };
    // The exchange oscillates faster than |Δ|, so [0, 2π/|Δ|] covers a period.
    let window = 2.0 * std::f64::consts::PI / delta.abs();
    let samples = 512;
    let dt = window / samples as f64;
    let mut best = (0.0, transfer(0.0)?);
    for k in 1..=samples {
        let t = k as f64 * dt;
        let p = transfer(t)?;
        if p > best.1 {
            best = (t, p);
        }
    }
    let (mut lo, mut hi) = ((best.0 - dt).max(0.0), best.0 + dt);
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (transfer(x1)?, transfer(x2)?);
    for _ in 0..200 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = transfer(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = transfer(x1)?;
        }
        if hi - lo <= 1e-15 * window {
            break;
        }
    }
    Ok(best.1.max(f1).max(f2))
}
