//! Composite Hilbert space of `n` four-level SQUIDs and one truncated
//! cavity mode.
//!
//! Basis states are indexed row-major over `(level_1, ..., level_n, photons)`:
//! SQUID 1 varies slowest and the cavity photon number fastest. All SQUID
//! indices in this crate are zero-based.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Number of levels kept per SQUID.
pub const SQUID_LEVELS: usize = 4;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceDescriptor {
    n_squids: usize,
    cavity_dim: usize,
}

impl SpaceDescriptor {
    pub fn new(n_squids: usize, cavity_dim: usize) -> Result<Self> {
        if n_squids == 0 {
            return Err(Error::InvalidSpace("at least one SQUID is required".into()));
        }
        if cavity_dim < 2 {
            return Err(Error::InvalidSpace(format!(
                "cavity dimension {cavity_dim} cannot hold a single photon"
            )));
        }
        // 4^n * N_c must fit comfortably in memory as a dense matrix side.
        if n_squids > 12 {
            return Err(Error::InvalidSpace(format!("{n_squids} SQUIDs exceed the dense limit")));
        }
        Ok(Self { n_squids, cavity_dim })
    }

    pub fn n_squids(&self) -> usize {
        self.n_squids
    }

    pub fn cavity_dim(&self) -> usize {
        self.cavity_dim
    }

    pub fn total_dim(&self) -> usize {
        SQUID_LEVELS.pow(self.n_squids as u32) * self.cavity_dim
    }

    /// Dimension of the computational subspace, `2^n`.
    pub fn logical_dim(&self) -> usize {
        1 << self.n_squids
    }

    /// Flat-index stride of SQUID `squid`.
    pub fn stride(&self, squid: usize) -> usize {
        SQUID_LEVELS.pow((self.n_squids - 1 - squid) as u32) * self.cavity_dim
    }

    pub fn index_of(&self, label: &BasisLabel) -> Result<usize> {
        label.validate(self)?;
        let mut idx = 0;
        for &level in &label.levels {
            idx = idx * SQUID_LEVELS + level as usize;
        }
        Ok(idx * self.cavity_dim + label.photons)
    }

    pub fn label_of(&self, index: usize) -> Result<BasisLabel> {
        if index >= self.total_dim() {
            return Err(Error::InvalidLabel(format!(
                "flat index {index} outside [0, {})",
                self.total_dim()
            )));
        }
        let photons = index % self.cavity_dim;
        let mut rest = index / self.cavity_dim;
        let mut levels = vec![0u8; self.n_squids];
        for slot in levels.iter_mut().rev() {
            *slot = (rest % SQUID_LEVELS) as u8;
            rest /= SQUID_LEVELS;
        }
        Ok(BasisLabel { levels, photons })
    }

    /// Level of SQUID `squid` in the basis state with flat index `index`.
    #[inline]
    pub fn level_at(&self, index: usize, squid: usize) -> usize {
        (index / self.stride(squid)) % SQUID_LEVELS
    }

    #[inline]
    pub fn photons_at(&self, index: usize) -> usize {
        index % self.cavity_dim
    }

    fn check_squid(&self, squid: usize) -> Result<()> {
        if squid >= self.n_squids {
            return Err(Error::InvalidParameter(format!(
                "SQUID index {squid} out of range for {} SQUIDs",
                self.n_squids
            )));
        }
        Ok(())
    }
}

pub fn make_space(n_squids: usize, cavity_dim: usize) -> Result<SpaceDescriptor> {
    SpaceDescriptor::new(n_squids, cavity_dim)
}

/// A product basis ket `|l_1 ... l_n>|m>_c`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisLabel {
    pub levels: Vec<u8>,
    pub photons: usize,
}

impl BasisLabel {
    pub fn new(levels: impl Into<Vec<u8>>, photons: usize) -> Self {
        Self { levels: levels.into(), photons }
    }

    /// Parses the compact `"abc"` ket notation, e.g. `BasisLabel::ket("211", 1)`.
    pub fn ket(levels: &str, photons: usize) -> Result<Self> {
        let levels = levels
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as u8)
                    .ok_or_else(|| Error::InvalidLabel(format!("'{c}' is not a level digit")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { levels, photons })
    }

    fn validate(&self, space: &SpaceDescriptor) -> Result<()> {
        if self.levels.len() != space.n_squids {
            return Err(Error::InvalidLabel(format!(
                "expected {} SQUID levels, got {}",
                space.n_squids,
                self.levels.len()
            )));
        }
        if let Some(&bad) = self.levels.iter().find(|&&l| l as usize >= SQUID_LEVELS) {
            return Err(Error::InvalidLabel(format!("level {bad} outside 0..=3")));
        }
        if self.photons >= space.cavity_dim {
            return Err(Error::InvalidLabel(format!(
                "photon number {} outside [0, {})",
                self.photons, space.cavity_dim
            )));
        }
        Ok(())
    }
}

impl std::fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "|")?;
        for l in &self.levels {
            write!(f, "{l}")?;
        }
        write!(f, ">|{}>c", self.photons)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: SpaceDescriptor,
    amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn from_amplitudes(space: SpaceDescriptor, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != space.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: space.total_dim(),
                found: amplitudes.len(),
            });
        }
        Ok(Self { space, amplitudes })
    }

    pub fn space(&self) -> SpaceDescriptor {
        self.space
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut DVector<C64> {
        &mut self.amplitudes
    }

    pub fn amplitude(&self, label: &BasisLabel) -> Result<C64> {
        Ok(self.amplitudes[self.space.index_of(label)?])
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Sum of `|amp|^2` over basis states where SQUID `squid` sits in `level`.
    pub fn population(&self, squid: usize, level: usize) -> Result<f64> {
        self.space.check_squid(squid)?;
        if level >= SQUID_LEVELS {
            return Err(Error::InvalidLabel(format!("level {level} outside 0..=3")));
        }
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| self.space.level_at(*i, squid) == level)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    pub fn cavity_population(&self, photons: usize) -> Result<f64> {
        if photons >= self.space.cavity_dim {
            return Err(Error::InvalidLabel(format!("photon number {photons} out of range")));
        }
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| self.space.photons_at(*i) == photons)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Nonzero amplitudes above `threshold`, in flat-index order.
    pub fn support(&self, threshold: f64) -> Vec<(BasisLabel, C64)> {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > threshold)
            .map(|(i, a)| (self.space.label_of(i).expect("index in range"), *a))
            .collect()
    }
}

pub fn basis_state(space: SpaceDescriptor, label: &BasisLabel) -> Result<StateVector> {
    let idx = space.index_of(label)?;
    let mut amplitudes = DVector::from_element(space.total_dim(), ZERO);
    amplitudes[idx] = ONE;
    Ok(StateVector { space, amplitudes })
}

pub fn population(state: &StateVector, squid: usize, level: usize) -> Result<f64> {
    state.population(squid, level)
}

pub fn cavity_population(state: &StateVector, photons: usize) -> Result<f64> {
    state.cavity_population(photons)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    space: SpaceDescriptor,
    matrix: DMatrix<C64>,
}

impl DenseOperator {
    pub fn from_matrix(space: SpaceDescriptor, matrix: DMatrix<C64>) -> Result<Self> {
        let dim = space.total_dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: matrix.nrows() });
        }
        Ok(Self { space, matrix })
    }

    pub fn identity(space: SpaceDescriptor) -> Self {
        let dim = space.total_dim();
        Self { space, matrix: DMatrix::identity(dim, dim) }
    }

    pub fn zeros(space: SpaceDescriptor) -> Self {
        let dim = space.total_dim();
        Self { space, matrix: DMatrix::zeros(dim, dim) }
    }

    pub fn space(&self) -> SpaceDescriptor {
        self.space
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut DMatrix<C64> {
        &mut self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self { space: self.space, matrix: self.matrix.adjoint() }
    }

    /// `self` applied after `first`.
    pub fn compose(&self, first: &DenseOperator) -> Result<Self> {
        if self.space != first.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(Self { space: self.space, matrix: &self.matrix * &first.matrix })
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if self.space != state.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(StateVector { space: self.space, amplitudes: &self.matrix * &state.amplitudes })
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self { space: self.space, matrix: &self.matrix * factor }
    }

    pub fn add(&self, other: &DenseOperator) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(Self { space: self.space, matrix: &self.matrix + &other.matrix })
    }

    /// Largest elementwise modulus of `U^dag U - I`.
    pub fn unitarity_deviation(&self) -> f64 {
        max_abs_deviation(&(self.matrix.adjoint() * &self.matrix), &DMatrix::identity(
            self.matrix.nrows(),
            self.matrix.ncols(),
        ))
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        max_abs_deviation(&self.matrix, &self.matrix.adjoint())
    }

    pub fn max_deviation(&self, other: &DenseOperator) -> Result<f64> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(max_abs_deviation(&self.matrix, &other.matrix))
    }
}

pub fn apply(op: &DenseOperator, state: &StateVector) -> Result<StateVector> {
    op.apply(state)
}

/// `b` first, then `a`.
pub fn compose(a: &DenseOperator, b: &DenseOperator) -> Result<DenseOperator> {
    a.compose(b)
}

pub fn adjoint(op: &DenseOperator) -> DenseOperator {
    op.adjoint()
}

pub fn max_abs_deviation(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub(crate) fn block_unitarity_deviation(block: &Matrix2<C64>) -> f64 {
    let prod = block.adjoint() * block;
    let mut dev: f64 = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            let target = if r == c { ONE } else { ZERO };
            dev = dev.max((prod[(r, c)] - target).norm());
        }
    }
    dev
}

/// Embeds a 2x2 unitary acting on `span{|i>, |j>}` of one SQUID, with `|i>`
/// the first basis vector of `block`. Identity on every other level and on
/// the remaining subsystems.
pub fn embed_two_level(
    space: SpaceDescriptor,
    squid: usize,
    levels: (usize, usize),
    block: &Matrix2<C64>,
) -> Result<DenseOperator> {
    space.check_squid(squid)?;
    let (i, j) = levels;
    if i == j || i >= SQUID_LEVELS || j >= SQUID_LEVELS {
        return Err(Error::InvalidParameter(format!("bad level pair ({i}, {j})")));
    }
    let dev = block_unitarity_deviation(block);
    if dev > 1e-10 {
        return Err(Error::NonUnitary { deviation: dev });
    }
    let dim = space.total_dim();
    let stride = space.stride(squid);
    let mut m = DMatrix::identity(dim, dim);
    for a in 0..dim {
        if space.level_at(a, squid) != i {
            continue;
        }
        let b = a - i * stride + j * stride;
        m[(a, a)] = block[(0, 0)];
        m[(a, b)] = block[(0, 1)];
        m[(b, a)] = block[(1, 0)];
        m[(b, b)] = block[(1, 1)];
    }
    Ok(DenseOperator { space, matrix: m })
}

/// `local` acting on SQUID `squid` (4x4, level basis), identity elsewhere.
pub fn squid_operator(space: SpaceDescriptor, squid: usize, local: &Matrix4<C64>) -> Result<DenseOperator> {
    space.check_squid(squid)?;
    let mut m = DMatrix::<C64>::identity(1, 1);
    for k in 0..space.n_squids {
        let factor = if k == squid {
            DMatrix::from_fn(SQUID_LEVELS, SQUID_LEVELS, |r, c| local[(r, c)])
        } else {
            DMatrix::identity(SQUID_LEVELS, SQUID_LEVELS)
        };
        m = m.kronecker(&factor);
    }
    m = m.kronecker(&DMatrix::<C64>::identity(space.cavity_dim, space.cavity_dim));
    Ok(DenseOperator { space, matrix: m })
}

/// `local` acting on the cavity mode (`N_c x N_c`), identity on every SQUID.
pub fn cavity_operator(space: SpaceDescriptor, local: &DMatrix<C64>) -> Result<DenseOperator> {
    if local.nrows() != space.cavity_dim || local.ncols() != space.cavity_dim {
        return Err(Error::DimensionMismatch { expected: space.cavity_dim, found: local.nrows() });
    }
    let squids = SQUID_LEVELS.pow(space.n_squids as u32);
    let m = DMatrix::<C64>::identity(squids, squids).kronecker(local);
    Ok(DenseOperator { space, matrix: m })
}

/// Truncated annihilation operator `a` on `N_c` Fock states.
pub fn annihilation(cavity_dim: usize) -> DMatrix<C64> {
    DMatrix::from_fn(cavity_dim, cavity_dim, |r, c| {
        if c == r + 1 {
            C64::new((c as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    })
}

/// `|to><from|` on a single SQUID.
pub fn transition(to: usize, from: usize) -> Matrix4<C64> {
    let mut m = Matrix4::zeros();
    m[(to, from)] = ONE;
    m
}

/// Assignment of each SQUID's logical `|0>`/`|1>` to physical levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicalMap {
    pub zero: Vec<u8>,
    pub one: Vec<u8>,
}

impl LogicalMap {
    /// Logical 0 and 1 on physical levels 0 and 1 of every SQUID.
    pub fn standard(n_squids: usize) -> Self {
        Self { zero: vec![0; n_squids], one: vec![1; n_squids] }
    }

    /// Physical basis label for logical index `k` (SQUID 1 is the most
    /// significant bit) with the cavity in vacuum.
    pub fn label(&self, k: usize) -> BasisLabel {
        let n = self.zero.len();
        let levels = (0..n)
            .map(|s| if (k >> (n - 1 - s)) & 1 == 1 { self.one[s] } else { self.zero[s] })
            .collect::<Vec<_>>();
        BasisLabel { levels, photons: 0 }
    }
}

/// Sub-matrix of `op` between computational basis states tensored with the
/// cavity vacuum.
pub fn logical_restriction(op: &DenseOperator, map: &LogicalMap) -> Result<DMatrix<C64>> {
    let space = op.space;
    if map.zero.len() != space.n_squids || map.one.len() != space.n_squids {
        return Err(Error::InvalidParameter("logical map length differs from SQUID count".into()));
    }
    let d = space.logical_dim();
    let idx = (0..d)
        .map(|k| space.index_of(&map.label(k)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DMatrix::from_fn(d, d, |r, c| op.matrix[(idx[r], idx[c])]))
}
