//! Oracles shared by the integration tests. Nothing here calls the
//! propagator constructors; operators are assembled entry by entry.

#![allow(dead_code)]

use nalgebra::DMatrix;
use squidgate_core::{BasisLabel, SpaceDescriptor, C64};
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

pub const I: C64 = C64 { re: 0.0, im: 1.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Which states a 2x2 block acts on: a SQUID level, optionally paired with
/// a photon number (any photon number when `None`).
#[derive(Clone, Copy)]
pub struct Slot {
    pub level: usize,
    pub photons: Option<usize>,
}

pub fn lvl(level: usize) -> Slot {
    Slot { level, photons: None }
}

pub fn lvl_ph(level: usize, photons: usize) -> Slot {
    Slot { level, photons: Some(photons) }
}

fn digits(space: SpaceDescriptor, index: usize) -> (Vec<usize>, usize) {
    let nc = space.cavity_dim();
    let photons = index % nc;
    let mut rest = index / nc;
    let mut levels = vec![0; space.n_squids()];
    for s in (0..space.n_squids()).rev() {
        levels[s] = rest % 4;
        rest /= 4;
    }
    (levels, photons)
}

fn index(space: SpaceDescriptor, levels: &[usize], photons: usize) -> usize {
    levels.iter().fold(0, |acc, &l| acc * 4 + l) * space.cavity_dim() + photons
}

/// Full-space matrix acting as `block` on the pair `(first, second)` of
/// `squid` (first basis vector `(1, 0)`), identity elsewhere.
pub fn embed(space: SpaceDescriptor, squid: usize, first: Slot, second: Slot, block: [[C64; 2]; 2]) -> DMatrix<C64> {
    let d = space.total_dim();
    let mut m = DMatrix::<C64>::identity(d, d);
    for i in 0..d {
        let (levels, photons) = digits(space, i);
        if levels[squid] != first.level || first.photons.is_some_and(|p| p != photons) {
            continue;
        }
        let partner_photons = match (first.photons, second.photons) {
            (Some(_), Some(p)) => p,
            _ => photons,
        };
        if partner_photons >= space.cavity_dim() {
            continue;
        }
        let mut pl = levels.clone();
        pl[squid] = second.level;
        let j = index(space, &pl, partner_photons);
        m[(i, i)] = block[0][0];
        m[(i, j)] = block[0][1];
        m[(j, i)] = block[1][0];
        m[(j, j)] = block[1][1];
    }
    m
}

/// Product of the abstract gate operators for an n-qubit phase gate with
/// SQUID 1 as control, each operator written as its 2x2 matrix on the basis
/// pair it is defined on. Rightmost factor acts first.
pub fn operator_product(space: SpaceDescriptor, thetas: &[f64]) -> DMatrix<C64> {
    // microwave pi pulse on control, basis (|3>, |1>)
    let u_mw_pi = embed(space, 0, lvl(3), lvl(1), [[ZERO, I], [I, ZERO]]);
    // resonant exchange, basis (|3>|0>, |2>|1>)
    let u_r = embed(space, 0, lvl_ph(3, 0), lvl_ph(2, 1), [[ZERO, -I], [-I, ZERO]]);
    // U(-pi/2) = [[0,-1],[1,0]]; U(pi/2) is its adjoint
    let minus = [[ZERO, -ONE], [ONE, ZERO]];
    let plus = [[ZERO, ONE], [-ONE, ZERO]];
    let ctrl_minus = embed(space, 0, lvl(0), lvl(2), minus);
    let ctrl_plus = embed(space, 0, lvl(0), lvl(2), plus);

    let mut u = &u_r * &u_mw_pi;
    u = &ctrl_plus * u;
    for (k, &theta) in thetas.iter().enumerate() {
        let t = k + 1;
        let tgt_minus = embed(space, t, lvl(1), lvl(2), minus);
        let tgt_plus = embed(space, t, lvl(1), lvl(2), plus);
        let phase = embed(
            space,
            t,
            lvl_ph(3, 1),
            lvl_ph(2, 1),
            [[C64::from_polar(1.0, -theta), ZERO], [ZERO, C64::from_polar(1.0, theta)]],
        );
        u = tgt_plus * phase * tgt_minus * u;
    }
    u = ctrl_minus * u;
    u = &u_r * u;
    &u_mw_pi * u
}

/// One entry of the state-by-step table: `e^{i quarter π/4}` times
/// `sign` on `|levels>|photons>`.
#[derive(Clone, Copy, Debug)]
pub struct Entry {
    pub sign: f64,
    pub quarter: u8,
    pub levels: &'static str,
    pub photons: usize,
}

const fn e(sign: f64, quarter: u8, levels: &'static str, photons: usize) -> Entry {
    Entry { sign, quarter, levels, photons }
}

impl Entry {
    pub fn coefficient(&self) -> C64 {
        C64::from_polar(self.sign, self.quarter as f64 * FRAC_PI_4)
    }

    pub fn label(&self) -> BasisLabel {
        BasisLabel::ket(self.levels, self.photons).unwrap()
    }
}

/// States of the ten-step three-qubit gate (θ2 = π/2, θ3 = π/4) after each
/// step, for inputs |000> .. |111> with the cavity empty.
pub const THREE_QUBIT_TRACE: [[Entry; 10]; 8] = [
    [
        e(1., 0, "000", 0), e(-1., 0, "200", 0), e(-1., 0, "200", 0), e(-1., 0, "200", 0), e(-1., 0, "200", 0),
        e(-1., 0, "200", 0), e(-1., 0, "200", 0), e(-1., 0, "200", 0), e(1., 0, "000", 0), e(1., 0, "000", 0),
    ],
    [
        e(1., 0, "001", 0), e(-1., 0, "201", 0), e(-1., 0, "201", 0), e(-1., 0, "201", 0), e(-1., 0, "201", 0),
        e(-1., 0, "202", 0), e(-1., 0, "202", 0), e(-1., 0, "201", 0), e(1., 0, "001", 0), e(1., 0, "001", 0),
    ],
    [
        e(1., 0, "010", 0), e(-1., 0, "210", 0), e(-1., 0, "220", 0), e(-1., 0, "220", 0), e(-1., 0, "210", 0),
        e(-1., 0, "210", 0), e(-1., 0, "210", 0), e(-1., 0, "210", 0), e(1., 0, "010", 0), e(1., 0, "010", 0),
    ],
    [
        e(1., 0, "011", 0), e(-1., 0, "211", 0), e(-1., 0, "221", 0), e(-1., 0, "221", 0), e(-1., 0, "211", 0),
        e(-1., 0, "212", 0), e(-1., 0, "212", 0), e(-1., 0, "211", 0), e(1., 0, "011", 0), e(1., 0, "011", 0),
    ],
    [
        e(1., 0, "200", 1), e(1., 0, "000", 1), e(1., 0, "000", 1), e(1., 0, "000", 1), e(1., 0, "000", 1),
        e(1., 0, "000", 1), e(1., 0, "000", 1), e(1., 0, "000", 1), e(1., 0, "200", 1), e(1., 0, "100", 0),
    ],
    [
        e(1., 0, "201", 1), e(1., 0, "001", 1), e(1., 0, "001", 1), e(1., 0, "001", 1), e(1., 0, "001", 1),
        e(1., 0, "002", 1), e(1., 1, "002", 1), e(1., 1, "001", 1), e(1., 1, "201", 1), e(1., 1, "101", 0),
    ],
    [
        e(1., 0, "210", 1), e(1., 0, "010", 1), e(1., 0, "020", 1), e(1., 2, "020", 1), e(1., 2, "010", 1),
        e(1., 2, "010", 1), e(1., 2, "010", 1), e(1., 2, "010", 1), e(1., 2, "210", 1), e(1., 2, "110", 0),
    ],
    [
        e(1., 0, "211", 1), e(1., 0, "011", 1), e(1., 0, "021", 1), e(1., 2, "021", 1), e(1., 2, "011", 1),
        e(1., 2, "012", 1), e(1., 3, "012", 1), e(1., 3, "011", 1), e(1., 3, "211", 1), e(1., 3, "111", 0),
    ],
];

/// Logical (2^n) single-qubit Hadamard on qubit `q` (qubit 0 most significant).
pub fn hadamard_on(n: usize, q: usize) -> DMatrix<C64> {
    let d = 1usize << n;
    let bit = n - 1 - q;
    DMatrix::from_fn(d, d, |r, c| {
        if (r ^ c) & !(1 << bit) != 0 {
            return ZERO;
        }
        let (rb, cb) = ((r >> bit) & 1, (c >> bit) & 1);
        let s = if rb == 1 && cb == 1 { -FRAC_1_SQRT_2 } else { FRAC_1_SQRT_2 };
        C64::new(s, 0.0)
    })
}

/// Diagonal gate adding `theta` when qubits `a` and `b` are both 1.
pub fn controlled_phase(n: usize, a: usize, b: usize, theta: f64) -> DMatrix<C64> {
    let d = 1usize << n;
    let on = |k: usize, q: usize| (k >> (n - 1 - q)) & 1 == 1;
    DMatrix::from_fn(d, d, |r, c| {
        if r != c {
            ZERO
        } else if on(r, a) && on(r, b) {
            C64::from_polar(1.0, theta)
        } else {
            ONE
        }
    })
}

/// The three-qubit Fourier circuit as a product of ideal gates:
/// H(3), phase(3,2; π/2), H(2), phase(1,2; π/2) phase(1,3; π/4), H(1).
pub fn ideal_qft_circuit() -> DMatrix<C64> {
    use std::f64::consts::FRAC_PI_2;
    let mut u = hadamard_on(3, 2);
    u = controlled_phase(3, 2, 1, FRAC_PI_2) * u;
    u = hadamard_on(3, 1) * u;
    u = controlled_phase(3, 0, 1, FRAC_PI_2) * controlled_phase(3, 0, 2, FRAC_PI_4) * u;
    hadamard_on(3, 0) * u
}

pub fn max_abs(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
