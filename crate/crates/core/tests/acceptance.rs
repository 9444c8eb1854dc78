//! One line per acceptance criterion, then a single assertion that all of
//! them passed.

mod common;

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::*;
use rand::{Rng, SeedableRng};
use squidgate_core::dynamics::{
    detuned_jc_hamiltonian, dispersive_hamiltonian, dispersive_propagator, expm_oracle, jc_detuned_exact_propagator,
    jc_resonant_propagator, microwave_hamiltonian, microwave_propagator, resonant_hamiltonian,
};
use squidgate_core::flux_levels::{solve_levels_auto, SquidCircuitParams};
use squidgate_core::scheduler::{
    build_hadamard, build_n_qubit_gate, build_ntcp_gate, build_phase_gate, build_qft3,
    build_simultaneous_multiphase_gate, build_three_qubit_gate, closed_form_tau, closed_form_tau_decomposed,
    decomposed_step_sum, emit_timing_curve, schedule_duration, simulate, simulate_trace, standard_thetas,
};
use squidgate_core::state_space::{basis_state, logical_restriction};
use squidgate_core::verification::{dispersive_validity_report, qft_check, truth_table};
use squidgate_core::{BasisLabel, DeviceParams, LogicalMap, SimulationMode, SpaceDescriptor, TargetPhase};

fn ac1_truth_table() {
    let start = Instant::now();
    let p = DeviceParams::reference(3);
    let s = build_three_qubit_gate(&p, FRAC_PI_2, FRAC_PI_4, false).unwrap();
    assert_eq!(s.step_count(), 10);
    let table = truth_table(&s, SpaceDescriptor::new(3, 2).unwrap(), SimulationMode::Analytic).unwrap();
    let elapsed = start.elapsed();
    let expected = [0.0, 0.0, 0.0, 0.0, 0.0, FRAC_PI_4, FRAC_PI_2, 3.0 * FRAC_PI_4];
    for (row, e) in table.rows.iter().zip(expected) {
        assert!((row.phase - e).abs() < 1e-10, "{} phase {}", row.input, row.phase);
        assert!((row.vacuum_population - 1.0).abs() < 1e-10);
        assert!(row.leakage < 1e-10);
    }
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
}

fn ac2_operator_algebra() {
    for n in 2..=4 {
        let p = DeviceParams::reference(n);
        let thetas = standard_thetas(n);
        let targets: Vec<TargetPhase> =
            thetas.iter().enumerate().map(|(i, &theta)| TargetPhase { squid: i + 1, theta }).collect();
        let space = SpaceDescriptor::new(n, 2).unwrap();
        let s = build_phase_gate(&p, 0, &targets, false).unwrap();
        let u = simulate(&s, space, SimulationMode::Analytic).unwrap();
        let dev = max_abs(u.matrix(), &operator_product(space, &thetas));
        assert!(dev < 1e-10, "n = {n}: {dev}");
    }
}

fn ac3_timing() {
    let p = DeviceParams::reference(3);
    let tau = closed_form_tau(3, &p).unwrap();
    assert!((tau * 1e9 - 9.16).abs() <= 0.01, "tau = {} ns", tau * 1e9);
    let dec = closed_form_tau_decomposed(3, &p).unwrap();
    assert!((dec * 1e9 - 10.36).abs() <= 0.01, "decomposed = {} ns", dec * 1e9);
    let summed = schedule_duration(&build_n_qubit_gate(&p, &standard_thetas(3)).unwrap());
    assert!((summed - tau).abs() <= 1e-12 * tau);
    let step_sum = decomposed_step_sum(3, &p).unwrap();
    assert!((step_sum - dec).abs() <= 1e-12 * dec);
    let ntcp = schedule_duration(&build_ntcp_gate(&p, 3).unwrap());
    assert!((ntcp * 1e9 - 12.0).abs() <= 0.5, "NTCP = {} ns", ntcp * 1e9);
}

fn ac4_timing_curve() {
    let p = DeviceParams::reference(10);
    let rows = emit_timing_curve(&p, 10).unwrap();
    assert_eq!(rows.first().unwrap().n, 2);
    assert_eq!(rows.last().unwrap().n, 10);
    for r in rows.iter().filter(|r| r.n >= 3) {
        assert!(r.gap() > 0.0, "n = {}", r.n);
    }
    for w in rows.windows(2) {
        assert!(w[1].gap() > w[0].gap(), "n = {}", w[1].n);
    }
}

fn ac5_dispersive_error() {
    let g = 3e9;
    let r = dispersive_validity_report(g, 10.0 * g, FRAC_PI_2).unwrap();
    assert!((r.p3_exact - 1.0 / 26.0).abs() < 1e-6, "{}", r.p3_exact);
    assert!((r.p3_exact - r.p3_formula).abs() < 1e-6);
    assert_eq!(format!("{:.2}", r.p3_exact), "0.04");
}

fn ac6_closed_form_vs_expm() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    for _ in 0..100 {
        let n = rng.gen_range(1..=2);
        let space = SpaceDescriptor::new(n, rng.gen_range(2..=3)).unwrap();
        let squid = rng.gen_range(0..n);
        let g = rng.gen_range(1e8..1e10);
        let delta = g * rng.gen_range(1.0..50.0);
        let t = rng.gen_range(0.0..3e-9);
        let omega = rng.gen_range(1e8..1e11);
        let phi = rng.gen_range(-3.2..3.2);
        let pair = PAIRS[rng.gen_range(0..6)];
        let checks = [
            (jc_resonant_propagator(space, squid, g, t).unwrap(), resonant_hamiltonian(space, squid, g).unwrap()),
            (
                dispersive_propagator(space, squid, g, delta, t).unwrap(),
                dispersive_hamiltonian(space, squid, g, delta).unwrap(),
            ),
            (
                jc_detuned_exact_propagator(space, squid, g, delta, t).unwrap(),
                detuned_jc_hamiltonian(space, squid, g, delta).unwrap(),
            ),
            (
                microwave_propagator(space, squid, pair, omega, phi, t).unwrap(),
                microwave_hamiltonian(space, squid, pair, omega, phi).unwrap(),
            ),
        ];
        for (closed, h) in checks {
            let dev = closed.max_deviation(&expm_oracle(&h, t).unwrap()).unwrap();
            assert!(dev < 1e-10, "{dev}");
        }
    }
}

fn ac7_qft() {
    let p = DeviceParams::reference(3);
    let u = simulate(&build_qft3(&p).unwrap(), SpaceDescriptor::new(3, 2).unwrap(), SimulationMode::Analytic).unwrap();
    let r = logical_restriction(&u, &LogicalMap::standard(3)).unwrap();
    let q = qft_check(&r).unwrap();
    assert!(q.fidelity_vs_dft > 1.0 - 1e-9, "{q:?}");
    let amp = 1.0 / 8f64.sqrt();
    for j in 0..8 {
        assert!((r[(j, 0)].re - amp).abs() < 1e-10 && r[(j, 0)].im.abs() < 1e-10);
    }
}

fn ac8_hadamard() {
    let p = DeviceParams::reference(1);
    let h = build_hadamard(&p, 0).unwrap();
    let space = SpaceDescriptor::new(1, 2).unwrap();
    let amp = |s: &squidgate_core::StateVector, l: &str| s.amplitude(&BasisLabel::ket(l, 0).unwrap()).unwrap();
    let s = FRAC_1_SQRT_2;
    // |0> -> |0> -> (|0>+|3>)/√2 -> (|0>+|1>)/√2
    // |1> -> -|3> -> (|0>-|3>)/√2 -> (|0>-|1>)/√2
    let expected: [[(&str, f64, &str, f64); 3]; 2] = [
        [("0", 1.0, "3", 0.0), ("0", s, "3", s), ("0", s, "1", s)],
        [("3", -1.0, "0", 0.0), ("0", s, "3", -s), ("0", s, "1", -s)],
    ];
    for (input, steps) in ["0", "1"].iter().zip(expected) {
        let psi = basis_state(space, &BasisLabel::ket(input, 0).unwrap()).unwrap();
        let trace = simulate_trace(&h, space, SimulationMode::Analytic, &psi).unwrap();
        for (got, (la, a, lb, b)) in trace.iter().zip(steps) {
            assert!((amp(&got.state, la) - real(a)).norm() < 1e-10);
            assert!((amp(&got.state, lb) - real(b)).norm() < 1e-10);
        }
    }
    let u = simulate(&h, space, SimulationMode::Analytic).unwrap();
    let sq = logical_restriction(&u.compose(&u).unwrap(), &LogicalMap::standard(1)).unwrap();
    assert!(max_abs(&sq, &nalgebra::DMatrix::identity(2, 2)) < 1e-10);
}

fn real(x: f64) -> squidgate_core::C64 {
    squidgate_core::C64::new(x, 0.0)
}

fn ac9_flux_solver() {
    let (c, l) = (1e-12, 1e-10);
    let p = SquidCircuitParams::new(c, l, 0.0, 0.0).unwrap();
    let levels = solve_levels_auto(&p, 4).unwrap();
    let w = 1.0 / (l * c).sqrt();
    for i in 0..3 {
        let rel = levels.omega(i, i + 1).unwrap() / w - 1.0;
        assert!(rel.abs() < 1e-6, "spacing {i}: {rel}");
    }
    assert!(levels.drift < 1e-6, "drift {}", levels.drift);
}

fn ac10_step_counts() {
    for n in 2..=6 {
        let p = DeviceParams::reference(n);
        assert_eq!(build_n_qubit_gate(&p, &standard_thetas(n)).unwrap().step_count(), 2 * n + 1);
        assert_eq!(build_ntcp_gate(&p, n).unwrap().step_count(), 5);
        let mut q = p.clone();
        // equal dispersive waits: Δ_k grows as 2^(k-2) for θ_k = π/2^(k-1)
        for k in 1..n {
            q.squid_mut(k).unwrap().delta = p.squid(k).unwrap().delta * 2f64.powi(k as i32 - 1);
        }
        assert_eq!(build_simultaneous_multiphase_gate(&q, &standard_thetas(n)).unwrap().step_count(), 5);
    }
}

#[test]
fn acceptance() {
    let criteria: [(&str, &str, fn()); 10] = [
        ("AC1", "three-qubit truth table, vacuum return and leakage", ac1_truth_table),
        ("AC2", "operator product equals simulated unitary, n = 2..4", ac2_operator_algebra),
        ("AC3", "closed-form and summed gate durations", ac3_timing),
        ("AC4", "decomposed-minus-multi gap positive and increasing", ac4_timing_curve),
        ("AC5", "peak level-3 occupation at detuning 10g", ac5_dispersive_error),
        ("AC6", "closed forms match Hermitian exponential, 100 draws", ac6_closed_form_vs_expm),
        ("AC7", "QFT schedule against the 8-point DFT", ac7_qft),
        ("AC8", "Hadamard superpositions and involution", ac8_hadamard),
        ("AC9", "flux solver harmonic limit and convergence", ac9_flux_solver),
        ("AC10", "step counts for n = 2..6", ac10_step_counts),
    ];
    let mut failed = Vec::new();
    for (id, what, check) in criteria {
        let ok = catch_unwind(AssertUnwindSafe(check)).is_ok();
        println!("[{}] {id} {what}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
