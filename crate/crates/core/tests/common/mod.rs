//! Shared helpers for the integration suites.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use retune::circuit::{Circuit, Gate, GateOp};
use retune::gates::{GateKind, Unitary};

pub fn max_abs_diff(a: &Unitary, b: &Unitary) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// A random circuit over the native gate set. Angles are drawn uniformly
/// from ±[min_abs_angle, π].
pub fn random_native_circuit(
    rng: &mut ChaCha8Rng,
    n_qubits: usize,
    n_gates: usize,
    min_abs_angle: f64,
    with_error_rates: bool,
) -> Circuit {
    let mut c = Circuit::new(n_qubits);
    for _ in 0..n_gates {
        let kind = GateKind::ALL[rng.gen_range(0..GateKind::ALL.len())];
        let magnitude = rng.gen_range(min_abs_angle..=PI);
        let angle = if rng.gen_bool(0.5) { magnitude } else { -magnitude };
        if kind.arity() == 1 || n_qubits < 2 {
            let kind = if kind.arity() == 2 { GateKind::Rz } else { kind };
            c.push(Gate::new(
                GateOp::from_native(kind, angle),
                vec![rng.gen_range(0..n_qubits)],
            ))
            .unwrap();
        } else {
            let a = rng.gen_range(0..n_qubits);
            let mut b = rng.gen_range(0..n_qubits);
            while b == a {
                b = rng.gen_range(0..n_qubits);
            }
            let mut gate = Gate::new(GateOp::from_native(kind, angle), vec![a, b]);
            if with_error_rates && rng.gen_bool(0.25) {
                gate.error_rate = Some(rng.gen_range(0.0..0.05));
            }
            c.push(gate).unwrap();
        }
    }
    c
}

/// The two-qubit worked example: a quantum Fourier transform circuit over
/// {Ry, Rx, Rz, Rzz} with five entangling gates, encoded gate by gate from
/// its circuit diagram.
pub fn qft2_circuit() -> Circuit {
    let mut c = Circuit::new(2);
    c.ry(0, FRAC_PI_2)
        .ry(1, -FRAC_PI_2)
        .rx(0, PI)
        .rz(1, -3.0 * FRAC_PI_4)
        .rzz(0, 1, FRAC_PI_2)
        .ry(0, -FRAC_PI_4)
        .rz(0, -FRAC_PI_2)
        .rzz(0, 1, FRAC_PI_2)
        .ry(0, FRAC_PI_4)
        .ry(1, FRAC_PI_2)
        .rzz(0, 1, FRAC_PI_2)
        .rz(1, -FRAC_PI_2)
        .ry(0, FRAC_PI_2)
        .ry(1, -FRAC_PI_2)
        .rzz(0, 1, FRAC_PI_2)
        .rz(0, -FRAC_PI_2)
        .rz(1, -FRAC_PI_2)
        .ry(0, -FRAC_PI_2)
        .ry(1, FRAC_PI_2)
        .rzz(0, 1, FRAC_PI_2)
        .rz(0, FRAC_PI_2)
        .rz(1, FRAC_PI_2)
        .ry(1, FRAC_PI_2);
    c
}
