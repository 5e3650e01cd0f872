//! Exact rewriting into the native parameterized gate set.
//!
//! Every decomposition preserves the circuit unitary *including global
//! phase*; the compensating phase of each identity is accumulated on the
//! output circuit.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};

use crate::circuit::{Circuit, Gate, GateOp};
use crate::error::{Error, Result};
use crate::gates::GateKind;

fn push_rotation(out: &mut Circuit, op: GateOp, qubits: &[usize]) {
    out.gates.push(Gate::new(op, qubits.to_vec()));
}

/// H = e^{iπ/2} · Ry(π/2) · Rz(π), applied as Rz(π) then Ry(π/2).
fn expand_h(out: &mut Circuit, q: usize) {
    push_rotation(out, GateOp::Rz(PI), &[q]);
    push_rotation(out, GateOp::Ry(FRAC_PI_2), &[q]);
    out.global_phase += FRAC_PI_2;
}

/// X = e^{iπ/2} · Rx(π).
fn expand_x(out: &mut Circuit, q: usize) {
    push_rotation(out, GateOp::Rx(PI), &[q]);
    out.global_phase += FRAC_PI_2;
}

/// Z-axis phase gates: e^{iφ/2} · Rz(φ).
fn expand_phase(out: &mut Circuit, q: usize, angle: f64, phase: f64) {
    push_rotation(out, GateOp::Rz(angle), &[q]);
    out.global_phase += phase;
}

/// CX = e^{i3π/4} · H_t · Rzz(π/2) · Rz(−π/2)_c · Rz(−π/2)_t · H_t
/// (right-to-left product; one entangler).
fn expand_cx(out: &mut Circuit, control: usize, target: usize, error_rate: Option<f64>) {
    expand_h(out, target);
    push_rotation(out, GateOp::Rz(-FRAC_PI_2), &[control]);
    push_rotation(out, GateOp::Rz(-FRAC_PI_2), &[target]);
    let mut rzz = Gate::new(GateOp::Rzz(FRAC_PI_2), vec![control, target]);
    rzz.error_rate = error_rate;
    out.gates.push(rzz);
    out.global_phase -= FRAC_PI_4;
    expand_h(out, target);
}

/// Rewrites a circuit into the native set `{Rx, Ry, Rz, Rzz, Fecr}`.
///
/// Gates already in the native set pass through untouched, so a native
/// circuit is returned unchanged.
pub fn rebase(circuit: &Circuit) -> Result<Circuit> {
    circuit.validate()?;
    let mut out = Circuit::new(circuit.n_qubits);
    out.global_phase = circuit.global_phase;
    for gate in &circuit.gates {
        match gate.op {
            GateOp::Rx(_) | GateOp::Ry(_) | GateOp::Rz(_) | GateOp::Rzz(_) | GateOp::Fecr(_) => {
                out.gates.push(gate.clone());
            }
            GateOp::H => expand_h(&mut out, gate.qubits[0]),
            GateOp::X => expand_x(&mut out, gate.qubits[0]),
            GateOp::Z => expand_phase(&mut out, gate.qubits[0], PI, FRAC_PI_2),
            GateOp::S => expand_phase(&mut out, gate.qubits[0], FRAC_PI_2, FRAC_PI_4),
            GateOp::Sdg => expand_phase(&mut out, gate.qubits[0], -FRAC_PI_2, -FRAC_PI_4),
            GateOp::T => expand_phase(&mut out, gate.qubits[0], FRAC_PI_4, FRAC_PI_8),
            GateOp::Tdg => expand_phase(&mut out, gate.qubits[0], -FRAC_PI_4, -FRAC_PI_8),
            GateOp::Cx => expand_cx(&mut out, gate.qubits[0], gate.qubits[1], gate.error_rate),
        }
    }
    Ok(out)
}

/// Converts every entangler of a native circuit to the target kind, exactly.
///
/// `Fecr(θ) = e^{iπ/2} · X_a · H_b · Rzz(θ)_{ab} · H_b` and conversely
/// `Rzz(θ)_{ab} = e^{−iπ/2} · H_b · X_a · Fecr(θ)_{ab} · H_b` (right-to-left
/// products), so the conversion costs single-qubit gates and phase only.
pub fn set_entangler(circuit: &Circuit, target: GateKind) -> Result<Circuit> {
    if !target.is_entangling() {
        return Err(Error::InvalidConfig(format!(
            "target entangler `{target}` is not a two-qubit gate"
        )));
    }
    let mut out = Circuit::new(circuit.n_qubits);
    out.global_phase = circuit.global_phase;
    for gate in &circuit.gates {
        match (gate.op, target) {
            (GateOp::Rzz(theta), GateKind::Fecr) => {
                let (a, b) = (gate.qubits[0], gate.qubits[1]);
                expand_h(&mut out, b);
                let mut fecr = Gate::new(GateOp::Fecr(theta), vec![a, b]);
                fecr.error_rate = gate.error_rate;
                out.gates.push(fecr);
                expand_x(&mut out, a);
                expand_h(&mut out, b);
                out.global_phase -= FRAC_PI_2;
            }
            (GateOp::Fecr(theta), GateKind::Rzz) => {
                let (a, b) = (gate.qubits[0], gate.qubits[1]);
                expand_h(&mut out, b);
                let mut rzz = Gate::new(GateOp::Rzz(theta), vec![a, b]);
                rzz.error_rate = gate.error_rate;
                out.gates.push(rzz);
                expand_h(&mut out, b);
                expand_x(&mut out, a);
                out.global_phase += FRAC_PI_2;
            }
            (op, _) if op.native().is_some() => out.gates.push(gate.clone()),
            (op, _) => {
                return Err(Error::NonNativeGate {
                    name: op.name().to_string(),
                })
            }
        }
    }
    Ok(out)
}
