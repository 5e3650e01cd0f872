//! Circuit intermediate representation, text formats, and the rebase pass.
//!
//! A [`Circuit`] is an ordered gate list over `n_qubits` wires plus a tracked
//! global phase. Gate lists apply left to right, so the circuit unitary is
//! the *right-to-left* matrix product `e^{iφ}·M_k⋯M_2·M_1`.

mod qasm;
mod rebase;

pub use rebase::{rebase, set_entangler};

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{apply_left, gate_matrix, GateKind, Unitary};
use crate::MAX_QUBITS;

/// A gate application: native parameterized rotations plus the fixed-angle
/// library gates accepted by the parser. Only the native five survive
/// [`rebase`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateOp {
    Rx(f64),
    Ry(f64),
    Rz(f64),
    Rzz(f64),
    Fecr(f64),
    H,
    X,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    Cx,
}

impl GateOp {
    pub fn name(self) -> &'static str {
        match self {
            GateOp::Rx(_) => "rx",
            GateOp::Ry(_) => "ry",
            GateOp::Rz(_) => "rz",
            GateOp::Rzz(_) => "rzz",
            GateOp::Fecr(_) => "fecr",
            GateOp::H => "h",
            GateOp::X => "x",
            GateOp::Z => "z",
            GateOp::S => "s",
            GateOp::Sdg => "sdg",
            GateOp::T => "t",
            GateOp::Tdg => "tdg",
            GateOp::Cx => "cx",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            GateOp::Rzz(_) | GateOp::Fecr(_) | GateOp::Cx => 2,
            _ => 1,
        }
    }

    pub fn is_entangling(self) -> bool {
        self.arity() == 2
    }

    /// The native kind and angle, if this already is a native gate.
    pub fn native(self) -> Option<(GateKind, f64)> {
        match self {
            GateOp::Rx(t) => Some((GateKind::Rx, t)),
            GateOp::Ry(t) => Some((GateKind::Ry, t)),
            GateOp::Rz(t) => Some((GateKind::Rz, t)),
            GateOp::Rzz(t) => Some((GateKind::Rzz, t)),
            GateOp::Fecr(t) => Some((GateKind::Fecr, t)),
            _ => None,
        }
    }

    pub fn from_native(kind: GateKind, angle: f64) -> Self {
        match kind {
            GateKind::Rx => GateOp::Rx(angle),
            GateKind::Ry => GateOp::Ry(angle),
            GateKind::Rz => GateOp::Rz(angle),
            GateKind::Rzz => GateOp::Rzz(angle),
            GateKind::Fecr => GateOp::Fecr(angle),
        }
    }

    pub fn angle(self) -> Option<f64> {
        self.native().map(|(_, t)| t)
    }

    /// The gate's matrix in the convention of [`crate::gates`].
    pub fn matrix(self) -> Unitary {
        use std::f64::consts::FRAC_1_SQRT_2;
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::i();
        if let Some((kind, theta)) = self.native() {
            return gate_matrix(kind, theta);
        }
        match self {
            GateOp::H => {
                let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
                Array2::from_shape_vec((2, 2), vec![r, r, r, -r]).unwrap()
            }
            GateOp::X => Array2::from_shape_vec((2, 2), vec![zero, one, one, zero]).unwrap(),
            GateOp::Z => Array2::from_diag(&ndarray::arr1(&[one, -one])),
            GateOp::S => Array2::from_diag(&ndarray::arr1(&[one, i])),
            GateOp::Sdg => Array2::from_diag(&ndarray::arr1(&[one, -i])),
            GateOp::T => Array2::from_diag(&ndarray::arr1(&[
                one,
                Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4),
            ])),
            GateOp::Tdg => Array2::from_diag(&ndarray::arr1(&[
                one,
                Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4),
            ])),
            GateOp::Cx => Array2::from_shape_vec(
                (4, 4),
                vec![
                    one, zero, zero, zero, //
                    zero, one, zero, zero, //
                    zero, zero, zero, one, //
                    zero, zero, one, zero,
                ],
            )
            .unwrap(),
            _ => unreachable!(),
        }
    }
}

/// One gate in a circuit. `error_rate` names the per-gate two-qubit error
/// rate `E`; it is only valid on entangling gates and falls back to the
/// noise model's default when absent.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub op: GateOp,
    pub qubits: Vec<usize>,
    pub error_rate: Option<f64>,
}

impl Gate {
    pub fn new(op: GateOp, qubits: Vec<usize>) -> Self {
        Gate {
            op,
            qubits,
            error_rate: None,
        }
    }

    pub fn with_error_rate(mut self, rate: f64) -> Self {
        self.error_rate = Some(rate);
        self
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        if self.qubits.len() != self.op.arity() {
            return Err(Error::ArityMismatch {
                name: self.op.name().to_string(),
                expected: self.op.arity(),
                actual: self.qubits.len(),
            });
        }
        for (i, &q) in self.qubits.iter().enumerate() {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    n_qubits,
                });
            }
            if self.qubits[..i].contains(&q) {
                return Err(Error::DuplicateQubits {
                    indices: self.qubits.clone(),
                });
            }
        }
        if let Some(rate) = self.error_rate {
            if !self.op.is_entangling() {
                return Err(Error::ErrorRateOnSingleQubitGate {
                    name: self.op.name().to_string(),
                });
            }
            if !(0.0..1.0).contains(&rate) {
                return Err(Error::InvalidErrorRate(rate));
            }
        }
        if let Some(angle) = self.op.angle() {
            if !angle.is_finite() {
                return Err(Error::Syntax {
                    line: 0,
                    column: 0,
                    message: format!("non-finite angle {angle} on `{}`", self.op.name()),
                });
            }
        }
        Ok(())
    }
}

/// Serialization format for [`Circuit::parse`] and [`Circuit::serialize`].
///
/// `Json` is the full-fidelity native format (keeps `global_phase` and
/// per-gate `error_rate`). `Qasm` is an OpenQASM-2-shaped subset: one
/// `qreg`, no classical registers, no measurement; it drops the global
/// phase and error rates on write.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Qasm,
}

/// Ordered gate list over `n_qubits` wires with a tracked global phase.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
    pub global_phase: f64,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            gates: Vec::new(),
            global_phase: 0.0,
        }
    }

    /// Appends a gate after validating it against this register.
    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        for gate in &self.gates {
            gate.validate(self.n_qubits)?;
        }
        if !self.global_phase.is_finite() {
            return Err(Error::Syntax {
                line: 0,
                column: 0,
                message: "non-finite global phase".into(),
            });
        }
        Ok(())
    }

    /// True when every gate is in the native parameterized set.
    pub fn is_native(&self) -> bool {
        self.gates.iter().all(|g| g.op.native().is_some())
    }

    /// The circuit unitary `e^{iφ}·M_k⋯M_1`.
    ///
    /// Rejects registers above [`MAX_QUBITS`]; larger circuits must go
    /// through the windowing pass.
    pub fn unitary(&self) -> Result<Unitary> {
        if self.n_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                n_qubits: self.n_qubits,
                max: MAX_QUBITS,
            });
        }
        let d = 1usize << self.n_qubits;
        let phase = Complex64::from_polar(1.0, self.global_phase);
        let mut u = Array2::from_diag(&ndarray::Array1::from_elem(d, phase));
        for gate in &self.gates {
            u = apply_left(&gate.op.matrix(), &gate.qubits, self.n_qubits, &u);
        }
        Ok(u)
    }

    pub fn parse(text: &str, format: Format) -> Result<Circuit> {
        let circuit = match format {
            Format::Json => from_json(text)?,
            Format::Qasm => qasm::parse(text)?,
        };
        circuit.validate()?;
        Ok(circuit)
    }

    pub fn serialize(&self, format: Format) -> String {
        match format {
            Format::Json => to_json(self),
            Format::Qasm => qasm::write(self),
        }
    }

    // Convenience builders, mainly for tests and hand-encoded circuits.

    pub fn rx(&mut self, qubit: usize, angle: f64) -> &mut Self {
        self.push(Gate::new(GateOp::Rx(angle), vec![qubit])).unwrap();
        self
    }

    pub fn ry(&mut self, qubit: usize, angle: f64) -> &mut Self {
        self.push(Gate::new(GateOp::Ry(angle), vec![qubit])).unwrap();
        self
    }

    pub fn rz(&mut self, qubit: usize, angle: f64) -> &mut Self {
        self.push(Gate::new(GateOp::Rz(angle), vec![qubit])).unwrap();
        self
    }

    pub fn rzz(&mut self, a: usize, b: usize, angle: f64) -> &mut Self {
        self.push(Gate::new(GateOp::Rzz(angle), vec![a, b])).unwrap();
        self
    }

    pub fn fecr(&mut self, a: usize, b: usize, angle: f64) -> &mut Self {
        self.push(Gate::new(GateOp::Fecr(angle), vec![a, b])).unwrap();
        self
    }
}

#[derive(Serialize, Deserialize)]
struct JsonCircuit {
    n_qubits: usize,
    #[serde(default)]
    global_phase: f64,
    gates: Vec<JsonGate>,
}

#[derive(Serialize, Deserialize)]
struct JsonGate {
    kind: String,
    qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    error_rate: Option<f64>,
}

fn op_from_parts(kind: &str, angle: Option<f64>) -> Result<GateOp> {
    let needs_angle = || -> Result<f64> {
        angle.ok_or_else(|| Error::Syntax {
            line: 0,
            column: 0,
            message: format!("gate `{kind}` requires an angle"),
        })
    };
    Ok(match kind {
        "rx" => GateOp::Rx(needs_angle()?),
        "ry" => GateOp::Ry(needs_angle()?),
        "rz" => GateOp::Rz(needs_angle()?),
        "rzz" => GateOp::Rzz(needs_angle()?),
        "fecr" => GateOp::Fecr(needs_angle()?),
        "h" => GateOp::H,
        "x" => GateOp::X,
        "z" => GateOp::Z,
        "s" => GateOp::S,
        "sdg" => GateOp::Sdg,
        "t" => GateOp::T,
        "tdg" => GateOp::Tdg,
        "cx" => GateOp::Cx,
        other => {
            return Err(Error::UnsupportedGate {
                name: other.to_string(),
                line: 0,
            })
        }
    })
}

fn from_json(text: &str) -> Result<Circuit> {
    let raw: JsonCircuit = serde_json::from_str(text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut circuit = Circuit::new(raw.n_qubits);
    circuit.global_phase = raw.global_phase;
    for g in raw.gates {
        let op = op_from_parts(&g.kind, g.angle)?;
        let mut gate = Gate::new(op, g.qubits);
        gate.error_rate = g.error_rate;
        circuit.gates.push(gate);
    }
    Ok(circuit)
}

fn to_json(circuit: &Circuit) -> String {
    let raw = JsonCircuit {
        n_qubits: circuit.n_qubits,
        global_phase: circuit.global_phase,
        gates: circuit
            .gates
            .iter()
            .map(|g| JsonGate {
                kind: g.op.name().to_string(),
                qubits: g.qubits.clone(),
                angle: g.op.angle(),
                error_rate: g.error_rate,
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&raw).expect("circuit serialization cannot fail");
    out.push('\n');
    out
}
