//! Fixed-structure ansatz over a flat parameter vector.
//!
//! Every gate of the source circuit gets its own fresh parameter, in gate
//! order; no parameter is shared. Binding the original angles back
//! reproduces the source circuit exactly.

use std::f64::consts::PI;

use crate::circuit::{Circuit, Gate, GateOp};
use crate::error::{Error, Result};
use crate::gates::GateKind;

/// One slot of the ansatz structure: a native gate whose angle is read from
/// `theta[param]`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzGate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub param: usize,
    pub error_rate: Option<f64>,
}

/// A native-gate circuit with its angles replaced by parameter indices.
#[derive(Clone, Debug, PartialEq)]
pub struct Ansatz {
    n_qubits: usize,
    structure: Vec<AnsatzGate>,
    theta0: Vec<f64>,
    frozen: Vec<bool>,
    global_phase: f64,
}

impl Ansatz {
    /// Builds the ansatz of a native circuit: one parameter per gate, in
    /// gate order, with `theta0` equal to the circuit's angles.
    pub fn from_circuit(circuit: &Circuit) -> Result<Self> {
        let mut structure = Vec::with_capacity(circuit.gates.len());
        let mut theta0 = Vec::with_capacity(circuit.gates.len());
        for (index, gate) in circuit.gates.iter().enumerate() {
            let Some((kind, angle)) = gate.op.native() else {
                return Err(Error::NonNativeGate {
                    name: gate.op.name().to_string(),
                });
            };
            structure.push(AnsatzGate {
                kind,
                qubits: gate.qubits.clone(),
                param: index,
                error_rate: gate.error_rate,
            });
            theta0.push(angle);
        }
        Ok(Ansatz {
            n_qubits: circuit.n_qubits,
            frozen: vec![false; structure.len()],
            structure,
            theta0,
            global_phase: circuit.global_phase,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.theta0.len()
    }

    pub fn theta0(&self) -> &[f64] {
        &self.theta0
    }

    pub fn structure(&self) -> &[AnsatzGate] {
        &self.structure
    }

    pub fn global_phase(&self) -> f64 {
        self.global_phase
    }

    /// Marks a parameter as fixed; [`default_bounds`](Self::default_bounds)
    /// pins frozen parameters to their initial value.
    pub fn freeze(&mut self, param: usize) {
        self.frozen[param] = true;
    }

    pub fn frozen(&self) -> &[bool] {
        &self.frozen
    }

    /// Binds a parameter vector back into a circuit with this structure.
    pub fn bind(&self, theta: &[f64]) -> Result<Circuit> {
        if theta.len() != self.n_params() {
            return Err(Error::LengthMismatch {
                expected: self.n_params(),
                actual: theta.len(),
            });
        }
        if let Some(bad) = theta.iter().find(|t| !t.is_finite()) {
            return Err(Error::NonFiniteObjective {
                theta: vec![*bad],
            });
        }
        let mut circuit = Circuit::new(self.n_qubits);
        circuit.global_phase = self.global_phase;
        for gate in &self.structure {
            let mut out = Gate::new(
                GateOp::from_native(gate.kind, theta[gate.param]),
                gate.qubits.clone(),
            );
            out.error_rate = gate.error_rate;
            circuit.gates.push(out);
        }
        Ok(circuit)
    }

    /// Per-parameter optimization box: entangling angles `[−π, π]`,
    /// single-qubit angles `[−2π, 2π]`, frozen parameters pinned to θ₀.
    pub fn default_bounds(&self) -> Vec<(f64, f64)> {
        let mut bounds = vec![(0.0, 0.0); self.n_params()];
        for gate in &self.structure {
            let limit = if gate.kind.is_entangling() { PI } else { 2.0 * PI };
            bounds[gate.param] = if self.frozen[gate.param] {
                (self.theta0[gate.param], self.theta0[gate.param])
            } else {
                (-limit, limit)
            };
        }
        bounds
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::Unitary;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    fn max_abs_diff(a: &Unitary, b: &Unitary) -> f64 {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    fn random_native_circuit(rng: &mut ChaCha8Rng, n: usize, n_gates: usize) -> Circuit {
        let mut c = Circuit::new(n);
        c.global_phase = rng.gen_range(-PI..PI);
        for _ in 0..n_gates {
            let kind = GateKind::ALL[rng.gen_range(0..GateKind::ALL.len())];
            let angle = rng.gen_range(-PI..PI);
            if kind.arity() == 1 || n < 2 {
                let kind = if kind.arity() == 2 { GateKind::Rz } else { kind };
                c.push(Gate::new(GateOp::from_native(kind, angle), vec![rng.gen_range(0..n)]))
                    .unwrap();
            } else {
                let a = rng.gen_range(0..n);
                let mut b = rng.gen_range(0..n);
                while b == a {
                    b = rng.gen_range(0..n);
                }
                c.push(Gate::new(GateOp::from_native(kind, angle), vec![a, b]))
                    .unwrap();
            }
        }
        c
    }

    #[test]
    fn one_parameter_per_gate_in_order() {
        let mut c = Circuit::new(2);
        c.ry(0, 0.1).rzz(0, 1, 0.2).rx(1, 0.3);
        let a = Ansatz::from_circuit(&c).unwrap();
        assert_eq!(a.n_params(), 3);
        let params: Vec<usize> = a.structure().iter().map(|g| g.param).collect();
        assert_eq!(params, vec![0, 1, 2]);
        assert_eq!(a.theta0(), &[0.1, 0.2, 0.3]);
    }

    #[test]
    fn empty_circuit_has_no_params() {
        let a = Ansatz::from_circuit(&Circuit::new(3)).unwrap();
        assert_eq!(a.n_params(), 0);
        let bound = a.bind(&[]).unwrap();
        assert_eq!(bound.gates.len(), 0);
    }

    #[test]
    fn non_native_gate_is_named() {
        let mut c = Circuit::new(2);
        c.push(Gate::new(GateOp::Cx, vec![0, 1])).unwrap();
        match Ansatz::from_circuit(&c) {
            Err(Error::NonNativeGate { name }) => assert_eq!(name, "cx"),
            other => panic!("expected NonNativeGate, got {other:?}"),
        }
    }

    #[test]
    fn bind_theta0_reproduces_source() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let c = random_native_circuit(&mut rng, 3, 10);
            let a = Ansatz::from_circuit(&c).unwrap();
            let bound = a.bind(a.theta0()).unwrap();
            assert_eq!(bound, c);
            let diff = max_abs_diff(&bound.unitary().unwrap(), &c.unitary().unwrap());
            assert!(diff < 1e-12);
        }
    }

    #[test]
    fn bind_length_mismatch() {
        let mut c = Circuit::new(1);
        c.rx(0, 0.5);
        let a = Ansatz::from_circuit(&c).unwrap();
        assert!(matches!(
            a.bind(&[0.1, 0.2]),
            Err(Error::LengthMismatch { expected: 1, actual: 2 })
        ));
    }

    #[test]
    fn bound_rzz_at_zero_is_identity() {
        let mut c = Circuit::new(2);
        c.rzz(0, 1, FRAC_PI_2);
        let a = Ansatz::from_circuit(&c).unwrap();
        let bound = a.bind(&[0.0]).unwrap();
        let u = bound.unitary().unwrap();
        let id = ndarray::Array2::eye(4).mapv(|x: f64| num_complex::Complex64::new(x, 0.0));
        assert!(max_abs_diff(&u, &id) == 0.0);
    }

    #[test]
    fn default_bounds_by_kind_and_frozen() {
        let mut c = Circuit::new(2);
        c.ry(0, 0.4).rzz(0, 1, 0.9);
        let mut a = Ansatz::from_circuit(&c).unwrap();
        assert_eq!(a.default_bounds(), vec![(-2.0 * PI, 2.0 * PI), (-PI, PI)]);
        a.freeze(1);
        assert_eq!(a.default_bounds()[1], (0.9, 0.9));
    }
}
