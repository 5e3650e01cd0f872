//! Circuit quality metrics and the optimization report.

use serde::Serialize;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gates::Unitary;

/// Number of two-qubit gates.
pub fn entangling_count(circuit: &Circuit) -> usize {
    circuit.gates.iter().filter(|g| g.op.is_entangling()).count()
}

/// Circuit depth counting only two-qubit gates: the longest chain of
/// entangling gates under the dependency order induced by shared qubits.
/// Single-qubit gates contribute nothing.
pub fn entangling_depth(circuit: &Circuit) -> usize {
    let mut wire_depth = vec![0usize; circuit.n_qubits];
    let mut depth = 0;
    for gate in &circuit.gates {
        if !gate.op.is_entangling() {
            continue;
        }
        let layer = gate
            .qubits
            .iter()
            .map(|&q| wire_depth[q])
            .max()
            .unwrap_or(0)
            + 1;
        for &q in &gate.qubits {
            wire_depth[q] = layer;
        }
        depth = depth.max(layer);
    }
    depth
}

/// Phase-invariant unitary overlap `|tr(u†v)| / d`.
pub fn idealized_fidelity(u: &Unitary, v: &Unitary) -> Result<f64> {
    if u.nrows() != v.nrows() || u.ncols() != v.ncols() {
        return Err(Error::DimensionMismatch(u.nrows(), v.nrows()));
    }
    let d = u.nrows() as f64;
    let trace = u.t().mapv(|x| x.conj()).dot(v).diag().sum();
    Ok(trace.norm() / d)
}

/// `F · pⁿ`: the idealized fidelity discounted per entangling gate.
pub fn estimated_fidelity(idealized: f64, entangling_count: usize, gate_fidelity: f64) -> f64 {
    idealized * gate_fidelity.powi(entangling_count as i32)
}

/// Which overlap normalization the report's fidelity numbers use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FidelityConvention {
    /// `|tr(u†v)|/d`.
    #[default]
    TraceAbs,
    /// `|tr(u†v)|²/d²`, for comparison with tools that square.
    TraceAbsSquared,
}

/// Per-window outcome recorded in the report.
#[derive(Clone, Debug, Serialize)]
pub struct WindowReport {
    /// Host-circuit qubits the window acts on, sorted.
    pub qubits: Vec<usize>,
    /// Host-circuit gate span `[start, end)`.
    pub gate_span: (usize, usize),
    /// Accepted optimizer iterations (search plus polish).
    pub iterations: usize,
    /// Objective evaluations (search plus polish).
    pub evaluations: usize,
    /// Host-circuit positions of deleted gates.
    pub eliminated_gates: Vec<usize>,
    /// Idealized fidelity of the re-tuned window against its own target.
    pub fidelity: f64,
    /// Window fell below the fidelity floor and was left unchanged.
    pub fell_back: bool,
    pub wall_time_seconds: f64,
}

/// Whole-circuit metrics for one optimization run.
#[derive(Clone, Debug, Serialize)]
pub struct OptimizationReport {
    pub input_entangling_count: usize,
    pub output_entangling_count: usize,
    pub input_entangling_depth: usize,
    pub output_entangling_depth: usize,
    /// Exact whole-circuit fidelity; absent above the simulation limit.
    pub idealized_fidelity: Option<f64>,
    /// `F·pⁿ` with `p = 1 − E`; `F` falls back to the product of window
    /// fidelities when the whole circuit is too large to simulate.
    pub estimated_fidelity: f64,
    pub fidelity_convention: FidelityConvention,
    pub wall_time_seconds: f64,
    pub windows: Vec<WindowReport>,
}

impl OptimizationReport {
    /// Re-expresses every fidelity field under the squared convention.
    pub fn squared(mut self) -> OptimizationReport {
        if self.fidelity_convention == FidelityConvention::TraceAbsSquared {
            return self;
        }
        self.fidelity_convention = FidelityConvention::TraceAbsSquared;
        self.idealized_fidelity = self.idealized_fidelity.map(|f| f * f);
        self.estimated_fidelity = self.estimated_fidelity * self.estimated_fidelity;
        for w in &mut self.windows {
            w.fidelity *= w.fidelity;
        }
        self
    }
}
