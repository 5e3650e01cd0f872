//! The noise-penalized figure of merit and its analytic gradient.
//!
//! The merit of a parameter point θ against a target unitary `T` is
//! `ℱ(θ)·|tr(T† U(θ))|`, where `U(θ)` is the bound ansatz unitary and the
//! fidelity multiplier `ℱ(θ)` is a product over entangling gates of
//! `(1 − E·ξ(θ))`. ξ maps an angle to a relative error weight with
//! `ξ(0) = 0` and `ξ(π/2) = 1`; its slope at zero rewards driving
//! entangling angles all the way to zero so the gate can be deleted.

use std::collections::BTreeMap;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ansatz::Ansatz;
use crate::error::{Error, Result};
use crate::gates::{apply_left, apply_right, gate_matrix, gate_matrix_derivative, Unitary};

/// Factor floor applied when `1 − E·ξ(θ)` would be non-positive at extreme
/// angles; bounded optimization keeps trajectories away from this region.
const MULTIPLIER_FLOOR: f64 = 1e-6;

/// Overlap magnitude below which the phase direction `z/|z|` is undefined;
/// the corresponding gradient term is taken as zero.
const DEGENERATE_OVERLAP: f64 = 1e-12;

/// The angle-to-error-weight shape ξ. All shapes are evaluated on |θ| and
/// satisfy ξ(0) = 0, ξ(π/2) = 1 exactly.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorShape {
    /// θ(3π−2θ)/π², steepest at zero; the default.
    #[default]
    Quadratic,
    /// 2θ/π.
    Linear,
    /// sin²θ.
    SinSquared,
}

impl ErrorShape {
    pub fn name(self) -> &'static str {
        match self {
            ErrorShape::Quadratic => "quadratic",
            ErrorShape::Linear => "linear",
            ErrorShape::SinSquared => "sin2",
        }
    }
}

impl std::str::FromStr for ErrorShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quadratic" => Ok(ErrorShape::Quadratic),
            "linear" => Ok(ErrorShape::Linear),
            "sin2" | "sin-squared" => Ok(ErrorShape::SinSquared),
            other => Err(Error::InvalidConfig(format!("unknown error shape `{other}`"))),
        }
    }
}

/// Error weight of an angle. Even in θ: sign flips do not reduce the
/// modeled error.
pub fn xi(theta: f64, shape: ErrorShape) -> f64 {
    let u = theta.abs() / std::f64::consts::PI;
    match shape {
        ErrorShape::Quadratic => u * (3.0 - 2.0 * u),
        ErrorShape::Linear => 2.0 * u,
        ErrorShape::SinSquared => theta.sin() * theta.sin(),
    }
}

/// dξ/dθ with the subgradient at the θ = 0 kink taken as 0.
pub fn xi_derivative(theta: f64, shape: ErrorShape) -> f64 {
    if theta == 0.0 {
        return 0.0;
    }
    let pi = std::f64::consts::PI;
    let u = theta.abs() / pi;
    let sign = theta.signum();
    match shape {
        ErrorShape::Quadratic => sign * (3.0 - 4.0 * u) / pi,
        ErrorShape::Linear => sign * 2.0 / pi,
        ErrorShape::SinSquared => (2.0 * theta).sin(),
    }
}

/// Depolarizing-style noise model: a default two-qubit error rate `E`, an
/// error shape, and optional per-gate overrides keyed by gate position.
///
/// The effective rate of a gate resolves in this order: the gate's own
/// `error_rate` from the circuit, then the model override for its position,
/// then the default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub default_error_rate: f64,
    pub shape: ErrorShape,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub overrides: BTreeMap<usize, f64>,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel {
            default_error_rate: 0.01,
            shape: ErrorShape::Quadratic,
            overrides: BTreeMap::new(),
        }
    }
}

impl NoiseModel {
    pub fn new(default_error_rate: f64, shape: ErrorShape) -> Result<Self> {
        if !(0.0..1.0).contains(&default_error_rate) {
            return Err(Error::InvalidErrorRate(default_error_rate));
        }
        Ok(NoiseModel {
            default_error_rate,
            shape,
            overrides: BTreeMap::new(),
        })
    }

    /// E = 0 everywhere: the merit reduces to the raw overlap.
    pub fn noiseless() -> Self {
        NoiseModel {
            default_error_rate: 0.0,
            shape: ErrorShape::Quadratic,
            overrides: BTreeMap::new(),
        }
    }

    pub fn with_override(mut self, gate: usize, rate: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&rate) {
            return Err(Error::InvalidErrorRate(rate));
        }
        self.overrides.insert(gate, rate);
        Ok(self)
    }

    fn rate_for(&self, gate_index: usize, gate_rate: Option<f64>) -> f64 {
        gate_rate
            .or_else(|| self.overrides.get(&gate_index).copied())
            .unwrap_or(self.default_error_rate)
    }
}

/// A merit evaluation at one parameter point.
#[derive(Clone, Debug)]
pub struct MeritEvaluation {
    /// `fidelity_multiplier × raw_overlap`.
    pub merit: f64,
    /// ℱ(θ) ∈ (0, 1].
    pub fidelity_multiplier: f64,
    /// `|tr(T† U(θ))|` ∈ [0, 2ⁿ].
    pub raw_overlap: f64,
    /// d merit / dθ, one entry per parameter.
    pub gradient: Vec<f64>,
    /// Some multiplier factor hit the floor.
    pub clamped: bool,
    /// `|tr| < 1e-12`; those gradient terms were taken as zero.
    pub degenerate_overlap: bool,
}

/// Per-gate multiplier factors and their θ-derivatives, indexed by
/// structure position.
fn multiplier_factors(
    ansatz: &Ansatz,
    theta: &[f64],
    noise: &NoiseModel,
) -> (Vec<f64>, Vec<f64>, bool) {
    let count = ansatz.structure().len();
    let mut factors = vec![1.0; count];
    let mut dfactors = vec![0.0; count];
    let mut clamped = false;
    for (index, gate) in ansatz.structure().iter().enumerate() {
        if !gate.kind.is_entangling() {
            continue;
        }
        let rate = noise.rate_for(index, gate.error_rate);
        let value = 1.0 - rate * xi(theta[gate.param], noise.shape);
        if value <= 0.0 {
            factors[index] = MULTIPLIER_FLOOR;
            clamped = true;
        } else {
            factors[index] = value;
            dfactors[index] = -rate * xi_derivative(theta[gate.param], noise.shape);
        }
    }
    (factors, dfactors, clamped)
}

/// ℱ(θ): the product over entangling gates of `(1 − E·ξ(θ))`, with each
/// non-positive factor clamped to a small floor. Single-qubit gates
/// contribute factor 1.
pub fn fidelity_multiplier(ansatz: &Ansatz, theta: &[f64], noise: &NoiseModel) -> Result<f64> {
    if theta.len() != ansatz.n_params() {
        return Err(Error::LengthMismatch {
            expected: ansatz.n_params(),
            actual: theta.len(),
        });
    }
    let (factors, _, _) = multiplier_factors(ansatz, theta, noise);
    Ok(factors.iter().product())
}

/// Evaluates the merit and its analytic gradient at θ.
///
/// The gradient uses the product rule with prefix/suffix sweeps, so the
/// whole vector costs O(n_params) gate applications rather than
/// O(n_params²).
pub fn evaluate(
    target: &Unitary,
    ansatz: &Ansatz,
    theta: &[f64],
    noise: &NoiseModel,
) -> Result<MeritEvaluation> {
    let n = ansatz.n_qubits();
    let d = 1usize << n;
    if target.nrows() != d || target.ncols() != d {
        return Err(Error::DimensionMismatch(target.nrows(), d));
    }
    if theta.len() != ansatz.n_params() {
        return Err(Error::LengthMismatch {
            expected: ansatz.n_params(),
            actual: theta.len(),
        });
    }
    let k = ansatz.n_params();
    let structure = ansatz.structure();

    let (factors, dfactors, clamped) = multiplier_factors(ansatz, theta, noise);
    let multiplier: f64 = factors.iter().product();
    // products of factors strictly before / strictly after each position
    let mut fac_prefix = vec![1.0; k + 1];
    for j in 0..k {
        fac_prefix[j + 1] = fac_prefix[j] * factors[j];
    }
    let mut fac_suffix = vec![1.0; k + 1];
    for j in (0..k).rev() {
        fac_suffix[j] = fac_suffix[j + 1] * factors[j];
    }

    let matrices: Vec<Unitary> = structure
        .iter()
        .map(|g| gate_matrix(g.kind, theta[g.param]))
        .collect();

    // prefixes[j] = M_{j-1}⋯M_1 · e^{iφ} (prefixes[0] is the phased identity)
    let phase = Complex64::from_polar(1.0, ansatz.global_phase());
    let mut prefixes = Vec::with_capacity(k + 1);
    prefixes.push(Array2::from_diag(&ndarray::Array1::from_elem(d, phase)));
    for (j, gate) in structure.iter().enumerate() {
        prefixes.push(apply_left(&matrices[j], &gate.qubits, n, &prefixes[j]));
    }

    let target_dagger = target.t().mapv(|v| v.conj());
    let overlap_trace = target_dagger.dot(&prefixes[k]).diag().sum();
    let raw_overlap = overlap_trace.norm();
    let merit = multiplier * raw_overlap;

    let degenerate = raw_overlap < DEGENERATE_OVERLAP;
    let phase_dir = if degenerate {
        Complex64::new(0.0, 0.0)
    } else {
        overlap_trace.conj() / raw_overlap
    };

    // Sweep j = k−1 … 0 with left[j] = T†·M_k⋯M_{j+1} maintained by
    // right-multiplication; d|z|/dθ_j = Re( z̄/|z| · tr(left·D_j·prefix_j) ).
    let mut gradient = vec![0.0; k];
    let mut left = target_dagger;
    for j in (0..k).rev() {
        let gate = &structure[j];
        let derivative = gate_matrix_derivative(gate.kind, theta[gate.param]);
        let d_prefix = apply_left(&derivative, &gate.qubits, n, &prefixes[j]);
        let mut trace = Complex64::new(0.0, 0.0);
        for r in 0..d {
            for c in 0..d {
                trace += left[[r, c]] * d_prefix[[c, r]];
            }
        }
        let overlap_term = (phase_dir * trace).re;
        let multiplier_derivative = dfactors[j] * fac_prefix[j] * fac_suffix[j + 1];
        gradient[gate.param] =
            multiplier_derivative * raw_overlap + multiplier * overlap_term;
        if j > 0 {
            left = apply_right(&left, &matrices[j], &gate.qubits, n);
        }
    }

    Ok(MeritEvaluation {
        merit,
        fidelity_multiplier: multiplier,
        raw_overlap,
        gradient,
        clamped,
        degenerate_overlap: degenerate,
    })
}
