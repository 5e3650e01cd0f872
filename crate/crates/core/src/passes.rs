//! Compiler passes: window extraction, per-window re-tuning, zero-angle
//! gate elimination, and stitching.
//!
//! The pass never reorders, inserts, or retargets gates; it only adjusts
//! angles and deletes gates whose optimized angle lands within the
//! elimination threshold of zero, so the output entangling count can never
//! exceed the input's.

use std::f64::consts::PI;
use std::time::Instant;

use rayon::prelude::*;

use crate::ansatz::Ansatz;
use crate::circuit::{Circuit, Gate, GateOp};
use crate::error::{Error, Result};
use crate::merit::{evaluate, NoiseModel};
use crate::metrics::{
    entangling_count, entangling_depth, idealized_fidelity, FidelityConvention,
    OptimizationReport, WindowReport,
};
use crate::optimizer::{maximize, OptimizerConfig};
use crate::MAX_QUBITS;

/// A contiguous gate span acting on a bounded qubit subset, extracted as a
/// standalone sub-circuit with locally renumbered qubits.
#[derive(Clone, Debug)]
pub struct Window {
    /// Host-circuit qubits, sorted ascending; local qubit `i` is
    /// `qubits[i]`.
    pub qubits: Vec<usize>,
    /// Host-circuit gate index range `[start, end)`.
    pub span: (usize, usize),
    /// The extracted sub-circuit on `qubits.len()` local qubits.
    pub circuit: Circuit,
}

/// Pipeline configuration.
#[derive(Clone, Debug)]
pub struct PassConfig {
    /// Maximum window qubit count, between 2 and [`MAX_QUBITS`].
    pub window_size: usize,
    /// Angles at or below this magnitude (radians) snap to zero and the
    /// carrying gate is deleted.
    pub elimination_threshold: f64,
    /// Minimum acceptable per-window idealized fidelity; a window falling
    /// below it is returned unchanged. 0 trusts the merit.
    pub fidelity_floor: f64,
    pub noise: NoiseModel,
    pub optimizer: OptimizerConfig,
}

impl Default for PassConfig {
    fn default() -> Self {
        PassConfig {
            window_size: 4,
            elimination_threshold: 1e-4,
            fidelity_floor: 0.0,
            noise: NoiseModel::default(),
            optimizer: OptimizerConfig {
                // two perturbed starts break the parameter symmetries that
                // strand gradient descent on saddle points (equal-angle
                // same-pair entanglers being the canonical case)
                restarts: 2,
                ..OptimizerConfig::default()
            },
        }
    }
}

impl PassConfig {
    pub fn validate(&self) -> Result<()> {
        if !(2..=MAX_QUBITS).contains(&self.window_size) {
            return Err(Error::InvalidConfig(format!(
                "window_size {} outside 2..={MAX_QUBITS}",
                self.window_size
            )));
        }
        if self.elimination_threshold <= 0.0 {
            return Err(Error::InvalidConfig(
                "elimination_threshold must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Normalizes every rotation angle into `[−π, π]`, compensating each 2π
/// shift on the global phase (`R(θ) = e^{iπ}·R(θ−2π)` for all five native
/// kinds), so the unitary is preserved exactly.
pub fn canonicalize_angles(circuit: &Circuit) -> Circuit {
    let mut out = circuit.clone();
    for gate in &mut out.gates {
        if let Some((kind, angle)) = gate.op.native() {
            if angle.abs() > PI {
                let shifts = ((angle + PI) / (2.0 * PI)).floor();
                let reduced = angle - 2.0 * PI * shifts;
                gate.op = GateOp::from_native(kind, reduced);
                out.global_phase += PI * shifts;
            }
        }
    }
    out
}

/// Greedy forward scan into contiguous windows of at most `window_size`
/// qubits: starting at the first uncovered gate, absorb subsequent gates
/// while the union of their qubits still fits, emit the span, resume at
/// the first gate that did not fit. Every gate lands in exactly one window.
pub fn extract_windows(circuit: &Circuit, window_size: usize) -> Vec<Window> {
    let mut windows = Vec::new();
    let gates = &circuit.gates;
    let mut start = 0;
    while start < gates.len() {
        let mut qubits: Vec<usize> = gates[start].qubits.clone();
        qubits.sort_unstable();
        let mut end = start + 1;
        while end < gates.len() {
            let mut union = qubits.clone();
            for &q in &gates[end].qubits {
                if !union.contains(&q) {
                    union.push(q);
                }
            }
            if union.len() > window_size {
                break;
            }
            union.sort_unstable();
            qubits = union;
            end += 1;
        }
        let mut sub = Circuit::new(qubits.len());
        for gate in &gates[start..end] {
            let local: Vec<usize> = gate
                .qubits
                .iter()
                .map(|q| qubits.binary_search(q).expect("window covers its gates"))
                .collect();
            let mut g = Gate::new(gate.op, local);
            g.error_rate = gate.error_rate;
            sub.gates.push(g);
        }
        windows.push(Window {
            qubits,
            span: (start, end),
            circuit: sub,
        });
        start = end;
    }
    windows
}

/// The optimized replacement for one window plus its report fragment.
#[derive(Clone, Debug)]
pub struct WindowOutcome {
    pub circuit: Circuit,
    pub report: WindowReport,
}

fn prune(ansatz: &Ansatz, theta: &[f64], threshold: f64) -> (Circuit, Vec<usize>) {
    let mut kept = Circuit::new(ansatz.n_qubits());
    kept.global_phase = ansatz.global_phase();
    let mut eliminated = Vec::new();
    for (index, gate) in ansatz.structure().iter().enumerate() {
        let angle = theta[gate.param];
        if angle.abs() <= threshold && !ansatz.frozen()[gate.param] {
            eliminated.push(index);
            continue;
        }
        let mut g = Gate::new(GateOp::from_native(gate.kind, angle), gate.qubits.clone());
        g.error_rate = gate.error_rate;
        kept.gates.push(g);
    }
    (kept, eliminated)
}

/// Re-tunes one window: maximize the noisy merit from θ₀, snap angles within
/// the elimination threshold to zero and delete those gates, then polish the
/// survivors against the raw overlap (E = 0) to recover fidelity. Falls back
/// to the original sub-circuit when the result lands below the fidelity
/// floor.
pub fn optimize_window(
    window: &Window,
    window_index: usize,
    config: &PassConfig,
) -> Result<WindowOutcome> {
    let clock = Instant::now();
    let wrap = |e: Error| Error::Window {
        window: window_index,
        start: window.span.0,
        end: window.span.1,
        source: Box::new(e),
    };

    let target = window.circuit.unitary().map_err(wrap)?;
    let canonical = canonicalize_angles(&window.circuit);
    let ansatz = Ansatz::from_circuit(&canonical).map_err(wrap)?;

    let mut search_config = config.optimizer.clone();
    search_config.bounds = ansatz.default_bounds();
    search_config.seed = config.optimizer.seed.wrapping_add(window_index as u64);

    let noise = config.noise.clone();
    let objective = |theta: &[f64]| {
        let eval = evaluate(&target, &ansatz, theta, &noise)
            .expect("target and ansatz dimensions agree by construction");
        (eval.merit, eval.gradient)
    };
    let main = maximize(objective, ansatz.theta0(), &search_config).map_err(wrap)?;

    let (pruned, eliminated) = prune(&ansatz, &main.theta_star, config.elimination_threshold);
    let polished_ansatz = Ansatz::from_circuit(&pruned).map_err(wrap)?;
    let mut polish_config = search_config.clone();
    polish_config.bounds = polished_ansatz.default_bounds();
    polish_config.restarts = 0;
    let noiseless = NoiseModel::noiseless();
    let polish_objective = |theta: &[f64]| {
        let eval = evaluate(&target, &polished_ansatz, theta, &noiseless)
            .expect("target and ansatz dimensions agree by construction");
        (eval.merit, eval.gradient)
    };
    let polish = maximize(polish_objective, polished_ansatz.theta0(), &polish_config)
        .map_err(wrap)?;

    let tuned = polished_ansatz.bind(&polish.theta_star).map_err(wrap)?;
    let fidelity = idealized_fidelity(&target, &tuned.unitary().map_err(wrap)?).map_err(wrap)?;

    let iterations = main.iterations + polish.iterations;
    let evaluations = main.evaluations + polish.evaluations;
    let span = window.span;
    if fidelity < config.fidelity_floor {
        return Ok(WindowOutcome {
            circuit: window.circuit.clone(),
            report: WindowReport {
                qubits: window.qubits.clone(),
                gate_span: span,
                iterations,
                evaluations,
                eliminated_gates: Vec::new(),
                fidelity: 1.0,
                fell_back: true,
                wall_time_seconds: clock.elapsed().as_secs_f64(),
            },
        });
    }

    Ok(WindowOutcome {
        circuit: tuned,
        report: WindowReport {
            qubits: window.qubits.clone(),
            gate_span: span,
            iterations,
            evaluations,
            eliminated_gates: eliminated.iter().map(|local| span.0 + local).collect(),
            fidelity,
            fell_back: false,
            wall_time_seconds: clock.elapsed().as_secs_f64(),
        },
    })
}

/// Runs the full pass over a circuit of any size: extract windows, re-tune
/// each independently (in parallel), and stitch the results back in order.
pub fn optimize_circuit(
    circuit: &Circuit,
    config: &PassConfig,
) -> Result<(Circuit, OptimizationReport)> {
    config.validate()?;
    let clock = Instant::now();

    let windows = extract_windows(circuit, config.window_size);
    let outcomes: Vec<WindowOutcome> = windows
        .par_iter()
        .enumerate()
        .map(|(index, window)| optimize_window(window, index, config))
        .collect::<Result<_>>()?;

    let mut output = Circuit::new(circuit.n_qubits);
    output.global_phase = circuit.global_phase;
    for (window, outcome) in windows.iter().zip(&outcomes) {
        output.global_phase += outcome.circuit.global_phase;
        for gate in &outcome.circuit.gates {
            let global: Vec<usize> = gate.qubits.iter().map(|&q| window.qubits[q]).collect();
            let mut g = Gate::new(gate.op, global);
            g.error_rate = gate.error_rate;
            output.gates.push(g);
        }
    }

    let idealized = if circuit.n_qubits <= MAX_QUBITS {
        Some(idealized_fidelity(
            &circuit.unitary()?,
            &output.unitary()?,
        )?)
    } else {
        None
    };
    let window_product: f64 = outcomes.iter().map(|o| o.report.fidelity).product();
    let fidelity_proxy = idealized.unwrap_or(window_product);
    let output_count = entangling_count(&output);
    let gate_fidelity = 1.0 - config.noise.default_error_rate;
    let report = OptimizationReport {
        input_entangling_count: entangling_count(circuit),
        output_entangling_count: output_count,
        input_entangling_depth: entangling_depth(circuit),
        output_entangling_depth: entangling_depth(&output),
        idealized_fidelity: idealized,
        estimated_fidelity: crate::metrics::estimated_fidelity(
            fidelity_proxy,
            output_count,
            gate_fidelity,
        ),
        fidelity_convention: FidelityConvention::TraceAbs,
        wall_time_seconds: clock.elapsed().as_secs_f64(),
        windows: outcomes.into_iter().map(|o| o.report).collect(),
    };
    Ok((output, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::Unitary;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn max_abs_diff(a: &Unitary, b: &Unitary) -> f64 {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn canonicalize_preserves_unitary_exactly() {
        let mut c = Circuit::new(2);
        c.rz(0, 5.5).rzz(0, 1, -8.0).ry(1, 3.3).fecr(0, 1, 7.9);
        c.global_phase = 0.4;
        let canon = canonicalize_angles(&c);
        for gate in &canon.gates {
            let angle = gate.op.angle().unwrap();
            assert!(angle.abs() <= PI + 1e-12, "angle {angle} not canonical");
        }
        let diff = max_abs_diff(&c.unitary().unwrap(), &canon.unitary().unwrap());
        assert!(diff < 1e-12, "canonicalization drifted by {diff}");
    }

    #[test]
    fn canonicalize_leaves_in_range_angles_untouched() {
        let mut c = Circuit::new(1);
        c.rz(0, -PI).rx(0, PI).ry(0, 0.5);
        let canon = canonicalize_angles(&c);
        assert_eq!(canon, c);
    }

    #[test]
    fn window_single_fit() {
        let mut c = Circuit::new(2);
        c.ry(0, 0.1).rzz(0, 1, 0.2).rx(1, 0.3);
        let windows = extract_windows(&c, 4);
        assert_eq!(windows.len(), 1);
        assert_eq!(windows[0].span, (0, 3));
        assert_eq!(windows[0].qubits, vec![0, 1]);
    }

    #[test]
    fn window_absorbs_disjoint_pairs_up_to_size() {
        let mut c = Circuit::new(4);
        c.rzz(0, 1, 0.1).rzz(2, 3, 0.2).rzz(0, 1, 0.3);
        let windows = extract_windows(&c, 4);
        assert_eq!(windows.len(), 1);
        assert_eq!(windows[0].qubits, vec![0, 1, 2, 3]);
        assert_eq!(windows[0].span, (0, 3));
    }

    #[test]
    fn window_chain_splits_at_capacity() {
        let mut c = Circuit::new(6);
        c.rzz(0, 1, 0.1)
            .rzz(1, 2, 0.2)
            .rzz(2, 3, 0.3)
            .rzz(3, 4, 0.4)
            .rzz(4, 5, 0.5);
        let windows = extract_windows(&c, 4);
        assert_eq!(windows.len(), 2);
        assert_eq!(windows[0].span, (0, 3));
        assert_eq!(windows[0].qubits, vec![0, 1, 2, 3]);
        assert_eq!(windows[1].span, (3, 5));
        assert_eq!(windows[1].qubits, vec![3, 4, 5]);
        // local renumbering of the second window
        assert_eq!(windows[1].circuit.gates[0].qubits, vec![0, 1]);
        assert_eq!(windows[1].circuit.gates[1].qubits, vec![1, 2]);
    }

    #[test]
    fn windows_cover_every_gate_once() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(51);
        for _ in 0..30 {
            let n = rng.gen_range(2..=6);
            let mut c = Circuit::new(n);
            for _ in 0..rng.gen_range(0..30) {
                let a = rng.gen_range(0..n);
                if rng.gen_bool(0.4) {
                    c.ry(a, 0.3);
                } else {
                    let mut b = rng.gen_range(0..n);
                    while b == a {
                        b = rng.gen_range(0..n);
                    }
                    c.rzz(a, b, 0.7);
                }
            }
            let windows = extract_windows(&c, 4);
            let mut covered = 0;
            for (i, w) in windows.iter().enumerate() {
                assert_eq!(w.span.0, covered, "window {i} not contiguous");
                assert!(w.qubits.len() <= 4);
                covered = w.span.1;
                for g in &w.circuit.gates {
                    assert!(g.qubits.iter().all(|&q| q < w.qubits.len()));
                }
            }
            assert_eq!(covered, c.gates.len());
        }
    }

    #[test]
    fn adjacent_rzz_quarters_merge_to_half_pi() {
        let mut c = Circuit::new(2);
        c.rzz(0, 1, FRAC_PI_4).rzz(0, 1, FRAC_PI_4);
        let (out, report) = optimize_circuit(&c, &PassConfig::default()).unwrap();
        assert_eq!(entangling_count(&out), 1);
        let angle = out.gates[0].op.angle().unwrap();
        assert!(
            (angle - FRAC_PI_2).abs() < 1e-6,
            "merged angle {angle} not within 1e-6 of pi/2"
        );
        assert!(report.idealized_fidelity.unwrap() > 0.999999);
    }

    #[test]
    fn already_optimal_window_unchanged_count() {
        let mut c = Circuit::new(2);
        c.rzz(0, 1, FRAC_PI_2);
        let (out, report) = optimize_circuit(&c, &PassConfig::default()).unwrap();
        assert_eq!(entangling_count(&out), 1);
        assert!((report.idealized_fidelity.unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn empty_circuit_passes_through() {
        let c = Circuit::new(3);
        let (out, report) = optimize_circuit(&c, &PassConfig::default()).unwrap();
        assert_eq!(out.gates.len(), 0);
        assert_eq!(report.input_entangling_count, 0);
        assert_eq!(report.output_entangling_count, 0);
        assert!((report.idealized_fidelity.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_noise_is_an_exact_no_op() {
        let config = PassConfig {
            noise: NoiseModel::noiseless(),
            fidelity_floor: 1.0 - 1e-9,
            ..PassConfig::default()
        };
        let mut c = Circuit::new(3);
        c.ry(0, 0.7)
            .rzz(0, 1, 1.2)
            .rx(2, -0.5)
            .fecr(1, 2, -2.0)
            .rz(1, 0.9);
        let (out, report) = optimize_circuit(&c, &config).unwrap();
        let diff = max_abs_diff(&c.unitary().unwrap(), &out.unitary().unwrap());
        assert!(diff < 1e-8, "zero-noise run moved the unitary by {diff}");
        assert_eq!(report.output_entangling_count, 2);
    }

    #[test]
    fn fallback_restores_original_below_floor() {
        // a tiny-angle entangler would be deleted at a small fidelity cost;
        // a floor at 1 − 1e-12 forbids even that
        let mut c = Circuit::new(2);
        c.rzz(0, 1, 5e-5).ry(0, 0.4);
        let config = PassConfig {
            noise: NoiseModel::noiseless(),
            fidelity_floor: 1.0 - 1e-12,
            ..PassConfig::default()
        };
        let (out, report) = optimize_circuit(&c, &config).unwrap();
        assert!(report.windows[0].fell_back);
        assert_eq!(out, c);
    }

    #[test]
    fn structure_is_a_subsequence_of_the_input() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(52);
        let mut c = Circuit::new(3);
        for _ in 0..12 {
            let a = rng.gen_range(0..3);
            if rng.gen_bool(0.5) {
                c.ry(a, rng.gen_range(0.3..1.0f64));
            } else {
                let b = (a + 1) % 3;
                c.rzz(a, b, rng.gen_range(0.3..1.0f64));
            }
        }
        let (out, _) = optimize_circuit(&c, &PassConfig::default()).unwrap();
        // every output gate matches the next unmatched input gate's kind
        // and qubits, in order
        let mut input_iter = c.gates.iter();
        for gate in &out.gates {
            let found = input_iter.by_ref().any(|g| {
                g.op.name() == gate.op.name() && g.qubits == gate.qubits
            });
            assert!(found, "output gate has no matching input position");
        }
    }

    #[test]
    fn six_qubit_chain_never_increases_count() {
        let mut c = Circuit::new(6);
        c.rzz(0, 1, FRAC_PI_2)
            .rzz(1, 2, FRAC_PI_2)
            .rzz(2, 3, FRAC_PI_2)
            .rzz(3, 4, FRAC_PI_2)
            .rzz(4, 5, FRAC_PI_2);
        let (out, report) = optimize_circuit(&c, &PassConfig::default()).unwrap();
        assert!(entangling_count(&out) <= 5);
        assert!(report.idealized_fidelity.is_none());
        assert!(report.windows.len() == 2);
        assert!(report.estimated_fidelity > 0.0);
    }

    #[test]
    fn window_error_propagates_with_index() {
        let mut c = Circuit::new(2);
        c.push(Gate::new(GateOp::Cx, vec![0, 1])).unwrap();
        let err = optimize_circuit(&c, &PassConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Window { window: 0, .. }));
    }

    #[test]
    fn bad_config_rejected() {
        let config = PassConfig { window_size: 1, ..PassConfig::default() };
        assert!(optimize_circuit(&Circuit::new(2), &config).is_err());
        let config = PassConfig { window_size: 9, ..PassConfig::default() };
        assert!(optimize_circuit(&Circuit::new(2), &config).is_err());
        let config = PassConfig { elimination_threshold: 0.0, ..PassConfig::default() };
        assert!(optimize_circuit(&Circuit::new(2), &config).is_err());
    }
}
