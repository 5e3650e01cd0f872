//! Bound-constrained quasi-Newton maximization.
//!
//! The search is an L-BFGS two-loop recursion with gradient projection onto
//! the bound box and a weak-Wolfe line search along the projected path
//! (backtracking when the first trial step overshoots, doubling while the
//! directional slope stays steep). Maximization runs as minimization of the
//! negated objective.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;
use std::collections::VecDeque;

use crate::error::{Error, Result};

const ARMIJO_C1: f64 = 1e-4;
const WOLFE_C2: f64 = 0.9;
const MAX_LINE_STEPS: usize = 60;
/// Std-dev in radians of the perturbation applied to θ₀ on each restart.
const RESTART_SIGMA: f64 = 0.1;
/// A restart replaces the incumbent only when it improves the merit by
/// more than this margin, so ties keep the unperturbed θ₀ run.
const RESTART_MARGIN: f64 = 1e-9;

/// Search configuration. `bounds` must contain one `(lo, hi)` pair per
/// parameter; [`crate::ansatz::Ansatz::default_bounds`] builds the default
/// box (entangling angles `[−π, π]`, single-qubit angles `[−2π, 2π]`).
#[derive(Clone, Debug, Serialize)]
pub struct OptimizerConfig {
    /// Stored curvature pairs for the two-loop recursion.
    pub memory_pairs: usize,
    pub max_iterations: usize,
    /// Convergence threshold on the ∞-norm of the projected gradient.
    pub gradient_tolerance: f64,
    /// Relative merit-improvement threshold.
    pub merit_tolerance: f64,
    pub bounds: Vec<(f64, f64)>,
    /// Extra seeded starts from perturbed θ₀; 0 keeps the single
    /// deterministic start.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            memory_pairs: 10,
            max_iterations: 500,
            gradient_tolerance: 1e-8,
            merit_tolerance: 1e-12,
            bounds: Vec::new(),
            restarts: 0,
            seed: 0,
        }
    }
}

/// Why the search stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    GradientConverged,
    MeritConverged,
    IterationCap,
}

#[derive(Clone, Debug)]
pub struct OptimizationResult {
    pub theta_star: Vec<f64>,
    pub merit_star: f64,
    /// Accepted iterations, summed over restarts.
    pub iterations: usize,
    /// Objective evaluations, summed over restarts.
    pub evaluations: usize,
    /// Termination reason of the winning run.
    pub termination: Termination,
}

fn clip(theta: &[f64], bounds: &[(f64, f64)]) -> Vec<f64> {
    theta
        .iter()
        .zip(bounds)
        .map(|(&t, &(lo, hi))| t.clamp(lo, hi))
        .collect()
}

fn validate(config: &OptimizerConfig, n_params: usize) -> Result<()> {
    if config.memory_pairs == 0 {
        return Err(Error::InvalidConfig("memory_pairs must be at least 1".into()));
    }
    if config.bounds.len() != n_params {
        return Err(Error::LengthMismatch {
            expected: n_params,
            actual: config.bounds.len(),
        });
    }
    for &(lo, hi) in &config.bounds {
        if lo > hi || lo.is_nan() || hi.is_nan() {
            return Err(Error::InvalidConfig(format!("invalid bound [{lo}, {hi}]")));
        }
    }
    Ok(())
}

struct Run {
    theta: Vec<f64>,
    merit: f64,
    iterations: usize,
    evaluations: usize,
    termination: Termination,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// One L-BFGS descent on f = −merit from a fixed start.
fn run_single<F>(objective: &mut F, start: &[f64], config: &OptimizerConfig) -> Result<Run>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let n = start.len();
    let bounds = &config.bounds;
    let mut eval = |theta: &[f64], evals: &mut usize| -> Result<(f64, Vec<f64>)> {
        let (merit, grad) = objective(theta);
        *evals += 1;
        if !merit.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFiniteObjective {
                theta: theta.to_vec(),
            });
        }
        Ok((-merit, grad.iter().map(|g| -g).collect()))
    };

    let mut evals = 0usize;
    let mut x = clip(start, bounds);
    let (mut fx, mut gx) = eval(&x, &mut evals)?;

    let mut s_store: VecDeque<Vec<f64>> = VecDeque::new();
    let mut y_store: VecDeque<Vec<f64>> = VecDeque::new();

    for iteration in 1..=config.max_iterations {
        // projected gradient: zero where a bound blocks descent
        let pg: Vec<f64> = (0..n)
            .map(|i| {
                let (lo, hi) = bounds[i];
                if (x[i] <= lo && gx[i] > 0.0) || (x[i] >= hi && gx[i] < 0.0) {
                    0.0
                } else {
                    gx[i]
                }
            })
            .collect();
        let pg_norm = pg.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if pg_norm <= config.gradient_tolerance {
            return Ok(Run {
                theta: x,
                merit: -fx,
                iterations: iteration - 1,
                evaluations: evals,
                termination: Termination::GradientConverged,
            });
        }

        // two-loop recursion for d = −H·g
        let mut q = gx.clone();
        let mut alphas = Vec::with_capacity(s_store.len());
        for (s, y) in s_store.iter().zip(y_store.iter()).rev() {
            let rho = 1.0 / dot(y, s);
            let a = rho * dot(s, &q);
            for (qi, yi) in q.iter_mut().zip(y) {
                *qi -= a * yi;
            }
            alphas.push((a, rho));
        }
        let gamma = match (s_store.back(), y_store.back()) {
            (Some(s), Some(y)) => dot(s, y) / dot(y, y),
            _ => 1.0 / pg_norm.max(1.0),
        };
        let mut r: Vec<f64> = q.iter().map(|v| gamma * v).collect();
        for (i, (s, y)) in s_store.iter().zip(y_store.iter()).enumerate() {
            let (a, rho) = alphas[alphas.len() - 1 - i];
            let beta = rho * dot(y, &r);
            for (ri, si) in r.iter_mut().zip(s) {
                *ri += si * (a - beta);
            }
        }
        let mut direction: Vec<f64> = r.iter().map(|v| -v).collect();
        if dot(&gx, &direction) >= 0.0 {
            direction = pg.iter().map(|v| -v).collect();
            s_store.clear();
            y_store.clear();
        }
        let slope = dot(&gx, &direction);

        // weak-Wolfe search along the projected path
        let mut alpha = 1.0;
        let mut best: Option<(Vec<f64>, f64, Vec<f64>)> = None;
        let mut extend_mode: Option<bool> = None;
        for _ in 0..MAX_LINE_STEPS {
            let xn: Vec<f64> = (0..n)
                .map(|i| (x[i] + alpha * direction[i]).clamp(bounds[i].0, bounds[i].1))
                .collect();
            let delta: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
            if delta.iter().all(|v| *v == 0.0) {
                break;
            }
            let (fn_, gn) = eval(&xn, &mut evals)?;
            let armijo = fn_ <= fx + ARMIJO_C1 * dot(&gx, &delta);
            let extending = *extend_mode.get_or_insert(armijo);
            if armijo {
                if best.as_ref().is_none_or(|(_, bf, _)| fn_ < *bf) {
                    best = Some((xn, fn_, gn));
                }
                if !extending || dot(best.as_ref().unwrap().2.as_slice(), &direction) >= WOLFE_C2 * slope
                {
                    break;
                }
                alpha *= 2.0;
            } else {
                if extending {
                    break;
                }
                alpha *= 0.5;
            }
        }

        let Some((xn, fn_, gn)) = best else {
            return Ok(Run {
                theta: x,
                merit: -fx,
                iterations: iteration,
                evaluations: evals,
                termination: Termination::MeritConverged,
            });
        };

        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&gx).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-10 * norm(&s) * norm(&y) {
            s_store.push_back(s);
            y_store.push_back(y);
            if s_store.len() > config.memory_pairs {
                s_store.pop_front();
                y_store.pop_front();
            }
        }
        let decrease = fx - fn_;
        x = xn;
        fx = fn_;
        gx = gn;
        if decrease <= config.merit_tolerance * fx.abs().max(1.0) {
            return Ok(Run {
                theta: x,
                merit: -fx,
                iterations: iteration,
                evaluations: evals,
                termination: Termination::MeritConverged,
            });
        }
    }

    Ok(Run {
        theta: x,
        merit: -fx,
        iterations: config.max_iterations,
        evaluations: evals,
        termination: Termination::IterationCap,
    })
}

/// Maximizes `objective` over the bound box, starting from `theta_init`
/// (clipped into the box if outside).
///
/// With `config.restarts > 0`, additional starts are drawn by perturbing
/// θ₀ with seeded Gaussian noise and the best merit wins; the result is
/// deterministic given `config.seed`. The accepted iterate sequence of each
/// run has non-decreasing merit, and every iterate stays inside the box.
pub fn maximize<F>(
    mut objective: F,
    theta_init: &[f64],
    config: &OptimizerConfig,
) -> Result<OptimizationResult>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    validate(config, theta_init.len())?;

    let mut best = run_single(&mut objective, theta_init, config)?;
    let mut iterations = best.iterations;
    let mut evaluations = best.evaluations;

    if config.restarts > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let noise = Normal::new(0.0, RESTART_SIGMA).expect("valid sigma");
        for _ in 0..config.restarts {
            let start: Vec<f64> = theta_init
                .iter()
                .map(|t| t + noise.sample(&mut rng))
                .collect();
            let run = run_single(&mut objective, &start, config)?;
            iterations += run.iterations;
            evaluations += run.evaluations;
            if run.merit > best.merit + RESTART_MARGIN * best.merit.abs().max(1.0) {
                best = run;
            }
        }
    }

    Ok(OptimizationResult {
        theta_star: best.theta,
        merit_star: best.merit,
        iterations,
        evaluations,
        termination: best.termination,
    })
}
