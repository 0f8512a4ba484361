//! Maximization of the final-state concurrence over the measurement phases.
//!
//! The concurrence of the delivered state `Σ e^{-iθ_mm'}√(λ_m η_m')|mm'⟩` has
//! the closed form
//! `2√( Σ_{k>k'} Σ_{m>m'} λ_k λ_k' η_m η_m' |e^{i(θ_km+θ_k'm')} − e^{i(θ_km'+θ_k'm)}|² )`,
//! which depends on θ only through the combinations
//! `θ_km + θ_k'm' − θ_km' − θ_k'm`. Row- and column-constant shifts are
//! gauge; the first row and column are pinned to zero during the search,
//! leaving `(d−1)²` free phases explored by coordinate descent with a
//! golden-section line search and random restarts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::entanglement::Concurrence;
use crate::error::{Error, Result};
use crate::measurement::PhaseMatrix;
use crate::tolerance;

/// Outcome of a phase search.
#[derive(Debug, Clone)]
pub struct OptimizationResult {
    pub theta_star: PhaseMatrix,
    pub c_star: Concurrence,
    /// Concurrence at the reference phases `θ_mm' = 2πmm'/d`.
    pub baseline_c: Concurrence,
    /// Coordinate sweeps used by the best restart.
    pub iterations: usize,
    pub converged: bool,
}

/// Search options. `restarts` counts searches beyond the one started at the
/// reference phases.
#[derive(Debug, Clone)]
pub struct OptimizeOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            restarts: 4,
            seed: 0,
            max_iters: 500,
            tol: 1e-9,
        }
    }
}

fn validate_inputs(lambda: &[f64], eta: &[f64]) -> Result<usize> {
    let d = lambda.len();
    if d < 2 || eta.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d.max(2),
            got: eta.len(),
        });
    }
    for w in lambda.iter().chain(eta) {
        if !w.is_finite() || *w < 0.0 {
            return Err(Error::InvalidWeights(format!("weight {w} must be nonnegative")));
        }
    }
    let (sl, se): (f64, f64) = (lambda.iter().sum(), eta.iter().sum());
    if (sl - 1.0).abs() > tolerance::global().max(1e-9) || (se - 1.0).abs() > tolerance::global().max(1e-9) {
        return Err(Error::InvalidWeights(format!(
            "weights must sum to 1 (got {sl} and {se})"
        )));
    }
    Ok(d)
}

/// Closed-form concurrence of the final state for the given phases.
pub fn final_state_concurrence(
    lambda: &[f64],
    eta: &[f64],
    theta: &PhaseMatrix,
) -> Result<Concurrence> {
    let d = validate_inputs(lambda, eta)?;
    if theta.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: theta.dim(),
        });
    }
    Ok(Concurrence::new(objective(lambda, eta, theta.matrix())))
}

// |e^{iA} − e^{iB}|² = 2 − 2cos(A − B)
fn objective(lambda: &[f64], eta: &[f64], theta: &nalgebra::DMatrix<f64>) -> f64 {
    let d = lambda.len();
    let mut total = 0.0;
    for k in 1..d {
        for kp in 0..k {
            for m in 1..d {
                for mp in 0..m {
                    let gap = theta[(k, m)] + theta[(kp, mp)] - theta[(k, mp)] - theta[(kp, m)];
                    total += lambda[k] * lambda[kp] * eta[m] * eta[mp] * (2.0 - 2.0 * gap.cos());
                }
            }
        }
    }
    2.0 * total.max(0.0).sqrt()
}

// Golden-section maximization on [a, b] for a unimodal objective.
fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > 1e-12 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

// Exact maximization over one phase entry: a coarse scan brackets the single
// harmonic, golden section refines it.
fn best_phase(f: &impl Fn(f64) -> f64) -> (f64, f64) {
    const SCAN: usize = 16;
    let step = std::f64::consts::TAU / SCAN as f64;
    let mut best_x = 0.0;
    let mut best_f = f(0.0);
    for i in 1..SCAN {
        let x = i as f64 * step;
        let v = f(x);
        if v > best_f {
            best_f = v;
            best_x = x;
        }
    }
    let (x, v) = golden_max(f, best_x - step, best_x + step);
    if v > best_f {
        (x.rem_euclid(std::f64::consts::TAU), v)
    } else {
        (best_x, best_f)
    }
}

struct SearchOutcome {
    theta: nalgebra::DMatrix<f64>,
    value: f64,
    sweeps: usize,
    converged: bool,
}

fn coordinate_descent(
    lambda: &[f64],
    eta: &[f64],
    mut theta: nalgebra::DMatrix<f64>,
    max_iters: usize,
    tol: f64,
) -> SearchOutcome {
    let d = lambda.len();
    let mut value = objective(lambda, eta, &theta);
    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < max_iters {
        sweeps += 1;
        let before = value;
        for k in 1..d {
            for m in 1..d {
                let f = |x: f64| {
                    let mut t = theta.clone();
                    t[(k, m)] = x;
                    objective(lambda, eta, &t)
                };
                let (x, v) = best_phase(&f);
                if v > value {
                    theta[(k, m)] = x;
                    value = v;
                }
            }
        }
        if value - before < tol {
            converged = true;
            break;
        }
    }
    SearchOutcome {
        theta,
        value,
        sweeps,
        converged,
    }
}

/// Maximize the final-state concurrence over the phase matrix.
///
/// Restart 0 starts at the reference phases `θ_mm' = 2πmm'/d` (so the result
/// never falls below the baseline); the remaining restarts start from
/// uniformly random free phases with restart-indexed RNG streams. The best
/// result is selected by `(objective, restart index)`.
pub fn optimize_phases(
    lambda: &[f64],
    eta: &[f64],
    options: &OptimizeOptions,
) -> Result<OptimizationResult> {
    let d = validate_inputs(lambda, eta)?;
    let baseline_theta = PhaseMatrix::bilinear(d, std::f64::consts::TAU / d as f64)?;
    let baseline_c = final_state_concurrence(lambda, eta, &baseline_theta)?;

    let searches: Vec<SearchOutcome> = (0..=options.restarts)
        .into_par_iter()
        .map(|restart| {
            let start = if restart == 0 {
                baseline_theta.matrix().clone()
            } else {
                let mut rng = ChaCha12Rng::seed_from_u64(options.seed);
                rng.set_stream(restart as u64);
                let mut t = nalgebra::DMatrix::<f64>::zeros(d, d);
                for k in 1..d {
                    for m in 1..d {
                        t[(k, m)] = rng.gen::<f64>() * std::f64::consts::TAU;
                    }
                }
                t
            };
            coordinate_descent(lambda, eta, start, options.max_iters, options.tol)
        })
        .collect();

    let (_, best) = searches
        .into_iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| {
            a.value
                .partial_cmp(&b.value)
                .unwrap()
                .then(ib.cmp(ia)) // prefer the lower restart index on ties
        })
        .expect("at least one restart");

    Ok(OptimizationResult {
        theta_star: PhaseMatrix::from_matrix(best.theta)?,
        c_star: Concurrence::new(best.value),
        baseline_c,
        iterations: best.sweeps,
        converged: best.converged,
    })
}
