//! Damped Newton solver for the logarithmic Bethe equations with real roots.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{Kernel, ModelParams, ALPHA};
use crate::states::BetheNumberSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Convergence threshold on `max_i |z_L(λ_i) - I_i/L|`.
    pub tol: f64,
    pub max_iter: usize,
    /// Initial step fraction; halved on each failed line-search trial.
    pub damping: f64,
    pub max_halvings: u32,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-13,
            max_iter: 200,
            damping: 1.0,
            max_halvings: 30,
        }
    }
}

impl SolverOptions {
    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::domain(format!("tolerance must be positive, got {}", self.tol)));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::domain(format!("damping must lie in (0, 1], got {}", self.damping)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetheState {
    pub params: ModelParams,
    pub numbers: BetheNumberSet,
    /// Rapidities in increasing order, aligned with `numbers`.
    pub roots: Vec<f64>,
    pub residual_max: f64,
    pub iterations: usize,
}

impl BetheState {
    pub fn kernel(&self) -> Kernel {
        self.params.kernel()
    }

    pub fn counting_function(&self, lambda: f64) -> f64 {
        counting_function(&self.params, &self.roots, lambda)
    }
}

/// `z_L(λ) = s(λ) - (1/L) Σ_j r(λ - λ_j) + φ_eff/L` for trial roots.
pub fn counting_function(params: &ModelParams, roots: &[f64], lambda: f64) -> f64 {
    let kernel = params.kernel();
    let l = params.length as f64;
    let back: f64 = roots.iter().map(|&mu| kernel.r(lambda - mu)).sum();
    kernel.s(lambda) - back / l + params.effective_twist() / l
}

/// Thermodynamic guess `λ_i = z_∞⁻¹(I_i/L)`, clamped `1/(2L)` inside `±1/4`.
pub fn initial_guess(params: &ModelParams, numbers: &BetheNumberSet) -> Vec<f64> {
    let kernel = params.kernel();
    let l = params.length as f64;
    let edge = ALPHA - 0.5 / l;
    numbers
        .half_integers()
        .map(|i| {
            let x = (i / l).clamp(-edge, edge);
            kernel.z_inf_inverse(x).expect("clamped inside the domain")
        })
        .collect()
}

/// Residuals `F_i = z_L(λ_i) - I_i/L`.
pub fn residuals(params: &ModelParams, numbers: &BetheNumberSet, roots: &[f64]) -> Vec<f64> {
    let kernel = params.kernel();
    let l = params.length as f64;
    let twist = params.effective_twist();
    let m = roots.len();
    // r is odd: fill the antisymmetric table once
    let mut back = vec![0.0; m];
    for i in 0..m {
        for j in (i + 1)..m {
            let v = kernel.r(roots[i] - roots[j]);
            back[i] += v;
            back[j] -= v;
        }
    }
    roots
        .iter()
        .zip(numbers.half_integers())
        .zip(&back)
        .map(|((&lam, i), b)| kernel.s(lam) - b / l + twist / l - i / l)
        .collect()
}

/// Exact Jacobian `∂F_i/∂λ_k`: diagonal `s'(λ_i) - (1/L) Σ_{j≠i} r'(λ_i-λ_j)`,
/// off-diagonal `(1/L) r'(λ_i-λ_k)`. Symmetric.
pub fn jacobian(params: &ModelParams, roots: &[f64]) -> DMatrix<f64> {
    let kernel = params.kernel();
    let l = params.length as f64;
    let m = roots.len();
    let mut jac = DMatrix::zeros(m, m);
    for i in 0..m {
        for k in (i + 1)..m {
            let v = kernel.r_prime(roots[i] - roots[k]) / l;
            jac[(i, k)] = v;
            jac[(k, i)] = v;
        }
    }
    for i in 0..m {
        let off: f64 = jac.row(i).iter().sum();
        jac[(i, i)] = kernel.s_prime(roots[i]) - off;
    }
    jac
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn check_inputs(params: &ModelParams, numbers: &BetheNumberSet) -> Result<()> {
    if numbers.len() != params.num_roots {
        return Err(Error::InvalidNumbers(format!(
            "{} Bethe numbers supplied for M = {}",
            numbers.len(),
            params.num_roots
        )));
    }
    Ok(())
}

pub fn solve(params: &ModelParams, numbers: &BetheNumberSet, options: &SolverOptions) -> Result<BetheState> {
    check_inputs(params, numbers)?;
    let guess = initial_guess(params, numbers);
    solve_from(params, numbers, guess, options)
}

/// Newton iteration from a caller-supplied starting point (warm starts, continuation).
pub fn solve_from(
    params: &ModelParams,
    numbers: &BetheNumberSet,
    guess: Vec<f64>,
    options: &SolverOptions,
) -> Result<BetheState> {
    check_inputs(params, numbers)?;
    options.validate()?;
    if guess.len() != numbers.len() {
        return Err(Error::InvalidNumbers(format!(
            "initial guess has {} entries for M = {}",
            guess.len(),
            numbers.len()
        )));
    }
    if let Some(x) = guess.iter().find(|x| !x.is_finite()) {
        return Err(Error::domain(format!("initial guess contains {x}")));
    }

    let mut roots = guess;
    let mut f = residuals(params, numbers, &roots);
    let mut iterations = 0;

    while max_abs(&f) >= options.tol {
        if iterations >= options.max_iter {
            return Err(Error::NonConvergence {
                iterations,
                residual: max_abs(&f),
            });
        }
        let jac = jacobian(params, &roots);
        let rhs = DVector::from_iterator(f.len(), f.iter().map(|x| -x));
        let step = jac.lu().solve(&rhs).ok_or(Error::NonConvergence {
            iterations,
            residual: max_abs(&f),
        })?;

        let current = norm2(&f);
        let mut t = options.damping;
        let mut accepted = None;
        for _ in 0..=options.max_halvings {
            let trial: Vec<f64> = roots.iter().zip(step.iter()).map(|(x, dx)| x + t * dx).collect();
            let ft = residuals(params, numbers, &trial);
            if norm2(&ft) < (1.0 - 1e-4 * t) * current {
                accepted = Some((trial, ft));
                break;
            }
            t *= 0.5;
        }
        iterations += 1;
        match accepted {
            Some((trial, ft)) => {
                roots = trial;
                f = ft;
            }
            None => {
                return Err(Error::NonConvergence {
                    iterations,
                    residual: max_abs(&f),
                })
            }
        }
    }

    if let Some(index) = roots.windows(2).position(|w| !(w[0] < w[1])) {
        return Err(Error::OrderViolation {
            index,
            left: roots[index],
            right: roots[index + 1],
        });
    }

    Ok(BetheState {
        params: *params,
        numbers: numbers.clone(),
        residual_max: max_abs(&f),
        roots,
        iterations,
    })
}

/// Moves per-root data from one solved configuration onto another: entries
/// within a quarter of the previous root count from either edge are copied by
/// index from that edge (times `edge_scale`), the rest are interpolated in
/// `x = I/L` (times `bulk_scale`).
fn transport(
    values: &[f64],
    from: (&BetheNumberSet, &ModelParams),
    to: (&BetheNumberSet, &ModelParams),
    edge_scale: f64,
    bulk_scale: f64,
) -> Vec<f64> {
    let x_of = |numbers: &BetheNumberSet, params: &ModelParams| -> Vec<f64> {
        let l = params.length as f64;
        numbers.half_integers().map(|i| i / l).collect()
    };
    let xs = x_of(from.0, from.1);
    let targets = x_of(to.0, to.1);
    let (m_prev, m) = (values.len(), targets.len());
    let edge = m_prev / 4;
    targets
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let from_top = m - 1 - k;
            if k < edge {
                values[k] * edge_scale
            } else if from_top < edge {
                values[m_prev - 1 - from_top] * edge_scale
            } else {
                interpolate(&xs, values, x) * bulk_scale
            }
        })
        .collect()
}

/// Starting point for a new chain length from a solved state at another length.
///
/// Writing each root as `z_∞⁻¹(I/L)` plus a deviation: near the
/// edges the deviation depends on the distance to the edge and hardly on `L`,
/// so it is copied by index; in the bulk it behaves like `c(I/L)/L` and is
/// interpolated in `I/L` and rescaled.
pub fn rescaled_guess(previous: &BetheState, params: &ModelParams, numbers: &BetheNumberSet) -> Vec<f64> {
    let base = initial_guess(params, numbers);
    if previous.roots.len() < 2 {
        return base;
    }
    let prev_base = initial_guess(&previous.params, &previous.numbers);
    let dev: Vec<f64> = previous.roots.iter().zip(&prev_base).map(|(a, b)| a - b).collect();
    let scale = previous.params.length as f64 / params.length as f64;
    let moved = transport(&dev, (&previous.numbers, &previous.params), (numbers, params), 1.0, scale);
    base.iter().zip(moved).map(|(b, d)| b + d).collect()
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    match xs.iter().position(|&v| v >= x) {
        Some(0) => ys[0],
        None => *ys.last().unwrap(),
        Some(k) => {
            let (x0, x1) = (xs[k - 1], xs[k]);
            let w = (x - x0) / (x1 - x0);
            ys[k - 1] * (1.0 - w) + ys[k] * w
        }
    }
}
