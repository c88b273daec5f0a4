//! Quadrature over finite intervals and over the real line.
//!
//! The double-exponential rule does the work on each panel; panels whose
//! error estimate misses the target are bisected. Half-line integrals of
//! exponentially decaying integrands are mapped onto `(0, 1]` with
//! `x = -ln(u) / rate`, which turns an `e^{-rate x}` tail into a bounded
//! integrand near `u = 0`.

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 24;
const ROUNDOFF_ULPS: f64 = 64.0;

/// Default absolute tolerance used by the observables and predictions.
pub const DEFAULT_TOL: f64 = 1e-14;

pub fn integrate<F>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate_panel(&f, a, b, abs_tol, 0)
}

fn integrate_panel<F>(f: &F, a: f64, b: f64, abs_tol: f64, depth: u32) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let out = quadrature::double_exponential::integrate(f, a, b, abs_tol);
    // below a few ulps of the panel value the estimate is round-off
    let floor = ROUNDOFF_ULPS * f64::EPSILON * out.integral.abs();
    if out.error_estimate <= abs_tol.max(floor) {
        return Ok(out.integral);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Quadrature {
            estimate: out.error_estimate,
            tolerance: abs_tol,
        });
    }
    let mid = 0.5 * (a + b);
    let left = integrate_panel(f, a, mid, 0.5 * abs_tol, depth + 1)?;
    let right = integrate_panel(f, mid, b, 0.5 * abs_tol, depth + 1)?;
    Ok(left + right)
}

/// `∫_0^∞ f(x) dx` for `f` decaying at least like `e^{-rate x}`.
pub fn integrate_half_line<F>(f: F, rate: f64, abs_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(rate > 0.0) {
        return Err(Error::domain(format!("decay rate must be positive, got {rate}")));
    }
    let mapped = |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let x = -u.ln() / rate;
        f(x) / (rate * u)
    };
    integrate(mapped, 0.0, 1.0, abs_tol)
}

/// `∫_{-∞}^{∞} f(x) dx`, split at the origin.
pub fn integrate_real_line<F>(f: F, rate: f64, abs_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let right = integrate_half_line(&f, rate, 0.5 * abs_tol)?;
    let left = integrate_half_line(|x| f(-x), rate, 0.5 * abs_tol)?;
    Ok(left + right)
}
