//! The functional `S_L(φ) = (1/L) Σ φ(λ_i)` and the observables built on it.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::cft;
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::quad;
use crate::solver::BetheState;
use crate::states::classify;

/// Momentum is stored as the real `P_L` with `p_L = i P_L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservableRecord {
    pub e_l: f64,
    /// Total energy `L e_L`.
    pub total_energy: f64,
    pub p_l: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub f_l: Option<f64>,
}

impl ObservableRecord {
    pub fn new(state: &BetheState, lambda: Option<f64>) -> Result<Self> {
        let e_l = energy(state);
        Ok(ObservableRecord {
            e_l,
            total_energy: state.params.length as f64 * e_l,
            p_l: momentum(state),
            f_l: lambda.map(|l| transfer_log_eigenvalue(state, l)).transpose()?,
        })
    }
}

pub fn functional_s<F: Fn(f64) -> f64>(state: &BetheState, f: F) -> f64 {
    state.roots.iter().map(|&x| f(x)).sum::<f64>() / state.params.length as f64
}

/// `e_L = -2π S_L(s')`.
pub fn energy(state: &BetheState) -> f64 {
    let k = state.kernel();
    -2.0 * PI * functional_s(state, |x| k.s_prime(x))
}

pub fn total_energy(state: &BetheState) -> f64 {
    state.params.length as f64 * energy(state)
}

/// `P_L = 2π S_L(s)`.
pub fn momentum(state: &BetheState) -> f64 {
    let k = state.kernel();
    2.0 * PI * functional_s(state, |x| k.s(x))
}

fn check_spectral(gamma: f64, lambda: f64) -> Result<()> {
    if !(lambda > -0.5 * gamma && lambda < 0.0) {
        return Err(Error::domain(format!(
            "spectral parameter must lie in (-γ/2, 0) = ({}, 0), got {lambda}",
            -0.5 * gamma
        )));
    }
    Ok(())
}

/// `F_λ(μ) = log |sinh(iλ - μ - iγ/2) / sinh(iλ - μ + iγ/2)|`.
pub fn transfer_kernel(gamma: f64, lambda: f64, mu: f64) -> f64 {
    let sh = mu.sinh().powi(2);
    let num = sh + (lambda - 0.5 * gamma).sin().powi(2);
    let den = sh + (lambda + 0.5 * gamma).sin().powi(2);
    0.5 * (num / den).ln()
}

/// `f_L(λ) = log sin(λ + γ) + S_L(F_λ)` on `-γ/2 < λ < 0`.
pub fn transfer_log_eigenvalue(state: &BetheState, lambda: f64) -> Result<f64> {
    let gamma = state.params.gamma;
    check_spectral(gamma, lambda)?;
    Ok((lambda + gamma).sin().ln() + functional_s(state, |mu| transfer_kernel(gamma, lambda, mu)))
}

/// `f_∞(λ) = log sin(λ + γ) + ∫ F_λ σ∞`.
pub fn transfer_log_eigenvalue_infinity(gamma: f64, lambda: f64) -> Result<f64> {
    let k = Kernel::new(gamma)?;
    check_spectral(gamma, lambda)?;
    // F_λ is even in μ
    let half = quad::integrate_half_line(|mu| transfer_kernel(gamma, lambda, mu) * k.density(mu), k.v_f(), quad::DEFAULT_TOL)?;
    Ok((lambda + gamma).sin().ln() + 2.0 * half)
}

/// `S_∞(φ) = ∫ φ σ∞` for bounded `φ`.
pub fn s_infinity<F: Fn(f64) -> f64>(kernel: &Kernel, f: F) -> Result<f64> {
    quad::integrate_real_line(|x| f(x) * kernel.density(x), kernel.v_f(), quad::DEFAULT_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WlComparison {
    pub measured: f64,
    pub predicted: f64,
}

/// `w_L(φ) = S_L(φ) - S_∞(φ)` against `A₊ φ̂(i v_F) + A₋ φ̂(-i v_F)`.
///
/// `phi_hat_on_axis(y)` must return `φ̂(iy) = ∫ φ(x) e^{-yx} dx`. At `γ = π/n`
/// with odd `n` the amplitudes multiply `φ̂'` instead, which is obtained by a
/// central difference of `phi_hat_on_axis`.
pub fn w_l<F, G>(state: &BetheState, f: F, phi_hat_on_axis: G) -> Result<WlComparison>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let k = state.kernel();
    let measured = functional_s(state, &f) - s_infinity(&k, &f)?;
    let p = &state.params;
    let class = classify(&state.numbers, p.length);
    let amp = cft::amplitudes(&class, p.effective_twist(), p.gamma, p.length)?;
    let v = k.v_f();
    let predicted = match amp.kind {
        cft::AmplitudeKind::DoubleZero => {
            // φ̂'(ω) at ω = iy equals -i d/dy φ̂(iy)
            let h = 1e-4 * v;
            let d = |y: f64| (phi_hat_on_axis(y + h) - phi_hat_on_axis(y - h)) / (2.0 * h);
            let minus_i = num_complex::Complex64::new(0.0, -1.0);
            (amp.plus * minus_i * d(v) + amp.minus * minus_i * d(-v)).re
        }
        _ => (amp.plus * phi_hat_on_axis(v) + amp.minus * phi_hat_on_axis(-v)).re,
    };
    Ok(WlComparison { measured, predicted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::ModelParams;
    use crate::solver::{solve, SolverOptions};
    use crate::states::{ground_state_numbers, StateTemplate};

    fn ground(gamma: f64, phi: f64, l: usize) -> BetheState {
        let p = ModelParams::new(gamma, phi, l, l / 2).unwrap();
        solve(&p, &ground_state_numbers(l, l / 2).unwrap(), &SolverOptions::default()).unwrap()
    }

    #[test]
    fn functional_examples() {
        let st = ground(0.9, 0.0, 32);
        assert!((functional_s(&st, |_| 1.0) - 0.5).abs() < 1e-15);
        let k = st.kernel();
        assert!((functional_s(&st, |x| k.s_prime(x)) + energy(&st) / (2.0 * PI)).abs() < 1e-15);
        assert!(functional_s(&st, |x| x.powi(3) + x.sinh()).abs() < 1e-12);
        assert!(momentum(&st).abs() < 1e-12);
        let rec = ObservableRecord::new(&st, None).unwrap();
        assert_eq!(rec.total_energy, 32.0 * rec.e_l);
    }

    #[test]
    fn energy_invariant_under_reflection() {
        let st = ground(1.3, 0.0, 24);
        let mut flipped = st.clone();
        flipped.roots = st.roots.iter().rev().map(|x| -x).collect();
        assert_eq!(energy(&st).to_bits(), energy(&flipped).to_bits());
    }

    #[test]
    fn free_fermion_small_chain() {
        // γ = π/2, L = 8: roots are s⁻¹(I/L) and e_L reduces to a sum of cosines
        let st = ground(PI / 2.0, 0.0, 8);
        let direct: f64 = (0..4).map(|k| -2.0 * (PI * (2 * k + 1) as f64 / 8.0).sin()).sum::<f64>().abs();
        assert!((total_energy(&st) + direct).abs() < 1e-12, "{} {}", total_energy(&st), direct);
    }

    #[test]
    fn spectral_parameter_domain() {
        let st = ground(1.0, 0.0, 16);
        for bad in [0.0, 0.1, -0.5, -0.6] {
            assert!(transfer_log_eigenvalue(&st, bad).is_err());
        }
        assert!(transfer_log_eigenvalue(&st, -0.25).is_ok());
        assert!(transfer_log_eigenvalue_infinity(1.0, 0.0).is_err());
    }

    #[test]
    fn transfer_kernel_is_even_and_decays() {
        let (g, l) = (1.1, -0.3);
        for i in 0..50 {
            let mu = 0.13 * i as f64;
            assert!((transfer_kernel(g, l, mu) - transfer_kernel(g, l, -mu)).abs() < 1e-15);
        }
        assert!(transfer_kernel(g, l, 30.0).abs() < 1e-20);
    }

    #[test]
    fn transfer_infinity_is_smooth() {
        let g = 0.55 * PI;
        let pts: Vec<f64> = (1..40).map(|i| -0.5 * g * i as f64 / 40.0).collect();
        let vals: Vec<f64> = pts.iter().map(|&l| transfer_log_eigenvalue_infinity(g, l).unwrap()).collect();
        assert!(vals.iter().all(|v| v.is_finite()));
        let h = pts[0] - pts[1];
        for w in vals.windows(3) {
            assert!((w[0] - 2.0 * w[1] + w[2]).abs() / (h * h) < 10.0);
        }
    }

    #[test]
    fn s_infinity_of_constants_and_odd_functions() {
        let k = Kernel::new(0.8).unwrap();
        assert!((s_infinity(&k, |_| 1.0).unwrap() - 0.5).abs() < 1e-13);
        assert!(s_infinity(&k, |x| x.tanh()).unwrap().abs() < 1e-14);
        assert!((s_infinity(&k, |x| k.s(x)).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn w_l_vanishes_for_odd_functions_on_symmetric_states() {
        let g = 0.55 * PI;
        let t = StateTemplate::primary(1, 1);
        let n = t.numbers(64).unwrap();
        let p = ModelParams::new(g, 0.0, 64, n.len()).unwrap();
        let st = solve(&p, &n, &SolverOptions::default()).unwrap();
        let w = w_l(&st, |x| x * (-x * x).exp(), |y| 0.5 * PI.sqrt() * (-y) * (y * y / 4.0).exp()).unwrap();
        assert!(w.measured.abs() < 1e-12 && w.predicted.abs() < 1e-12, "{w:?}");
    }

    #[test]
    fn s_l_approaches_s_infinity() {
        // above π/2 no zero of 1 + r̂' lies closer to the real axis than i v_F
        let g = 0.7 * PI;
        let k = Kernel::new(g).unwrap();
        let f = |x: f64| (-x * x).exp();
        let exact = s_infinity(&k, f).unwrap();
        let d: Vec<f64> = [64usize, 128, 256, 512]
            .iter()
            .map(|&l| (functional_s(&ground(g, 0.0, l), f) - exact).abs())
            .collect();
        // leading correction is O(L⁻²)
        for w in d.windows(2) {
            assert!(w[0] / w[1] > 3.5 && w[0] / w[1] < 4.5, "{d:?}");
        }
    }

    #[test]
    fn gaussian_remainder_matches_amplitudes() {
        let st = ground(0.7 * PI, 0.0, 256);
        let w = w_l(&st, |x| (-x * x).exp(), |y| PI.sqrt() * (y * y / 4.0).exp()).unwrap();
        assert!((w.measured / w.predicted - 1.0).abs() < 1e-2, "{w:?}");
    }
}
