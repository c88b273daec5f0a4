//! Closed-form finite-size predictions: thermodynamic energy, `z_L(0)`,
//! amplitudes `A_{±i v_F}`, central charge and conformal weights.
//!
//! All twist arguments here are the effective twist entering the counting
//! function (see [`ModelParams::effective_twist`](crate::kernel::ModelParams::effective_twist)).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::Result;
use crate::kernel::{Kernel, ALPHA};
use crate::quad;
use crate::states::StateClassification;

/// How `ŝ'(±i v_F)` behaves at the given anisotropy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeKind {
    /// `ŝ'(i v_F)` finite and nonzero.
    Simple,
    /// `γ = π/n`, `n` odd: `ŝ'(i v_F) = 0`; the derivative takes its place.
    DoubleZero,
    /// `γ = π/n`, `n` even: `ŝ'(i v_F)` is infinite and the amplitudes vanish.
    Pole,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Amplitudes {
    /// Coefficient of `δ_{i v_F}`.
    pub plus: Complex64,
    /// Coefficient of `δ_{-i v_F}`.
    pub minus: Complex64,
    pub kind: AmplitudeKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CftPrediction {
    pub e_inf: f64,
    /// `z_L(0)` at order `1/L`.
    pub z_l0: f64,
    pub c: f64,
    pub h: f64,
    pub h_bar: f64,
    /// `c - 12(h+h̄)` in the energy formula; what a scan extracts as `x_eff`.
    pub x_eff: f64,
    pub e_l_pred: f64,
    pub p_l_pred: f64,
    pub a_plus: Complex64,
    pub a_minus: Complex64,
    pub double_zero: bool,
    pub amplitude_kind: AmplitudeKind,
}

/// `e_∞ = -2π ∫ s'(λ) σ∞(λ) dλ`.
pub fn e_infinity(gamma: f64) -> Result<f64> {
    let k = Kernel::new(gamma)?;
    // both factors are even; s'σ∞ decays like e^{-(2 + v_F)|λ|}
    let half = quad::integrate_half_line(|x| k.s_prime(x) * k.density(x), 2.0 + k.v_f(), quad::DEFAULT_TOL)?;
    Ok(-4.0 * PI * half)
}

pub fn coupling(gamma: f64) -> f64 {
    2.0 * (1.0 - gamma / PI)
}

pub fn central_charge(phi: f64, gamma: f64) -> f64 {
    1.0 - 12.0 * phi * phi / coupling(gamma)
}

/// `(φ - r_∞(n₊ - n₋)) / (g L)`.
pub fn z_l_zero_prediction(class: &StateClassification, phi: f64, gamma: f64, length: usize) -> f64 {
    let r_inf = 0.5 - gamma / PI;
    (phi - r_inf * (class.n_plus - class.n_minus)) / (coupling(gamma) * length as f64)
}

fn charges(class: &StateClassification, phi: f64) -> (f64, f64) {
    (class.n_plus + class.n_minus, class.n_plus - class.n_minus + 2.0 * phi)
}

/// `h, h̄ = (1/8)((n₊+n₋)√g ± (n₊-n₋+2φ)/√g)² + Δ±I`.
pub fn conformal_weights(class: &StateClassification, phi: f64, gamma: f64) -> (f64, f64) {
    let sg = coupling(gamma).sqrt();
    let (a, b) = charges(class, phi);
    let h = 0.125 * (a * sg + b / sg).powi(2) + class.delta_plus as f64;
    let h_bar = 0.125 * (a * sg - b / sg).powi(2) + class.delta_minus as f64;
    (h, h_bar)
}

/// `h - h̄ = ab/2 + Δ₊I - Δ₋I`, without differencing the squares.
pub fn spin(class: &StateClassification, phi: f64) -> f64 {
    let (a, b) = charges(class, phi);
    0.5 * a * b + class.delta_plus as f64 - class.delta_minus as f64
}

/// `(1/4)((n₊+n₋)²g + (n₊-n₋+4φ)(n₊-n₋)/g) + Δ₊I + Δ₋I`, the weight sum
/// paired with `c = 1 - 12φ²/g` in the energy.
pub fn energy_weight_sum(class: &StateClassification, phi: f64, gamma: f64) -> f64 {
    let g = coupling(gamma);
    let a = class.n_plus + class.n_minus;
    let d = class.n_plus - class.n_minus;
    0.25 * (a * a * g + (d + 4.0 * phi) * d / g) + (class.delta_plus + class.delta_minus) as f64
}

/// `c - 12(h+h̄)` of the energy formula.
pub fn x_eff_prediction(class: &StateClassification, phi: f64, gamma: f64) -> f64 {
    central_charge(phi, gamma) - 12.0 * energy_weight_sum(class, phi, gamma)
}

/// `e_∞ - (π v_F / 6L²)(c - 12(h+h̄))`.
pub fn energy_prediction(class: &StateClassification, phi: f64, gamma: f64, length: usize) -> Result<f64> {
    let e_inf = e_infinity(gamma)?;
    Ok(energy_prediction_with(e_inf, class, phi, gamma, length))
}

fn energy_prediction_with(e_inf: f64, class: &StateClassification, phi: f64, gamma: f64, length: usize) -> f64 {
    let l = length as f64;
    e_inf - PI * (PI / gamma) / (6.0 * l * l) * x_eff_prediction(class, phi, gamma)
}

/// `P_L = -(2π/L) α (n₊-n₋+2φ) + (2π/L²)(h - h̄)`, real convention `p_L = i P_L`.
pub fn momentum_prediction(class: &StateClassification, phi: f64, length: usize) -> f64 {
    let l = length as f64;
    let (_, b) = charges(class, phi);
    -2.0 * PI / l * ALPHA * b + 2.0 * PI / (l * l) * spin(class, phi)
}

/// Sum and difference combinations `(A₊ + A₋, A₊ - A₋)` with the `ŝ'` factor
/// left out, i.e. multiplied by `ŝ'(i v_F)`.
fn scaled_combinations(class: &StateClassification, phi: f64, gamma: f64, length: usize) -> (f64, f64) {
    let g = coupling(gamma);
    let v_f = PI / gamma;
    let l2 = (length as f64).powi(2);
    let (a, b) = charges(class, phi);
    let dp = class.delta_plus as f64;
    let dm = class.delta_minus as f64;
    let sum = -v_f / (12.0 * l2) * (-1.0 + 3.0 * a * a * g + 3.0 * b * b / g + 12.0 * (dp + dm));
    let diff = -v_f / l2 * (-0.5 * a * b + dm - dp);
    (sum, diff)
}

/// `A_{±i v_F}` at order `L⁻²`.
///
/// At `γ = π/n` with odd `n` the returned values are the constants of the
/// `δ'` terms, obtained with `(ŝ')'(i v_F)` in place of `ŝ'(i v_F)`.
pub fn amplitudes(class: &StateClassification, phi: f64, gamma: f64, length: usize) -> Result<Amplitudes> {
    let k = Kernel::new(gamma)?;
    let iv = Complex64::new(0.0, k.v_f());
    let (sum, diff) = scaled_combinations(class, phi, gamma, length);

    let (denominator, kind) = match k.pi_over_integer() {
        Some(n) if n % 2 == 0 => {
            return Ok(Amplitudes {
                plus: Complex64::new(0.0, 0.0),
                minus: Complex64::new(0.0, 0.0),
                kind: AmplitudeKind::Pole,
            })
        }
        Some(_) => (k.fourier_s_prime_derivative(iv)?, AmplitudeKind::DoubleZero),
        None => (k.fourier_s_prime(iv)?, AmplitudeKind::Simple),
    };
    // ŝ'(i v_F) = -cot(π²/2γ) is real; its derivative there is imaginary
    let (sum, diff) = (sum / denominator, diff / denominator);
    Ok(Amplitudes {
        plus: 0.5 * (sum + diff),
        minus: 0.5 * (sum - diff),
        kind,
    })
}

pub fn predict(class: &StateClassification, phi: f64, gamma: f64, length: usize) -> Result<CftPrediction> {
    let e_inf = e_infinity(gamma)?;
    let (h, h_bar) = conformal_weights(class, phi, gamma);
    let amp = amplitudes(class, phi, gamma, length)?;
    Ok(CftPrediction {
        e_inf,
        z_l0: z_l_zero_prediction(class, phi, gamma, length),
        c: central_charge(phi, gamma),
        h,
        h_bar,
        x_eff: x_eff_prediction(class, phi, gamma),
        e_l_pred: energy_prediction_with(e_inf, class, phi, gamma, length),
        p_l_pred: momentum_prediction(class, phi, length),
        a_plus: amp.plus,
        a_minus: amp.minus,
        double_zero: amp.kind == AmplitudeKind::DoubleZero,
        amplitude_kind: amp.kind,
    })
}
