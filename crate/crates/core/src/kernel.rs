//! Kernel functions of the twisted XXZ chain.
//!
//! With `Δ = -cos γ`, the logarithmic Bethe equations read
//! `z_L(λ_i) = I_i / L` where
//!
//! ```text
//! z_L(λ) = s(λ) - (1/L) Σ_j r(λ - λ_j) + φ/L
//! s(λ)   = (1/π) arctan(tanh λ / tan(γ/2))
//! r(λ)   = (1/π) arctan(tanh λ / tan γ)
//! ```
//!
//! `r` is evaluated as `(1/π) arctan(tanh λ · cot γ)`, which is the principal
//! branch of `-(1/2iπ) log(-sinh(λ+iγ)/sinh(λ-iγ))` for every `γ ∈ (0, π)`,
//! continuous through `γ = π/2` where it vanishes identically.
//!
//! Fourier transforms use `f̂(ω) = ∫ f(x) e^{iωx} dx`. The closed forms are
//!
//! ```text
//! ŝ'(ω) = sinh((π-γ)ω/2) / sinh(πω/2)
//! r̂'(ω) = sinh((π-2γ)ω/2) / sinh(πω/2)
//! σ̂∞(ω) = 1 / (2 cosh(γω/2))
//! ```
//!
//! and they are taken as the definition off the strip `|Im ω| < 2`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `α = lim z_∞(λ)` as `λ → ∞`.
pub const ALPHA: f64 = 0.25;

/// How a user-supplied twist is to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TwistConvention {
    /// Twist of the Hamiltonian boundary condition.
    #[default]
    Physical,
    /// Twist entering the counting function (physical twist plus 1/2 when `M` is odd).
    Effective,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct ModelParams {
    /// Anisotropy angle, `Δ = -cos γ`.
    pub gamma: f64,
    /// Physical boundary twist.
    pub phi: f64,
    /// Number of sites `L`.
    pub length: usize,
    /// Number of Bethe roots `M` (down spins).
    pub num_roots: usize,
}

#[derive(Deserialize)]
struct RawParams {
    gamma: f64,
    phi: f64,
    length: usize,
    num_roots: usize,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        ModelParams::new(raw.gamma, raw.phi, raw.length, raw.num_roots)
    }
}

impl ModelParams {
    pub fn new(gamma: f64, phi: f64, length: usize, num_roots: usize) -> Result<Self> {
        check_gamma(gamma)?;
        if !phi.is_finite() {
            return Err(Error::domain(format!("twist must be finite, got {phi}")));
        }
        if length == 0 || length % 2 != 0 {
            return Err(Error::domain(format!("L must be even and positive, got {length}")));
        }
        if num_roots == 0 || 2 * num_roots > length {
            return Err(Error::domain(format!(
                "M must satisfy 1 <= M <= L/2, got M = {num_roots} for L = {length}"
            )));
        }
        Ok(ModelParams {
            gamma,
            phi,
            length,
            num_roots,
        })
    }

    /// Builds parameters from a twist given in either convention.
    pub fn with_twist(
        gamma: f64,
        phi: f64,
        convention: TwistConvention,
        length: usize,
        num_roots: usize,
    ) -> Result<Self> {
        let physical = match convention {
            TwistConvention::Physical => phi,
            TwistConvention::Effective => phi - odd_root_shift(num_roots),
        };
        ModelParams::new(gamma, physical, length, num_roots)
    }

    /// Twist entering the counting function; keeps every Bethe number half-integer.
    pub fn effective_twist(&self) -> f64 {
        self.phi + odd_root_shift(self.num_roots)
    }

    pub fn kernel(&self) -> Kernel {
        // gamma was validated on construction
        Kernel::new(self.gamma).expect("validated gamma")
    }
}

/// Shift added to the twist so that an odd number of roots carries half-integer numbers.
pub fn odd_root_shift(num_roots: usize) -> f64 {
    if num_roots % 2 == 1 {
        0.5
    } else {
        0.0
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < PI {
        Ok(())
    } else {
        Err(Error::domain(format!("gamma must lie in (0, π), got {gamma}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelConstants {
    /// `lim r(λ)` as `λ → ∞`, equal to `1/2 - γ/π`.
    pub r_inf: f64,
    pub alpha: f64,
    /// Fermi velocity `π/γ`; `σ∞` decays like `e^{-v_F |λ|}`.
    pub v_f: f64,
    /// Coupling constant `1 + 2 r_inf = 2(1 - γ/π)`.
    pub g: f64,
}

impl KernelConstants {
    pub fn new(gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        let r_inf = 0.5 - gamma / PI;
        Ok(KernelConstants {
            r_inf,
            alpha: ALPHA,
            v_f: PI / gamma,
            g: 1.0 + 2.0 * r_inf,
        })
    }
}

/// Kernel functions at a fixed, validated anisotropy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    gamma: f64,
    cot_half: f64,
    cot_full: f64,
    sin_gamma: f64,
    cos_gamma: f64,
    sin_half_sq: f64,
    sin_sq: f64,
}

impl Kernel {
    pub fn new(gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        let half = 0.5 * gamma;
        Ok(Kernel {
            gamma,
            cot_half: half.cos() / half.sin(),
            cot_full: gamma.cos() / gamma.sin(),
            sin_gamma: gamma.sin(),
            cos_gamma: gamma.cos(),
            sin_half_sq: half.sin().powi(2),
            sin_sq: gamma.sin().powi(2),
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn constants(&self) -> KernelConstants {
        KernelConstants::new(self.gamma).expect("validated gamma")
    }

    /// `lim s(λ)` as `λ → ∞`.
    pub fn s_inf(&self) -> f64 {
        0.5 - self.gamma / (2.0 * PI)
    }

    pub fn r_inf(&self) -> f64 {
        0.5 - self.gamma / PI
    }

    pub fn v_f(&self) -> f64 {
        PI / self.gamma
    }

    pub fn s(&self, lambda: f64) -> f64 {
        (lambda.tanh() * self.cot_half).atan() / PI
    }

    pub fn r(&self, lambda: f64) -> f64 {
        (lambda.tanh() * self.cot_full).atan() / PI
    }

    /// `s'(λ) = sin γ / (π (cosh 2λ - cos γ))`, written without cancellation.
    pub fn s_prime(&self, lambda: f64) -> f64 {
        let sh = lambda.sinh();
        self.sin_gamma / (2.0 * PI * (sh * sh + self.sin_half_sq))
    }

    /// `r'(λ) = sin 2γ / (π (cosh 2λ - cos 2γ))`.
    pub fn r_prime(&self, lambda: f64) -> f64 {
        let sh = lambda.sinh();
        self.sin_gamma * self.cos_gamma / (PI * (sh * sh + self.sin_sq))
    }

    /// Thermodynamic root density `σ∞(λ) = 1 / (2γ cosh(πλ/γ))`.
    pub fn density(&self, lambda: f64) -> f64 {
        1.0 / (2.0 * self.gamma * (PI * lambda / self.gamma).cosh())
    }

    /// Odd antiderivative of the density, `gd(πλ/γ) / 2π`.
    pub fn z_inf(&self, lambda: f64) -> f64 {
        (PI * lambda / self.gamma).sinh().atan() / (2.0 * PI)
    }

    pub fn z_inf_inverse(&self, x: f64) -> Result<f64> {
        if !(x.abs() < ALPHA) {
            return Err(Error::domain(format!("z_inf_inverse needs |x| < 1/4, got {x}")));
        }
        Ok(self.gamma / PI * (2.0 * PI * x).tan().asinh())
    }

    pub fn fourier_s_prime(&self, omega: Complex64) -> Result<Complex64> {
        sinh_ratio(0.5 * (PI - self.gamma), FRAC_PI_2, omega)
    }

    pub fn fourier_r_prime(&self, omega: Complex64) -> Result<Complex64> {
        sinh_ratio(0.5 * (PI - 2.0 * self.gamma), FRAC_PI_2, omega)
    }

    /// `d ŝ'(ω) / dω`, needed where `ŝ'(±i v_F)` vanishes.
    pub fn fourier_s_prime_derivative(&self, omega: Complex64) -> Result<Complex64> {
        let a = 0.5 * (PI - self.gamma);
        let b = FRAC_PI_2;
        let den = (omega * b).sinh();
        if den.norm() < POLE_EPS {
            return Err(pole(omega));
        }
        let num = (omega * a).cosh() * a * den - (omega * a).sinh() * (omega * b).cosh() * b;
        Ok(num / (den * den))
    }

    /// Closed-form transform of the density, `1 / (2 cosh(γω/2))`.
    pub fn fourier_density(&self, omega: Complex64) -> Result<Complex64> {
        let c = (omega * (0.5 * self.gamma)).cosh();
        if c.norm() < POLE_EPS {
            return Err(pole(omega));
        }
        Ok(Complex64::new(0.5, 0.0) / c)
    }

    /// Candidate zeros of `1 + r̂'` with modulus at most `cutoff`:
    /// `2ni/(1-γ/π)` and `(π/γ)(2m+1)i`, deduplicated and sorted by modulus.
    ///
    /// The `n = 0` member is kept; `1 + r̂'(0) = g` does not vanish. When `γ/π`
    /// is rational some candidates coincide with poles of `r̂'` and are not zeros.
    pub fn omega_set(&self, cutoff: f64) -> Vec<Complex64> {
        let mut ys: Vec<f64> = Vec::new();
        if cutoff >= 0.0 {
            let step = 2.0 / (1.0 - self.gamma / PI);
            let n_max = (cutoff / step).floor() as i64;
            for n in -n_max..=n_max {
                ys.push(n as f64 * step);
            }
            let v_f = self.v_f();
            let m_max = ((cutoff / v_f - 1.0) / 2.0).floor() as i64;
            for m in 0..=m_max {
                let y = v_f * (2 * m + 1) as f64;
                ys.push(y);
                ys.push(-y);
            }
        }
        ys.sort_by(|a, b| a.abs().total_cmp(&b.abs()).then(a.total_cmp(b)));
        ys.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(1.0));
        ys.into_iter().map(|y| Complex64::new(0.0, y)).collect()
    }

    /// `Some(n)` when `γ = π/n` for an integer `n ≥ 2`.
    pub fn pi_over_integer(&self) -> Option<u32> {
        let n = PI / self.gamma;
        let rounded = n.round();
        if rounded >= 2.0 && (n - rounded).abs() < 1e-10 * n {
            Some(rounded as u32)
        } else {
            None
        }
    }
}

const POLE_EPS: f64 = 1e-12;

fn pole(omega: Complex64) -> Error {
    Error::Pole {
        re: omega.re,
        im: omega.im,
    }
}

/// `sinh(aω) / sinh(bω)` for `b > |a|`, an even function of `ω`.
fn sinh_ratio(a: f64, b: f64, omega: Complex64) -> Result<Complex64> {
    if a == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let w = if omega.re < 0.0 { -omega } else { omega };
    if w.norm() < 1e-8 {
        return Ok((w * w * ((a * a - b * b) / 6.0) + 1.0) * (a / b));
    }
    if w.re * b > 20.0 {
        // both exponents have non-positive real part since b > |a|
        let num = ((w * (a - b)).exp()) - (w * (-a - b)).exp();
        let den = Complex64::new(1.0, 0.0) - (w * (-2.0 * b)).exp();
        return Ok(num / den);
    }
    let den = (w * b).sinh();
    let num = (w * a).sinh();
    if den.norm() < POLE_EPS {
        if num.norm() < POLE_EPS {
            // removable: both vanish on the imaginary axis
            return Ok((w * a).cosh() * a / ((w * b).cosh() * b));
        }
        return Err(pole(omega));
    }
    Ok(num / den)
}

pub fn s_fn(lambda: f64, gamma: f64) -> Result<f64> {
    Ok(Kernel::new(gamma)?.s(lambda))
}

pub fn r_fn(lambda: f64, gamma: f64) -> Result<f64> {
    Ok(Kernel::new(gamma)?.r(lambda))
}

pub fn s_prime(lambda: f64, gamma: f64) -> Result<f64> {
    Ok(Kernel::new(gamma)?.s_prime(lambda))
}

pub fn r_prime(lambda: f64, gamma: f64) -> Result<f64> {
    Ok(Kernel::new(gamma)?.r_prime(lambda))
}

pub fn sigma_inf(lambda: f64, gamma: f64) -> Result<f64> {
    Ok(Kernel::new(gamma)?.density(lambda))
}

pub fn z_inf(lambda: f64, gamma: f64) -> Result<f64> {
    Ok(Kernel::new(gamma)?.z_inf(lambda))
}

pub fn z_inf_inverse(x: f64, gamma: f64) -> Result<f64> {
    Kernel::new(gamma)?.z_inf_inverse(x)
}

pub fn kernel_fourier_s(omega: Complex64, gamma: f64) -> Result<Complex64> {
    Kernel::new(gamma)?.fourier_s_prime(omega)
}

pub fn kernel_fourier_r(omega: Complex64, gamma: f64) -> Result<Complex64> {
    Kernel::new(gamma)?.fourier_r_prime(omega)
}

pub fn omega_set(gamma: f64, cutoff: f64) -> Result<Vec<Complex64>> {
    Ok(Kernel::new(gamma)?.omega_set(cutoff))
}
