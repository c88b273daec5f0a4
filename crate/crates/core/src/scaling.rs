//! Finite-size scans over sequences of chain lengths and extraction of the
//! `1/L²` energy amplitude.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kernel::{ModelParams, TwistConvention};
use crate::observables::{energy, momentum};
use crate::solver::{rescaled_guess, solve, solve_from, BetheState, SolverOptions};
use crate::states::StateTemplate;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub gamma: f64,
    pub phi: f64,
    #[serde(default)]
    pub twist: TwistConvention,
    #[serde(default)]
    pub template: StateTemplate,
    #[serde(default)]
    pub options: SolverOptions,
}

impl ScanConfig {
    pub fn ground(gamma: f64, phi: f64) -> Self {
        ScanConfig {
            gamma,
            phi,
            twist: TwistConvention::Physical,
            template: StateTemplate::ground(),
            options: SolverOptions::default(),
        }
    }

    pub fn params(&self, length: usize) -> Result<ModelParams> {
        let m = self.template.num_roots(length)?;
        ModelParams::with_twist(self.gamma, self.phi, self.twist, length, m)
    }

    pub fn solve_cold(&self, length: usize) -> Result<BetheState> {
        let params = self.params(length)?;
        solve(&params, &self.template.numbers(length)?, &self.options)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartMode {
    /// Sequential; each length starts from the rescaled roots of the previous one.
    #[default]
    Warm,
    /// Independent thermodynamic guesses, solved in parallel.
    Cold,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSeries {
    pub config: ScanConfig,
    pub l_values: Vec<usize>,
    pub e_values: Vec<f64>,
    pub p_values: Vec<f64>,
    pub iterations: Vec<usize>,
    pub residuals: Vec<f64>,
}

impl ScanSeries {
    pub fn total_iterations(&self) -> usize {
        self.iterations.iter().sum()
    }
}

fn tagged<T>(length: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Scan {
        length,
        source: Box::new(e),
    })
}

/// Solved states along `l_values`, which must be strictly increasing.
pub fn scan_states(config: &ScanConfig, l_values: &[usize], mode: StartMode) -> Result<Vec<BetheState>> {
    if let Some(w) = l_values.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::domain(format!("lengths must be strictly increasing, got {} then {}", w[0], w[1])));
    }
    match mode {
        StartMode::Cold => l_values.par_iter().map(|&l| tagged(l, config.solve_cold(l))).collect(),
        StartMode::Warm => {
            let mut out: Vec<BetheState> = Vec::with_capacity(l_values.len());
            for &l in l_values {
                let state = tagged(l, (|| match out.last() {
                    None => config.solve_cold(l),
                    Some(prev) => {
                        let params = config.params(l)?;
                        let numbers = config.template.numbers(l)?;
                        let guess = rescaled_guess(prev, &params, &numbers);
                        solve_from(&params, &numbers, guess, &config.options)
                    }
                })())?;
                out.push(state);
            }
            Ok(out)
        }
    }
}

pub fn series_from_states(config: &ScanConfig, states: &[BetheState]) -> ScanSeries {
    ScanSeries {
        config: config.clone(),
        l_values: states.iter().map(|s| s.params.length).collect(),
        e_values: states.iter().map(energy).collect(),
        p_values: states.iter().map(momentum).collect(),
        iterations: states.iter().map(|s| s.iterations).collect(),
        residuals: states.iter().map(|s| s.residual_max).collect(),
    }
}

pub fn scan(config: &ScanConfig, l_values: &[usize], mode: StartMode) -> Result<ScanSeries> {
    let states = scan_states(config, l_values, mode)?;
    Ok(series_from_states(config, &states))
}

/// Doubling sequence `start, 2 start, …` up to `stop` inclusive.
pub fn doubling(start: usize, stop: usize) -> Vec<usize> {
    std::iter::successors(Some(start), |&l| Some(2 * l)).take_while(|&l| l <= stop).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeFit {
    /// Extrapolated `c - 12(h+h̄)`.
    pub x_eff: f64,
    /// `(L, a(L))` with `a(L) = -6L²(e_L - e_∞)/(π v_F)`.
    pub raw: Vec<(usize, f64)>,
    /// Subleading exponent `p` from the last triple, if the differences had a consistent sign.
    pub exponent: Option<f64>,
    pub extrapolation_error: f64,
}

pub fn raw_amplitude(length: usize, e_l: f64, e_inf: f64, v_f: f64) -> f64 {
    let l = length as f64;
    -6.0 * l * l * (e_l - e_inf) / (PI * v_f)
}

/// Extrapolant and exponent of `a(L) = x + b L^{-p}` through three points.
fn richardson(points: &[(usize, f64)]) -> (f64, Option<f64>) {
    let [(l1, a1), (l2, a2), (l3, a3)] = [points[0], points[1], points[2]];
    let (d1, d2) = (a1 - a2, a2 - a3);
    if d1 == 0.0 || d2 == 0.0 || d1.signum() != d2.signum() {
        return (a3, None);
    }
    let (l1, l2, l3) = (l1 as f64, l2 as f64, l3 as f64);
    let ratio = |p: f64| (l1.powf(-p) - l2.powf(-p)) / (l2.powf(-p) - l3.powf(-p));
    let target = d1 / d2;
    // ratio(p) increases from its p → 0 limit ln(l2/l1)/ln(l3/l2)
    let (mut lo, mut hi) = (1e-6, 64.0);
    if target <= ratio(lo) || target >= ratio(hi) {
        return (a3, None);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ratio(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p = 0.5 * (lo + hi);
    let b = d2 / (l2.powf(-p) - l3.powf(-p));
    (a3 - b * l3.powf(-p), Some(p))
}

/// Richardson extrapolation over successive triples; the error is the spread
/// of the last two extrapolants.
pub fn extract_amplitude(series: &ScanSeries, e_inf: f64, v_f: f64) -> Result<AmplitudeFit> {
    let n = series.l_values.len();
    if n < 3 {
        return Err(Error::InsufficientPoints { required: 3, got: n });
    }
    let raw: Vec<(usize, f64)> = series
        .l_values
        .iter()
        .zip(&series.e_values)
        .map(|(&l, &e)| (l, raw_amplitude(l, e, e_inf, v_f)))
        .collect();
    let fits: Vec<(f64, Option<f64>)> = raw.windows(3).map(richardson).collect();
    let (x_eff, exponent) = *fits.last().unwrap();
    let extrapolation_error = match fits.len() {
        1 => (x_eff - raw[n - 1].1).abs(),
        k => (x_eff - fits[k - 2].0).abs(),
    };
    Ok(AmplitudeFit {
        x_eff,
        raw,
        exponent,
        extrapolation_error,
    })
}
