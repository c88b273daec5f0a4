use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;

use bethe_core::characters::{partial_character, verify_degeneracy, DegeneracyReport};
use bethe_core::cft::{self, CftPrediction};
use bethe_core::ed::{build_and_diagonalize, match_bethe, MatchReport, SectorSpectrum};
use bethe_core::kernel::odd_root_shift;
use bethe_core::observables::{total_energy, w_l, ObservableRecord, WlComparison};
use bethe_core::scaling::{doubling, extract_amplitude, raw_amplitude, scan_states, series_from_states, AmplitudeFit, StartMode};
use bethe_core::states::{classify, ground_state_numbers};
use bethe_core::{solve as solve_state, BetheNumberSet, BetheState, ModelParams, StateClassification};
use serde::{Deserialize, Serialize};

use crate::config::parse_gamma;
use crate::{CharArgs, EdArgs, Failure, PredictArgs, ScanArgs, SolveArgs, VerifyArgs};

/// Round-trip-safe fixed width: 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn emit(path: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json<T: Serialize>(path: &Option<PathBuf>, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(path, &text)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Deltas {
    pub e_l: f64,
    pub p_l: f64,
    pub z_l0: f64,
}

/// Everything `solve` reports about one state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub params: ModelParams,
    pub effective_twist: f64,
    pub numbers: BetheNumberSet,
    pub roots: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub classification: StateClassification,
    pub observables: ObservableRecord,
    /// Measured `z_L(0)`.
    pub z_l0: f64,
    pub predictions: CftPrediction,
    /// Measured minus predicted.
    pub deltas: Deltas,
}

impl SolveRecord {
    pub fn new(state: &BetheState, lambda: Option<f64>) -> Result<Self, Failure> {
        let p = &state.params;
        let class = classify(&state.numbers, p.length);
        let phi = p.effective_twist();
        let predictions = cft::predict(&class, phi, p.gamma, p.length)?;
        let observables = ObservableRecord::new(state, lambda)?;
        let z_l0 = state.counting_function(0.0);
        Ok(SolveRecord {
            params: *p,
            effective_twist: phi,
            numbers: state.numbers.clone(),
            roots: state.roots.clone(),
            residual: state.residual_max,
            iterations: state.iterations,
            classification: class,
            observables,
            z_l0,
            deltas: Deltas {
                e_l: observables.e_l - predictions.e_l_pred,
                p_l: observables.p_l - predictions.p_l_pred,
                z_l0: z_l0 - predictions.z_l0,
            },
            predictions,
        })
    }
}

pub fn solve(a: &SolveArgs) -> Result<(), Failure> {
    let run = a.model.resolve()?;
    let l = run.single_length()?;
    let numbers = run.numbers(l)?;
    let params = run.params(l, &numbers)?;
    let state = solve_state(&params, &numbers, &run.options)?;
    emit_json(&a.output, &SolveRecord::new(&state, a.lambda)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub fit: AmplitudeFit,
    pub predicted_x_eff: f64,
    pub iterations: Vec<usize>,
}

fn parse_doubling(text: &str) -> Result<Vec<usize>, Failure> {
    let bad = || Failure::config(format!("--doubling expects START:STOP, got {text:?}"));
    let (a, b) = text.split_once(':').ok_or_else(bad)?;
    let (a, b) = (a.parse::<usize>().map_err(|_| bad())?, b.parse::<usize>().map_err(|_| bad())?);
    if a == 0 {
        return Err(bad());
    }
    Ok(doubling(a, b))
}

pub fn scan(a: &ScanArgs) -> Result<(), Failure> {
    let mut run = a.model.resolve()?;
    if run.lengths.is_empty() {
        run.lengths = match &a.doubling {
            Some(s) => parse_doubling(s)?,
            None => return Err(Failure::config("scan needs --L or --doubling")),
        };
    }
    if run.lengths.is_empty() {
        return Err(Failure::config("no lengths to scan"));
    }
    let config = run.scan_config()?;
    let e_inf = cft::e_infinity(run.gamma)?;
    let v_f = PI / run.gamma;

    let mut predictions = Vec::with_capacity(run.lengths.len());
    for &l in &run.lengths {
        let numbers = config.template.numbers(l).map_err(|e| Failure::config(format!("L = {l}: {e}")))?;
        let params = config.params(l).map_err(|e| Failure::config(format!("L = {l}: {e}")))?;
        let class = classify(&numbers, l);
        predictions.push(cft::predict(&class, params.effective_twist(), run.gamma, l)?);
    }

    let series = if a.predict_only {
        None
    } else {
        let mode = if a.cold { StartMode::Cold } else { StartMode::Warm };
        let states = scan_states(&config, &run.lengths, mode)?;
        Some(series_from_states(&config, &states))
    };

    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(["L", "e_L", "e_pred", "a_L", "P_L", "P_pred"])?;
    let mut plot = String::new();
    for (i, (&l, pred)) in run.lengths.iter().zip(&predictions).enumerate() {
        let (e, amp, p) = match &series {
            Some(s) => {
                let amp = raw_amplitude(l, s.e_values[i], e_inf, v_f);
                (fmt17(s.e_values[i]), Some(amp), fmt17(s.p_values[i]))
            }
            None => (String::new(), None, String::new()),
        };
        let plotted = amp.unwrap_or(pred.x_eff);
        plot.push_str(&format!("{l} {}\n", fmt17(plotted)));
        csv.write_record([
            l.to_string(),
            e,
            fmt17(pred.e_l_pred),
            amp.map(fmt17).unwrap_or_default(),
            p,
            fmt17(pred.p_l_pred),
        ])?;
    }
    let bytes = csv.into_inner().map_err(|e| Failure::config(e.to_string()))?;
    emit(&a.csv, &String::from_utf8_lossy(&bytes))?;
    if let Some(path) = &a.plot_data {
        std::fs::write(path, plot)?;
    }

    if let Some(s) = series {
        if s.l_values.len() < 3 {
            eprintln!("note: fewer than three lengths, no amplitude fit");
            return Ok(());
        }
        let report = FitReport {
            fit: extract_amplitude(&s, e_inf, v_f)?,
            predicted_x_eff: predictions.last().map(|p| p.x_eff).unwrap_or(f64::NAN),
            iterations: s.iterations.clone(),
        };
        match &a.fit {
            Some(_) => emit_json(&a.fit, &report)?,
            None => eprintln!("{}", serde_json::to_string_pretty(&report)?),
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdRecord {
    pub gamma: f64,
    /// Hamiltonian twist.
    pub phi: f64,
    pub spectrum: SectorSpectrum,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bethe_numbers: Option<BetheNumberSet>,
    #[serde(skip_serializing_if = "Option::is_none", default, rename = "match")]
    pub match_report: Option<MatchReport>,
}

pub fn ed(a: &EdArgs) -> Result<(), Failure> {
    let run = a.model.resolve()?;
    let l = run.single_length()?;
    let m = a.num_down.unwrap_or(l / 2);
    let phi = match run.twist {
        bethe_core::TwistConvention::Physical => run.phi,
        bethe_core::TwistConvention::Effective => run.phi - odd_root_shift(m),
    };
    let spectrum = build_and_diagonalize(l, m, run.gamma, phi)?;
    let (bethe_numbers, match_report) = if a.match_state {
        let numbers = run.numbers(l)?;
        if numbers.len() != m {
            return Err(Failure::config(format!("state has {} roots but the sector has M = {m}", numbers.len())));
        }
        let params = ModelParams::new(run.gamma, phi, l, m)?;
        let state = solve_state(&params, &numbers, &run.options)?;
        (Some(numbers), Some(match_bethe(&spectrum, &[total_energy(&state)], a.match_tol)))
    } else {
        (None, None)
    };
    let matched = match_report.as_ref().map_or(true, |r| r.all_matched());
    emit_json(
        &a.output,
        &EdRecord {
            gamma: run.gamma,
            phi,
            spectrum,
            bethe_numbers,
            match_report,
        },
    )?;
    if !matched {
        return Err(Failure::verify(format!("Bethe energy not found in the spectrum within {:e}", a.match_tol)));
    }
    Ok(())
}

pub fn character(a: &CharArgs) -> Result<(), Failure> {
    let table = partial_character(a.m, a.kmax);
    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(["k", "p"])?;
    for (k, p) in table.coefficients.iter().enumerate() {
        csv.write_record([k.to_string(), p.to_string()])?;
    }
    let bytes = csv.into_inner().map_err(|e| Failure::config(e.to_string()))?;
    emit(&a.output, &String::from_utf8_lossy(&bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum Check {
    Wl {
        length: usize,
        gamma: f64,
        comparison: WlComparison,
        ratio: f64,
        tolerance: f64,
        pass: bool,
    },
    Degeneracy {
        report: DegeneracyReport,
        pass: bool,
    },
}

impl Check {
    fn pass(&self) -> bool {
        match self {
            Check::Wl { pass, .. } | Check::Degeneracy { pass, .. } => *pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub passed: bool,
}

pub fn verify(a: &VerifyArgs) -> Result<(), Failure> {
    let every = a.all || !(a.wl || a.degeneracy);
    let mut checks = Vec::new();
    if every || a.wl {
        let gamma = parse_gamma(&a.gamma)?;
        let l = a.length;
        if l % 2 != 0 {
            return Err(Failure::config(format!("L must be even, got {l}")));
        }
        let numbers = ground_state_numbers(l, l / 2)?;
        let params = ModelParams::new(gamma, 0.0, l, l / 2)?;
        let state = solve_state(&params, &numbers, &Default::default())?;
        let comparison = w_l(&state, |x| (-x * x).exp(), |y| PI.sqrt() * (y * y / 4.0).exp())?;
        let ratio = comparison.measured / comparison.predicted;
        checks.push(Check::Wl {
            length: l,
            gamma,
            comparison,
            ratio,
            tolerance: a.wl_tol,
            pass: (ratio - 1.0).abs() <= a.wl_tol,
        });
    }
    if every || a.degeneracy {
        let report = verify_degeneracy(a.char_length, a.n_plus, a.n_minus, parse_gamma(&a.char_gamma)?, a.kmax)?;
        checks.push(Check::Degeneracy {
            pass: report.is_consistent(),
            report,
        });
    }
    let passed = checks.iter().all(Check::pass);
    emit_json(&a.output, &VerifyReport { checks, passed })?;
    if !passed {
        return Err(Failure::verify("one or more checks failed"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictRecord {
    #[serde(rename = "L")]
    pub length: usize,
    pub num_roots: usize,
    pub effective_twist: f64,
    pub classification: StateClassification,
    pub prediction: CftPrediction,
}

pub fn predict(a: &PredictArgs) -> Result<(), Failure> {
    let run = a.model.resolve()?;
    if run.lengths.is_empty() {
        return Err(Failure::config("L is required (--L or config)"));
    }
    let mut out = Vec::with_capacity(run.lengths.len());
    for &l in &run.lengths {
        let numbers = run.numbers(l)?;
        let params = run.params(l, &numbers)?;
        let classification = classify(&numbers, l);
        let phi = params.effective_twist();
        out.push(PredictRecord {
            length: l,
            num_roots: numbers.len(),
            effective_twist: phi,
            classification,
            prediction: cft::predict(&classification, phi, run.gamma, l)?,
        });
    }
    emit_json(&a.output, &out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use bethe_core::SolverOptions;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [PI, -1.0 / 3.0, 1e-300, 123456.789, 0.0] {
            let s = fmt17(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt17(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn solve_record_round_trips() {
        let p = ModelParams::new(0.55 * PI, 0.1, 16, 8).unwrap();
        let st = solve_state(&p, &ground_state_numbers(16, 8).unwrap(), &SolverOptions::default()).unwrap();
        let rec = SolveRecord::new(&st, Some(-0.3)).unwrap();
        let back: SolveRecord = serde_json::from_str(&serde_json::to_string(&rec).unwrap()).unwrap();
        assert_eq!(back, rec);
    }

    #[test]
    fn doubling_ranges() {
        assert_eq!(parse_doubling("64:512").unwrap(), vec![64, 128, 256, 512]);
        for bad in ["64", "a:b", "0:8"] {
            assert_eq!(parse_doubling(bad).unwrap_err().code, 2);
        }
    }
}
