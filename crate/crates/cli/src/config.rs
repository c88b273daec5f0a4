//! Run configuration: an optional JSON file overlaid with command-line flags.

use std::f64::consts::PI;
use std::path::Path;

use bethe_core::scaling::ScanConfig;
use bethe_core::states::ground_state_numbers;
use bethe_core::{BetheNumberSet, ModelParams, SolverOptions, StateTemplate, TwistConvention};
use clap::Args;
use serde::{Deserialize, Serialize};

use crate::Failure;

/// Anisotropy as a plain number or a string such as `"0.55pi"`, `"3/7pi"`, `"pi/5"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GammaSpec {
    Number(f64),
    Text(String),
}

impl GammaSpec {
    pub fn value(&self) -> Result<f64, Failure> {
        match self {
            GammaSpec::Number(x) => Ok(*x),
            GammaSpec::Text(s) => parse_gamma(s),
        }
    }
}

/// Parses a decimal or a rational multiple of π. The rational factor is
/// formed first and multiplied by π once, so `pi/5` is exactly `PI / 5.0`.
pub fn parse_gamma(text: &str) -> Result<f64, Failure> {
    let bad = || Failure::config(format!("cannot parse gamma {text:?}; use e.g. 1.2, 0.55pi, 3/7pi or pi/5"));
    let s: String = text.trim().to_lowercase().replace('π', "pi").replace(['*', ' '], "");
    if s.is_empty() {
        return Err(bad());
    }
    let Some(at) = s.find("pi") else {
        return s.parse::<f64>().map_err(|_| bad());
    };
    let rest = format!("{}{}", &s[..at], &s[at + 2..]);
    if rest.contains("pi") {
        return Err(bad());
    }
    let (num, den) = match rest.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().map_err(|_| bad())?),
        None => (rest.as_str(), 1.0),
    };
    let num = if num.is_empty() { 1.0 } else { num.parse::<f64>().map_err(|_| bad())? };
    if den == 0.0 {
        return Err(bad());
    }
    Ok(PI * num / den)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Lengths {
    One(usize),
    Many(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateSpec {
    Ground,
    /// Doubled Bethe numbers `2I`.
    Numbers(Vec<i64>),
    Template(StateTemplate),
}

/// Schema of the `--config` file; every field may be omitted.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub gamma: Option<GammaSpec>,
    pub phi: Option<f64>,
    pub effective_twist: Option<bool>,
    #[serde(rename = "L")]
    pub lengths: Option<Lengths>,
    pub state: Option<StateSpec>,
    pub solver: Option<SolverOptions>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::config(format!("reading {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::config(format!("parsing {}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    /// JSON run configuration; flags given on the command line take precedence.
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
    /// Anisotropy angle: decimal or multiple of π ("0.55pi", "3/7pi", "pi/5").
    #[arg(long)]
    pub gamma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// Read --phi as the twist in the counting function (physical twist + 1/2 for odd M).
    #[arg(long)]
    pub effective_twist: bool,
    /// Chain length(s), comma separated.
    #[arg(long = "L", value_delimiter = ',')]
    pub lengths: Vec<usize>,
    /// Packed ground state in the M = L/2 sector.
    #[arg(long, conflicts_with_all = ["numbers", "n_plus", "n_minus"])]
    pub ground: bool,
    /// Explicit doubled Bethe numbers 2I, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with_all = ["n_plus", "n_minus"])]
    pub numbers: Option<Vec<i64>>,
    /// Vacancies on the positive side.
    #[arg(long)]
    pub n_plus: Option<u32>,
    /// Vacancies on the negative side.
    #[arg(long)]
    pub n_minus: Option<u32>,
    /// Outward steps of the top positive numbers (nonincreasing).
    #[arg(long, value_delimiter = ',')]
    pub plus_moves: Vec<u32>,
    #[arg(long, value_delimiter = ',')]
    pub minus_moves: Vec<u32>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub damping: Option<f64>,
}

/// Fully resolved parameters shared by the subcommands.
#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    pub gamma: f64,
    pub phi: f64,
    pub twist: TwistConvention,
    pub lengths: Vec<usize>,
    pub state: StateSpec,
    pub options: SolverOptions,
}

impl ModelArgs {
    pub fn resolve(&self) -> Result<Run, Failure> {
        let file = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let gamma = match (&self.gamma, &file.gamma) {
            (Some(s), _) => parse_gamma(s)?,
            (None, Some(g)) => g.value()?,
            (None, None) => return Err(Failure::config("gamma is required (--gamma or config)")),
        };
        let lengths = if !self.lengths.is_empty() {
            self.lengths.clone()
        } else {
            match file.lengths {
                Some(Lengths::One(l)) => vec![l],
                Some(Lengths::Many(v)) => v,
                None => Vec::new(),
            }
        };
        if let Some(&l) = lengths.iter().find(|&&l| l == 0 || l % 2 != 0) {
            return Err(Failure::config(format!("L must be even and positive, got {l}")));
        }
        let state = if self.ground {
            StateSpec::Ground
        } else if let Some(n) = &self.numbers {
            StateSpec::Numbers(n.clone())
        } else if self.n_plus.is_some() || self.n_minus.is_some() {
            StateSpec::Template(
                StateTemplate::primary(self.n_plus.unwrap_or(0), self.n_minus.unwrap_or(0))
                    .with_moves(self.plus_moves.clone(), self.minus_moves.clone()),
            )
        } else {
            file.state.unwrap_or(StateSpec::Ground)
        };
        if !(self.plus_moves.is_empty() && self.minus_moves.is_empty()) && !matches!(state, StateSpec::Template(_)) {
            return Err(Failure::config("--plus-moves/--minus-moves need --n-plus/--n-minus"));
        }
        let mut options = file.solver.unwrap_or_default();
        if let Some(t) = self.tol {
            options.tol = t;
        }
        if let Some(m) = self.max_iter {
            options.max_iter = m;
        }
        if let Some(d) = self.damping {
            options.damping = d;
        }
        let effective = self.effective_twist || file.effective_twist.unwrap_or(false);
        Ok(Run {
            gamma,
            phi: self.phi.or(file.phi).unwrap_or(0.0),
            twist: if effective { TwistConvention::Effective } else { TwistConvention::Physical },
            lengths,
            state,
            options,
        })
    }
}

impl Run {
    pub fn numbers(&self, length: usize) -> Result<BetheNumberSet, Failure> {
        Ok(match &self.state {
            StateSpec::Ground => ground_state_numbers(length, length / 2)?,
            StateSpec::Numbers(d) => BetheNumberSet::from_doubled(d.clone())?,
            StateSpec::Template(t) => t.numbers(length)?,
        })
    }

    pub fn params(&self, length: usize, numbers: &BetheNumberSet) -> Result<ModelParams, Failure> {
        Ok(ModelParams::with_twist(self.gamma, self.phi, self.twist, length, numbers.len())?)
    }

    pub fn single_length(&self) -> Result<usize, Failure> {
        match self.lengths.as_slice() {
            [l] => Ok(*l),
            [] => Err(Failure::config("L is required (--L or config)")),
            many => Err(Failure::config(format!("expected a single L, got {many:?}"))),
        }
    }

    /// Scans follow a template so that the state is defined at every length.
    pub fn scan_config(&self) -> Result<ScanConfig, Failure> {
        let template = match &self.state {
            StateSpec::Ground => StateTemplate::ground(),
            StateSpec::Template(t) => t.clone(),
            StateSpec::Numbers(_) => {
                return Err(Failure::config("explicit numbers fix M; scans need --ground or --n-plus/--n-minus"))
            }
        };
        Ok(ScanConfig {
            gamma: self.gamma,
            phi: self.phi,
            twist: self.twist,
            template,
            options: self.options,
        })
    }
}
