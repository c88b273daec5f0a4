//! Bethe-number configurations and their classification.
//!
//! Bethe numbers are half-integers and are stored doubled, as odd integers,
//! so that packing, vacancy counts and descendant levels are exact.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{Kernel, ALPHA};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct BetheNumberSet {
    doubled: Vec<i64>,
}

impl TryFrom<Vec<i64>> for BetheNumberSet {
    type Error = Error;

    fn try_from(doubled: Vec<i64>) -> Result<Self> {
        BetheNumberSet::from_doubled(doubled)
    }
}

impl From<BetheNumberSet> for Vec<i64> {
    fn from(set: BetheNumberSet) -> Self {
        set.doubled
    }
}

impl BetheNumberSet {
    /// Builds a set from `2·I_k`; entries must be odd and strictly increasing.
    pub fn from_doubled(doubled: Vec<i64>) -> Result<Self> {
        if doubled.is_empty() {
            return Err(Error::InvalidNumbers("empty configuration".into()));
        }
        if let Some(d) = doubled.iter().find(|d| d.rem_euclid(2) != 1) {
            return Err(Error::InvalidNumbers(format!(
                "doubled Bethe number {d} is even (not a half-integer)"
            )));
        }
        if let Some(w) = doubled.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidNumbers(format!(
                "Bethe numbers must be strictly increasing: {} then {}",
                w[0], w[1]
            )));
        }
        Ok(BetheNumberSet { doubled })
    }

    pub fn doubled(&self) -> &[i64] {
        &self.doubled
    }

    pub fn len(&self) -> usize {
        self.doubled.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doubled.is_empty()
    }

    pub fn half_integers(&self) -> impl Iterator<Item = f64> + '_ {
        self.doubled.iter().map(|&d| d as f64 / 2.0)
    }

    /// Mirror image `I → -I`.
    pub fn mirrored(&self) -> Self {
        let doubled = self.doubled.iter().rev().map(|d| -d).collect();
        BetheNumberSet { doubled }
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.mirrored()
    }
}

impl fmt::Display for BetheNumberSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, d) in self.doubled.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{d}/2")?;
        }
        write!(f, "}}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateClassification {
    /// Vacancies among positive numbers, `Lα - card{I > 0}`.
    pub n_plus: f64,
    /// Vacancies among negative numbers, `Lα - card{I < 0}`.
    pub n_minus: f64,
    pub delta_plus: u64,
    pub delta_minus: u64,
}

/// Packed symmetric configuration; for odd `M` the extra number goes to the positive side.
pub fn ground_state_numbers(length: usize, num_roots: usize) -> Result<BetheNumberSet> {
    if length == 0 || length % 2 != 0 {
        return Err(Error::domain(format!("L must be even and positive, got {length}")));
    }
    if num_roots == 0 || 2 * num_roots > length {
        return Err(Error::domain(format!(
            "M must satisfy 1 <= M <= L/2, got M = {num_roots} for L = {length}"
        )));
    }
    let positive = num_roots.div_ceil(2) as i64;
    let negative = (num_roots / 2) as i64;
    let doubled = (0..negative)
        .rev()
        .map(|k| -(2 * k + 1))
        .chain((0..positive).map(|k| 2 * k + 1))
        .collect();
    BetheNumberSet::from_doubled(doubled)
}

/// Vacancy counts and descendant levels of a configuration on `length` sites.
pub fn classify(numbers: &BetheNumberSet, length: usize) -> StateClassification {
    let (pos, neg): (Vec<i64>, Vec<i64>) = numbers.doubled().iter().partition(|&&d| d > 0);
    let lattice = length as f64 * ALPHA;
    StateClassification {
        n_plus: lattice - pos.len() as f64,
        n_minus: lattice - neg.len() as f64,
        delta_plus: displacement(pos.iter().copied()),
        delta_minus: displacement(neg.iter().map(|d| -d)),
    }
}

/// `Σ I - Σ J` for positive doubled numbers against the packed set `J = {1/2, …, K - 1/2}`.
fn displacement(positive_doubled: impl Iterator<Item = i64>) -> u64 {
    let (count, sum) = positive_doubled.fold((0i64, 0i64), |(c, s), d| (c + 1, s + d));
    // packed doubled sum is 1 + 3 + … + (2K-1) = K²
    ((sum - count * count) / 2) as u64
}

/// Excess `(n₊ + n₋)(1/2 - γ/π)` of the highest admissible |I| over `L/4`.
fn bound_excess(n_plus: f64, n_minus: f64, gamma: f64) -> f64 {
    (n_plus + n_minus) * (0.5 - gamma / std::f64::consts::PI)
}

/// Whether every `|I_k| ≤ L/4 + (n₊+n₋)(1/2 - γ/π)`.
///
/// The bound follows from the `λ → ±∞` limits of the counting function at
/// zero twist; it is applied with those semantics whatever the twist.
pub fn admissible(numbers: &BetheNumberSet, length: usize, gamma: f64) -> bool {
    let class = classify(numbers, length);
    let limit = length as f64 / 2.0 + 2.0 * bound_excess(class.n_plus, class.n_minus, gamma);
    numbers.doubled().iter().all(|d| d.abs() as f64 <= limit)
}

/// Whether every number lies strictly inside `(L z_L(-∞), L z_L(∞))`, i.e.
/// `|I_k - φ_eff| < L/4 + (n₊+n₋)(1/2 - γ/π)`.
pub fn admissible_with_twist(numbers: &BetheNumberSet, length: usize, gamma: f64, effective_twist: f64) -> bool {
    let class = classify(numbers, length);
    let limit = length as f64 / 4.0 + bound_excess(class.n_plus, class.n_minus, gamma);
    numbers.half_integers().all(|i| (i - effective_twist).abs() < limit)
}

/// Number of steps the highest positive number may move above its packed slot.
pub fn movable_count(n_plus: u32, n_minus: u32, gamma: f64) -> i64 {
    (bound_excess(n_plus as f64, n_minus as f64, gamma) + n_plus as f64 + 0.5).floor() as i64
}

/// Primary configuration with `n₊`, `n₋` vacancies plus descendant moves.
///
/// `plus_moves[j]` is how many steps the j-th highest positive number is moved
/// outwards (nonincreasing), likewise `minus_moves` for the negative side.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StateTemplate {
    pub n_plus: u32,
    pub n_minus: u32,
    #[serde(default)]
    pub plus_moves: Vec<u32>,
    #[serde(default)]
    pub minus_moves: Vec<u32>,
}

impl StateTemplate {
    pub fn ground() -> Self {
        StateTemplate::default()
    }

    pub fn primary(n_plus: u32, n_minus: u32) -> Self {
        StateTemplate {
            n_plus,
            n_minus,
            ..Default::default()
        }
    }

    pub fn with_moves(mut self, plus_moves: Vec<u32>, minus_moves: Vec<u32>) -> Self {
        self.plus_moves = plus_moves;
        self.minus_moves = minus_moves;
        self
    }

    pub fn num_roots(&self, length: usize) -> Result<usize> {
        let (pos, neg) = self.side_counts(length)?;
        Ok(pos + neg)
    }

    fn side_counts(&self, length: usize) -> Result<(usize, usize)> {
        if length % 4 != 0 {
            return Err(Error::domain(format!(
                "state templates need L divisible by 4 so that n± are integers, got {length}"
            )));
        }
        let quarter = length / 4;
        let pos = quarter.checked_sub(self.n_plus as usize);
        let neg = quarter.checked_sub(self.n_minus as usize);
        match (pos, neg) {
            (Some(p), Some(n)) if p + n > 0 => Ok((p, n)),
            _ => Err(Error::domain(format!(
                "L = {length} too small for n+ = {}, n- = {}",
                self.n_plus, self.n_minus
            ))),
        }
    }

    pub fn numbers(&self, length: usize) -> Result<BetheNumberSet> {
        let (pos, neg) = self.side_counts(length)?;
        let positive = side(pos, &self.plus_moves)?;
        let negative = side(neg, &self.minus_moves)?;
        let doubled = negative
            .iter()
            .rev()
            .map(|d| -d)
            .chain(positive.iter().copied())
            .collect();
        BetheNumberSet::from_doubled(doubled)
    }
}

/// Ascending doubled numbers of one side after applying the moves to its top entries.
fn side(count: usize, moves: &[u32]) -> Result<Vec<i64>> {
    if moves.len() > count {
        return Err(Error::InvalidNumbers(format!(
            "{} moves requested but only {count} numbers on that side",
            moves.len()
        )));
    }
    if moves.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidNumbers("moves must be nonincreasing".into()));
    }
    let mut out: Vec<i64> = (0..count as i64).map(|k| 2 * k + 1).collect();
    for (j, &d) in moves.iter().enumerate() {
        out[count - 1 - j] += 2 * d as i64;
    }
    Ok(out)
}

/// Admissible configurations at descendant level `level` above the
/// `(n₊, n₋)` primary: positive side rearranged with `Δ₊I = level`,
/// negative side packed.
pub fn enumerate_excitations(
    length: usize,
    n_plus: u32,
    n_minus: u32,
    level: u64,
    gamma: f64,
) -> Result<Vec<BetheNumberSet>> {
    Kernel::new(gamma)?;
    let primary = StateTemplate::primary(n_plus, n_minus);
    let (pos, neg) = primary.side_counts(length)?;
    let negative: Vec<i64> = (0..neg as i64).rev().map(|k| -(2 * k + 1)).collect();

    let limit = length as f64 / 2.0 + 2.0 * bound_excess(n_plus as f64, n_minus as f64, gamma);
    let top_slot = {
        let t = limit.floor() as i64;
        if t.rem_euclid(2) == 1 {
            t
        } else {
            t - 1
        }
    };
    let target = (pos * pos) as i64 + 2 * level as i64;

    let mut found = Vec::new();
    let mut chosen = Vec::with_capacity(pos);
    place_from_top(pos, top_slot, target, &mut chosen, &mut |desc| {
        let doubled: Vec<i64> = negative.iter().copied().chain(desc.iter().rev().copied()).collect();
        found.push(doubled);
    });

    let mut out = Vec::with_capacity(found.len());
    for doubled in found {
        let set = BetheNumberSet::from_doubled(doubled)?;
        if admissible(&set, length, gamma) && classify(&set, length).delta_plus == level {
            out.push(set);
        }
    }
    Ok(out)
}

/// Chooses `remaining` distinct odd positive slots `≤ max_slot` summing to `target`,
/// in decreasing order.
fn place_from_top(
    remaining: usize,
    max_slot: i64,
    target: i64,
    chosen: &mut Vec<i64>,
    emit: &mut dyn FnMut(&[i64]),
) {
    if remaining == 0 {
        if target == 0 {
            emit(chosen);
        }
        return;
    }
    let r = remaining as i64;
    let below = (r - 1) * (r - 1);
    let mut slot = max_slot;
    while slot >= 2 * r - 1 {
        let rest = target - slot;
        // the r-1 slots below sum to at most (slot-2) + (slot-4) + … + (slot-2(r-1))
        let most_below = (r - 1) * (slot - r);
        if rest < below {
            slot -= 2;
            continue;
        }
        if rest > most_below {
            break;
        }
        chosen.push(slot);
        place_from_top(remaining - 1, slot - 2, rest, chosen, emit);
        chosen.pop();
        slot -= 2;
    }
}
