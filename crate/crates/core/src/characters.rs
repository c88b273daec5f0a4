//! Restricted partition counts and the partial characters built from them.

use serde::{Deserialize, Serialize};

use crate::error::Result;
pub use crate::states::movable_count;
use crate::states::enumerate_excitations;

/// Coefficients `p_m(0..=k_max)` of `χ_m(q) = Π_{k=1}^{m} 1/(1 - q^k)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialCharacter {
    pub m: u32,
    pub coefficients: Vec<u64>,
}

impl PartialCharacter {
    pub fn coefficient(&self, k: usize) -> Option<u64> {
        self.coefficients.get(k).copied()
    }
}

/// Partitions of `k ≤ k_max` into parts `≤ m`, by adding one part size at a time.
pub fn partial_character(m: u32, k_max: usize) -> PartialCharacter {
    let mut p = vec![0u64; k_max + 1];
    p[0] = 1;
    for part in 1..=m as usize {
        for k in part..=k_max {
            p[k] += p[k - part];
        }
    }
    PartialCharacter { m, coefficients: p }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelCount {
    pub level: u64,
    pub enumerated: u64,
    pub expected: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyReport {
    pub length: usize,
    pub n_plus: u32,
    pub n_minus: u32,
    pub gamma: f64,
    /// Movable vacancies on the positive side.
    pub m: i64,
    pub levels: Vec<LevelCount>,
}

impl DegeneracyReport {
    pub fn mismatches(&self) -> Vec<&LevelCount> {
        self.levels.iter().filter(|c| c.enumerated != c.expected).collect()
    }

    pub fn is_consistent(&self) -> bool {
        self.mismatches().is_empty()
    }
}

/// Counts admissible positive-side rearrangements at each level `k ≤ k_max`
/// and compares them with `p_m(k)`, `m` from [`movable_count`]. Zero twist.
pub fn verify_degeneracy(length: usize, n_plus: u32, n_minus: u32, gamma: f64, k_max: u64) -> Result<DegeneracyReport> {
    let m = movable_count(n_plus, n_minus, gamma);
    let chi = partial_character(m.max(0) as u32, k_max as usize);
    let levels = (0..=k_max)
        .map(|k| {
            let enumerated = enumerate_excitations(length, n_plus, n_minus, k, gamma)?.len() as u64;
            // with no movable vacancy only the primary itself survives
            let expected = if m > 0 { chi.coefficients[k as usize] } else { u64::from(k == 0) };
            Ok(LevelCount {
                level: k,
                enumerated,
                expected,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DegeneracyReport {
        length,
        n_plus,
        n_minus,
        gamma,
        m,
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn brute_force(m: u64, k: u64) -> u64 {
        // nonincreasing sequences of parts in 1..=m summing to k
        fn go(rest: u64, max_part: u64) -> u64 {
            if rest == 0 {
                return 1;
            }
            (1..=max_part.min(rest)).map(|p| go(rest - p, p)).sum()
        }
        go(k, m)
    }

    #[test]
    fn small_characters() {
        assert!(partial_character(1, 20).coefficients.iter().all(|&c| c == 1));
        assert_eq!(partial_character(2, 5).coefficients, vec![1, 1, 2, 2, 3, 3]);
        assert_eq!(partial_character(0, 3).coefficients, vec![1, 0, 0, 0]);
        let unrestricted = [1u64, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42];
        let chi = partial_character(10, 10);
        assert_eq!(chi.coefficients, unrestricted);
    }

    #[test]
    fn recurrence_matches_brute_force() {
        for m in 1..=4u32 {
            let chi = partial_character(m, 12);
            for k in 0..=12 {
                assert_eq!(chi.coefficients[k], brute_force(m as u64, k as u64), "m {m} k {k}");
            }
        }
    }

    #[test]
    fn product_identity() {
        // multiply the truncated series Π 1/(1 - q^j) directly
        for m in 1..=6u32 {
            let n = 30;
            let mut series = vec![0u64; n + 1];
            series[0] = 1;
            for j in 1..=m as usize {
                let geometric: Vec<u64> = (0..=n).map(|k| u64::from(k % j == 0)).collect();
                let mut next = vec![0u64; n + 1];
                for a in 0..=n {
                    for b in 0..=n - a {
                        next[a + b] += series[a] * geometric[b];
                    }
                }
                series = next;
            }
            assert_eq!(partial_character(m, n).coefficients, series);
        }
    }

    #[test]
    fn movable_count_examples() {
        assert_eq!(movable_count(1, 1, PI / 5.0), 2);
        assert_eq!(movable_count(0, 0, 1.0), 0);
        for np in 0..6 {
            assert!(movable_count(np + 1, 2, 1.2) >= movable_count(np, 2, 1.2));
        }
    }

    #[test]
    fn worked_example_degeneracies() {
        let r = verify_degeneracy(40, 1, 1, PI / 5.0, 5).unwrap();
        assert_eq!(r.m, 2);
        assert!(r.is_consistent(), "{r:?}");
        assert_eq!(r.levels.iter().map(|c| c.enumerated).collect::<Vec<_>>(), vec![1, 1, 2, 2, 3, 3]);
    }

    #[test]
    fn ground_state_has_no_real_descendants() {
        let r = verify_degeneracy(32, 0, 0, 1.0, 4).unwrap();
        assert_eq!(r.m, 0);
        assert!(r.is_consistent(), "{r:?}");
        assert_eq!(r.levels[0].enumerated, 1);
    }

    #[test]
    fn other_sectors_agree() {
        for &(np, nm, g) in &[(2u32, 0u32, 0.4), (1, 0, 0.55 * PI), (2, 1, 1.0), (3, 0, 0.3)] {
            let r = verify_degeneracy(64, np, nm, g, 6).unwrap();
            assert!(r.is_consistent(), "{np} {nm} {g}: {r:?}");
        }
    }

    proptest! {
        #[test]
        fn nondecreasing_in_m(m in 1u32..8, k in 0usize..25) {
            let a = partial_character(m, k).coefficients[k];
            let b = partial_character(m + 1, k).coefficients[k];
            prop_assert!(a <= b);
            prop_assert_eq!(partial_character(m, k).coefficients[0], 1);
        }
    }
}
