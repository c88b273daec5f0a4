//! Exact diagonalization of the twisted XXZ Hamiltonian in a fixed
//! magnetization sector, used as an oracle for Bethe energies.
//!
//! Basis states are bitmasks over the `L` sites, bit set = spin down. The
//! boundary bond carries `σ⁺_{L+1} = e^{-2iπφ} σ⁺_1`, `σ⁻_{L+1} = e^{2iπφ} σ⁻_1`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const MAX_LENGTH: usize = 16;
/// Largest sector handed to the dense solver.
pub const MAX_DIMENSION: usize = 5000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorSpectrum {
    pub length: usize,
    /// Number of down spins, equal to the number of Bethe roots.
    pub num_down: usize,
    pub dimension: usize,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Bitmasks with `num_down` bits set among the low `length` bits, ascending.
pub fn sector_basis(length: usize, num_down: usize) -> Vec<u32> {
    (0u32..(1u32 << length)).filter(|s| s.count_ones() as usize == num_down).collect()
}

fn check_sector(length: usize, num_down: usize) -> Result<usize> {
    if length < 2 || length > MAX_LENGTH {
        return Err(Error::domain(format!("ED needs 2 <= L <= {MAX_LENGTH}, got {length}")));
    }
    if num_down > length {
        return Err(Error::domain(format!("M = {num_down} exceeds L = {length}")));
    }
    let dimension = binomial(length, num_down);
    if dimension > MAX_DIMENSION {
        return Err(Error::DimensionTooLarge {
            dimension,
            cap: MAX_DIMENSION,
        });
    }
    Ok(dimension)
}

/// Sector Hamiltonian, Hermitian by construction: each off-diagonal pair is
/// written once from its lower index and mirrored with the conjugate.
pub fn build_hamiltonian(length: usize, num_down: usize, gamma: f64, phi: f64) -> Result<DMatrix<Complex64>> {
    let dimension = check_sector(length, num_down)?;
    if !(gamma > 0.0 && gamma < PI) {
        return Err(Error::domain(format!("gamma must lie in (0, π), got {gamma}")));
    }
    let basis = sector_basis(length, num_down);
    let index = |s: u32| basis.binary_search(&s).expect("population is conserved");

    let hop = -1.0 / gamma.sin();
    let antialigned = -gamma.cos() / gamma.sin();
    let twist = Complex64::from_polar(1.0, 2.0 * PI * phi);

    let mut h = DMatrix::<Complex64>::zeros(dimension, dimension);
    for (i, &s) in basis.iter().enumerate() {
        for k in 0..length {
            let k1 = (k + 1) % length;
            let (a, b) = ((s >> k) & 1, (s >> k1) & 1);
            if a == b {
                continue;
            }
            h[(i, i)] += antialigned;
            let t = s ^ (1 << k) ^ (1 << k1);
            let j = index(t);
            if j <= i {
                continue;
            }
            let amp = if k1 != 0 {
                Complex64::from(hop)
            } else if a == 1 {
                // site L goes down → up, site 1 up → down: σ⁺_L σ⁻_{L+1}
                hop * twist
            } else {
                hop * twist.conj()
            };
            h[(j, i)] += amp;
            h[(i, j)] += amp.conj();
        }
    }
    Ok(h)
}

pub fn build_and_diagonalize(length: usize, num_down: usize, gamma: f64, phi: f64) -> Result<SectorSpectrum> {
    let h = build_hamiltonian(length, num_down, gamma, phi)?;
    let dimension = h.nrows();
    let mut eigenvalues: Vec<f64> = if h.iter().all(|z| z.im == 0.0) {
        h.map(|z| z.re).symmetric_eigenvalues().iter().copied().collect()
    } else {
        h.symmetric_eigenvalues().iter().copied().collect()
    };
    eigenvalues.sort_by(f64::total_cmp);
    Ok(SectorSpectrum {
        length,
        num_down,
        dimension,
        eigenvalues,
    })
}

/// Spectra of several sectors, diagonalized in parallel.
pub fn sector_spectra(length: usize, sectors: &[usize], gamma: f64, phi: f64) -> Result<Vec<SectorSpectrum>> {
    sectors
        .par_iter()
        .map(|&m| build_and_diagonalize(length, m, gamma, phi))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchEntry {
    pub bethe: f64,
    pub nearest: f64,
    pub gap: f64,
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub tolerance: f64,
    pub entries: Vec<MatchEntry>,
}

impl MatchReport {
    pub fn all_matched(&self) -> bool {
        self.entries.iter().all(|e| e.matched)
    }

    pub fn max_gap(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.gap))
    }
}

/// Nearest ED level for each Bethe total energy.
pub fn match_bethe(spectrum: &SectorSpectrum, bethe_energies: &[f64], tol: f64) -> MatchReport {
    let entries = bethe_energies
        .iter()
        .map(|&e| {
            let pos = spectrum.eigenvalues.partition_point(|&v| v < e);
            let nearest = [pos.checked_sub(1), Some(pos)]
                .into_iter()
                .flatten()
                .filter_map(|k| spectrum.eigenvalues.get(k).copied())
                .min_by(|a, b| (a - e).abs().total_cmp(&(b - e).abs()))
                .unwrap_or(f64::NAN);
            let gap = (nearest - e).abs();
            MatchEntry {
                bethe: e,
                nearest,
                gap,
                matched: gap < tol,
            }
        })
        .collect();
    MatchReport { tolerance: tol, entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{ModelParams, TwistConvention};
    use crate::observables::total_energy;
    use crate::solver::{solve, SolverOptions};
    use crate::states::{enumerate_excitations, ground_state_numbers, StateTemplate};

    #[test]
    fn two_site_chain() {
        // both bonds hop between |↑↓⟩ and |↓↑⟩ with amplitude -1
        let s = build_and_diagonalize(2, 1, PI / 2.0, 0.0).unwrap();
        assert_eq!(s.dimension, 2);
        assert!((s.eigenvalues[0] + 2.0).abs() < 1e-14);
        assert!((s.eigenvalues[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn dimensions_and_caps() {
        assert_eq!(binomial(12, 6), 924);
        assert_eq!(sector_basis(6, 2).len(), 15);
        assert_eq!(build_and_diagonalize(6, 0, 1.0, 0.2).unwrap().eigenvalues, vec![0.0]);
        assert!(matches!(build_and_diagonalize(16, 8, 1.0, 0.0), Err(Error::DimensionTooLarge { .. })));
        assert!(build_and_diagonalize(18, 1, 1.0, 0.0).is_err());
        assert!(build_and_diagonalize(6, 7, 1.0, 0.0).is_err());
    }

    #[test]
    fn hermitian_and_real_without_twist() {
        let h = build_hamiltonian(8, 3, 0.7, 0.13).unwrap();
        assert_eq!((&h - h.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max), 0.0);
        let h0 = build_hamiltonian(8, 3, 0.7, 0.0).unwrap();
        assert!(h0.iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn twist_is_periodic() {
        let a = build_and_diagonalize(8, 4, 1.1, 0.23).unwrap();
        let b = build_and_diagonalize(8, 4, 1.1, 1.23).unwrap();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn free_fermion_ground_state_matches_bethe() {
        let s = build_and_diagonalize(8, 4, PI / 2.0, 0.0).unwrap();
        let p = ModelParams::new(PI / 2.0, 0.0, 8, 4).unwrap();
        let st = solve(&p, &ground_state_numbers(8, 4).unwrap(), &SolverOptions::default()).unwrap();
        assert!((s.eigenvalues[0] - total_energy(&st)).abs() < 1e-10);
    }

    #[test]
    fn twisted_ground_states_match() {
        for &(g, phi) in &[(0.8, 0.1), (2.0, 0.3), (1.3, -0.2)] {
            for l in [8usize, 10] {
                let s = build_and_diagonalize(l, l / 2, g, phi).unwrap();
                let p = ModelParams::new(g, phi, l, l / 2).unwrap();
                let st = solve(&p, &ground_state_numbers(l, l / 2).unwrap(), &SolverOptions::default()).unwrap();
                let r = match_bethe(&s, &[total_energy(&st)], 1e-10);
                assert!(r.all_matched(), "{g} {phi} {l}: {r:?}");
                assert_eq!(r.entries[0].nearest, s.eigenvalues[0]);
            }
        }
    }

    #[test]
    fn single_vacancy_excitations_are_levels() {
        // n₊ = 1, n₋ = 0 labels at zero effective twist; M = 3 is odd, so the
        // Hamiltonian twist is -1/2
        let (l, g) = (8usize, 0.55 * PI);
        let m = StateTemplate::primary(1, 0).num_roots(l).unwrap();
        let p = ModelParams::with_twist(g, 0.0, TwistConvention::Effective, l, m).unwrap();
        assert_eq!(p.phi, -0.5);
        let s = build_and_diagonalize(l, m, g, p.phi).unwrap();
        let mut energies = Vec::new();
        for level in 0..3 {
            for numbers in enumerate_excitations(l, 1, 0, level, g).unwrap() {
                let st = solve(&p, &numbers, &SolverOptions::default()).unwrap();
                energies.push(total_energy(&st));
            }
        }
        assert_eq!(energies.len(), 2);
        let r = match_bethe(&s, &energies, 1e-9);
        assert!(r.all_matched(), "{r:?}");
    }

    #[test]
    fn empty_match() {
        let s = build_and_diagonalize(4, 2, 1.0, 0.0).unwrap();
        assert!(match_bethe(&s, &[], 1e-9).entries.is_empty());
    }

    #[test]
    fn parallel_sectors() {
        let all = sector_spectra(6, &[0, 1, 2, 3, 4, 5, 6], 0.9, 0.1).unwrap();
        let total: usize = all.iter().map(|s| s.dimension).sum();
        assert_eq!(total, 64);
    }
}
