//! Ising-chain ground state through its free-fermion representation.
//!
//! After the Jordan–Wigner map, the periodic chain `−Σσ_z − gΣσ_xσ_x` splits
//! in the even-parity sector into independent momentum pairs `(k, −k)` with
//! `k = π(2j − 1)/N`. In the basis `(|0>, c_k† c_{−k}† |0>)` each pair carries
//!
//! ```text
//! [ 0               2i g sin k     ]
//! [ −2i g sin k     4(1 − g cos k) ]
//! ```
//!
//! and the ground state takes the lower eigenvector `(b_k, a_k)` of every block.
//! Block marginals are Gaussian, so their spectra follow from the eigenvalues
//! of the one-body correlation matrix.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::ergotropy::{passive_energy_sorted, Backend, Cut, ErgotropyReport, GapEntry, LocalSpectrum};
use crate::error::{Error, Result};
use crate::hilbert::{eigvalsh, CMatrix, C64, ZERO};

/// Occupations are kept inside `[ZETA_CLAMP, 1 - ZETA_CLAMP]`.
pub const ZETA_CLAMP: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct FermionGS {
    pub momenta: Vec<f64>,
    /// `(a_k, b_k)`: pair and vacuum amplitudes per momentum.
    pub coeffs: Vec<(C64, C64)>,
    pub n_sites: usize,
    pub g: f64,
    /// Lower eigenvalue of each momentum block.
    pub block_energies: Vec<f64>,
}

impl FermionGS {
    /// Includes the constant `−N` left over by the Jordan–Wigner map.
    pub fn ground_energy(&self) -> f64 {
        self.block_energies.iter().sum::<f64>() - self.n_sites as f64
    }
}

/// Ground-state pairing amplitudes of the periodic chain with `n_sites` spins.
pub fn bogoliubov_coeffs(n_sites: usize, g: f64) -> Result<FermionGS> {
    if n_sites < 4 || n_sites % 2 != 0 {
        return Err(Error::InvalidArgument(format!("chain length {n_sites} must be even and at least 4")));
    }
    let mut momenta = Vec::with_capacity(n_sites / 2);
    let mut coeffs = Vec::with_capacity(n_sites / 2);
    let mut block_energies = Vec::with_capacity(n_sites / 2);
    for j in 1..=n_sites / 2 {
        let k = std::f64::consts::PI * (2 * j - 1) as f64 / n_sites as f64;
        let off = C64::new(0.0, 2.0 * g * k.sin());
        let d = 4.0 * (1.0 - g * k.cos());
        let root = (0.25 * d * d + off.norm_sqr()).sqrt();
        // lower eigenvalue without cancellation
        let lower = if d > 0.0 { -off.norm_sqr() / (0.5 * d + root) } else { 0.5 * d - root };
        let (a, b) = if off.norm() < 1e-300 {
            if d >= 0.0 { (ZERO, C64::new(1.0, 0.0)) } else { (C64::new(1.0, 0.0), ZERO) }
        } else {
            // eigenvector (off, lower), rephased so that b is real and positive
            let norm = (off.norm_sqr() + lower * lower).sqrt();
            let phase = off.conj() / off.norm();
            (phase * lower / norm, C64::new(off.norm() / norm, 0.0))
        };
        momenta.push(k);
        coeffs.push((a, b));
        block_energies.push(lower);
    }
    Ok(FermionGS { momenta, coeffs, n_sites, g, block_energies })
}

/// `<c_i† c_j>` and `<c_i† c_j†>` on a block of `n` consecutive sites.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationMatrix {
    pub c: CMatrix,
    pub f: CMatrix,
    pub n: usize,
}

impl CorrelationMatrix {
    /// `[[C, F], [F†, I − C]]`.
    pub fn assembled(&self) -> CMatrix {
        let n = self.n;
        CMatrix::from_fn(2 * n, 2 * n, |r, c| match (r < n, c < n) {
            (true, true) => self.c[(r, c)],
            (true, false) => self.f[(r, c - n)],
            (false, true) => self.f[(c, r - n)].conj(),
            (false, false) => {
                let id = if r == c { C64::new(1.0, 0.0) } else { ZERO };
                id - self.c[(r - n, c - n)]
            }
        })
    }

    /// Mode occupations `ζ ≤ 1/2` (one per pair `(ζ, 1 − ζ)`), clamped, ascending.
    pub fn occupations(&self) -> Result<Vec<f64>> {
        let vals = eigvalsh(&self.assembled())?;
        Ok(vals[..self.n].iter().map(|z| z.clamp(ZETA_CLAMP, 1.0 - ZETA_CLAMP)).collect())
    }
}

pub fn correlation_matrix(gs: &FermionGS, n: usize) -> Result<CorrelationMatrix> {
    if n == 0 || n > gs.n_sites / 2 {
        return Err(Error::InvalidArgument(format!("block size {n} outside 1..={}", gs.n_sites / 2)));
    }
    let scale = 2.0 / gs.n_sites as f64;
    // Toeplitz: entries depend on the separation only
    let mut c_row = vec![ZERO; n];
    let mut f_row = vec![ZERO; n];
    for (dist, (c, f)) in c_row.iter_mut().zip(f_row.iter_mut()).enumerate() {
        for (&k, &(a, b)) in gs.momenta.iter().zip(&gs.coeffs) {
            let x = k * dist as f64;
            *c += C64::new(scale * a.norm_sqr() * x.cos(), 0.0);
            *f += C64::new(0.0, -scale) * a.conj() * b * x.sin();
        }
    }
    // F_ij uses sin(k(i − j)), odd in the separation
    let c = CMatrix::from_fn(n, n, |i, j| if i >= j { c_row[i - j] } else { c_row[j - i] });
    let f = CMatrix::from_fn(n, n, |i, j| if i >= j { f_row[i - j] } else { -f_row[j - i] });
    Ok(CorrelationMatrix { c, f, n })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumOptions {
    /// Populations below this are not enumerated.
    pub trunc: f64,
    /// Largest number of populations kept.
    pub cap: usize,
    /// Discarded probability above this is an error.
    pub max_discarded: f64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self { trunc: 1e-12, cap: 1 << 24, max_discarded: 1e-6 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RdmSpectrum {
    /// Descending.
    pub populations: Vec<f64>,
    pub discarded: f64,
}

#[derive(PartialEq)]
struct Candidate {
    value: f64,
    last: usize,
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value.total_cmp(&other.value).then(other.last.cmp(&self.last))
    }
}

/// Marginal spectrum `Π_q ζ_q^f (1 − ζ_q)^(1−f)` from mode occupations,
/// enumerated largest first until populations drop below `trunc`.
pub fn spectrum_from_occupations(zetas: &[f64], opts: &SpectrumOptions) -> Result<RdmSpectrum> {
    let mut ratios: Vec<f64> = zetas
        .iter()
        .map(|&z| {
            let z = z.clamp(ZETA_CLAMP, 1.0 - ZETA_CLAMP);
            let (small, big) = if z <= 0.5 { (z, 1.0 - z) } else { (1.0 - z, z) };
            small / big
        })
        .collect();
    ratios.sort_by(|a, b| b.total_cmp(a));
    let top: f64 = zetas
        .iter()
        .map(|&z| {
            let z = z.clamp(ZETA_CLAMP, 1.0 - ZETA_CLAMP);
            z.max(1.0 - z)
        })
        .product();

    // Each subset of modes is reached once: extend by the next mode, or
    // replace the last mode by the next one.
    let mut populations = vec![top];
    let mut heap = BinaryHeap::new();
    if !ratios.is_empty() {
        heap.push(Candidate { value: top * ratios[0], last: 0 });
    }
    while let Some(Candidate { value, last }) = heap.pop() {
        if value < opts.trunc || populations.len() >= opts.cap {
            break;
        }
        populations.push(value);
        if last + 1 < ratios.len() {
            heap.push(Candidate { value: value * ratios[last + 1], last: last + 1 });
            heap.push(Candidate { value: value * ratios[last + 1] / ratios[last], last: last + 1 });
        }
    }
    let kept: f64 = populations.iter().sum();
    let discarded = (1.0 - kept).max(0.0);
    if discarded > opts.max_discarded {
        return Err(Error::DiscardedMass { discarded, bound: opts.max_discarded });
    }
    Ok(RdmSpectrum { populations, discarded })
}

pub fn rdm_spectrum(cm: &CorrelationMatrix, opts: &SpectrumOptions) -> Result<RdmSpectrum> {
    spectrum_from_occupations(&cm.occupations()?, opts)
}

/// Quenched gaps of the `M`-site blocks, `M = 1..=N/2`, and their geometric mean.
pub fn tfim_volume(n_sites: usize, g: f64, opts: &SpectrumOptions) -> Result<ErgotropyReport> {
    let gs = bogoliubov_coeffs(n_sites, g)?;
    let cells: Vec<(f64, f64)> = (1..=n_sites / 2)
        .into_par_iter()
        .map(|m| {
            let spec = rdm_spectrum(&correlation_matrix(&gs, m)?, opts)?;
            let block = LocalSpectrum::qubit_sum(m, 2.0);
            let rest = LocalSpectrum::qubit_sum(n_sites - m, 2.0);
            let gap = passive_energy_sorted(&spec.populations, &block)?
                + passive_energy_sorted(&spec.populations, &rest)?;
            Ok((gap, spec.discarded * rest.max_energy()))
        })
        .collect::<Result<Vec<_>>>()?;
    let gaps = cells
        .iter()
        .enumerate()
        .map(|(i, &(gap, _))| {
            Ok(GapEntry {
                cut: Cut::Block { start: 0, len: i + 1, n_subsystems: n_sites },
                multiplicity: 1,
                gap: crate::ergotropy::clamp_nonnegative(gap)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let bound = cells.iter().map(|c| c.1).fold(0.0, f64::max);
    Ok(ErgotropyReport::new(gaps, Backend::FreeFermion)?
        .with_meta("trunc", format!("{:e}", opts.trunc))
        .with_meta("passive_error_bound", format!("{bound:e}"))
        .with_meta("cuts", "contiguous blocks M = 1..N/2"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{partial_trace, Bipartition, PureState};
    use crate::models::{build_tfim, ground_state, Boundary, GroundStateOptions};

    fn ed_block_spectrum(n_sites: usize, g: f64, m: usize) -> Vec<f64> {
        let spec = build_tfim(n_sites, g, Boundary::Periodic).unwrap();
        let gs = ground_state(&spec, &GroundStateOptions::default()).unwrap();
        let rho = partial_trace(&gs.state, &Bipartition::block(0, m, n_sites).unwrap()).unwrap();
        rho.populations().unwrap()
    }

    #[test]
    fn zero_coupling_is_vacuum() {
        let gs = bogoliubov_coeffs(8, 0.0).unwrap();
        for &(a, b) in &gs.coeffs {
            assert_eq!(a, ZERO);
            assert_eq!(b, C64::new(1.0, 0.0));
        }
        let cm = correlation_matrix(&gs, 3).unwrap();
        assert_eq!(cm.c.norm(), 0.0);
        assert_eq!(cm.f.norm(), 0.0);
        assert!((gs.ground_energy() + 8.0).abs() < 1e-14);
    }

    #[test]
    fn amplitudes_are_normalized() {
        for g in [0.3, 1.0, 1.7] {
            for &(a, b) in &bogoliubov_coeffs(12, g).unwrap().coeffs {
                assert!((a.norm_sqr() + b.norm_sqr() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ground_energy_matches_ed() {
        for (n, g) in [(8, 1.0), (8, 0.4), (6, 2.2), (10, 1.3)] {
            let spec = build_tfim(n, g, Boundary::Periodic).unwrap();
            let ed = eigvalsh(&spec.assemble()).unwrap()[0];
            let ff = bogoliubov_coeffs(n, g).unwrap().ground_energy();
            assert!((ed - ff).abs() < 1e-8, "N={n} g={g}: {ed} vs {ff}");
            let closed: f64 = bogoliubov_coeffs(n, g)
                .unwrap()
                .momenta
                .iter()
                .map(|k| -2.0 * (1.0 + g * g - 2.0 * g * k.cos()).sqrt())
                .sum();
            assert!((closed - ff).abs() < 1e-10);
        }
    }

    #[test]
    fn correlation_structure() {
        let gs = bogoliubov_coeffs(10, 0.8).unwrap();
        let cm = correlation_matrix(&gs, 4).unwrap();
        assert!(crate::hilbert::max_asymmetry(&cm.c) < 1e-14);
        assert!((&cm.f + cm.f.transpose()).norm() < 1e-12);
        for i in 1..4 {
            assert!((cm.c[(i, i)] - cm.c[(0, 0)]).norm() < 1e-14);
        }
        let vals = eigvalsh(&cm.assembled()).unwrap();
        for q in 0..4 {
            assert!((vals[q] + vals[7 - q] - 1.0).abs() < 1e-9);
            assert!(vals[q] > -1e-9 && vals[7 - q] < 1.0 + 1e-9);
        }
    }

    #[test]
    fn block_spectra_match_ed() {
        let n = 10;
        for g in [0.8, 1.0, 1.6] {
            let gs = bogoliubov_coeffs(n, g).unwrap();
            for m in [1, 3, 5] {
                let ff = rdm_spectrum(&correlation_matrix(&gs, m).unwrap(), &SpectrumOptions::default()).unwrap();
                let ed = ed_block_spectrum(n, g, m);
                for (k, &e) in ed.iter().enumerate() {
                    let f = ff.populations.get(k).copied().unwrap_or(0.0);
                    assert!((e - f).abs() < 1e-8, "g={g} M={m} k={k}: {e} vs {f}");
                }
            }
        }
    }

    #[test]
    fn single_mode_spectrum() {
        let s = spectrum_from_occupations(&[0.25], &SpectrumOptions::default()).unwrap();
        assert_eq!(s.populations, vec![0.75, 0.25]);
        let pure = spectrum_from_occupations(&[0.0, 1.0, 0.0], &SpectrumOptions::default()).unwrap();
        assert!((pure.populations[0] - 1.0).abs() < 1e-12);
        assert!(pure.populations.len() == 1);
    }

    #[test]
    fn enumeration_is_complete_and_sorted() {
        let zetas = [0.1, 0.3, 0.02, 0.45, 0.2];
        let opts = SpectrumOptions { trunc: 0.0, ..SpectrumOptions::default() };
        let s = spectrum_from_occupations(&zetas, &opts).unwrap();
        assert_eq!(s.populations.len(), 32);
        assert!(s.populations.windows(2).all(|w| w[0] >= w[1]));
        let mut brute: Vec<f64> = (0..32u32)
            .map(|mask| {
                zetas.iter().enumerate().map(|(q, &z)| if mask >> q & 1 == 1 { z } else { 1.0 - z }).product()
            })
            .collect();
        brute.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in brute.iter().zip(&s.populations) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((s.populations.iter().sum::<f64>() + s.discarded - 1.0).abs() < 1e-12);
    }

    #[test]
    fn discarded_mass_bound_is_enforced() {
        let opts = SpectrumOptions { trunc: 0.05, max_discarded: 1e-3, ..SpectrumOptions::default() };
        match spectrum_from_occupations(&[0.3, 0.4, 0.2], &opts) {
            Err(Error::DiscardedMass { discarded, bound }) => {
                assert!(discarded > bound);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn volume_vanishes_without_coupling() {
        let r = tfim_volume(10, 0.0, &SpectrumOptions::default()).unwrap();
        assert_eq!(r.volume, 0.0);
        assert_eq!(r.gaps.len(), 5);
    }

    #[test]
    fn complementary_block_gives_same_gap() {
        let n = 10;
        let g = 1.2;
        let spec = build_tfim(n, g, Boundary::Periodic).unwrap();
        let gs = ground_state(&spec, &GroundStateOptions::default()).unwrap();
        let report = tfim_volume(n, g, &SpectrumOptions::default()).unwrap();
        for m in 1..=5 {
            let cut = Bipartition::block(0, m, n).unwrap();
            let rest = partial_trace(&gs.state, &cut.complement()).unwrap().populations().unwrap();
            let trimmed: Vec<f64> = rest.into_iter().take(1 << m).collect();
            let gap = passive_energy_sorted(&trimmed, &LocalSpectrum::qubit_sum(m, 2.0)).unwrap()
                + passive_energy_sorted(&trimmed, &LocalSpectrum::qubit_sum(n - m, 2.0)).unwrap();
            let analytic = report.gap(&Cut::Block { start: 0, len: m, n_subsystems: n }).unwrap();
            assert!((gap - analytic).abs() < 1e-9, "M={m}");
        }
        let _ = PureState::ghz(2);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn occupations_pair_up(g in 0.05f64..2.5, m in 1usize..=6) {
                let gs = bogoliubov_coeffs(12, g).unwrap();
                let vals = eigvalsh(&correlation_matrix(&gs, m).unwrap().assembled()).unwrap();
                for q in 0..m {
                    prop_assert!((vals[q] + vals[2 * m - 1 - q] - 1.0).abs() < 1e-9);
                }
            }

            #[test]
            fn kept_plus_discarded_is_one(g in 0.05f64..2.5, m in 1usize..=8) {
                let gs = bogoliubov_coeffs(16, g).unwrap();
                let s = rdm_spectrum(&correlation_matrix(&gs, m).unwrap(), &SpectrumOptions::default()).unwrap();
                prop_assert!((s.populations.iter().sum::<f64>() + s.discarded - 1.0).abs() < 1e-12);
            }
        }
    }
}
