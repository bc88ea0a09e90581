//! Three-level Dicke ground states in the permutation-symmetric sector.
//!
//! Atoms enter only through the collective operators, so the ground state
//! lives in the symmetric subspace spanned by occupation numbers
//! `(n0, n1, n2)`. There `Σ_k |i_k><j_k|` acts as `b_i† b_j`. The total parity
//! `(-1)^(n_photon + n1 + n2)` is conserved and the vacuum is even, so the
//! ground state is taken from the even sector.

use super::ground::{photon_tail, TAIL_LIMIT};
use crate::ergotropy::{enumerate_bipartitions, exact_volume, BipartitionMode, ErgotropyReport, LocalSpectrum};
use crate::error::{Error, Result};
use crate::hilbert::{eig_hermitian, CMatrix, CVector, PureState, SubsystemDims, C64, ZERO};

pub const DEFAULT_DICKE3_NMAX: usize = 12;
/// Cutoff beyond which automatic growth gives up.
const NMAX_CEILING: usize = 160;
const NMAX_STEP: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dicke3Params {
    pub n_atoms: usize,
    pub omega_c: f64,
    pub omega_a: f64,
    pub g1: f64,
    pub g2: f64,
}

impl Dicke3Params {
    pub fn resonant(n_atoms: usize, g1: f64, g2: f64) -> Self {
        Self { n_atoms, omega_c: 1.0, omega_a: 1.0, g1, g2 }
    }
}

/// Hamiltonian in the symmetric sector, basis `|n; n1, n2>` with `n0 = N - n1 - n2`.
#[derive(Clone, Debug)]
pub struct Dicke3Collective {
    params: Dicke3Params,
    n_max: usize,
    basis: Vec<(usize, usize, usize)>,
}

impl Dicke3Collective {
    pub fn new(params: Dicke3Params, n_max: usize) -> Result<Self> {
        if params.n_atoms == 0 || n_max == 0 {
            return Err(Error::InvalidArgument("need at least one atom and one photon".into()));
        }
        let n = params.n_atoms;
        let mut basis = Vec::new();
        for photons in 0..=n_max {
            for n1 in 0..=n {
                for n2 in 0..=n - n1 {
                    basis.push((photons, n1, n2));
                }
            }
        }
        Ok(Self { params, n_max, basis })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    fn index(&self, photons: usize, n1: usize, n2: usize) -> usize {
        let n = self.params.n_atoms;
        let per_photon = (n + 1) * (n + 2) / 2;
        // offset of n1 block: sum_{m < n1} (n - m + 1)
        let offset = n1 * (n + 1) - n1 * (n1.saturating_sub(1)) / 2;
        photons * per_photon + offset + n2
    }

    fn is_even(&self, k: usize) -> bool {
        let (p, n1, n2) = self.basis[k];
        (p + n1 + n2) % 2 == 0
    }

    pub fn hamiltonian(&self) -> CMatrix {
        let Dicke3Params { n_atoms, omega_c, omega_a, g1, g2 } = self.params;
        let dim = self.dim();
        let mut h = CMatrix::from_element(dim, dim, ZERO);
        let root = (n_atoms as f64).sqrt();
        let c1 = C64::new(0.0, g1 / root);
        let c2 = C64::new(0.0, g2 / root);
        for (col, &(p, n1, n2)) in self.basis.iter().enumerate() {
            let n0 = n_atoms - n1 - n2;
            h[(col, col)] = C64::new(omega_c * p as f64 + omega_a * (n1 + n2) as f64, 0.0);
            // photon moves: (target photons, amplitude) for a and a†
            let lower = (p > 0).then(|| (p - 1, (p as f64).sqrt()));
            let raise = (p < self.n_max).then(|| (p + 1, ((p + 1) as f64).sqrt()));
            // atom moves for A01 + A10 and A02 - A20
            let mut x01 = Vec::new();
            if n1 > 0 {
                x01.push((n1 - 1, n2, ((n1 * (n0 + 1)) as f64).sqrt()));
            }
            if n0 > 0 {
                x01.push((n1 + 1, n2, ((n0 * (n1 + 1)) as f64).sqrt()));
            }
            let mut y02 = Vec::new();
            if n2 > 0 {
                y02.push((n1, n2 - 1, ((n2 * (n0 + 1)) as f64).sqrt()));
            }
            if n0 > 0 {
                y02.push((n1, n2 + 1, -((n0 * (n2 + 1)) as f64).sqrt()));
            }
            for (photon, sign) in [(lower, 1.0), (raise, -1.0)] {
                if let Some((q, amp)) = photon {
                    for &(m1, m2, a) in &x01 {
                        h[(self.index(q, m1, m2), col)] += c1 * (sign * amp * a);
                    }
                    for &(m1, m2, a) in &y02 {
                        h[(self.index(q, m1, m2), col)] += c2 * (amp * a);
                    }
                }
            }
        }
        h
    }

    /// Maps a symmetric-sector vector onto the full `[n_max+1, 3, ..., 3]` space.
    pub fn embed(&self, coeffs: &CVector) -> Result<PureState> {
        let n = self.params.n_atoms;
        let mut dims = vec![self.n_max + 1];
        dims.extend(std::iter::repeat_n(3, n));
        let dims = SubsystemDims::new(dims)?;
        let configs = 3usize.pow(n as u32);
        let ln_fact: Vec<f64> = (0..=n).scan(0.0, |acc, k| {
            if k > 0 {
                *acc += (k as f64).ln();
            }
            Some(*acc)
        }).collect();
        let mut amps = CVector::from_element(dims.total(), ZERO);
        for config in 0..configs {
            let (mut n1, mut n2, mut rest) = (0, 0, config);
            for _ in 0..n {
                match rest % 3 {
                    1 => n1 += 1,
                    2 => n2 += 1,
                    _ => {}
                }
                rest /= 3;
            }
            let n0 = n - n1 - n2;
            let weight = (0.5 * (ln_fact[n] - ln_fact[n0] - ln_fact[n1] - ln_fact[n2])).exp();
            for p in 0..=self.n_max {
                amps[p * configs + config] = coeffs[self.index(p, n1, n2)] / weight;
            }
        }
        PureState::normalized(amps, dims)
    }
}

#[derive(Clone, Debug)]
pub struct Dicke3Ground {
    pub state: PureState,
    pub energy: f64,
    /// Distance to the next level of the even sector.
    pub gap: f64,
    pub n_max: usize,
    pub photon_tail: f64,
}

/// Even-sector ground state, with the photon cutoff grown from `n_max` in
/// steps until the tail check passes if `auto_grow` is set.
pub fn dicke3_ground_state(params: Dicke3Params, n_max: usize, auto_grow: bool) -> Result<Dicke3Ground> {
    let mut cutoff = n_max;
    loop {
        let model = Dicke3Collective::new(params, cutoff)?;
        let h = model.hamiltonian();
        let even: Vec<usize> = (0..model.dim()).filter(|&k| model.is_even(k)).collect();
        let block = CMatrix::from_fn(even.len(), even.len(), |r, c| h[(even[r], even[c])]);
        let eig = eig_hermitian(&block)?;
        let mut coeffs = CVector::from_element(model.dim(), ZERO);
        for (r, &k) in even.iter().enumerate() {
            coeffs[k] = eig.vectors[(r, 0)];
        }
        let state = model.embed(&coeffs)?;
        let tail = photon_tail(&state, 0);
        if tail < TAIL_LIMIT {
            return Ok(Dicke3Ground {
                state,
                energy: eig.values[0],
                gap: eig.values.get(1).map_or(f64::INFINITY, |e| e - eig.values[0]),
                n_max: cutoff,
                photon_tail: tail,
            });
        }
        if !auto_grow || cutoff + NMAX_STEP > NMAX_CEILING {
            return Err(Error::CutoffInsufficient { n_max: cutoff, tail });
        }
        cutoff += NMAX_STEP;
    }
}

/// Quenched ergotropic volume of the ground state over every cut of cavity
/// plus atoms, one representative per permutation class.
pub fn dicke3_volume(params: Dicke3Params, n_max: usize, auto_grow: bool) -> Result<ErgotropyReport> {
    let gs = dicke3_ground_state(params, n_max, auto_grow)?;
    let cavity = LocalSpectrum::from_levels((0..=gs.n_max).map(|m| (m as f64 * params.omega_c, 1)))?;
    let atom = LocalSpectrum::from_levels([(0.0, 1), (params.omega_a, 2)])?;
    let mut spectra = vec![cavity];
    spectra.extend(std::iter::repeat_n(atom, params.n_atoms));
    let cuts = enumerate_bipartitions(params.n_atoms + 1, BipartitionMode::SymmetryClasses { fixed: 1 })?;
    Ok(exact_volume(&gs.state, &spectra, &cuts)?
        .with_meta("n_max", gs.n_max)
        .with_meta("photon_tail", format!("{:e}", gs.photon_tail))
        .with_meta("ground_energy", gs.energy)
        .with_meta("sector", "even parity, symmetric"))
}
