//! Closed-form Tavis–Cummings dressed states and their spin-block marginals.
//!
//! A dressed state with `i` excitations is the equal superposition of
//! `|i - l>_cavity |N, l>_Dicke` over admissible `l` (the photon number must lie
//! in `0..=N_ph`). Every cut separates some `n` spins from the cavity and the
//! remaining `N - n` spins, and the `n`-spin marginal is diagonal in the Dicke
//! basis, so all gaps follow from binomial weights.

use crate::ergotropy::{
    gap_from_schmidt, ErgotropyReport, Backend, Cut, GapEntry, LocalSpectrum, binomial_u64,
};
use crate::error::{Error, Result};
use crate::hilbert::{eigvalsh, CMatrix, CVector, PureState, SubsystemDims, C64, ZERO};

/// Which local space the passive assignment may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AssignmentMode {
    /// Every level of the `2^n`-dimensional spin space, with binomial degeneracy.
    FullSpace,
    /// Only the symmetric (Dicke) levels, one per excitation number.
    SymmetricSubspace,
}

impl std::fmt::Display for AssignmentMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AssignmentMode::FullSpace => "full",
            AssignmentMode::SymmetricSubspace => "subspace",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DressedParams {
    pub n_spins: usize,
    pub n_ph: usize,
    pub excitations: usize,
    pub omega_c: f64,
    pub omega_a: f64,
}

impl DressedParams {
    pub fn resonant(n_spins: usize, n_ph: usize, excitations: usize) -> Self {
        Self { n_spins, n_ph, excitations, omega_c: 1.0, omega_a: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_spins == 0 {
            return Err(Error::InvalidArgument("at least one spin is required".into()));
        }
        if self.excitations > self.n_spins + self.n_ph {
            return Err(Error::InvalidArgument(format!(
                "{} excitations exceed N + N_ph = {}",
                self.excitations,
                self.n_spins + self.n_ph
            )));
        }
        Ok(())
    }

    /// Admissible collective spin excitations `l`: `0 <= i - l <= N_ph`.
    pub fn window(&self) -> std::ops::RangeInclusive<usize> {
        self.excitations.saturating_sub(self.n_ph)..=self.excitations.min(self.n_spins)
    }

    pub fn normalization(&self) -> usize {
        let w = self.window();
        w.end() + 1 - w.start()
    }
}

/// Populations of the `n`-spin marginal indexed by its excitation number `l`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalMarginal {
    pub populations: Vec<f64>,
    pub n: usize,
}

impl DiagonalMarginal {
    pub fn sorted_desc(&self) -> Vec<f64> {
        let mut p = self.populations.clone();
        p.sort_by(|a, b| b.total_cmp(a));
        p
    }
}

/// `ln k!` for `k = 0..=n`.
struct LnFactorial(Vec<f64>);

impl LnFactorial {
    fn new(n: usize) -> Self {
        let mut table = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        table.push(0.0);
        for k in 1..=n {
            acc += (k as f64).ln();
            table.push(acc);
        }
        Self(table)
    }

    fn ln_binomial(&self, n: usize, k: usize) -> f64 {
        self.0[n] - self.0[k] - self.0[n - k]
    }
}

/// Dressed state on `[cavity (N_ph + 1), Dicke ladder (N + 1)]`.
pub fn dressed_state(p: &DressedParams) -> Result<PureState> {
    p.validate()?;
    let dims = SubsystemDims::new(vec![p.n_ph + 1, p.n_spins + 1])?;
    let amp = C64::new(1.0 / (p.normalization() as f64).sqrt(), 0.0);
    let mut amps = CVector::from_element(dims.total(), ZERO);
    for l in p.window() {
        amps[dims.index_of(&[p.excitations - l, l])] = amp;
    }
    PureState::new(amps, dims)
}

/// Dressed state with every spin as its own subsystem, on `[N_ph + 1, 2, ..., 2]`.
pub fn dressed_state_spins(p: &DressedParams) -> Result<PureState> {
    p.validate()?;
    if p.n_spins > 20 {
        return Err(Error::InvalidArgument("explicit spin register limited to 20 spins".into()));
    }
    let mut dims = vec![p.n_ph + 1];
    dims.extend(std::iter::repeat_n(2, p.n_spins));
    let dims = SubsystemDims::new(dims)?;
    let configs = 1usize << p.n_spins;
    let norm = p.normalization() as f64;
    let mut amps = CVector::from_element(dims.total(), ZERO);
    for config in 0..configs {
        let l = config.count_ones() as usize;
        if p.window().contains(&l) {
            let a = 1.0 / (norm * binomial_u64(p.n_spins, l) as f64).sqrt();
            amps[(p.excitations - l) * configs + config] = C64::new(a, 0.0);
        }
    }
    PureState::normalized(amps, dims)
}

/// Marginal of `n` spins, computed from binomial weights in log space.
pub fn dressed_marginal(p: &DressedParams, n: usize) -> Result<DiagonalMarginal> {
    p.validate()?;
    if n == 0 || n > p.n_spins {
        return Err(Error::InvalidArgument(format!("block size {n} outside 1..={}", p.n_spins)));
    }
    let big_n = p.n_spins;
    let lf = LnFactorial::new(big_n);
    let norm = p.normalization() as f64;
    let window = p.window();
    let populations = (0..=n)
        .map(|l| {
            (0..=big_n - n)
                .filter(|j| window.contains(&(l + j)))
                .map(|j| (lf.ln_binomial(big_n - n, j) + lf.ln_binomial(n, l) - lf.ln_binomial(big_n, l + j)).exp())
                .sum::<f64>()
                / norm
        })
        .collect();
    Ok(DiagonalMarginal { populations, n })
}

/// Local spectrum of `n` spins, each with splitting `omega_a`.
pub fn spin_block_spectrum(n: usize, omega_a: f64, mode: AssignmentMode) -> Result<LocalSpectrum> {
    LocalSpectrum::from_levels((0..=n).map(|l| {
        let mult = match mode {
            AssignmentMode::FullSpace => binomial_u64(n, l),
            AssignmentMode::SymmetricSubspace => 1,
        };
        (l as f64 * omega_a, mult)
    }))
}

/// Local spectrum of the cavity together with `m` spins.
pub fn cavity_block_spectrum(n_ph: usize, m: usize, omega_c: f64, omega_a: f64, mode: AssignmentMode) -> Result<LocalSpectrum> {
    let cavity = LocalSpectrum::from_levels((0..=n_ph).map(|k| (k as f64 * omega_c, 1)))?;
    if m == 0 {
        return Ok(cavity);
    }
    Ok(cavity.combine(&spin_block_spectrum(m, omega_a, mode)?))
}

/// Gap of the cut separating `n` spins from the cavity and the other spins.
pub fn dressed_gap(p: &DressedParams, n: usize, mode: AssignmentMode) -> Result<f64> {
    let marginal = dressed_marginal(p, n)?;
    let spins = spin_block_spectrum(n, p.omega_a, mode)?;
    let rest = cavity_block_spectrum(p.n_ph, p.n_spins - n, p.omega_c, p.omega_a, mode)?;
    gap_from_schmidt(&marginal.sorted_desc(), &spins, &rest)
}

/// Ergotropic volume over the `N` spin-block cuts.
pub fn dressed_volume(p: &DressedParams, mode: AssignmentMode) -> Result<ErgotropyReport> {
    p.validate()?;
    let gaps = (1..=p.n_spins)
        .map(|n| {
            Ok(GapEntry {
                cut: Cut::Block { start: 1, len: n, n_subsystems: p.n_spins + 1 },
                multiplicity: 1,
                gap: dressed_gap(p, n, mode)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ErgotropyReport::new(gaps, Backend::Dicke)?
        .with_meta("assignment", mode)
        .with_meta("cuts", "spin blocks n = 1..N"))
}

/// Generalized geometric measure and GME-concurrence from the block marginals.
pub fn dressed_measures(p: &DressedParams) -> Result<(f64, f64)> {
    let mut max_coeff: f64 = 0.0;
    let mut min_conc = f64::INFINITY;
    for n in 1..=p.n_spins {
        let m = dressed_marginal(p, n)?;
        max_coeff = m.populations.iter().cloned().fold(max_coeff, f64::max);
        let purity: f64 = m.populations.iter().map(|x| x * x).sum();
        min_conc = min_conc.min((2.0 * (1.0 - purity)).max(0.0).sqrt());
    }
    Ok(((1.0 - max_coeff).max(0.0), min_conc))
}

/// Spectrum of the `n`-spin marginal of the symmetric state `Σ_L c_L |N, L>`,
/// descending.
pub fn symmetric_marginal_spectrum(coeffs: &[C64], n: usize) -> Result<Vec<f64>> {
    let big_n = coeffs.len().checked_sub(1).ok_or(Error::InvalidDims("empty Dicke ladder".into()))?;
    if n == 0 || n >= big_n {
        return Err(Error::InvalidArgument(format!("block size {n} outside 1..{big_n}")));
    }
    let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized(norm));
    }
    let lf = LnFactorial::new(big_n);
    // |N, L> = Σ_{l+j=L} w(l, j) |n, l>|N-n, j>
    let w = |l: usize, j: usize| {
        (0.5 * (lf.ln_binomial(n, l) + lf.ln_binomial(big_n - n, j) - lf.ln_binomial(big_n, l + j))).exp()
    };
    let rho = CMatrix::from_fn(n + 1, n + 1, |l, m| {
        (0..=big_n - n).map(|j| coeffs[l + j] * coeffs[m + j].conj() * (w(l, j) * w(m, j))).sum()
    });
    let mut pops: Vec<f64> = eigvalsh(&rho)?.into_iter().map(|p| p.max(0.0)).collect();
    pops.reverse();
    Ok(pops)
}

/// Volume of a permutation-symmetric state of `N` spins over all cuts, one
/// class per block size with its class size as multiplicity.
pub fn symmetric_volume(coeffs: &[C64], omega_a: f64, mode: AssignmentMode) -> Result<ErgotropyReport> {
    let big_n = coeffs.len().saturating_sub(1);
    if !(2..=60).contains(&big_n) {
        return Err(Error::InvalidArgument(format!("symmetric volume needs 2..=60 spins, got {big_n}")));
    }
    let gaps = (1..=big_n / 2)
        .map(|n| {
            let pops = symmetric_marginal_spectrum(coeffs, n)?;
            let a = spin_block_spectrum(n, omega_a, mode)?;
            let b = spin_block_spectrum(big_n - n, omega_a, mode)?;
            let classes = binomial_u64(big_n, n);
            Ok(GapEntry {
                cut: Cut::Block { start: 0, len: n, n_subsystems: big_n },
                multiplicity: if 2 * n == big_n { classes / 2 } else { classes },
                gap: gap_from_schmidt(&pops, &a, &b)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ErgotropyReport::new(gaps, Backend::Dicke)?.with_meta("assignment", mode).with_meta("cuts", "all, by block size"))
}
