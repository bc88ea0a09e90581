//! Passive energies, ergotropy, ergotropic gaps and the ergotropic volume.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::hilbert::{eigvalsh, schmidt_squared, Bipartition, CMatrix, DensityOperator, PureState};
use crate::models::HamiltonianSpec;
use crate::optim::{minimize, OptResult, OptimizerConfig};

/// Gaps at or below this value count as zero when forming a volume.
pub const GAP_ZERO: f64 = 1e-10;
/// Negative values above this are round-off and clamp to zero; below it they are errors.
pub const NEGATIVE_LIMIT: f64 = -1e-6;

const LEVEL_MERGE_TOL: f64 = 1e-9;

/// Clamps round-off negatives of an ergotropic quantity to zero.
pub fn clamp_nonnegative(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::NegativeGap(x));
    }
    if x >= 0.0 {
        Ok(x)
    } else if x >= NEGATIVE_LIMIT {
        Ok(0.0)
    } else {
        Err(Error::NegativeGap(x))
    }
}

/// Energy levels of a local Hamiltonian with explicit degeneracies, ground at zero.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalSpectrum {
    levels: Vec<(f64, u64)>,
}

impl LocalSpectrum {
    /// Builds from `(energy, multiplicity)` pairs in any order; near-equal
    /// energies are merged and the result is shifted to a zero ground.
    pub fn from_levels(levels: impl IntoIterator<Item = (f64, u64)>) -> Result<Self> {
        let mut raw: Vec<(f64, u64)> = levels.into_iter().filter(|&(_, m)| m > 0).collect();
        if raw.is_empty() {
            return Err(Error::InvalidArgument("spectrum has no levels".into()));
        }
        if raw.iter().any(|(e, _)| !e.is_finite()) {
            return Err(Error::InvalidArgument("non-finite energy level".into()));
        }
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let ground = raw[0].0;
        let mut merged: Vec<(f64, u64)> = Vec::with_capacity(raw.len());
        for (e, m) in raw {
            let e = e - ground;
            match merged.last_mut() {
                Some(last) if (e - last.0).abs() <= LEVEL_MERGE_TOL * e.abs().max(1.0) => {
                    last.1 = last.1.saturating_add(m);
                }
                _ => merged.push((e, m)),
            }
        }
        merged[0].0 = 0.0;
        Ok(Self { levels: merged })
    }

    pub fn from_energies(energies: &[f64]) -> Result<Self> {
        Self::from_levels(energies.iter().map(|&e| (e, 1)))
    }

    /// Spectrum of a Hermitian operator.
    pub fn from_hamiltonian(h: &CMatrix) -> Result<Self> {
        Self::from_energies(&eigvalsh(h)?)
    }

    /// Two-level system with the given splitting.
    pub fn qubit(splitting: f64) -> Self {
        Self::from_levels([(0.0, 1), (splitting, 1)]).expect("two levels")
    }

    /// `m` non-interacting two-level systems: levels `k * splitting` with multiplicity `C(m, k)`.
    pub fn qubit_sum(m: usize, splitting: f64) -> Self {
        Self::from_levels((0..=m).map(|k| (k as f64 * splitting, binomial_u64(m, k)))).expect("m + 1 levels")
    }

    /// Spectrum of the sum of two non-interacting Hamiltonians.
    pub fn combine(&self, other: &LocalSpectrum) -> LocalSpectrum {
        let mut out = Vec::with_capacity(self.levels.len() * other.levels.len());
        for &(e1, m1) in &self.levels {
            for &(e2, m2) in &other.levels {
                out.push((e1 + e2, m1.saturating_mul(m2)));
            }
        }
        Self::from_levels(out).expect("nonempty product")
    }

    pub fn scaled(&self, factor: f64) -> Result<LocalSpectrum> {
        Self::from_levels(self.levels.iter().map(|&(e, m)| (e * factor, m)))
    }

    pub fn levels(&self) -> &[(f64, u64)] {
        &self.levels
    }

    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.0).collect()
    }

    pub fn multiplicities(&self) -> Vec<u64> {
        self.levels.iter().map(|l| l.1).collect()
    }

    /// Dimension of the described space (saturating).
    pub fn dimension(&self) -> u64 {
        self.levels.iter().fold(0u64, |acc, l| acc.saturating_add(l.1))
    }

    pub fn max_energy(&self) -> f64 {
        self.levels.last().map_or(0.0, |l| l.0)
    }
}

/// `C(n, k)` saturating at `u64::MAX`.
pub fn binomial_u64(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Marginal populations (descending) paired with the local spectrum they are assigned to.
#[derive(Clone, Debug, PartialEq)]
pub struct PassiveSpectrumPair {
    populations: Vec<f64>,
    spectrum: LocalSpectrum,
}

impl PassiveSpectrumPair {
    /// Sorts `populations` descending and checks they form a distribution.
    pub fn new(mut populations: Vec<f64>, spectrum: LocalSpectrum) -> Result<Self> {
        if populations.iter().any(|p| !p.is_finite() || *p < -1e-12) {
            return Err(Error::InvalidPopulations("negative or non-finite population".into()));
        }
        let total: f64 = populations.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidPopulations(format!("populations sum to {total}")));
        }
        populations.iter_mut().for_each(|p| *p = p.max(0.0));
        populations.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { populations, spectrum })
    }

    pub fn populations(&self) -> &[f64] {
        &self.populations
    }

    pub fn spectrum(&self) -> &LocalSpectrum {
        &self.spectrum
    }
}

/// Minimum energy reachable unitarily: largest population on the lowest level.
pub fn passive_energy(pair: &PassiveSpectrumPair) -> Result<f64> {
    passive_energy_sorted(&pair.populations, &pair.spectrum)
}

/// Same as [`passive_energy`] for populations already sorted descending and
/// possibly truncated (sum below one).
pub fn passive_energy_sorted(populations: &[f64], spectrum: &LocalSpectrum) -> Result<f64> {
    let count = populations.len() as u64;
    if count > spectrum.dimension() {
        return Err(Error::SpectrumTooSmall { populations: populations.len(), dimension: spectrum.dimension() });
    }
    let mut energy = 0.0;
    let mut pops = populations.iter();
    'levels: for &(e, m) in spectrum.levels() {
        for _ in 0..m {
            match pops.next() {
                Some(&p) => energy += p * e,
                None => break 'levels,
            }
        }
    }
    Ok(energy)
}

/// Work extractable from `rho` by global unitaries under Hamiltonian `h`.
pub fn ergotropy(rho: &DensityOperator, h: &CMatrix) -> Result<f64> {
    let dim = rho.matrix().nrows();
    if h.nrows() != dim || h.ncols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: h.nrows() });
    }
    let energies = eigvalsh(h)?;
    let pops = rho.populations()?;
    let passive: f64 = pops.iter().zip(&energies).map(|(p, e)| p * e).sum();
    let mean = (h * rho.matrix()).trace().re;
    clamp_nonnegative(mean - passive)
}

/// Sum of the two marginal passive energies for a shared Schmidt spectrum.
/// Entries beyond the smaller side's dimension must vanish and are dropped.
pub fn gap_from_schmidt(schmidt: &[f64], side_a: &LocalSpectrum, side_b: &LocalSpectrum) -> Result<f64> {
    let rank = side_a.dimension().min(side_b.dimension()).min(schmidt.len() as u64) as usize;
    let (kept, dropped) = schmidt.split_at(rank);
    if dropped.iter().any(|&p| p > 1e-12) {
        return Err(Error::SpectrumTooSmall { populations: schmidt.len(), dimension: rank as u64 });
    }
    clamp_nonnegative(passive_energy_sorted(kept, side_a)? + passive_energy_sorted(kept, side_b)?)
}

/// Ergotropic gap across `cut` with interactions quenched: the sum of the
/// passive energies of both marginals against their local spectra.
pub fn quenched_gap(state: &PureState, cut: &Bipartition, spectra: (&LocalSpectrum, &LocalSpectrum)) -> Result<f64> {
    let da = state.dims().masked_total(cut.side_a()) as u64;
    let db = state.dims().total() as u64 / da;
    if spectra.0.dimension() != da {
        return Err(Error::DimensionMismatch { expected: da as usize, got: spectra.0.dimension() as usize });
    }
    if spectra.1.dimension() != db {
        return Err(Error::DimensionMismatch { expected: db as usize, got: spectra.1.dimension() as usize });
    }
    let schmidt = schmidt_squared(state, cut)?;
    gap_from_schmidt(&schmidt, spectra.0, spectra.1)
}

/// Outcome of the interacting (unquenched) gap computation.
#[derive(Clone, Debug)]
pub struct InteractingGap {
    pub gap: f64,
    pub global_ergotropy: f64,
    pub local_ergotropy: f64,
    pub optimization: OptResult,
}

/// Ergotropic gap with the interaction kept: global ergotropy in closed form
/// minus the best energy extracted by `U_A ⊗ U_B`, found numerically.
pub fn interacting_gap(
    state: &PureState,
    h: &HamiltonianSpec,
    cut: &Bipartition,
    opt: &OptimizerConfig,
) -> Result<InteractingGap> {
    if h.dims() != state.dims() {
        return Err(Error::DimensionMismatch { expected: state.dims().total(), got: h.dims().total() });
    }
    let full = h.assemble();
    let e_min = eigvalsh(&full)?[0];
    let mean = state.expectation(&full)?;
    let global = clamp_nonnegative(mean - e_min)?;

    let objective = crate::optim::LocalUnitaryObjective::new(state, &full, cut)?;
    let n_params = objective.n_params();
    let result = minimize(|x| objective.energy(x), n_params, opt)?;
    if !result.converged {
        return Err(Error::OptimizerNotConverged { best_value: result.best_value, iterations: result.iterations_used });
    }
    // The optimizer cannot beat the global minimum; tiny overshoot is round-off.
    let local_min = result.best_value.max(e_min);
    let local = clamp_nonnegative(mean - local_min)?;
    let gap = clamp_nonnegative(global - local)?;
    Ok(InteractingGap { gap, global_ergotropy: global, local_ergotropy: local, optimization: result })
}

/// How the set of cuts is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BipartitionMode {
    /// Every unordered cut, `2^(n-1) - 1` of them.
    All,
    /// Blocks of consecutive sites on a ring, sizes `1..=n/2`.
    Contiguous,
    /// The first `fixed` sites are distinguishable, the rest interchangeable;
    /// one representative per class with its class size.
    SymmetryClasses { fixed: usize },
}

/// Unordered cuts of `n` subsystems with multiplicities. Representatives keep
/// the last site on side B, except for symmetry classes, where side A holds
/// the lowest-indexed interchangeable sites.
pub fn enumerate_bipartitions(n: usize, mode: BipartitionMode) -> Result<Vec<(Bipartition, u64)>> {
    if !(2..=63).contains(&n) {
        return Err(Error::InvalidArgument(format!("cannot enumerate cuts of {n} subsystems")));
    }
    match mode {
        BipartitionMode::All => {
            if n > 30 {
                return Err(Error::InvalidArgument(format!("{n} subsystems give too many cuts to enumerate")));
            }
            (1..(1u64 << (n - 1))).map(|m| Ok((Bipartition::new(m, n)?, 1))).collect()
        }
        BipartitionMode::Contiguous => {
            let mut seen = Vec::new();
            for len in 1..=n / 2 {
                for start in 0..n {
                    let mask = (0..len).fold(0u64, |acc, i| acc | 1 << ((start + i) % n));
                    let cut = Bipartition::new(mask, n)?.canonical();
                    if !seen.contains(&cut) {
                        seen.push(cut);
                    }
                }
            }
            Ok(seen.into_iter().map(|c| (c, 1)).collect())
        }
        BipartitionMode::SymmetryClasses { fixed } => {
            if fixed > n {
                return Err(Error::InvalidArgument("more fixed sites than subsystems".into()));
            }
            if n > 30 {
                return Err(Error::InvalidArgument(format!("{n} subsystems give too many cuts to enumerate")));
            }
            let fixed_mask = (1u64 << fixed) - 1;
            let full = (1u64 << n) - 1;
            let mut classes: BTreeMap<(u64, u32), u64> = BTreeMap::new();
            for m in 1..(1u64 << (n - 1)) {
                let key_of = |side: u64| (side & fixed_mask, (side & !fixed_mask).count_ones());
                let key = key_of(m).min(key_of(full & !m));
                *classes.entry(key).or_insert(0) += 1;
            }
            classes
                .into_iter()
                .map(|((fixed_part, count), mult)| {
                    let free = (fixed..fixed + count as usize).fold(0u64, |acc, i| acc | 1 << i);
                    Ok((Bipartition::new(fixed_part | free, n)?, mult))
                })
                .collect()
        }
    }
}

/// Geometric mean of gaps weighted by multiplicity; exactly zero if any gap vanishes.
pub fn ergotropic_volume(gaps: &[(f64, u64)]) -> Result<f64> {
    let weight: u64 = gaps.iter().map(|g| g.1).sum();
    if weight == 0 {
        return Err(Error::EmptyGapSet);
    }
    let mut log_sum = 0.0;
    let mut zero = false;
    for &(gap, m) in gaps.iter().filter(|g| g.1 > 0) {
        let gap = clamp_nonnegative(gap)?;
        if gap <= GAP_ZERO {
            zero = true;
        } else {
            log_sum += m as f64 * gap.ln();
        }
    }
    if zero {
        return Ok(0.0);
    }
    Ok((log_sum / weight as f64).exp())
}

/// Label of a cut in a report. Large symmetric systems exceed the 63-site
/// mask, so contiguous blocks have their own variant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Cut {
    Sites(Bipartition),
    /// Sites `start..start + len` against the rest of `n_subsystems`.
    Block { start: usize, len: usize, n_subsystems: usize },
}

impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cut::Sites(b) => b.fmt(f),
            Cut::Block { start, len, n_subsystems } => {
                write!(f, "[{start}..{})|rest of {n_subsystems}", start + len)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    Exact,
    Dicke,
    FreeFermion,
    Circuit,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Exact => "exact",
            Backend::Dicke => "dicke",
            Backend::FreeFermion => "freefermion",
            Backend::Circuit => "circuit",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapEntry {
    pub cut: Cut,
    pub multiplicity: u64,
    pub gap: f64,
}

/// Per-cut gaps and their geometric mean, with provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct ErgotropyReport {
    pub gaps: Vec<GapEntry>,
    pub volume: f64,
    pub backend: Backend,
    pub metadata: BTreeMap<String, String>,
}

impl ErgotropyReport {
    pub fn new(gaps: Vec<GapEntry>, backend: Backend) -> Result<Self> {
        let pairs: Vec<(f64, u64)> = gaps.iter().map(|g| (g.gap, g.multiplicity)).collect();
        let volume = ergotropic_volume(&pairs)?;
        Ok(Self { gaps, volume, backend, metadata: BTreeMap::new() })
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }

    pub fn gap(&self, cut: &Cut) -> Option<f64> {
        self.gaps.iter().find(|g| &g.cut == cut).map(|g| g.gap)
    }

    /// Whether `volume` is the weighted geometric mean of `gaps` (relative `tol`)
    /// and vanishes exactly when some gap does.
    pub fn satisfies_geometric_mean(&self, tol: f64) -> bool {
        let any_zero = self.gaps.iter().any(|g| g.multiplicity > 0 && g.gap <= GAP_ZERO);
        if any_zero {
            return self.volume == 0.0;
        }
        let weight: u64 = self.gaps.iter().map(|g| g.multiplicity).sum();
        let log_mean: f64 =
            self.gaps.iter().map(|g| g.multiplicity as f64 * g.gap.ln()).sum::<f64>() / weight as f64;
        let expect = log_mean.exp();
        self.volume > 0.0 && (self.volume - expect).abs() <= tol * expect
    }
}

/// Local spectra of the two sides of `cut` for a Hamiltonian whose quenched
/// part is a sum of single-site terms with the given per-site spectra.
pub fn side_spectra(site_spectra: &[LocalSpectrum], cut: &Bipartition) -> (LocalSpectrum, LocalSpectrum) {
    let fold = |sites: Vec<usize>| {
        sites
            .into_iter()
            .map(|s| site_spectra[s].clone())
            .reduce(|a, b| a.combine(&b))
            .expect("both sides nonempty")
    };
    (fold(cut.sites_a()), fold(cut.sites_b()))
}

/// Quenched gaps over `cuts` for a state whose local Hamiltonian has the
/// given per-site spectra.
pub fn exact_volume(
    state: &PureState,
    site_spectra: &[LocalSpectrum],
    cuts: &[(Bipartition, u64)],
) -> Result<ErgotropyReport> {
    if site_spectra.len() != state.dims().len() {
        return Err(Error::DimensionMismatch { expected: state.dims().len(), got: site_spectra.len() });
    }
    let mut cache: HashMap<u64, LocalSpectrum> = HashMap::new();
    let mut side = |mask: u64| {
        cache
            .entry(mask)
            .or_insert_with(|| {
                (0..site_spectra.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|s| site_spectra[s].clone())
                    .reduce(|a, b| a.combine(&b))
                    .expect("nonempty side")
            })
            .clone()
    };
    let mut gaps = Vec::with_capacity(cuts.len());
    for &(cut, multiplicity) in cuts {
        let (sa, sb) = (side(cut.side_a()), side(cut.side_b()));
        let gap = quenched_gap(state, &cut, (&sa, &sb))?;
        gaps.push(GapEntry { cut: Cut::Sites(cut), multiplicity, gap });
    }
    ErgotropyReport::new(gaps, Backend::Exact)
}
