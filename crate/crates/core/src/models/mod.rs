//! Hamiltonian builders and ground-state solvers.
//!
//! Conventions shared by the cavity models:
//! - the cavity is subsystem 0 with Fock states `0..=n_max`;
//! - a two-level atom has basis `(|g>, |e>)`, so index 1 is the excited level;
//! - a three-level atom has basis `(|0>, |1>, |2>)` with `|0>` the ground level.

mod dicke3;
mod ground;

pub use dicke3::{
    dicke3_ground_state, dicke3_volume, Dicke3Collective, Dicke3Ground, Dicke3Params, DEFAULT_DICKE3_NMAX,
};
pub use ground::{ground_state, lanczos_lowest, GroundState, GroundStateOptions, LanczosResult};

use std::collections::BTreeMap;

use nalgebra_sparse::{CooMatrix, CsrMatrix};

use crate::ergotropy::LocalSpectrum;
use crate::error::{Error, Result};
use crate::hilbert::{diag, eigvalsh, pauli_x, pauli_z, split_indices, CMatrix, SubsystemDims, C64, ZERO};

/// Operator acting on an ascending list of sites (tensor order of `sites`).
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub sites: Vec<usize>,
    pub op: CMatrix,
}

/// Local terms plus interactions over a tensor-product space.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianSpec {
    dims: SubsystemDims,
    local_terms: Vec<(usize, CMatrix)>,
    interaction_terms: Vec<Term>,
    parameters: BTreeMap<String, f64>,
    truncated_cavity: Option<usize>,
}

impl HamiltonianSpec {
    pub fn new(dims: SubsystemDims) -> Self {
        Self {
            dims,
            local_terms: Vec::new(),
            interaction_terms: Vec::new(),
            parameters: BTreeMap::new(),
            truncated_cavity: None,
        }
    }

    pub fn add_local(&mut self, site: usize, op: CMatrix) -> Result<()> {
        let d = *self
            .dims
            .as_slice()
            .get(site)
            .ok_or(Error::SiteDimension { site, expected: 0, got: op.nrows() })?;
        if op.nrows() != d || op.ncols() != d {
            return Err(Error::SiteDimension { site, expected: d, got: op.nrows() });
        }
        self.local_terms.push((site, op));
        Ok(())
    }

    /// Adds `op` acting on `sites` (any order; the operator's tensor factors
    /// follow the given order).
    pub fn add_interaction(&mut self, sites: &[usize], op: CMatrix) -> Result<()> {
        let n = self.dims.len();
        let mut sorted = sites.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != sites.len() || sorted.len() < 2 || sorted.iter().any(|&s| s >= n) {
            return Err(Error::InvalidArgument(format!("interaction sites {sites:?} invalid for {n} subsystems")));
        }
        let local: Vec<usize> = sites.iter().map(|&s| self.dims.as_slice()[s]).collect();
        let total: usize = local.iter().product();
        if op.nrows() != total || op.ncols() != total {
            return Err(Error::DimensionMismatch { expected: total, got: op.nrows() });
        }
        let op = if sorted == sites { op } else { reorder_factors(&op, sites, &local) };
        self.interaction_terms.push(Term { sites: sorted, op });
        Ok(())
    }

    pub fn set_parameter(&mut self, name: &str, value: f64) {
        self.parameters.insert(name.to_string(), value);
    }

    pub fn parameter(&self, name: &str) -> Option<f64> {
        self.parameters.get(name).copied()
    }

    pub fn parameters(&self) -> &BTreeMap<String, f64> {
        &self.parameters
    }

    pub fn dims(&self) -> &SubsystemDims {
        &self.dims
    }

    pub fn local_terms(&self) -> &[(usize, CMatrix)] {
        &self.local_terms
    }

    pub fn interaction_terms(&self) -> &[Term] {
        &self.interaction_terms
    }

    /// Site of a cavity whose Fock cutoff is numerical rather than physical.
    pub fn truncated_cavity(&self) -> Option<usize> {
        self.truncated_cavity
    }

    /// The same Hamiltonian with every interaction term removed.
    pub fn quench(&self) -> HamiltonianSpec {
        HamiltonianSpec { interaction_terms: Vec::new(), ..self.clone() }
    }

    /// Sum of the local terms acting on `site` (zero if none).
    pub fn site_hamiltonian(&self, site: usize) -> CMatrix {
        let d = self.dims.as_slice()[site];
        self.local_terms
            .iter()
            .filter(|(s, _)| *s == site)
            .fold(CMatrix::zeros(d, d), |acc, (_, op)| acc + op)
    }

    /// Lowest eigenvalue of each site's local Hamiltonian.
    pub fn local_ground_shift(&self) -> Result<Vec<f64>> {
        (0..self.dims.len()).map(|s| Ok(eigvalsh(&self.site_hamiltonian(s))?[0])).collect()
    }

    /// Zero-ground spectra of the per-site local Hamiltonians.
    pub fn site_spectra(&self) -> Result<Vec<LocalSpectrum>> {
        (0..self.dims.len()).map(|s| LocalSpectrum::from_hamiltonian(&self.site_hamiltonian(s))).collect()
    }

    /// Nonzero matrix elements `(row, col, value)`; duplicates are to be summed.
    pub fn triplets(&self) -> Vec<(usize, usize, C64)> {
        let mut out = Vec::new();
        for (site, op) in &self.local_terms {
            push_term(&self.dims, &[*site], op, &mut out);
        }
        for term in &self.interaction_terms {
            push_term(&self.dims, &term.sites, &term.op, &mut out);
        }
        out
    }

    pub fn assemble(&self) -> CMatrix {
        let dim = self.dims.total();
        let mut m = CMatrix::from_element(dim, dim, ZERO);
        for (r, c, v) in self.triplets() {
            m[(r, c)] += v;
        }
        m
    }

    pub fn assemble_sparse(&self) -> CsrMatrix<C64> {
        let dim = self.dims.total();
        let mut coo = CooMatrix::new(dim, dim);
        for (r, c, v) in self.triplets() {
            coo.push(r, c, v);
        }
        CsrMatrix::from(&coo)
    }
}

fn push_term(dims: &SubsystemDims, sites: &[usize], op: &CMatrix, out: &mut Vec<(usize, usize, C64)>) {
    let mask = sites.iter().fold(0u64, |acc, &s| acc | 1 << s);
    let (ia, ib, da, db) = split_indices(dims, mask);
    let mut full = vec![0usize; da * db];
    for x in 0..ia.len() {
        full[ia[x] * db + ib[x]] = x;
    }
    let columns: Vec<Vec<(usize, C64)>> = (0..da)
        .map(|a| (0..da).filter(|&r| op[(r, a)] != ZERO).map(|r| (r, op[(r, a)])).collect())
        .collect();
    for x in 0..ia.len() {
        for &(r, v) in &columns[ia[x]] {
            out.push((full[r * db + ib[x]], x, v));
        }
    }
}

/// Rewrites an operator given in the tensor order of `sites` into ascending site order.
fn reorder_factors(op: &CMatrix, sites: &[usize], local: &[usize]) -> CMatrix {
    let mut order: Vec<usize> = (0..sites.len()).collect();
    order.sort_by_key(|&i| sites[i]);
    let given = SubsystemDims::new(local.to_vec()).expect("validated dims");
    let sorted = SubsystemDims::new(order.iter().map(|&i| local[i]).collect()).expect("validated dims");
    let map = |x: usize| {
        let digits = given.digits(x);
        sorted.index_of(&order.iter().map(|&i| digits[i]).collect::<Vec<_>>())
    };
    let n = op.nrows();
    let pos: Vec<usize> = (0..n).map(map).collect();
    let mut out = CMatrix::zeros(n, n);
    for c in 0..n {
        for r in 0..n {
            out[(pos[r], pos[c])] = op[(r, c)];
        }
    }
    out
}

/// Cavity annihilation operator truncated at `n_max` photons.
pub fn annihilation(n_max: usize) -> CMatrix {
    let mut a = CMatrix::zeros(n_max + 1, n_max + 1);
    for n in 1..=n_max {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

pub fn number_operator(n_max: usize) -> CMatrix {
    diag(&(0..=n_max).map(|n| n as f64).collect::<Vec<_>>())
}

/// `|e><g|` for a two-level atom.
pub fn raising() -> CMatrix {
    let mut s = CMatrix::zeros(2, 2);
    s[(1, 0)] = C64::new(1.0, 0.0);
    s
}

fn validate_positive(name: &str, v: usize) -> Result<()> {
    if v == 0 {
        return Err(Error::InvalidArgument(format!("{name} must be at least 1")));
    }
    Ok(())
}

/// Tavis–Cummings model: cavity plus `n_spins` two-level atoms,
/// `w_c a†a + (w_a/2) Σ σ_z + (g/√N) Σ (a σ+ + a† σ−)`.
/// With one atom this is the Jaynes–Cummings model.
pub fn build_tc(n_spins: usize, n_max: usize, omega_c: f64, omega_a: f64, g: f64) -> Result<HamiltonianSpec> {
    validate_positive("spin count", n_spins)?;
    validate_positive("photon cutoff", n_max)?;
    let mut dims = vec![n_max + 1];
    dims.extend(std::iter::repeat_n(2, n_spins));
    let mut spec = HamiltonianSpec::new(SubsystemDims::new(dims)?);
    spec.add_local(0, number_operator(n_max) * C64::new(omega_c, 0.0))?;
    let a = annihilation(n_max);
    let sp = raising();
    let coupling = C64::new(g / (n_spins as f64).sqrt(), 0.0);
    let hop = (a.kronecker(&sp) + a.adjoint().kronecker(&sp.adjoint())) * coupling;
    for k in 1..=n_spins {
        spec.add_local(k, diag(&[-0.5 * omega_a, 0.5 * omega_a]))?;
        if g != 0.0 {
            spec.add_interaction(&[0, k], hop.clone())?;
        }
    }
    spec.set_parameter("omega_c", omega_c);
    spec.set_parameter("omega_a", omega_a);
    spec.set_parameter("g", g);
    Ok(spec)
}

/// Total excitation number `a†a + Σ |e><e|` for a spec built by [`build_tc`].
pub fn tc_excitation_operator(spec: &HamiltonianSpec) -> Result<CMatrix> {
    let dims = spec.dims();
    let n_max = dims.as_slice()[0] - 1;
    let mut op = crate::hilbert::embed_local(&number_operator(n_max), 0, dims)?;
    for k in 1..dims.len() {
        op += crate::hilbert::embed_local(&diag(&[0.0, 1.0]), k, dims)?;
    }
    Ok(op)
}

/// V-shaped three-level Dicke model on the full product space:
/// `w_c a†a + w_a Σ(|1><1| + |2><2|) + (i g1/√N)(a − a†) Σ(|0><1| + |1><0|)
///  + (i g2/√N)(a + a†) Σ(|0><2| − |2><0|)`.
pub fn build_dicke3(
    n_atoms: usize,
    n_max: usize,
    omega_c: f64,
    omega_a: f64,
    g1: f64,
    g2: f64,
) -> Result<HamiltonianSpec> {
    validate_positive("atom count", n_atoms)?;
    validate_positive("photon cutoff", n_max)?;
    let mut dims = vec![n_max + 1];
    dims.extend(std::iter::repeat_n(3, n_atoms));
    let mut spec = HamiltonianSpec::new(SubsystemDims::new(dims)?);
    spec.truncated_cavity = Some(0);
    spec.add_local(0, number_operator(n_max) * C64::new(omega_c, 0.0))?;
    let a = annihilation(n_max);
    let ad = a.adjoint();
    let i = C64::new(0.0, 1.0);
    let root = (n_atoms as f64).sqrt();
    let mut x01 = CMatrix::zeros(3, 3);
    x01[(0, 1)] = C64::new(1.0, 0.0);
    x01[(1, 0)] = C64::new(1.0, 0.0);
    let mut y02 = CMatrix::zeros(3, 3);
    y02[(0, 2)] = C64::new(1.0, 0.0);
    y02[(2, 0)] = C64::new(-1.0, 0.0);
    let t1 = (&a - &ad).kronecker(&x01) * (i * g1 / root);
    let t2 = (&a + &ad).kronecker(&y02) * (i * g2 / root);
    let coupling = t1 + t2;
    for k in 1..=n_atoms {
        spec.add_local(k, diag(&[0.0, omega_a, omega_a]))?;
        if g1 != 0.0 || g2 != 0.0 {
            spec.add_interaction(&[0, k], coupling.clone())?;
        }
    }
    spec.set_parameter("omega_c", omega_c);
    spec.set_parameter("omega_a", omega_a);
    spec.set_parameter("g1", g1);
    spec.set_parameter("g2", g2);
    Ok(spec)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Open,
    Periodic,
}

/// Transverse-field Ising chain `−Σ σ_z − g Σ σ_x σ_x` with unit field.
/// A periodic chain of two spins carries the bond twice.
pub fn build_tfim(n_spins: usize, g: f64, boundary: Boundary) -> Result<HamiltonianSpec> {
    if n_spins < 2 {
        return Err(Error::InvalidArgument("the Ising chain needs at least 2 spins".into()));
    }
    let mut spec = HamiltonianSpec::new(SubsystemDims::qubits(n_spins));
    for k in 0..n_spins {
        spec.add_local(k, -pauli_z())?;
    }
    if g != 0.0 {
        let xx = pauli_x().kronecker(&pauli_x()) * C64::new(-g, 0.0);
        for k in 0..n_spins - 1 {
            spec.add_interaction(&[k, k + 1], xx.clone())?;
        }
        if boundary == Boundary::Periodic {
            spec.add_interaction(&[n_spins - 1, 0], xx)?;
        }
    }
    spec.set_parameter("g", g);
    spec.set_parameter("h", 1.0);
    Ok(spec)
}
