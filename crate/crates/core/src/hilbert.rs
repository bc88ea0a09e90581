//! Dense complex linear algebra over tensor-product Hilbert spaces.
//!
//! Index convention: subsystem 0 is the slowest-varying tensor factor, i.e.
//! the leftmost label in a ket `|s0 s1 ... s(n-1)>`. A full basis index is
//! `sum_i s_i * stride_i` with `stride_i = prod_{j>i} d_j`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Asymmetry accepted (relative to the largest entry) before an operator is
/// rejected as non-Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Allowed deviation of a pure state's norm from one.
pub const NORM_TOL: f64 = 1e-12;
/// Allowed deviation of a density operator's trace from one.
pub const TRACE_TOL: f64 = 1e-12;
/// Most negative eigenvalue tolerated in a density operator.
pub const PSD_TOL: f64 = 1e-10;

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Local dimension of every subsystem, in tensor-product order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubsystemDims(Vec<usize>);

impl SubsystemDims {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidDims("no subsystems".into()));
        }
        if dims.len() > 63 {
            return Err(Error::InvalidDims(format!("{} subsystems exceed the 63-site limit", dims.len())));
        }
        if let Some((i, d)) = dims.iter().enumerate().find(|(_, &d)| d < 2) {
            return Err(Error::InvalidDims(format!("subsystem {i} has dimension {d} < 2")));
        }
        dims.iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::InvalidDims("total dimension overflows".into()))?;
        Ok(Self(dims))
    }

    pub fn qubits(n: usize) -> Self {
        Self::uniform(n, 2)
    }

    pub fn uniform(n: usize, d: usize) -> Self {
        Self::new(vec![d; n]).expect("uniform dims are valid")
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.0.len()];
        for i in (0..self.0.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.0[i + 1];
        }
        strides
    }

    /// Dimension of the joint space of the sites in `mask`.
    pub fn masked_total(&self, mask: u64) -> usize {
        self.0
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &d)| d)
            .product()
    }

    /// Dims of the sites selected by `mask`, order preserved.
    pub fn select(&self, mask: u64) -> Result<Self> {
        Self::new(
            self.0
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &d)| d)
                .collect(),
        )
    }

    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.0.len()];
        for (slot, &d) in out.iter_mut().zip(&self.0).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    pub fn index_of(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.0).fold(0, |acc, (&s, &d)| acc * d + s)
    }
}

/// A cut of `n_subsystems` sites into side A (the bit mask) and its complement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bipartition {
    side_a: u64,
    n: usize,
}

impl Bipartition {
    pub fn new(side_a: u64, n_subsystems: usize) -> Result<Self> {
        let n = n_subsystems;
        if n < 2 || n > 63 {
            return Err(Error::InvalidBipartition { mask: side_a, n, reason: "need 2..=63 subsystems" });
        }
        let full = (1u64 << n) - 1;
        if side_a & !full != 0 {
            return Err(Error::InvalidBipartition { mask: side_a, n, reason: "mask names sites out of range" });
        }
        if side_a == 0 || side_a == full {
            return Err(Error::InvalidBipartition { mask: side_a, n, reason: "side A must be nonempty and proper" });
        }
        Ok(Self { side_a, n })
    }

    pub fn from_sites(sites: &[usize], n_subsystems: usize) -> Result<Self> {
        let mut mask = 0u64;
        for &s in sites {
            if s >= 63 {
                return Err(Error::InvalidBipartition { mask, n: n_subsystems, reason: "site index out of range" });
            }
            mask |= 1 << s;
        }
        Self::new(mask, n_subsystems)
    }

    /// Contiguous block `[start, start + len)` on an open chain.
    pub fn block(start: usize, len: usize, n_subsystems: usize) -> Result<Self> {
        let sites: Vec<usize> = (start..start + len).collect();
        Self::from_sites(&sites, n_subsystems)
    }

    pub fn side_a(&self) -> u64 {
        self.side_a
    }

    pub fn side_b(&self) -> u64 {
        !self.side_a & ((1u64 << self.n) - 1)
    }

    pub fn n_subsystems(&self) -> usize {
        self.n
    }

    pub fn complement(&self) -> Self {
        Self { side_a: self.side_b(), n: self.n }
    }

    /// Representative of the unordered cut: the side holding the last site is B.
    pub fn canonical(&self) -> Self {
        if self.side_a >> (self.n - 1) & 1 == 1 {
            self.complement()
        } else {
            *self
        }
    }

    pub fn contains(&self, site: usize) -> bool {
        site < self.n && self.side_a >> site & 1 == 1
    }

    pub fn sites_a(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.contains(i)).collect()
    }

    pub fn sites_b(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| !self.contains(i)).collect()
    }

    pub fn size_a(&self) -> usize {
        self.side_a.count_ones() as usize
    }

    fn check_against(&self, dims: &SubsystemDims) -> Result<()> {
        if self.n != dims.len() {
            return Err(Error::InvalidBipartition {
                mask: self.side_a,
                n: self.n,
                reason: "subsystem count differs from the state's",
            });
        }
        Ok(())
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: Vec<usize>| v.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{{{}}}|{{{}}}", join(self.sites_a()), join(self.sites_b()))
    }
}

/// Normalized state vector tagged with its tensor structure.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
    dims: SubsystemDims,
}

impl PureState {
    pub fn new(amplitudes: CVector, dims: SubsystemDims) -> Result<Self> {
        if amplitudes.len() != dims.total() {
            return Err(Error::DimensionMismatch { expected: dims.total(), got: amplitudes.len() });
        }
        let dev = (amplitudes.norm() - 1.0).abs();
        if dev > NORM_TOL {
            return Err(Error::NotNormalized(dev));
        }
        Ok(Self { amplitudes, dims })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(mut amplitudes: CVector, dims: SubsystemDims) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized(norm));
        }
        amplitudes.unscale_mut(norm);
        Self::new(amplitudes, dims)
    }

    pub fn basis(dims: SubsystemDims, digits: &[usize]) -> Result<Self> {
        if digits.len() != dims.len() {
            return Err(Error::DimensionMismatch { expected: dims.len(), got: digits.len() });
        }
        for (site, (&s, &d)) in digits.iter().zip(dims.as_slice()).enumerate() {
            if s >= d {
                return Err(Error::SiteDimension { site, expected: d, got: s });
            }
        }
        let mut amps = CVector::zeros(dims.total());
        amps[dims.index_of(digits)] = ONE;
        Ok(Self { amplitudes: amps, dims })
    }

    /// Tensor product of normalized local vectors.
    pub fn product(locals: &[CVector]) -> Result<Self> {
        let dims = SubsystemDims::new(locals.iter().map(|v| v.len()).collect())?;
        let mut amps = CVector::from_element(1, ONE);
        for v in locals {
            amps = amps.kronecker(v);
        }
        Self::normalized(amps, dims)
    }

    /// `(|0...0> + |1...1>)/sqrt(2)` on `n` qubits.
    pub fn ghz(n: usize) -> Result<Self> {
        let dims = SubsystemDims::new(vec![2; n])?;
        let mut amps = CVector::zeros(dims.total());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        amps[0] = C64::new(h, 0.0);
        amps[dims.total() - 1] = C64::new(h, 0.0);
        Ok(Self { amplitudes: amps, dims })
    }

    /// Equal superposition of all single-excitation kets on `n` qubits.
    pub fn w(n: usize) -> Result<Self> {
        let dims = SubsystemDims::new(vec![2; n])?;
        let mut amps = CVector::zeros(dims.total());
        let a = C64::new(1.0 / (n as f64).sqrt(), 0.0);
        for q in 0..n {
            amps[1 << (n - 1 - q)] = a;
        }
        Ok(Self { amplitudes: amps, dims })
    }

    /// Haar-random state drawn from `rng`.
    pub fn random<R: Rng + ?Sized>(dims: SubsystemDims, rng: &mut R) -> Self {
        let amps = CVector::from_fn(dims.total(), |_, _| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        Self::normalized(amps, dims).expect("gaussian vector is nonzero")
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dims(&self) -> &SubsystemDims {
        &self.dims
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn fidelity(&self, other: &PureState) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn expectation(&self, op: &CMatrix) -> Result<f64> {
        if op.nrows() != self.amplitudes.len() || op.ncols() != self.amplitudes.len() {
            return Err(Error::DimensionMismatch { expected: self.amplitudes.len(), got: op.nrows() });
        }
        Ok(self.amplitudes.dotc(&(op * &self.amplitudes)).re)
    }

    /// Applies a single-site operator without forming the full embedding.
    pub fn apply_local(&self, op: &CMatrix, site: usize) -> Result<PureState> {
        let d = *self.dims.as_slice().get(site).ok_or(Error::SiteDimension { site, expected: 0, got: 0 })?;
        if op.nrows() != d || op.ncols() != d {
            return Err(Error::SiteDimension { site, expected: d, got: op.nrows() });
        }
        let stride = self.dims.strides()[site];
        let block = stride * d;
        let mut out = CVector::zeros(self.amplitudes.len());
        for base in (0..self.amplitudes.len()).step_by(block) {
            for inner in 0..stride {
                for r in 0..d {
                    let mut acc = ZERO;
                    for c in 0..d {
                        acc += op[(r, c)] * self.amplitudes[base + c * stride + inner];
                    }
                    out[base + r * stride + inner] = acc;
                }
            }
        }
        Self::normalized(out, self.dims.clone())
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator {
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
            dims: self.dims.clone(),
        }
    }

    /// Amplitudes arranged as a `d_A x d_B` matrix for `cut`.
    pub fn cut_matrix(&self, cut: &Bipartition) -> Result<CMatrix> {
        cut.check_against(&self.dims)?;
        let (ia, ib, da, db) = split_indices(&self.dims, cut.side_a());
        let mut psi = CMatrix::zeros(da, db);
        for (x, amp) in self.amplitudes.iter().enumerate() {
            psi[(ia[x], ib[x])] = *amp;
        }
        Ok(psi)
    }

    /// Inverse of [`PureState::cut_matrix`].
    pub fn from_cut_matrix(psi: &CMatrix, dims: SubsystemDims, cut: &Bipartition) -> Result<Self> {
        cut.check_against(&dims)?;
        let (ia, ib, da, db) = split_indices(&dims, cut.side_a());
        if psi.nrows() != da || psi.ncols() != db {
            return Err(Error::DimensionMismatch { expected: da * db, got: psi.len() });
        }
        let amps = CVector::from_fn(dims.total(), |x, _| psi[(ia[x], ib[x])]);
        Self::normalized(amps, dims)
    }
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
    dims: SubsystemDims,
}

impl DensityOperator {
    pub fn new(matrix: CMatrix, dims: SubsystemDims) -> Result<Self> {
        if matrix.nrows() != dims.total() || matrix.ncols() != dims.total() {
            return Err(Error::DimensionMismatch { expected: dims.total(), got: matrix.nrows() });
        }
        let asym = max_asymmetry(&matrix);
        if asym > TRACE_TOL {
            return Err(Error::NotHermitian(asym));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidPopulations(format!("trace {tr} differs from one")));
        }
        let min = eigvalsh(&matrix)?.first().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::InvalidPopulations(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { matrix, dims })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &SubsystemDims {
        &self.dims
    }

    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Eigenvalues in descending order, negatives from round-off clamped to zero.
    pub fn populations(&self) -> Result<Vec<f64>> {
        let mut vals = eigvalsh(&self.matrix)?;
        vals.reverse();
        vals.iter_mut().for_each(|v| *v = v.max(0.0));
        Ok(vals)
    }
}

/// Anything that can be reduced to the sites of side A of a bipartition.
pub trait PartialTrace {
    fn partial_trace(&self, keep: &Bipartition) -> Result<DensityOperator>;
}

impl PartialTrace for PureState {
    fn partial_trace(&self, keep: &Bipartition) -> Result<DensityOperator> {
        let psi = self.cut_matrix(keep)?;
        Ok(DensityOperator {
            matrix: &psi * psi.adjoint(),
            dims: self.dims.select(keep.side_a())?,
        })
    }
}

impl PartialTrace for DensityOperator {
    fn partial_trace(&self, keep: &Bipartition) -> Result<DensityOperator> {
        keep.check_against(&self.dims)?;
        let (ia, ib, da, db) = split_indices(&self.dims, keep.side_a());
        // Inverse map (a, b) -> full index.
        let mut full = vec![0usize; da * db];
        for x in 0..ia.len() {
            full[ia[x] * db + ib[x]] = x;
        }
        let mut out = CMatrix::zeros(da, da);
        for a in 0..da {
            for a2 in 0..da {
                let mut acc = ZERO;
                for b in 0..db {
                    acc += self.matrix[(full[a * db + b], full[a2 * db + b])];
                }
                out[(a, a2)] = acc;
            }
        }
        Ok(DensityOperator { matrix: out, dims: self.dims.select(keep.side_a())? })
    }
}

/// Reduced operator on side A of `keep`; subsystem order is preserved.
pub fn partial_trace<S: PartialTrace + ?Sized>(state: &S, keep: &Bipartition) -> Result<DensityOperator> {
    state.partial_trace(keep)
}

/// For every full index, its index within side A (`mask`) and within side B.
pub(crate) fn split_indices(dims: &SubsystemDims, mask: u64) -> (Vec<usize>, Vec<usize>, usize, usize) {
    let d = dims.as_slice();
    let total = dims.total();
    let da = dims.masked_total(mask);
    let db = total / da;
    let mut ia = vec![0usize; total];
    let mut ib = vec![0usize; total];
    let mut digits = vec![0usize; d.len()];
    for x in 0..total {
        let (mut a, mut b) = (0usize, 0usize);
        for (i, (&s, &di)) in digits.iter().zip(d).enumerate() {
            if mask >> i & 1 == 1 {
                a = a * di + s;
            } else {
                b = b * di + s;
            }
        }
        ia[x] = a;
        ib[x] = b;
        // odometer increment, last site fastest
        for i in (0..d.len()).rev() {
            digits[i] += 1;
            if digits[i] < d[i] {
                break;
            }
            digits[i] = 0;
        }
    }
    (ia, ib, da, db)
}

/// Eigen-decomposition of a Hermitian matrix; eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: CMatrix,
}

pub fn max_asymmetry(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

fn symmetrized(op: &CMatrix) -> Result<CMatrix> {
    if op.nrows() != op.ncols() {
        return Err(Error::DimensionMismatch { expected: op.nrows(), got: op.ncols() });
    }
    let asym = max_asymmetry(op);
    if asym > HERMITIAN_TOL * max_abs(op).max(1.0) {
        return Err(Error::NotHermitian(asym));
    }
    Ok((op + op.adjoint()).unscale(2.0))
}

fn is_real(m: &CMatrix) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

/// Eigenvalues and eigenvectors of a Hermitian operator (symmetrized first).
pub fn eig_hermitian(op: &CMatrix) -> Result<HermitianEigen> {
    let m = symmetrized(op)?;
    let n = m.nrows();
    let (values, vectors) = if is_real(&m) {
        let fm = faer::Mat::<f64>::from_fn(n, n, |i, j| m[(i, j)].re);
        let evd = fm
            .self_adjoint_eigen(faer::Side::Lower)
            .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
        let s = evd.S().column_vector();
        let u = evd.U();
        let values: Vec<f64> = (0..n).map(|i| s[i]).collect();
        (values, CMatrix::from_fn(n, n, |i, j| C64::new(u[(i, j)], 0.0)))
    } else {
        let fm = faer::Mat::<C64>::from_fn(n, n, |i, j| m[(i, j)]);
        let evd = fm
            .self_adjoint_eigen(faer::Side::Lower)
            .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
        let s = evd.S().column_vector();
        let u = evd.U();
        let values: Vec<f64> = (0..n).map(|i| s[i].re).collect();
        (values, CMatrix::from_fn(n, n, |i, j| u[(i, j)]))
    };
    sort_pairs(values, vectors)
}

fn sort_pairs(values: Vec<f64>, vectors: CMatrix) -> Result<HermitianEigen> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigensolver("non-finite eigenvalue".into()));
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    if order.iter().enumerate().all(|(i, &o)| i == o) {
        return Ok(HermitianEigen { values, vectors });
    }
    let sorted_vals = order.iter().map(|&i| values[i]).collect();
    let sorted_vecs = CMatrix::from_fn(vectors.nrows(), vectors.ncols(), |r, c| vectors[(r, order[c])]);
    Ok(HermitianEigen { values: sorted_vals, vectors: sorted_vecs })
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(op: &CMatrix) -> Result<Vec<f64>> {
    let m = symmetrized(op)?;
    let n = m.nrows();
    let mut values = if is_real(&m) {
        faer::Mat::<f64>::from_fn(n, n, |i, j| m[(i, j)].re)
            .self_adjoint_eigenvalues(faer::Side::Lower)
            .map_err(|e| Error::Eigensolver(format!("{e:?}")))?
    } else {
        faer::Mat::<C64>::from_fn(n, n, |i, j| m[(i, j)])
            .self_adjoint_eigenvalues(faer::Side::Lower)
            .map_err(|e| Error::Eigensolver(format!("{e:?}")))?
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigensolver("non-finite eigenvalue".into()));
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Squared Schmidt coefficients across `cut`, descending; length `min(d_A, d_B)`.
pub fn schmidt_squared(state: &PureState, cut: &Bipartition) -> Result<Vec<f64>> {
    let psi = state.cut_matrix(cut)?;
    let gram = if psi.nrows() <= psi.ncols() { &psi * psi.adjoint() } else { psi.adjoint() * &psi };
    let mut vals = eigvalsh(&gram)?;
    vals.reverse();
    vals.iter_mut().for_each(|v| *v = v.max(0.0));
    Ok(vals)
}

/// `I ⊗ … ⊗ op ⊗ … ⊗ I` with `op` acting on `site`.
pub fn embed_local(op: &CMatrix, site: usize, dims: &SubsystemDims) -> Result<CMatrix> {
    let d = *dims
        .as_slice()
        .get(site)
        .ok_or(Error::SiteDimension { site, expected: 0, got: op.nrows() })?;
    if op.nrows() != d || op.ncols() != d {
        return Err(Error::SiteDimension { site, expected: d, got: op.nrows() });
    }
    let total = dims.total();
    let right = dims.strides()[site];
    let left = total / (right * d);
    let mut out = CMatrix::zeros(total, total);
    for l in 0..left {
        for a in 0..d {
            for b in 0..d {
                let v = op[(a, b)];
                if v == ZERO {
                    continue;
                }
                for r in 0..right {
                    out[(l * d * right + a * right + r, l * d * right + b * right + r)] = v;
                }
            }
        }
    }
    Ok(out)
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMatrix {
    let i = C64::new(0.0, 1.0);
    CMatrix::from_row_slice(2, 2, &[ZERO, -i, i, ZERO])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// Real diagonal matrix.
pub fn diag(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(values.len(), values.iter().map(|&v| C64::new(v, 0.0))))
}

/// Haar-random unitary via QR of a complex Ginibre matrix with phase fixing.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { ONE };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `exp(-i H t)` for Hermitian `H`.
pub fn evolution_operator(h: &CMatrix, t: f64) -> Result<CMatrix> {
    let eig = eig_hermitian(h)?;
    let phases = CVector::from_iterator(
        eig.values.len(),
        eig.values.iter().map(|&e| C64::from_polar(1.0, -e * t)),
    );
    let v = &eig.vectors;
    Ok(v * CMatrix::from_diagonal(&phases) * v.adjoint())
}
