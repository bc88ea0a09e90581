use nalgebra_sparse::CsrMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::HamiltonianSpec;
use crate::error::{Error, Result};
use crate::hilbert::{eig_hermitian, CMatrix, CVector, PureState, SubsystemDims, C64, ZERO};

/// Population allowed in the two highest Fock states of a truncated cavity.
pub const TAIL_LIMIT: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct GroundStateOptions {
    /// Gaps below this flag the ground level as degenerate.
    pub degeneracy_tol: f64,
    /// Largest dimension solved densely; larger problems use Lanczos.
    pub dense_threshold: usize,
    pub lanczos_tol: f64,
    pub max_krylov: usize,
    pub seed: u64,
}

impl Default for GroundStateOptions {
    fn default() -> Self {
        Self { degeneracy_tol: 1e-10, dense_threshold: 4096, lanczos_tol: 1e-10, max_krylov: 400, seed: 0x5EED }
    }
}

#[derive(Clone, Debug)]
pub struct GroundState {
    pub energy: f64,
    pub state: PureState,
    pub gap_to_first_excited: f64,
    pub degenerate: bool,
    /// Population of the two highest Fock states, when the cavity cutoff is numerical.
    pub photon_tail: Option<f64>,
    pub iterative: bool,
}

/// Lowest eigenpair of the assembled Hamiltonian.
pub fn ground_state(spec: &HamiltonianSpec, opts: &GroundStateOptions) -> Result<GroundState> {
    let dims = spec.dims().clone();
    let dim = dims.total();
    let (e0, e1, vec, iterative) = if dim <= opts.dense_threshold {
        let eig = eig_hermitian(&spec.assemble())?;
        let e1 = eig.values.get(1).copied().unwrap_or(f64::INFINITY);
        (eig.values[0], e1, eig.vectors.column(0).into_owned(), false)
    } else {
        let h = spec.assemble_sparse();
        let res = lanczos_lowest(|v| csr_apply(&h, v), dim, 2, opts.lanczos_tol, opts.max_krylov, opts.seed)?;
        let e1 = res.values.get(1).copied().unwrap_or(f64::INFINITY);
        (res.values[0], e1, res.vectors[0].clone(), true)
    };
    let state = PureState::normalized(vec, dims.clone())?;
    let photon_tail = match spec.truncated_cavity() {
        Some(site) => {
            let tail = photon_tail(&state, site);
            if tail >= TAIL_LIMIT {
                return Err(Error::CutoffInsufficient { n_max: dims.as_slice()[site] - 1, tail });
            }
            Some(tail)
        }
        None => None,
    };
    let gap = e1 - e0;
    Ok(GroundState {
        energy: e0,
        state,
        gap_to_first_excited: gap,
        degenerate: gap < opts.degeneracy_tol,
        photon_tail,
        iterative,
    })
}

/// Population of Fock states `n > n_max - 2` on `site`.
pub fn photon_tail(state: &PureState, site: usize) -> f64 {
    let dims: &SubsystemDims = state.dims();
    let d = dims.as_slice()[site];
    let stride = dims.strides()[site];
    state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(x, _)| (x / stride) % d + 2 >= d)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

pub(crate) fn csr_apply(h: &CsrMatrix<C64>, v: &CVector) -> CVector {
    let mut out = CVector::from_element(h.nrows(), ZERO);
    for (i, row) in h.row_iter().enumerate() {
        let mut acc = ZERO;
        for (&j, &val) in row.col_indices().iter().zip(row.values()) {
            acc += val * v[j];
        }
        out[i] = acc;
    }
    out
}

#[derive(Clone, Debug)]
pub struct LanczosResult {
    /// Lowest Ritz values, ascending.
    pub values: Vec<f64>,
    pub vectors: Vec<CVector>,
    pub iterations: usize,
    pub residuals: Vec<f64>,
}

/// Lowest `k` eigenpairs of a Hermitian operator given by its action, by
/// Lanczos with full reorthogonalization from a seeded uniform start vector.
/// Exactly degenerate levels are found once.
pub fn lanczos_lowest<F>(apply: F, dim: usize, k: usize, tol: f64, max_krylov: usize, seed: u64) -> Result<LanczosResult>
where
    F: Fn(&CVector) -> CVector,
{
    if dim == 0 || k == 0 {
        return Err(Error::InvalidArgument("Lanczos needs a nonempty space and k >= 1".into()));
    }
    let m_max = max_krylov.min(dim).max(k);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = CVector::from_fn(dim, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    v.unscale_mut(v.norm());

    let mut basis: Vec<CVector> = Vec::with_capacity(m_max);
    let mut alphas: Vec<f64> = Vec::with_capacity(m_max);
    let mut betas: Vec<f64> = Vec::with_capacity(m_max);
    let mut last_residual = f64::INFINITY;

    loop {
        let mut w = apply(&v);
        let alpha = v.dotc(&w).re;
        w.axpy(C64::new(-alpha, 0.0), &v, C64::new(1.0, 0.0));
        if let (Some(prev), Some(&b)) = (basis.last(), betas.last()) {
            w.axpy(C64::new(-b, 0.0), prev, C64::new(1.0, 0.0));
        }
        basis.push(v);
        alphas.push(alpha);
        for _ in 0..2 {
            for q in &basis {
                let c = q.dotc(&w);
                w.axpy(-c, q, C64::new(1.0, 0.0));
            }
        }
        let beta = w.norm();
        let m = basis.len();
        let scale = alphas.iter().map(|a| a.abs()).fold(1.0, f64::max);
        let exhausted = beta <= 1e-12 * scale || m == dim;
        if m % 5 == 0 || exhausted || m == m_max {
            let t = CMatrix::from_fn(m, m, |i, j| {
                if i == j {
                    C64::new(alphas[i], 0.0)
                } else if i + 1 == j {
                    C64::new(betas[i], 0.0)
                } else if j + 1 == i {
                    C64::new(betas[j], 0.0)
                } else {
                    ZERO
                }
            });
            let eig = eig_hermitian(&t)?;
            let wanted = k.min(m);
            let residuals: Vec<f64> = (0..wanted).map(|i| beta * eig.vectors[(m - 1, i)].norm()).collect();
            let done = exhausted
                || (wanted == k
                    && residuals.iter().zip(&eig.values).all(|(r, e)| *r <= tol * e.abs().max(1.0)));
            last_residual = residuals.iter().cloned().fold(0.0, f64::max);
            if done {
                let vectors = (0..wanted)
                    .map(|i| {
                        let mut x = CVector::from_element(dim, ZERO);
                        for (j, q) in basis.iter().enumerate() {
                            x.axpy(eig.vectors[(j, i)], q, C64::new(1.0, 0.0));
                        }
                        let n = x.norm();
                        x.unscale(n)
                    })
                    .collect();
                return Ok(LanczosResult {
                    values: eig.values[..wanted].to_vec(),
                    vectors,
                    iterations: m,
                    residuals,
                });
            }
        }
        if m >= m_max {
            return Err(Error::NotConverged { residual: last_residual });
        }
        betas.push(beta);
        v = w.unscale(beta);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::eigvalsh;
    use crate::models::{build_dicke3, build_tc, build_tfim, Boundary};

    #[test]
    fn lanczos_matches_dense_on_ising_ring() {
        let spec = build_tfim(10, 1.0, Boundary::Periodic).unwrap();
        let dense = eigvalsh(&spec.assemble()).unwrap();
        let opts = GroundStateOptions { dense_threshold: 64, ..GroundStateOptions::default() };
        let gs = ground_state(&spec, &opts).unwrap();
        assert!(gs.iterative);
        assert!((gs.energy - dense[0]).abs() < 1e-9);
        assert!((gs.gap_to_first_excited - (dense[1] - dense[0])).abs() < 1e-7);
        let exact = ground_state(&spec, &GroundStateOptions::default()).unwrap();
        assert!(gs.state.fidelity(&exact.state) > 1.0 - 1e-9);
    }

    #[test]
    fn tc_zero_coupling_ground_is_product() {
        let spec = build_tc(2, 2, 1.0, 1.0, 0.0).unwrap();
        let gs = ground_state(&spec, &GroundStateOptions::default()).unwrap();
        assert!((gs.energy + 1.0).abs() < 1e-12);
        let vac = PureState::basis(spec.dims().clone(), &[0, 0, 0]).unwrap();
        assert!(gs.state.fidelity(&vac) > 1.0 - 1e-12);
        assert!(gs.photon_tail.is_none());
    }

    #[test]
    fn small_cavity_cutoff_is_rejected() {
        let spec = build_dicke3(1, 2, 1.0, 1.0, 2.0, 0.0).unwrap();
        match ground_state(&spec, &GroundStateOptions::default()) {
            Err(Error::CutoffInsufficient { n_max: 2, tail }) => assert!(tail > TAIL_LIMIT),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn weak_dicke3_coupling_stays_near_vacuum() {
        let spec = build_dicke3(2, 8, 1.0, 1.0, 0.1, 0.1).unwrap();
        let gs = ground_state(&spec, &GroundStateOptions::default()).unwrap();
        let vac = PureState::basis(spec.dims().clone(), &[0, 0, 0]).unwrap();
        assert!(gs.state.fidelity(&vac) > 0.99);
        assert!(gs.photon_tail.unwrap() < TAIL_LIMIT);
    }

    #[test]
    fn lanczos_finds_small_invariant_subspace() {
        // a rank-deficient operator: the Krylov space closes early
        let h = crate::hilbert::diag(&[2.0, -1.0, 2.0, 2.0, -1.0, 2.0]);
        let res = lanczos_lowest(|v| &h * v, 6, 1, 1e-12, 50, 3).unwrap();
        assert!((res.values[0] + 1.0).abs() < 1e-12);
    }
}
