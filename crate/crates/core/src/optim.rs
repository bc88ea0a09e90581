//! Unitary parametrization and a derivative-free minimizer with seeded restarts.
//!
//! The search is an adaptive Nelder–Mead simplex (dimension-dependent
//! expansion, contraction and shrink coefficients). A restart that stalls is
//! rebuilt around its best point; it counts as converged once a rebuild fails
//! to improve the objective by more than the tolerance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hilbert::{eig_hermitian, split_indices, Bipartition, CMatrix, CVector, PureState, C64, ZERO};

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    /// Per-restart iteration cap.
    pub max_iterations: usize,
    /// Improvement below this over `window` iterations counts as a stall.
    pub tolerance: f64,
    pub window: usize,
    pub seed: u64,
    pub initial_step: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { restarts: 8, max_iterations: 5000, tolerance: 1e-9, window: 50, seed: 0, initial_step: 0.5 }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("restarts must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        if !(self.initial_step > 0.0) || self.window == 0 || self.max_iterations == 0 {
            return Err(Error::InvalidArgument("step, window and iteration cap must be positive".into()));
        }
        Ok(())
    }

    /// Seed of restart `r`, decorrelated from neighbouring seeds.
    fn restart_seed(&self, r: usize) -> u64 {
        let mut z = self.seed.wrapping_add((r as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptResult {
    pub best_params: Vec<f64>,
    pub best_value: f64,
    /// Simplex iterations summed over restarts.
    pub iterations_used: usize,
    pub evaluations: usize,
    pub converged: bool,
    pub restarts_aborted: usize,
}

struct RestartOutcome {
    params: Vec<f64>,
    value: f64,
    iterations: usize,
    evaluations: usize,
    converged: bool,
}

/// Minimizes `objective` over `R^n_params`, starting each restart at a point
/// drawn uniformly from `[-pi, pi]^n`. Restarts run in parallel; the result
/// does not depend on scheduling.
pub fn minimize<F>(objective: F, n_params: usize, config: &OptimizerConfig) -> Result<OptResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    minimize_from(objective, n_params, config, &[])
}

/// As [`minimize`], with one extra restart from each of `warm_starts`.
pub fn minimize_from<F>(objective: F, n_params: usize, config: &OptimizerConfig, warm_starts: &[Vec<f64>]) -> Result<OptResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    config.validate()?;
    if let Some(w) = warm_starts.iter().find(|w| w.len() != n_params) {
        return Err(Error::ParameterCount { expected: n_params, got: w.len() });
    }
    if n_params == 0 {
        let value = objective(&[]);
        if !value.is_finite() {
            return Err(Error::AllRestartsAborted);
        }
        return Ok(OptResult {
            best_params: vec![],
            best_value: value,
            iterations_used: 0,
            evaluations: 1,
            converged: true,
            restarts_aborted: 0,
        });
    }
    let outcomes: Vec<Option<RestartOutcome>> = (0..config.restarts + warm_starts.len())
        .into_par_iter()
        .map(|r| {
            let start: Vec<f64> = match r.checked_sub(config.restarts) {
                Some(w) => warm_starts[w].clone(),
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(config.restart_seed(r));
                    (0..n_params).map(|_| rng.random_range(-std::f64::consts::PI..=std::f64::consts::PI)).collect()
                }
            };
            nelder_mead(&objective, start, config)
        })
        .collect();

    let aborted = outcomes.iter().filter(|o| o.is_none()).count();
    let mut iterations = 0;
    let mut evaluations = 0;
    let mut converged = false;
    let mut best: Option<&RestartOutcome> = None;
    for o in outcomes.iter().flatten() {
        iterations += o.iterations;
        evaluations += o.evaluations;
        converged |= o.converged;
        if best.is_none_or(|b| o.value < b.value) {
            best = Some(o);
        }
    }
    let best = best.ok_or(Error::AllRestartsAborted)?;
    Ok(OptResult {
        best_params: best.params.clone(),
        best_value: best.value,
        iterations_used: iterations,
        evaluations,
        converged,
        restarts_aborted: aborted,
    })
}

/// One restart; `None` if the objective produced a non-finite value.
fn nelder_mead<F>(f: &F, start: Vec<f64>, cfg: &OptimizerConfig) -> Option<RestartOutcome>
where
    F: Fn(&[f64]) -> f64,
{
    let n = start.len();
    let nf = n as f64;
    let (alpha, beta, gamma, delta) =
        if n >= 2 { (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf) } else { (1.0, 2.0, 0.5, 0.5) };

    let mut evals = 0usize;
    let mut eval = |x: &[f64]| -> Option<f64> {
        evals += 1;
        let v = f(x);
        v.is_finite().then_some(v)
    };

    let build = |center: &[f64], step: f64, eval: &mut dyn FnMut(&[f64]) -> Option<f64>| {
        let mut simplex = Vec::with_capacity(n + 1);
        simplex.push((center.to_vec(), eval(center)?));
        for i in 0..n {
            let mut p = center.to_vec();
            p[i] += step;
            let v = eval(&p)?;
            simplex.push((p, v));
        }
        Some(simplex)
    };

    let mut simplex = build(&start, cfg.initial_step, &mut eval)?;
    let mut reference = f64::INFINITY;
    let mut last_improvement = 0usize;
    let mut rebuilt_since_improvement = false;
    let mut converged = false;
    let mut iter = 0usize;

    while iter < cfg.max_iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        if best < reference - cfg.tolerance {
            reference = best;
            last_improvement = iter;
            rebuilt_since_improvement = false;
        }
        let collapsed = simplex.iter().all(|(_, v)| (v - best).abs() <= f64::EPSILON * best.abs().max(1e-300))
            && simplex_diameter(&simplex) < 1e-14;
        if iter - last_improvement >= cfg.window || collapsed {
            if rebuilt_since_improvement {
                converged = true;
                break;
            }
            let center = simplex[0].0.clone();
            simplex = build(&center, cfg.initial_step, &mut eval)?;
            rebuilt_since_improvement = true;
            last_improvement = iter;
            continue;
        }
        iter += 1;

        let worst = simplex[n].1;
        let second_worst = simplex[n - 1].1;
        let mut centroid = vec![0.0; n];
        for (p, _) in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += x / nf;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&simplex[n].0).map(|(c, w)| c + t * (c - w)).collect()
        };

        let xr = along(alpha);
        let fr = eval(&xr)?;
        if fr < best {
            let xe = along(alpha * beta);
            let fe = eval(&xe)?;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < second_worst {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst {
            let xc = along(alpha * gamma);
            let fc = eval(&xc)?;
            (xc, fc)
        } else {
            let xc = along(-gamma);
            let fc = eval(&xc)?;
            (xc, fc)
        };
        if fc < fr.min(worst) {
            simplex[n] = (xc, fc);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let p: Vec<f64> = anchor.iter().zip(&vertex.0).map(|(a, x)| a + delta * (x - a)).collect();
            let v = eval(&p)?;
            *vertex = (p, v);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (params, value) = simplex.swap_remove(0);
    Some(RestartOutcome { params, value, iterations: iter, evaluations: evals, converged })
}

fn simplex_diameter(simplex: &[(Vec<f64>, f64)]) -> f64 {
    let base = &simplex[0].0;
    simplex
        .iter()
        .skip(1)
        .map(|(p, _)| p.iter().zip(base).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max)
}

/// Hermitian generator from `d^2` reals: `d` diagonal entries, then
/// `(re, im)` of each upper-triangle entry in row-major order.
pub fn hermitian_generator(params: &[f64], d: usize) -> Result<CMatrix> {
    if params.len() != d * d {
        return Err(Error::ParameterCount { expected: d * d, got: params.len() });
    }
    let mut g = CMatrix::zeros(d, d);
    for i in 0..d {
        g[(i, i)] = C64::new(params[i], 0.0);
    }
    let mut k = d;
    for i in 0..d {
        for j in i + 1..d {
            let z = C64::new(params[k], params[k + 1]);
            g[(i, j)] = z;
            g[(j, i)] = z.conj();
            k += 2;
        }
    }
    Ok(g)
}

/// `exp(iG)` for the generator encoded by `params`.
pub fn hermitian_exponential_unitary(params: &[f64], d: usize) -> Result<CMatrix> {
    let g = hermitian_generator(params, d)?;
    if d == 1 {
        return Ok(CMatrix::from_element(1, 1, C64::from_polar(1.0, params[0])));
    }
    let eig = eig_hermitian(&g)?;
    let phases = CVector::from_iterator(d, eig.values.iter().map(|&l| C64::from_polar(1.0, l)));
    let v = &eig.vectors;
    Ok(v * CMatrix::from_diagonal(&phases) * v.adjoint())
}

/// Energy of `(U_A ⊗ U_B)|ψ>` under `H`, with both unitaries parametrized by
/// [`hermitian_exponential_unitary`].
pub struct LocalUnitaryObjective {
    psi: CMatrix,
    h: CMatrix,
    da: usize,
    db: usize,
}

impl LocalUnitaryObjective {
    pub fn new(state: &PureState, h: &CMatrix, cut: &Bipartition) -> Result<Self> {
        let psi = state.cut_matrix(cut)?;
        let (da, db) = (psi.nrows(), psi.ncols());
        let dim = da * db;
        if h.nrows() != dim || h.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: h.nrows() });
        }
        // Reorder H into the (a, b) product basis of the cut.
        let (ia, ib, _, _) = split_indices(state.dims(), cut.side_a());
        let pos: Vec<usize> = (0..dim).map(|x| ia[x] * db + ib[x]).collect();
        let mut hp = CMatrix::from_element(dim, dim, ZERO);
        for c in 0..dim {
            for r in 0..dim {
                hp[(pos[r], pos[c])] = h[(r, c)];
            }
        }
        Ok(Self { psi, h: hp, da, db })
    }

    pub fn n_params(&self) -> usize {
        self.da * self.da + self.db * self.db
    }

    pub fn energy(&self, params: &[f64]) -> f64 {
        let na = self.da * self.da;
        let (Ok(ua), Ok(ub)) = (
            hermitian_exponential_unitary(&params[..na], self.da),
            hermitian_exponential_unitary(&params[na..], self.db),
        ) else {
            return f64::NAN;
        };
        let phi = ua * &self.psi * ub.transpose();
        let v = CVector::from_fn(self.da * self.db, |k, _| phi[(k / self.db, k % self.db)]);
        v.dotc(&(&self.h * &v)).re
    }
}
