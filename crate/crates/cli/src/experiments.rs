//! One runner per subcommand, each producing a filled table.

use rayon::prelude::*;

use ergovolume::analysis::{parse_grid, steepest_point};
use ergovolume::dicke::{dressed_measures, dressed_volume, AssignmentMode, DressedParams};
use ergovolume::ergotropy::interacting_gap;
use ergovolume::freefermion::{tfim_volume, SpectrumOptions};
use ergovolume::gme::{ggm, gme_concurrence, rescale_series};
use ergovolume::hilbert::evolution_operator;
use ergovolume::models::{build_tc, build_tfim, dicke3_volume, ground_state, Dicke3Params, GroundStateOptions};
use ergovolume::qcircuit::{trotter_circuit, vqa_ergotropic_volume_from, NoiseSpec, VqaOptions, VqaVolume};
use ergovolume::{
    enumerate_bipartitions, exact_volume, Bipartition, BipartitionMode, Boundary, CVector, LocalSpectrum,
    OptimizerConfig, PureState, SubsystemDims, C64,
};

use crate::error::CliError;
use crate::table::{Cell, Table};
use crate::{
    AppendixA, Assignment, BenchmarkCompare, BenchmarkSystem, ChainBoundary, Dicke3Phase, DressedSweep, GroundBackend,
    Optimizer, TcDressed, TfimDynamics, TfimGround, TwoSiteModel,
};

/// Level spacing of one spin under the field term `-σz`.
const SPIN_SPLITTING: f64 = 2.0;
/// Largest register handled by dense statevectors here.
const MAX_DENSE_SPINS: usize = 12;

type Result<T> = std::result::Result<T, CliError>;

fn grid(text: &str) -> Result<Vec<f64>> {
    Ok(parse_grid(text)?)
}

fn mode(a: Assignment) -> AssignmentMode {
    match a {
        Assignment::Full => AssignmentMode::FullSpace,
        Assignment::Subspace => AssignmentMode::SymmetricSubspace,
    }
}

fn boundary(b: ChainBoundary) -> Boundary {
    match b {
        ChainBoundary::Open => Boundary::Open,
        ChainBoundary::Periodic => Boundary::Periodic,
    }
}

fn check_dense(spins: usize) -> Result<()> {
    if !(2..=MAX_DENSE_SPINS).contains(&spins) {
        return Err(CliError::Config(format!("spins must lie in 2..={MAX_DENSE_SPINS} for dense states, got {spins}")));
    }
    Ok(())
}

pub fn tc_dressed(a: &TcDressed) -> Result<Table> {
    let mode = mode(a.assignment);
    let params = |i| DressedParams { n_spins: a.spins, n_ph: a.nph, excitations: i, omega_c: a.omega_c, omega_a: a.omega_a };
    params(0).validate()?;
    let volumes = (0..=a.spins + a.nph)
        .into_par_iter()
        .map(|i| Ok(dressed_volume(&params(i), mode)?.volume))
        .collect::<Result<Vec<f64>>>()?;

    let mut t = Table::new(&["i", "volume"]);
    t.meta(
        "settings",
        format!("spins={} nph={} omega_c={} omega_a={} assignment={mode}", a.spins, a.nph, a.omega_c, a.omega_a),
    );
    t.meta("backend", "dicke; cuts: spin blocks n = 1..N against cavity and remaining spins");
    for (i, v) in volumes.into_iter().enumerate() {
        t.push(vec![i.into(), v.into()]);
    }
    Ok(t)
}

pub fn dicke3_phase(a: &Dicke3Phase) -> Result<Table> {
    let g1s = grid(&a.grid)?;
    let g2s = match &a.g2_grid {
        Some(text) => grid(text)?,
        None => g1s.clone(),
    };
    let points: Vec<(f64, f64)> = g1s.iter().flat_map(|&g1| g2s.iter().map(move |&g2| (g1, g2))).collect();
    let reports = points
        .par_iter()
        .map(|&(g1, g2)| {
            let params = Dicke3Params { n_atoms: a.atoms, omega_c: a.omega_c, omega_a: a.omega_a, g1, g2 };
            Ok(dicke3_volume(params, a.nmax, !a.fixed_cutoff)?)
        })
        .collect::<Result<Vec<_>>>()?;

    let cutoffs: Vec<usize> = reports.iter().filter_map(|r| r.metadata.get("n_max")?.parse().ok()).collect();
    let tail = reports
        .iter()
        .filter_map(|r| r.metadata.get("photon_tail")?.parse::<f64>().ok())
        .fold(0.0, f64::max);
    let mut t = Table::new(&["g1", "g2", "volume"]);
    t.meta(
        "settings",
        format!(
            "atoms={} grid={} g2_grid={} nmax={} auto_grow={} omega_c={} omega_a={}",
            a.atoms,
            a.grid,
            a.g2_grid.as_deref().unwrap_or(&a.grid),
            a.nmax,
            !a.fixed_cutoff,
            a.omega_c,
            a.omega_a
        ),
    );
    t.meta("backend", "exact; even-parity symmetric ground state; cuts: cavity plus atoms, one per permutation class");
    t.meta(
        "photon cutoff",
        format!(
            "{}..{}, largest tail population {tail:e}",
            cutoffs.iter().min().unwrap_or(&a.nmax),
            cutoffs.iter().max().unwrap_or(&a.nmax)
        ),
    );
    for ((g1, g2), r) in points.into_iter().zip(reports) {
        t.push(vec![g1.into(), g2.into(), r.volume.into()]);
    }
    Ok(t)
}

pub fn tfim_ground(a: &TfimGround) -> Result<Table> {
    let gs = grid(&a.g_grid)?;
    let opts = SpectrumOptions { trunc: a.trunc, cap: a.cap, max_discarded: a.max_discarded };
    let numeric = a.backend == GroundBackend::Both;
    if numeric {
        check_dense(a.spins)?;
    }
    let analytic = gs.iter().map(|&g| Ok(tfim_volume(a.spins, g, &opts)?)).collect::<Result<Vec<_>>>()?;
    let exact = if numeric {
        let spectra = vec![LocalSpectrum::qubit(SPIN_SPLITTING); a.spins];
        let cuts = enumerate_bipartitions(a.spins, BipartitionMode::All)?;
        let volumes = gs
            .par_iter()
            .map(|&g| {
                let ground = ground_state(&build_tfim(a.spins, g, Boundary::Periodic)?, &GroundStateOptions::default())?;
                Ok(exact_volume(&ground.state, &spectra, &cuts)?.volume)
            })
            .collect::<Result<Vec<f64>>>()?;
        Some(volumes)
    } else {
        None
    };

    let mut t = Table::new(if numeric { &["g", "volume_analytic", "volume_numeric"] } else { &["g", "volume_analytic"] });
    t.meta(
        "settings",
        format!("spins={} g_grid={} trunc={:e} cap={} max_discarded={:e}", a.spins, a.g_grid, a.trunc, a.cap, a.max_discarded),
    );
    t.meta("backend", "freefermion; periodic ring; cuts: contiguous blocks M = 1..N/2");
    if numeric {
        t.meta("numeric backend", "exact diagonalization; every bipartition");
    }
    let bound = analytic
        .iter()
        .filter_map(|r| r.metadata.get("passive_error_bound")?.parse::<f64>().ok())
        .fold(0.0, f64::max);
    t.meta("passive energy truncation bound", format!("{bound:e}"));
    let volumes: Vec<f64> = analytic.iter().map(|r| r.volume).collect();
    if let Ok(point) = steepest_point(&gs, &volumes) {
        t.meta("steepest rise of volume_analytic", format!("{point:.6}"));
    }
    for (k, &g) in gs.iter().enumerate() {
        let mut row: Vec<Cell> = vec![g.into(), volumes[k].into()];
        if let Some(ex) = &exact {
            row.push(ex[k].into());
        }
        t.push(row);
    }
    Ok(t)
}

fn optimizer_config(o: &Optimizer) -> OptimizerConfig {
    OptimizerConfig {
        restarts: o.restarts,
        max_iterations: o.max_iterations,
        window: o.window,
        tolerance: o.tolerance,
        seed: o.seed,
        ..OptimizerConfig::default()
    }
}

/// States `exp(-iHt)|0...0>` of the Ising chain.
fn quench_states(n: usize, g: f64, boundary: Boundary, times: &[f64]) -> Result<Vec<PureState>> {
    let h = build_tfim(n, g, boundary)?.assemble();
    let dims = SubsystemDims::qubits(n);
    let zero = PureState::basis(dims.clone(), &vec![0; n])?;
    times
        .par_iter()
        .map(|&t| Ok(PureState::new(&evolution_operator(&h, t)? * zero.amplitudes(), dims.clone())?))
        .collect()
}

fn left_blocks(n: usize) -> Result<Vec<(Bipartition, u64)>> {
    (1..n).map(|m| Ok((Bipartition::block(0, m, n)?, 1))).collect()
}

pub fn tfim_dynamics(a: &TfimDynamics) -> Result<Table> {
    check_dense(a.spins)?;
    if a.depth == 0 || !(a.trotter_dt > 0.0) {
        return Err(CliError::Config("depth and trotter-dt must be positive".into()));
    }
    let n = a.spins;
    let times = grid(&a.t_grid)?;
    let chain = boundary(a.boundary);
    let states = quench_states(n, a.g, chain, &times)?;
    let spectra = vec![LocalSpectrum::qubit(SPIN_SPLITTING); n];
    let cuts = left_blocks(n)?;
    let exact = states.iter().map(|s| Ok(exact_volume(s, &spectra, &cuts)?.volume)).collect::<Result<Vec<f64>>>()?;
    let measure = states.par_iter().map(|s| Ok(ggm(s)?)).collect::<Result<Vec<f64>>>()?;

    let preps = times
        .iter()
        .map(|&t| {
            let steps = ((t / a.trotter_dt - 1e-9).ceil() as usize).max(1);
            Ok(trotter_circuit(n, a.g, t, steps, chain)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let optimizer = optimizer_config(&a.optimizer);
    let mut ideal: Option<Vec<VqaVolume>> = None;
    for depth in 1..=a.depth {
        let opts = VqaOptions { depth, optimizer: optimizer.clone(), noise: None, shots: a.shots };
        let sweep = preps
            .iter()
            .enumerate()
            .map(|(k, prep)| Ok(vqa_ergotropic_volume_from(prep, SPIN_SPLITTING, &opts, ideal.as_ref().map(|v| &v[k]))?))
            .collect::<Result<Vec<_>>>()?;
        ideal = Some(sweep);
    }
    let ideal = ideal.unwrap_or_default();

    let noise = NoiseSpec { p1: a.noise_p1, p2: a.noise_p2, trajectories: a.trajectories, seed: a.optimizer.seed };
    let noisy = if noise.is_off() {
        None
    } else {
        noise.validate()?;
        let opts = VqaOptions {
            depth: a.depth,
            optimizer: OptimizerConfig { restarts: 1, ..optimizer.clone() },
            noise: Some(noise.clone()),
            shots: a.shots,
        };
        let sweep = preps
            .iter()
            .zip(&ideal)
            .map(|(prep, start)| Ok(vqa_ergotropic_volume_from(prep, SPIN_SPLITTING, &opts, Some(start))?.report.volume))
            .collect::<Result<Vec<f64>>>()?;
        Some(sweep)
    };

    let columns: &[&str] = if noisy.is_some() {
        &["t", "volume_exact", "volume_vqa", "volume_vqa_noisy", "ggm"]
    } else {
        &["t", "volume_exact", "volume_vqa", "ggm"]
    };
    let mut t = Table::new(columns);
    t.meta(
        "settings",
        format!(
            "spins={n} g={} t_grid={} boundary={:?} depth={} trotter_dt={} restarts={} max_iterations={} window={} tolerance={:e} seed={} shots={}",
            a.g,
            a.t_grid,
            chain,
            a.depth,
            a.trotter_dt,
            optimizer.restarts,
            optimizer.max_iterations,
            optimizer.window,
            optimizer.tolerance,
            optimizer.seed,
            a.shots.map_or("exact".to_string(), |s| s.to_string())
        ),
    );
    t.meta("backend", "circuit; ansatz depths 1..depth swept with warm starts; cuts: left blocks n = 1..N-1");
    t.meta("exact backend", "dense evolution; same cuts");
    if noisy.is_some() {
        t.meta(
            "noise",
            format!("depolarizing p1={} p2={} trajectories={}; searches warm-started from the ideal optimum", noise.p1, noise.p2, noise.trajectories),
        );
    }
    let unconverged: usize = ideal.iter().map(|v| v.unconverged).sum();
    t.meta("unconverged searches at final depth", unconverged);
    for k in 0..times.len() {
        let mut row: Vec<Cell> = vec![times[k].into(), exact[k].into(), ideal[k].report.volume.into()];
        if let Some(noisy) = &noisy {
            row.push(noisy[k].into());
        }
        row.push(measure[k].into());
        t.push(row);
    }
    Ok(t)
}

pub fn appendix_a(a: &AppendixA) -> Result<Table> {
    let gs = grid(&a.g_grid)?;
    let models = match a.model {
        TwoSiteModel::Both => vec![TwoSiteModel::Ising, TwoSiteModel::Jc],
        one => vec![one],
    };
    let optimizer = OptimizerConfig {
        restarts: a.restarts,
        max_iterations: a.max_iterations,
        window: a.window,
        tolerance: a.tolerance,
        seed: a.seed,
        ..OptimizerConfig::default()
    };
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let blocks = gs
        .par_iter()
        .map(|&g| {
            let mut rows = Vec::new();
            for &model in &models {
                let (label, spec) = match model {
                    TwoSiteModel::Ising => ("ising", build_tfim(2, g, Boundary::Open)?),
                    _ => ("jc", build_tc(1, 1, 1.0, 1.0, g)?),
                };
                let dims = spec.dims().clone();
                let spectra = spec.site_spectra()?;
                let cuts = enumerate_bipartitions(2, BipartitionMode::All)?;
                let cut = Bipartition::from_sites(&[0], 2)?;
                let zero = C64::new(0.0, 0.0);
                let singlet = CVector::from_vec(vec![zero, C64::new(h, 0.0), C64::new(-h, 0.0), zero]);
                let states = [("01", PureState::basis(dims.clone(), &[0, 1])?), ("singlet", PureState::new(singlet, dims)?)];
                for (name, state) in states {
                    let original = interacting_gap(&state, &spec, &cut, &optimizer)?.gap;
                    let quenched = exact_volume(&state, &spectra, &cuts)?.volume;
                    rows.push(vec![g.into(), Cell::Text(format!("{label}:{name}")), original.into(), quenched.into()]);
                }
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut t = Table::new(&["g", "state_label", "volume_original", "volume_quenched"]);
    t.meta(
        "settings",
        format!(
            "g_grid={} model={:?} restarts={} max_iterations={} window={} tolerance={:e} seed={}",
            a.g_grid, a.model, a.restarts, a.max_iterations, a.window, a.tolerance, a.seed
        ),
    );
    t.meta("models", "ising: two open-chain spins, -σz on each, -g σxσx; jc: one photon mode truncated at one photon, resonant at 1");
    t.meta("backend", "exact; original gap keeps the interaction and optimizes local unitaries");
    for rows in blocks {
        for row in rows {
            t.push(row);
        }
    }
    Ok(t)
}

pub fn benchmark_compare(a: &BenchmarkCompare) -> Result<Table> {
    let (xs, mut columns): (Vec<f64>, [Vec<f64>; 3]) = match a.system {
        BenchmarkSystem::Dressed => {
            let params: Vec<DressedParams> = match a.sweep {
                DressedSweep::Excitations => {
                    (0..=a.spins + a.nph).map(|i| DressedParams::resonant(a.spins, a.nph, i)).collect()
                }
                DressedSweep::Photons => {
                    let i = a.excitations.unwrap_or(a.spins);
                    grid(&a.nph_grid)?
                        .into_iter()
                        .map(|x| {
                            if x < 1.0 || x.fract().abs() > 1e-9 {
                                return Err(CliError::Config(format!("photon bound {x} is not a positive integer")));
                            }
                            Ok(DressedParams::resonant(a.spins, x.round() as usize, i))
                        })
                        .collect::<Result<_>>()?
                }
            };
            let values = params
                .par_iter()
                .map(|p| {
                    let (g, c) = dressed_measures(p)?;
                    Ok((dressed_volume(p, AssignmentMode::FullSpace)?.volume, g, c))
                })
                .collect::<Result<Vec<_>>>()?;
            let xs = params
                .iter()
                .map(|p| match a.sweep {
                    DressedSweep::Excitations => p.excitations as f64,
                    DressedSweep::Photons => p.n_ph as f64,
                })
                .collect();
            (xs, unzip3(values))
        }
        BenchmarkSystem::TfimDynamics => {
            check_dense(a.spins)?;
            let times = grid(&a.t_grid)?;
            let states = quench_states(a.spins, a.g, Boundary::Open, &times)?;
            let spectra = vec![LocalSpectrum::qubit(SPIN_SPLITTING); a.spins];
            let cuts = enumerate_bipartitions(a.spins, BipartitionMode::All)?;
            let values = states
                .par_iter()
                .map(|s| Ok((exact_volume(s, &spectra, &cuts)?.volume, ggm(s)?, gme_concurrence(s)?)))
                .collect::<Result<Vec<_>>>()?;
            (times, unzip3(values))
        }
    };
    if a.rescale {
        for col in columns.iter_mut() {
            *col = rescale_series(col)?;
        }
    }

    let mut t = Table::new(&["x", "erg_volume", "ggm", "gme_concurrence"]);
    let x_name = match (a.system, a.sweep) {
        (BenchmarkSystem::TfimDynamics, _) => "time",
        (_, DressedSweep::Excitations) => "excitation number",
        (_, DressedSweep::Photons) => "photon bound",
    };
    t.meta(
        "settings",
        format!(
            "system={:?} spins={} nph={} sweep={:?} excitations={} nph_grid={} g={} t_grid={} rescale={}",
            a.system,
            a.spins,
            a.nph,
            a.sweep,
            a.excitations.map_or("spins".to_string(), |i| i.to_string()),
            a.nph_grid,
            a.g,
            a.t_grid,
            a.rescale
        ),
    );
    t.meta("x", x_name);
    t.meta(
        "backend",
        match a.system {
            BenchmarkSystem::Dressed => "dicke; spin-block cuts for all three measures",
            BenchmarkSystem::TfimDynamics => "exact; every bipartition for all three measures",
        },
    );
    for (k, x) in xs.into_iter().enumerate() {
        t.push(vec![x.into(), columns[0][k].into(), columns[1][k].into(), columns[2][k].into()]);
    }
    Ok(t)
}

fn unzip3(values: Vec<(f64, f64, f64)>) -> [Vec<f64>; 3] {
    let mut out = [Vec::new(), Vec::new(), Vec::new()];
    for (a, b, c) in values {
        out[0].push(a);
        out[1].push(b);
        out[2].push(c);
    }
    out
}
