//! Statevector circuits: Trotterized Ising evolution, a layered ansatz
//! restricted to a set of qubits, and the variational search for passive
//! energies of marginals.
//!
//! Qubit `q` of an `n`-qubit register is subsystem `q`, i.e. bit `n - 1 - q`
//! of the basis index.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ergotropy::{clamp_nonnegative, Backend, Cut, ErgotropyReport, GapEntry};
use crate::error::{Error, Result};
use crate::hilbert::{Bipartition, CVector, PureState, SubsystemDims, C64, ZERO};
use crate::models::Boundary;
use crate::optim::{minimize_from, OptResult, OptimizerConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateKind {
    RX,
    RY,
    RZ,
    H,
    CX,
    /// `exp(-i θ X⊗X / 2)`.
    RXX,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::CX | GateKind::RXX => 2,
            _ => 1,
        }
    }

    pub fn has_angle(self) -> bool {
        !matches!(self, GateKind::H | GateKind::CX)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    /// Control first for CX.
    pub qubits: Vec<usize>,
    pub angle: f64,
}

impl Gate {
    pub fn rx(q: usize, angle: f64) -> Self {
        Self { kind: GateKind::RX, qubits: vec![q], angle }
    }

    pub fn ry(q: usize, angle: f64) -> Self {
        Self { kind: GateKind::RY, qubits: vec![q], angle }
    }

    pub fn rz(q: usize, angle: f64) -> Self {
        Self { kind: GateKind::RZ, qubits: vec![q], angle }
    }

    pub fn h(q: usize) -> Self {
        Self { kind: GateKind::H, qubits: vec![q], angle: 0.0 }
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Self { kind: GateKind::CX, qubits: vec![control, target], angle: 0.0 }
    }

    pub fn rxx(a: usize, b: usize, angle: f64) -> Self {
        Self { kind: GateKind::RXX, qubits: vec![a, b], angle }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{:?}", self.kind, self.qubits)?;
        if self.kind.has_angle() {
            write!(f, "({})", self.angle)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    /// Gate indices whose angles are bound at run time, in parameter order.
    parameter_slots: Vec<usize>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, gates: Vec::new(), parameter_slots: Vec::new() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn parameter_slots(&self) -> &[usize] {
        &self.parameter_slots
    }

    pub fn n_params(&self) -> usize {
        self.parameter_slots.len()
    }

    fn check(&self, gate: &Gate) -> Result<()> {
        if gate.qubits.len() != gate.kind.arity() {
            return Err(Error::InvalidArgument(format!("{gate} acts on the wrong number of qubits")));
        }
        if gate.qubits.iter().any(|&q| q >= self.n_qubits) {
            return Err(Error::InvalidArgument(format!("{gate} addresses a qubit outside 0..{}", self.n_qubits)));
        }
        if gate.qubits.len() == 2 && gate.qubits[0] == gate.qubits[1] {
            return Err(Error::InvalidArgument(format!("{gate} repeats a qubit")));
        }
        Ok(())
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        self.check(&gate)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Appends a gate whose angle is a free parameter.
    pub fn push_param(&mut self, gate: Gate) -> Result<()> {
        if !gate.kind.has_angle() {
            return Err(Error::InvalidArgument(format!("{gate} has no angle to parametrize")));
        }
        self.push(gate)?;
        self.parameter_slots.push(self.gates.len() - 1);
        Ok(())
    }

    /// Appends `other`, keeping its parameters after the existing ones.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.n_qubits, got: other.n_qubits });
        }
        let offset = self.gates.len();
        self.gates.extend(other.gates.iter().cloned());
        self.parameter_slots.extend(other.parameter_slots.iter().map(|s| s + offset));
        Ok(())
    }

    fn bound_angles(&self, params: &[f64]) -> Result<Vec<f64>> {
        if params.len() != self.parameter_slots.len() {
            return Err(Error::ParameterCount { expected: self.parameter_slots.len(), got: params.len() });
        }
        let mut angles: Vec<f64> = self.gates.iter().map(|g| g.angle).collect();
        for (&slot, &p) in self.parameter_slots.iter().zip(params) {
            angles[slot] = p;
        }
        Ok(angles)
    }
}

/// Pauli errors inserted after gates: `(gate index, qubit, 1|2|3 for X|Y|Z)`,
/// sorted by gate index.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NoisePattern {
    inserts: Vec<(usize, usize, u8)>,
}

impl NoisePattern {
    pub fn is_empty(&self) -> bool {
        self.inserts.is_empty()
    }

    pub fn len(&self) -> usize {
        self.inserts.len()
    }
}

/// Depolarizing noise realized by random Pauli insertion after each gate.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseSpec {
    pub p1: f64,
    pub p2: f64,
    pub trajectories: usize,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p1) || !(0.0..=1.0).contains(&self.p2) {
            return Err(Error::InvalidArgument("error probabilities must lie in [0, 1]".into()));
        }
        if self.trajectories == 0 {
            return Err(Error::InvalidArgument("at least one noise trajectory is needed".into()));
        }
        Ok(())
    }

    pub fn is_off(&self) -> bool {
        self.p1 == 0.0 && self.p2 == 0.0
    }

    /// Draws one error pattern for `circuit`.
    pub fn sample<R: Rng + ?Sized>(&self, circuit: &Circuit, rng: &mut R) -> NoisePattern {
        let mut inserts = Vec::new();
        for (i, gate) in circuit.gates.iter().enumerate() {
            if gate.kind.arity() == 1 {
                if rng.random::<f64>() < self.p1 {
                    inserts.push((i, gate.qubits[0], rng.random_range(1..=3u8)));
                }
            } else if rng.random::<f64>() < self.p2 {
                let k: u8 = rng.random_range(1..16);
                for (q, p) in [(gate.qubits[0], k / 4), (gate.qubits[1], k % 4)] {
                    if p != 0 {
                        inserts.push((i, q, p));
                    }
                }
            }
        }
        NoisePattern { inserts }
    }
}

fn mix(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x632B_E59B_D9B4_E019);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn bit(n: usize, q: usize) -> usize {
    1 << (n - 1 - q)
}

fn apply_single(amps: &mut [C64], mask: usize, m: [[C64; 2]; 2]) {
    for x in 0..amps.len() {
        if x & mask == 0 {
            let (a0, a1) = (amps[x], amps[x | mask]);
            amps[x] = m[0][0] * a0 + m[0][1] * a1;
            amps[x | mask] = m[1][0] * a0 + m[1][1] * a1;
        }
    }
}

fn apply_gate(amps: &mut [C64], n: usize, kind: GateKind, qubits: &[usize], angle: f64) {
    let (c, s) = ((0.5 * angle).cos(), (0.5 * angle).sin());
    let re = |x: f64| C64::new(x, 0.0);
    let im = |x: f64| C64::new(0.0, x);
    match kind {
        GateKind::RX => apply_single(amps, bit(n, qubits[0]), [[re(c), im(-s)], [im(-s), re(c)]]),
        GateKind::RY => apply_single(amps, bit(n, qubits[0]), [[re(c), re(-s)], [re(s), re(c)]]),
        GateKind::RZ => apply_single(amps, bit(n, qubits[0]), [[C64::new(c, -s), ZERO], [ZERO, C64::new(c, s)]]),
        GateKind::H => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            apply_single(amps, bit(n, qubits[0]), [[re(h), re(h)], [re(h), re(-h)]])
        }
        GateKind::CX => {
            let (mc, mt) = (bit(n, qubits[0]), bit(n, qubits[1]));
            for x in 0..amps.len() {
                if x & mc != 0 && x & mt == 0 {
                    amps.swap(x, x | mt);
                }
            }
        }
        GateKind::RXX => {
            let (ma, mb) = (bit(n, qubits[0]), bit(n, qubits[1]));
            for x in 0..amps.len() {
                if x & ma == 0 {
                    let y = x ^ ma ^ mb;
                    let (ax, ay) = (amps[x], amps[y]);
                    amps[x] = re(c) * ax + im(-s) * ay;
                    amps[y] = re(c) * ay + im(-s) * ax;
                }
            }
        }
    }
}

fn apply_pauli(amps: &mut [C64], mask: usize, pauli: u8) {
    match pauli {
        1 => apply_single(amps, mask, [[ZERO, C64::new(1.0, 0.0)], [C64::new(1.0, 0.0), ZERO]]),
        2 => apply_single(amps, mask, [[ZERO, C64::new(0.0, -1.0)], [C64::new(0.0, 1.0), ZERO]]),
        _ => apply_single(amps, mask, [[C64::new(1.0, 0.0), ZERO], [ZERO, C64::new(-1.0, 0.0)]]),
    }
}

fn check_input(circuit: &Circuit, input: &PureState) -> Result<()> {
    if input.dims() != &SubsystemDims::qubits(circuit.n_qubits) {
        return Err(Error::DimensionMismatch { expected: 1 << circuit.n_qubits, got: input.dims().total() });
    }
    Ok(())
}

fn run_amplitudes(circuit: &Circuit, amps: &mut [C64], angles: &[f64], pattern: Option<&NoisePattern>) {
    let n = circuit.n_qubits;
    let inserts = pattern.map(|p| p.inserts.as_slice()).unwrap_or(&[]);
    let mut next = 0;
    for (i, (gate, &angle)) in circuit.gates.iter().zip(angles).enumerate() {
        apply_gate(amps, n, gate.kind, &gate.qubits, angle);
        while next < inserts.len() && inserts[next].0 == i {
            apply_pauli(amps, bit(n, inserts[next].1), inserts[next].2);
            next += 1;
        }
    }
}

/// Applies the gates of `circuit` in order with `params` bound to its slots.
pub fn run(circuit: &Circuit, input: &PureState, params: &[f64]) -> Result<PureState> {
    run_noisy(circuit, input, params, None)
}

/// [`run`] with the Pauli errors of `pattern` inserted.
pub fn run_noisy(circuit: &Circuit, input: &PureState, params: &[f64], pattern: Option<&NoisePattern>) -> Result<PureState> {
    check_input(circuit, input)?;
    let angles = circuit.bound_angles(params)?;
    let mut amps: Vec<C64> = input.amplitudes().iter().copied().collect();
    run_amplitudes(circuit, &mut amps, &angles, pattern);
    PureState::normalized(CVector::from_vec(amps), input.dims().clone())
}

/// First-order Trotter circuit for `exp(-iHt)` with `H = −Σσ_z − gΣσ_xσ_x`:
/// per step a z-rotation layer, then an xx-rotation on every bond.
pub fn trotter_circuit(n: usize, g: f64, t: f64, steps: usize, boundary: Boundary) -> Result<Circuit> {
    if steps == 0 {
        return Err(Error::InvalidArgument("Trotter steps must be at least 1".into()));
    }
    if n == 0 {
        return Err(Error::InvalidDims("no qubits".into()));
    }
    let mut c = Circuit::new(n);
    if t == 0.0 {
        return Ok(c);
    }
    let dt = t / steps as f64;
    let mut bonds: Vec<(usize, usize)> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
    if boundary == Boundary::Periodic && n > 2 {
        bonds.push((n - 1, 0));
    }
    for _ in 0..steps {
        for q in 0..n {
            c.push(Gate::rz(q, -2.0 * dt))?;
        }
        for &(a, b) in &bonds {
            c.push(Gate::rxx(a, b, -2.0 * g * dt))?;
        }
    }
    Ok(c)
}

/// `depth` layers of [RY, RZ, ascending CX ladder] on `partition`, then a
/// final RY and RZ layer; `2 |partition| (depth + 1)` parameters.
pub fn ansatz(n_qubits: usize, partition: &[usize], depth: usize) -> Result<Circuit> {
    if partition.is_empty() || depth == 0 {
        return Err(Error::InvalidArgument("ansatz needs a nonempty partition and depth >= 1".into()));
    }
    let mut c = Circuit::new(n_qubits);
    let rotations = |c: &mut Circuit| -> Result<()> {
        for &q in partition {
            c.push_param(Gate::ry(q, 0.0))?;
        }
        for &q in partition {
            c.push_param(Gate::rz(q, 0.0))?;
        }
        Ok(())
    };
    for _ in 0..depth {
        rotations(&mut c)?;
        for w in partition.windows(2) {
            c.push(Gate::cx(w[0], w[1]))?;
        }
    }
    rotations(&mut c)?;
    Ok(c)
}

/// Levels `splitting · (number of excited qubits)` of `k` qubits.
pub fn popcount_observable(k: usize, splitting: f64) -> Vec<f64> {
    (0..1usize << k).map(|x| splitting * x.count_ones() as f64).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct VqaOptions {
    pub depth: usize,
    pub optimizer: OptimizerConfig,
    pub noise: Option<NoiseSpec>,
    /// Shot-estimated expectations; exact when absent.
    pub shots: Option<usize>,
}

impl Default for VqaOptions {
    fn default() -> Self {
        Self { depth: 2, optimizer: OptimizerConfig::default(), noise: None, shots: None }
    }
}

impl VqaOptions {
    fn active_noise(&self) -> Option<&NoiseSpec> {
        self.noise.as_ref().filter(|n| !n.is_off())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VqaResult {
    pub energy: f64,
    pub optimization: OptResult,
}

/// Energy of each full-register basis state under a diagonal observable on `partition`.
fn energy_table(n: usize, partition: &[usize], local_diag: &[f64]) -> Result<Vec<f64>> {
    if local_diag.len() != 1 << partition.len() {
        return Err(Error::DimensionMismatch { expected: 1 << partition.len(), got: local_diag.len() });
    }
    if let Some(&q) = partition.iter().find(|&&q| q >= n) {
        return Err(Error::InvalidArgument(format!("partition qubit {q} outside 0..{n}")));
    }
    let mut sorted = partition.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != partition.len() {
        return Err(Error::InvalidArgument("partition repeats a qubit".into()));
    }
    Ok((0..1usize << n)
        .map(|x| {
            let idx = partition.iter().fold(0usize, |acc, &q| (acc << 1) | usize::from(x & bit(n, q) != 0));
            local_diag[idx]
        })
        .collect())
}

/// Shared minimization of the trajectory-averaged energy of `ansatz` applied to `inputs`.
fn passive_search(
    ans: &Circuit,
    inputs: &[(Vec<C64>, Option<NoisePattern>)],
    table: &[f64],
    opts: &VqaOptions,
    warm_starts: &[Vec<f64>],
) -> Result<VqaResult> {
    let uniforms: Option<Vec<f64>> = opts.shots.map(|shots| {
        let mut rng = ChaCha8Rng::seed_from_u64(mix(opts.optimizer.seed, 0x5407));
        let mut u: Vec<f64> = (0..shots.max(1)).map(|_| rng.random::<f64>()).collect();
        u.sort_by(f64::total_cmp);
        u
    });
    let objective = |params: &[f64]| -> f64 {
        let angles = match ans.bound_angles(params) {
            Ok(a) => a,
            Err(_) => return f64::NAN,
        };
        let mut total = 0.0;
        for (amps0, pattern) in inputs {
            let mut amps = amps0.clone();
            run_amplitudes(ans, &mut amps, &angles, pattern.as_ref());
            total += match &uniforms {
                None => amps.iter().zip(table).map(|(a, e)| a.norm_sqr() * e).sum::<f64>(),
                Some(u) => sampled_energy(&amps, table, u),
            };
        }
        total / inputs.len() as f64
    };
    // an unconverged search still yields an upper bound; callers see `converged`
    let optimization = minimize_from(objective, ans.n_params(), &opts.optimizer, warm_starts)?;
    Ok(VqaResult { energy: optimization.best_value, optimization })
}

/// Mean energy of the outcomes selected by sorted uniforms through the CDF.
fn sampled_energy(amps: &[C64], table: &[f64], uniforms: &[f64]) -> f64 {
    let mut cdf = 0.0;
    let mut k = 0;
    let mut sum = 0.0;
    for (x, a) in amps.iter().enumerate() {
        cdf += a.norm_sqr();
        while k < uniforms.len() && uniforms[k] < cdf {
            sum += table[x];
            k += 1;
        }
    }
    // round-off can leave the last draws above the accumulated total
    sum += (uniforms.len() - k) as f64 * table[amps.len() - 1];
    sum / uniforms.len() as f64
}

/// Parameters of a depth-`from` ansatz on `width` qubits mapped to depth `to`:
/// the extra layers get zero angles and sit before the final rotations. For
/// one or two qubits the image acts identically, since a single CX squares
/// to the identity.
pub fn embed_depth(params: &[f64], width: usize, from: usize, to: usize) -> Result<Vec<f64>> {
    let layer = 2 * width;
    if params.len() != layer * (from + 1) {
        return Err(Error::ParameterCount { expected: layer * (from + 1), got: params.len() });
    }
    if to < from {
        return Err(Error::InvalidArgument(format!("cannot embed depth {from} into depth {to}")));
    }
    let split = layer * from;
    let mut out = params[..split].to_vec();
    out.extend(std::iter::repeat_n(0.0, layer * (to - from)));
    out.extend_from_slice(&params[split..]);
    Ok(out)
}

/// Variational estimate of the passive energy of the marginal of `state` on
/// `partition` for the diagonal observable `local_diag` (ground level zero).
pub fn vqa_passive_energy(state: &PureState, partition: &[usize], local_diag: &[f64], opts: &VqaOptions) -> Result<VqaResult> {
    vqa_passive_energy_from(state, partition, local_diag, opts, &[])
}

/// [`vqa_passive_energy`] with extra restarts from `warm_starts`.
pub fn vqa_passive_energy_from(
    state: &PureState,
    partition: &[usize],
    local_diag: &[f64],
    opts: &VqaOptions,
    warm_starts: &[Vec<f64>],
) -> Result<VqaResult> {
    let n = state.dims().len();
    if state.dims() != &SubsystemDims::qubits(n) {
        return Err(Error::InvalidArgument("variational search needs a qubit register".into()));
    }
    let table = energy_table(n, partition, local_diag)?;
    let ans = ansatz(n, partition, opts.depth)?;
    let amps: Vec<C64> = state.amplitudes().iter().copied().collect();
    let inputs = match opts.active_noise() {
        None => vec![(amps, None)],
        Some(noise) => {
            noise.validate()?;
            (0..noise.trajectories)
                .map(|j| {
                    let mut rng = ChaCha8Rng::seed_from_u64(mix(noise.seed, j as u64));
                    (amps.clone(), Some(noise.sample(&ans, &mut rng)))
                })
                .collect()
        }
    };
    passive_search(&ans, &inputs, &table, opts, warm_starts)
}

#[derive(Clone, Debug, PartialEq)]
pub struct VqaVolume {
    pub report: ErgotropyReport,
    /// `(block, complement)` passive energies of each left block `0..n`.
    pub passive: Vec<(f64, f64)>,
    /// Searches that hit the iteration cap before stalling.
    pub unconverged: usize,
    /// Optimal ansatz angles per side: block then complement for each left block.
    pub params: Vec<Vec<f64>>,
    pub depth: usize,
}

/// Gaps of the left blocks `0..n`, `n = 1..N-1`, of the state prepared by
/// `prep` from `|0...0>`, each side's passive energy found variationally
/// against `splitting · (excited qubits)`.
pub fn vqa_ergotropic_volume(prep: &Circuit, splitting: f64, opts: &VqaOptions) -> Result<VqaVolume> {
    vqa_ergotropic_volume_from(prep, splitting, opts, None)
}

/// [`vqa_ergotropic_volume`], each search also restarting from the optimum
/// of `previous` (same register, depth at most `opts.depth`).
pub fn vqa_ergotropic_volume_from(
    prep: &Circuit,
    splitting: f64,
    opts: &VqaOptions,
    previous: Option<&VqaVolume>,
) -> Result<VqaVolume> {
    let n = prep.n_qubits();
    if n < 2 {
        return Err(Error::InvalidArgument("a volume needs at least two qubits".into()));
    }
    if prep.n_params() != 0 {
        return Err(Error::ParameterCount { expected: 0, got: prep.n_params() });
    }
    let mut zero = vec![ZERO; 1 << n];
    zero[0] = C64::new(1.0, 0.0);
    let noise = opts.active_noise();
    if let Some(noise) = noise {
        noise.validate()?;
    }
    let prepared: Vec<Vec<C64>> = match noise {
        None => {
            let mut amps = zero.clone();
            run_amplitudes(prep, &mut amps, &prep.bound_angles(&[])?, None);
            vec![amps]
        }
        Some(noise) => (0..noise.trajectories)
            .into_par_iter()
            .map(|j| {
                let mut rng = ChaCha8Rng::seed_from_u64(mix(noise.seed, j as u64));
                let pattern = noise.sample(prep, &mut rng);
                let mut amps = zero.clone();
                run_amplitudes(prep, &mut amps, &prep.bound_angles(&[]).unwrap_or_default(), Some(&pattern));
                amps
            })
            .collect(),
    };

    let sides: Vec<Vec<usize>> =
        (1..n).flat_map(|m| [(0..m).collect::<Vec<_>>(), (m..n).collect::<Vec<_>>()]).collect();
    let energies = sides
        .par_iter()
        .enumerate()
        .map(|(tag, side)| {
            let ans = ansatz(n, side, opts.depth)?;
            let table = energy_table(n, side, &popcount_observable(side.len(), splitting))?;
            let inputs: Vec<(Vec<C64>, Option<NoisePattern>)> = prepared
                .iter()
                .enumerate()
                .map(|(j, amps)| {
                    let pattern = noise.map(|noise| {
                        let mut rng = ChaCha8Rng::seed_from_u64(mix(mix(noise.seed, j as u64), tag as u64 + 1));
                        noise.sample(&ans, &mut rng)
                    });
                    (amps.clone(), pattern)
                })
                .collect();
            let warm = match previous {
                Some(prev) => {
                    let old = prev.params.get(tag).ok_or(Error::DimensionMismatch {
                        expected: sides.len(),
                        got: prev.params.len(),
                    })?;
                    vec![embed_depth(old, side.len(), prev.depth, opts.depth)?]
                }
                None => vec![],
            };
            passive_search(&ans, &inputs, &table, opts, &warm)
        })
        .collect::<Result<Vec<VqaResult>>>()?;

    let unconverged = energies.iter().filter(|r| !r.optimization.converged).count();
    let passive: Vec<(f64, f64)> = energies.chunks(2).map(|c| (c[0].energy, c[1].energy)).collect();
    let params: Vec<Vec<f64>> = energies.iter().map(|r| r.optimization.best_params.clone()).collect();
    let gaps = passive
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| {
            Ok(GapEntry {
                cut: Cut::Sites(Bipartition::block(0, i + 1, n)?),
                multiplicity: 1,
                gap: clamp_nonnegative(a + b)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = ErgotropyReport::new(gaps, Backend::Circuit)?
        .with_meta("depth", opts.depth)
        .with_meta("unconverged_searches", unconverged)
        .with_meta("bias", "passive energies are variational upper bounds; gaps are over-estimates")
        .with_meta("expectations", opts.shots.map_or("exact".to_string(), |s| format!("{s} shots")));
    if let Some(noise) = noise {
        report = report
            .with_meta("noise", format!("p1={} p2={} trajectories={}", noise.p1, noise.p2, noise.trajectories));
    }
    Ok(VqaVolume { report, passive, unconverged, params, depth: opts.depth })
}
