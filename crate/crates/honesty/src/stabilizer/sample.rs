//! Monte Carlo of the syndrome-extraction gadget under Pauli (and single-qubit
//! Clifford) fault mixtures.

use super::tableau::{Clifford, Tableau};
use crate::approx::{clifford_unitaries, Basis, MixtureChannel};
use crate::approx::clifford::same_up_to_phase;
use crate::channel::pauli;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::metrics::sample_rng;
use crate::physics::GateName;
use crate::qec::{GateTable, PauliString, ScheduledCircuit, StabilizerCode};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Off-diagonal χ tolerance for accepting a channel as a Pauli mixture.
pub const PAULI_CHI_TOL: f64 = 1e-10;

/// Fault after each gate, as a mixture over Paulis or single-qubit Cliffords.
#[derive(Clone, Debug, Default)]
pub struct PauliFaultModel {
    entries: Vec<(GateName, MixtureChannel)>,
}

impl PauliFaultModel {
    pub fn new() -> Self {
        PauliFaultModel::default()
    }

    pub fn noiseless() -> Self {
        let mut m = PauliFaultModel::new();
        for g in GateName::ALL {
            let n = g.n_qubits();
            let mut w = vec![0.0; 1 << (2 * n)];
            w[0] = 1.0;
            m.insert(g, MixtureChannel::new(Basis::Pauli(n), w).expect("valid weights")).expect("matching size");
        }
        m
    }

    pub fn insert(&mut self, gate: GateName, mixture: MixtureChannel) -> Result<()> {
        if mixture.basis.n_qubits() != gate.n_qubits() {
            return Err(Error::validation(format!("{gate} needs a {}-qubit fault mixture", gate.n_qubits())));
        }
        self.entries.retain(|(g, _)| *g != gate);
        self.entries.push((gate, mixture));
        Ok(())
    }

    pub fn get(&self, gate: GateName) -> Result<&MixtureChannel> {
        self.entries
            .iter()
            .find(|(g, _)| *g == gate)
            .map(|(_, m)| m)
            .ok_or_else(|| Error::validation(format!("fault model has no entry for {gate}")))
    }

    /// Reads the error of each gate in `gates`; each must be a Pauli channel.
    pub fn from_gate_table(gates: &GateTable) -> Result<Self> {
        let mut m = PauliFaultModel::new();
        for g in gates.names() {
            let err = crate::channel::compose(gates.get(g)?, &crate::Channel::unitary(&g.ideal().adjoint()))?;
            let chi = err.to_chi();
            let d = chi.chi.nrows();
            let off = (0..d).flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| chi.chi[(i, j)].norm()).fold(0.0, f64::max);
            if off > PAULI_CHI_TOL {
                return Err(Error::validation(format!("{g} error is not a Pauli mixture (off-diagonal χ {off:.2e})")));
            }
            let w: Vec<f64> = chi.diagonal().iter().map(|&v| v.max(0.0)).collect();
            let total: f64 = w.iter().sum();
            m.insert(g, MixtureChannel::new(Basis::Pauli(g.n_qubits()), w.iter().map(|v| v / total).collect())?)?;
        }
        Ok(m)
    }
}

/// H/S words for each single-qubit Clifford, in the order of [`clifford_unitaries`].
pub fn clifford_words() -> Vec<Vec<Clifford>> {
    let s = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![linalg::ONE, linalg::I]));
    let gens = [(Clifford::H, linalg::hadamard()), (Clifford::S, s)];
    let mut frontier: Vec<(Vec<Clifford>, CMat)> = vec![(Vec::new(), linalg::eye(2))];
    let mut known = frontier.clone();
    while known.len() < 24 {
        let mut next = Vec::new();
        for (w, u) in &frontier {
            for (g, m) in &gens {
                let v = m * u;
                if !known.iter().any(|(_, k)| same_up_to_phase(k, &v)) {
                    let mut w2 = w.clone();
                    w2.push(*g);
                    known.push((w2.clone(), v.clone()));
                    next.push((w2, v));
                }
            }
        }
        frontier = next;
    }
    clifford_unitaries()
        .iter()
        .map(|u| known.iter().find(|(_, k)| same_up_to_phase(k, u)).expect("24 elements").0.clone())
        .collect()
}

/// Sampled action: Clifford gates applied in order to the listed local qubits.
type Action = Vec<(Clifford, usize)>;

struct Sampler {
    cumulative: Vec<f64>,
    actions: Vec<Action>,
    trivial: bool,
}

impl Sampler {
    fn new(m: &MixtureChannel, words: &[Vec<Clifford>]) -> Result<Self> {
        let actions: Vec<Action> = match m.basis {
            Basis::Pauli(n) => (0..m.weights.len())
                .map(|k| {
                    pauli::digits(k, n)
                        .into_iter()
                        .enumerate()
                        .filter(|&(_, d)| d != 0)
                        .map(|(q, d)| ([Clifford::X, Clifford::Y, Clifford::Z][d - 1], q))
                        .collect()
                })
                .collect(),
            Basis::Clifford1 => words.iter().map(|w| w.iter().map(|&g| (g, 0)).collect()).collect(),
        };
        let mut acc = 0.0;
        let cumulative = m
            .weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Ok(Sampler { cumulative, actions, trivial: m.weights[0] >= 1.0 })
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<&Action> {
        if self.trivial {
            return None;
        }
        let u: f64 = rng.random::<f64>() * self.cumulative.last().copied().unwrap_or(1.0);
        let k = self.cumulative.partition_point(|&c| c <= u).min(self.actions.len() - 1);
        Some(&self.actions[k])
    }
}

/// A deterministic Pauli inserted after the placements of `step`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PauliFault {
    pub step: usize,
    pub qubit: usize,
    pub kind: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogicalEstimate {
    pub shots: u64,
    pub seed: u64,
    /// Counts of the logical Pauli I, X, Y, Z.
    pub counts: [u64; 4],
    pub weights: [f64; 4],
    /// Wilson 95% intervals.
    pub intervals: [[f64; 2]; 4],
}

impl LogicalEstimate {
    pub fn failure_rate(&self) -> f64 {
        1.0 - self.weights[0]
    }

    /// Standard deviation implied by the Wilson 95% interval of weight `k`.
    pub fn sigma(&self, k: usize) -> f64 {
        (self.intervals[k][1] - self.intervals[k][0]) / (2.0 * WILSON_Z)
    }
}

pub const WILSON_Z: f64 = 1.959963984540054;

pub fn wilson_interval(k: u64, n: u64, z: f64) -> [f64; 2] {
    if n == 0 {
        return [0.0, 1.0];
    }
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    let lo = if k == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if k == n { 1.0 } else { (centre + half).min(1.0) };
    [lo, hi]
}

fn clifford_of(g: GateName) -> Option<Clifford> {
    match g {
        GateName::I => None,
        GateName::H => Some(Clifford::H),
        GateName::Cnot => Some(Clifford::Cnot),
        GateName::X => Some(Clifford::X),
        GateName::Y => Some(Clifford::Y),
        GateName::Z => Some(Clifford::Z),
    }
}

/// Logical Pauli (0..4) left on the data qubit of a decoded Bell pair (qubit 0, reference).
fn logical_pauli(t: &Tableau, reference: usize) -> Result<usize> {
    let n = t.n_qubits();
    let pair = |kind: usize| {
        let mut p = PauliString::single(n, 0, kind);
        p.set(reference, kind);
        t.expectation(&p).ok_or_else(|| Error::validation("decoded Bell pair is not a stabilizer eigenstate"))
    };
    let phase_flip = pair(1)?;
    let bit_flip = pair(3)?;
    Ok(match (bit_flip, phase_flip) {
        (false, false) => 0,
        (true, false) => 1,
        (true, true) => 2,
        (false, true) => 3,
    })
}

/// One shot on the register (code block, ancillas, reference).
fn run_shot(
    code: &StabilizerCode,
    circuit: &ScheduledCircuit,
    samplers: &[(GateName, Sampler)],
    faults: &[PauliFault],
    recovery: &[PauliString],
    shot_seed: (u64, u64),
) -> Result<usize> {
    let n = code.n;
    let m = circuit.n_ancillas();
    let reference = n + m;
    let mut rng = sample_rng(shot_seed.0, shot_seed.1);
    let mut t = Tableau::new(n + m + 1)?;
    t.h(0);
    t.cnot(0, reference);
    for p in &code.encoder {
        t.apply(clifford_of(p.gate).expect("encoder uses H and CNOT"), &p.qubits)?;
    }
    for (s, step) in circuit.steps.iter().enumerate() {
        for p in step {
            if let Some(g) = clifford_of(p.gate) {
                t.apply(g, &p.qubits)?;
            }
            let sampler = &samplers.iter().find(|(g, _)| *g == p.gate).expect("checked").1;
            if let Some(action) = sampler.draw(&mut rng) {
                for &(g, local) in action {
                    t.apply(g, &[p.qubits[local]])?;
                }
            }
        }
        for f in faults.iter().filter(|f| f.step == s) {
            t.pauli(f.qubit, f.kind);
        }
    }
    let mut syndrome = 0usize;
    for j in 0..m {
        if t.measure_z(n + j, &mut rng).0 {
            syndrome |= 1 << j;
        }
    }
    let r = &recovery[syndrome];
    for q in 0..n {
        let k = r.kind(q);
        if k != 0 {
            t.pauli(q, k);
        }
    }
    for p in code.encoder.iter().rev() {
        // H and CNOT are self-inverse.
        t.apply(clifford_of(p.gate).expect("encoder uses H and CNOT"), &p.qubits)?;
    }
    logical_pauli(&t, reference)
}

pub fn sample_gadget_with(
    model: &PauliFaultModel,
    code: &StabilizerCode,
    circuit: &ScheduledCircuit,
    shots: u64,
    seed: u64,
    faults: &[PauliFault],
) -> Result<LogicalEstimate> {
    circuit.validate()?;
    let words = clifford_words();
    let mut samplers = Vec::new();
    for g in circuit.gates_used() {
        let mix = model.get(g)?;
        if mix.basis == Basis::Clifford1 && g.n_qubits() != 1 {
            return Err(Error::validation("Clifford fault mixtures are only sampled for single-qubit gates"));
        }
        samplers.push((g, Sampler::new(mix, &words)?));
    }
    let recovery = code.recovery_table()?;
    let mut counts = [0u64; 4];
    for shot in 0..shots {
        counts[run_shot(code, circuit, &samplers, faults, &recovery, (seed, shot))?] += 1;
    }
    let weights = counts.map(|c| c as f64 / shots.max(1) as f64);
    let intervals = counts.map(|c| wilson_interval(c, shots, WILSON_Z));
    Ok(LogicalEstimate { shots, seed, counts, weights, intervals })
}

pub fn sample_gadget(model: &PauliFaultModel, code: &StabilizerCode, circuit: &ScheduledCircuit, shots: u64, seed: u64) -> Result<LogicalEstimate> {
    sample_gadget_with(model, code, circuit, shots, seed, &[])
}
