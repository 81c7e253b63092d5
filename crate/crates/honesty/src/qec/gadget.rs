//! Dense density-matrix simulation of one error-correction round on half of a
//! Bell pair, giving the logical channel through its Choi matrix.

use super::code::{PauliString, StabilizerCode};
use super::schedule::ScheduledCircuit;
use crate::channel::local::apply_local_matrix;
use crate::channel::{Channel, ChoiMatrix};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, CVec};
use crate::physics::{GateName, GateSet};

/// Noisy channel for each gate identifier.
#[derive(Clone, Debug)]
pub struct GateTable {
    entries: Vec<(GateName, Channel)>,
}

impl GateTable {
    pub fn new() -> Self {
        GateTable { entries: Vec::new() }
    }

    pub fn ideal() -> Self {
        let mut t = GateTable::new();
        for g in GateName::ALL {
            t.insert(g, Channel::unitary(&g.ideal()));
        }
        t
    }

    pub fn from_gateset(gs: &GateSet) -> Self {
        let mut t = GateTable::new();
        for g in &gs.gates {
            t.insert(g.name, g.channel.clone());
        }
        t
    }

    /// Every gate becomes `error(name)` after its ideal unitary.
    pub fn from_errors(mut error: impl FnMut(GateName) -> Channel) -> Result<Self> {
        let mut t = GateTable::new();
        for g in GateName::ALL {
            let ch = crate::channel::compose(&error(g), &Channel::unitary(&g.ideal()))?;
            t.insert(g, ch);
        }
        Ok(t)
    }

    pub fn insert(&mut self, name: GateName, channel: Channel) {
        self.entries.retain(|(g, _)| *g != name);
        self.entries.push((name, channel));
    }

    pub fn get(&self, name: GateName) -> Result<&Channel> {
        self.entries
            .iter()
            .find(|(g, _)| *g == name)
            .map(|(_, ch)| ch)
            .ok_or_else(|| Error::validation(format!("gate set has no {name} gate")))
    }

    pub fn names(&self) -> Vec<GateName> {
        self.entries.iter().map(|(g, _)| *g).collect()
    }
}

impl Default for GateTable {
    fn default() -> Self {
        GateTable::new()
    }
}

/// An extra single-qubit channel applied after the placements of `step`.
#[derive(Clone, Debug)]
pub struct Fault {
    pub step: usize,
    pub qubit: usize,
    pub channel: Channel,
}

impl Fault {
    pub fn pauli(step: usize, qubit: usize, kind: usize) -> Self {
        Fault { step, qubit, channel: Channel::pauli(kind, 1) }
    }
}

#[derive(Clone, Debug)]
pub struct GadgetResult {
    /// Choi matrix of the logical channel, reference ⊗ logical, trace 2.
    pub choi: CMat,
    pub channel: Channel,
    /// Trace of each syndrome branch, indexed by syndrome.
    pub branch_weights: Vec<f64>,
}

impl GadgetResult {
    pub fn total_weight(&self) -> f64 {
        self.branch_weights.iter().sum()
    }
}

struct Engine<'a> {
    code: &'a StabilizerCode,
    circuit: &'a ScheduledCircuit,
    ops: Vec<Vec<(Vec<usize>, CMat)>>,
    recovery: Vec<PauliString>,
}

impl<'a> Engine<'a> {
    fn new(code: &'a StabilizerCode, circuit: &'a ScheduledCircuit, gates: &GateTable, faults: &[Fault]) -> Result<Self> {
        circuit.validate()?;
        if circuit.n_data != code.n || circuit.n_ancillas() != code.generators.len() {
            return Err(Error::validation("circuit does not match the code"));
        }
        let mut ops: Vec<Vec<(Vec<usize>, CMat)>> = Vec::with_capacity(circuit.steps.len());
        for step in &circuit.steps {
            let mut v = Vec::with_capacity(step.len());
            for p in step {
                let sup = &gates.get(p.gate)?.superop;
                if *sup != CMat::identity(sup.nrows(), sup.ncols()) {
                    v.push((p.qubits.clone(), sup.clone()));
                }
            }
            ops.push(v);
        }
        for f in faults {
            if f.step >= ops.len() || f.qubit >= circuit.n_qubits || f.channel.n_qubits != 1 {
                return Err(Error::validation(format!("fault at step {} qubit {} is out of range", f.step, f.qubit)));
            }
            ops[f.step].push((vec![f.qubit], f.channel.superop.clone()));
        }
        Ok(Engine { code, circuit, ops, recovery: code.recovery_table()? })
    }

    /// Encoded Bell pair on (code block, reference), reference last.
    fn initial_ket(&self) -> CVec {
        let n = self.code.n;
        let d = 1usize << (n + 1);
        let mut ket = CVec::zeros(d);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        ket[0] = c(r, 0.0);
        ket[(1 << n) | 1] = c(r, 0.0);
        linalg::kron(&self.code.encoder_unitary(), &linalg::eye(2)) * ket
    }

    /// Recovery, decoding and reduction of one branch on (code block, reference).
    fn finish_branch(&self, syndrome: usize, rho: &CMat) -> CMat {
        let n = self.code.n;
        let fix = self.code.encoder_unitary().adjoint() * self.recovery[syndrome].matrix();
        let m = linalg::kron(&fix, &linalg::eye(2));
        reduce(&(&m * rho * m.adjoint()), n + 1, &[0, n])
    }

    fn assemble(&self, parts: Vec<(usize, CMat)>) -> Result<GadgetResult> {
        let mut weights = vec![0.0; 1 << self.code.generators.len()];
        let mut total = CMat::zeros(4, 4);
        for (b, rho) in parts {
            weights[b] += linalg::trace(&rho).re;
            total += self.finish_branch(b, &rho);
        }
        // (logical, reference) → (reference, logical), scaled to trace 2.
        let choi = CMat::from_fn(4, 4, |i, j| total[(swap2(i), swap2(j))] * c(2.0, 0.0));
        let channel = Channel::from_choi(&ChoiMatrix { n_qubits: 1, j: choi.clone() });
        Ok(GadgetResult { choi, channel, branch_weights: weights })
    }

    /// One ancilla at a time: exact when ancilla activity windows do not overlap,
    /// since outside its window an ancilla only sees local channels.
    fn run_lazy(&self) -> Result<GadgetResult> {
        let n = self.code.n;
        let m = self.code.generators.len();
        let windows = self.windows()?;
        if windows.windows(2).any(|w| w[0].1 >= w[1].0) {
            return Err(Error::validation("ancilla windows overlap"));
        }
        let psi = self.initial_ket();
        let mut branches: Vec<(usize, CMat)> = vec![(0, &psi * psi.adjoint())];
        let mut active: Option<usize> = None;
        for s in 0..self.circuit.steps.len() {
            if let Some(j) = (0..m).find(|&j| windows[j].0 == s) {
                let pre = self.ancilla_state_before(n + j, s);
                for (_, rho) in &mut branches {
                    *rho = linalg::kron(rho, &pre);
                }
                active = Some(j);
            }
            let n_reg = n + 1 + active.is_some() as usize;
            for (qs, sup) in &self.ops[s] {
                let Some(targets) = self.lazy_targets(qs, active) else { continue };
                for (_, rho) in &mut branches {
                    *rho = apply_local_matrix(sup, &targets, rho, n_reg);
                }
            }
            if let Some(j) = active.filter(|&j| windows[j].1 == s) {
                for later in s + 1..self.circuit.steps.len() {
                    for (qs, sup) in &self.ops[later] {
                        if qs.as_slice() == [n + j] {
                            for (_, rho) in &mut branches {
                                *rho = apply_local_matrix(sup, &[n + 1], rho, n_reg);
                            }
                        }
                    }
                }
                branches = branches
                    .into_iter()
                    .flat_map(|(b, rho)| [(b, project_last(&rho, 0)), (b | 1 << j, project_last(&rho, 1))])
                    .collect();
                active = None;
            }
        }
        self.assemble(branches)
    }

    fn windows(&self) -> Result<Vec<(usize, usize)>> {
        (0..self.code.generators.len())
            .map(|j| {
                self.circuit
                    .active_window(self.code.n + j)
                    .ok_or_else(|| Error::validation(format!("ancilla {j} is never used")))
            })
            .collect()
    }

    /// Ancilla state entering step `s`, starting from |0⟩.
    fn ancilla_state_before(&self, q: usize, s: usize) -> CMat {
        let mut v = CVec::zeros(4);
        v[0] = c(1.0, 0.0);
        for step in &self.ops[..s] {
            for (qs, sup) in step {
                if qs.as_slice() == [q] {
                    v = sup * v;
                }
            }
        }
        linalg::unvec_col(&v, 2)
    }

    /// Register positions: code qubits in place, the reference at n, the active ancilla at n + 1.
    fn lazy_targets(&self, qs: &[usize], active: Option<usize>) -> Option<Vec<usize>> {
        let n = self.code.n;
        qs.iter()
            .map(|&q| match q {
                q if q < n => Some(q),
                q if Some(q - n) == active => Some(n + 1),
                _ => None,
            })
            .collect()
    }

    /// Straightforward simulation on the full register (code, ancillas, reference).
    fn run_full(&self) -> Result<GadgetResult> {
        let n = self.code.n;
        let m = self.code.generators.len();
        let total = n + m + 1;
        let psi6 = self.initial_ket();
        let mut psi = CVec::zeros(1 << total);
        for (i, a) in psi6.iter().enumerate() {
            let (code_bits, r) = (i >> 1, i & 1);
            psi[(code_bits << (m + 1)) | r] = *a;
        }
        let mut rho = &psi * psi.adjoint();
        for step in &self.ops {
            for (qs, sup) in step {
                rho = apply_local_matrix(sup, qs, &rho, total);
            }
        }
        let parts = (0..1usize << m)
            .map(|b| {
                // Ancilla j sits at bit (m - j) of the full index.
                let anc: usize = (0..m).filter(|j| b >> j & 1 == 1).map(|j| 1 << (m - j)).sum();
                let idx = |i: usize| ((i >> 1) << (m + 1)) | anc | (i & 1);
                let d = 1 << (n + 1);
                (b, CMat::from_fn(d, d, |i, k| rho[(idx(i), idx(k))]))
            })
            .collect();
        self.assemble(parts)
    }
}

fn swap2(i: usize) -> usize {
    ((i & 1) << 1) | (i >> 1)
}

/// ⟨b| ρ |b⟩ on the last qubit.
fn project_last(rho: &CMat, b: usize) -> CMat {
    let d = rho.nrows() / 2;
    CMat::from_fn(d, d, |i, k| rho[(2 * i + b, 2 * k + b)])
}

/// Partial trace keeping `keep` (in the given order) of an `n`-qubit operator.
pub fn reduce(rho: &CMat, n: usize, keep: &[usize]) -> CMat {
    let k = keep.len();
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let place = |kept: usize, rest: usize| -> usize {
        let mut idx = 0usize;
        for (t, &q) in keep.iter().enumerate() {
            idx |= ((kept >> (k - 1 - t)) & 1) << (n - 1 - q);
        }
        for (t, &q) in traced.iter().enumerate() {
            idx |= ((rest >> (traced.len() - 1 - t)) & 1) << (n - 1 - q);
        }
        idx
    };
    CMat::from_fn(1 << k, 1 << k, |i, j| (0..1usize << traced.len()).map(|r| rho[(place(i, r), place(j, r))]).sum())
}

/// Projector onto ancilla outcome `b` (bit j for ancilla j) on `m` ancillas.
pub fn syndrome_projector(m: usize, b: usize) -> CMat {
    let idx: usize = (0..m).filter(|j| b >> j & 1 == 1).map(|j| 1 << (m - 1 - j)).sum();
    CMat::from_fn(1 << m, 1 << m, |i, k| c((i == idx && k == idx) as u8 as f64, 0.0))
}

/// Logical channel of one round under `gates`, with optional injected faults.
pub fn gadget_choi_with(code: &StabilizerCode, circuit: &ScheduledCircuit, gates: &GateTable, faults: &[Fault]) -> Result<GadgetResult> {
    let engine = Engine::new(code, circuit, gates, faults)?;
    match engine.run_lazy() {
        Ok(r) => Ok(r),
        Err(Error::Validation(msg)) if msg == "ancilla windows overlap" => engine.run_full(),
        Err(e) => Err(e),
    }
}

/// Reference implementation on the full 2^(n+m+1)-dimensional register.
pub fn gadget_choi_full(code: &StabilizerCode, circuit: &ScheduledCircuit, gates: &GateTable, faults: &[Fault]) -> Result<GadgetResult> {
    Engine::new(code, circuit, gates, faults)?.run_full()
}

pub fn gadget_choi(code: &StabilizerCode, circuit: &ScheduledCircuit, gates: &GateTable) -> Result<GadgetResult> {
    gadget_choi_with(code, circuit, gates, &[])
}
