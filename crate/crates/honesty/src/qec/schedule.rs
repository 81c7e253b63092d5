//! Time-stepped syndrome-extraction circuits.

use super::code::StabilizerCode;
use crate::error::{Error, Result};
use crate::physics::GateName;
use serde::{Deserialize, Serialize};

/// One gate on explicit qubits; for CNOT the control comes first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Placement {
    pub gate: GateName,
    pub qubits: Vec<usize>,
}

impl Placement {
    pub fn new(gate: GateName, qubits: &[usize]) -> Self {
        Placement { gate, qubits: qubits.to_vec() }
    }
}

/// Qubits `0..n_data` hold the code block and `n_data + j` is the ancilla
/// measuring generator j. Every step covers every qubit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduledCircuit {
    pub n_qubits: usize,
    pub n_data: usize,
    pub steps: Vec<Vec<Placement>>,
}

impl ScheduledCircuit {
    pub fn n_ancillas(&self) -> usize {
        self.n_qubits - self.n_data
    }

    pub fn validate(&self) -> Result<()> {
        for (s, step) in self.steps.iter().enumerate() {
            let mut seen = vec![false; self.n_qubits];
            for p in step {
                if p.qubits.len() != p.gate.n_qubits() {
                    return Err(Error::validation(format!("step {s}: {} needs {} qubits", p.gate, p.gate.n_qubits())));
                }
                for &q in &p.qubits {
                    if q >= self.n_qubits || seen[q] {
                        return Err(Error::validation(format!("step {s}: qubit {q} is out of range or used twice")));
                    }
                    seen[q] = true;
                }
            }
            if let Some(q) = seen.iter().position(|&b| !b) {
                return Err(Error::validation(format!("step {s}: qubit {q} has no placement")));
            }
        }
        Ok(())
    }

    pub fn gates_used(&self) -> Vec<GateName> {
        let mut out: Vec<GateName> = Vec::new();
        for p in self.steps.iter().flatten() {
            if !out.contains(&p.gate) {
                out.push(p.gate);
            }
        }
        out
    }

    /// First and last step in which `q` takes part in a non-identity gate.
    pub fn active_window(&self, q: usize) -> Option<(usize, usize)> {
        let busy: Vec<usize> = (0..self.steps.len())
            .filter(|&s| self.steps[s].iter().any(|p| p.gate != GateName::I && p.qubits.contains(&q)))
            .collect();
        Some((*busy.first()?, *busy.last()?))
    }

    /// Number of (step, qubit) locations.
    pub fn locations(&self) -> usize {
        self.steps.len() * self.n_qubits
    }
}

/// Sequential ancilla-assisted measurement of each generator. Step 0 is the
/// data wait location, which doubles as ancilla preparation.
pub fn syndrome_circuit(code: &StabilizerCode) -> Result<ScheduledCircuit> {
    code.validate()?;
    let n = code.n;
    let nq = n + code.generators.len();
    let one = |g: GateName, q: usize| vec![Placement::new(g, &[q])];
    let mut raw: Vec<Vec<Placement>> = vec![(0..nq).map(|q| Placement::new(GateName::I, &[q])).collect()];
    for (j, g) in code.generators.iter().enumerate() {
        let a = n + j;
        raw.push(one(GateName::H, a));
        for q in g.support() {
            let cx = vec![Placement::new(GateName::Cnot, &[a, q])];
            match g.kind(q) {
                1 => raw.push(cx),
                3 => {
                    raw.push(one(GateName::H, q));
                    raw.push(cx);
                    raw.push(one(GateName::H, q));
                }
                _ => return Err(Error::validation(format!("generator {g} has a Y factor, which this compiler does not handle"))),
            }
        }
        raw.push(one(GateName::H, a));
        raw.push(one(GateName::I, a));
    }
    cancel_hadamard_pairs(&mut raw, nq);
    raw.retain(|s| !s.is_empty());
    for step in &mut raw {
        let used: Vec<usize> = step.iter().flat_map(|p| p.qubits.clone()).collect();
        step.extend((0..nq).filter(|q| !used.contains(q)).map(|q| Placement::new(GateName::I, &[q])));
        step.sort_by_key(|p| p.qubits[0]);
    }
    let circuit = ScheduledCircuit { n_qubits: nq, n_data: n, steps: raw };
    circuit.validate()?;
    Ok(circuit)
}

/// Removes pairs of H gates on a qubit with no other placement on it in between.
fn cancel_hadamard_pairs(steps: &mut [Vec<Placement>], nq: usize) {
    for q in 0..nq {
        let mut stack: Vec<(usize, bool)> = Vec::new();
        let mut doomed: Vec<usize> = Vec::new();
        for (s, step) in steps.iter().enumerate() {
            if let Some(p) = step.iter().find(|p| p.qubits.contains(&q)) {
                let is_h = p.gate == GateName::H;
                if is_h && matches!(stack.last(), Some(&(_, true))) {
                    doomed.push(stack.pop().unwrap().0);
                    doomed.push(s);
                } else {
                    stack.push((s, is_h));
                }
            }
        }
        for s in doomed {
            steps[s].retain(|p| !(p.gate == GateName::H && p.qubits == [q]));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_schedule_shape() {
        let code = StabilizerCode::five_qubit();
        let c = syndrome_circuit(&code).unwrap();
        assert_eq!(c.n_qubits, 9);
        assert_eq!(c.n_ancillas(), 4);
        let mut used = c.gates_used();
        used.sort_by_key(|g| g.label());
        assert_eq!(used, vec![GateName::Cnot, GateName::H, GateName::I]);
        assert!(c.steps[0].iter().all(|p| p.gate == GateName::I));
        let windows: Vec<(usize, usize)> = (5..9).map(|a| c.active_window(a).unwrap()).collect();
        for w in windows.windows(2) {
            assert!(w[0].1 < w[1].0);
        }
        // Each block: H, CNOTs, H; the pre-measurement identity follows the closing H.
        for (j, &(first, last)) in windows.iter().enumerate() {
            let a = 5 + j;
            let gate_on = |s: usize| c.steps[s].iter().find(|p| p.qubits.contains(&a)).unwrap().gate;
            assert_eq!(gate_on(first), GateName::H);
            assert_eq!(gate_on(last), GateName::H);
            let cnots = (first..=last).filter(|&s| gate_on(s) == GateName::Cnot).count();
            assert_eq!(cnots, 4);
        }
    }

    #[test]
    fn adjacent_hadamards_cancel() {
        let mut steps = vec![
            vec![Placement::new(GateName::H, &[0])],
            vec![Placement::new(GateName::I, &[1])],
            vec![Placement::new(GateName::H, &[0])],
            vec![Placement::new(GateName::H, &[1])],
        ];
        cancel_hadamard_pairs(&mut steps, 2);
        assert!(steps[0].is_empty() && steps[2].is_empty());
        assert_eq!(steps[3].len(), 1);
    }

    #[test]
    fn the_generator_blocks_lose_redundant_hadamards() {
        // Z checks on a data qubit in consecutive generators share their H pair.
        let c = syndrome_circuit(&StabilizerCode::five_qubit()).unwrap();
        let h_count = c.steps.iter().flatten().filter(|p| p.gate == GateName::H).count();
        assert!(h_count < 8 + 2 * 8);
    }
}
