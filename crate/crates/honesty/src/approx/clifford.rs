//! The 24 single-qubit Clifford unitaries.
//!
//! Order: the four Paulis I, X, Y, Z first, then the remaining elements in the
//! breadth-first order in which words in {H, S} first reach them.

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::linalg::{self, c, hadamard, pauli, CMat, I, ZERO};
use std::collections::VecDeque;

fn s_gate() -> CMat {
    CMat::from_row_slice(2, 2, &[c(1.0, 0.0), ZERO, ZERO, I])
}

/// Canonical representative: first nonzero entry made real and positive.
pub fn canonical_phase(u: &CMat) -> CMat {
    let pivot = u.iter().find(|z| z.norm() > 1e-9).copied().unwrap_or(c(1.0, 0.0));
    u * (pivot.conj() / pivot.norm())
}

pub fn same_up_to_phase(a: &CMat, b: &CMat) -> bool {
    linalg::max_abs_diff(&canonical_phase(a), &canonical_phase(b)) < 1e-9
}

pub fn clifford_unitaries() -> Vec<CMat> {
    let gens = [hadamard(), s_gate()];
    let mut found: Vec<CMat> = (0..4).map(pauli).collect();
    let mut queue: VecDeque<CMat> = VecDeque::from([linalg::eye(2)]);
    let mut seen: Vec<CMat> = vec![linalg::eye(2)];
    while let Some(u) = queue.pop_front() {
        for g in &gens {
            let v = g * &u;
            if seen.iter().any(|w| same_up_to_phase(w, &v)) {
                continue;
            }
            seen.push(v.clone());
            if !found.iter().any(|w| same_up_to_phase(w, &v)) {
                found.push(canonical_phase(&v));
            }
            queue.push_back(v);
        }
    }
    found
}

pub fn clifford_basis(n_qubits: usize) -> Result<Vec<Channel>> {
    if n_qubits != 1 {
        return Err(Error::validation("Clifford basis is only provided for one qubit"));
    }
    Ok(clifford_unitaries().iter().map(Channel::unitary).collect())
}
