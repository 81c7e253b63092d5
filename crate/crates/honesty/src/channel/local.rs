//! Application of one- and two-qubit channels to an n-qubit state without
//! building the embedded 4^n × 4^n superoperator.

use super::{Channel, DensityMatrix};
use crate::error::{Error, Result};
use crate::linalg::{CMat, ZERO};

/// Global index offsets for each local basis state, with `targets[0]` the most significant local bit.
fn local_offsets(targets: &[usize], n: usize) -> Vec<usize> {
    let k = targets.len();
    (0..1usize << k)
        .map(|a| {
            targets
                .iter()
                .enumerate()
                .filter(|&(t, _)| (a >> (k - 1 - t)) & 1 == 1)
                .map(|(_, &q)| 1usize << (n - 1 - q))
                .sum()
        })
        .collect()
}

/// All global indices whose target bits are zero.
fn rest_bases(targets: &[usize], n: usize) -> Vec<usize> {
    let mask: usize = targets.iter().map(|&q| 1usize << (n - 1 - q)).sum();
    (0..1usize << n).filter(|i| i & mask == 0).collect()
}

pub fn check_targets(targets: &[usize], n: usize) -> Result<()> {
    for (i, &q) in targets.iter().enumerate() {
        if q >= n {
            return Err(Error::validation(format!("target qubit {q} out of range for {n} qubits")));
        }
        if targets[..i].contains(&q) {
            return Err(Error::validation(format!("overlapping target qubit {q}")));
        }
    }
    Ok(())
}

/// Apply a local superoperator to a raw d×d operator in place of its targets.
pub fn apply_local_matrix(s: &CMat, targets: &[usize], rho: &CMat, n: usize) -> CMat {
    let k = targets.len();
    let dl = 1usize << k;
    let m = dl * dl;
    let offs = local_offsets(targets, n);
    let bases = rest_bases(targets, n);
    let mut out = CMat::zeros(rho.nrows(), rho.ncols());
    let mut block = vec![ZERO; m];
    let mut idx = vec![(0usize, 0usize); m];
    for &rr in &bases {
        for &rc in &bases {
            for b in 0..dl {
                for a in 0..dl {
                    let ij = (rr + offs[a], rc + offs[b]);
                    idx[b * dl + a] = ij;
                    block[b * dl + a] = rho[ij];
                }
            }
            for (r, &ij) in idx.iter().enumerate() {
                let mut acc = ZERO;
                for (col, v) in block.iter().enumerate() {
                    acc += s[(r, col)] * v;
                }
                out[ij] = acc;
            }
        }
    }
    out
}

pub fn apply_local(ch: &Channel, targets: &[usize], state: &DensityMatrix) -> Result<DensityMatrix> {
    if ch.n_qubits != targets.len() || !(1..=2).contains(&ch.n_qubits) {
        return Err(Error::validation(format!(
            "local channel on {} qubits given {} targets",
            ch.n_qubits,
            targets.len()
        )));
    }
    check_targets(targets, state.n_qubits)?;
    let rho = apply_local_matrix(&ch.superop, targets, &state.rho, state.n_qubits);
    Ok(DensityMatrix::from_matrix_unchecked(rho))
}

/// Conjugate by a local unitary acting on `targets`.
pub fn apply_local_unitary(u: &CMat, targets: &[usize], rho: &CMat, n: usize) -> CMat {
    let dl = u.nrows();
    let offs = local_offsets(targets, n);
    let bases = rest_bases(targets, n);
    let d = rho.nrows();
    // Left multiply: rows; then right multiply by u† on columns.
    let mut tmp = CMat::zeros(d, d);
    for &rr in &bases {
        for col in 0..d {
            for a in 0..dl {
                let mut acc = ZERO;
                for b in 0..dl {
                    acc += u[(a, b)] * rho[(rr + offs[b], col)];
                }
                tmp[(rr + offs[a], col)] = acc;
            }
        }
    }
    let mut out = CMat::zeros(d, d);
    for row in 0..d {
        for &rc in &bases {
            for a in 0..dl {
                let mut acc = ZERO;
                for b in 0..dl {
                    acc += tmp[(row, rc + offs[b])] * u[(a, b)].conj();
                }
                out[(row, rc + offs[a])] = acc;
            }
        }
    }
    out
}

/// Embed a local operator into the full register (dense; used by tests and small oracles).
pub fn embed_operator(op: &CMat, targets: &[usize], n: usize) -> CMat {
    let dl = op.nrows();
    let offs = local_offsets(targets, n);
    let bases = rest_bases(targets, n);
    let d = 1usize << n;
    let mut out = CMat::zeros(d, d);
    for &r in &bases {
        for a in 0..dl {
            for b in 0..dl {
                out[(r + offs[a], r + offs[b])] = op[(a, b)];
            }
        }
    }
    out
}
