//! n-qubit Pauli operators in lexicographic I, X, Y, Z order, qubit 0 leftmost.

use crate::linalg::{kron_all, pauli, CMat};
use std::sync::OnceLock;

pub const LABELS: [char; 4] = ['I', 'X', 'Y', 'Z'];

/// Per-qubit Pauli digits of basis index `k` (qubit 0 first).
pub fn digits(k: usize, n: usize) -> Vec<usize> {
    (0..n).map(|q| (k >> (2 * (n - 1 - q))) & 3).collect()
}

pub fn index(digits: &[usize]) -> usize {
    digits.iter().fold(0, |acc, &d| acc * 4 + d)
}

pub fn label(k: usize, n: usize) -> String {
    digits(k, n).into_iter().map(|d| LABELS[d]).collect()
}

pub fn parse_label(s: &str) -> Option<Vec<usize>> {
    s.chars()
        .map(|ch| LABELS.iter().position(|&l| l == ch.to_ascii_uppercase()))
        .collect()
}

pub fn operator(k: usize, n: usize) -> CMat {
    let ms: Vec<CMat> = digits(k, n).into_iter().map(pauli).collect();
    kron_all(&ms)
}

/// Cached full basis for one or two qubits; larger registers are built on demand.
pub fn basis(n: usize) -> &'static [CMat] {
    static B1: OnceLock<Vec<CMat>> = OnceLock::new();
    static B2: OnceLock<Vec<CMat>> = OnceLock::new();
    static B3: OnceLock<Vec<CMat>> = OnceLock::new();
    let cell = match n {
        1 => &B1,
        2 => &B2,
        3 => &B3,
        _ => panic!("cached Pauli basis only for n <= 3"),
    };
    cell.get_or_init(|| (0..4usize.pow(n as u32)).map(|k| operator(k, n)).collect())
}

/// Whether two Pauli basis elements commute.
pub fn commute(a: usize, b: usize, n: usize) -> bool {
    let anti = digits(a, n)
        .into_iter()
        .zip(digits(b, n))
        .filter(|&(x, y)| x != 0 && y != 0 && x != y)
        .count();
    anti % 2 == 0
}
