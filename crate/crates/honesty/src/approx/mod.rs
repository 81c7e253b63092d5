//! Pauli twirling and honest approximation by Pauli or Clifford mixtures.

pub mod clifford;
pub mod family;
mod solver;

pub use clifford::{clifford_basis, clifford_unitaries};
pub use family::{approximate_error, approximate_gate, approximate_gateset, Family, GateApproximation};
pub use solver::{feasible_start, honest_approximation, ApproxOptions, ApproximationResult};

use crate::channel::{pauli, Channel};
use crate::error::{Error, Result};
use crate::linalg::CMat;
use serde::{Deserialize, Serialize};

/// Averages conjugation over the Pauli group, which keeps only the χ diagonal.
pub fn pauli_twirl(e: &Channel) -> Channel {
    let diag: Vec<f64> = e.to_chi().diagonal();
    Channel::pauli_channel(&diag)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Basis {
    Pauli(usize),
    Clifford1,
}

impl From<Basis> for String {
    fn from(b: Basis) -> String {
        b.id()
    }
}

impl TryFrom<String> for Basis {
    type Error = Error;
    fn try_from(s: String) -> Result<Basis> {
        match s.as_str() {
            "clifford_1" => Ok(Basis::Clifford1),
            _ => s
                .strip_prefix("pauli_")
                .and_then(|n| n.parse().ok())
                .filter(|&n: &usize| (1..=2).contains(&n))
                .map(Basis::Pauli)
                .ok_or_else(|| Error::validation(format!("unknown basis '{s}'"))),
        }
    }
}

impl Basis {
    pub fn id(&self) -> String {
        match self {
            Basis::Pauli(n) => format!("pauli_{n}"),
            Basis::Clifford1 => "clifford_1".into(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            Basis::Pauli(n) => *n,
            Basis::Clifford1 => 1,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Basis::Pauli(n) => 1 << (2 * n),
            Basis::Clifford1 => 24,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn unitaries(&self) -> Vec<CMat> {
        match self {
            Basis::Pauli(n) => (0..self.len()).map(|k| pauli::operator(k, *n)).collect(),
            Basis::Clifford1 => clifford_unitaries(),
        }
    }

    pub fn channels(&self) -> Vec<Channel> {
        self.unitaries().iter().map(Channel::unitary).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureChannel {
    pub basis: Basis,
    pub weights: Vec<f64>,
}

impl MixtureChannel {
    pub fn new(basis: Basis, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != basis.len() {
            return Err(Error::Dimension { expected: basis.len(), got: weights.len() });
        }
        if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(Error::validation("mixture weights must be non-negative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::validation(format!("mixture weights sum to {total}")));
        }
        Ok(MixtureChannel { basis, weights })
    }

    pub fn to_channel(&self) -> Channel {
        let n = self.basis.n_qubits();
        let d2 = 1usize << (2 * n);
        let mut s = CMat::zeros(d2, d2);
        for (w, ch) in self.weights.iter().zip(self.basis.channels()) {
            if *w != 0.0 {
                s += ch.superop * crate::linalg::c(*w, 0.0);
            }
        }
        Channel::from_superop(n, s)
    }

    /// The same mixture over the larger Clifford basis (Paulis occupy its first four slots).
    pub fn embed_in_clifford(&self) -> Result<MixtureChannel> {
        match self.basis {
            Basis::Pauli(1) => {
                let mut w = self.weights.clone();
                w.resize(24, 0.0);
                Ok(MixtureChannel { basis: Basis::Clifford1, weights: w })
            }
            Basis::Clifford1 => Ok(self.clone()),
            _ => Err(Error::validation("only single-qubit Pauli mixtures embed in the Clifford basis")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{self, rotation};
    use std::f64::consts::PI;

    #[test]
    fn twirl_of_pauli_channel_is_itself() {
        let ch = Channel::pauli_channel(&[0.7, 0.1, 0.15, 0.05]);
        assert!(linalg::max_abs_diff(&pauli_twirl(&ch).superop, &ch.superop) < 1e-14);
    }

    #[test]
    fn twirl_of_rotation_is_dephasing() {
        let u = Channel::unitary(&rotation([0.0, 0.0, 1.0], PI / 5.0));
        let p = (PI / 10.0).sin().powi(2);
        assert!(linalg::max_abs_diff(&pauli_twirl(&u).superop, &Channel::dephasing(p).superop) < 1e-14);
    }

    #[test]
    fn twirl_removes_non_unital_part() {
        let ad = Channel::amplitude_damping(0.3);
        let b = pauli_twirl(&ad).to_bloch();
        let orig = ad.to_bloch();
        assert!((&b.m - &orig.m).abs().max() < 1e-14);
        assert!(b.t.norm() < 1e-15);
    }

    #[test]
    fn mixture_round_trip() {
        let m = MixtureChannel::new(Basis::Pauli(1), vec![0.8, 0.0, 0.0, 0.2]).unwrap();
        assert!(linalg::max_abs_diff(&m.to_channel().superop, &Channel::dephasing(0.2).superop) < 1e-15);
        let text = serde_json::to_string(&m).unwrap();
        assert!(text.contains("pauli_1"));
        let back: MixtureChannel = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
        let emb = m.embed_in_clifford().unwrap();
        assert!(linalg::max_abs_diff(&emb.to_channel().superop, &m.to_channel().superop) < 1e-15);
    }

    #[test]
    fn mixture_validation() {
        assert!(MixtureChannel::new(Basis::Pauli(1), vec![0.5, 0.5, 0.1, -0.1]).is_err());
        assert!(MixtureChannel::new(Basis::Pauli(1), vec![0.5, 0.4, 0.0, 0.0]).is_err());
        assert!(MixtureChannel::new(Basis::Clifford1, vec![1.0]).is_err());
    }
}
