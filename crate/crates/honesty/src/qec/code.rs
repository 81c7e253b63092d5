//! Stabilizer codes over Pauli strings, with the five-qubit perfect code.

use super::schedule::Placement;
use crate::channel::local::embed_operator;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::physics::GateName;
use serde::{Deserialize, Serialize};

/// Phase-free n-qubit Pauli string; bit q of `x`/`z` belongs to qubit q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    pub n: usize,
    pub x: u64,
    pub z: u64,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString { n, x: 0, z: 0 }
    }

    /// Pauli `kind` (1 = X, 2 = Y, 3 = Z) on qubit `q`.
    pub fn single(n: usize, q: usize, kind: usize) -> Self {
        let mut p = PauliString::identity(n);
        p.set(q, kind);
        p
    }

    pub fn parse(s: &str) -> Result<Self> {
        let n = s.chars().count();
        if n == 0 || n > 64 {
            return Err(Error::validation(format!("Pauli string '{s}' must have 1 to 64 letters")));
        }
        let mut p = PauliString::identity(n);
        for (q, ch) in s.chars().enumerate() {
            let kind = match ch {
                'I' => 0,
                'X' => 1,
                'Y' => 2,
                'Z' => 3,
                _ => return Err(Error::validation(format!("bad Pauli letter '{ch}' in '{s}'"))),
            };
            p.set(q, kind);
        }
        Ok(p)
    }

    pub fn set(&mut self, q: usize, kind: usize) {
        let bit = 1u64 << q;
        self.x &= !bit;
        self.z &= !bit;
        if kind == 1 || kind == 2 {
            self.x |= bit;
        }
        if kind == 2 || kind == 3 {
            self.z |= bit;
        }
    }

    /// 0 = I, 1 = X, 2 = Y, 3 = Z.
    pub fn kind(&self, q: usize) -> usize {
        match ((self.x >> q) & 1, (self.z >> q) & 1) {
            (0, 0) => 0,
            (1, 0) => 1,
            (1, 1) => 2,
            _ => 3,
        }
    }

    pub fn label(&self) -> String {
        (0..self.n).map(|q| ['I', 'X', 'Y', 'Z'][self.kind(q)]).collect()
    }

    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.kind(q) != 0).collect()
    }

    pub fn commutes(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// Product up to phase.
    pub fn mul(&self, other: &PauliString) -> PauliString {
        PauliString { n: self.n, x: self.x ^ other.x, z: self.z ^ other.z }
    }

    /// Index into the n-qubit Pauli basis (qubit 0 is the leading digit).
    pub fn basis_index(&self) -> usize {
        (0..self.n).fold(0, |acc, q| acc * 4 + self.kind(q))
    }

    pub fn matrix(&self) -> CMat {
        linalg::kron_all(&(0..self.n).map(|q| linalg::pauli(self.kind(q))).collect::<Vec<_>>())
    }
}

impl std::fmt::Display for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilizerCode {
    pub name: String,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub generators: Vec<PauliString>,
    pub logical_x: PauliString,
    pub logical_z: PauliString,
    /// Encoding circuit over {H, CNOT}; the data qubit is 0 and qubits 1..n start in |0⟩.
    pub encoder: Vec<Placement>,
}

impl StabilizerCode {
    pub fn five_qubit() -> Self {
        let p = |s: &str| PauliString::parse(s).expect("valid literal");
        let h = |q| Placement::new(GateName::H, &[q]);
        let cx = |a, b| Placement::new(GateName::Cnot, &[a, b]);
        StabilizerCode {
            name: "perfect5".into(),
            n: 5,
            k: 1,
            d: 3,
            generators: ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"].into_iter().map(p).collect(),
            logical_x: p("XIZIX"),
            logical_z: p("ZXZII"),
            encoder: vec![h(1), cx(0, 2), cx(1, 2), cx(1, 3), h(3), cx(2, 4), cx(3, 2), h(0), cx(0, 2), cx(0, 1), h(2), h(0)],
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "perfect5" => Ok(StabilizerCode::five_qubit()),
            _ => Err(Error::validation(format!("unknown code '{name}' (expected perfect5)"))),
        }
    }

    /// Bit j is set when `e` anticommutes with generator j.
    pub fn syndrome(&self, e: &PauliString) -> usize {
        self.generators.iter().enumerate().filter(|(_, g)| !g.commutes(e)).map(|(j, _)| 1 << j).sum()
    }

    pub fn encoder_unitary(&self) -> CMat {
        circuit_unitary(&self.encoder, self.n)
    }

    /// Minimum-weight decoder: the unique weight ≤ 1 Pauli for each syndrome.
    pub fn recovery_table(&self) -> Result<Vec<PauliString>> {
        let m = self.generators.len();
        let mut table: Vec<Option<PauliString>> = vec![None; 1 << m];
        table[0] = Some(PauliString::identity(self.n));
        for q in 0..self.n {
            for kind in 1..4 {
                let e = PauliString::single(self.n, q, kind);
                let s = self.syndrome(&e);
                if s == 0 {
                    return Err(Error::validation(format!("{e} has a trivial syndrome")));
                }
                if let Some(prev) = table[s] {
                    return Err(Error::validation(format!("{e} and {prev} share syndrome {s:0m$b}")));
                }
                table[s] = Some(e);
            }
        }
        table
            .into_iter()
            .enumerate()
            .map(|(s, e)| e.ok_or_else(|| Error::validation(format!("syndrome {s} has no weight-1 preimage"))))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.generators.len() != self.n - self.k {
            return Err(Error::validation("need n - k generators"));
        }
        let all = self.generators.iter().chain([&self.logical_x, &self.logical_z]);
        if all.clone().any(|p| p.n != self.n) {
            return Err(Error::validation("Pauli string length differs from n"));
        }
        for (i, a) in self.generators.iter().enumerate() {
            for b in &self.generators[i + 1..] {
                if !a.commutes(b) {
                    return Err(Error::validation(format!("generators {a} and {b} anticommute")));
                }
            }
            if !a.commutes(&self.logical_x) || !a.commutes(&self.logical_z) {
                return Err(Error::validation(format!("a logical operator anticommutes with {a}")));
            }
        }
        if self.logical_x.commutes(&self.logical_z) {
            return Err(Error::validation("logical X and Z must anticommute"));
        }
        let e = self.encoder_unitary();
        for bit in 0..2 {
            let psi = &e * CVec::from_fn(1 << self.n, |i, _| linalg::c((i == bit << (self.n - 1)) as u8 as f64, 0.0));
            for g in &self.generators {
                if (&g.matrix() * &psi - &psi).norm() > 1e-10 {
                    return Err(Error::validation(format!("encoded |{bit}⟩ is not stabilized by {g}")));
                }
            }
        }
        Ok(())
    }
}

/// Unitary of a circuit of ideal gates on `n` qubits.
pub fn circuit_unitary(circuit: &[Placement], n: usize) -> CMat {
    circuit.iter().fold(linalg::eye(1 << n), |u, p| embed_operator(&p.gate.ideal(), &p.qubits, n) * u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_qubit_code_is_valid() {
        StabilizerCode::five_qubit().validate().unwrap();
    }

    #[test]
    fn encoder_maps_physical_paulis_to_logicals() {
        let code = StabilizerCode::five_qubit();
        let e = code.encoder_unitary();
        for (kind, logical) in [(1, code.logical_x), (3, code.logical_z)] {
            let physical = embed_operator(&linalg::pauli(kind), &[0], 5);
            let image = &e * physical * e.adjoint();
            // Equal on the code space: compare on the encoded basis states.
            for bit in 0..2usize {
                let ket = CVec::from_fn(32, |i, _| linalg::c((i == bit << 4) as u8 as f64, 0.0));
                let enc = &e * &ket;
                assert!((&image * &enc - logical.matrix() * &enc).norm() < 1e-10, "{logical}");
            }
        }
    }

    #[test]
    fn recovery_table_is_a_bijection() {
        let code = StabilizerCode::five_qubit();
        let table = code.recovery_table().unwrap();
        assert_eq!(table.len(), 16);
        assert_eq!(table[0].weight(), 0);
        let mut seen = std::collections::HashSet::new();
        for (s, r) in table.iter().enumerate() {
            assert_eq!(code.syndrome(r), s);
            assert!(seen.insert(*r));
            if s > 0 {
                assert_eq!(r.weight(), 1);
            }
        }
        assert_eq!(table[code.syndrome(&PauliString::parse("XIIII").unwrap())].label(), "XIIII");
    }

    #[test]
    fn pauli_string_round_trip() {
        for s in ["XZZXI", "IYIZI", "ZZZZZ"] {
            let p = PauliString::parse(s).unwrap();
            assert_eq!(p.label(), s);
            assert_eq!(p.to_string(), s);
        }
        assert!(PauliString::parse("XQ").is_err());
        let p = PauliString::parse("XY").unwrap();
        assert_eq!(p.basis_index(), 6);
        assert!(!p.commutes(&PauliString::parse("ZI").unwrap()));
        assert!(p.commutes(&PauliString::parse("ZZ").unwrap()));
        assert!(p.commutes(&PauliString::parse("XY").unwrap()));
    }
}
