//! Stabilizer tableau with destabilizers (Aaronson–Gottesman), up to 64 qubits.

use crate::error::{Error, Result};
use crate::qec::PauliString;
use rand::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Clifford {
    H,
    S,
    Cnot,
    X,
    Y,
    Z,
}

impl Clifford {
    pub fn arity(&self) -> usize {
        if *self == Clifford::Cnot {
            2
        } else {
            1
        }
    }
}

/// Rows 0..n are destabilizers, n..2n stabilizers, row 2n is scratch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tableau {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    r: Vec<bool>,
}

/// Power of i picked up by multiplying single-qubit Paulis (x1,z1)·(x2,z2).
fn g(x1: bool, z1: bool, x2: bool, z2: bool) -> i32 {
    match (x1, z1) {
        (false, false) => 0,
        (true, true) => z2 as i32 - x2 as i32,
        (true, false) => (z2 as i32) * (2 * x2 as i32 - 1),
        (false, true) => (x2 as i32) * (1 - 2 * z2 as i32),
    }
}

impl Tableau {
    /// |0…0⟩ on `n` qubits.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > 64 {
            return Err(Error::validation(format!("tableau supports 1 to 64 qubits, got {n}")));
        }
        let mut t = Tableau { n, x: vec![0; 2 * n + 1], z: vec![0; 2 * n + 1], r: vec![false; 2 * n + 1] };
        for i in 0..n {
            t.x[i] = 1 << i;
            t.z[n + i] = 1 << i;
        }
        Ok(t)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    /// Row `i` as (sign is negative, Pauli).
    pub fn row(&self, i: usize) -> (bool, PauliString) {
        (self.r[i], PauliString { n: self.n, x: self.x[i], z: self.z[i] })
    }

    pub fn stabilizer(&self, i: usize) -> (bool, PauliString) {
        self.row(self.n + i)
    }

    pub fn destabilizer(&self, i: usize) -> (bool, PauliString) {
        self.row(i)
    }

    fn rowsum(&mut self, h: usize, i: usize) {
        let mut sum = 2 * (self.r[h] as i32 + self.r[i] as i32);
        let mut bits = self.x[i] | self.z[i];
        while bits != 0 {
            let j = bits.trailing_zeros();
            bits &= bits - 1;
            let bit = |v: u64| (v >> j) & 1 == 1;
            sum += g(bit(self.x[i]), bit(self.z[i]), bit(self.x[h]), bit(self.z[h]));
        }
        self.r[h] = sum.rem_euclid(4) == 2;
        self.x[h] ^= self.x[i];
        self.z[h] ^= self.z[i];
    }

    fn check(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::validation(format!("qubit {q} out of range for {} qubits", self.n)));
        }
        Ok(())
    }

    pub fn apply(&mut self, gate: Clifford, targets: &[usize]) -> Result<()> {
        if targets.len() != gate.arity() {
            return Err(Error::validation(format!("{gate:?} takes {} targets", gate.arity())));
        }
        for &q in targets {
            self.check(q)?;
        }
        match gate {
            Clifford::H => self.h(targets[0]),
            Clifford::S => self.s(targets[0]),
            Clifford::X => self.pauli(targets[0], 1),
            Clifford::Y => self.pauli(targets[0], 2),
            Clifford::Z => self.pauli(targets[0], 3),
            Clifford::Cnot => {
                if targets[0] == targets[1] {
                    return Err(Error::validation("CNOT control equals target"));
                }
                self.cnot(targets[0], targets[1])
            }
        }
        Ok(())
    }

    pub fn h(&mut self, a: usize) {
        let m = 1u64 << a;
        for i in 0..2 * self.n {
            let (xa, za) = (self.x[i] & m, self.z[i] & m);
            if xa != 0 && za != 0 {
                self.r[i] = !self.r[i];
            }
            self.x[i] = (self.x[i] & !m) | za;
            self.z[i] = (self.z[i] & !m) | xa;
        }
    }

    pub fn s(&mut self, a: usize) {
        let m = 1u64 << a;
        for i in 0..2 * self.n {
            if self.x[i] & m != 0 && self.z[i] & m != 0 {
                self.r[i] = !self.r[i];
            }
            self.z[i] ^= self.x[i] & m;
        }
    }

    pub fn cnot(&mut self, a: usize, b: usize) {
        for i in 0..2 * self.n {
            let xa = (self.x[i] >> a) & 1;
            let zb = (self.z[i] >> b) & 1;
            let xb = (self.x[i] >> b) & 1;
            let za = (self.z[i] >> a) & 1;
            if xa & zb & (xb ^ za ^ 1) == 1 {
                self.r[i] = !self.r[i];
            }
            self.x[i] ^= xa << b;
            self.z[i] ^= zb << a;
        }
    }

    /// Pauli `kind` (1 = X, 2 = Y, 3 = Z) on qubit `a`: flips rows that anticommute with it.
    pub fn pauli(&mut self, a: usize, kind: usize) {
        let p = PauliString::single(self.n, a, kind);
        for i in 0..2 * self.n {
            if (((self.x[i] & p.z) ^ (self.z[i] & p.x)) >> a) & 1 == 1 {
                self.r[i] = !self.r[i];
            }
        }
    }

    pub fn apply_pauli_string(&mut self, p: &PauliString) {
        for q in 0..p.n {
            let k = p.kind(q);
            if k != 0 {
                self.pauli(q, k);
            }
        }
    }

    /// Z measurement of qubit `a`: the outcome bit and whether it was determined.
    pub fn measure_z<R: Rng + ?Sized>(&mut self, a: usize, rng: &mut R) -> (bool, bool) {
        let n = self.n;
        let m = 1u64 << a;
        if let Some(p) = (n..2 * n).find(|&p| self.x[p] & m != 0) {
            for i in 0..2 * n {
                if i != p && self.x[i] & m != 0 {
                    self.rowsum(i, p);
                }
            }
            self.x[p - n] = self.x[p];
            self.z[p - n] = self.z[p];
            self.r[p - n] = self.r[p];
            let outcome: bool = rng.random();
            self.x[p] = 0;
            self.z[p] = m;
            self.r[p] = outcome;
            (outcome, false)
        } else {
            let s = 2 * n;
            self.x[s] = 0;
            self.z[s] = 0;
            self.r[s] = false;
            for i in 0..n {
                if self.x[i] & m != 0 {
                    self.rowsum(s, i + n);
                }
            }
            (self.r[s], true)
        }
    }

    /// Sign of a Pauli in the stabilizer group: Some(true) for -1, None if its value is random.
    pub fn expectation(&self, p: &PauliString) -> Option<bool> {
        let n = self.n;
        let anti = |i: usize| ((self.x[i] & p.z).count_ones() + (self.z[i] & p.x).count_ones()) % 2 == 1;
        if (n..2 * n).any(anti) {
            return None;
        }
        let mut t = self.clone();
        let s = 2 * n;
        t.x[s] = 0;
        t.z[s] = 0;
        t.r[s] = false;
        for i in 0..n {
            if anti(i) {
                t.rowsum(s, i + n);
            }
        }
        debug_assert!(t.x[s] == p.x && t.z[s] == p.z);
        Some(t.r[s])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::local::embed_operator;
    use crate::linalg::{self, c, CMat, CVec};
    use crate::metrics::sample_rng;

    fn signed(sign: bool, p: &PauliString) -> CMat {
        p.matrix() * c(if sign { -1.0 } else { 1.0 }, 0.0)
    }

    fn dense(gate: Clifford) -> CMat {
        match gate {
            Clifford::H => linalg::hadamard(),
            Clifford::S => CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0)])),
            Clifford::Cnot => linalg::cnot(),
            Clifford::X => linalg::pauli(1),
            Clifford::Y => linalg::pauli(2),
            Clifford::Z => linalg::pauli(3),
        }
    }

    fn all_placements(n: usize) -> Vec<(Clifford, Vec<usize>)> {
        let mut out = Vec::new();
        for g in [Clifford::H, Clifford::S, Clifford::X, Clifford::Y, Clifford::Z] {
            for q in 0..n {
                out.push((g, vec![q]));
            }
        }
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    out.push((Clifford::Cnot, vec![a, b]));
                }
            }
        }
        out
    }

    /// Every row after U is U P U† for the row P before it.
    #[test]
    fn updates_match_dense_conjugation_exhaustively() {
        for n in 1..=3 {
            let mut rng = sample_rng(5, n as u64);
            // A scrambled start so rows carry Y factors and signs.
            let mut start = Tableau::new(n).unwrap();
            for _ in 0..12 {
                let ps = all_placements(n);
                let (g, t) = &ps[rng.random_range(0..ps.len())];
                start.apply(*g, t).unwrap();
            }
            for (g, t) in all_placements(n) {
                let mut tab = start.clone();
                tab.apply(g, &t).unwrap();
                let u = embed_operator(&dense(g), &t, n);
                for i in 0..2 * n {
                    let (s0, p0) = start.row(i);
                    let (s1, p1) = tab.row(i);
                    let want = &u * signed(s0, &p0) * u.adjoint();
                    assert!(linalg::max_abs_diff(&want, &signed(s1, &p1)) < 1e-12, "n={n} {g:?} {t:?} row {i}");
                }
            }
        }
    }

    #[test]
    fn hadamard_twice_is_identity() {
        let mut rng = sample_rng(1, 0);
        let mut t = Tableau::new(3).unwrap();
        for _ in 0..20 {
            let ps = all_placements(3);
            let (g, q) = &ps[rng.random_range(0..ps.len())];
            t.apply(*g, q).unwrap();
        }
        let before = t.clone();
        t.h(1);
        t.h(1);
        assert_eq!(t, before);
    }

    #[test]
    fn measurement_statistics() {
        let mut t = Tableau::new(1).unwrap();
        let mut rng = sample_rng(2, 0);
        assert_eq!(t.measure_z(0, &mut rng), (false, true));
        let mut ones = 0;
        for shot in 0..10_000u64 {
            let mut t = Tableau::new(1).unwrap();
            t.h(0);
            let (bit, det) = t.measure_z(0, &mut sample_rng(3, shot));
            assert!(!det);
            ones += bit as usize;
        }
        assert!((ones as f64 / 1e4 - 0.5).abs() < 2e-2);
    }

    #[test]
    fn ghz_parities_match_the_state_vector() {
        let mut ghz = CVec::zeros(8);
        ghz[0] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        ghz[7] = ghz[0];
        for shot in 0..50u64 {
            let mut t = Tableau::new(3).unwrap();
            t.h(0);
            t.cnot(0, 1);
            t.cnot(1, 2);
            for label in ["ZZI", "IZZ", "XXX", "YYX", "XYY"] {
                let p = PauliString::parse(label).unwrap();
                let dense = (ghz.adjoint() * p.matrix() * &ghz)[(0, 0)].re;
                assert_eq!(t.expectation(&p).map(|neg| if neg { -1.0 } else { 1.0 }), Some(dense.round()));
            }
            assert_eq!(t.expectation(&PauliString::parse("ZII").unwrap()), None);
            let mut rng = sample_rng(4, shot);
            let bits: Vec<bool> = (0..3).map(|q| t.measure_z(q, &mut rng).0).collect();
            assert!(bits.iter().all(|&b| b == bits[0]));
        }
    }

    #[test]
    fn bad_targets_are_rejected() {
        let mut t = Tableau::new(2).unwrap();
        assert!(t.apply(Clifford::H, &[2]).is_err());
        assert!(t.apply(Clifford::Cnot, &[1, 1]).is_err());
        assert!(t.apply(Clifford::Cnot, &[0]).is_err());
        assert!(Tableau::new(65).is_err());
    }
}
