use honesty::channel::local::embed_operator;
use honesty::linalg::{self, c, C64, CMat};
use honesty::qec::PauliString;
use honesty::stabilizer::{Clifford, Tableau};
use nalgebra::DVector;
use proptest::prelude::*;

fn dense(gate: Clifford, targets: &[usize], n: usize) -> CMat {
    let local = match gate {
        Clifford::H => linalg::hadamard(),
        Clifford::S => CMat::from_diagonal(&DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0)])),
        Clifford::Cnot => linalg::cnot(),
        Clifford::X => linalg::pauli(1),
        Clifford::Y => linalg::pauli(2),
        Clifford::Z => linalg::pauli(3),
    };
    embed_operator(&local, targets, n)
}

fn gate_strategy(n: usize) -> BoxedStrategy<(Clifford, Vec<usize>)> {
    let one = (prop::sample::select(vec![Clifford::H, Clifford::S, Clifford::X, Clifford::Y, Clifford::Z]), 0..n).prop_map(|(g, q)| (g, vec![q]));
    if n == 1 {
        return one.boxed();
    }
    let two = (0..n, 1..n).prop_map(move |(a, off)| (Clifford::Cnot, vec![a, (a + off) % n]));
    prop_oneof![3 => one, 1 => two].boxed()
}

fn circuit_strategy() -> impl Strategy<Value = (usize, Vec<(Clifford, Vec<usize>)>)> {
    (1usize..=3).prop_flat_map(|n| (Just(n), prop::collection::vec(gate_strategy(n), 0..25)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tableau_tracks_the_state_vector((n, gates) in circuit_strategy()) {
        let mut t = Tableau::new(n).unwrap();
        let mut psi = DVector::from_element(1 << n, c(0.0, 0.0));
        psi[0] = c(1.0, 0.0);
        for (g, q) in &gates {
            t.apply(*g, q).unwrap();
            psi = dense(*g, q, n) * psi;
        }
        for idx in 0..(1usize << (2 * n)) {
            let mut p = PauliString::identity(n);
            for q in 0..n {
                p.set(q, (idx >> (2 * q)) & 3);
            }
            let v: C64 = (psi.adjoint() * p.matrix() * &psi)[(0, 0)];
            let expected = if v.re > 0.5 { Some(false) } else if v.re < -0.5 { Some(true) } else { None };
            prop_assert_eq!(t.expectation(&p), expected, "{} = {}", p.label(), v);
        }
    }

    #[test]
    fn stabilizers_commute_and_pair_with_destabilizers((n, gates) in circuit_strategy()) {
        let mut t = Tableau::new(n).unwrap();
        for (g, q) in &gates {
            t.apply(*g, q).unwrap();
        }
        for i in 0..n {
            for k in 0..n {
                let (_, si) = t.stabilizer(i);
                prop_assert!(si.commutes(&t.stabilizer(k).1));
                prop_assert!(t.destabilizer(i).1.commutes(&t.destabilizer(k).1));
                prop_assert_eq!(si.commutes(&t.destabilizer(k).1), i != k);
            }
        }
    }
}
