use honesty::approx::{honest_approximation, ApproxOptions, Basis};
use honesty::channel::{compose, kraus_to_channel, random_unitary, Channel};
use honesty::linalg::{c, rotation, CMat};
use honesty::metrics::{diamond_distance, hedging_stats};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// A weakly noisy qubit error: small random rotation after amplitude damping and a random rank-2 channel.
fn noisy_error(seed: u64, strength: f64) -> Channel {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let u = random_unitary(4, &mut rng);
    let kraus: Vec<CMat> = (0..2).map(|k| u.view((k * 2, 0), (2, 2)).into_owned()).collect();
    let mixed = kraus_to_channel(&kraus).unwrap();
    let near_id = Channel::from_superop(1, Channel::identity(1).superop * c(1.0 - strength, 0.0) + mixed.superop * c(strength, 0.0));
    let rot = Channel::unitary(&rotation([0.3, 0.1, 0.9], 4.0 * strength));
    compose(&rot, &compose(&Channel::amplitude_damping(strength), &near_id).unwrap()).unwrap()
}

fn opts(seed: u64) -> ApproxOptions {
    ApproxOptions { n_starts: 4, seed, ..Default::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn approximations_are_honest_and_exact(seed in 0u64..10_000, strength in 1e-3f64..5e-2) {
        let e = noisy_error(seed, strength);
        let r = honest_approximation(&e, Basis::Pauli(1), &opts(seed)).unwrap();
        prop_assert!(r.honest && r.certificate(&e).unwrap().honest);
        prop_assert!(r.objective >= 0.0);
        let w = &r.channel.weights;
        prop_assert!(w.iter().all(|&x| x >= 0.0) && (w.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        let approx = r.channel.to_channel();
        prop_assert!((diamond_distance(&approx, &e).unwrap() - r.objective).abs() < 1e-6);
        prop_assert!(hedging_stats(&approx, &e, 10_000, seed).unwrap().min_h >= -1e-9);
    }

    #[test]
    fn clifford_is_no_worse_than_pauli(seed in 0u64..10_000, strength in 1e-3f64..5e-2) {
        let e = noisy_error(seed, strength);
        let p = honest_approximation(&e, Basis::Pauli(1), &opts(seed)).unwrap();
        let mut o = opts(seed);
        o.extra_starts.push(p.channel.embed_in_clifford().unwrap().weights);
        let c = honest_approximation(&e, Basis::Clifford1, &o).unwrap();
        prop_assert!(c.honest);
        prop_assert!(c.objective <= p.objective + 1e-7, "{} > {}", c.objective, p.objective);
    }
}

#[test]
fn thread_count_does_not_change_the_result() {
    let e = noisy_error(17, 2e-2);
    let a = honest_approximation(&e, Basis::Clifford1, &opts(5)).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let b = pool.install(|| honest_approximation(&e, Basis::Clifford1, &opts(5))).unwrap();
    assert_eq!(a.best_start, b.best_start);
    assert_eq!(a.channel.weights, b.channel.weights);
}
