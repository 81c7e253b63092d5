//! Distinguishability, diamond norm, honesty certificates and hedging statistics.

pub mod diamond;
pub mod sdp;

pub use diamond::{diamond_distance, diamond_norm, DiamondResult};

use crate::channel::{random_ket, BlochRep, Channel, DensityMatrix};
use crate::error::{Error, Result};
use crate::linalg::{self, eigh_real, CMat, CVec, RMat};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

pub const HONESTY_TOL: f64 = -1e-15;
pub const SIGNIFICANT_VIOLATION: f64 = -1e-12;

/// Trace norm of a Hermitian matrix, with a closed form for 2×2.
fn hermitian_trace_norm(m: &CMat) -> f64 {
    if m.nrows() == 2 {
        let a = m[(0, 0)].re;
        let d = m[(1, 1)].re;
        let mid = 0.5 * (a + d);
        let rad = (0.25 * (a - d) * (a - d) + m[(0, 1)].norm_sqr()).sqrt();
        (mid + rad).abs() + (mid - rad).abs()
    } else {
        linalg::trace_norm_hermitian(m)
    }
}

pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension { expected: a.dim(), got: b.dim() });
    }
    Ok(hermitian_trace_norm(&(&a.rho - &b.rho)))
}

/// ||ρ - Λ(ρ)||₁.
pub fn io_distinguishability(ch: &Channel, rho: &DensityMatrix) -> Result<f64> {
    if ch.dim() != rho.dim() {
        return Err(Error::Dimension { expected: ch.dim(), got: rho.dim() });
    }
    Ok(hermitian_trace_norm(&(&rho.rho - ch.apply_matrix(&rho.rho))))
}

#[derive(Clone, Debug)]
pub struct HonestyCertificate {
    pub a: RMat,
    pub min_eigenvalue: f64,
    pub honest: bool,
}

/// Certificate matrix for approximation `lam` of error `e`; honest when A ⪰ 0.
pub fn honesty_matrix(lam: &BlochRep, e: &BlochRep) -> Result<HonestyCertificate> {
    if lam.m.nrows() != e.m.nrows() {
        return Err(Error::Dimension { expected: lam.m.nrows(), got: e.m.nrows() });
    }
    let k = lam.m.nrows();
    let id = RMat::identity(k, k);
    let dl = &id - &lam.m;
    let de = &id - &e.m;
    let cross = (dl.transpose() * &lam.t - de.transpose() * &e.t).norm();
    let shift = lam.t.norm_squared() - e.t.norm_squared() - 2.0 * cross;
    let a = dl.transpose() * &dl - de.transpose() * &de + &id * shift;
    let a = (&a + a.transpose()) * 0.5;
    let min_eigenvalue = eigh_real(&a).0[0];
    Ok(HonestyCertificate { a, min_eigenvalue, honest: min_eigenvalue >= HONESTY_TOL })
}

/// h(Γ, ℰ, ρ) = ||ρ - Γ(ρ)||₁ - ||ρ - ℰ(ρ)||₁.
pub fn hedging(gamma: &Channel, e: &Channel, rho: &DensityMatrix) -> Result<f64> {
    if gamma.n_qubits != e.n_qubits {
        return Err(Error::Dimension { expected: gamma.n_qubits, got: e.n_qubits });
    }
    Ok(io_distinguishability(gamma, rho)? - io_distinguishability(e, rho)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HedgingStats {
    pub mean_h: f64,
    pub p_viol: f64,
    pub n_samples: usize,
    pub seed: u64,
    /// Samples with h < -1e-12, separating real violations from rounding noise.
    pub n_viol_significant: usize,
    pub min_h: f64,
}

/// Per-sample RNG stream so that results do not depend on evaluation order.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn hedging_stats(gamma: &Channel, e: &Channel, n_samples: usize, seed: u64) -> Result<HedgingStats> {
    if n_samples == 0 {
        return Err(Error::validation("n_samples must be at least 1"));
    }
    if gamma.n_qubits != e.n_qubits {
        return Err(Error::Dimension { expected: gamma.n_qubits, got: e.n_qubits });
    }
    let n = gamma.n_qubits;
    let d = gamma.dim();
    let mut sum = 0.0;
    let mut viol = 0usize;
    let mut significant = 0usize;
    let mut min_h = f64::INFINITY;
    for i in 0..n_samples {
        let mut rng = sample_rng(seed, i as u64);
        let ket: CVec = random_ket(n, &mut rng);
        let rho = &ket * ket.adjoint();
        let v = linalg::vec_col(&rho);
        let og = linalg::unvec_col(&(&gamma.superop * &v), d);
        let oe = linalg::unvec_col(&(&e.superop * &v), d);
        let h = hermitian_trace_norm(&(&rho - og)) - hermitian_trace_norm(&(&rho - oe));
        sum += h;
        min_h = min_h.min(h);
        if h < 0.0 {
            viol += 1;
        }
        if h < SIGNIFICANT_VIOLATION {
            significant += 1;
        }
    }
    Ok(HedgingStats {
        mean_h: sum / n_samples as f64,
        p_viol: viol as f64 / n_samples as f64,
        n_samples,
        seed,
        n_viol_significant: significant,
        min_h,
    })
}
