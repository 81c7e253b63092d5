//! Multistart constrained minimisation of ||Σ p_i Λ_i - ℰ||⋄ over the simplex,
//! subject to the honesty certificate A(p) ⪰ 0.
//!
//! The basis channels are unital, so A(p) = R(p)ᵀR(p) - K with R affine in p.
//! That map is matrix-convex, hence its first-order expansion at p_k is a Loewner
//! lower bound and the linearised constraint A(p_k) + Σ (p_i - p_k,i) ∂_i A ⪰ 0
//! only admits honest points. Each local step solves the convex SDP
//!   min s  s.t.  s·I ⪰ Tr_out Y,  Y ⪰ ±(J(p) - J_ℰ),  p ∈ simplex,  linearised A ⪰ 0,
//! so every iterate is certificate-feasible and the objective never increases.
//! The nonconvexity of the honest set is handled by random feasible starts.

use super::{Basis, MixtureChannel};
use crate::channel::{BlochRep, Channel, ChoiMatrix};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, RMat, C64};
use crate::metrics::diamond::{choi_of, diamond_norm, entries, hermitian_generators, trace_out};
use crate::metrics::sdp::{self, Entry, Problem};
use crate::metrics::{honesty_matrix, sample_rng, HonestyCertificate, HONESTY_TOL};
use nalgebra::DVector;
use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug)]
pub struct ApproxOptions {
    pub n_starts: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub step_tol: f64,
    pub improve_tol: f64,
    pub max_rejections: usize,
    /// Additional feasible starting points tried after the random ones.
    pub extra_starts: Vec<Vec<f64>>,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        ApproxOptions {
            n_starts: 72,
            seed: 0,
            max_iter: 500,
            step_tol: 1e-9,
            improve_tol: 1e-10,
            max_rejections: 10_000,
            extra_starts: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ApproximationResult {
    pub channel: MixtureChannel,
    pub objective: f64,
    pub min_eig: f64,
    pub honest: bool,
    pub starts_used: usize,
    pub best_start: usize,
    pub seed: u64,
}

impl ApproximationResult {
    pub fn certificate(&self, e: &Channel) -> Result<HonestyCertificate> {
        honesty_matrix(&self.channel.to_channel().to_bloch(), &e.to_bloch())
    }
}

struct Landscape {
    m: Vec<RMat>,
    j: Vec<CMat>,
    target_j: CMat,
    target: BlochRep,
    n_qubits: usize,
}

impl Landscape {
    fn new(e: &Channel, basis: Basis) -> Result<Self> {
        let chans = basis.channels();
        let blochs: Vec<BlochRep> = chans.iter().map(Channel::to_bloch).collect();
        if blochs.iter().any(|b| b.t.norm() > 1e-12) {
            return Err(Error::validation("approximation basis must be unital"));
        }
        Ok(Landscape {
            m: blochs.into_iter().map(|b| b.m).collect(),
            j: chans.iter().map(|ch| ch.to_choi().j).collect(),
            target_j: choi_of(&e.superop)?.j,
            target: e.to_bloch(),
            n_qubits: e.n_qubits,
        })
    }

    fn bloch(&self, p: &[f64]) -> BlochRep {
        let k = self.target.m.nrows();
        let mut m = RMat::zeros(k, k);
        for (i, &w) in p.iter().enumerate() {
            if w != 0.0 {
                m += &self.m[i] * w;
            }
        }
        BlochRep { n_qubits: self.n_qubits, m, t: DVector::zeros(k) }
    }

    fn certificate(&self, p: &[f64]) -> Result<HonestyCertificate> {
        honesty_matrix(&self.bloch(p), &self.target)
    }

    fn min_eig(&self, p: &[f64]) -> f64 {
        self.certificate(p).map(|c| c.min_eigenvalue).unwrap_or(f64::NEG_INFINITY)
    }

    fn feasible(&self, p: &[f64]) -> bool {
        self.min_eig(p) >= HONESTY_TOL
    }

    /// ∂A/∂p_i = -M_iᵀR - RᵀM_i with R = I - M(p).
    fn derivatives(&self, p: &[f64]) -> Vec<RMat> {
        let k = self.target.m.nrows();
        let r = RMat::identity(k, k) - self.bloch(p).m;
        self.m
            .iter()
            .map(|mi| {
                let a = mi.transpose() * &r;
                -(&a + a.transpose())
            })
            .collect()
    }

    fn difference(&self, p: &[f64]) -> CMat {
        let mut j = -self.target_j.clone();
        for (i, &w) in p.iter().enumerate() {
            if w != 0.0 {
                j += &self.j[i] * c(w, 0.0);
            }
        }
        linalg::hermitian_part(&j)
    }

    fn objective(&self, p: &[f64]) -> Result<f64> {
        let j = self.difference(p);
        Ok(diamond_norm(&Channel::from_choi(&ChoiMatrix { n_qubits: self.n_qubits, j }).superop)?.value)
    }

    /// One convex step from the honest point `pk`: the new weights and the SDP value.
    fn step(&self, pk: &[f64]) -> Result<(Vec<f64>, f64)> {
        let n = pk.len();
        let d = 1usize << self.n_qubits;
        let dd = d * d;
        let scale = linalg::frobenius(&self.difference(pk));
        if scale < 1e-14 {
            return Ok((pk.to_vec(), 0.0));
        }
        let sigma = 1.0 / scale;
        let last = &self.j[n - 1];
        let base = (last - &self.target_j) * c(sigma, 0.0);
        let dj: Vec<CMat> = self.j[..n - 1].iter().map(|ji| (ji - last) * c(sigma, 0.0)).collect();

        let a_k = self.certificate(pk)?.a;
        let deriv = self.derivatives(pk);
        let dprime: Vec<RMat> = deriv[..n - 1].iter().map(|di| di - &deriv[n - 1]).collect();
        let mut ch = a_k.clone();
        for (i, dp) in dprime.iter().enumerate() {
            ch -= dp * pk[i];
        }
        let tau = 1.0 / dprime.iter().map(|x| x.norm()).fold(ch.norm(), f64::max).max(1e-300);
        let kdim = a_k.nrows();
        let to_c = |m: &RMat| m.map(|x| c(x * tau, 0.0));

        let weight_block = |i: usize| 3 + i;
        let last_block = 3 + n - 1;
        let honesty_block = last_block + 1;
        let mut blocks = vec![d, dd, dd];
        blocks.extend(std::iter::repeat(1).take(n));
        blocks.push(kdim);

        let mut a: Vec<Vec<Entry>> = Vec::with_capacity(1 + dd * dd + n - 1);
        a.push((0..d).map(|i| Entry { block: 0, row: i, col: i, val: c(-1.0, 0.0) }).collect());
        for g in hermitian_generators(dd) {
            let tr = trace_out(&g, d);
            let mut ak: Vec<Entry> = entries(0, &tr, 1.0, 0).collect();
            ak.extend(entries(1, &g, -1.0, 0));
            ak.extend(entries(2, &g, -1.0, 0));
            a.push(ak);
        }
        for (i, dji) in dj.iter().enumerate() {
            let mut ak = dense_entries(1, dji, 1.0);
            ak.extend(dense_entries(2, dji, -1.0));
            ak.push(Entry { block: weight_block(i), row: 0, col: 0, val: c(-1.0, 0.0) });
            ak.push(Entry { block: last_block, row: 0, col: 0, val: c(1.0, 0.0) });
            ak.extend(dense_entries(honesty_block, &to_c(&dprime[i]), -1.0));
            a.push(ak);
        }
        let mut b = vec![0.0; a.len()];
        b[0] = -1.0;
        let mut cm = vec![CMat::zeros(d, d), -&base, base.clone()];
        cm.extend((0..n).map(|_| CMat::zeros(1, 1)));
        cm[last_block][(0, 0)] = c(1.0, 0.0);
        cm.push(to_c(&ch));

        let sol = sdp::solve(&Problem { blocks, c: cm, a, b }, &sdp::Options::default())?;
        let q = &sol.y[1 + dd * dd..];
        let mut p: Vec<f64> = q.iter().map(|&x| x.max(0.0)).collect();
        p.push((1.0 - q.iter().sum::<f64>()).max(0.0));
        let total: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= total);
        Ok((p, sol.y[0] * scale))
    }
}

fn dense_entries(block: usize, m: &CMat, sign: f64) -> Vec<Entry> {
    let mut out = Vec::new();
    for r in 0..m.nrows() {
        for k in 0..m.ncols() {
            let v: C64 = m[(r, k)];
            if v != C64::new(0.0, 0.0) {
                out.push(Entry { block, row: r, col: k, val: v * sign });
            }
        }
    }
    out
}

/// Euclidean projection onto the probability simplex (sort-based).
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, &x) in u.iter().enumerate() {
        cum += x;
        let t = (cum - 1.0) / (k + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    let mut out: Vec<f64> = v.iter().map(|&x| (x - theta).max(0.0)).collect();
    let s: f64 = out.iter().sum();
    out.iter_mut().for_each(|x| *x /= s);
    out
}

fn dirichlet<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}

/// Largest t in [0, 1] with (1 - t)·from + t·to feasible, given `from` feasible.
fn bisect_feasible(l: &Landscape, from: &[f64], to: &[f64]) -> Vec<f64> {
    let mix = |t: f64| -> Vec<f64> { from.iter().zip(to).map(|(a, b)| (1.0 - t) * a + t * b).collect() };
    if l.feasible(to) {
        return to.to_vec();
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if l.feasible(&mix(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    mix(lo)
}

fn feasible_start_in(l: &Landscape, n: usize, rng: &mut impl Rng, max_rejections: usize) -> Result<Vec<f64>> {
    let mut last = dirichlet(n, rng);
    if l.feasible(&last) {
        return Ok(last);
    }
    for _ in 1..max_rejections {
        last = dirichlet(n, rng);
        if l.feasible(&last) {
            return Ok(last);
        }
    }
    let uniform = vec![1.0 / n as f64; n];
    let best = l.min_eig(&uniform);
    if best < HONESTY_TOL {
        return Err(Error::Infeasible { best });
    }
    Ok(bisect_feasible(l, &uniform, &last))
}

/// A random certificate-feasible weight vector: Dirichlet(1) rejection sampling,
/// falling back to moving a sample toward the uniform mixture.
pub fn feasible_start(e: &Channel, basis: Basis, seed: u64, index: u64) -> Result<Vec<f64>> {
    let l = Landscape::new(e, basis)?;
    let mut rng = sample_rng(seed, index);
    feasible_start_in(&l, basis.len(), &mut rng, ApproxOptions::default().max_rejections)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

struct LocalResult {
    p: Vec<f64>,
    f: f64,
    min_eig: f64,
    iterations: usize,
}

fn local_solve(l: &Landscape, start: Vec<f64>, opts: &ApproxOptions) -> Result<LocalResult> {
    let mut p = start;
    let mut f = l.objective(&p)?;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let (cand, value) = match l.step(&p) {
            Ok(r) => r,
            Err(Error::NonConvergence { gap, .. }) => {
                log::debug!("local step stopped: SDP gap {gap:.2e}");
                break;
            }
            Err(e) => return Err(e),
        };
        let cand = bisect_feasible(l, &p, &cand);
        let step = dist(&cand, &p);
        let improvement = f - value;
        if improvement <= 0.0 {
            break;
        }
        p = cand;
        f = value;
        if step < opts.step_tol || improvement < opts.improve_tol {
            break;
        }
    }
    let f = l.objective(&p)?;
    let min_eig = l.min_eig(&p);
    Ok(LocalResult { p, f, min_eig, iterations })
}

pub fn honest_approximation(e: &Channel, basis: Basis, opts: &ApproxOptions) -> Result<ApproximationResult> {
    e.validate()?;
    if basis.n_qubits() != e.n_qubits {
        return Err(Error::Dimension { expected: e.n_qubits, got: basis.n_qubits() });
    }
    let l = Landscape::new(e, basis)?;
    let n = basis.len();
    let total = opts.n_starts + opts.extra_starts.len();
    let runs: Vec<Result<Option<LocalResult>>> = (0..total)
        .into_par_iter()
        .map(|s| {
            let start = if s < opts.n_starts {
                let mut rng = sample_rng(opts.seed, s as u64);
                feasible_start_in(&l, n, &mut rng, opts.max_rejections)?
            } else {
                let p = project_simplex(&opts.extra_starts[s - opts.n_starts]);
                if !l.feasible(&p) {
                    return Ok(None);
                }
                p
            };
            let r = local_solve(&l, start, opts)?;
            log::debug!("start {s}: objective {:.6e}, min eig {:.3e}, {} steps", r.f, r.min_eig, r.iterations);
            Ok(Some(r))
        })
        .collect();
    let mut best: Option<(usize, LocalResult)> = None;
    let mut last_err = None;
    for (s, run) in runs.into_iter().enumerate() {
        let r = match run {
            Ok(Some(r)) => r,
            Ok(None) => continue,
            Err(err @ Error::Infeasible { .. }) => {
                last_err = Some(err);
                continue;
            }
            Err(err) => return Err(err),
        };
        let better = match &best {
            None => true,
            Some((_, b)) => r.f < b.f || (r.f == b.f && r.min_eig > b.min_eig),
        };
        if better {
            best = Some((s, r));
        }
    }
    let (idx, r) = best.ok_or(last_err.unwrap_or(Error::Infeasible { best: f64::NEG_INFINITY }))?;
    let weights = project_simplex(&r.p);
    let channel = MixtureChannel::new(basis, weights)?;
    let cert = honesty_matrix(&channel.to_channel().to_bloch(), &e.to_bloch())?;
    Ok(ApproximationResult {
        channel,
        objective: r.f,
        min_eig: cert.min_eigenvalue,
        honest: cert.honest,
        starts_used: total,
        best_start: idx,
        seed: opts.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rotation;
    use crate::metrics::diamond_distance;

    #[test]
    fn simplex_projection() {
        let p = project_simplex(&[0.5, 0.5, 0.5, 0.5]);
        assert!(p.iter().all(|&x| (x - 0.25).abs() < 1e-15));
        let p = project_simplex(&[2.0, 0.0, -1.0]);
        assert_eq!(p, vec![1.0, 0.0, 0.0]);
        let p = project_simplex(&[0.6, 0.3, 0.1]);
        assert!((p[0] - 0.6).abs() < 1e-15 && (p[2] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn target_inside_the_mixture_set() {
        let e = Channel::dephasing(0.2);
        let opts = ApproxOptions { n_starts: 4, seed: 1, ..Default::default() };
        let r = honest_approximation(&e, Basis::Pauli(1), &opts).unwrap();
        assert!(r.honest);
        assert!(r.objective < 1e-6, "{}", r.objective);
        assert!((r.channel.weights[0] - 0.8).abs() < 1e-5 && (r.channel.weights[3] - 0.2).abs() < 1e-5);
    }

    #[test]
    fn small_rotation_gives_equality_dephasing() {
        let theta = 2.0 * 0.05f64.asin();
        let e = Channel::unitary(&rotation([0.0, 0.0, 1.0], theta));
        let opts = ApproxOptions { n_starts: 6, seed: 2, ..Default::default() };
        let r = honest_approximation(&e, Basis::Pauli(1), &opts).unwrap();
        assert!(r.honest);
        let w = &r.channel.weights;
        assert!((w[3] - 0.05).abs() < 1e-4, "{w:?}");
        let check = diamond_distance(&r.channel.to_channel(), &e).unwrap();
        assert!((check - r.objective).abs() < 1e-6);
    }

    #[test]
    fn feasible_start_for_strong_dephasing() {
        let e = Channel::dephasing(0.9);
        for k in 0..5 {
            let p = feasible_start(&e, Basis::Pauli(1), 3, k).unwrap();
            let l = Landscape::new(&e, Basis::Pauli(1)).unwrap();
            assert!(l.feasible(&p));
        }
        let a = feasible_start(&e, Basis::Pauli(1), 3, 0).unwrap();
        let b = feasible_start(&e, Basis::Pauli(1), 3, 0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn certificate_derivatives_match_finite_difference() {
        let e = Channel::amplitude_damping(0.05);
        let l = Landscape::new(&e, Basis::Pauli(1)).unwrap();
        let p = vec![0.9, 0.03, 0.03, 0.04];
        let a0 = l.certificate(&p).unwrap().a;
        let deriv = l.derivatives(&p);
        let h = 1e-6;
        for i in 0..4 {
            let mut q = p.clone();
            q[i] += h;
            let fd = (l.certificate(&q).unwrap().a - &a0) / h;
            assert!((fd - &deriv[i]).amax() < 1e-5, "{i}");
        }
    }

    #[test]
    fn linearised_certificate_is_a_lower_bound() {
        let e = Channel::unitary(&rotation([0.3, 0.1, 1.0], 0.2));
        let l = Landscape::new(&e, Basis::Pauli(1)).unwrap();
        let p = vec![0.95, 0.01, 0.01, 0.03];
        let q = vec![0.7, 0.1, 0.05, 0.15];
        let deriv = l.derivatives(&p);
        let mut lin = l.certificate(&p).unwrap().a;
        for i in 0..4 {
            lin += &deriv[i] * (q[i] - p[i]);
        }
        let gap = l.certificate(&q).unwrap().a - lin;
        assert!(crate::linalg::eigh_real(&gap).0[0] > -1e-14);
    }

    #[test]
    fn every_step_stays_honest_and_descends() {
        let e = crate::channel::compose(&Channel::unitary(&rotation([0.0, 0.0, 1.0], 0.1)), &Channel::amplitude_damping(0.02)).unwrap();
        let l = Landscape::new(&e, Basis::Pauli(1)).unwrap();
        let mut p = feasible_start(&e, Basis::Pauli(1), 5, 0).unwrap();
        let mut f = l.objective(&p).unwrap();
        for _ in 0..5 {
            let (q, value) = l.step(&p).unwrap();
            assert!(l.feasible(&q));
            let exact = l.objective(&q).unwrap();
            assert!((exact - value).abs() < 1e-7 * (1.0 + exact));
            assert!(exact <= f + 1e-9);
            p = q;
            f = exact;
        }
    }
}
