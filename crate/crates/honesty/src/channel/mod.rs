//! Quantum channels on n qubits.
//!
//! The canonical form is the column-stacking superoperator, where
//! vec(|i><j|) = |j> ⊗ |i> and a Kraus set {A} maps to Σ conj(A) ⊗ A.
//! Choi, χ, Bloch and Kraus forms are views computed on demand.

pub mod io;
pub mod local;
pub mod pauli;

use crate::error::{Error, Result};
use crate::linalg::{self, c, eigh, CMat, CVec, RMat, ONE, ZERO};
use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

pub use local::apply_local;

pub const TP_TOL: f64 = 1e-8;
pub const CP_TOL: f64 = 1e-8;
pub const KRAUS_CUTOFF: f64 = 1e-12;
pub const CLAMP_FLOOR: f64 = -1e-6;

fn dim_of(n: usize) -> usize {
    1usize << n
}

fn qubits_of(d: usize) -> Result<usize> {
    if d.is_power_of_two() && d > 0 {
        Ok(d.trailing_zeros() as usize)
    } else {
        Err(Error::validation(format!("dimension {d} is not a power of two")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    pub n_qubits: usize,
    pub rho: CMat,
}

impl DensityMatrix {
    pub fn new(rho: CMat) -> Result<Self> {
        let n_qubits = qubits_of(rho.nrows())?;
        if rho.nrows() != rho.ncols() {
            return Err(Error::validation("density matrix must be square"));
        }
        let herm = linalg::max_abs_diff(&rho, &rho.adjoint());
        if herm > 1e-10 {
            return Err(Error::validation(format!("density matrix not Hermitian ({herm:.2e})")));
        }
        let tr = linalg::trace(&rho);
        if (tr - ONE).norm() > 1e-10 {
            return Err(Error::validation(format!("density matrix trace {tr} != 1")));
        }
        let min = linalg::eigvalsh(&rho)[0];
        if min < -1e-10 {
            return Err(Error::validation(format!("density matrix eigenvalue {min:.2e} < 0")));
        }
        Ok(DensityMatrix { n_qubits, rho })
    }

    pub fn from_matrix_unchecked(rho: CMat) -> Self {
        let n_qubits = rho.nrows().trailing_zeros() as usize;
        DensityMatrix { n_qubits, rho }
    }

    pub fn pure(ket: &CVec) -> Self {
        Self::from_matrix_unchecked(ket * ket.adjoint())
    }

    pub fn basis_state(n: usize, k: usize) -> Self {
        let mut v = CVec::zeros(dim_of(n));
        v[k] = ONE;
        Self::pure(&v)
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }
}

/// Haar-random ket: a normalised vector of i.i.d. complex Gaussians.
pub fn random_ket<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> CVec {
    let d = dim_of(n_qubits);
    let mut v = CVec::from_fn(d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im)
    });
    let norm = v.norm();
    v /= c(norm, 0.0);
    v
}

/// Haar-random unitary from the QR decomposition of a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im)
    });
    let (q, r) = g.qr().unpack();
    let phases = CMat::from_diagonal(&CVec::from_iterator(
        d,
        (0..d).map(|k| {
            let z = r[(k, k)];
            if z.norm() > 0.0 { z / z.norm() } else { ONE }
        }),
    ));
    q * phases
}

pub fn random_pure_state<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> DensityMatrix {
    DensityMatrix::pure(&random_ket(n_qubits, rng))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    pub n_qubits: usize,
    pub superop: CMat,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix {
    pub n_qubits: usize,
    pub j: CMat,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChiMatrix {
    pub n_qubits: usize,
    pub chi: CMat,
}

/// Affine action on generalised Bloch vectors r_i = Tr(P_i ρ):
/// M_ij = Tr(P_i Λ(P_j)) / 2^n and t_i = Tr(P_i Λ(I)) / 2^n over non-identity Paulis.
#[derive(Clone, Debug, PartialEq)]
pub struct BlochRep {
    pub n_qubits: usize,
    pub m: RMat,
    pub t: DVector<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolarParts {
    pub o: RMat,
    pub p: RMat,
    pub t: DVector<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Choi,
    Chi,
    Bloch,
    Kraus,
}

#[derive(Clone, Debug)]
pub enum Representation {
    Choi(ChoiMatrix),
    Chi(ChiMatrix),
    Bloch(BlochRep),
    Kraus(Vec<CMat>),
}

impl Channel {
    pub fn from_superop(n_qubits: usize, superop: CMat) -> Self {
        debug_assert_eq!(superop.nrows(), 1 << (2 * n_qubits));
        Channel { n_qubits, superop }
    }

    /// Superoperator read from external data: checked for TP and CP.
    pub fn from_superop_checked(n_qubits: usize, superop: CMat) -> Result<Self> {
        let d2 = 1usize << (2 * n_qubits);
        if superop.nrows() != d2 || superop.ncols() != d2 {
            return Err(Error::Dimension { expected: d2, got: superop.nrows() });
        }
        let ch = Channel { n_qubits, superop };
        ch.validate()?;
        Ok(ch)
    }

    pub fn identity(n_qubits: usize) -> Self {
        let d2 = 1usize << (2 * n_qubits);
        Channel { n_qubits, superop: CMat::identity(d2, d2) }
    }

    pub fn unitary(u: &CMat) -> Self {
        let n_qubits = u.nrows().trailing_zeros() as usize;
        Channel { n_qubits, superop: linalg::kron(&u.conjugate(), u) }
    }

    pub fn pauli(k: usize, n_qubits: usize) -> Self {
        Self::unitary(&pauli::operator(k, n_qubits))
    }

    /// Σ p_k P_k ρ P_k over the n-qubit Pauli basis.
    pub fn pauli_channel(probs: &[f64]) -> Self {
        let n_qubits = (probs.len().trailing_zeros() / 2) as usize;
        let d2 = probs.len();
        let mut s = CMat::zeros(d2, d2);
        for (k, &p) in probs.iter().enumerate() {
            if p != 0.0 {
                s += Self::pauli(k, n_qubits).superop * c(p, 0.0);
            }
        }
        Channel { n_qubits, superop: s }
    }

    pub fn dephasing(p: f64) -> Self {
        Self::pauli_channel(&[1.0 - p, 0.0, 0.0, p])
    }

    pub fn depolarizing(p: f64, n_qubits: usize) -> Self {
        let d2 = 1usize << (2 * n_qubits);
        let mut probs = vec![p / d2 as f64; d2];
        probs[0] += 1.0 - p;
        Self::pauli_channel(&probs)
    }

    pub fn amplitude_damping(gamma: f64) -> Self {
        let k1 = CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, c((1.0 - gamma).sqrt(), 0.0)]);
        let k2 = CMat::from_row_slice(2, 2, &[ZERO, c(gamma.sqrt(), 0.0), ZERO, ZERO]);
        kraus_to_channel(&[k1, k2]).expect("amplitude damping Kraus set is TP")
    }

    pub fn dim(&self) -> usize {
        dim_of(self.n_qubits)
    }

    pub fn apply(&self, rho: &DensityMatrix) -> DensityMatrix {
        let v = &self.superop * linalg::vec_col(&rho.rho);
        DensityMatrix::from_matrix_unchecked(linalg::unvec_col(&v, rho.dim()))
    }

    pub fn apply_matrix(&self, m: &CMat) -> CMat {
        let v = &self.superop * linalg::vec_col(m);
        linalg::unvec_col(&v, m.nrows())
    }

    /// Norm of (Λ†(I) - I), zero exactly when the map is trace preserving.
    pub fn tp_deficit(&self) -> f64 {
        let d = self.dim();
        let id = linalg::vec_col(&linalg::eye(d));
        let dual = self.superop.adjoint() * &id;
        (dual - id).norm()
    }

    pub fn min_choi_eigenvalue(&self) -> f64 {
        linalg::eigvalsh(&self.to_choi().j)[0]
    }

    pub fn validate(&self) -> Result<()> {
        let deficit = self.tp_deficit();
        if deficit > TP_TOL {
            return Err(Error::NotTracePreserving { deficit });
        }
        let min_eig = self.min_choi_eigenvalue();
        if min_eig < -CP_TOL {
            return Err(Error::NotCompletelyPositive { min_eig });
        }
        Ok(())
    }

    pub fn to_choi(&self) -> ChoiMatrix {
        let d = self.dim();
        let s = &self.superop;
        let j = CMat::from_fn(d * d, d * d, |row, col| {
            let (i, ip) = (row / d, row % d);
            let (jj, jp) = (col / d, col % d);
            s[(jp * d + ip, jj * d + i)]
        });
        ChoiMatrix { n_qubits: self.n_qubits, j }
    }

    pub fn from_choi(choi: &ChoiMatrix) -> Self {
        let d = dim_of(choi.n_qubits);
        let j = &choi.j;
        let s = CMat::from_fn(d * d, d * d, |row, col| {
            let (jp, ip) = (row / d, row % d);
            let (jj, i) = (col / d, col % d);
            j[(i * d + ip, jj * d + jp)]
        });
        Channel { n_qubits: choi.n_qubits, superop: s }
    }

    /// Pauli transfer matrix R_ij = Tr(P_i Λ(P_j)) / 2^n, real for Hermiticity-preserving maps.
    pub fn ptm(&self) -> RMat {
        let d = self.dim();
        let basis = pauli_vecs(self.n_qubits);
        let sv = &self.superop * &basis;
        let r = basis.adjoint() * sv / c(d as f64, 0.0);
        r.map(|z| z.re)
    }

    pub fn from_ptm(n_qubits: usize, r: &RMat) -> Self {
        let d = dim_of(n_qubits);
        let basis = pauli_vecs(n_qubits);
        let rc = r.map(|x| c(x, 0.0));
        let s = &basis * rc * basis.adjoint() / c(d as f64, 0.0);
        Channel { n_qubits, superop: s }
    }

    pub fn to_bloch(&self) -> BlochRep {
        let r = self.ptm();
        let k = r.nrows() - 1;
        BlochRep {
            n_qubits: self.n_qubits,
            m: r.view((1, 1), (k, k)).into_owned(),
            t: r.view((1, 0), (k, 1)).column(0).into_owned(),
        }
    }

    pub fn from_bloch(b: &BlochRep) -> Self {
        let k = b.m.nrows();
        let mut r = RMat::zeros(k + 1, k + 1);
        r[(0, 0)] = 1.0;
        r.view_mut((1, 1), (k, k)).copy_from(&b.m);
        r.view_mut((1, 0), (k, 1)).copy_from(&b.t);
        Self::from_ptm(b.n_qubits, &r)
    }

    /// χ_kl with Λ(ρ) = Σ χ_kl P_k ρ P_l.
    pub fn to_chi(&self) -> ChiMatrix {
        let d = self.dim() as f64;
        let w = pauli_vecs(self.n_qubits);
        let chi = w.adjoint() * &self.to_choi().j * &w / c(d * d, 0.0);
        ChiMatrix { n_qubits: self.n_qubits, chi }
    }

    pub fn from_chi(chi: &ChiMatrix) -> Self {
        let w = pauli_vecs(chi.n_qubits);
        let j = &w * &chi.chi * w.adjoint();
        Self::from_choi(&ChoiMatrix { n_qubits: chi.n_qubits, j })
    }

    pub fn chi00(&self) -> f64 {
        self.to_chi().chi[(0, 0)].re
    }

    /// Kraus operators from the Choi eigendecomposition, dropping eigenvalues below 1e-12.
    pub fn to_kraus(&self) -> Result<Vec<CMat>> {
        let d = self.dim();
        let (vals, vecs) = eigh(&self.to_choi().j);
        if vals[0] < -CP_TOL {
            return Err(Error::NotCompletelyPositive { min_eig: vals[0] });
        }
        let mut ops = Vec::new();
        for (k, &lam) in vals.iter().enumerate().rev() {
            if lam <= KRAUS_CUTOFF {
                continue;
            }
            let v: CVec = vecs.column(k) * c(lam.sqrt(), 0.0);
            ops.push(linalg::unvec_col(&v, d));
        }
        Ok(ops)
    }

    pub fn convert(&self, target: Target) -> Result<Representation> {
        Ok(match target {
            Target::Choi => Representation::Choi(self.to_choi()),
            Target::Chi => Representation::Chi(self.to_chi()),
            Target::Bloch => Representation::Bloch(self.to_bloch()),
            Target::Kraus => Representation::Kraus(self.to_kraus()?),
        })
    }

    /// Clamp small negative Choi eigenvalues in [-1e-6, 0) to zero and restore trace preservation.
    pub fn clamp_cp(&self) -> Result<(Channel, f64)> {
        let choi = self.to_choi();
        let (vals, vecs) = eigh(&choi.j);
        let min_eig = vals[0];
        if min_eig >= 0.0 {
            return Ok((self.clone(), min_eig));
        }
        if min_eig < CLAMP_FLOOR {
            return Err(Error::NotCompletelyPositive { min_eig });
        }
        let d = self.dim();
        let clipped = CMat::from_diagonal(&DVector::from_iterator(
            vals.len(),
            vals.iter().map(|&v| c(v.max(0.0), 0.0)),
        ));
        let j = &vecs * clipped * vecs.adjoint();
        // Renormalise with T^{-1/2} on the input side, where T = Tr_out J.
        let t = partial_trace_out(&j, d);
        let (tv, tu) = eigh(&t);
        let inv_sqrt = CMat::from_diagonal(&DVector::from_iterator(
            d,
            tv.iter().map(|&v| c(1.0 / v.max(1e-300).sqrt(), 0.0)),
        ));
        let fix = &tu * inv_sqrt * tu.adjoint();
        let fix_full = linalg::kron(&fix.transpose(), &linalg::eye(d));
        let j = &fix_full * j * &fix_full;
        let ch = Channel::from_choi(&ChoiMatrix { n_qubits: self.n_qubits, j });
        if min_eig < -1e-12 {
            log::warn!("clamped Choi eigenvalue {min_eig:.3e} to zero");
        } else {
            log::debug!("clamped Choi eigenvalue {min_eig:.3e} to zero");
        }
        Ok((ch, min_eig))
    }

    pub fn is_unitary_channel(&self, tol: f64) -> bool {
        let vals = linalg::eigvalsh(&self.to_choi().j);
        let d = self.dim() as f64;
        let top = *vals.last().unwrap();
        (top - d).abs() < tol && vals[..vals.len() - 1].iter().all(|v| v.abs() < tol)
    }
}

/// Tr over the output factor of a Choi matrix (input ⊗ output ordering).
pub fn partial_trace_out(j: &CMat, d: usize) -> CMat {
    CMat::from_fn(d, d, |i, k| (0..d).map(|o| j[(i * d + o, k * d + o)]).sum())
}

/// Columns are vec(P_k) for the n-qubit Pauli basis.
fn pauli_vecs(n: usize) -> CMat {
    let k = 1usize << (2 * n);
    let mut w = CMat::zeros(k, k);
    for idx in 0..k {
        let p = pauli::operator(idx, n);
        w.set_column(idx, &linalg::vec_col(&p));
    }
    w
}

pub fn kraus_to_channel(kraus_ops: &[CMat]) -> Result<Channel> {
    let first = kraus_ops.first().ok_or_else(|| Error::validation("empty Kraus set"))?;
    let d = first.nrows();
    let n_qubits = qubits_of(d)?;
    let mut gram = CMat::zeros(d, d);
    let mut s = CMat::zeros(d * d, d * d);
    for a in kraus_ops {
        if a.nrows() != d || a.ncols() != d {
            return Err(Error::Dimension { expected: d, got: a.nrows() });
        }
        gram += a.adjoint() * a;
        s += linalg::kron(&a.conjugate(), a);
    }
    let deficit = linalg::frobenius(&(gram - linalg::eye(d)));
    if deficit > TP_TOL {
        return Err(Error::NotTracePreserving { deficit });
    }
    Ok(Channel { n_qubits, superop: s })
}

/// `a` after `b`.
pub fn compose(a: &Channel, b: &Channel) -> Result<Channel> {
    if a.n_qubits != b.n_qubits {
        return Err(Error::Dimension { expected: a.n_qubits, got: b.n_qubits });
    }
    Ok(Channel { n_qubits: a.n_qubits, superop: &a.superop * &b.superop })
}

/// a ⊗ b with `a` acting on the leading qubits.
pub fn tensor(a: &Channel, b: &Channel) -> Channel {
    let (da, db) = (a.dim(), b.dim());
    let d = da * db;
    let mut s = CMat::zeros(d * d, d * d);
    for jp in 0..d {
        for ip in 0..d {
            let row = jp * d + ip;
            let ra = (jp / db) * da + ip / db;
            let rb = (jp % db) * db + ip % db;
            for j in 0..d {
                for i in 0..d {
                    let ca = (j / db) * da + i / db;
                    let cb = (j % db) * db + i % db;
                    s[(row, j * d + i)] = a.superop[(ra, ca)] * b.superop[(rb, cb)];
                }
            }
        }
    }
    Channel { n_qubits: a.n_qubits + b.n_qubits, superop: s }
}

pub fn polar_decompose(b: &BlochRep) -> PolarParts {
    let svd = b.m.clone().svd(true, true);
    let u = svd.u.expect("svd u");
    let vt = svd.v_t.expect("svd v_t");
    let sigma = RMat::from_diagonal(&svd.singular_values);
    PolarParts { o: &u * &vt, p: vt.transpose() * sigma * &vt, t: b.t.clone() }
}

impl ChiMatrix {
    pub fn diagonal(&self) -> Vec<f64> {
        self.chi.diagonal().iter().map(|z| z.re).collect()
    }
}
