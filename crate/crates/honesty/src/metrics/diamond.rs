//! Diamond norm of a linear map given as a column-stacking superoperator.
//!
//! Hermiticity-preserving maps use
//!   min s  s.t.  s·I ⪰ Tr_out Y,  Y ⪰ J,  Y ⪰ -J
//! and general maps use
//!   min (s0 + s1)/2  s.t.  s_i·I ⪰ Tr_out Y_i,  [[Y0, -J], [-J†, Y1]] ⪰ 0,
//! where J is the Choi matrix with input ⊗ output ordering.

use super::sdp::{self, Entry, Options, Problem};
use crate::channel::{Channel, ChoiMatrix};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, C64, I, ONE};

const HP_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct DiamondResult {
    pub value: f64,
    pub gap: f64,
    pub iterations: usize,
    /// W = X₂ - X₃ from the primal optimum, so that value = Re Tr(J W).
    /// Present for Hermiticity-preserving maps; gives a supergradient in J.
    pub witness: Option<CMat>,
}

pub fn choi_of(superop: &CMat) -> Result<ChoiMatrix> {
    let d2 = superop.nrows();
    if superop.ncols() != d2 || !d2.is_power_of_two() || d2.trailing_zeros() % 2 != 0 {
        return Err(Error::validation(format!("superoperator of size {d2} is not 4^n square")));
    }
    let n = (d2.trailing_zeros() / 2) as usize;
    Ok(Channel::from_superop(n, superop.clone()).to_choi())
}

/// Real parameterisation of D×D Hermitian matrices as sparse generators.
pub(crate) fn hermitian_generators(dim: usize) -> Vec<Vec<(usize, usize, C64)>> {
    let mut out = Vec::with_capacity(dim * dim);
    for a in 0..dim {
        out.push(vec![(a, a, ONE)]);
        for b in a + 1..dim {
            out.push(vec![(a, b, ONE), (b, a, ONE)]);
            out.push(vec![(a, b, I), (b, a, -I)]);
        }
    }
    out
}

/// Partial trace over the output factor applied to a sparse generator.
pub(crate) fn trace_out(gen: &[(usize, usize, C64)], d: usize) -> Vec<(usize, usize, C64)> {
    gen.iter()
        .filter(|(a, b, _)| a % d == b % d)
        .map(|&(a, b, v)| (a / d, b / d, v))
        .collect()
}

pub(crate) fn entries(block: usize, gen: &[(usize, usize, C64)], sign: f64, offset: usize) -> impl Iterator<Item = Entry> + '_ {
    gen.iter().map(move |&(r, k, v)| Entry { block, row: r + offset, col: k + offset, val: v * sign })
}

fn hp_problem(j: &CMat, d: usize) -> Problem {
    let dd = d * d;
    let mut a = Vec::with_capacity(dd * dd + 1);
    a.push((0..d).map(|i| Entry { block: 0, row: i, col: i, val: -ONE }).collect());
    for g in hermitian_generators(dd) {
        let tr = trace_out(&g, d);
        let mut ak: Vec<Entry> = entries(0, &tr, 1.0, 0).collect();
        ak.extend(entries(1, &g, -1.0, 0));
        ak.extend(entries(2, &g, -1.0, 0));
        a.push(ak);
    }
    let mut b = vec![0.0; a.len()];
    b[0] = -1.0;
    Problem { blocks: vec![d, dd, dd], c: vec![CMat::zeros(d, d), -j.clone(), j.clone()], a, b }
}

fn general_problem(j: &CMat, d: usize) -> Problem {
    let dd = d * d;
    let mut a = Vec::with_capacity(2 * dd * dd + 2);
    for blk in 0..2 {
        a.push((0..d).map(|i| Entry { block: blk, row: i, col: i, val: -ONE }).collect());
    }
    for blk in 0..2 {
        for g in hermitian_generators(dd) {
            let tr = trace_out(&g, d);
            let mut ak: Vec<Entry> = entries(blk, &tr, 1.0, 0).collect();
            ak.extend(entries(2, &g, -1.0, blk * dd));
            a.push(ak);
        }
    }
    let mut b = vec![0.0; a.len()];
    b[0] = -0.5;
    b[1] = -0.5;
    let mut c3 = CMat::zeros(2 * dd, 2 * dd);
    c3.view_mut((0, dd), (dd, dd)).copy_from(&(-j));
    c3.view_mut((dd, 0), (dd, dd)).copy_from(&(-j.adjoint()));
    Problem { blocks: vec![d, d, 2 * dd], c: vec![CMat::zeros(d, d), CMat::zeros(d, d), c3], a, b }
}

pub fn diamond_norm_with(superop: &CMat, opts: &Options) -> Result<DiamondResult> {
    let j = choi_of(superop)?.j;
    let d = (superop.nrows() as f64).sqrt().round() as usize;
    let scale = linalg::frobenius(&j);
    if scale < 1e-14 {
        return Ok(DiamondResult { value: 0.0, gap: 0.0, iterations: 0, witness: Some(CMat::zeros(d * d, d * d)) });
    }
    let jn = &j * c(1.0 / scale, 0.0);
    let hp = linalg::max_abs_diff(&jn, &jn.adjoint()) < HP_TOL;
    if hp {
        let jn = linalg::hermitian_part(&jn);
        let sol = sdp::solve(&hp_problem(&jn, d), opts)?;
        let w = &sol.x[1] - &sol.x[2];
        let primal_value = linalg::hs_inner(&jn, &w).re;
        let dual_value = -sol.dual;
        log::trace!("diamond SDP: {} iterations, gap {:.2e}", sol.iterations, sol.gap);
        Ok(DiamondResult {
            value: 0.5 * (primal_value + dual_value) * scale,
            gap: sol.gap,
            iterations: sol.iterations,
            witness: Some(w),
        })
    } else {
        let sol = sdp::solve(&general_problem(&jn, d), opts)?;
        Ok(DiamondResult { value: -0.5 * (sol.primal + sol.dual) * scale, gap: sol.gap, iterations: sol.iterations, witness: None })
    }
}

pub fn diamond_norm(superop: &CMat) -> Result<DiamondResult> {
    diamond_norm_with(superop, &Options::default())
}

pub fn diamond_distance(a: &Channel, b: &Channel) -> Result<f64> {
    if a.n_qubits != b.n_qubits {
        return Err(Error::Dimension { expected: a.n_qubits, got: b.n_qubits });
    }
    Ok(diamond_norm(&(&a.superop - &b.superop))?.value)
}
