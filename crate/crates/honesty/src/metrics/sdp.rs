//! Primal-dual interior-point solver for block-diagonal complex Hermitian SDPs.
//!
//! Primal:  min Re<C, X>  s.t.  Re<A_k, X> = b_k,  X ⪰ 0
//! Dual:    max bᵀy       s.t.  Σ y_k A_k + Z = C,  Z ⪰ 0
//!
//! Search directions are HKM with Mehrotra predictor-corrector steps. Constraint
//! matrices are sparse, so the Schur complement is assembled entry by entry.

use crate::error::{Error, Result};
use crate::linalg::{c, eigvalsh, CMat, ZERO};
use nalgebra::{DMatrix, DVector};

const DENSE_ENTRIES: usize = 32;

/// One nonzero A[row, col] = val inside `block`.
#[derive(Clone, Copy, Debug)]
pub struct Entry {
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub val: crate::linalg::C64,
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub blocks: Vec<usize>,
    pub c: Vec<CMat>,
    pub a: Vec<Vec<Entry>>,
    pub b: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct Options {
    pub max_iter: usize,
    pub gap_target: f64,
    pub gap_accept: f64,
    pub step_fraction: f64,
}

impl Default for Options {
    fn default() -> Self {
        Options { max_iter: 200, gap_target: 1e-8, gap_accept: 1e-7, step_fraction: 0.98 }
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub x: Vec<CMat>,
    pub y: Vec<f64>,
    pub z: Vec<CMat>,
    pub primal: f64,
    pub dual: f64,
    /// Relative duality gap |p - d| / (1 + |p| + |d|).
    pub gap: f64,
    pub infeasibility: f64,
    pub iterations: usize,
}

fn inner(a: &[CMat], b: &[CMat]) -> f64 {
    a.iter().zip(b).map(|(x, y)| crate::linalg::hs_inner(x, y).re).sum()
}

fn norm(a: &[CMat]) -> f64 {
    inner(a, a).sqrt()
}

fn herm(m: CMat) -> CMat {
    (&m + m.adjoint()) * c(0.5, 0.0)
}

impl Problem {
    pub fn n_constraints(&self) -> usize {
        self.b.len()
    }

    /// 𝒜(X)_k = Re Tr(A_k X).
    fn op(&self, x: &[CMat]) -> DVector<f64> {
        DVector::from_iterator(
            self.a.len(),
            self.a.iter().map(|ak| ak.iter().map(|e| (e.val * x[e.block][(e.col, e.row)]).re).sum::<f64>()),
        )
    }

    /// 𝒜*(y) = Σ y_k A_k.
    fn adjoint(&self, y: &DVector<f64>) -> Vec<CMat> {
        let mut out: Vec<CMat> = self.blocks.iter().map(|&d| CMat::zeros(d, d)).collect();
        for (k, ak) in self.a.iter().enumerate() {
            if y[k] == 0.0 {
                continue;
            }
            for e in ak {
                out[e.block][(e.row, e.col)] += e.val * y[k];
            }
        }
        out
    }

    /// M_kl = Re Tr(A_k X A_l Z⁻¹). Constraints with many entries are handled by
    /// forming X A_l Z⁻¹ once per block; sparse pairs use entry products.
    fn schur(&self, x: &[CMat], zinv: &[CMat]) -> DMatrix<f64> {
        let m = self.a.len();
        let dense: Vec<bool> = self
            .a
            .iter()
            .map(|ak| ak.len() > DENSE_ENTRIES && ak.len() * 4 > self.blocks.iter().copied().max().unwrap_or(0))
            .collect();
        let mut out = DMatrix::zeros(m, m);
        for l in (0..m).filter(|&l| dense[l]) {
            let mut t: Vec<Option<CMat>> = vec![None; self.blocks.len()];
            let mut al: Vec<Option<CMat>> = vec![None; self.blocks.len()];
            for f in &self.a[l] {
                let d = self.blocks[f.block];
                al[f.block].get_or_insert_with(|| CMat::zeros(d, d))[(f.row, f.col)] += f.val;
            }
            for (bi, a) in al.into_iter().enumerate() {
                if let Some(a) = a {
                    t[bi] = Some(&x[bi] * a * &zinv[bi]);
                }
            }
            for k in 0..m {
                let mut acc = ZERO;
                for e in &self.a[k] {
                    if let Some(tb) = &t[e.block] {
                        acc += e.val * tb[(e.col, e.row)];
                    }
                }
                out[(k, l)] = acc.re;
                out[(l, k)] = acc.re;
            }
        }
        for k in (0..m).filter(|&k| !dense[k]) {
            for l in (k..m).filter(|&l| !dense[l]) {
                let mut acc = ZERO;
                for e in &self.a[k] {
                    let (xb, zb) = (&x[e.block], &zinv[e.block]);
                    for f in &self.a[l] {
                        if f.block == e.block {
                            acc += e.val * f.val * xb[(e.col, f.row)] * zb[(f.col, e.row)];
                        }
                    }
                }
                out[(k, l)] = acc.re;
                out[(l, k)] = acc.re;
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.c.len() != self.blocks.len() || self.a.len() != self.b.len() {
            return Err(Error::validation("SDP data has inconsistent sizes"));
        }
        for (k, ak) in self.a.iter().enumerate() {
            for e in ak {
                if e.block >= self.blocks.len() || e.row >= self.blocks[e.block] || e.col >= self.blocks[e.block] {
                    return Err(Error::validation(format!("constraint {k} entry out of range")));
                }
            }
        }
        Ok(())
    }
}

fn solve_spd(m: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    if let Some(ch) = m.clone().cholesky() {
        return Ok(ch.solve(rhs));
    }
    if let Some(x) = m.clone().lu().solve(rhs) {
        if x.iter().all(|v| v.is_finite()) {
            return Ok(x);
        }
    }
    let shift = 1e-13 * m.diagonal().amax().max(1e-300);
    let reg = m + DMatrix::identity(m.nrows(), m.ncols()) * shift;
    reg.cholesky().map(|ch| ch.solve(rhs)).ok_or_else(|| Error::validation("singular Schur complement"))
}

fn inverse_hpd(m: &CMat) -> Result<CMat> {
    match m.clone().cholesky() {
        Some(ch) => Ok(herm(ch.inverse())),
        None => m.clone().try_inverse().map(herm).ok_or_else(|| Error::validation("singular iterate")),
    }
}

/// Largest α ≤ 1 keeping every block of X + αΔX positive semidefinite.
fn max_step(x: &[CMat], dx: &[CMat]) -> f64 {
    let mut alpha: f64 = 1.0;
    for (xb, db) in x.iter().zip(dx) {
        let l = match xb.clone().cholesky() {
            Some(ch) => ch.unpack(),
            None => return 0.0,
        };
        let linv = l.try_inverse().expect("triangular factor is invertible");
        let s = &linv * db * linv.adjoint();
        let lmin = eigvalsh(&s)[0];
        if lmin < 0.0 {
            alpha = alpha.min(-1.0 / lmin);
        }
    }
    alpha
}

fn axpy(x: &[CMat], a: f64, d: &[CMat]) -> Vec<CMat> {
    x.iter().zip(d).map(|(xb, db)| xb + db * c(a, 0.0)).collect()
}

pub fn solve(p: &Problem, opts: &Options) -> Result<Solution> {
    p.validate()?;
    let n: usize = p.blocks.iter().sum();
    let b = DVector::from_vec(p.b.clone());
    let norm_b = b.norm();
    let norm_c = norm(&p.c);
    let scale = 10f64.max(norm_c.sqrt()).max(norm_b.sqrt());
    let mut x: Vec<CMat> = p.blocks.iter().map(|&d| CMat::identity(d, d) * c(scale, 0.0)).collect();
    let mut z = x.clone();
    let mut y = DVector::zeros(p.n_constraints());
    let mut last = (f64::INFINITY, f64::INFINITY);

    for iter in 0..opts.max_iter {
        let ay = p.adjoint(&y);
        let rd: Vec<CMat> = p.c.iter().zip(&z).zip(&ay).map(|((cb, zb), ab)| cb - zb - ab).collect();
        let rp = &b - p.op(&x);
        let primal = inner(&p.c, &x);
        let dual = b.dot(&y);
        let gap = (primal - dual).abs() / (1.0 + primal.abs() + dual.abs());
        let infeas = (rp.norm() / (1.0 + norm_b)).max(norm(&rd) / (1.0 + norm_c));
        last = (gap, infeas);
        if gap < opts.gap_target && infeas < opts.gap_target {
            return Ok(Solution { x, y: y.iter().copied().collect(), z, primal, dual, gap, infeasibility: infeas, iterations: iter });
        }
        let mu = inner(&x, &z) / n as f64;
        let Ok(zinv) = z.iter().map(inverse_hpd).collect::<Result<Vec<CMat>>>() else {
            log::debug!("SDP stopped at iteration {iter}: singular dual iterate");
            break;
        };
        let m = p.schur(&x, &zinv);
        let a_zinv = p.op(&zinv);
        let xrz: Vec<CMat> = x.iter().zip(&rd).zip(&zinv).map(|((xb, rb), zb)| xb * rb * zb).collect();
        let a_xrz = p.op(&xrz);

        let direction = |rhs: DVector<f64>, sigma_mu: f64, corr: Option<&[CMat]>| -> Result<(DVector<f64>, Vec<CMat>, Vec<CMat>)> {
            let dy = solve_spd(&m, &rhs)?;
            let ady = p.adjoint(&dy);
            let dz: Vec<CMat> = rd.iter().zip(&ady).map(|(r, a)| r - a).collect();
            let dx: Vec<CMat> = (0..x.len())
                .map(|i| {
                    let mut t = &zinv[i] * c(sigma_mu, 0.0) - &x[i] - &x[i] * &dz[i] * &zinv[i];
                    if let Some(cr) = corr {
                        t -= &cr[i];
                    }
                    herm(t)
                })
                .collect();
            Ok((dy, dx, dz))
        };

        // Predictor.
        let Ok((_, dxa, dza)) = direction(&b + &a_xrz, 0.0, None) else {
            log::debug!("SDP stopped at iteration {iter}: singular Schur complement");
            break;
        };
        let ap = (opts.step_fraction * max_step(&x, &dxa)).min(1.0);
        let ad = (opts.step_fraction * max_step(&z, &dza)).min(1.0);
        let mu_aff = inner(&axpy(&x, ap, &dxa), &axpy(&z, ad, &dza)) / n as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // Corrector.
        let corr: Vec<CMat> = (0..x.len()).map(|i| &dxa[i] * &dza[i] * &zinv[i]).collect();
        let a_corr = p.op(&corr);
        let rhs = &b - &a_zinv * (sigma * mu) + &a_xrz + a_corr;
        let Ok((dy, dx, dz)) = direction(rhs, sigma * mu, Some(&corr)) else {
            log::debug!("SDP stopped at iteration {iter}: singular Schur complement");
            break;
        };
        let ap = (opts.step_fraction * max_step(&x, &dx)).min(1.0);
        let ad = (opts.step_fraction * max_step(&z, &dz)).min(1.0);
        if ap <= 0.0 || ad <= 0.0 {
            break;
        }
        x = axpy(&x, ap, &dx);
        z = axpy(&z, ad, &dz);
        y += dy * ad;
    }

    let primal = inner(&p.c, &x);
    let dual = b.dot(&y);
    let (gap, infeas) = last;
    if gap < opts.gap_accept && infeas < opts.gap_accept {
        log::debug!("SDP accepted at relaxed tolerance: gap {gap:.2e}, infeasibility {infeas:.2e}");
        return Ok(Solution { x, y: y.iter().copied().collect(), z, primal, dual, gap, infeasibility: infeas, iterations: opts.max_iter });
    }
    Err(Error::NonConvergence { iterations: opts.max_iter, gap: gap.max(infeas) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, ONE};

    fn e(block: usize, row: usize, col: usize, val: f64) -> Entry {
        Entry { block, row, col, val: c(val, 0.0) }
    }

    #[test]
    fn smallest_eigenvalue_as_sdp() {
        // min <C, X> s.t. Tr X = 1 gives λ_min(C).
        let cm = CMat::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(3.0, 0.0)]);
        let p = Problem { blocks: vec![2], c: vec![cm.clone()], a: vec![vec![e(0, 0, 0, 1.0), e(0, 1, 1, 1.0)]], b: vec![1.0] };
        let sol = solve(&p, &Options::default()).unwrap();
        let expect = 2.5 - 1.25f64.sqrt();
        assert!((sol.primal - expect).abs() < 1e-7, "{} vs {expect}", sol.primal);
        assert!((sol.dual - expect).abs() < 1e-7);
    }

    #[test]
    fn linear_program_in_diagonal_blocks() {
        // min x1 + 2 x2 s.t. x1 + x2 = 1, x ≥ 0 → 1.
        let p = Problem {
            blocks: vec![1, 1],
            c: vec![CMat::from_element(1, 1, ONE), CMat::from_element(1, 1, c(2.0, 0.0))],
            a: vec![vec![e(0, 0, 0, 1.0), e(1, 0, 0, 1.0)]],
            b: vec![1.0],
        };
        let sol = solve(&p, &Options::default()).unwrap();
        assert!((sol.primal - 1.0).abs() < 1e-7);
        assert!(sol.gap < 1e-7);
    }

    #[test]
    fn schur_dense_path_matches_definition() {
        let d = 6;
        let herm_at = |seed: f64| {
            let m = CMat::from_fn(d, d, |r, k| c((seed + r as f64 * 0.7 - k as f64 * 0.3).sin(), (seed * 1.3 + (r * k) as f64).cos()));
            &m + m.adjoint()
        };
        let full = |a: &CMat| -> Vec<Entry> {
            (0..d).flat_map(|r| (0..d).map(move |k| (r, k))).map(|(r, k)| Entry { block: 0, row: r, col: k, val: a[(r, k)] }).collect()
        };
        let (a0, a1) = (herm_at(0.2), herm_at(1.1));
        let p = Problem {
            blocks: vec![d],
            c: vec![CMat::identity(d, d)],
            a: vec![full(&a0), vec![e(0, 2, 2, 1.0)], full(&a1)],
            b: vec![0.0; 3],
        };
        let x = CMat::identity(d, d) * c(2.0, 0.0) + herm_at(3.0) * c(0.1, 0.0);
        let zi = CMat::identity(d, d) + herm_at(4.0) * c(0.05, 0.0);
        let m = p.schur(&[x.clone()], &[zi.clone()]);
        let dense = |k: usize| p.adjoint(&DVector::from_fn(3, |i, _| if i == k { 1.0 } else { 0.0 }))[0].clone();
        for k in 0..3 {
            for l in 0..3 {
                let v = crate::linalg::trace(&(dense(k) * &x * dense(l) * &zi)).re;
                assert!((m[(k, l)] - v).abs() < 1e-10, "{k},{l}: {} vs {v}", m[(k, l)]);
            }
        }
    }

    #[test]
    fn schur_matches_dense_definition() {
        let p = Problem {
            blocks: vec![2],
            c: vec![CMat::identity(2, 2)],
            a: vec![
                vec![e(0, 0, 1, 1.0), e(0, 1, 0, 1.0)],
                vec![Entry { block: 0, row: 0, col: 1, val: c(0.0, 1.0) }, Entry { block: 0, row: 1, col: 0, val: c(0.0, -1.0) }],
            ],
            b: vec![0.0, 0.0],
        };
        let x = CMat::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.3, 0.1), c(0.3, -0.1), c(1.0, 0.0)]);
        let zi = CMat::from_row_slice(2, 2, &[c(1.5, 0.0), c(-0.2, 0.4), c(-0.2, -0.4), c(0.7, 0.0)]);
        let m = p.schur(&[x.clone()], &[zi.clone()]);
        let dense = |k: usize| p.adjoint(&DVector::from_fn(2, |i, _| if i == k { 1.0 } else { 0.0 }))[0].clone();
        for k in 0..2 {
            for l in 0..2 {
                let v = crate::linalg::trace(&(dense(k) * &x * dense(l) * &zi)).re;
                assert!((m[(k, l)] - v).abs() < 1e-12);
            }
        }
    }
}
