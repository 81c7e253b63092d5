//! Control schedules, model Hamiltonians and the relaxation dissipator.

use super::model::{NoiseModel, Pm1Params, Pm2Params};
use crate::error::{Error, Result};
use crate::linalg::{self, c, kron, pauli, CMat, ZERO};
use serde::{Deserialize, Deserializer, Serialize};

/// Relative slack on control bounds.
const BOUND_SLACK: f64 = 1e-12;

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

fn one_or_many<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<f64>, D::Error> {
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(x) => vec![x],
        OneOrMany::Many(v) => v,
    })
}

/// Piecewise-constant controls over `duration_s`. Per-qubit entries given as a
/// single value are broadcast to every qubit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub duration_s: f64,
    #[serde(rename = "A_hz", deserialize_with = "one_or_many", default)]
    pub a_hz: Vec<f64>,
    #[serde(rename = "B_hz", deserialize_with = "one_or_many", default)]
    pub b_hz: Vec<f64>,
    #[serde(rename = "phi_rad", deserialize_with = "one_or_many", default)]
    pub phi_rad: Vec<f64>,
    #[serde(rename = "C_hz", default)]
    pub c_hz: f64,
}

impl Segment {
    pub fn idle(n_qubits: usize, duration_s: f64) -> Self {
        Segment {
            duration_s,
            a_hz: vec![0.0; n_qubits],
            b_hz: vec![0.0; n_qubits],
            phi_rad: vec![0.0; n_qubits],
            c_hz: 0.0,
        }
    }

    fn broadcast(&mut self, n: usize) -> Result<()> {
        for v in [&mut self.a_hz, &mut self.b_hz, &mut self.phi_rad] {
            match v.len() {
                0 => *v = vec![0.0; n],
                1 => *v = vec![v[0]; n],
                k if k == n => {}
                k => return Err(Error::Dimension { expected: n, got: k }),
            }
        }
        Ok(())
    }
}

/// Instantaneous control values.
#[derive(Clone, Debug, PartialEq)]
pub struct Controls {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub phi: Vec<f64>,
    pub c: f64,
}

impl From<&Segment> for Controls {
    fn from(s: &Segment) -> Self {
        Controls { a: s.a_hz.clone(), b: s.b_hz.clone(), phi: s.phi_rad.clone(), c: s.c_hz }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlSchedule {
    pub n_qubits: usize,
    pub segments: Vec<Segment>,
}

impl ControlSchedule {
    pub fn new(n_qubits: usize, mut segments: Vec<Segment>) -> Result<Self> {
        if !(1..=2).contains(&n_qubits) {
            return Err(Error::validation("schedules cover one or two qubits"));
        }
        for s in &mut segments {
            if !(s.duration_s >= 0.0) {
                return Err(Error::validation(format!("negative segment duration {}", s.duration_s)));
            }
            s.broadcast(n_qubits)?;
        }
        Ok(ControlSchedule { n_qubits, segments })
    }

    /// Parses a JSON array of segments.
    pub fn from_json(n_qubits: usize, text: &str) -> Result<Self> {
        let segs: Vec<Segment> = serde_json::from_str(text)?;
        ControlSchedule::new(n_qubits, segs)
    }

    pub fn duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration_s).sum()
    }

    /// Controls at time `t` (segments are half-open on the right).
    pub fn controls_at(&self, t: f64) -> Controls {
        let mut start = 0.0;
        for s in &self.segments {
            if t < start + s.duration_s * (1.0 - 1e-12) {
                return Controls::from(s);
            }
            start += s.duration_s;
        }
        self.segments.last().map(Controls::from).unwrap_or(Controls {
            a: vec![0.0; self.n_qubits],
            b: vec![0.0; self.n_qubits],
            phi: vec![0.0; self.n_qubits],
            c: 0.0,
        })
    }

    /// Checks amplitude bounds, the slew-rate limits of PM1 and that every
    /// segment boundary lies on the control grid.
    pub fn validate(&self, model: &NoiseModel) -> Result<()> {
        let grid = model.control_dt();
        let mut prev: Option<&Segment> = None;
        for s in &self.segments {
            check_bounds(model, &Controls::from(s))?;
            let k = s.duration_s / grid;
            if (k - k.round()).abs() > 1e-6 {
                return Err(Error::validation(format!(
                    "segment of {} s is not a multiple of the control interval {} s",
                    s.duration_s, grid
                )));
            }
            if let (NoiseModel::Pm1(p), Some(q)) = (model, prev) {
                for i in 0..self.n_qubits {
                    let da = (s.a_hz[i] - q.a_hz[i]).abs() / grid;
                    let db = (s.b_hz[i] - q.b_hz[i]).abs() / grid;
                    if da > p.delta_a_max_hz_per_s * (1.0 + BOUND_SLACK) || db > p.delta_b_max_hz_per_s * (1.0 + BOUND_SLACK) {
                        return Err(Error::validation("control slew rate exceeds the model limit"));
                    }
                }
            }
            prev = Some(s);
        }
        Ok(())
    }
}

fn check_bound(name: &str, v: f64, max: f64) -> Result<()> {
    if !v.is_finite() || v.abs() > max * (1.0 + BOUND_SLACK) {
        return Err(Error::validation(format!("|{name}| = {} exceeds bound {max}", v.abs())));
    }
    Ok(())
}

pub fn check_bounds(model: &NoiseModel, ctl: &Controls) -> Result<()> {
    let (amax, bmax, cmax) = model.bounds();
    for q in 0..ctl.a.len() {
        check_bound("A", ctl.a[q], amax)?;
        check_bound("B", ctl.b[q], bmax)?;
    }
    check_bound("C", ctl.c, cmax)
}

fn on_qubit(op: &CMat, q: usize, n: usize) -> CMat {
    match (n, q) {
        (1, _) => op.clone(),
        (2, 0) => kron(op, &linalg::eye(2)),
        _ => kron(&linalg::eye(2), op),
    }
}

fn zz() -> CMat {
    kron(&pauli(3), &pauli(3))
}

/// Deterministic Hamiltonian H0 and one operator A_i per noise source, with
/// H = H0 + Σ ξ_i A_i for a noise realization ξ.
pub fn hamiltonian_terms(model: &NoiseModel, ctl: &Controls) -> (CMat, Vec<CMat>) {
    let n = ctl.a.len();
    match model {
        NoiseModel::Pm2(p) => pm2_terms(p, ctl, n),
        NoiseModel::Pm1(p) => pm1_terms(p, ctl, n),
    }
}

/// The multiplicative processes α, β1, γ carry strengths in Hz; they enter as
/// relative fluctuations α/A_max, β1/B_max and γ/C_max.
fn pm2_terms(p: &Pm2Params, ctl: &Controls, n: usize) -> (CMat, Vec<CMat>) {
    let d = 1 << n;
    let mut h = CMat::zeros(d, d);
    let mut ops = Vec::new();
    for q in 0..n {
        let z = on_qubit(&pauli(3), q, n);
        let xy = on_qubit(&(pauli(1) * c(ctl.phi[q].cos(), 0.0) + pauli(2) * c(ctl.phi[q].sin(), 0.0)), q, n);
        let drive = &xy * c(0.5 * ctl.a[q], 0.0);
        let bz = &z * c(0.5 * ctl.b[q], 0.0);
        h += &drive + &bz;
        ops.push(drive / c(p.a_max_hz, 0.0));
        ops.push(bz / c(p.b_max_hz, 0.0));
        ops.push(z * c(0.5, 0.0));
    }
    if n == 2 {
        let coupling = zz() * c(-0.5 * ctl.c, 0.0);
        h += &coupling;
        ops.push(coupling / c(p.c_max_hz, 0.0));
    }
    (h, ops)
}

fn pm1_terms(p: &Pm1Params, ctl: &Controls, n: usize) -> (CMat, Vec<CMat>) {
    let d = 1 << n;
    let mut h = CMat::zeros(d, d);
    let mut ops = Vec::new();
    let x = |b: f64| b / p.b1_hz - p.b2;
    for q in 0..n {
        let xq = x(ctl.b[q]);
        let fx = 0.5 / (1.0 + xq.exp()).sqrt();
        let fz = 0.5 / (1.0 + (-xq).exp());
        let ax = on_qubit(&pauli(1), q, n) * c(fx, 0.0);
        let az = on_qubit(&pauli(3), q, n) * c(fz, 0.0);
        h += &ax * c(ctl.a[q], 0.0) + &az * c(ctl.b[q] - p.b0_hz, 0.0);
        ops.push(ax);
        ops.push(az);
    }
    if n == 2 {
        let denom = (1.0 + (-x(ctl.b[0])).exp()) * (1.0 + (-x(ctl.b[1])).exp());
        let shape = zz() - on_qubit(&pauli(3), 0, 2) - on_qubit(&pauli(3), 1, 2);
        let g = shape * c(0.25 / denom, 0.0);
        h += &g * c(ctl.c, 0.0);
        ops.push(g * c(ctl.c, 0.0));
    }
    (h, ops)
}

fn realize(model: &NoiseModel, ctl: &Controls, noise: &[f64]) -> Result<CMat> {
    check_bounds(model, ctl)?;
    let (h, ops) = hamiltonian_terms(model, ctl);
    if noise.len() != ops.len() {
        return Err(Error::Dimension { expected: ops.len(), got: noise.len() });
    }
    Ok(ops.iter().zip(noise).fold(h, |acc, (a, &xi)| acc + a * c(xi, 0.0)))
}

/// PM1 Hamiltonian for a noise realization ordered as in [`NoiseModel::sources`].
pub fn hamiltonian_pm1(p: &Pm1Params, ctl: &Controls, noise: &[f64]) -> Result<CMat> {
    realize(&NoiseModel::Pm1(p.clone()), ctl, noise)
}

/// PM2 Hamiltonian for a noise realization ordered as in [`NoiseModel::sources`].
pub fn hamiltonian_pm2(p: &Pm2Params, ctl: &Controls, noise: &[f64]) -> Result<CMat> {
    realize(&NoiseModel::Pm2(p.clone()), ctl, noise)
}

/// Superoperator of ρ ↦ -i[H, ρ] without the -i: I⊗H - H*⊗I.
pub fn commutator_superop(h: &CMat) -> CMat {
    let d = h.nrows();
    kron(&linalg::eye(d), h) - kron(&h.map(|z| z.conj()), &linalg::eye(d))
}

/// Lindblad dissipator Σ L ρ L† - ½{L†L, ρ} as a column-stacked superoperator.
pub fn lindblad_superop(ls: &[CMat]) -> CMat {
    let d = ls.first().map_or(1, |l| l.nrows());
    let id = linalg::eye(d);
    let mut out = CMat::from_element(d * d, d * d, ZERO);
    for l in ls {
        let ll = l.adjoint() * l;
        out += kron(&l.map(|z| z.conj()), l);
        out -= (kron(&id, &ll) + kron(&ll.transpose(), &id)) * c(0.5, 0.0);
    }
    out
}

/// Relaxation operators L_q = (X + iY)/(2√T1) on each qubit; empty for T1 = ∞.
pub fn relaxation_ops(t1: f64, n_qubits: usize) -> Vec<CMat> {
    if !t1.is_finite() {
        return Vec::new();
    }
    let l = (pauli(1) + pauli(2) * c(0.0, 1.0)) * c(0.5 / t1.sqrt(), 0.0);
    (0..n_qubits).map(|q| on_qubit(&l, q, n_qubits)).collect()
}

pub fn dissipator(t1: f64, n_qubits: usize) -> CMat {
    let ops = relaxation_ops(t1, n_qubits);
    if ops.is_empty() {
        let d2 = 1 << (2 * n_qubits);
        return CMat::zeros(d2, d2);
    }
    lindblad_superop(&ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Channel;
    use std::f64::consts::PI;

    fn ctl1(a: f64, b: f64, phi: f64) -> Controls {
        Controls { a: vec![a], b: vec![b], phi: vec![phi], c: 0.0 }
    }

    #[test]
    fn pm2_bound_is_inclusive() {
        let p = Pm2Params::gs2();
        let bmax = 2.0 * PI * 1e9;
        assert!(hamiltonian_pm2(&p, &ctl1(0.0, bmax, 0.0), &[0.0; 3]).is_ok());
        assert!(hamiltonian_pm2(&p, &ctl1(0.0, 1.01 * bmax, 0.0), &[0.0; 3]).is_err());
    }

    #[test]
    fn pm2_single_qubit_form() {
        let p = Pm2Params::gs2();
        let (a, b, phi) = (2e8, 3e8, 0.7);
        let (al, b1, b2) = (0.01 * p.a_max_hz, -0.02 * p.b_max_hz, 5e5);
        let h = hamiltonian_pm2(&p, &ctl1(a, b, phi), &[al, b1, b2]).unwrap();
        let expect = pauli(3) * c(0.5 * (b * (1.0 - 0.02) + b2), 0.0)
            + (pauli(1) * c(phi.cos(), 0.0) + pauli(2) * c(phi.sin(), 0.0)) * c(0.5 * a * (1.0 + 0.01), 0.0);
        assert!(linalg::max_abs_diff(&h, &expect) < 1e-6);
    }

    #[test]
    fn pm2_coupling_term() {
        let p = Pm2Params::gs2();
        let ctl = Controls { a: vec![0.0; 2], b: vec![0.0; 2], phi: vec![0.0; 2], c: 1e8 };
        let noise = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.1 * p.c_max_hz];
        let h = hamiltonian_pm2(&p, &ctl, &noise).unwrap();
        assert!(linalg::max_abs_diff(&h, &(zz() * c(-0.5 * 1e8 * 1.1, 0.0))) < 1e-6);
    }

    #[test]
    fn pm1_x_coefficient_at_crossover() {
        let p = Pm1Params::gs1();
        let a = 1e8;
        let b = p.b1_hz * p.b2;
        let h = hamiltonian_pm1(&p, &ctl1(a, b, 0.0), &[0.0, 0.0]).unwrap();
        assert!((h[(0, 1)].re - a / (2.0 * 2f64.sqrt())).abs() < 1e-6 * a);
        assert!((h[(0, 0)].re - 0.25 * (b - p.b0_hz)).abs() < 1e-6 * b);
    }

    #[test]
    fn pm1_coupling_shape() {
        let p = Pm1Params::gs1();
        let b = (p.b2 + 40.0) * p.b1_hz;
        let ctl = Controls { a: vec![0.0; 2], b: vec![b; 2], phi: vec![0.0; 2], c: 1e9 };
        let (h, ops) = hamiltonian_terms(&NoiseModel::Pm1(p.clone()), &ctl);
        assert_eq!(ops.len(), 5);
        // Both factors saturate: the coupling is ¼C(ZZ - ZI - IZ) on |11⟩.
        let diag11 = h[(3, 3)].re + (b - p.b0_hz);
        assert!((diag11 - 0.25 * 1e9 * 3.0).abs() < 0.1, "{diag11}");
    }

    #[test]
    fn dissipator_gives_amplitude_damping() {
        let t1 = 1e-5;
        let t = 2e-6;
        let d = dissipator(t1, 1);
        let ch = Channel::from_superop(1, (d * c(t, 0.0)).exp());
        let gamma = 1.0 - (-t / t1).exp();
        assert!(linalg::max_abs_diff(&ch.superop, &Channel::amplitude_damping(gamma).superop) < 1e-12);
        assert_eq!(dissipator(f64::INFINITY, 2).iter().map(|z| z.norm()).sum::<f64>(), 0.0);
    }

    #[test]
    fn commutator_superop_acts_as_commutator() {
        let h = pauli(1) * c(0.3, 0.0) + pauli(3) * c(-0.2, 0.0);
        let rho = CMat::from_row_slice(2, 2, &[c(0.6, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.4, 0.0)]);
        let v = commutator_superop(&h) * linalg::vec_col(&rho);
        let expect = &h * &rho - &rho * &h;
        assert!(linalg::max_abs_diff(&linalg::unvec_col(&v, 2), &expect) < 1e-15);
    }

    #[test]
    fn schedule_parsing_broadcasts_scalars() {
        let text = r#"[{"duration_s": 5e-9, "A_hz": 1e8, "phi_rad": [0.0, 1.5]}, {"duration_s": 2e-9, "C_hz": 3e7}]"#;
        let s = ControlSchedule::from_json(2, text).unwrap();
        assert_eq!(s.segments[0].a_hz, vec![1e8, 1e8]);
        assert_eq!(s.segments[0].phi_rad, vec![0.0, 1.5]);
        assert_eq!(s.segments[1].b_hz, vec![0.0, 0.0]);
        assert!((s.duration() - 7e-9).abs() < 1e-20);
        assert_eq!(s.controls_at(6e-9).c, 3e7);
        s.validate(&NoiseModel::Pm2(Pm2Params::gs2())).unwrap();
        let bad = ControlSchedule::from_json(2, r#"[{"duration_s": 5.5e-9}]"#).unwrap();
        assert!(bad.validate(&NoiseModel::Pm2(Pm2Params::gs2())).is_err());
    }
}
