//! Second-order cumulant expansion of a noisy gate on a uniform time grid.

use super::hamiltonian::{commutator_superop, hamiltonian_terms, lindblad_superop, ControlSchedule};
use super::model::{NoiseModel, NoiseSource};
use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::linalg::{self, c, kron, CMat};

#[derive(Clone, Debug)]
pub struct CumulantResult {
    /// Lab-frame channel after the CP clamp.
    pub channel: Channel,
    pub k1: CMat,
    pub k2: CMat,
    /// Most negative Choi eigenvalue before clamping.
    pub min_choi_eigenvalue: f64,
    pub steps: usize,
    /// Largest τ_c·||A_i|| over the noise sources; the expansion is reliable when ≪ 1.
    pub tau_c_norm: f64,
}

/// exp(-i h dt) for Hermitian `h`.
pub fn propagator(h: &CMat, dt: f64) -> CMat {
    let (vals, vecs) = linalg::eigh(h);
    let phases = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&v| linalg::C64::from_polar(1.0, -v * dt)),
    ));
    &vecs * phases * vecs.adjoint()
}

fn unitary_superop(u: &CMat) -> CMat {
    kron(&u.map(|z| z.conj()), u)
}

fn steps_for(total: f64, dt: f64, grid: f64) -> Result<usize> {
    let per_grid = grid / dt;
    if !(dt > 0.0) || (per_grid - per_grid.round()).abs() > 1e-6 || per_grid.round() < 1.0 {
        return Err(Error::validation(format!("step {dt} s must divide the control interval {grid} s")));
    }
    let n = total / dt;
    if (n - n.round()).abs() > 1e-6 {
        return Err(Error::validation(format!("step {dt} s does not divide the gate duration {total} s")));
    }
    Ok(n.round() as usize)
}

/// Noisy channel of `schedule` under `model`, with Lindblad operators
/// `dissipator` added to the deterministic generator.
///
/// The interaction-frame generator is averaged to second order:
/// K = -itK1 - t²/2·K2, with K1 = (i/N)Σ D̃_n and K2 built from the discrete
/// double sums of the noise autocorrelations (white noise contributes Γ²/Δt on
/// the diagonal). The result is U(t)·exp(K).
pub fn cumulant_gate(model: &NoiseModel, schedule: &ControlSchedule, dt: f64, dissipator: &[CMat]) -> Result<CumulantResult> {
    cumulant_gate_with(model, schedule, dt, dissipator, &model.sources(schedule.n_qubits))
}

/// As [`cumulant_gate`] with explicit noise statistics, one per Hamiltonian noise term.
pub fn cumulant_gate_with(
    model: &NoiseModel,
    schedule: &ControlSchedule,
    dt: f64,
    dissipator: &[CMat],
    sources: &[NoiseSource],
) -> Result<CumulantResult> {
    model.validate()?;
    schedule.validate(model)?;
    let n_q = schedule.n_qubits;
    let d = 1usize << n_q;
    let d2 = d * d;
    let total = schedule.duration();
    let n_steps = steps_for(total, dt, model.control_dt())?;
    let expected = model.sources(n_q).len();
    if sources.len() != expected {
        return Err(Error::Dimension { expected, got: sources.len() });
    }
    let grids: Vec<Vec<f64>> = sources.iter().map(|s| s.acf.grid(dt, n_steps)).collect();
    let active: Vec<usize> = (0..sources.len()).filter(|&i| !sources[i].acf.is_zero()).collect();

    let zero = || CMat::zeros(d2, d2);
    let mut u = linalg::eye(d);
    let mut history: Vec<Vec<CMat>> = vec![Vec::with_capacity(n_steps); sources.len()];
    let (mut sum_d, mut dd_diag, mut dd_cross, mut prefix_d, mut noise) = (zero(), zero(), zero(), zero(), zero());
    let mut op_norm = vec![0.0f64; sources.len()];

    for n in 0..n_steps {
        let ctl = schedule.controls_at((n as f64 + 0.5) * dt);
        let (h0, ops) = hamiltonian_terms(model, &ctl);
        let ud = u.adjoint();
        if !dissipator.is_empty() {
            let lt: Vec<CMat> = dissipator.iter().map(|l| &ud * l * &u).collect();
            let dn = lindblad_superop(&lt);
            dd_diag += &dn * &dn;
            dd_cross += &dn * &prefix_d;
            prefix_d += &dn;
            sum_d += dn;
        }
        for &i in &active {
            let b = &ud * &ops[i] * &u;
            op_norm[i] = op_norm[i].max(linalg::frobenius(&ops[i]));
            let mut s = CMat::zeros(d, d);
            for (m, bm) in history[i].iter().enumerate() {
                let w = grids[i][n - m];
                if w != 0.0 {
                    s += bm * c(w, 0.0);
                }
            }
            let ab = commutator_superop(&b);
            let w0 = grids[i][0] + sources[i].acf.white / dt;
            noise += &ab * &ab * c(w0, 0.0);
            noise += &ab * commutator_superop(&s) * c(2.0, 0.0);
            history[i].push(b);
        }
        u = propagator(&h0, dt) * u;
    }

    let nf = n_steps.max(1) as f64;
    let t = total;
    let k1 = &sum_d * c(0.0, 1.0 / nf);
    let k2 = (&noise - &dd_diag - &dd_cross * c(2.0, 0.0)) * c(1.0 / (nf * nf), 0.0) - &k1 * &k1;
    let k = &k1 * c(0.0, -t) - &k2 * c(0.5 * t * t, 0.0);
    let lab = unitary_superop(&u) * k.exp();
    let raw = Channel::from_superop(n_q, lab);
    let (channel, min_eig) = raw.clamp_cp()?;

    let tau_c_norm = active
        .iter()
        .map(|&i| sources[i].acf.correlation_time(total) * op_norm[i] * sources[i].acf.colored_value(0.0).sqrt())
        .fold(0.0, f64::max);
    log::debug!("cumulant gate: {n_steps} steps, max tau_c*|A| = {tau_c_norm:.3e}");
    if tau_c_norm > 1.0 {
        log::info!("cumulant validity indicator tau_c*|A| = {tau_c_norm:.3e} exceeds 1");
    }
    Ok(CumulantResult { channel, k1, k2, min_choi_eigenvalue: min_eig, steps: n_steps, tau_c_norm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pauli, rotation};
    use crate::physics::acf::Acf;
    use crate::physics::hamiltonian::{relaxation_ops, Segment};
    use crate::physics::acf::Kernel;
    use crate::physics::model::Pm2Params;

    fn quiet() -> Pm2Params {
        Pm2Params::noiseless()
    }

    fn only(model: &NoiseModel, n: usize, index: usize, acf: Acf) -> Vec<NoiseSource> {
        let mut s = model.sources(n);
        for x in &mut s {
            x.acf = Acf::default();
        }
        s[index].acf = acf;
        s
    }

    #[test]
    fn zero_noise_is_the_ideal_rotation() {
        let model = NoiseModel::Pm2(quiet());
        let omega = 2.0 * std::f64::consts::PI * 2e7;
        let seg = Segment { duration_s: 10e-9, a_hz: vec![0.0], b_hz: vec![omega], phi_rad: vec![0.0], c_hz: 0.0 };
        let sched = ControlSchedule::new(1, vec![seg]).unwrap();
        let r = cumulant_gate(&model, &sched, 0.25e-9, &[]).unwrap();
        let ideal = Channel::unitary(&rotation([0.0, 0.0, 1.0], omega * 10e-9));
        assert!(linalg::max_abs_diff(&r.channel.superop, &ideal.superop) < 1e-12);
        assert_eq!(r.steps, 40);
    }

    #[test]
    fn relaxation_only_is_amplitude_damping() {
        let mut p = quiet();
        p.t1_s = 1e-6;
        let model = NoiseModel::Pm2(p);
        let sched = ControlSchedule::new(1, vec![Segment::idle(1, 25e-9)]).unwrap();
        let r = cumulant_gate(&model, &sched, 0.1e-9, &relaxation_ops(1e-6, 1)).unwrap();
        let gamma = 1.0 - (-25e-9f64 / 1e-6).exp();
        assert!(linalg::max_abs_diff(&r.channel.superop, &Channel::amplitude_damping(gamma).superop) < 1e-12);
    }

    #[test]
    fn white_dephasing_matches_closed_form() {
        let g2 = 4e6;
        let model = NoiseModel::Pm2(quiet());
        let sched = ControlSchedule::new(1, vec![Segment::idle(1, 100e-9)]).unwrap();
        let r = cumulant_gate_with(&model, &sched, 1e-9, &[], &only(&model, 1, 2, Acf::white(g2))).unwrap();
        let coherence = (-g2 * 100e-9 / 2.0).exp();
        let p = 0.5 * (1.0 - coherence);
        assert!(linalg::max_abs_diff(&r.channel.superop, &Channel::dephasing(p).superop) < 1e-12);
    }

    #[test]
    fn quasi_static_drive_noise_under_rotation() {
        // Constant relative amplitude noise of variance σ² on a π pulse: the
        // interaction-frame generator is the static one, so the channel is the
        // Gaussian average of rotations exp(-iδθX/2), i.e. a Pauli-X channel.
        let sigma2 = 1e-4;
        let mut p = quiet();
        p.a_max_hz = 2.0 * std::f64::consts::PI * 1e8;
        let model = NoiseModel::Pm2(p.clone());
        let a = p.a_max_hz;
        let seg = Segment { duration_s: 5e-9, a_hz: vec![a], b_hz: vec![0.0], phi_rad: vec![0.0], c_hz: 0.0 };
        let sched = ControlSchedule::new(1, vec![seg]).unwrap();
        // α is specified in Hz and enters relative to A_max.
        let acf = Acf { white: 0.0, colored: vec![(sigma2 * a * a, Kernel::Constant)] };
        let r = cumulant_gate_with(&model, &sched, 0.25e-9, &[], &only(&model, 1, 0, acf)).unwrap();
        let theta = a * 5e-9;
        let px = 0.5 * (1.0 - (-sigma2 * theta * theta / 2.0).exp());
        let expect = crate::channel::compose(&Channel::unitary(&pauli(1)), &Channel::pauli_channel(&[1.0 - px, px, 0.0, 0.0])).unwrap();
        assert!(linalg::max_abs_diff(&r.channel.superop, &expect.superop) < 1e-9);
    }

    #[test]
    fn step_must_divide_grid() {
        let model = NoiseModel::Pm2(quiet());
        let sched = ControlSchedule::new(1, vec![Segment::idle(1, 2e-9)]).unwrap();
        assert!(cumulant_gate(&model, &sched, 0.3e-9, &[]).is_err());
    }
}
