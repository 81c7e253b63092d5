//! Pulse synthesis: resonant rotations, virtual-Z frame tracking and XY decoupling.

use super::hamiltonian::{ControlSchedule, Segment};
use crate::error::{Error, Result};
use crate::linalg::{self, pauli, rotation, CMat};

/// R_φ(θ) = exp(-iθ/2 (cos φ X + sin φ Y)).
pub fn r_phi(theta: f64, phi: f64) -> CMat {
    rotation([phi.cos(), phi.sin(), 0.0], theta)
}

pub fn rz(a: f64) -> CMat {
    rotation([0.0, 0.0, 1.0], a)
}

/// (θ, φ, a) with θ ∈ [0, π] and U ∝ Rz(a)·R_φ(θ).
pub fn decompose(u: &CMat) -> (f64, f64, f64) {
    let (u00, u01, u10, u11) = (u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
    let theta = 2.0 * u10.norm().atan2(u00.norm());
    if u10.norm() < 1e-12 {
        return (0.0, 0.0, (u11 / u00).arg());
    }
    if u00.norm() < 1e-12 {
        return (std::f64::consts::PI, 0.5 * (u10 / u01).arg(), 0.0);
    }
    let a = (u11 / u00).arg();
    let phi = (u10 / u00).arg() + std::f64::consts::FRAC_PI_2 - a;
    (theta, phi, a)
}

/// Smallest multiple of `grid` not below `t`.
pub fn on_grid(t: f64, grid: f64) -> f64 {
    (t / grid - 1e-9).ceil().max(0.0) * grid
}

/// Constant-amplitude resonant π-style pulse: a rotation by `theta` about the
/// equatorial axis `phi` at amplitude `a_max`, padded with idle to `duration`.
pub fn hard_pulse_schedule(theta: f64, phi: f64, a_max: f64, duration: f64) -> Result<ControlSchedule> {
    if theta < 0.0 {
        return Err(Error::validation("rotation angle must be non-negative"));
    }
    if theta == 0.0 {
        return ControlSchedule::new(1, vec![Segment::idle(1, duration)]);
    }
    let tau = theta / a_max;
    if tau > duration * (1.0 + 1e-12) {
        return Err(Error::validation(format!("a {theta} rad pulse needs {tau:.3e} s at A_max, longer than {duration:.3e} s")));
    }
    let mut segs = vec![Segment { duration_s: tau, a_hz: vec![a_max], b_hz: vec![0.0], phi_rad: vec![phi], c_hz: 0.0 }];
    if duration - tau > duration * 1e-12 {
        segs.push(Segment::idle(1, duration - tau));
    }
    ControlSchedule::new(1, segs)
}

/// Builds a schedule in the rotating frame, tracking a virtual-Z frame per qubit
/// so that Z rotations cost no time. The accumulated frame must be applied as an
/// ideal Rz after the simulated pulses.
#[derive(Clone, Debug)]
pub struct PulseBuilder {
    n: usize,
    frame: Vec<f64>,
    segments: Vec<Segment>,
}

impl PulseBuilder {
    pub fn new(n_qubits: usize) -> Self {
        PulseBuilder { n: n_qubits, frame: vec![0.0; n_qubits], segments: Vec::new() }
    }

    pub fn elapsed(&self) -> f64 {
        self.segments.iter().map(|s| s.duration_s).sum()
    }

    pub fn virtual_z(&mut self, q: usize, a: f64) {
        self.frame[q] += a;
    }

    /// One segment of simultaneous rotations (q, θ, φ) and coupling `c_hz`.
    pub fn segment(&mut self, duration: f64, rots: &[(usize, f64, f64)], c_hz: f64) {
        if duration <= 0.0 {
            return;
        }
        let mut seg = Segment::idle(self.n, duration);
        for &(q, theta, phi) in rots {
            if theta != 0.0 {
                seg.a_hz[q] = theta / duration;
                seg.phi_rad[q] = phi - self.frame[q];
            }
        }
        seg.c_hz = c_hz;
        self.segments.push(seg);
    }

    pub fn idle(&mut self, duration: f64) {
        self.segment(duration, &[], 0.0);
    }

    pub fn idle_until(&mut self, t: f64) -> Result<()> {
        let gap = t - self.elapsed();
        if gap < -1e-15 {
            return Err(Error::validation(format!("schedule overruns its slot by {:.3e} s", -gap)));
        }
        if gap > 1e-15 {
            self.idle(gap);
        }
        Ok(())
    }

    /// Simultaneous single-qubit unitaries over `duration`; diagonal ones need no time.
    pub fn rotate(&mut self, duration: f64, gates: &[(usize, CMat)]) -> Result<()> {
        let parts: Vec<(usize, f64, f64, f64)> = gates
            .iter()
            .map(|(q, u)| {
                let (t, p, a) = decompose(u);
                (*q, t, p, a)
            })
            .collect();
        let rots: Vec<(usize, f64, f64)> = parts.iter().map(|&(q, t, p, _)| (q, t, p)).collect();
        if duration <= 0.0 && rots.iter().any(|r| r.1 > 1e-12) {
            return Err(Error::validation("a non-diagonal rotation needs a positive duration"));
        }
        self.segment(duration, &rots, 0.0);
        for (q, _, _, a) in parts {
            self.virtual_z(q, a);
        }
        Ok(())
    }

    /// Largest rotation angle among `gates`.
    pub fn max_angle(gates: &[(usize, CMat)]) -> f64 {
        gates.iter().map(|(_, u)| decompose(u).0).fold(0.0, f64::max)
    }

    /// Finished schedule and the pending frame rotation ⊗_q Rz(frame_q).
    pub fn finish(self) -> Result<(ControlSchedule, CMat)> {
        let frame = linalg::kron_all(&self.frame.iter().map(|&a| rz(a)).collect::<Vec<_>>());
        let sched = ControlSchedule::new(self.n, self.segments)?;
        Ok((sched, frame))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XyKind {
    Xy4,
    Xy8,
}

impl XyKind {
    pub fn pulses(&self) -> Vec<CMat> {
        let (x, y) = (pauli(1), pauli(2));
        match self {
            XyKind::Xy4 => vec![x.clone(), y.clone(), x, y],
            XyKind::Xy8 => vec![x.clone(), y.clone(), x.clone(), y.clone(), y.clone(), x.clone(), y, x],
        }
    }
}

/// Decoupling pulses A_k and the frame products F_k = A_k⋯A_1.
pub fn xy_frames(kind: XyKind) -> Vec<(CMat, CMat)> {
    let mut f = linalg::eye(2);
    kind.pulses()
        .into_iter()
        .map(|a| {
            f = &a * &f;
            (a, f.clone())
        })
        .collect()
}

/// Interleaves `u` with an XY sequence: returns (A_k, U_k) with
/// U_k = F_k U^{1/K} F_k†, so that U_K A_K ⋯ U_1 A_1 ∝ U.
pub fn xy_sequence(u: &CMat, kind: XyKind) -> Vec<(CMat, CMat)> {
    let frames = xy_frames(kind);
    let root = linalg::unitary_power(u, 1.0 / frames.len() as f64);
    frames.into_iter().map(|(a, f)| (a, &f * &root * f.adjoint())).collect()
}
