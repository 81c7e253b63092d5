//! Approximating every gate of a gate set with one family.

use super::{honest_approximation, pauli_twirl, ApproxOptions, ApproximationResult, Basis, MixtureChannel};
use crate::channel::{compose, Channel};
use crate::error::{Error, Result};
use crate::physics::{Gate, GateName, GateSet};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Twirl,
    Pauli,
    Clifford,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Twirl, Family::Pauli, Family::Clifford];

    pub fn label(&self) -> &'static str {
        match self {
            Family::Twirl => "twirl",
            Family::Pauli => "pauli",
            Family::Clifford => "clifford",
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.label() == s)
            .ok_or_else(|| Error::validation(format!("unknown family '{s}' (expected twirl, pauli or clifford)")))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GateApproximation {
    pub gate: GateName,
    pub requested: Family,
    /// Differs from `requested` when the Clifford family falls back to Pauli for two-qubit gates.
    pub used: Family,
    /// Approximate error channel as a mixture.
    pub mixture: MixtureChannel,
    pub result: Option<ApproximationResult>,
}

impl GateApproximation {
    /// Approximate gate Approx(ℰ)∘U.
    pub fn gate_channel(&self) -> Channel {
        let u = Channel::unitary(&self.gate.ideal());
        compose(&self.mixture.to_channel(), &u).expect("dimensions agree")
    }
}

/// Pauli mixture with the χ diagonal as weights.
pub fn twirl_mixture(e: &Channel) -> Result<MixtureChannel> {
    let diag = pauli_twirl(e).to_chi().diagonal();
    let clipped: Vec<f64> = diag.iter().map(|&w| w.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    MixtureChannel::new(Basis::Pauli(e.n_qubits), clipped.iter().map(|w| w / total).collect())
}

pub fn approximate_error(e: &Channel, family: Family, opts: &ApproxOptions) -> Result<(Family, MixtureChannel, Option<ApproximationResult>)> {
    match family {
        Family::Twirl => Ok((Family::Twirl, twirl_mixture(e)?, None)),
        Family::Pauli => {
            let r = honest_approximation(e, Basis::Pauli(e.n_qubits), opts)?;
            Ok((Family::Pauli, r.channel.clone(), Some(r)))
        }
        Family::Clifford if e.n_qubits != 1 => {
            log::info!("no Clifford basis for {} qubits; reusing the honest Pauli approximation", e.n_qubits);
            approximate_error(e, Family::Pauli, opts)
        }
        Family::Clifford => {
            let pauli = honest_approximation(e, Basis::Pauli(1), opts)?;
            let mut o = opts.clone();
            o.extra_starts.push(pauli.channel.embed_in_clifford()?.weights);
            let r = honest_approximation(e, Basis::Clifford1, &o)?;
            Ok((Family::Clifford, r.channel.clone(), Some(r)))
        }
    }
}

pub fn approximate_gate(gate: &Gate, family: Family, opts: &ApproxOptions) -> Result<GateApproximation> {
    let (used, mixture, result) = approximate_error(&gate.error(), family, opts)?;
    Ok(GateApproximation { gate: gate.name, requested: family, used, mixture, result })
}

/// The gate set with each channel replaced by its approximation.
pub fn approximate_gateset(gs: &GateSet, family: Family, opts: &ApproxOptions) -> Result<(GateSet, Vec<GateApproximation>)> {
    let mut out = gs.clone();
    let mut approximations = Vec::with_capacity(gs.gates.len());
    for (g, slot) in gs.gates.iter().zip(out.gates.iter_mut()) {
        let a = approximate_gate(g, family, opts)?;
        slot.channel = a.gate_channel();
        approximations.push(a);
    }
    out.family = Some(family);
    Ok((out, approximations))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{self, rotation};

    #[test]
    fn twirl_mixture_reproduces_the_twirl() {
        let e = compose(&Channel::amplitude_damping(0.2), &Channel::unitary(&rotation([0.0, 0.6, 0.8], 0.3))).unwrap();
        let m = twirl_mixture(&e).unwrap();
        assert!(linalg::max_abs_diff(&m.to_channel().superop, &pauli_twirl(&e).superop) < 1e-12);
    }

    #[test]
    fn clifford_falls_back_on_two_qubit_errors() {
        let e = crate::channel::tensor(&Channel::dephasing(0.01), &Channel::dephasing(0.02));
        let opts = ApproxOptions { n_starts: 2, ..Default::default() };
        let (used, m, _) = approximate_error(&e, Family::Clifford, &opts).unwrap();
        assert_eq!(used, Family::Pauli);
        assert_eq!(m.basis, Basis::Pauli(2));
    }

    #[test]
    fn family_names() {
        for f in Family::ALL {
            assert_eq!(f.label().parse::<Family>().unwrap(), f);
        }
        assert!("grape".parse::<Family>().is_err());
    }
}
