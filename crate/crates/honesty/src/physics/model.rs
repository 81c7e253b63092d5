//! Physical noise-model parameters and their reference presets.

use super::acf::{Acf, Kernel};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Parameters of the detuned spin-qubit model with white and colored noise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pm1Params {
    pub b0_hz: f64,
    pub b1_hz: f64,
    pub b2: f64,
    pub a_max_hz: f64,
    pub b_max_hz: f64,
    pub delta_a_max_hz_per_s: f64,
    pub delta_b_max_hz_per_s: f64,
    pub c_max_hz: f64,
    pub dt_s: f64,
    pub t1_s: f64,
    pub gamma_alpha1_hz: f64,
    pub gamma_alpha2_hz: f64,
    pub tau1_s: f64,
    pub tau2_s: f64,
    pub tau3_s: f64,
    pub gamma_beta1_hz: f64,
    pub gamma_beta2_hz: f64,
    pub gamma_gamma_hz: f64,
}

/// Parameters of the rotating-frame model with 1/f noise on every control.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pm2Params {
    pub a_max_hz: f64,
    pub b_max_hz: f64,
    pub c_max_hz: f64,
    pub dt_s: f64,
    pub t1_s: f64,
    pub gamma_alpha_hz: f64,
    pub gamma_beta1_hz: f64,
    pub gamma_beta2_hz: f64,
    pub gamma_gamma_hz: f64,
    pub lambda_alpha_l_hz: f64,
    pub lambda_alpha_u_hz: f64,
    pub lambda_beta1_l_hz: f64,
    pub lambda_beta1_u_hz: f64,
    pub lambda_beta2_l_hz: f64,
    pub lambda_beta2_u_hz: f64,
    pub lambda_gamma_l_hz: f64,
    pub lambda_gamma_u_hz: f64,
}

impl Pm1Params {
    pub fn gs1() -> Self {
        Pm1Params {
            b0_hz: 1.5193e13,
            b1_hz: 1.5193e11,
            b2: 120.0,
            a_max_hz: 3.798e8,
            b_max_hz: 3.0385e13,
            delta_a_max_hz_per_s: 0.7596e18,
            delta_b_max_hz_per_s: 1.215e23,
            c_max_hz: 8.73568e12,
            dt_s: 1e-10,
            t1_s: 1.0,
            gamma_alpha1_hz: 4.804,
            gamma_alpha2_hz: 1.519e8,
            tau1_s: 1e-2,
            tau2_s: 1e-3,
            tau3_s: 1e-4,
            gamma_beta1_hz: 1.519e9,
            gamma_beta2_hz: 4.804e6,
            gamma_gamma_hz: 1e3,
        }
    }
}

impl Pm2Params {
    pub fn gs2() -> Self {
        let l = 1.0 / (2.0 * PI);
        Pm2Params {
            a_max_hz: 2.0 * PI * 1e8,
            b_max_hz: 2.0 * PI * 1e9,
            c_max_hz: 2.0 * PI * 1e8,
            dt_s: 1e-9,
            t1_s: 1e-4,
            gamma_alpha_hz: 3e4,
            gamma_beta1_hz: 3e4,
            gamma_beta2_hz: 1e6 / (2.0 * PI),
            gamma_gamma_hz: 1.2e3 / (2.0 * PI),
            lambda_alpha_l_hz: l,
            lambda_alpha_u_hz: 1e9,
            lambda_beta1_l_hz: l,
            lambda_beta1_u_hz: 1e9,
            lambda_beta2_l_hz: l,
            lambda_beta2_u_hz: 1e9,
            lambda_gamma_l_hz: l,
            lambda_gamma_u_hz: 1e9,
        }
    }

    pub fn gs3() -> Self {
        Pm2Params {
            t1_s: 1e-5,
            gamma_alpha_hz: 0.0,
            gamma_beta1_hz: 1e4,
            gamma_beta2_hz: 1e4,
            gamma_gamma_hz: 1.2e3 / (2.0 * PI),
            ..Pm2Params::gs2()
        }
    }

    /// No stochastic noise and no relaxation; bounds and grid as in `gs2`.
    pub fn noiseless() -> Self {
        Pm2Params {
            t1_s: f64::INFINITY,
            gamma_alpha_hz: 0.0,
            gamma_beta1_hz: 0.0,
            gamma_beta2_hz: 0.0,
            gamma_gamma_hz: 0.0,
            ..Pm2Params::gs2()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Pm1,
    Pm2,
}

impl std::str::FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pm1" => Ok(ModelKind::Pm1),
            "pm2" => Ok(ModelKind::Pm2),
            _ => Err(Error::validation(format!("unknown model '{s}'"))),
        }
    }
}

/// One independent stochastic parameter entering the Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseSource {
    pub name: String,
    pub acf: Acf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum NoiseModel {
    Pm1(Pm1Params),
    Pm2(Pm2Params),
}

impl NoiseModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            NoiseModel::Pm1(_) => ModelKind::Pm1,
            NoiseModel::Pm2(_) => ModelKind::Pm2,
        }
    }

    pub fn control_dt(&self) -> f64 {
        match self {
            NoiseModel::Pm1(p) => p.dt_s,
            NoiseModel::Pm2(p) => p.dt_s,
        }
    }

    pub fn t1(&self) -> f64 {
        match self {
            NoiseModel::Pm1(p) => p.t1_s,
            NoiseModel::Pm2(p) => p.t1_s,
        }
    }

    /// (A_max, B_max, C_max).
    pub fn bounds(&self) -> (f64, f64, f64) {
        match self {
            NoiseModel::Pm1(p) => (p.a_max_hz, p.b_max_hz, p.c_max_hz),
            NoiseModel::Pm2(p) => (p.a_max_hz, p.b_max_hz, p.c_max_hz),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b, c) = self.bounds();
        let dt = self.control_dt();
        let t1 = self.t1();
        for (name, v) in [("a_max_hz", a), ("b_max_hz", b), ("c_max_hz", c), ("dt_s", dt), ("t1_s", t1)] {
            if !(v > 0.0) {
                return Err(Error::validation(format!("{name} must be positive, got {v}")));
            }
        }
        match self {
            NoiseModel::Pm1(p) => {
                for (name, v) in [("b1_hz", p.b1_hz), ("tau1_s", p.tau1_s), ("tau2_s", p.tau2_s), ("tau3_s", p.tau3_s)] {
                    if !(v > 0.0) {
                        return Err(Error::validation(format!("{name} must be positive, got {v}")));
                    }
                }
            }
            NoiseModel::Pm2(p) => {
                for (name, l, u) in [
                    ("alpha", p.lambda_alpha_l_hz, p.lambda_alpha_u_hz),
                    ("beta1", p.lambda_beta1_l_hz, p.lambda_beta1_u_hz),
                    ("beta2", p.lambda_beta2_l_hz, p.lambda_beta2_u_hz),
                    ("gamma", p.lambda_gamma_l_hz, p.lambda_gamma_u_hz),
                ] {
                    if !(l > 0.0 && u > l) {
                        return Err(Error::validation(format!("{name} cutoffs need 0 < lower < upper")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Noise sources in the order used by the Hamiltonian terms: per qubit
    /// (α, β1, β2) for PM2 or (α, β) for PM1, then the coupling noise γ.
    pub fn sources(&self, n_qubits: usize) -> Vec<NoiseSource> {
        let mut out = Vec::new();
        match self {
            NoiseModel::Pm2(p) => {
                for q in 0..n_qubits {
                    for (name, g, l, u) in [
                        ("alpha", p.gamma_alpha_hz, p.lambda_alpha_l_hz, p.lambda_alpha_u_hz),
                        ("beta1", p.gamma_beta1_hz, p.lambda_beta1_l_hz, p.lambda_beta1_u_hz),
                        ("beta2", p.gamma_beta2_hz, p.lambda_beta2_l_hz, p.lambda_beta2_u_hz),
                    ] {
                        out.push(NoiseSource { name: format!("{name}[{q}]"), acf: Acf::one_over_f(g, l, u) });
                    }
                }
                if n_qubits == 2 {
                    out.push(NoiseSource {
                        name: "gamma".into(),
                        acf: Acf::one_over_f(p.gamma_gamma_hz, p.lambda_gamma_l_hz, p.lambda_gamma_u_hz),
                    });
                }
            }
            NoiseModel::Pm1(p) => {
                let alpha = Acf {
                    white: p.gamma_alpha1_hz.powi(2),
                    colored: vec![(
                        p.gamma_alpha2_hz.powi(2),
                        Kernel::Stretched { tau1: p.tau1_s, tau2: p.tau2_s, tau3: p.tau3_s },
                    )],
                };
                let beta = Acf { white: p.gamma_beta2_hz.powi(2), colored: vec![(p.gamma_beta1_hz.powi(2), Kernel::Constant)] };
                for q in 0..n_qubits {
                    out.push(NoiseSource { name: format!("alpha[{q}]"), acf: alpha.clone() });
                    out.push(NoiseSource { name: format!("beta[{q}]"), acf: beta.clone() });
                }
                if n_qubits == 2 {
                    out.push(NoiseSource { name: "gamma".into(), acf: Acf::white(p.gamma_gamma_hz.powi(2)) });
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        NoiseModel::Pm1(Pm1Params::gs1()).validate().unwrap();
        NoiseModel::Pm2(Pm2Params::gs2()).validate().unwrap();
        NoiseModel::Pm2(Pm2Params::gs3()).validate().unwrap();
        NoiseModel::Pm2(Pm2Params::noiseless()).validate().unwrap();
    }

    #[test]
    fn gs3_differs_from_gs2_only_in_noise() {
        let (a, b) = (Pm2Params::gs2(), Pm2Params::gs3());
        assert_eq!((a.a_max_hz, a.b_max_hz, a.c_max_hz, a.dt_s), (b.a_max_hz, b.b_max_hz, b.c_max_hz, b.dt_s));
        assert_eq!(b.t1_s, 1e-5);
        assert_eq!(b.gamma_alpha_hz, 0.0);
    }

    #[test]
    fn source_layout() {
        let m = NoiseModel::Pm2(Pm2Params::gs3());
        let s = m.sources(2);
        assert_eq!(s.len(), 7);
        assert_eq!(s[5].name, "beta2[1]");
        assert_eq!(s[6].name, "gamma");
        let p = NoiseModel::Pm1(Pm1Params::gs1()).sources(1);
        assert_eq!(p.len(), 2);
        assert_eq!(p[1].acf.white, 4.804e6f64.powi(2));
    }

    #[test]
    fn json_round_trip_and_missing_key() {
        let m = NoiseModel::Pm2(Pm2Params::gs3());
        let text = serde_json::to_string(&m).unwrap();
        assert!(text.contains("\"model\":\"pm2\""));
        let back: NoiseModel = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v.as_object_mut().unwrap().remove("t1_s");
        let err = serde_json::from_value::<NoiseModel>(v).unwrap_err().to_string();
        assert!(err.contains("t1_s"), "{err}");
    }

    #[test]
    fn negative_cutoff_rejected() {
        let mut p = Pm2Params::gs2();
        p.lambda_beta2_l_hz = -1.0;
        assert!(NoiseModel::Pm2(p).validate().is_err());
    }
}
