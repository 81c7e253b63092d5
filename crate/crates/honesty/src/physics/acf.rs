//! Noise autocorrelation functions.

use serde::{Deserialize, Serialize};

/// Shape of a correlated noise component, scaled by its Γ² weight in [`Acf`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Kernel {
    /// Fourier transform of the smooth-cutoff 1/f spectrum between `lower` and `upper`.
    OneOverF { lower: f64, upper: f64 },
    /// exp(-(Δ/τ1)² + (Δ/τ2)⁴ - (Δ/τ3)⁶).
    Stretched { tau1: f64, tau2: f64, tau3: f64 },
    /// Quasi-static noise.
    Constant,
}

impl Kernel {
    pub fn value(&self, delta: f64) -> f64 {
        let delta = delta.abs();
        match *self {
            Kernel::OneOverF { lower, upper } => one_over_f(lower, upper, delta),
            Kernel::Stretched { tau1, tau2, tau3 } => {
                (-(delta / tau1).powi(2) + (delta / tau2).powi(4) - (delta / tau3).powi(6)).exp()
            }
            Kernel::Constant => 1.0,
        }
    }
}

/// g(Δ) = ∫ (2/πω)(arctan(ω/Λl) - arctan(ω/Λu)) e^{-iωΔ} dω.
///
/// Evaluated as 2∫ e^{-ΛΔ}/Λ dΛ over [Λl, Λu], integrated in u = ln Λ by
/// double-exponential quadrature with a split at the crossover ΛΔ = 1.
pub fn one_over_f(lower: f64, upper: f64, delta: f64) -> f64 {
    assert!(lower > 0.0 && upper > lower, "1/f cutoffs must satisfy 0 < lower < upper");
    let (a, b) = (lower.ln(), upper.ln());
    let delta = delta.abs();
    if delta == 0.0 {
        return 2.0 * (b - a);
    }
    let f = |u: f64| (-u.exp() * delta).exp();
    // e^{-e^6} is far below double precision, so the tail is dropped.
    let u0 = -delta.ln();
    let hi = b.min(u0 + 6.0);
    if hi <= a {
        return 0.0;
    }
    let tol = 1e-10 * (b - a);
    let mut total = 0.0;
    let mid = u0.clamp(a, hi);
    for (lo, up) in [(a, mid), (mid, hi)] {
        if up > lo {
            total += quadrature::integrate(f, lo, up, tol).integral;
        }
    }
    2.0 * total
}

/// A stationary autocorrelation: white part `white`·δ(Δ) plus weighted kernels.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Acf {
    pub white: f64,
    pub colored: Vec<(f64, Kernel)>,
}

impl Acf {
    pub fn white(weight: f64) -> Self {
        Acf { white: weight, colored: Vec::new() }
    }

    pub fn one_over_f(gamma: f64, lower: f64, upper: f64) -> Self {
        Acf { white: 0.0, colored: vec![(gamma * gamma, Kernel::OneOverF { lower, upper })] }
    }

    pub fn is_zero(&self) -> bool {
        self.white == 0.0 && self.colored.iter().all(|(w, _)| *w == 0.0)
    }

    /// Colored part at lag Δ.
    pub fn colored_value(&self, delta: f64) -> f64 {
        self.colored.iter().filter(|(w, _)| *w != 0.0).map(|(w, k)| w * k.value(delta)).sum()
    }

    /// Colored part on the lags 0, Δt, …, (n-1)Δt.
    pub fn grid(&self, dt: f64, n: usize) -> Vec<f64> {
        (0..n).map(|k| self.colored_value(k as f64 * dt)).collect()
    }

    /// First lag at which the colored part falls below 1/e of its zero-lag value,
    /// capped at `horizon`.
    pub fn correlation_time(&self, horizon: f64) -> f64 {
        let g0 = self.colored_value(0.0);
        if g0 <= 0.0 {
            return 0.0;
        }
        let (mut lo, mut hi) = (0.0, horizon);
        if self.colored_value(horizon) > g0 / std::f64::consts::E {
            return horizon;
        }
        for _ in 0..60 {
            let m = 0.5 * (lo + hi);
            if self.colored_value(m) > g0 / std::f64::consts::E {
                lo = m;
            } else {
                hi = m;
            }
        }
        hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// E1(x) by power series for small x and continued fraction otherwise.
    fn e1(x: f64) -> f64 {
        if x < 1.0 {
            let mut sum = 0.0;
            let mut term = 1.0;
            for k in 1..60 {
                term *= -x / k as f64;
                sum -= term / k as f64;
            }
            -0.577_215_664_901_532_9 - x.ln() + sum
        } else {
            let mut f = 0.0;
            for k in (1..200).rev() {
                let k = k as f64;
                f = k / (1.0 + k / (x + f));
            }
            (-x).exp() / (x + f)
        }
    }

    #[test]
    fn zero_lag_matches_trapezoid_on_spectrum() {
        let (l, u) = (1.0 / (2.0 * std::f64::consts::PI), 1e9);
        // 2∫₀^∞ S(ω) dω with ω = e^v, trapezoid on a wide log grid.
        let s = |w: f64| 2.0 / (std::f64::consts::PI * w) * ((w / l).atan() - (w / u).atan());
        let (v0, v1) = (l.ln() - 40.0, u.ln() + 40.0);
        let n = 400_000;
        let h = (v1 - v0) / n as f64;
        let mut acc = 0.0;
        for k in 0..=n {
            let w = (v0 + k as f64 * h).exp();
            let wt = if k == 0 || k == n { 0.5 } else { 1.0 };
            acc += wt * s(w) * w;
        }
        let oracle = 2.0 * acc * h;
        let g = one_over_f(l, u, 0.0);
        assert!((g - oracle).abs() / oracle < 1e-6, "{g} vs {oracle}");
    }

    #[test]
    fn positive_lags_match_exponential_integrals() {
        let (l, u) = (1.0 / (2.0 * std::f64::consts::PI), 1e9);
        for delta in [1e-12, 1e-10, 1e-9, 3.7e-9, 2.5e-8, 1.68e-7, 1e-3, 2.0] {
            let oracle = 2.0 * (e1(l * delta) - e1(u * delta));
            let g = one_over_f(l, u, delta);
            assert!((g - oracle).abs() <= 1e-8 * oracle.abs().max(1.0), "Δ={delta}: {g} vs {oracle}");
        }
    }

    #[test]
    fn stretched_kernel_and_white_part() {
        let k = Kernel::Stretched { tau1: 1e-2, tau2: 1e-3, tau3: 1e-4 };
        assert_eq!(k.value(0.0), 1.0);
        let d: f64 = 5e-5;
        let expect = (-(d / 1e-2).powi(2) + (d / 1e-3).powi(4) - (d / 1e-4).powi(6)).exp();
        assert!((k.value(-d) - expect).abs() < 1e-15);
        let a = Acf::white(3.0);
        assert_eq!(a.colored_value(0.0), 0.0);
        assert!(!a.is_zero());
    }

    #[test]
    fn correlation_time_of_constant_is_horizon() {
        let a = Acf { white: 0.0, colored: vec![(2.0, Kernel::Constant)] };
        assert_eq!(a.correlation_time(1e-7), 1e-7);
        let b = Acf { white: 0.0, colored: vec![(1.0, Kernel::Stretched { tau1: 1e-9, tau2: 1.0, tau3: 1.0 })] };
        assert!((b.correlation_time(1e-6) - 1e-9).abs() < 1e-15);
    }
}
