//! Per-gate statistics of a gate set, optionally against a reference set.

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::metrics::{diamond_distance, hedging_stats};
use crate::physics::{GateName, GateSet};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateStatsRow {
    pub gate: GateName,
    /// χ₀₀ of the error ℰ = Λ∘U†.
    pub chi00: f64,
    /// ‖Λ − U‖⋄.
    pub diamond_to_ideal: f64,
    /// ‖Λ − Λ_ref‖⋄.
    pub diamond_to_reference: Option<f64>,
    /// Hedging of this error against the reference error.
    pub mean_h: Option<f64>,
    pub p_viol: Option<f64>,
    pub bloch_t_norm: f64,
}

pub fn gate_stats_table(gs: &GateSet, reference: Option<&GateSet>, n_samples: usize, seed: u64) -> Result<Vec<GateStatsRow>> {
    gs.gates
        .iter()
        .map(|g| {
            let e = g.error();
            let mut row = GateStatsRow {
                gate: g.name,
                chi00: e.chi00(),
                diamond_to_ideal: diamond_distance(&g.channel, &Channel::unitary(&g.ideal))?,
                diamond_to_reference: None,
                mean_h: None,
                p_viol: None,
                bloch_t_norm: e.to_bloch().t.norm(),
            };
            if let Some(r) = reference {
                let rg = r.get(g.name).ok_or_else(|| Error::validation(format!("reference gate set has no {}", g.name)))?;
                row.diamond_to_reference = Some(diamond_distance(&g.channel, &rg.channel)?);
                let h = hedging_stats(&e, &rg.error(), n_samples, seed)?;
                row.mean_h = Some(h.mean_h);
                row.p_viol = Some(h.p_viol);
            }
            Ok(row)
        })
        .collect()
}
