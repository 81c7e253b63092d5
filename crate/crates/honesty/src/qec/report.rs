//! Logical-channel statistics for the gate-set variants of one gadget.

use super::gadget::GadgetResult;
use crate::approx::Family;
use crate::channel::io::ChannelFile;
use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::metrics::{diamond_distance, hedging_stats};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    Original,
    PauliTwirled,
    Pauli,
    Clifford,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Original, Variant::PauliTwirled, Variant::Pauli, Variant::Clifford];

    pub fn family(&self) -> Option<Family> {
        match self {
            Variant::Original => None,
            Variant::PauliTwirled => Some(Family::Twirl),
            Variant::Pauli => Some(Family::Pauli),
            Variant::Clifford => Some(Family::Clifford),
        }
    }

    pub fn from_family(f: Option<Family>) -> Variant {
        match f {
            None => Variant::Original,
            Some(Family::Twirl) => Variant::PauliTwirled,
            Some(Family::Pauli) => Variant::Pauli,
            Some(Family::Clifford) => Variant::Clifford,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Variant::Original => "Original",
            Variant::PauliTwirled => "PauliTwirled",
            Variant::Pauli => "Pauli",
            Variant::Clifford => "Clifford",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantStats {
    pub variant: Variant,
    pub chi00: f64,
    pub diamond_to_ideal: f64,
    /// Absent for the original itself.
    pub diamond_to_original: Option<f64>,
    pub mean_h: Option<f64>,
    pub p_viol: Option<f64>,
    pub n_viol_significant: Option<usize>,
}

/// Statistics of each logical channel; hedging and the second distance are
/// taken against the `Original` entry when present.
pub fn gadget_stats(channels: &[(Variant, Channel)], n_samples: usize, seed: u64) -> Result<Vec<VariantStats>> {
    let original = channels.iter().find(|(v, _)| *v == Variant::Original).map(|(_, c)| c);
    let ideal = Channel::identity(1);
    channels
        .iter()
        .map(|(v, ch)| {
            let mut st = VariantStats {
                variant: *v,
                chi00: ch.chi00(),
                diamond_to_ideal: diamond_distance(ch, &ideal)?,
                diamond_to_original: None,
                mean_h: None,
                p_viol: None,
                n_viol_significant: None,
            };
            if let (Some(orig), false) = (original, *v == Variant::Original) {
                st.diamond_to_original = Some(diamond_distance(ch, orig)?);
                let h = hedging_stats(ch, orig, n_samples, seed)?;
                st.mean_h = Some(h.mean_h);
                st.p_viol = Some(h.p_viol);
                st.n_viol_significant = Some(h.n_viol_significant);
            }
            Ok(st)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantReport {
    pub variant: Variant,
    /// Logical Choi matrix (reference ⊗ logical, trace 2) as [re, im] pairs.
    pub choi: Vec<Vec<[f64; 2]>>,
    pub logical_channel: ChannelFile,
    pub branch_weights: Vec<f64>,
    pub stats: VariantStats,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GadgetReport {
    pub code: String,
    pub schedule_steps: usize,
    /// The data wait location shares its time step with ancilla preparation.
    pub wait_overlaps_preparation: bool,
    pub n_samples: usize,
    pub seed: u64,
    pub variants: Vec<VariantReport>,
}

fn matrix_pairs(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|k| [m[(r, k)].re, m[(r, k)].im]).collect()).collect()
}

impl GadgetReport {
    pub fn build(code: &str, schedule_steps: usize, results: &[(Variant, GadgetResult)], n_samples: usize, seed: u64) -> Result<Self> {
        if results.is_empty() {
            return Err(Error::validation("no gadget results to report"));
        }
        let channels: Vec<(Variant, Channel)> = results.iter().map(|(v, r)| (*v, r.channel.clone())).collect();
        let stats = gadget_stats(&channels, n_samples, seed)?;
        let variants = results
            .iter()
            .zip(stats)
            .map(|((v, r), stats)| VariantReport {
                variant: *v,
                choi: matrix_pairs(&r.choi),
                logical_channel: ChannelFile::from_channel(&r.channel),
                branch_weights: r.branch_weights.clone(),
                stats,
            })
            .collect();
        Ok(GadgetReport { code: code.into(), schedule_steps, wait_overlaps_preparation: true, n_samples, seed, variants })
    }

    /// One row per statistic, one column per variant; empty cells are blank.
    pub fn to_csv(&self) -> String {
        let cell = |x: Option<f64>| x.map(|v| format!("{v:.6e}")).unwrap_or_default();
        let mut out = String::from("statistic");
        for v in &self.variants {
            out.push(',');
            out.push_str(v.variant.label());
        }
        out.push('\n');
        let rows: [(&str, fn(&VariantStats) -> Option<f64>); 5] = [
            ("chi00", |s| Some(s.chi00)),
            ("diamond_to_ideal", |s| Some(s.diamond_to_ideal)),
            ("diamond_to_original", |s| s.diamond_to_original),
            ("mean_h", |s| s.mean_h),
            ("p_viol", |s| s.p_viol),
        ];
        for (name, get) in rows {
            out.push_str(name);
            for v in &self.variants {
                out.push(',');
                out.push_str(&cell(get(&v.stats)));
            }
            out.push('\n');
        }
        out
    }
}
