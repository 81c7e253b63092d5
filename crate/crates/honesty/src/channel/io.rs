//! JSON channel files: `{"n_qubits", "convention": "column-stacking", "superoperator"}`
//! with the superoperator stored row-major as `[re, im]` pairs.

use super::Channel;
use crate::error::{Error, Result};
use crate::linalg::{c, CMat};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const CONVENTION: &str = "column-stacking";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelFile {
    pub n_qubits: usize,
    pub convention: String,
    pub superoperator: Vec<Vec<[f64; 2]>>,
}

impl ChannelFile {
    pub fn from_channel(ch: &Channel) -> Self {
        let s = &ch.superop;
        let superoperator = (0..s.nrows())
            .map(|r| (0..s.ncols()).map(|k| [s[(r, k)].re, s[(r, k)].im]).collect())
            .collect();
        ChannelFile { n_qubits: ch.n_qubits, convention: CONVENTION.into(), superoperator }
    }

    pub fn into_channel(self) -> Result<Channel> {
        if self.convention != CONVENTION {
            return Err(Error::validation(format!("unsupported convention '{}'", self.convention)));
        }
        let d2 = 1usize << (2 * self.n_qubits);
        if self.superoperator.len() != d2 || self.superoperator.iter().any(|r| r.len() != d2) {
            return Err(Error::Dimension { expected: d2, got: self.superoperator.len() });
        }
        let rows = &self.superoperator;
        let s = CMat::from_fn(d2, d2, |r, k| c(rows[r][k][0], rows[r][k][1]));
        Channel::from_superop_checked(self.n_qubits, s)
    }
}

pub fn to_json(ch: &Channel) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ChannelFile::from_channel(ch))?)
}

pub fn from_json(text: &str) -> Result<Channel> {
    let file: ChannelFile = serde_json::from_str(text)?;
    file.into_channel()
}

pub fn save(ch: &Channel, path: &Path) -> Result<()> {
    std::fs::write(path, to_json(ch)?)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<Channel> {
    from_json(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;

    #[test]
    fn round_trip_is_exact() {
        let ch = Channel::amplitude_damping(0.3);
        let back = from_json(&to_json(&ch).unwrap()).unwrap();
        assert_eq!(back.superop, ch.superop);
    }

    #[test]
    fn loader_rejects_non_tp() {
        let mut ch = Channel::identity(1);
        ch.superop[(0, 0)] = linalg::c(0.5, 0.0);
        let err = from_json(&to_json(&ch).unwrap()).unwrap_err();
        assert!(matches!(err, Error::NotTracePreserving { .. }));
    }

    #[test]
    fn loader_rejects_wrong_convention() {
        let text = to_json(&Channel::identity(1)).unwrap().replace(CONVENTION, "row-stacking");
        assert!(from_json(&text).is_err());
    }
}
