use honesty::physics::{ModelKind, NoiseModel, Pm1Params, Pm2Params};
use honesty::{Error, Result};
use serde::de::DeserializeOwned;
use std::path::Path;

fn parse<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    let is_toml = path.extension().is_some_and(|e| e == "toml");
    if is_toml {
        toml::from_str(&text).map_err(|e| Error::validation(format!("{}: {}", path.display(), e.message())))
    } else {
        serde_json::from_str(&text).map_err(|e| Error::validation(format!("{}: {e}", path.display())))
    }
}

/// Reads model parameters from TOML (by extension) or JSON.
pub fn load_model(kind: ModelKind, path: &Path) -> Result<NoiseModel> {
    let model = match kind {
        ModelKind::Pm1 => NoiseModel::Pm1(parse::<Pm1Params>(path)?),
        ModelKind::Pm2 => NoiseModel::Pm2(parse::<Pm2Params>(path)?),
    };
    model.validate()?;
    Ok(model)
}
