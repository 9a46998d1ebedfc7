use std::path::Path;

use langadapt::fitting::FitConfig;
use langadapt::forgetting::ForgettingCoeffs;
use langadapt::planner::ParamsSpec;
use langadapt::profiles::RegimeThresholds;
use langadapt::scaling::SmoothingFloors;
use langadapt::transfer::CteConfig;
use langadapt::ttc::TtcWeights;
use serde::Deserialize;

use crate::CliError;

/// Shared settings file passed with `--config`. Command-line flags win over it.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub ttc_weights: Option<TtcWeights>,
    #[serde(default)]
    pub floors: SmoothingFloors,
    #[serde(default)]
    pub forgetting: ForgettingCoeffs,
    #[serde(default)]
    pub cte: CteConfig,
    #[serde(default)]
    pub fit: FitConfig,
    #[serde(default)]
    pub regime_thresholds: RegimeThresholds,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Config, CliError> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let text = read(path)?;
        let cfg: Config =
            toml::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        cfg.floors.validate()?;
        cfg.forgetting.validate()?;
        cfg.cte.validate()?;
        cfg.regime_thresholds.validate()?;
        if let Some(w) = &cfg.ttc_weights {
            w.validate()?;
        }
        Ok(cfg)
    }
}

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Parses a JSON or TOML document (by extension) into a JSON value.
fn document(path: &Path) -> Result<serde_json::Value, CliError> {
    let text = read(path)?;
    let bad = |e: String| CliError::Validation(format!("{}: {e}", path.display()));
    if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| bad(e.to_string()))
    } else {
        let v: toml::Value = toml::from_str(&text).map_err(|e| bad(e.to_string()))?;
        serde_json::to_value(v).map_err(|e| bad(e.to_string()))
    }
}

/// Loads scaling parameters: a bare parameter set, a per-language map of
/// them, or a fit report whose `params` field is used.
pub fn load_params(path: &Path) -> Result<ParamsSpec, CliError> {
    let mut doc = document(path)?;
    if let Some(inner) = doc.get_mut("params").filter(|v| v.is_object()) {
        doc = inner.take();
    }
    let spec: ParamsSpec =
        serde_json::from_value(doc).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    match &spec {
        ParamsSpec::Shared(p) => p.validate()?,
        ParamsSpec::PerLanguage(m) => {
            for p in m.values() {
                p.validate()?;
            }
        }
    }
    Ok(spec)
}
