//! Per-language resource profiles, their file format, and resource-regime
//! classification.
//!
//! Profile files are TOML documents with one `[[profile]]` table per language:
//!
//! ```toml
//! [[profile]]
//! id = "gz"
//! name = "Gagauz"
//! script = "latin"        # latin | cyrillic | mixed
//! pretrain_repr = 0.0     # fraction of the pretraining corpus, in [0, 1]
//! data_tokens = 5.0e5     # adaptation tokens, >= 0
//! ortho_stability = 0.6   # in [0, 1], 1 = fully standardised orthography
//! ```
//!
//! The machine-readable schema lives in `schemas/profiles.schema.json`.

use std::collections::HashSet;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{read_file, Error, Result};
use crate::scalar::{in_unit, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Script {
    Latin,
    Cyrillic,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LanguageProfile<T = f64> {
    pub id: String,
    pub name: String,
    pub script: Script,
    /// Share of the pretraining corpus written in this language.
    pub pretrain_repr: T,
    /// Adaptation data volume in tokens.
    pub data_tokens: T,
    pub ortho_stability: T,
}

impl<T: Scalar> LanguageProfile<T> {
    pub fn validate(&self) -> Result<()> {
        let record = format!("profile `{}`", self.id);
        if self.id.trim().is_empty() {
            return Err(Error::invalid("profile", "id", "must be nonempty"));
        }
        if !in_unit(self.pretrain_repr) {
            return Err(Error::invalid(
                record,
                "pretrain_repr",
                format!("must lie in [0, 1] (got {})", self.pretrain_repr),
            ));
        }
        if !(self.data_tokens >= T::zero()) || !self.data_tokens.is_finite() {
            return Err(Error::invalid(
                record,
                "data_tokens",
                format!("must be a finite count >= 0 (got {})", self.data_tokens),
            ));
        }
        if !in_unit(self.ortho_stability) {
            return Err(Error::invalid(
                record,
                "ortho_stability",
                format!("must lie in [0, 1] (got {})", self.ortho_stability),
            ));
        }
        Ok(())
    }
}

/// A nonempty, duplicate-free, ordered collection of profiles.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ProfileSet<T = f64> {
    profiles: Vec<LanguageProfile<T>>,
}

impl<T: Scalar> ProfileSet<T> {
    pub fn new(profiles: Vec<LanguageProfile<T>>) -> Result<Self> {
        if profiles.is_empty() {
            return Err(Error::EmptyInput("profile set"));
        }
        let mut seen = HashSet::new();
        for p in &profiles {
            p.validate()?;
            if !seen.insert(p.id.as_str()) {
                return Err(Error::DuplicateId(p.id.clone()));
            }
        }
        Ok(ProfileSet { profiles })
    }

    pub fn get(&self, id: &str) -> Option<&LanguageProfile<T>> {
        self.profiles.iter().find(|p| p.id == id)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, LanguageProfile<T>> {
        self.profiles.iter()
    }

    pub fn ids(&self) -> Vec<String> {
        self.profiles.iter().map(|p| p.id.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn as_slice(&self) -> &[LanguageProfile<T>] {
        &self.profiles
    }
}

impl<'de, T: Scalar + Deserialize<'de>> Deserialize<'de> for ProfileSet<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let profiles = Vec::<LanguageProfile<T>>::deserialize(d)?;
        ProfileSet::new(profiles).map_err(serde::de::Error::custom)
    }
}

impl<'a, T> IntoIterator for &'a ProfileSet<T> {
    type Item = &'a LanguageProfile<T>;
    type IntoIter = std::slice::Iter<'a, LanguageProfile<T>>;
    fn into_iter(self) -> Self::IntoIter {
        self.profiles.iter()
    }
}

#[derive(Serialize, Deserialize)]
struct ProfileDocument<T> {
    profile: Vec<LanguageProfile<T>>,
}

/// Parses a profile document from text. `context` names the source in errors.
pub fn parse_profiles<T: Scalar + DeserializeOwned>(text: &str, context: &str) -> Result<ProfileSet<T>> {
    let doc: ProfileDocument<T> = toml::from_str(text).map_err(|e| Error::parse(context, e))?;
    ProfileSet::new(doc.profile)
}

pub fn load_profiles<T: Scalar + DeserializeOwned>(path: impl AsRef<Path>) -> Result<ProfileSet<T>> {
    let path = path.as_ref();
    parse_profiles(&read_file(path)?, &path.display().to_string())
}

pub fn profiles_to_string<T: Scalar + Serialize>(set: &ProfileSet<T>) -> Result<String> {
    let doc = ProfileDocument {
        profile: set.profiles.clone(),
    };
    toml::to_string(&doc).map_err(|e| Error::parse("profile serialisation", e))
}

pub fn save_profiles<T: Scalar + Serialize>(set: &ProfileSet<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, profiles_to_string(set)?).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    ExtremeLow,
    Low,
    Moderate,
}

/// Token-count boundaries between resource regimes. Boundary values classify upward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct RegimeThresholds<T = f64> {
    pub moderate_min_tokens: T,
    pub low_min_tokens: T,
}

impl<T: Scalar> Default for RegimeThresholds<T> {
    fn default() -> Self {
        RegimeThresholds {
            moderate_min_tokens: T::lit(1e8),
            low_min_tokens: T::lit(1e6),
        }
    }
}

impl<T: Scalar> RegimeThresholds<T> {
    pub fn new(moderate_min_tokens: T, low_min_tokens: T) -> Result<Self> {
        let t = RegimeThresholds {
            moderate_min_tokens,
            low_min_tokens,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.low_min_tokens > T::zero()) {
            return Err(Error::invalid("regime thresholds", "low_min_tokens", "must be > 0"));
        }
        if !(self.moderate_min_tokens > self.low_min_tokens) {
            return Err(Error::invalid(
                "regime thresholds",
                "moderate_min_tokens",
                "must exceed low_min_tokens",
            ));
        }
        Ok(())
    }
}

pub fn classify_regime<T: Scalar>(profile: &LanguageProfile<T>, thresholds: &RegimeThresholds<T>) -> Regime {
    classify_tokens(profile.data_tokens, thresholds)
}

pub fn classify_tokens<T: Scalar>(data_tokens: T, thresholds: &RegimeThresholds<T>) -> Regime {
    if data_tokens >= thresholds.moderate_min_tokens {
        Regime::Moderate
    } else if data_tokens >= thresholds.low_min_tokens {
        Regime::Low
    } else {
        Regime::ExtremeLow
    }
}
