//! Turkic Transfer Coefficient: a weighted similarity score for an ordered
//! language pair, family-wide matrices of it, and the distance derived from it.
//!
//! ```text
//! TTC(s,t) = w_m·M + w_l·L + w_s·S + w_r·R − w_o·O
//! ```
//!
//! The four similarity weights sum to one; the orthographic penalty weight
//! `w_o` is not part of that sum, so a self-pair scores exactly 1.

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{read_file, Error, Result};
use crate::scalar::{in_unit, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairComponents<T = f64> {
    pub morph_sim: T,
    pub lex_overlap: T,
    pub syn_sim: T,
    pub script_compat: T,
    pub ortho_penalty: T,
}

impl<T: Scalar> PairComponents<T> {
    /// Components of a language paired with itself.
    pub fn identity() -> Self {
        PairComponents {
            morph_sim: T::one(),
            lex_overlap: T::one(),
            syn_sim: T::one(),
            script_compat: T::one(),
            ortho_penalty: T::zero(),
        }
    }

    pub fn validate(&self, record: &str) -> Result<()> {
        for (field, v) in [
            ("morph_sim", self.morph_sim),
            ("lex_overlap", self.lex_overlap),
            ("syn_sim", self.syn_sim),
            ("script_compat", self.script_compat),
            ("ortho_penalty", self.ortho_penalty),
        ] {
            if !in_unit(v) {
                return Err(Error::invalid(record, field, format!("must lie in [0, 1] (got {v})")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TtcWeights<T = f64> {
    pub w_m: T,
    pub w_l: T,
    pub w_s: T,
    pub w_r: T,
    pub w_o: T,
}

impl<T: Scalar> Default for TtcWeights<T> {
    fn default() -> Self {
        TtcWeights {
            w_m: T::lit(0.3),
            w_l: T::lit(0.25),
            w_s: T::lit(0.25),
            w_r: T::lit(0.2),
            w_o: T::lit(0.1),
        }
    }
}

impl<T: Scalar> TtcWeights<T> {
    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("w_m", self.w_m),
            ("w_l", self.w_l),
            ("w_s", self.w_s),
            ("w_r", self.w_r),
            ("w_o", self.w_o),
        ] {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(Error::invalid(
                    "ttc weights",
                    field,
                    format!("must be finite and >= 0 (got {v})"),
                ));
            }
        }
        let sum = self.w_m + self.w_l + self.w_s + self.w_r;
        let tol = T::lit(1e-9).max(T::epsilon() * T::lit(4.0));
        if (sum - T::one()).abs() > tol {
            return Err(Error::WeightNormalization { sum: sum.as_f64() });
        }
        Ok(())
    }
}

pub fn ttc_pair<T: Scalar>(c: &PairComponents<T>, w: &TtcWeights<T>) -> Result<T> {
    w.validate()?;
    Ok(ttc_unchecked(c, w))
}

#[inline]
fn ttc_unchecked<T: Scalar>(c: &PairComponents<T>, w: &TtcWeights<T>) -> T {
    w.w_m * c.morph_sim + w.w_l * c.lex_overlap + w.w_s * c.syn_sim + w.w_r * c.script_compat - w.w_o * c.ortho_penalty
}

/// Components keyed by ordered `(source, target)` pair.
pub type PairTable<T = f64> = BTreeMap<(String, String), PairComponents<T>>;

/// Contents of a pairwise-component file: the language order and the table.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSet<T = f64> {
    pub languages: Vec<String>,
    pub pairs: PairTable<T>,
}

#[derive(Serialize, Deserialize)]
struct PairRecord<T> {
    source: String,
    target: String,
    #[serde(flatten)]
    components: PairComponents<T>,
}

#[derive(Serialize, Deserialize)]
struct ComponentDocument<T> {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    languages: Option<Vec<String>>,
    #[serde(default = "Vec::new")]
    pair: Vec<PairRecord<T>>,
}

/// Parses a component document. Without a `languages` list, languages are
/// ordered by first appearance.
pub fn parse_components<T: Scalar + DeserializeOwned>(text: &str, context: &str) -> Result<ComponentSet<T>> {
    let doc: ComponentDocument<T> = toml::from_str(text).map_err(|e| Error::parse(context, e))?;
    let mut pairs = PairTable::new();
    let mut seen_order = Vec::new();
    for rec in doc.pair {
        let name = format!("pair {}->{}", rec.source, rec.target);
        rec.components.validate(&name)?;
        for id in [&rec.source, &rec.target] {
            if !seen_order.contains(id) {
                seen_order.push(id.clone());
            }
        }
        if pairs
            .insert((rec.source.clone(), rec.target.clone()), rec.components)
            .is_some()
        {
            return Err(Error::invalid(name, "source/target", "appears more than once"));
        }
    }
    let languages = match doc.languages {
        Some(langs) => {
            if let Some(extra) = seen_order.iter().find(|id| !langs.contains(id)) {
                return Err(Error::UnknownLanguage(extra.clone()));
            }
            let mut uniq = std::collections::HashSet::new();
            if let Some(dup) = langs.iter().find(|id| !uniq.insert(id.as_str())) {
                return Err(Error::DuplicateId(dup.clone()));
            }
            langs
        }
        None => seen_order,
    };
    if languages.is_empty() {
        return Err(Error::EmptyInput("component file lists no languages"));
    }
    Ok(ComponentSet { languages, pairs })
}

pub fn load_components<T: Scalar + DeserializeOwned>(path: impl AsRef<Path>) -> Result<ComponentSet<T>> {
    let path = path.as_ref();
    parse_components(&read_file(path)?, &path.display().to_string())
}

pub fn parse_weights<T: Scalar + DeserializeOwned>(text: &str, context: &str) -> Result<TtcWeights<T>> {
    let w: TtcWeights<T> = toml::from_str(text).map_err(|e| Error::parse(context, e))?;
    w.validate()?;
    Ok(w)
}

pub fn load_weights<T: Scalar + DeserializeOwned>(path: impl AsRef<Path>) -> Result<TtcWeights<T>> {
    let path = path.as_ref();
    parse_weights(&read_file(path)?, &path.display().to_string())
}

/// Square matrix of TTC scores; row = source, column = target.
#[derive(Debug, Clone, PartialEq)]
pub struct TtcMatrix<T = f64> {
    languages: Vec<String>,
    values: Vec<T>,
}

#[derive(Serialize, Deserialize)]
struct MatrixJson<T> {
    languages: Vec<String>,
    values: Vec<Vec<T>>,
}

impl<T: Scalar> TtcMatrix<T> {
    /// Builds a matrix from explicit values; the diagonal must be exactly 1.
    pub fn from_rows(languages: Vec<String>, rows: Vec<Vec<T>>) -> Result<Self> {
        let n = languages.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!("TTC matrix must be {n}x{n}")));
        }
        for (i, id) in languages.iter().enumerate() {
            if rows[i][i] != T::one() {
                return Err(Error::invalid(
                    format!("ttc matrix row `{id}`"),
                    "diagonal",
                    "must equal 1",
                ));
            }
        }
        Ok(TtcMatrix {
            languages,
            values: rows.into_iter().flatten().collect(),
        })
    }

    pub fn languages(&self) -> &[String] {
        &self.languages
    }

    pub fn len(&self) -> usize {
        self.languages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.languages.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.languages
            .iter()
            .position(|l| l == id)
            .ok_or_else(|| Error::UnknownLanguage(id.to_string()))
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        self.values[i * self.languages.len() + j]
    }

    pub fn get(&self, source: &str, target: &str) -> Result<T> {
        Ok(self.at(self.index_of(source)?, self.index_of(target)?))
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        let n = self.len();
        (0..n).map(|i| self.values[i * n..(i + 1) * n].to_vec()).collect()
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        let n = self.len();
        (0..n).all(|i| (0..i).all(|j| (self.at(i, j) - self.at(j, i)).abs() <= tol))
    }

    /// CSV with a header row and a leading column of language ids.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("source");
        for l in &self.languages {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for (i, l) in self.languages.iter().enumerate() {
            out.push_str(l);
            for j in 0..self.len() {
                out.push_str(&format!(",{:?}", self.at(i, j).as_f64()));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String
    where
        T: Serialize,
    {
        let doc = MatrixJson {
            languages: self.languages.clone(),
            values: self.rows(),
        };
        serde_json::to_string_pretty(&doc).expect("matrix serialises")
    }

    pub fn from_json(text: &str) -> Result<Self>
    where
        T: DeserializeOwned,
    {
        let doc: MatrixJson<T> = serde_json::from_str(text).map_err(|e| Error::parse("ttc matrix json", e))?;
        TtcMatrix::from_rows(doc.languages, doc.values)
    }
}

/// Assembles the TTC matrix over `langs`. Every ordered pair of distinct
/// languages must have components; the diagonal is 1 by the self-pair convention.
pub fn ttc_matrix<T: Scalar>(pairs: &PairTable<T>, w: &TtcWeights<T>, langs: &[String]) -> Result<TtcMatrix<T>> {
    w.validate()?;
    let mut missing = Vec::new();
    let mut values = Vec::with_capacity(langs.len() * langs.len());
    for s in langs {
        for t in langs {
            if s == t {
                values.push(T::one());
                continue;
            }
            match pairs.get(&(s.clone(), t.clone())) {
                Some(c) => values.push(ttc_unchecked(c, w)),
                None => {
                    missing.push((s.clone(), t.clone()));
                    values.push(T::nan());
                }
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingPairs(missing));
    }
    Ok(TtcMatrix {
        languages: langs.to_vec(),
        values,
    })
}

/// Distance derived from the symmetrised coefficient: `1 − (TTC(s,t) + TTC(t,s)) / 2`.
pub fn distance<T: Scalar>(m: &TtcMatrix<T>, s: &str, t: &str) -> Result<T> {
    let (i, j) = (m.index_of(s)?, m.index_of(t)?);
    if i == j {
        return Ok(T::zero());
    }
    Ok(T::one() - (m.at(i, j) + m.at(j, i)) / T::two())
}
