//! Logistic catastrophic-forgetting risk.
//!
//! ```text
//! F = σ(a·R + b·g(D) + c·(1 − P) + d·U − e·T)
//! ```
//!
//! `g` is the data-volume transform applied before the logit, `log10(1 + D)`
//! by default, since raw token counts saturate the logistic for any
//! nonzero `b`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::ProfileSet;
use crate::scalar::{in_unit, Scalar};
use crate::ttc::TtcMatrix;

/// `1 / (1 + e^−x)`, evaluated without overflow for any finite `x`.
#[inline]
pub fn logistic<T: Scalar>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

/// How the data volume enters the logit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataTransform {
    Raw,
    #[default]
    Log10OnePlus,
}

impl DataTransform {
    pub fn apply<T: Scalar>(self, d: T) -> T {
        match self {
            DataTransform::Raw => d,
            DataTransform::Log10OnePlus => d.ln_1p() / T::lit(std::f64::consts::LN_10),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct ForgettingCoeffs<T = f64> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
    pub e: T,
    pub data_transform: DataTransform,
}

impl<T: Scalar> Default for ForgettingCoeffs<T> {
    fn default() -> Self {
        ForgettingCoeffs {
            a: T::zero(),
            b: T::zero(),
            c: T::zero(),
            d: T::zero(),
            e: T::zero(),
            data_transform: DataTransform::default(),
        }
    }
}

impl<T: Scalar> ForgettingCoeffs<T> {
    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("a", self.a),
            ("b", self.b),
            ("c", self.c),
            ("d", self.d),
            ("e", self.e),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid("forgetting coefficients", field, "must be finite"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForgettingInputs<T = f64> {
    pub adapter_capacity: T,
    pub data_tokens: T,
    pub pretrain_repr: T,
    /// Novelty of the adaptation relative to what the model already knows.
    pub novelty: T,
    /// Support available from related, already-represented languages.
    pub transfer_support: T,
}

impl<T: Scalar> ForgettingInputs<T> {
    /// Inputs with novelty defaulted to `1 − pretrain_repr`.
    pub fn new(adapter_capacity: T, data_tokens: T, pretrain_repr: T, transfer_support: T) -> Self {
        ForgettingInputs {
            adapter_capacity,
            data_tokens,
            pretrain_repr,
            novelty: T::one() - pretrain_repr,
            transfer_support,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.adapter_capacity >= T::one()) || !self.adapter_capacity.is_finite() {
            return Err(Error::invalid(
                "forgetting inputs",
                "adapter_capacity",
                "must be finite and >= 1",
            ));
        }
        if !(self.data_tokens >= T::zero()) || !self.data_tokens.is_finite() {
            return Err(Error::invalid(
                "forgetting inputs",
                "data_tokens",
                "must be finite and >= 0",
            ));
        }
        for (field, v) in [
            ("pretrain_repr", self.pretrain_repr),
            ("novelty", self.novelty),
            ("transfer_support", self.transfer_support),
        ] {
            if !in_unit(v) {
                return Err(Error::invalid("forgetting inputs", field, "must lie in [0, 1]"));
            }
        }
        Ok(())
    }
}

pub fn forgetting_logit<T: Scalar>(k: &ForgettingCoeffs<T>, x: &ForgettingInputs<T>) -> T {
    k.a * x.adapter_capacity
        + k.b * k.data_transform.apply(x.data_tokens)
        + k.c * (T::one() - x.pretrain_repr)
        + k.d * x.novelty
        - k.e * x.transfer_support
}

pub fn forgetting_risk<T: Scalar>(k: &ForgettingCoeffs<T>, x: &ForgettingInputs<T>) -> T {
    logistic(forgetting_logit(k, x))
}

/// Default representation level at which a source language counts fully.
pub const DEFAULT_P_REF: f64 = 0.01;

/// Best gated similarity from any other language:
/// `max_s TTC(s, target) · min(1, P_s / p_ref)`, clamped to [0, 1].
/// A family with no other language yields 0.
pub fn derive_transfer_support<T: Scalar>(
    m: &TtcMatrix<T>,
    profiles: &ProfileSet<T>,
    target: &str,
    p_ref: T,
) -> Result<T> {
    if !(p_ref > T::zero()) {
        return Err(Error::invalid("transfer support", "p_ref", "must be > 0"));
    }
    let t = m.index_of(target)?;
    if profiles.get(target).is_none() {
        return Err(Error::UnknownLanguage(target.to_string()));
    }
    let mut best = T::zero();
    for (s, id) in m.languages().iter().enumerate() {
        if s == t {
            continue;
        }
        let source = profiles.get(id).ok_or_else(|| Error::UnknownLanguage(id.clone()))?;
        let gate = (source.pretrain_repr / p_ref).min(T::one());
        best = best.max(m.at(s, t) * gate);
    }
    Ok(best.max(T::zero()).min(T::one()))
}
