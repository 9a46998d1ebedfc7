//! Cross-lingual transfer efficiency: measured improvement per unit of source
//! adaptation cost, its distance-penalised form, and a similarity-based predictor.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{read_file, Error, Result};
use crate::profiles::LanguageProfile;
use crate::scalar::Scalar;
use crate::scaling::{ScalingParams, SmoothingFloors};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct CteConfig<T = f64> {
    /// Exponent on source data volume.
    pub omega: T,
    /// Exponent on adapter capacity.
    pub chi: T,
    /// Exponent on the distance penalty.
    pub tau: T,
    pub link_constant: T,
}

impl<T: Scalar> Default for CteConfig<T> {
    fn default() -> Self {
        CteConfig {
            omega: T::lit(0.5),
            chi: T::lit(0.5),
            tau: T::one(),
            link_constant: T::one(),
        }
    }
}

impl<T: Scalar> CteConfig<T> {
    pub fn validate(&self) -> Result<()> {
        for (field, v) in [("omega", self.omega), ("chi", self.chi), ("tau", self.tau)] {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(Error::invalid("cte config", field, "must be finite and >= 0"));
            }
        }
        if !(self.link_constant > T::zero()) || !self.link_constant.is_finite() {
            return Err(Error::invalid("cte config", "link_constant", "must be finite and > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferObservation<T = f64> {
    pub source: String,
    pub target: String,
    /// Improvement on the target attributable to adapting on the source, in task-metric units.
    pub delta_perf: T,
    pub source_data_tokens: T,
    pub adapter_capacity: T,
}

impl<T: Scalar> TransferObservation<T> {
    pub fn validate(&self) -> Result<()> {
        let record = format!("transfer {}->{}", self.source, self.target);
        if !self.delta_perf.is_finite() {
            return Err(Error::invalid(record, "delta_perf", "must be finite"));
        }
        if !(self.source_data_tokens > T::zero()) || !self.source_data_tokens.is_finite() {
            return Err(Error::invalid(record, "source_data_tokens", "must be finite and > 0"));
        }
        if !(self.adapter_capacity >= T::one()) || !self.adapter_capacity.is_finite() {
            return Err(Error::invalid(record, "adapter_capacity", "must be finite and >= 1"));
        }
        Ok(())
    }
}

/// `ΔP / (D_s^ω · R^χ)`. The sign of `delta_perf` is kept.
pub fn cte_measured<T: Scalar>(o: &TransferObservation<T>, cfg: &CteConfig<T>) -> T {
    o.delta_perf / (o.source_data_tokens.powf(cfg.omega) * o.adapter_capacity.powf(cfg.chi))
}

/// Measured CTE divided by `(1 + dist)^τ`.
pub fn cte_distance_aware<T: Scalar>(o: &TransferObservation<T>, dist: T, cfg: &CteConfig<T>) -> T {
    cte_measured(o, cfg) / (T::one() + dist).powf(cfg.tau)
}

/// Target-side transfer factor `1 / (1 + κ·P^−π + γ·D^−δ + η·R^−ρ)`, in (0, 1].
pub fn transfer_factor<T: Scalar>(
    pretrain_repr: T,
    data_tokens: T,
    adapter_capacity: T,
    p: &ScalingParams<T>,
    f: &SmoothingFloors<T>,
) -> T {
    let p_eff = pretrain_repr.max(f.p_floor);
    let d_eff = data_tokens.max(f.d_floor);
    let cost = p.kappa * p_eff.powf(-p.pi_exp) + p.gamma * d_eff.powf(-p.delta) + p.eta * adapter_capacity.powf(-p.rho);
    T::one() / (T::one() + cost)
}

/// `c · TTC · f(P_t, D_t, R)` using the target language's parameters.
pub fn cte_predicted<T: Scalar>(
    ttc: T,
    target: &LanguageProfile<T>,
    adapter_capacity: T,
    p: &ScalingParams<T>,
    f: &SmoothingFloors<T>,
    cfg: &CteConfig<T>,
) -> T {
    cfg.link_constant * ttc * transfer_factor(target.pretrain_repr, target.data_tokens, adapter_capacity, p, f)
}

/// One row of a CTE report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CteRecord<T = f64> {
    pub source: String,
    pub target: String,
    pub measured: T,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance_aware: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted: Option<T>,
}

/// Reads a CSV with header `source,target,delta_perf,source_data_tokens,adapter_capacity`.
pub fn read_transfer_csv<T: Scalar>(text: &str, context: &str) -> Result<Vec<TransferObservation<T>>> {
    #[derive(Deserialize)]
    struct Row {
        source: String,
        target: String,
        delta_perf: f64,
        source_data_tokens: f64,
        adapter_capacity: f64,
    }
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize::<Row>().enumerate() {
        let row = row.map_err(|e| Error::parse(format!("{context} row {}", i + 1), e))?;
        let o = TransferObservation {
            source: row.source,
            target: row.target,
            delta_perf: T::lit(row.delta_perf),
            source_data_tokens: T::lit(row.source_data_tokens),
            adapter_capacity: T::lit(row.adapter_capacity),
        };
        o.validate()?;
        out.push(o);
    }
    Ok(out)
}

pub fn load_transfer_observations<T: Scalar>(path: impl AsRef<Path>) -> Result<Vec<TransferObservation<T>>> {
    let path = path.as_ref();
    read_transfer_csv(&read_file(path)?, &path.display().to_string())
}

pub fn cte_report_csv<T: Scalar>(records: &[CteRecord<T>]) -> String {
    let opt = |v: Option<T>| v.map(|x| format!("{:?}", x.as_f64())).unwrap_or_default();
    let mut out = String::from("source,target,measured,distance_aware,predicted\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{:?},{},{}\n",
            r.source,
            r.target,
            r.measured.as_f64(),
            opt(r.distance_aware),
            opt(r.predicted)
        ));
    }
    out
}
