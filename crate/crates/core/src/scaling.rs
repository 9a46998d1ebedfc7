//! Adaptation loss law and adapter arithmetic.
//!
//! The base law sums four power-law resource terms and an irreducible floor:
//!
//! ```text
//! L = α·M^−β + γ·D^−δ + η·R^−ρ + κ·P^−π + ε
//! ```
//!
//! The coupled form subtracts `λ·ln(1+D·P) + μ·ln(1+R·P) + ν·ln(1+D·R)`.
//! `D` and `P` are floored before the power terms because both may be zero;
//! the logarithms use the raw values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::profiles::Regime;
use crate::scalar::{in_unit, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct ScalingParams<T = f64> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
    pub delta: T,
    pub eta: T,
    pub rho: T,
    pub kappa: T,
    pub pi_exp: T,
    pub epsilon: T,
    #[serde(default = "T::zero")]
    pub lambda_dp: T,
    #[serde(default = "T::zero")]
    pub mu_rp: T,
    #[serde(default = "T::zero")]
    pub nu_dr: T,
}

impl<T: Scalar> ScalingParams<T> {
    /// Parameters whose prediction is the constant `epsilon`. Exponents are 1.
    pub fn constant(epsilon: T) -> Self {
        ScalingParams {
            alpha: T::zero(),
            beta: T::one(),
            gamma: T::zero(),
            delta: T::one(),
            eta: T::zero(),
            rho: T::one(),
            kappa: T::zero(),
            pi_exp: T::one(),
            epsilon,
            lambda_dp: T::zero(),
            mu_rp: T::zero(),
            nu_dr: T::zero(),
        }
    }

    pub fn has_interactions(&self) -> bool {
        self.lambda_dp != T::zero() || self.mu_rp != T::zero() || self.nu_dr != T::zero()
    }

    pub fn validate(&self) -> Result<()> {
        let coefficients = [
            ("alpha", self.alpha),
            ("gamma", self.gamma),
            ("eta", self.eta),
            ("kappa", self.kappa),
            ("epsilon", self.epsilon),
            ("lambda_dp", self.lambda_dp),
            ("mu_rp", self.mu_rp),
            ("nu_dr", self.nu_dr),
        ];
        for (field, v) in coefficients {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(Error::invalid(
                    "scaling params",
                    field,
                    format!("must be finite and >= 0 (got {v})"),
                ));
            }
        }
        for (field, v) in [
            ("beta", self.beta),
            ("delta", self.delta),
            ("rho", self.rho),
            ("pi_exp", self.pi_exp),
        ] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::invalid(
                    "scaling params",
                    field,
                    format!("must be finite and > 0 (got {v})"),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptationInputs<T = f64> {
    /// Base model parameter count.
    pub model_capacity: T,
    pub data_tokens: T,
    /// Adapter rank or equivalent bandwidth.
    pub adapter_capacity: T,
    pub pretrain_repr: T,
}

impl<T: Scalar> AdaptationInputs<T> {
    pub fn new(model_capacity: T, data_tokens: T, adapter_capacity: T, pretrain_repr: T) -> Self {
        AdaptationInputs {
            model_capacity,
            data_tokens,
            adapter_capacity,
            pretrain_repr,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.model_capacity > T::zero()) || !self.model_capacity.is_finite() {
            return Err(Error::invalid("inputs", "model_capacity", "must be finite and > 0"));
        }
        if !(self.data_tokens >= T::zero()) || !self.data_tokens.is_finite() {
            return Err(Error::invalid("inputs", "data_tokens", "must be finite and >= 0"));
        }
        if !(self.adapter_capacity >= T::one()) || !self.adapter_capacity.is_finite() {
            return Err(Error::invalid("inputs", "adapter_capacity", "must be finite and >= 1"));
        }
        if !in_unit(self.pretrain_repr) {
            return Err(Error::invalid("inputs", "pretrain_repr", "must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// Lower bounds applied to `D` and `P` inside the power terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct SmoothingFloors<T = f64> {
    pub d_floor: T,
    pub p_floor: T,
}

impl<T: Scalar> Default for SmoothingFloors<T> {
    fn default() -> Self {
        SmoothingFloors {
            d_floor: T::one(),
            p_floor: T::lit(1e-6),
        }
    }
}

impl<T: Scalar> SmoothingFloors<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.d_floor > T::zero()) {
            return Err(Error::invalid("smoothing floors", "d_floor", "must be > 0"));
        }
        if !(self.p_floor > T::zero()) {
            return Err(Error::invalid("smoothing floors", "p_floor", "must be > 0"));
        }
        Ok(())
    }
}

/// Individual summands of the loss law, each with the sign it enters with
/// removed (coupling terms are reported as the positive amount subtracted).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossTerms<T> {
    pub capacity: T,
    pub data: T,
    pub adapter: T,
    pub pretrain: T,
    pub coupling_dp: T,
    pub coupling_rp: T,
    pub coupling_dr: T,
    pub epsilon: T,
}

impl<T: Scalar> LossTerms<T> {
    pub fn evaluate(p: &ScalingParams<T>, x: &AdaptationInputs<T>, f: &SmoothingFloors<T>) -> Self {
        let d_eff = x.data_tokens.max(f.d_floor);
        let p_eff = x.pretrain_repr.max(f.p_floor);
        LossTerms {
            capacity: p.alpha * x.model_capacity.powf(-p.beta),
            data: p.gamma * d_eff.powf(-p.delta),
            adapter: p.eta * x.adapter_capacity.powf(-p.rho),
            pretrain: p.kappa * p_eff.powf(-p.pi_exp),
            coupling_dp: p.lambda_dp * (x.data_tokens * x.pretrain_repr).ln_1p(),
            coupling_rp: p.mu_rp * (x.adapter_capacity * x.pretrain_repr).ln_1p(),
            coupling_dr: p.nu_dr * (x.data_tokens * x.adapter_capacity).ln_1p(),
            epsilon: p.epsilon,
        }
    }

    pub fn base(&self) -> T {
        self.capacity + self.data + self.adapter + self.pretrain + self.epsilon
    }

    pub fn coupled(&self) -> T {
        self.base() - (self.coupling_dp + self.coupling_rp + self.coupling_dr)
    }
}

pub fn base_loss<T: Scalar>(p: &ScalingParams<T>, x: &AdaptationInputs<T>, f: &SmoothingFloors<T>) -> T {
    LossTerms::evaluate(p, x, f).base()
}

pub fn interaction_loss<T: Scalar>(p: &ScalingParams<T>, x: &AdaptationInputs<T>, f: &SmoothingFloors<T>) -> T {
    LossTerms::evaluate(p, x, f).coupled()
}

/// Extreme-low-resource languages drop the coupling terms; other regimes keep them.
pub fn regime_loss<T: Scalar>(
    p: &ScalingParams<T>,
    x: &AdaptationInputs<T>,
    f: &SmoothingFloors<T>,
    regime: Regime,
) -> T {
    match regime {
        Regime::ExtremeLow => base_loss(p, x, f),
        Regime::Low | Regime::Moderate => interaction_loss(p, x, f),
    }
}

/// Derivative of the coupled loss with respect to the data volume.
///
/// Zero contribution from the power term below `d_floor`, where it is flat.
pub fn interaction_loss_d_data<T: Scalar>(p: &ScalingParams<T>, x: &AdaptationInputs<T>, f: &SmoothingFloors<T>) -> T {
    let d = x.data_tokens;
    let power = if d > f.d_floor {
        -p.gamma * p.delta * d.powf(-p.delta - T::one())
    } else {
        T::zero()
    };
    let pr = x.pretrain_repr;
    let r = x.adapter_capacity;
    power - p.lambda_dp * pr / (T::one() + d * pr) - p.nu_dr * r / (T::one() + d * r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoraParamCount {
    pub trainable: u64,
    pub full: u64,
    /// `trainable / full`.
    pub ratio: f64,
}

/// Trainable parameters of a rank-`r` update `B·A` to a `d × k` matrix versus full fine-tuning.
pub fn lora_param_count(d: usize, k: usize, r: usize) -> Result<LoraParamCount> {
    if d == 0 || k == 0 {
        return Err(Error::DimensionMismatch(format!(
            "matrix shape {d}x{k} must be nonempty"
        )));
    }
    let max = d.min(k);
    if r == 0 || r > max {
        return Err(Error::RankOutOfRange { rank: r, max });
    }
    let trainable = (r as u64) * (d as u64 + k as u64);
    let full = d as u64 * k as u64;
    Ok(LoraParamCount {
        trainable,
        full,
        ratio: trainable as f64 / full as f64,
    })
}

/// `W + B·A` for `W: d×k`, `B: d×r`, `A: r×k`. `W` is not modified.
pub fn apply_low_rank_update<T: Scalar>(w: &Matrix<T>, b: &Matrix<T>, a: &Matrix<T>) -> Result<Matrix<T>> {
    if b.rows() != w.rows() || a.cols() != w.cols() || b.cols() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "W is {}x{}, B is {}x{}, A is {}x{}",
            w.rows(),
            w.cols(),
            b.rows(),
            b.cols(),
            a.rows(),
            a.cols()
        )));
    }
    w.add(&b.matmul(a)?)
}

/// Mean number of subword tokens per word.
pub fn fertility<T: Scalar>(tokens_per_word: &[u32]) -> Result<T> {
    if tokens_per_word.is_empty() {
        return Err(Error::EmptyInput("token counts"));
    }
    if let Some(i) = tokens_per_word.iter().position(|&c| c == 0) {
        return Err(Error::invalid(
            format!("word {i}"),
            "tokens",
            "every word yields at least one token",
        ));
    }
    let total: u64 = tokens_per_word.iter().map(|&c| u64::from(c)).sum();
    Ok(T::from_u64(total).unwrap() / T::from_usize(tokens_per_word.len()).unwrap())
}
