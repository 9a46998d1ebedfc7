//! Models of multilingual adaptation for a low-resource language family.
//!
//! - [`scaling`]: the adaptation loss law, adapter arithmetic, tokenizer fertility
//! - [`fitting`]: least-squares estimation of the loss-law constants
//! - [`ttc`]: the Turkic Transfer Coefficient and its family matrix
//! - [`transfer`]: cross-lingual transfer efficiency
//! - [`forgetting`]: logistic forgetting risk
//! - [`planner`]: data-budget allocation and adapter-rank selection
//! - [`profiles`]: language resource profiles and regimes
//!
//! Every model is generic over [`Scalar`] (`f32` or `f64`); the `*F64` and
//! `*F32` aliases below fix the type.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod error;
pub mod fitting;
pub mod forgetting;
pub mod linalg;
pub mod planner;
pub mod profiles;
pub mod scalar;
pub mod scaling;
pub mod transfer;
pub mod ttc;

pub use error::{Error, Result};
pub use fitting::{fit_scaling, FitConfig, FitResult, Observation};
pub use forgetting::{forgetting_risk, logistic, ForgettingCoeffs, ForgettingInputs};
pub use linalg::Matrix;
pub use planner::{allocate_data_budget, select_rank, AllocationPlan, PlanRequest};
pub use profiles::{classify_regime, LanguageProfile, ProfileSet, Regime, RegimeThresholds};
pub use scalar::Scalar;
pub use scaling::{base_loss, interaction_loss, regime_loss, AdaptationInputs, ScalingParams, SmoothingFloors};
pub use transfer::{cte_distance_aware, cte_measured, cte_predicted, CteConfig, TransferObservation};
pub use ttc::{distance, ttc_matrix, ttc_pair, PairComponents, TtcMatrix, TtcWeights};

pub type ScalingParamsF64 = ScalingParams<f64>;
pub type ScalingParamsF32 = ScalingParams<f32>;
pub type AdaptationInputsF64 = AdaptationInputs<f64>;
pub type AdaptationInputsF32 = AdaptationInputs<f32>;
pub type TtcMatrixF64 = TtcMatrix<f64>;
pub type TtcMatrixF32 = TtcMatrix<f32>;
pub type PairComponentsF64 = PairComponents<f64>;
pub type PairComponentsF32 = PairComponents<f32>;
pub type ForgettingCoeffsF64 = ForgettingCoeffs<f64>;
pub type ForgettingCoeffsF32 = ForgettingCoeffs<f32>;
pub type ObservationF64 = Observation<f64>;
pub type ObservationF32 = Observation<f32>;
pub type PlanRequestF64 = PlanRequest<f64>;
pub type MatrixF64 = Matrix<f64>;
pub type MatrixF32 = Matrix<f32>;
