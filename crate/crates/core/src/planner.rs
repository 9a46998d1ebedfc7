//! Budget planning on top of the loss law.
//!
//! [`allocate_data_budget`] splits a token budget across languages so the
//! weighted sum of predicted losses is minimal. The coupled loss is convex
//! and decreasing in the data volume, so the optimum equalises the weighted
//! marginal gain `−w_i·∂L_i/∂D` across every language not held at a bound
//! (water-filling). The shared marginal level is found by bisection in log
//! space, each language's allocation at a given level by an inner bisection.
//! The result is then probed with pairwise transfers; if any transfer
//! improves the objective (the floored power term is flat below `d_floor`
//! and so not convex there), projected gradient descent takes over and the
//! plan is marked locally optimal.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forgetting::{forgetting_risk, ForgettingCoeffs, ForgettingInputs};
use crate::profiles::{LanguageProfile, ProfileSet};
use crate::scalar::Scalar;
use crate::scaling::{interaction_loss, interaction_loss_d_data, AdaptationInputs, ScalingParams, SmoothingFloors};

const OUTER_ITERATIONS: usize = 200;
const INNER_ITERATIONS: usize = 200;

/// One parameter set for the whole family, or one per language id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub enum ParamsSpec<T = f64> {
    Shared(ScalingParams<T>),
    PerLanguage(BTreeMap<String, ScalingParams<T>>),
}

impl<T: Scalar> ParamsSpec<T> {
    pub fn for_language(&self, id: &str) -> Result<&ScalingParams<T>> {
        match self {
            ParamsSpec::Shared(p) => Ok(p),
            ParamsSpec::PerLanguage(map) => map.get(id).ok_or_else(|| Error::UnknownLanguage(id.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct PlanRequest<T = f64> {
    pub profiles: ProfileSet<T>,
    pub params: ParamsSpec<T>,
    pub total_budget: T,
    #[serde(default = "T::zero")]
    pub min_per_language: T,
    pub model_capacity: T,
    pub adapter_capacity: T,
    /// Importance weights by language id; absent languages weigh 1.
    #[serde(default)]
    pub weights: BTreeMap<String, T>,
    #[serde(default)]
    pub floors: SmoothingFloors<T>,
}

impl<T: Scalar> PlanRequest<T> {
    pub fn weight(&self, id: &str) -> T {
        self.weights.get(id).copied().unwrap_or_else(T::one)
    }

    pub fn validate(&self) -> Result<()> {
        let n = T::from_usize(self.profiles.len()).unwrap();
        if !(self.total_budget > T::zero()) || !self.total_budget.is_finite() {
            return Err(Error::invalid("plan request", "total_budget", "must be finite and > 0"));
        }
        if !(self.min_per_language >= T::zero()) || !self.min_per_language.is_finite() {
            return Err(Error::invalid(
                "plan request",
                "min_per_language",
                "must be finite and >= 0",
            ));
        }
        let required = self.min_per_language * n;
        if self.total_budget < required {
            return Err(Error::InfeasibleBudget {
                total: self.total_budget.as_f64(),
                required: required.as_f64(),
            });
        }
        for (id, &w) in &self.weights {
            if self.profiles.get(id).is_none() {
                return Err(Error::UnknownLanguage(id.clone()));
            }
            if !(w >= T::zero()) || !w.is_finite() {
                return Err(Error::invalid(
                    format!("weight `{id}`"),
                    "weight",
                    "must be finite and >= 0",
                ));
            }
        }
        for p in &self.profiles {
            self.params.for_language(&p.id)?.validate()?;
        }
        self.floors.validate()?;
        let probe = AdaptationInputs::new(self.model_capacity, T::zero(), self.adapter_capacity, T::zero());
        probe.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanStatus {
    Optimal,
    LocallyOptimal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LanguageAllocation<T = f64> {
    pub id: String,
    pub allocated_tokens: T,
    pub weight: T,
    pub loss_before: T,
    pub loss_after: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationPlan<T = f64> {
    pub allocations: Vec<LanguageAllocation<T>>,
    pub total_budget: T,
    pub aggregate_before: T,
    pub aggregate_after: T,
    pub status: PlanStatus,
}

impl<T: Scalar> AllocationPlan<T> {
    pub fn allocated(&self) -> Vec<T> {
        self.allocations.iter().map(|a| a.allocated_tokens).collect()
    }
}

/// Per-language view of the objective.
struct Lane<'a, T> {
    profile: &'a LanguageProfile<T>,
    params: &'a ScalingParams<T>,
    weight: T,
}

struct Problem<'a, T> {
    lanes: Vec<Lane<'a, T>>,
    model_capacity: T,
    adapter_capacity: T,
    floors: SmoothingFloors<T>,
    min: T,
    budget: T,
}

impl<'a, T: Scalar> Problem<'a, T> {
    fn inputs(&self, i: usize, extra: T) -> AdaptationInputs<T> {
        let p = self.lanes[i].profile;
        AdaptationInputs::new(
            self.model_capacity,
            p.data_tokens + extra,
            self.adapter_capacity,
            p.pretrain_repr,
        )
    }

    fn loss(&self, i: usize, extra: T) -> T {
        interaction_loss(self.lanes[i].params, &self.inputs(i, extra), &self.floors)
    }

    /// Weighted marginal loss reduction per extra token.
    fn gain(&self, i: usize, extra: T) -> T {
        -self.lanes[i].weight * interaction_loss_d_data(self.lanes[i].params, &self.inputs(i, extra), &self.floors)
    }

    fn objective(&self, x: &[T]) -> T {
        x.iter()
            .enumerate()
            .map(|(i, &xi)| self.lanes[i].weight * self.loss(i, xi))
            .sum()
    }

    fn cap(&self) -> T {
        let n = T::from_usize(self.lanes.len()).unwrap();
        self.budget - self.min * (n - T::one())
    }

    /// Allocation of lane `i` at marginal level `level`.
    fn response(&self, i: usize, level: T) -> T {
        let cap = self.cap();
        if self.gain(i, self.min) <= level {
            return self.min;
        }
        if self.gain(i, cap) >= level {
            return cap;
        }
        let (mut lo, mut hi) = (self.min, cap);
        for _ in 0..INNER_ITERATIONS {
            let mid = lo + (hi - lo) / T::two();
            if mid <= lo || mid >= hi {
                break;
            }
            if self.gain(i, mid) > level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo + (hi - lo) / T::two()
    }

    fn responses(&self, level: T) -> Vec<T> {
        (0..self.lanes.len()).map(|i| self.response(i, level)).collect()
    }

    fn water_fill(&self) -> Vec<T> {
        let n = self.lanes.len();
        let slack = self.budget - self.min * T::from_usize(n).unwrap();
        let top = (0..n).map(|i| self.gain(i, self.min)).fold(T::zero(), T::max);
        if !(top > T::zero()) {
            // Nobody benefits from data: spread the slack evenly.
            let share = slack / T::from_usize(n).unwrap();
            return vec![self.min + share; n];
        }
        let cap = self.cap();
        let bottom = (0..n)
            .map(|i| self.gain(i, cap))
            .filter(|g| *g > T::zero())
            .fold(top, T::min)
            .max(top * T::lit(1e-300));
        let (mut lo, mut hi) = (bottom.ln(), top.ln());
        for _ in 0..OUTER_ITERATIONS {
            let mid = (lo + hi) / T::two();
            if mid <= lo || mid >= hi {
                break;
            }
            let total: T = self.responses(mid.exp()).into_iter().sum();
            if total > self.budget {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut x = self.responses(hi.exp());
        self.settle(&mut x);
        x
    }

    /// Puts any rounding residual of the budget onto lanes with room left.
    fn settle(&self, x: &mut [T]) {
        let cap = self.cap();
        for _ in 0..4 {
            let residual = self.budget - x.iter().copied().sum::<T>();
            if residual == T::zero() {
                return;
            }
            let open: Vec<usize> = (0..x.len())
                .filter(|&i| {
                    if residual > T::zero() {
                        x[i] < cap
                    } else {
                        x[i] > self.min
                    }
                })
                .collect();
            if open.is_empty() {
                return;
            }
            let share = residual / T::from_usize(open.len()).unwrap();
            for i in open {
                x[i] = (x[i] + share).max(self.min).min(cap);
            }
        }
    }

    /// Best improving pairwise transfer from `x`, if any.
    fn improving_transfer(&self, x: &[T]) -> Option<Vec<T>> {
        let base = self.objective(x);
        let tol = base.abs() * T::lit(1e-12);
        let mut best: Option<(T, Vec<T>)> = None;
        for j in 0..x.len() {
            let room = x[j] - self.min;
            if !(room > T::zero()) {
                continue;
            }
            for frac in [1e-6, 1e-3, 0.1, 0.5, 1.0] {
                let amount = room * T::lit(frac);
                for i in 0..x.len() {
                    if i == j {
                        continue;
                    }
                    let mut y = x.to_vec();
                    y[j] = y[j] - amount;
                    y[i] = y[i] + amount;
                    let v = self.objective(&y);
                    if v < base - tol && best.as_ref().is_none_or(|(b, _)| v < *b) {
                        best = Some((v, y));
                    }
                }
            }
        }
        best.map(|(_, y)| y)
    }

    fn projected_gradient(&self, mut x: Vec<T>) -> Vec<T> {
        let mut step = self.budget * T::lit(1e-3);
        let mut value = self.objective(&x);
        for _ in 0..2000 {
            let grad: Vec<T> = (0..x.len()).map(|i| self.gain(i, x[i])).collect();
            let norm = grad.iter().map(|g| *g * *g).sum::<T>().sqrt();
            if !(norm > T::zero()) {
                break;
            }
            let mut moved = false;
            while step > self.budget * T::lit(1e-12) {
                let trial: Vec<T> = x.iter().zip(&grad).map(|(&xi, &g)| xi + step * g / norm).collect();
                let trial = project_capped_simplex(&trial, self.min, self.budget);
                let v = self.objective(&trial);
                if v < value {
                    x = trial;
                    value = v;
                    step = step * T::two();
                    moved = true;
                    break;
                }
                step = step / T::two();
            }
            if !moved {
                break;
            }
        }
        x
    }
}

/// Euclidean projection onto `{x : x_i >= min, Σx = budget}`.
fn project_capped_simplex<T: Scalar>(v: &[T], min: T, budget: T) -> Vec<T> {
    let shifted: Vec<T> = v.iter().map(|&x| x - min).collect();
    let radius = budget - min * T::from_usize(v.len()).unwrap();
    let mut sorted = shifted.clone();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumulative = T::zero();
    let mut theta = T::zero();
    for (k, &s) in sorted.iter().enumerate() {
        cumulative = cumulative + s;
        let t = (cumulative - radius) / T::from_usize(k + 1).unwrap();
        if s - t > T::zero() {
            theta = t;
        }
    }
    shifted.iter().map(|&s| (s - theta).max(T::zero()) + min).collect()
}

/// Minimises the weighted sum of predicted losses over feasible splits of the budget.
pub fn allocate_data_budget<T: Scalar>(req: &PlanRequest<T>) -> Result<AllocationPlan<T>> {
    req.validate()?;
    let lanes = req
        .profiles
        .iter()
        .map(|p| {
            Ok(Lane {
                profile: p,
                params: req.params.for_language(&p.id)?,
                weight: req.weight(&p.id),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let problem = Problem {
        lanes,
        model_capacity: req.model_capacity,
        adapter_capacity: req.adapter_capacity,
        floors: req.floors,
        min: req.min_per_language,
        budget: req.total_budget,
    };

    let mut x = problem.water_fill();
    let mut status = PlanStatus::Optimal;
    for _ in 0..16 {
        match problem.improving_transfer(&x) {
            Some(better) => {
                status = PlanStatus::LocallyOptimal;
                x = problem.projected_gradient(better);
                problem.settle(&mut x);
            }
            None => break,
        }
    }

    let allocations: Vec<LanguageAllocation<T>> = x
        .iter()
        .enumerate()
        .map(|(i, &xi)| LanguageAllocation {
            id: problem.lanes[i].profile.id.clone(),
            allocated_tokens: xi,
            weight: problem.lanes[i].weight,
            loss_before: problem.loss(i, T::zero()),
            loss_after: problem.loss(i, xi),
        })
        .collect();
    let aggregate_before = allocations.iter().map(|a| a.weight * a.loss_before).sum();
    let aggregate_after = allocations.iter().map(|a| a.weight * a.loss_after).sum();
    Ok(AllocationPlan {
        allocations,
        total_budget: req.total_budget,
        aggregate_before,
        aggregate_after,
        status,
    })
}

/// Weighted marginal gains `−w_i·∂L_i/∂D` at the planned allocations.
pub fn marginal_gains<T: Scalar>(req: &PlanRequest<T>, plan: &AllocationPlan<T>) -> Result<Vec<T>> {
    plan.allocations
        .iter()
        .map(|a| {
            let profile = req
                .profiles
                .get(&a.id)
                .ok_or_else(|| Error::UnknownLanguage(a.id.clone()))?;
            let x = AdaptationInputs::new(
                req.model_capacity,
                profile.data_tokens + a.allocated_tokens,
                req.adapter_capacity,
                profile.pretrain_repr,
            );
            Ok(-req.weight(&a.id) * interaction_loss_d_data(req.params.for_language(&a.id)?, &x, &req.floors))
        })
        .collect()
}

/// Fixed quantities for scoring adapter ranks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct RankContext<T = f64> {
    pub model_capacity: T,
    #[serde(default = "T::zero")]
    pub transfer_support: T,
    #[serde(default)]
    pub floors: SmoothingFloors<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankScore<T = f64> {
    pub rank: u32,
    pub loss: T,
    pub risk: T,
    pub score: T,
}

/// Scores `loss(r) + trade_weight · risk(r)` for each candidate rank and sorts
/// ascending, ties going to the smaller rank.
pub fn select_rank<T: Scalar>(
    profile: &LanguageProfile<T>,
    p: &ScalingParams<T>,
    k: &ForgettingCoeffs<T>,
    candidates: &[u32],
    trade_weight: T,
    ctx: &RankContext<T>,
) -> Result<Vec<RankScore<T>>> {
    if candidates.is_empty() {
        return Err(Error::EmptyInput("rank candidates"));
    }
    if let Some(&r) = candidates.iter().find(|&&r| r == 0) {
        return Err(Error::RankOutOfRange {
            rank: r as usize,
            max: u32::MAX as usize,
        });
    }
    if !(trade_weight >= T::zero()) {
        return Err(Error::invalid("rank selection", "trade_weight", "must be >= 0"));
    }
    let mut scored: Vec<RankScore<T>> = candidates
        .iter()
        .map(|&rank| {
            let r = T::from_u32(rank).unwrap();
            let x = AdaptationInputs::new(ctx.model_capacity, profile.data_tokens, r, profile.pretrain_repr);
            let loss = interaction_loss(p, &x, &ctx.floors);
            let risk = forgetting_risk(
                k,
                &ForgettingInputs::new(r, profile.data_tokens, profile.pretrain_repr, ctx.transfer_support),
            );
            RankScore {
                rank,
                loss,
                risk,
                score: loss + trade_weight * risk,
            }
        })
        .collect();
    scored.sort_by(|a, b| {
        a.score
            .partial_cmp(&b.score)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.rank.cmp(&b.rank))
    });
    Ok(scored)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::Script;

    fn params() -> ScalingParams {
        ScalingParams {
            alpha: 400.0,
            beta: 0.34,
            gamma: 50.0,
            delta: 0.28,
            eta: 1.0,
            rho: 0.5,
            kappa: 0.05,
            pi_exp: 0.3,
            epsilon: 1.5,
            lambda_dp: 0.01,
            mu_rp: 0.0,
            nu_dr: 0.001,
        }
    }

    fn profile(id: &str, p: f64, d: f64) -> LanguageProfile {
        LanguageProfile {
            id: id.into(),
            name: id.into(),
            script: Script::Latin,
            pretrain_repr: p,
            data_tokens: d,
            ortho_stability: 1.0,
        }
    }

    fn request(profiles: Vec<LanguageProfile>, budget: f64) -> PlanRequest {
        PlanRequest {
            profiles: ProfileSet::new(profiles).unwrap(),
            params: ParamsSpec::Shared(params()),
            total_budget: budget,
            min_per_language: 0.0,
            model_capacity: 7e9,
            adapter_capacity: 16.0,
            weights: BTreeMap::new(),
            floors: SmoothingFloors::default(),
        }
    }

    #[test]
    fn symmetric_pair_splits_evenly() {
        let req = request(vec![profile("a", 0.001, 1e5), profile("b", 0.001, 1e5)], 2e6);
        let plan = allocate_data_budget(&req).unwrap();
        let x = plan.allocated();
        assert!((x[0] - 1e6).abs() < 1.0 && (x[1] - 1e6).abs() < 1.0, "{x:?}");
        assert_eq!(plan.status, PlanStatus::Optimal);
    }

    #[test]
    fn single_language_takes_everything() {
        let plan = allocate_data_budget(&request(vec![profile("gz", 0.0, 5e5)], 3e6)).unwrap();
        assert!((plan.allocated()[0] - 3e6).abs() < 1.0);
        assert!(plan.aggregate_after < plan.aggregate_before);
    }

    #[test]
    fn infeasible_minimum_rejected() {
        let mut req = request(vec![profile("a", 0.0, 0.0), profile("b", 0.0, 0.0)], 1e6);
        req.min_per_language = 6e5;
        assert!(matches!(
            allocate_data_budget(&req),
            Err(Error::InfeasibleBudget { .. })
        ));
    }

    #[test]
    fn minima_respected() {
        let mut req = request(vec![profile("a", 0.01, 1e9), profile("b", 0.0, 0.0)], 1e6);
        req.min_per_language = 2e5;
        let plan = allocate_data_budget(&req).unwrap();
        assert!(plan.allocated().iter().all(|&x| x >= 2e5 - 1e-9));
        assert!((plan.allocated().iter().sum::<f64>() - 1e6).abs() < 1.0);
    }

    #[test]
    fn per_language_params_require_every_id() {
        let mut req = request(vec![profile("a", 0.0, 0.0), profile("b", 0.0, 0.0)], 1e6);
        req.params = ParamsSpec::PerLanguage(BTreeMap::from([("a".to_string(), params())]));
        assert!(matches!(allocate_data_budget(&req), Err(Error::UnknownLanguage(id)) if id == "b"));
    }

    #[test]
    fn flat_region_triggers_fallback() {
        // Below d_floor the power term is flat, so an even split of a budget
        // that only clears the floor when concentrated is not optimal.
        let mut req = request(vec![profile("a", 0.0, 0.0), profile("b", 0.0, 0.0)], 3e6);
        req.params = ParamsSpec::Shared(ScalingParams {
            gamma: 1.0,
            delta: 0.5,
            ..ScalingParams::constant(1.0)
        });
        req.floors = SmoothingFloors {
            d_floor: 1e6,
            p_floor: 1e-6,
        };
        let plan = allocate_data_budget(&req).unwrap();
        assert_eq!(plan.status, PlanStatus::LocallyOptimal);
        let even = 2.0 * (1.0 + (1.5e6f64).powf(-0.5));
        assert!(plan.aggregate_after < even);
    }

    #[test]
    fn projection_lands_on_feasible_set() {
        let y = project_capped_simplex(&[5.0, -3.0, 2.0], 1.0, 6.0);
        assert!((y.iter().sum::<f64>() - 6.0).abs() < 1e-12);
        assert!(y.iter().all(|&v| v >= 1.0));
    }

    #[test]
    fn request_json_round_trip() {
        let mut req = request(vec![profile("a", 0.001, 1e5), profile("b", 0.002, 3e5)], 2e6);
        req.weights.insert("b".into(), 2.0);
        let text = serde_json::to_string(&req).unwrap();
        let back: PlanRequest = serde_json::from_str(&text).unwrap();
        assert_eq!(back, req);
    }

    fn rank_profile() -> LanguageProfile {
        profile("tk", 0.0002, 2e7)
    }

    #[test]
    fn zero_trade_weight_orders_by_loss() {
        let k = ForgettingCoeffs {
            a: 0.05,
            ..ForgettingCoeffs::default()
        };
        let ctx = RankContext {
            model_capacity: 7e9,
            transfer_support: 0.0,
            floors: SmoothingFloors::default(),
        };
        let ranks = [64, 4, 16, 8, 256];
        let scored = select_rank(&rank_profile(), &params(), &k, &ranks, 0.0, &ctx).unwrap();
        assert!(scored.windows(2).all(|w| w[0].loss <= w[1].loss));
        assert_eq!(scored[0].rank, 256);
    }

    #[test]
    fn rank_insensitive_loss_prefers_smallest_rank() {
        let p = ScalingParams {
            eta: 0.0,
            mu_rp: 0.0,
            nu_dr: 0.0,
            ..params()
        };
        let k = ForgettingCoeffs {
            a: 0.05,
            ..ForgettingCoeffs::default()
        };
        let ctx = RankContext {
            model_capacity: 7e9,
            transfer_support: 0.3,
            floors: SmoothingFloors::default(),
        };
        let scored = select_rank(&rank_profile(), &p, &k, &[32, 8, 128, 16], 1.0, &ctx).unwrap();
        assert_eq!(scored[0].rank, 8);
        let single = select_rank(&rank_profile(), &p, &k, &[8], 3.0, &ctx).unwrap();
        assert_eq!(single.len(), 1);
        assert!(select_rank(&rank_profile(), &p, &k, &[], 1.0, &ctx).is_err());
    }
}
