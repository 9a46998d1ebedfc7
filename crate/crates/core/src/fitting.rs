//! Least-squares estimation of [`ScalingParams`] from observed losses.
//!
//! Every fitted quantity is positive, so the solver works on `u = ln θ` and
//! runs unconstrained. The objective is the plain mean squared error of the
//! predicted loss. Minimisation is a damped Gauss-Newton (Levenberg-Marquardt)
//! iteration with multiplicative damping and Marquardt diagonal scaling; when
//! the damped normal matrix is too ill-conditioned the step falls back to
//! scaled steepest descent. Several independently seeded starts run in
//! parallel and the lowest objective wins, ties going to the lower index.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{read_file, Error, Result};
use crate::linalg::Cholesky;
use crate::scalar::Scalar;
use crate::scaling::{AdaptationInputs, LossTerms, ScalingParams, SmoothingFloors};

/// Free parameters of the base law.
pub const BASE_PARAMETERS: usize = 9;
/// Free parameters when the coupling coefficients are fitted too.
pub const INTERACTION_PARAMETERS: usize = 12;

const CONDITION_LIMIT: f64 = 1e12;
const DAMPING_UP: f64 = 4.0;
const DAMPING_DOWN: f64 = 1.0 / 3.0;
const DAMPING_MAX: f64 = 1e16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct Observation<T = f64> {
    pub inputs: AdaptationInputs<T>,
    pub measured_loss: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct FitConfig<T = f64> {
    pub max_iterations: usize,
    /// Relative objective decrease below which an accepted step ends the run.
    pub convergence_tol: T,
    /// Starting point of restart 0; `None` selects the heuristic default.
    pub initial_params: Option<ScalingParams<T>>,
    pub fit_interactions: bool,
    pub seed: u64,
    pub restarts: usize,
    pub floors: SmoothingFloors<T>,
}

impl<T: Scalar> Default for FitConfig<T> {
    fn default() -> Self {
        FitConfig {
            max_iterations: 500,
            convergence_tol: T::lit(1e-10),
            initial_params: None,
            fit_interactions: false,
            seed: 0,
            restarts: 8,
            floors: SmoothingFloors::default(),
        }
    }
}

impl<T: Scalar> FitConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations < 1 {
            return Err(Error::invalid("fit config", "max_iterations", "must be >= 1"));
        }
        if self.restarts < 1 {
            return Err(Error::invalid("fit config", "restarts", "must be >= 1"));
        }
        if !(self.convergence_tol > T::zero()) {
            return Err(Error::invalid("fit config", "convergence_tol", "must be > 0"));
        }
        if let Some(p) = &self.initial_params {
            p.validate()?;
        }
        self.floors.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct FitResult<T = f64> {
    pub params: ScalingParams<T>,
    /// Mean squared residual at `params`.
    pub objective: T,
    pub iterations: usize,
    pub converged: bool,
    pub restart_objectives: Vec<T>,
    /// Objective after every accepted step of the winning restart, starting
    /// with its initial point.
    #[serde(skip)]
    pub descent_trace: Vec<T>,
}

/// JSON document written for a fit: the result plus what produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct FitReport<T = f64> {
    pub params: ScalingParams<T>,
    pub objective: T,
    pub iterations: usize,
    pub converged: bool,
    pub restart_objectives: Vec<T>,
    pub provenance: Provenance<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct Provenance<T = f64> {
    pub seed: u64,
    pub observations: usize,
    pub config: FitConfig<T>,
}

impl<T: Scalar> FitResult<T> {
    pub fn report(&self, cfg: &FitConfig<T>, observations: usize) -> FitReport<T> {
        FitReport {
            params: self.params,
            objective: self.objective,
            iterations: self.iterations,
            converged: self.converged,
            restart_objectives: self.restart_objectives.clone(),
            provenance: Provenance {
                seed: cfg.seed,
                observations,
                config: cfg.clone(),
            },
        }
    }
}

pub fn parameter_count(fit_interactions: bool) -> usize {
    if fit_interactions {
        INTERACTION_PARAMETERS
    } else {
        BASE_PARAMETERS
    }
}

/// Unconstrained coordinates `ln θ` in the order
/// α, β, γ, δ, η, ρ, κ, π, ε[, λ, μ, ν].
pub fn to_unconstrained<T: Scalar>(p: &ScalingParams<T>, fit_interactions: bool) -> Vec<T> {
    let mut v = vec![
        p.alpha, p.beta, p.gamma, p.delta, p.eta, p.rho, p.kappa, p.pi_exp, p.epsilon,
    ];
    if fit_interactions {
        v.extend([p.lambda_dp, p.mu_rp, p.nu_dr]);
    }
    v.into_iter().map(T::ln).collect()
}

/// Inverse of [`to_unconstrained`]. Coupling coefficients are zero when not fitted.
pub fn from_unconstrained<T: Scalar>(u: &[T]) -> ScalingParams<T> {
    let e = |i: usize| u.get(i).map_or(T::zero(), |v| v.exp());
    ScalingParams {
        alpha: e(0),
        beta: e(1),
        gamma: e(2),
        delta: e(3),
        eta: e(4),
        rho: e(5),
        kappa: e(6),
        pi_exp: e(7),
        epsilon: e(8),
        lambda_dp: e(9),
        mu_rp: e(10),
        nu_dr: e(11),
    }
}

fn predict<T: Scalar>(
    p: &ScalingParams<T>,
    x: &AdaptationInputs<T>,
    f: &SmoothingFloors<T>,
    fit_interactions: bool,
) -> T {
    let terms = LossTerms::evaluate(p, x, f);
    if fit_interactions {
        terms.coupled()
    } else {
        terms.base()
    }
}

/// Predicted minus measured loss for every observation.
pub fn residuals<T: Scalar>(p: &ScalingParams<T>, obs: &[Observation<T>], fit_interactions: bool) -> Vec<T> {
    residuals_with(p, obs, fit_interactions, &SmoothingFloors::default())
}

pub fn residuals_with<T: Scalar>(
    p: &ScalingParams<T>,
    obs: &[Observation<T>],
    fit_interactions: bool,
    floors: &SmoothingFloors<T>,
) -> Vec<T> {
    obs.iter()
        .map(|o| predict(p, &o.inputs, floors, fit_interactions) - o.measured_loss)
        .collect()
}

fn mean_square<T: Scalar>(r: &[T]) -> T {
    r.iter().map(|&v| v * v).sum::<T>() / T::from_usize(r.len()).unwrap()
}

/// Row of ∂(predicted loss)/∂u for one observation.
fn jacobian_row<T: Scalar>(
    p: &ScalingParams<T>,
    x: &AdaptationInputs<T>,
    f: &SmoothingFloors<T>,
    fit_interactions: bool,
    row: &mut [T],
) {
    let t = LossTerms::evaluate(p, x, f);
    let d_eff = x.data_tokens.max(f.d_floor);
    let p_eff = x.pretrain_repr.max(f.p_floor);
    // ∂(c·v^−e)/∂ln c = term; ∂/∂ln e = −term·e·ln v
    row[0] = t.capacity;
    row[1] = -t.capacity * p.beta * x.model_capacity.ln();
    row[2] = t.data;
    row[3] = -t.data * p.delta * d_eff.ln();
    row[4] = t.adapter;
    row[5] = -t.adapter * p.rho * x.adapter_capacity.ln();
    row[6] = t.pretrain;
    row[7] = -t.pretrain * p.pi_exp * p_eff.ln();
    row[8] = t.epsilon;
    if fit_interactions {
        row[9] = -t.coupling_dp;
        row[10] = -t.coupling_rp;
        row[11] = -t.coupling_dr;
    }
}

/// Analytic gradient of the mean squared residual with respect to `ln θ`
/// (layout as in [`to_unconstrained`]).
pub fn objective_gradient<T: Scalar>(p: &ScalingParams<T>, obs: &[Observation<T>], fit_interactions: bool) -> Vec<T> {
    objective_gradient_with(p, obs, fit_interactions, &SmoothingFloors::default())
}

pub fn objective_gradient_with<T: Scalar>(
    p: &ScalingParams<T>,
    obs: &[Observation<T>],
    fit_interactions: bool,
    floors: &SmoothingFloors<T>,
) -> Vec<T> {
    let k = parameter_count(fit_interactions);
    let n = T::from_usize(obs.len().max(1)).unwrap();
    let mut grad = vec![T::zero(); k];
    let mut row = vec![T::zero(); k];
    for o in obs {
        jacobian_row(p, &o.inputs, floors, fit_interactions, &mut row);
        let r = predict(p, &o.inputs, floors, fit_interactions) - o.measured_loss;
        for (g, &j) in grad.iter_mut().zip(&row) {
            *g = *g + T::two() * r * j / n;
        }
    }
    grad
}

/// Outcome of a single damped Gauss-Newton run.
#[derive(Debug, Clone)]
pub struct SolveOutcome<T> {
    pub params: ScalingParams<T>,
    pub objective: T,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<T>,
}

struct Problem<'a, T> {
    obs: &'a [Observation<T>],
    floors: SmoothingFloors<T>,
    fit_interactions: bool,
}

impl<T: Scalar> Problem<'_, T> {
    fn objective(&self, u: &[T]) -> T {
        let p = from_unconstrained(u);
        let obj = mean_square(&residuals_with(&p, self.obs, self.fit_interactions, &self.floors));
        if obj.is_finite() {
            obj
        } else {
            T::infinity()
        }
    }

    /// Returns (JᵀJ, Jᵀr, objective) scaled by 1/n.
    fn normal_equations(&self, u: &[T]) -> (Vec<T>, Vec<T>, T) {
        let k = u.len();
        let p = from_unconstrained(u);
        let mut jtj = vec![T::zero(); k * k];
        let mut jtr = vec![T::zero(); k];
        let mut sse = T::zero();
        let mut row = vec![T::zero(); k];
        for o in self.obs {
            jacobian_row(&p, &o.inputs, &self.floors, self.fit_interactions, &mut row);
            let r = predict(&p, &o.inputs, &self.floors, self.fit_interactions) - o.measured_loss;
            sse = sse + r * r;
            for a in 0..k {
                jtr[a] = jtr[a] + row[a] * r;
                for b in 0..=a {
                    jtj[a * k + b] = jtj[a * k + b] + row[a] * row[b];
                }
            }
        }
        for a in 0..k {
            for b in 0..a {
                jtj[b * k + a] = jtj[a * k + b];
            }
        }
        let n = T::from_usize(self.obs.len()).unwrap();
        jtj.iter_mut().for_each(|v| *v = *v / n);
        jtr.iter_mut().for_each(|v| *v = *v / n);
        (jtj, jtr, sse / n)
    }
}

/// Runs one Levenberg-Marquardt descent from `start`.
pub fn solve_from<T: Scalar>(obs: &[Observation<T>], start: &ScalingParams<T>, cfg: &FitConfig<T>) -> SolveOutcome<T> {
    let problem = Problem {
        obs,
        floors: cfg.floors,
        fit_interactions: cfg.fit_interactions,
    };
    let k = parameter_count(cfg.fit_interactions);
    let mut u = to_unconstrained(start, cfg.fit_interactions);
    let (mut jtj, mut jtr, mut obj) = problem.normal_equations(&u);
    let mut trace = vec![obj];
    let mut damping = T::lit(1e-3);
    let mut converged = obj == T::zero();
    let mut iterations = 0;

    while iterations < cfg.max_iterations && !converged && obj.is_finite() {
        iterations += 1;
        let max_diag = (0..k).map(|i| jtj[i * k + i]).fold(T::zero(), T::max);
        let floor = max_diag * T::lit(1e-12) + T::min_positive_value();
        let mut damped = jtj.clone();
        for i in 0..k {
            damped[i * k + i] = damped[i * k + i] + damping * jtj[i * k + i].max(floor);
        }
        let rhs: Vec<T> = jtr.iter().map(|&g| -g).collect();
        let step = match Cholesky::factor(&damped, k) {
            Some(ch) if ch.condition_estimate() <= T::lit(CONDITION_LIMIT) => ch.solve(&rhs),
            // Scaled steepest descent.
            _ => rhs
                .iter()
                .enumerate()
                .map(|(i, &g)| g / (damping * jtj[i * k + i].max(floor) + floor))
                .collect(),
        };
        let trial: Vec<T> = u.iter().zip(&step).map(|(&a, &b)| a + b).collect();
        let trial_obj = problem.objective(&trial);
        if trial_obj < obj {
            let decrease = (obj - trial_obj) / obj;
            u = trial;
            (jtj, jtr, obj) = problem.normal_equations(&u);
            trace.push(obj);
            damping = (damping * T::lit(DAMPING_DOWN)).max(T::lit(1e-15));
            if decrease < cfg.convergence_tol || obj == T::zero() {
                converged = true;
            }
        } else {
            damping = damping * T::lit(DAMPING_UP);
            if damping > T::lit(DAMPING_MAX) {
                // No descent direction left at any damping: a stationary point.
                converged = true;
            }
        }
    }

    SolveOutcome {
        params: from_unconstrained(&u),
        objective: obj,
        iterations,
        converged,
        trace,
    }
}

/// Default starting point: coefficients 0.1, exponents 0.5, ε half the smallest observed loss.
pub fn heuristic_start<T: Scalar>(obs: &[Observation<T>], fit_interactions: bool) -> ScalingParams<T> {
    let min_loss = obs.iter().map(|o| o.measured_loss).fold(T::infinity(), T::min);
    let c = T::lit(0.1);
    let e = T::lit(0.5);
    let coupling = if fit_interactions { c } else { T::zero() };
    ScalingParams {
        alpha: c,
        beta: e,
        gamma: c,
        delta: e,
        eta: c,
        rho: e,
        kappa: c,
        pi_exp: e,
        epsilon: min_loss * T::lit(0.5),
        lambda_dp: coupling,
        mu_rp: coupling,
        nu_dr: coupling,
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

fn random_start<T: Scalar>(
    rng: &mut ChaCha8Rng,
    obs: &[Observation<T>],
    floors: &SmoothingFloors<T>,
    fit_interactions: bool,
) -> ScalingParams<T> {
    let mut expo = || T::lit(log_uniform(rng, 0.05, 1.5));
    let (beta, delta, rho, pi_exp) = (expo(), expo(), expo(), expo());
    let mut coupling = || {
        if fit_interactions {
            T::lit(log_uniform(rng, 1e-4, 1e-1))
        } else {
            T::zero()
        }
    };
    let (lambda_dp, mu_rp, nu_dr) = (coupling(), coupling(), coupling());
    let shape = ScalingParams {
        alpha: T::one(),
        beta,
        gamma: T::one(),
        delta,
        eta: T::one(),
        rho,
        kappa: T::one(),
        pi_exp,
        epsilon: T::one(),
        lambda_dp,
        mu_rp,
        nu_dr,
    };
    let [alpha, gamma, eta, kappa, epsilon] = linear_coefficients(&shape, obs, floors, fit_interactions);
    ScalingParams {
        alpha,
        gamma,
        eta,
        kappa,
        epsilon,
        ..shape
    }
}

/// For fixed exponents and couplings the law is linear in α, γ, η, κ, ε.
/// Solves that least-squares problem, dropping columns whose coefficient
/// comes out non-positive; dropped coefficients get a small positive value
/// so they stay representable in log space.
fn linear_coefficients<T: Scalar>(
    shape: &ScalingParams<T>,
    obs: &[Observation<T>],
    floors: &SmoothingFloors<T>,
    fit_interactions: bool,
) -> [T; 5] {
    let rows: Vec<([T; 5], T)> = obs
        .iter()
        .map(|o| {
            let t = LossTerms::evaluate(shape, &o.inputs, floors);
            let coupling = if fit_interactions {
                t.coupling_dp + t.coupling_rp + t.coupling_dr
            } else {
                T::zero()
            };
            (
                [t.capacity, t.data, t.adapter, t.pretrain, T::one()],
                o.measured_loss + coupling,
            )
        })
        .collect();
    let tiny = T::lit(1e-8);
    let mut active = [true; 5];
    for _ in 0..5 {
        let idx: Vec<usize> = (0..5).filter(|&i| active[i]).collect();
        let k = idx.len();
        if k == 0 {
            break;
        }
        let mut ata = vec![T::zero(); k * k];
        let mut aty = vec![T::zero(); k];
        for (x, y) in &rows {
            for (a, &i) in idx.iter().enumerate() {
                aty[a] = aty[a] + x[i] * *y;
                for (b, &j) in idx.iter().enumerate() {
                    ata[a * k + b] = ata[a * k + b] + x[i] * x[j];
                }
            }
        }
        let ridge = (0..k).map(|a| ata[a * k + a]).fold(T::zero(), T::max) * T::lit(1e-12);
        for a in 0..k {
            ata[a * k + a] = ata[a * k + a] + ridge + T::min_positive_value();
        }
        let Some(chol) = Cholesky::factor(&ata, k) else {
            break;
        };
        let sol = chol.solve(&aty);
        let mut out = [tiny; 5];
        let mut dropped = false;
        for (a, &i) in idx.iter().enumerate() {
            if sol[a] > T::zero() && sol[a].is_finite() {
                out[i] = sol[a];
            } else {
                active[i] = false;
                dropped = true;
            }
        }
        if !dropped {
            return out;
        }
    }
    [tiny; 5]
}

fn validate_observations<T: Scalar>(obs: &[Observation<T>]) -> Result<()> {
    for (i, o) in obs.iter().enumerate() {
        if !(o.measured_loss > T::zero()) || !o.measured_loss.is_finite() {
            return Err(Error::invalid(
                format!("observation {i}"),
                "loss",
                format!("must be finite and > 0 (got {})", o.measured_loss),
            ));
        }
        o.inputs
            .validate()
            .map_err(|e| Error::invalid(format!("observation {i}"), "inputs", e.to_string()))?;
    }
    Ok(())
}

/// Multi-start least-squares fit of the loss law. Deterministic for a fixed seed.
pub fn fit_scaling<T: Scalar>(obs: &[Observation<T>], cfg: &FitConfig<T>) -> Result<FitResult<T>> {
    cfg.validate()?;
    let k = parameter_count(cfg.fit_interactions);
    if obs.len() < k {
        return Err(Error::InsufficientData {
            observations: obs.len(),
            parameters: k,
        });
    }
    validate_observations(obs)?;

    let first = cfg
        .initial_params
        .unwrap_or_else(|| heuristic_start(obs, cfg.fit_interactions));
    let first = if cfg.fit_interactions {
        // ln 0 is not a coordinate; start zero couplings slightly positive.
        let tiny = T::lit(1e-6);
        ScalingParams {
            lambda_dp: first.lambda_dp.max(tiny),
            mu_rp: first.mu_rp.max(tiny),
            nu_dr: first.nu_dr.max(tiny),
            ..first
        }
    } else {
        first
    };
    let r0 = residuals_with(&first, obs, cfg.fit_interactions, &cfg.floors);
    if let Some(index) = r0.iter().position(|r| !r.is_finite()) {
        return Err(Error::NonFiniteObjective { index });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut starts = vec![first];
    for _ in 1..cfg.restarts {
        starts.push(random_start(&mut rng, obs, &cfg.floors, cfg.fit_interactions));
    }

    let outcomes: Vec<SolveOutcome<T>> = starts.par_iter().map(|s| solve_from(obs, s, cfg)).collect();
    let restart_objectives: Vec<T> = outcomes.iter().map(|o| o.objective).collect();
    let best = outcomes
        .into_iter()
        .enumerate()
        .filter(|(_, o)| o.objective.is_finite())
        .min_by(|(ia, a), (ib, b)| a.objective.partial_cmp(&b.objective).unwrap().then(ia.cmp(ib)))
        .map(|(_, o)| o)
        .ok_or(Error::NonFiniteObjective { index: 0 })?;

    Ok(FitResult {
        params: best.params,
        objective: best.objective,
        iterations: best.iterations,
        converged: best.converged,
        restart_objectives,
        descent_trace: best.trace,
    })
}

/// Sampling ranges used by [`synthesize_observations`].
pub mod sampling {
    pub const MODEL_CAPACITY: (f64, f64) = (1e8, 1e11);
    pub const DATA_TOKENS: (f64, f64) = (1e4, 1e10);
    pub const ADAPTER_CAPACITY: (f64, f64) = (4.0, 256.0);
    pub const PRETRAIN_REPR: (f64, f64) = (1e-6, 0.05);
}

/// Draws `n` observations with inputs log-uniform over the [`sampling`]
/// ranges (adapter capacity rounded to an integer) and loss given by the
/// coupled law plus Gaussian noise.
pub fn synthesize_observations<T: Scalar>(
    true_params: &ScalingParams<T>,
    n: usize,
    noise_sigma: T,
    seed: u64,
) -> Vec<Observation<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let floors = SmoothingFloors::default();
    let sigma = noise_sigma.as_f64().max(0.0);
    let noise = Normal::new(0.0, sigma).expect("finite sigma");
    (0..n)
        .map(|_| {
            let m = log_uniform(&mut rng, sampling::MODEL_CAPACITY.0, sampling::MODEL_CAPACITY.1);
            let d = log_uniform(&mut rng, sampling::DATA_TOKENS.0, sampling::DATA_TOKENS.1);
            let r = log_uniform(&mut rng, sampling::ADAPTER_CAPACITY.0, sampling::ADAPTER_CAPACITY.1).round();
            let p = log_uniform(&mut rng, sampling::PRETRAIN_REPR.0, sampling::PRETRAIN_REPR.1);
            let inputs = AdaptationInputs::new(T::lit(m), T::lit(d), T::lit(r), T::lit(p));
            let clean = LossTerms::evaluate(true_params, &inputs, &floors).coupled();
            let eps = if sigma > 0.0 { noise.sample(&mut rng) } else { 0.0 };
            Observation {
                inputs,
                measured_loss: clean + T::lit(eps),
            }
        })
        .collect()
}

const CSV_HEADER: [&str; 5] = [
    "model_capacity",
    "data_tokens",
    "adapter_capacity",
    "pretrain_repr",
    "loss",
];

/// Reads an observation CSV with header
/// `model_capacity,data_tokens,adapter_capacity,pretrain_repr,loss`.
pub fn read_observations_csv<T: Scalar>(text: &str, context: &str) -> Result<Vec<Observation<T>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| Error::parse(context, e))?.clone();
    if header.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(Error::parse(
            context,
            format!("expected header `{}`", CSV_HEADER.join(",")),
        ));
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::parse(context, e))?;
        let mut vals = [0.0f64; 5];
        for (j, v) in vals.iter_mut().enumerate() {
            *v = rec[j]
                .parse()
                .map_err(|e| Error::parse(format!("{context} row {}", i + 1), format!("{}: {e}", CSV_HEADER[j])))?;
        }
        out.push(Observation {
            inputs: AdaptationInputs::new(T::lit(vals[0]), T::lit(vals[1]), T::lit(vals[2]), T::lit(vals[3])),
            measured_loss: T::lit(vals[4]),
        });
    }
    Ok(out)
}

pub fn load_observations<T: Scalar>(path: impl AsRef<Path>) -> Result<Vec<Observation<T>>> {
    let path = path.as_ref();
    read_observations_csv(&read_file(path)?, &path.display().to_string())
}

pub fn write_observations_csv<T: Scalar>(obs: &[Observation<T>]) -> String {
    let mut out = CSV_HEADER.join(",");
    out.push('\n');
    for o in obs {
        let x = &o.inputs;
        out.push_str(&format!(
            "{:?},{:?},{:?},{:?},{:?}\n",
            x.model_capacity.as_f64(),
            x.data_tokens.as_f64(),
            x.adapter_capacity.as_f64(),
            x.pretrain_repr.as_f64(),
            o.measured_loss.as_f64()
        ));
    }
    out
}
