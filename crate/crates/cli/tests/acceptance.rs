//! Acceptance suite. Runs every criterion, prints one `[PASS]`/`[FAIL]` line
//! each, and exits nonzero if any failed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use langadapt::fitting::{self, FitConfig, Observation};
use langadapt::forgetting::{forgetting_risk, logistic, ForgettingCoeffs, ForgettingInputs};
use langadapt::planner::{allocate_data_budget, PlanRequest};
use langadapt::profiles::{LanguageProfile, ProfileSet, Script};
use langadapt::scaling::{
    apply_low_rank_update, base_loss, interaction_loss, lora_param_count, AdaptationInputs, LoraParamCount,
    ScalingParams, SmoothingFloors,
};
use langadapt::transfer::{cte_distance_aware, cte_measured, CteConfig, TransferObservation};
use langadapt::ttc::{ttc_pair, PairComponents, TtcWeights};
use langadapt::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn langadapt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_langadapt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..=hi.ln())).exp()
}

const TABLE: [[f64; 5]; 5] = [
    [1.00, 0.70, 0.82, 0.88, 0.90],
    [0.70, 1.00, 0.74, 0.68, 0.63],
    [0.82, 0.74, 1.00, 0.79, 0.75],
    [0.88, 0.68, 0.79, 1.00, 0.84],
    [0.90, 0.63, 0.75, 0.84, 1.00],
];

fn ac1_family_matrix() -> Outcome {
    let start = Instant::now();
    let components = data("turkic_components.toml");
    let weights = data("ttc_weights.toml");
    let out = langadapt(&[
        "ttc",
        "--components",
        components.to_str().unwrap(),
        "--weights",
        weights.to_str().unwrap(),
        "--format",
        "json",
    ]);
    let elapsed = start.elapsed();
    check(out.status.success(), || {
        format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr))
    })?;
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let langs: Vec<&str> = v["languages"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l.as_str().unwrap())
        .collect();
    check(langs == ["az", "kk", "uz", "tk", "gz"], || {
        format!("language order {langs:?}")
    })?;
    let rows = v["values"].as_array().ok_or("no values")?;
    check(rows.len() == 5, || format!("{} rows", rows.len()))?;
    let mut worst = 0.0f64;
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or("ragged")?;
        check(row.len() == 5, || format!("row {i} has {} entries", row.len()))?;
        for (j, cell) in row.iter().enumerate() {
            let x = cell.as_f64().unwrap();
            if i == j {
                check(x == 1.0, || format!("diagonal ({i},{i}) = {x:?}"))?;
            }
            let y = rows[j][i].as_f64().unwrap();
            check(x == y, || format!("asymmetric at ({i},{j}): {x:?} vs {y:?}"))?;
            worst = worst.max((x - TABLE[i][j]).abs());
        }
    }
    check(worst <= 1e-9, || format!("max deviation {worst:e}"))?;
    check(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("max deviation {worst:.1e}, {} ms", elapsed.as_millis()))
}

fn ac2_pair_oracle() -> Outcome {
    let c = PairComponents {
        morph_sim: 0.9,
        lex_overlap: 0.8,
        syn_sim: 0.95,
        script_compat: 1.0,
        ortho_penalty: 0.1,
    };
    let w = TtcWeights {
        w_m: 0.3,
        w_l: 0.25,
        w_s: 0.25,
        w_r: 0.2,
        w_o: 0.1,
    };
    let got: f64 = ttc_pair(&c, &w).map_err(|e| e.to_string())?;
    check((got - 0.8975).abs() <= 1e-12, || format!("got {got:?}"))?;
    Ok(format!("{got}"))
}

fn random_params(rng: &mut ChaCha8Rng) -> ScalingParams {
    let mut coef = || rng.gen_range(0.0..=10.0);
    let (alpha, gamma, eta, kappa) = (coef(), coef(), coef(), coef());
    let mut expo = || rng.gen_range(0.75..=2.0);
    let (beta, delta, rho, pi_exp) = (expo(), expo(), expo(), expo());
    ScalingParams {
        alpha,
        beta,
        gamma,
        delta,
        eta,
        rho,
        kappa,
        pi_exp,
        epsilon: rng.gen_range(0.0..=5.0),
        lambda_dp: rng.gen_range(0.0..=0.1),
        mu_rp: rng.gen_range(0.0..=0.1),
        nu_dr: rng.gen_range(0.0..=0.1),
    }
}

fn random_inputs(rng: &mut ChaCha8Rng) -> AdaptationInputs {
    AdaptationInputs::new(
        log_uniform(rng, 1e6, 1e12),
        if rng.gen_bool(0.05) {
            rng.gen_range(0.0..1.0)
        } else {
            log_uniform(rng, 1.0, 1e11)
        },
        log_uniform(rng, 1.0, 1024.0),
        if rng.gen_bool(0.05) {
            0.0
        } else {
            log_uniform(rng, 1e-8, 1.0)
        },
    )
}

fn ac3_loss_structure() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = SmoothingFloors::default();
    let far = AdaptationInputs::new(1e12, 1e12, 1e12, 1.0);
    let mut worst_tail = f64::NEG_INFINITY;
    for case in 0..10_000 {
        let p = random_params(&mut rng);
        let x = random_inputs(&mut rng);
        let here_base = base_loss(&p, &x, &f);
        let here = interaction_loss(&p, &x, &f);
        check(here <= here_base, || {
            format!("case {case}: coupled {here} > base {here_base}")
        })?;

        let up = rng.gen_range(1.0001..=10.0);
        let bumped = [
            AdaptationInputs {
                model_capacity: x.model_capacity * up,
                ..x
            },
            AdaptationInputs {
                data_tokens: x.data_tokens * up + rng.gen_range(0.0..1.0),
                ..x
            },
            AdaptationInputs {
                adapter_capacity: x.adapter_capacity * up,
                ..x
            },
            AdaptationInputs {
                pretrain_repr: (x.pretrain_repr * up).max(x.pretrain_repr + 1e-9).min(1.0),
                ..x
            },
        ];
        for (axis, y) in ["M", "D", "R", "P"].iter().zip(&bumped) {
            let b = base_loss(&p, y, &f);
            let c = interaction_loss(&p, y, &f);
            check(b <= here_base && c <= here, || {
                format!("case {case}: loss rises along {axis}: base {here_base} -> {b}, coupled {here} -> {c}")
            })?;
        }

        // P cannot exceed 1, so the pretraining term keeps κ·1^−π = κ at the far point.
        let tail = interaction_loss(&p, &far, &f) - p.epsilon - p.kappa;
        let tail_base = base_loss(&p, &far, &f) - p.epsilon - p.kappa;
        let no_pretrain = ScalingParams { kappa: 0.0, ..p };
        let literal = base_loss(&no_pretrain, &far, &f) - no_pretrain.epsilon;
        worst_tail = worst_tail.max(tail).max(tail_base).max(literal);
        check(tail < 1e-6 && tail_base < 1e-6 && literal < 1e-6, || {
            format!("case {case}: residual above floor at the far point ({tail_base:e}, {literal:e})")
        })?;
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "10000 cases, worst far-point residual {worst_tail:.1e}, {} ms",
        elapsed.as_millis()
    ))
}

/// Signed summands of the loss, written out from the definition independently
/// of the library's evaluator.
fn oracle_terms(theta: &[f64], x: &AdaptationInputs) -> Vec<f64> {
    let d = x.data_tokens.max(1.0);
    let p = x.pretrain_repr.max(1e-6);
    let mut t = vec![
        theta[0] * x.model_capacity.powf(-theta[1]),
        theta[2] * d.powf(-theta[3]),
        theta[4] * x.adapter_capacity.powf(-theta[5]),
        theta[6] * p.powf(-theta[7]),
        theta[8],
    ];
    if theta.len() == 12 {
        t.push(-theta[9] * (1.0 + x.data_tokens * x.pretrain_repr).ln());
        t.push(-theta[10] * (1.0 + x.adapter_capacity * x.pretrain_repr).ln());
        t.push(-theta[11] * (1.0 + x.data_tokens * x.adapter_capacity).ln());
    }
    t
}

/// Central difference of the mean squared residual along `ln θ_k`.
///
/// The difference of the two objectives is accumulated as
/// `Σ (r₊ − r₋)(r₊ + r₋) / n`, with `r₊ − r₋` summed term by term, so the
/// unaffected summands never enter the subtraction.
fn central_difference(u: &[f64], k: usize, h: f64, obs: &[Observation]) -> f64 {
    let (mut up, mut down) = (u.to_vec(), u.to_vec());
    up[k] += h;
    down[k] -= h;
    let up: Vec<f64> = up.iter().map(|v| v.exp()).collect();
    let down: Vec<f64> = down.iter().map(|v| v.exp()).collect();
    let sum: f64 = obs
        .iter()
        .map(|o| {
            let (a, b) = (oracle_terms(&up, &o.inputs), oracle_terms(&down, &o.inputs));
            let diff: f64 = a.iter().zip(&b).map(|(x, y)| x - y).sum();
            let r_up = a.iter().sum::<f64>() - o.measured_loss;
            let r_down = b.iter().sum::<f64>() - o.measured_loss;
            diff * (r_up + r_down)
        })
        .sum();
    sum / obs.len() as f64 / (2.0 * h)
}

fn ac4_gradient() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let h = 1e-6;
    let mut worst = 0.0f64;
    for point in 0..100 {
        let interactions = point % 2 == 1;
        let mut scale = |v: f64| v * log_uniform(&mut rng, 0.5, 2.0);
        let p = ScalingParams {
            alpha: scale(400.0),
            beta: scale(0.34),
            gamma: scale(50.0),
            delta: scale(0.28),
            eta: scale(1.0),
            rho: scale(0.5),
            kappa: scale(0.05),
            pi_exp: scale(0.3),
            epsilon: scale(1.5),
            lambda_dp: if interactions { scale(0.01) } else { 0.0 },
            mu_rp: if interactions { scale(0.01) } else { 0.0 },
            nu_dr: if interactions { scale(0.01) } else { 0.0 },
        };
        let obs: Vec<Observation> = (0..20)
            .map(|_| {
                let inputs = AdaptationInputs::new(
                    log_uniform(&mut rng, 1e8, 1e11),
                    log_uniform(&mut rng, 1e4, 1e10),
                    log_uniform(&mut rng, 4.0, 256.0).round(),
                    log_uniform(&mut rng, 1e-6, 0.05),
                );
                Observation {
                    inputs,
                    measured_loss: rng.gen_range(1.0..8.0),
                }
            })
            .collect();
        let u = fitting::to_unconstrained(&p, interactions);
        let analytic = fitting::objective_gradient(&p, &obs, interactions);
        check(analytic.len() == u.len(), || {
            format!("gradient has {} entries for {} parameters", analytic.len(), u.len())
        })?;
        for (k, &g) in analytic.iter().enumerate() {
            let fd = central_difference(&u, k, h, &obs);
            let rel = (g - fd).abs() / g.abs().max(fd.abs());
            worst = worst.max(rel);
            check(rel < 1e-5, || {
                format!("point {point}, coordinate {k}: analytic {g} vs central {fd} (rel {rel:e})")
            })?;
        }
    }
    Ok(format!(
        "100 points x 20 observations, worst relative error {worst:.1e}"
    ))
}

fn truth() -> ScalingParams {
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
        lambda_dp: 0.0,
        mu_rp: 0.0,
        nu_dr: 0.0,
    }
}

fn ac5_fit_recovery() -> Outcome {
    let t = truth();
    let mut good = 0;
    let mut notes = Vec::new();
    for seed in 0..10u64 {
        let obs = fitting::synthesize_observations(&t, 200, 0.0, seed);
        let cfg = FitConfig {
            seed,
            ..FitConfig::default()
        };
        let start = Instant::now();
        let fit = fitting::fit_scaling(&obs, &cfg).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        check(elapsed < Duration::from_secs(10), || {
            format!("seed {seed} took {elapsed:?}")
        })?;
        let q = fit.params;
        let within = [
            (q.beta, t.beta),
            (q.delta, t.delta),
            (q.rho, t.rho),
            (q.pi_exp, t.pi_exp),
        ]
        .iter()
        .all(|(got, want)| ((got - want) / want).abs() <= 0.10);
        if within && fit.objective < 1e-8 {
            good += 1;
        } else {
            notes.push(format!("seed {seed}: mse {:e}", fit.objective));
        }
    }
    check(good >= 8, || format!("{good}/10 recovered ({})", notes.join("; ")))?;
    Ok(format!("{good}/10 seeds recovered"))
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
}

fn ac6_low_rank() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for case in 0..50 {
        let d = rng.gen_range(1..=64);
        let k = rng.gen_range(1..=64);
        let r = rng.gen_range(1..=8usize.min(d).min(k));
        let w = random_matrix(&mut rng, d, k);
        let b = random_matrix(&mut rng, d, r);
        let a = random_matrix(&mut rng, r, k);
        let updated = apply_low_rank_update(&w, &b, &a).map_err(|e| e.to_string())?;
        let delta = nalgebra::DMatrix::from_fn(d, k, |i, j| updated[(i, j)] - w[(i, j)]);
        let sv = delta.singular_values();
        let mut sv: Vec<f64> = sv.iter().copied().collect();
        sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
        let max = sv[0];
        for (i, s) in sv.iter().enumerate().skip(r) {
            worst = worst.max(s / max);
            check(*s < 1e-10 * max, || {
                format!("case {case} ({d}x{k}, r={r}): sigma_{i} = {s:e}, max {max:e}")
            })?;
        }
    }
    let count = lora_param_count(1024, 1024, 8).map_err(|e| e.to_string())?;
    let want = LoraParamCount {
        trainable: 16384,
        full: 1_048_576,
        ratio: 0.015625,
    };
    check(count == want, || format!("lora_param_count(1024, 1024, 8) = {count:?}"))?;
    Ok(format!("50 updates, worst tail ratio {worst:.1e}; count exact"))
}

fn ac7_transfer_efficiency() -> Outcome {
    let cfg: CteConfig = CteConfig::default();
    let o = TransferObservation {
        source: "az".into(),
        target: "tk".into(),
        delta_perf: 0.1,
        source_data_tokens: 100.0,
        adapter_capacity: 16.0,
    };
    let m = cte_measured(&o, &cfg);
    check((m - 0.0025).abs() <= 1e-15, || format!("measured {m:?}"))?;
    let half = cte_distance_aware(&o, 1.0, &CteConfig { tau: 1.0, ..cfg });
    check((half - m / 2.0).abs() <= 1e-15, || {
        format!("distance-aware at dist 1 = {half:?}")
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..10_000 {
        let c = CteConfig {
            tau: rng.gen_range(0.01..=5.0),
            ..cfg
        };
        let o = TransferObservation {
            delta_perf: rng.gen_range(1e-4..=1.0),
            source_data_tokens: log_uniform(&mut rng, 1.0, 1e10),
            adapter_capacity: log_uniform(&mut rng, 1.0, 512.0),
            ..o.clone()
        };
        let near = rng.gen_range(0.0..=1.0);
        let far = near + rng.gen_range(1e-3..=0.1);
        let (a, b) = (cte_distance_aware(&o, near, &c), cte_distance_aware(&o, far, &c));
        check(b < a, || {
            format!("case {case}: tau {} dist {near} -> {far}: {a:e} -> {b:e}", c.tau)
        })?;
    }
    Ok("hand example exact, halving exact, 10000 monotone cases".into())
}

fn ac8_forgetting() -> Outcome {
    check(logistic(0.0f64) == 0.5, || format!("sigma(0) = {:?}", logistic(0.0f64)))?;
    let s = logistic(2.1f64);
    check((s - 0.890903).abs() <= 1e-6, || format!("sigma(2.1) = {s}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for case in 0..10_000 {
        let k = ForgettingCoeffs {
            a: rng.gen_range(-0.05..=0.05),
            b: rng.gen_range(-0.5..=0.5),
            c: rng.gen_range(-2.0..=2.0),
            d: rng.gen_range(-2.0..=2.0),
            e: rng.gen_range(-2.0..=2.0),
            ..ForgettingCoeffs::default()
        };
        let x = ForgettingInputs {
            adapter_capacity: log_uniform(&mut rng, 1.0, 256.0),
            data_tokens: log_uniform(&mut rng, 1.0, 1e10),
            pretrain_repr: rng.gen_range(0.0..=0.9),
            novelty: rng.gen_range(0.0..=0.9),
            transfer_support: rng.gen_range(0.0..=0.9),
        };
        let f = forgetting_risk(&k, &x);
        check(f > 0.0 && f < 1.0, || format!("case {case}: risk {f:?}"))?;
        // (name, coefficient sign on the logit, moved input)
        let moves = [
            (
                "R",
                k.a,
                ForgettingInputs {
                    adapter_capacity: x.adapter_capacity * 2.0,
                    ..x
                },
            ),
            (
                "D",
                k.b,
                ForgettingInputs {
                    data_tokens: x.data_tokens * 10.0,
                    ..x
                },
            ),
            (
                "P",
                -k.c,
                ForgettingInputs {
                    pretrain_repr: x.pretrain_repr + 0.1,
                    ..x
                },
            ),
            (
                "U",
                k.d,
                ForgettingInputs {
                    novelty: x.novelty + 0.1,
                    ..x
                },
            ),
            (
                "T",
                -k.e,
                ForgettingInputs {
                    transfer_support: x.transfer_support + 0.1,
                    ..x
                },
            ),
        ];
        for (name, sign, y) in moves {
            let g = forgetting_risk(&k, &y);
            let ok = if sign > 0.0 {
                g > f
            } else if sign < 0.0 {
                g < f
            } else {
                g == f
            };
            check(ok, || {
                format!("case {case}: raising {name} with signed coefficient {sign} moved risk {f} -> {g}")
            })?;
        }
    }

    let mut worst = 0.0f64;
    let mut x: f64 = -700.0;
    while x <= 700.0 {
        let (p, q) = (logistic(x), logistic(-x));
        check(p.is_finite() && q.is_finite(), || format!("non-finite at {x}"))?;
        worst = worst.max((p + q - 1.0).abs());
        x += 0.01;
    }
    for _ in 0..10_000 {
        let x: f64 = rng.gen_range(-700.0..=700.0);
        worst = worst.max((logistic(x) + logistic(-x) - 1.0).abs());
    }
    check(worst <= 1e-15, || format!("symmetry defect {worst:e}"))?;
    Ok(format!("10000 cases, symmetry defect {worst:.1e}"))
}

fn read_request(name: &str) -> PlanRequest {
    serde_json::from_str(&std::fs::read_to_string(data(name)).expect("fixture")).expect("fixture parses")
}

fn aggregate(req: &PlanRequest, x: &[f64]) -> f64 {
    req.profiles
        .iter()
        .zip(x)
        .map(|(p, &xi)| {
            let inputs = AdaptationInputs::new(
                req.model_capacity,
                p.data_tokens + xi,
                req.adapter_capacity,
                p.pretrain_repr,
            );
            req.weight(&p.id) * interaction_loss(req.params.for_language(&p.id).unwrap(), &inputs, &req.floors)
        })
        .sum()
}

fn random_request(rng: &mut ChaCha8Rng) -> PlanRequest {
    let n = rng.gen_range(1..=6);
    let profiles: Vec<LanguageProfile> = (0..n)
        .map(|i| LanguageProfile {
            id: format!("l{i}"),
            name: format!("Language {i}"),
            script: Script::Latin,
            pretrain_repr: if rng.gen_bool(0.2) {
                0.0
            } else {
                log_uniform(rng, 1e-6, 0.05)
            },
            data_tokens: if rng.gen_bool(0.2) {
                0.0
            } else {
                log_uniform(rng, 1e3, 1e9)
            },
            ortho_stability: 0.9,
        })
        .collect();
    let ids: Vec<String> = profiles.iter().map(|p| p.id.clone()).collect();
    let total_budget = log_uniform(rng, 1e3, 1e10);
    let min_per_language = if rng.gen_bool(0.5) {
        0.0
    } else {
        rng.gen_range(0.0..=1.0) * total_budget / n as f64
    };
    let params = ids
        .iter()
        .map(|id| {
            let mut p = truth();
            p.gamma *= log_uniform(rng, 0.1, 10.0);
            p.delta = rng.gen_range(0.05..=1.0);
            p.lambda_dp = if rng.gen_bool(0.5) {
                rng.gen_range(0.0..=0.05)
            } else {
                0.0
            };
            p.nu_dr = if rng.gen_bool(0.3) {
                rng.gen_range(0.0..=0.01)
            } else {
                0.0
            };
            (id.clone(), p)
        })
        .collect();
    let weights = ids.iter().map(|id| (id.clone(), log_uniform(rng, 0.1, 10.0))).collect();
    PlanRequest {
        profiles: ProfileSet::new(profiles).unwrap(),
        params: langadapt::planner::ParamsSpec::PerLanguage(params),
        total_budget,
        min_per_language,
        model_capacity: 1e9,
        adapter_capacity: 16.0,
        weights,
        floors: SmoothingFloors::default(),
    }
}

fn ac9_planner() -> Outcome {
    let start = Instant::now();
    let req = read_request("plan_turkic.json");
    check(req.profiles.len() == 3, || "fixture must have three languages".into())?;
    let plan = allocate_data_budget(&req).map_err(|e| e.to_string())?;
    let planned = aggregate(&req, &plan.allocated());
    let step = 1e4;
    let steps = ((req.total_budget - 3.0 * req.min_per_language) / step).round() as usize;
    let mut best = f64::INFINITY;
    for i in 0..=steps {
        for j in 0..=steps - i {
            let x = [
                req.min_per_language + i as f64 * step,
                req.min_per_language + j as f64 * step,
                req.min_per_language + (steps - i - j) as f64 * step,
            ];
            best = best.min(aggregate(&req, &x));
        }
    }
    let gap = (planned - best) / best;
    check(gap.abs() <= 1e-3, || {
        format!("planned {planned} vs grid {best} (gap {gap:e})")
    })?;

    let sym = read_request("plan_symmetric.json");
    let split = allocate_data_budget(&sym).map_err(|e| e.to_string())?.allocated();
    check((split[0] - split[1]).abs() <= 1.0, || {
        format!("symmetric split {split:?}")
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for case in 0..1000 {
        let r = random_request(&mut rng);
        let x = allocate_data_budget(&r)
            .map_err(|e| format!("case {case}: {e}"))?
            .allocated();
        let sum: f64 = x.iter().sum();
        check((sum - r.total_budget).abs() <= 1e-9 * r.total_budget, || {
            format!("case {case}: allocated {sum} of {}", r.total_budget)
        })?;
        check(
            x.iter()
                .all(|v| v.is_finite() && *v >= r.min_per_language * (1.0 - 1e-12)),
            || format!("case {case}: allocation {x:?} below minimum {}", r.min_per_language),
        )?;
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "grid gap {gap:.1e}, symmetric diff {:.1e}, 1000 feasible, {} ms",
        (split[0] - split[1]).abs(),
        elapsed.as_millis()
    ))
}

fn ac10_determinism() -> Outcome {
    let obs = data("synthetic_fit.csv");
    let req = data("plan_turkic.json");
    let fit = [
        "fit",
        "--observations",
        obs.to_str().unwrap(),
        "--format",
        "json",
        "--seed",
        "17",
    ];
    let plan = [
        "plan",
        "--request",
        req.to_str().unwrap(),
        "--format",
        "json",
        "--seed",
        "17",
    ];
    for args in [&fit[..], &plan[..]] {
        let (a, b) = (langadapt(args), langadapt(args));
        check(a.status.success() && b.status.success(), || {
            format!("`{}` failed: {}", args[0], String::from_utf8_lossy(&a.stderr))
        })?;
        check(!a.stdout.is_empty() && a.stdout == b.stdout, || {
            format!("`{}` output differs between runs", args[0])
        })?;
        serde_json::from_slice::<serde_json::Value>(&a.stdout)
            .map_err(|e| format!("`{}` output is not JSON: {e}", args[0]))?;
    }
    Ok("fit and plan byte-identical".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("AC-1 family matrix reproduction", ac1_family_matrix),
        ("AC-2 pair hand example", ac2_pair_oracle),
        ("AC-3 loss-law structure", ac3_loss_structure),
        ("AC-4 objective gradient", ac4_gradient),
        ("AC-5 fit recovery", ac5_fit_recovery),
        ("AC-6 low-rank update", ac6_low_rank),
        ("AC-7 transfer efficiency", ac7_transfer_efficiency),
        ("AC-8 forgetting risk", ac8_forgetting),
        ("AC-9 budget planner", ac9_planner),
        ("AC-10 end-to-end determinism", ac10_determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
