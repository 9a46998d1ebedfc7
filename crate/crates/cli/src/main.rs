//! `langadapt`: command-line front end for the adaptation models.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 numerical
//! failure (only with `fit --strict`).

mod config;
mod format;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use langadapt::fitting::{self, FitConfig};
use langadapt::forgetting::{derive_transfer_support, forgetting_logit, ForgettingInputs, DEFAULT_P_REF};
use langadapt::planner::{self, PlanRequest};
use langadapt::profiles::{load_profiles, ProfileSet, Regime};
use langadapt::scaling::{self, AdaptationInputs, LoraParamCount};
use langadapt::transfer::{self, CteRecord};
use langadapt::ttc::{self, TtcMatrix};
use langadapt::{forgetting_risk, Error, Matrix};
use serde::Serialize;

use crate::config::{load_params, read, Config};
use crate::format::{sig6, table};

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Validation(String),
    Numerical(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "I/O error: {m}"),
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_io() {
            CliError::Io(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Parser)]
#[command(
    name = "langadapt",
    version,
    about = "Scaling, transfer, and forgetting models for multilingual adaptation"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "table")]
    format: Format,
    /// Seed for every randomised step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// TOML settings file (weights, floors, coefficients, fit options).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Transfer-coefficient matrix from a pairwise component file.
    Ttc {
        #[arg(long)]
        components: PathBuf,
        /// Weights file; falls back to the config file, then to the defaults.
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Predicted adaptation loss for one configuration.
    Predict {
        /// Parameter file (TOML or JSON; a fit report is accepted).
        #[arg(long)]
        params: PathBuf,
        /// Language id when the parameter file holds one set per language.
        #[arg(long)]
        language: Option<String>,
        #[arg(long)]
        model_capacity: f64,
        #[arg(long)]
        data_tokens: f64,
        #[arg(long)]
        rank: f64,
        #[arg(long)]
        pretrain_repr: f64,
        /// Resource regime; `extreme-low` drops the coupling terms.
        #[arg(long, value_enum)]
        regime: Option<RegimeArg>,
    },
    /// Fit loss-law constants to an observation CSV.
    Fit {
        #[arg(long)]
        observations: PathBuf,
        /// Also fit the three coupling coefficients.
        #[arg(long)]
        interactions: bool,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        max_iterations: Option<usize>,
        /// Exit 3 if the winning restart did not converge.
        #[arg(long)]
        strict: bool,
    },
    /// Transfer efficiency for each observed pair.
    Cte {
        #[arg(long)]
        observations: PathBuf,
        /// Component file; enables the distance-aware column.
        #[arg(long)]
        components: Option<PathBuf>,
        #[arg(long)]
        weights: Option<PathBuf>,
        /// Profiles and parameters together enable the predicted column.
        #[arg(long, requires = "params")]
        profiles: Option<PathBuf>,
        #[arg(long, requires = "profiles")]
        params: Option<PathBuf>,
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long)]
        chi: Option<f64>,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        link_constant: Option<f64>,
    },
    /// Forgetting risk per language of a profile file, or for one input.
    Forgetting {
        #[arg(long)]
        rank: f64,
        #[arg(long, conflicts_with_all = ["data_tokens", "pretrain_repr"])]
        profiles: Option<PathBuf>,
        /// With `--profiles`, derives transfer support from the family matrix.
        #[arg(long, requires = "profiles")]
        components: Option<PathBuf>,
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_P_REF)]
        p_ref: f64,
        #[arg(long, required_unless_present = "profiles")]
        data_tokens: Option<f64>,
        #[arg(long, required_unless_present = "profiles")]
        pretrain_repr: Option<f64>,
        /// Defaults to 1 − pretrain_repr.
        #[arg(long, conflicts_with = "profiles")]
        novelty: Option<f64>,
        #[arg(long, default_value_t = 0.0, conflicts_with = "profiles")]
        transfer_support: f64,
        #[arg(short = 'a', long = "coef-a", allow_hyphen_values = true)]
        a: Option<f64>,
        #[arg(short = 'b', long = "coef-b", allow_hyphen_values = true)]
        b: Option<f64>,
        #[arg(short = 'c', long = "coef-c", allow_hyphen_values = true)]
        c: Option<f64>,
        #[arg(short = 'd', long = "coef-d", allow_hyphen_values = true)]
        d: Option<f64>,
        #[arg(short = 'e', long = "coef-e", allow_hyphen_values = true)]
        e: Option<f64>,
    },
    /// Split a data budget across languages (JSON request).
    Plan {
        #[arg(long)]
        request: PathBuf,
    },
    /// Mean tokens per word.
    Fertility {
        /// Comma-separated per-word token counts.
        #[arg(long, value_delimiter = ',', required_unless_present = "file")]
        counts: Vec<u32>,
        /// File of whitespace- or comma-separated counts.
        #[arg(long, conflicts_with = "counts")]
        file: Option<PathBuf>,
    },
    /// Adapter parameter count for a `rows × cols` weight, and optionally `W + B·A`.
    Lowrank {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long)]
        rank: usize,
        /// Header-less CSV matrices; all three are needed to apply the update.
        #[arg(long, requires_all = ["b", "a"])]
        w: Option<PathBuf>,
        #[arg(long, requires_all = ["w", "a"])]
        b: Option<PathBuf>,
        #[arg(long, requires_all = ["w", "b"])]
        a: Option<PathBuf>,
    },
    /// Write a synthetic observation CSV drawn from known parameters.
    Synth {
        #[arg(long)]
        params: PathBuf,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RegimeArg {
    Moderate,
    Low,
    ExtremeLow,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Regime {
        match r {
            RegimeArg::Moderate => Regime::Moderate,
            RegimeArg::Low => Regime::Low,
            RegimeArg::ExtremeLow => Regime::ExtremeLow,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("langadapt: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: &Cli) -> CliResult<String> {
    let cfg = Config::load(cli.config.as_deref())?;
    match &cli.command {
        Command::Ttc { components, weights } => cmd_ttc(cli.format, &cfg, components, weights.as_deref()),
        Command::Predict {
            params,
            language,
            model_capacity,
            data_tokens,
            rank,
            pretrain_repr,
            regime,
        } => {
            let x = AdaptationInputs::new(*model_capacity, *data_tokens, *rank, *pretrain_repr);
            cmd_predict(
                cli.format,
                &cfg,
                params,
                language.as_deref(),
                x,
                regime.map(Regime::from),
            )
        }
        Command::Fit {
            observations,
            interactions,
            restarts,
            max_iterations,
            strict,
        } => {
            let mut fit = cfg.fit.clone();
            fit.seed = cli.seed;
            fit.fit_interactions |= *interactions;
            fit.floors = cfg.floors;
            if let Some(r) = restarts {
                fit.restarts = *r;
            }
            if let Some(m) = max_iterations {
                fit.max_iterations = *m;
            }
            cmd_fit(cli.format, observations, &fit, *strict)
        }
        Command::Cte {
            observations,
            components,
            weights,
            profiles,
            params,
            omega,
            chi,
            tau,
            link_constant,
        } => {
            let mut cte = cfg.cte;
            cte.omega = omega.unwrap_or(cte.omega);
            cte.chi = chi.unwrap_or(cte.chi);
            cte.tau = tau.unwrap_or(cte.tau);
            cte.link_constant = link_constant.unwrap_or(cte.link_constant);
            cte.validate()?;
            let inputs = CteInputs {
                observations,
                components: components.as_deref(),
                weights: weights.as_deref(),
                profiles: profiles.as_deref(),
                params: params.as_deref(),
            };
            cmd_cte(cli.format, &cfg, &inputs, &cte)
        }
        Command::Forgetting {
            rank,
            profiles,
            components,
            weights,
            p_ref,
            data_tokens,
            pretrain_repr,
            novelty,
            transfer_support,
            a,
            b,
            c,
            d,
            e,
        } => {
            let mut k = cfg.forgetting;
            k.a = a.unwrap_or(k.a);
            k.b = b.unwrap_or(k.b);
            k.c = c.unwrap_or(k.c);
            k.d = d.unwrap_or(k.d);
            k.e = e.unwrap_or(k.e);
            k.validate()?;
            match profiles {
                Some(path) => {
                    let set = load_profiles(path)?;
                    let matrix = match components {
                        Some(c) => Some(build_matrix(&cfg, c, weights.as_deref())?),
                        None => None,
                    };
                    cmd_forgetting_family(cli.format, &k, *rank, &set, matrix.as_ref(), *p_ref)
                }
                None => {
                    let p = pretrain_repr.expect("required by clap");
                    let mut x =
                        ForgettingInputs::new(*rank, data_tokens.expect("required by clap"), p, *transfer_support);
                    if let Some(u) = novelty {
                        x.novelty = *u;
                    }
                    cmd_forgetting_single(cli.format, &k, &x)
                }
            }
        }
        Command::Plan { request } => cmd_plan(cli.format, request),
        Command::Fertility { counts, file } => {
            let counts = match file {
                Some(path) => parse_counts(&read(path)?)?,
                None => counts.clone(),
            };
            cmd_fertility(cli.format, &counts)
        }
        Command::Lowrank {
            rows,
            cols,
            rank,
            w,
            b,
            a,
        } => {
            let count = scaling::lora_param_count(*rows, *cols, *rank)?;
            let updated = match (w, b, a) {
                (Some(w), Some(b), Some(a)) => {
                    let (w, b, a) = (read_matrix(w)?, read_matrix(b)?, read_matrix(a)?);
                    if (w.rows(), w.cols(), b.cols()) != (*rows, *cols, *rank) {
                        return Err(CliError::Validation(format!(
                            "matrices do not match --rows {rows} --cols {cols} --rank {rank}"
                        )));
                    }
                    Some(scaling::apply_low_rank_update(&w, &b, &a)?)
                }
                _ => None,
            };
            Ok(render_lowrank(cli.format, &count, updated.as_ref()))
        }
        Command::Synth { params, n, noise } => {
            let spec = load_params(params)?;
            let p = *shared_only(&spec)?;
            if noise.is_nan() || *noise < 0.0 {
                return Err(CliError::Validation("--noise must be >= 0".into()));
            }
            Ok(fitting::write_observations_csv(&fitting::synthesize_observations(
                &p, *n, *noise, cli.seed,
            )))
        }
    }
}

fn shared_only(spec: &langadapt::planner::ParamsSpec) -> CliResult<&langadapt::ScalingParams> {
    match spec {
        langadapt::planner::ParamsSpec::Shared(p) => Ok(p),
        _ => Err(CliError::Validation("a single parameter set is required".into())),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable output");
    s.push('\n');
    s
}

fn build_matrix(cfg: &Config, components: &Path, weights: Option<&Path>) -> CliResult<TtcMatrix> {
    let set = ttc::load_components(components)?;
    let w = match weights {
        Some(path) => ttc::load_weights(path)?,
        None => cfg.ttc_weights.unwrap_or_default(),
    };
    Ok(ttc::ttc_matrix(&set.pairs, &w, &set.languages)?)
}

fn cmd_ttc(format: Format, cfg: &Config, components: &Path, weights: Option<&Path>) -> CliResult<String> {
    let m = build_matrix(cfg, components, weights)?;
    Ok(match format {
        Format::Json => {
            let mut s = m.to_json();
            s.push('\n');
            s
        }
        Format::Csv => m.to_csv(),
        Format::Table => {
            let mut header = vec!["source \\ target".to_string()];
            header.extend(m.languages().iter().cloned());
            let rows: Vec<Vec<String>> = m
                .languages()
                .iter()
                .zip(m.rows())
                .map(|(id, row)| std::iter::once(id.clone()).chain(row.into_iter().map(sig6)).collect())
                .collect();
            table(&header, &rows)
        }
    })
}

fn cmd_predict(
    format: Format,
    cfg: &Config,
    params: &Path,
    language: Option<&str>,
    x: AdaptationInputs,
    regime: Option<Regime>,
) -> CliResult<String> {
    x.validate()?;
    let spec = load_params(params)?;
    let p = match language {
        Some(id) => *spec.for_language(id)?,
        None => *shared_only(&spec)?,
    };
    let loss = match regime {
        Some(r) => scaling::regime_loss(&p, &x, &cfg.floors, r),
        None => scaling::interaction_loss(&p, &x, &cfg.floors),
    };
    if !loss.is_finite() {
        return Err(CliError::Numerical(format!("predicted loss is {loss}")));
    }
    #[derive(Serialize)]
    struct Prediction {
        loss: f64,
        inputs: AdaptationInputs,
        #[serde(skip_serializing_if = "Option::is_none")]
        regime: Option<Regime>,
    }
    Ok(match format {
        Format::Json => to_json(&Prediction {
            loss,
            inputs: x,
            regime,
        }),
        Format::Csv => format!("loss\n{loss:?}\n"),
        Format::Table => format!("{}\n", sig6(loss)),
    })
}

fn cmd_fit(format: Format, observations: &Path, cfg: &FitConfig, strict: bool) -> CliResult<String> {
    let obs = fitting::load_observations(observations)?;
    let result = fitting::fit_scaling(&obs, cfg)?;
    if strict && !result.converged {
        return Err(CliError::Numerical(format!(
            "fit did not converge within {} iterations (objective {})",
            cfg.max_iterations, result.objective
        )));
    }
    let report = result.report(cfg, obs.len());
    Ok(match format {
        Format::Csv => {
            let p = &report.params;
            let mut s = String::from("parameter,value\n");
            for (name, v) in [
                ("alpha", p.alpha),
                ("beta", p.beta),
                ("gamma", p.gamma),
                ("delta", p.delta),
                ("eta", p.eta),
                ("rho", p.rho),
                ("kappa", p.kappa),
                ("pi_exp", p.pi_exp),
                ("epsilon", p.epsilon),
                ("lambda_dp", p.lambda_dp),
                ("mu_rp", p.mu_rp),
                ("nu_dr", p.nu_dr),
                ("objective", report.objective),
            ] {
                let _ = writeln!(s, "{name},{v:?}");
            }
            s
        }
        Format::Json | Format::Table => to_json(&report),
    })
}

struct CteInputs<'a> {
    observations: &'a Path,
    components: Option<&'a Path>,
    weights: Option<&'a Path>,
    profiles: Option<&'a Path>,
    params: Option<&'a Path>,
}

fn cmd_cte(format: Format, cfg: &Config, inputs: &CteInputs<'_>, cte: &transfer::CteConfig) -> CliResult<String> {
    let obs = transfer::load_transfer_observations(inputs.observations)?;
    let matrix = match inputs.components {
        Some(c) => Some(build_matrix(cfg, c, inputs.weights)?),
        None => None,
    };
    let predictor = match (inputs.profiles, inputs.params) {
        (Some(pr), Some(pa)) => Some((load_profiles(pr)?, load_params(pa)?)),
        _ => None,
    };
    if predictor.is_some() && matrix.is_none() {
        return Err(CliError::Validation("the predicted column needs --components".into()));
    }
    let mut records = Vec::with_capacity(obs.len());
    for o in &obs {
        let measured = transfer::cte_measured(o, cte);
        let distance_aware = match &matrix {
            Some(m) => Some(transfer::cte_distance_aware(
                o,
                ttc::distance(m, &o.source, &o.target)?,
                cte,
            )),
            None => None,
        };
        let predicted = match (&matrix, &predictor) {
            (Some(m), Some((profiles, params))) => {
                let target = profiles
                    .get(&o.target)
                    .ok_or_else(|| Error::UnknownLanguage(o.target.clone()))?;
                let p = params.for_language(&o.target)?;
                Some(transfer::cte_predicted(
                    m.get(&o.source, &o.target)?,
                    target,
                    o.adapter_capacity,
                    p,
                    &cfg.floors,
                    cte,
                ))
            }
            _ => None,
        };
        records.push(CteRecord {
            source: o.source.clone(),
            target: o.target.clone(),
            measured,
            distance_aware,
            predicted,
        });
    }
    Ok(match format {
        Format::Json => to_json(&records),
        Format::Csv => transfer::cte_report_csv(&records),
        Format::Table => {
            let header = ["source", "target", "measured", "distance_aware", "predicted"].map(String::from);
            let opt = |v: Option<f64>| v.map(sig6).unwrap_or_else(|| "-".into());
            let rows: Vec<Vec<String>> = records
                .iter()
                .map(|r| {
                    vec![
                        r.source.clone(),
                        r.target.clone(),
                        sig6(r.measured),
                        opt(r.distance_aware),
                        opt(r.predicted),
                    ]
                })
                .collect();
            table(&header, &rows)
        }
    })
}

#[derive(Serialize)]
struct RiskRecord {
    #[serde(skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    risk: f64,
    logit: f64,
    inputs: ForgettingInputs,
}

fn render_risks(format: Format, records: &[RiskRecord]) -> String {
    match format {
        Format::Json => to_json(&records),
        Format::Csv => {
            let mut s =
                String::from("id,risk,logit,adapter_capacity,data_tokens,pretrain_repr,novelty,transfer_support\n");
            for r in records {
                let x = &r.inputs;
                let _ = writeln!(
                    s,
                    "{},{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
                    r.id.as_deref().unwrap_or(""),
                    r.risk,
                    r.logit,
                    x.adapter_capacity,
                    x.data_tokens,
                    x.pretrain_repr,
                    x.novelty,
                    x.transfer_support
                );
            }
            s
        }
        Format::Table => {
            if records.len() == 1 && records[0].id.is_none() {
                return format!("{}\n", sig6(records[0].risk));
            }
            let header = ["language", "risk", "transfer_support"].map(String::from);
            let rows: Vec<Vec<String>> = records
                .iter()
                .map(|r| {
                    vec![
                        r.id.clone().unwrap_or_default(),
                        sig6(r.risk),
                        sig6(r.inputs.transfer_support),
                    ]
                })
                .collect();
            table(&header, &rows)
        }
    }
}

fn cmd_forgetting_single(format: Format, k: &langadapt::ForgettingCoeffs, x: &ForgettingInputs) -> CliResult<String> {
    x.validate()?;
    let rec = RiskRecord {
        id: None,
        risk: forgetting_risk(k, x),
        logit: forgetting_logit(k, x),
        inputs: *x,
    };
    Ok(render_risks(format, &[rec]))
}

fn cmd_forgetting_family(
    format: Format,
    k: &langadapt::ForgettingCoeffs,
    rank: f64,
    profiles: &ProfileSet,
    matrix: Option<&TtcMatrix>,
    p_ref: f64,
) -> CliResult<String> {
    let mut records = Vec::new();
    for p in profiles {
        let support = match matrix {
            Some(m) => derive_transfer_support(m, profiles, &p.id, p_ref)?,
            None => 0.0,
        };
        let x = ForgettingInputs::new(rank, p.data_tokens, p.pretrain_repr, support);
        x.validate()?;
        records.push(RiskRecord {
            id: Some(p.id.clone()),
            risk: forgetting_risk(k, &x),
            logit: forgetting_logit(k, &x),
            inputs: x,
        });
    }
    Ok(render_risks(format, &records))
}

fn cmd_plan(format: Format, request: &Path) -> CliResult<String> {
    let text = read(request)?;
    let req: PlanRequest =
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", request.display())))?;
    let plan = planner::allocate_data_budget(&req)?;
    Ok(match format {
        Format::Json => to_json(&plan),
        Format::Csv => {
            let mut s = String::from("id,allocated_tokens,weight,loss_before,loss_after\n");
            for a in &plan.allocations {
                let _ = writeln!(
                    s,
                    "{},{:?},{:?},{:?},{:?}",
                    a.id, a.allocated_tokens, a.weight, a.loss_before, a.loss_after
                );
            }
            s
        }
        Format::Table => {
            let header = ["language", "allocated", "weight", "loss_before", "loss_after"].map(String::from);
            let mut rows: Vec<Vec<String>> = plan
                .allocations
                .iter()
                .map(|a| {
                    vec![
                        a.id.clone(),
                        sig6(a.allocated_tokens),
                        sig6(a.weight),
                        sig6(a.loss_before),
                        sig6(a.loss_after),
                    ]
                })
                .collect();
            rows.push(vec![
                "aggregate".into(),
                sig6(plan.total_budget),
                String::new(),
                sig6(plan.aggregate_before),
                sig6(plan.aggregate_after),
            ]);
            let mut s = table(&header, &rows);
            let _ = writeln!(s, "status: {:?}", plan.status);
            s
        }
    })
}

fn parse_counts(text: &str) -> CliResult<Vec<u32>> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| CliError::Validation(format!("`{t}` is not a token count")))
        })
        .collect()
}

fn cmd_fertility(format: Format, counts: &[u32]) -> CliResult<String> {
    let f: f64 = scaling::fertility(counts)?;
    Ok(match format {
        Format::Json => to_json(&serde_json::json!({ "fertility": f, "words": counts.len() })),
        Format::Csv => format!("fertility,words\n{f:?},{}\n", counts.len()),
        Format::Table => format!("{}\n", sig6(f)),
    })
}

fn read_matrix(path: &Path) -> CliResult<Matrix> {
    let text = read(path)?;
    let rows = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, line)| {
            line.split(',')
                .map(|v| {
                    v.trim().parse::<f64>().map_err(|_| {
                        CliError::Validation(format!(
                            "{} line {}: `{}` is not a number",
                            path.display(),
                            i + 1,
                            v.trim()
                        ))
                    })
                })
                .collect::<CliResult<Vec<f64>>>()
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Matrix::from_rows(&rows)?)
}

fn render_lowrank(format: Format, count: &LoraParamCount, updated: Option<&Matrix>) -> String {
    match format {
        Format::Json => {
            let mut v = serde_json::json!({ "params": count });
            if let Some(m) = updated {
                v["updated"] = serde_json::json!(m.to_rows());
            }
            to_json(&v)
        }
        Format::Csv => match updated {
            Some(m) => {
                let mut s = String::new();
                for row in m.to_rows() {
                    let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
                    let _ = writeln!(s, "{}", cells.join(","));
                }
                s
            }
            None => format!(
                "trainable,full,ratio\n{},{},{:?}\n",
                count.trainable, count.full, count.ratio
            ),
        },
        Format::Table => {
            let mut s = format!(
                "trainable {}  full {}  ratio {}\n",
                count.trainable,
                count.full,
                sig6(count.ratio)
            );
            if let Some(m) = updated {
                let header: Vec<String> = (0..m.cols()).map(|j| format!("c{j}")).collect();
                let rows: Vec<Vec<String>> = m
                    .to_rows()
                    .into_iter()
                    .map(|r| r.into_iter().map(sig6).collect())
                    .collect();
                s.push_str(&table(&header, &rows));
            }
            s
        }
    }
}
