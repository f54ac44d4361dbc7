//! `lcslab` command-line front end.
//!
//! Every subcommand writes a machine-readable table to stdout, preceded by
//! the fully resolved configuration (`# key=value` lines for CSV, a `config`
//! object for JSON). Progress goes to stderr. Exit codes: 0 success, 1
//! runtime error, 2 usage error.

mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use lcslab::block::RunMatch;
use lcslab::estimators::{self, EstimatorSettings, DEFAULT_DERIVATIVE_STEP};
use lcslab::experiments::{self, estimate_event_probability_at, table_length, TrialRun};
use lcslab::report::{self, fmt6, ConfigEcho};
use lcslab::{
    selfcheck, Alphabet, BlockMode, Event, ExperimentConfig, GapObjective, LabError, SymbolSequence,
};

use crate::config::{usage, FileConfig, UsageError};

#[derive(Parser, Debug)]
#[command(
    name = "lcslab",
    version,
    about = "LCS alignment microstructure laboratory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Debug, Default)]
struct Opts {
    /// Alphabet size.
    #[arg(long, global = true, env = "LCSLAB_K")]
    k: Option<usize>,
    /// String length (n for gamma; total length 2d for experiments).
    #[arg(long, global = true, env = "LCSLAB_N")]
    n: Option<usize>,
    /// Half-length d of the block-insertion model.
    #[arg(long, global = true, env = "LCSLAB_D")]
    d: Option<usize>,
    /// Block length; overrides 2*round(d^beta/2).
    #[arg(long, global = true, env = "LCSLAB_ELL")]
    ell: Option<usize>,
    #[arg(long, global = true, env = "LCSLAB_BETA")]
    beta: Option<f64>,
    #[arg(long, global = true, env = "LCSLAB_ALPHA")]
    alpha: Option<f64>,
    /// Length asymmetry p in (-1, 1).
    #[arg(long, global = true, env = "LCSLAB_P", allow_hyphen_values = true)]
    p: Option<f64>,
    #[arg(long, global = true, env = "LCSLAB_TRIALS")]
    trials: Option<usize>,
    #[arg(long, global = true, env = "LCSLAB_SEED")]
    seed: Option<u64>,
    /// Worker threads (0 = all cores). Output does not depend on it.
    #[arg(long, global = true, env = "LCSLAB_JOBS")]
    jobs: Option<usize>,
    /// csv | json
    #[arg(long, global = true, env = "LCSLAB_FORMAT")]
    format: Option<String>,
    /// Flat `key = value` file; flags and environment take precedence.
    #[arg(long, global = true, env = "LCSLAB_CONFIG")]
    config: Option<PathBuf>,
    /// inserted | natural
    #[arg(long, global = true, env = "LCSLAB_BLOCK_MODE")]
    block_mode: Option<String>,
    /// maximize | minimize (gap count summarized)
    #[arg(long, global = true, env = "LCSLAB_OBJECTIVE")]
    objective: Option<String>,
    #[arg(long, global = true, env = "LCSLAB_GAMMA_A")]
    gamma_a: Option<f64>,
    #[arg(long = "c-h", global = true, env = "LCSLAB_C_H")]
    c_h: Option<f64>,
    /// Overrides the reference value of gamma*_k.
    #[arg(long, global = true, env = "LCSLAB_GAMMA_STAR")]
    gamma_star: Option<f64>,
    #[arg(long, global = true, env = "LCSLAB_CONFIDENCE")]
    confidence: Option<f64>,
    /// Derivative step.
    #[arg(long = "h-p", global = true, env = "LCSLAB_H_P")]
    h_p: Option<f64>,
    /// Comma-separated p grid for `curve`.
    #[arg(long, global = true, env = "LCSLAB_GRID", allow_hyphen_values = true)]
    grid: Option<String>,
    /// Symbol of the inserted block, or `random`.
    #[arg(long, global = true, env = "LCSLAB_BLOCK_SYMBOL")]
    block_symbol: Option<String>,
    /// exact | at-least (natural-block run length)
    #[arg(long, global = true, env = "LCSLAB_RUN_MATCH")]
    run_match: Option<String>,
    /// Progress line on stderr every N trials (0 = off).
    #[arg(long, global = true, env = "LCSLAB_PROGRESS_EVERY")]
    progress_every: Option<usize>,
    /// Emit per-trial records instead of the summary row (CSV).
    #[arg(long, global = true)]
    per_trial: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// LCS length of two strings.
    Lcs {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Monte Carlo estimate of gamma_k(n, p).
    Gamma,
    /// Estimates of gamma_k(n, p) over a grid of p.
    Curve,
    /// Gap counts of a constant block over optimal alignments.
    Gaps,
    /// LCS gain from resampling the constant block.
    Delta,
    /// Frequency of one of the events E, K, G, H.
    Events {
        #[arg(long, default_value = "E")]
        event: String,
    },
    /// Monte Carlo check of Condition 3.
    Condition3,
    /// Oracle equivalence suites.
    OracleCheck {
        #[arg(long, default_value_t = 1000)]
        instances: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

fn parse_format(s: &str) -> anyhow::Result<Format> {
    match s {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        _ => Err(usage(format!("unknown format {s:?}; expected csv or json"))),
    }
}

fn parse_block_mode(s: &str) -> anyhow::Result<BlockMode> {
    match s {
        "inserted" => Ok(BlockMode::Inserted),
        "natural" => Ok(BlockMode::Natural),
        _ => Err(usage(format!(
            "unknown block mode {s:?}; expected inserted or natural"
        ))),
    }
}

fn parse_objective(s: &str) -> anyhow::Result<GapObjective> {
    match s {
        "maximize" | "max" | "maximize-gaps" => Ok(GapObjective::MaximizeGaps),
        "minimize" | "min" | "minimize-gaps" => Ok(GapObjective::MinimizeGaps),
        _ => Err(usage(format!(
            "unknown objective {s:?}; expected maximize or minimize"
        ))),
    }
}

fn parse_run_match(s: &str) -> anyhow::Result<RunMatch> {
    match s {
        "exact" => Ok(RunMatch::Exact),
        "at-least" => Ok(RunMatch::AtLeast),
        _ => Err(usage(format!(
            "unknown run match {s:?}; expected exact or at-least"
        ))),
    }
}

fn parse_block_symbol(s: &str) -> anyhow::Result<Option<u8>> {
    if s == "random" {
        return Ok(None);
    }
    s.parse::<u8>().map(Some).map_err(|_| {
        usage(format!(
            "block symbol must be a small integer or `random`, got {s:?}"
        ))
    })
}

fn parse_grid(s: &str) -> anyhow::Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("invalid grid value {t:?}")))
        })
        .collect()
}

fn name_of_mode(m: BlockMode) -> &'static str {
    match m {
        BlockMode::Inserted => "inserted",
        BlockMode::Natural => "natural",
    }
}

fn name_of_objective(o: GapObjective) -> &'static str {
    match o {
        GapObjective::MaximizeGaps => "maximize",
        GapObjective::MinimizeGaps => "minimize",
    }
}

fn name_of_run_match(r: RunMatch) -> &'static str {
    match r {
        RunMatch::Exact => "exact",
        RunMatch::AtLeast => "at-least",
    }
}

/// Every option after merging flags, environment, config file and defaults.
#[derive(Debug, Clone)]
struct Settings {
    k: usize,
    /// `k` as given by flag, environment or file, before defaulting.
    k_given: Option<usize>,
    n: Option<usize>,
    d: usize,
    ell: Option<usize>,
    beta: f64,
    alpha: f64,
    p: f64,
    trials: usize,
    seed: u64,
    jobs: usize,
    format: Format,
    block_mode: BlockMode,
    objective: GapObjective,
    gamma_a: Option<f64>,
    c_h: f64,
    gamma_star: Option<f64>,
    confidence: f64,
    h_p: f64,
    grid: Vec<f64>,
    block_symbol: Option<u8>,
    run_match: RunMatch,
    progress_every: usize,
    per_trial: bool,
}

fn default_grid() -> Vec<f64> {
    (-4..=4).map(|i| i as f64 / 10.0).collect()
}

impl Settings {
    fn resolve(o: Opts) -> anyhow::Result<Self> {
        let f = FileConfig::load(o.config.as_deref())?;
        let text = |flag: Option<String>, key: &str| f.layer(flag, key);
        let defaults = ExperimentConfig::new(2);
        let k_given = f.layer(o.k, "k")?;
        Ok(Settings {
            k: k_given.unwrap_or(2),
            k_given,
            n: f.layer(o.n, "n")?,
            d: f.resolve(o.d, "d", defaults.d)?,
            ell: f.layer(o.ell, "ell")?,
            beta: f.resolve(o.beta, "beta", defaults.beta)?,
            alpha: f.resolve(o.alpha, "alpha", defaults.alpha)?,
            p: f.resolve(o.p, "p", 0.0)?,
            trials: f.resolve(o.trials, "trials", defaults.trials)?,
            seed: f.resolve(o.seed, "seed", 0)?,
            jobs: f.resolve(o.jobs, "jobs", 0)?,
            format: parse_format(&text(o.format, "format")?.unwrap_or_else(|| "csv".into()))?,
            block_mode: text(o.block_mode, "block-mode")?
                .map(|s| parse_block_mode(&s))
                .transpose()?
                .unwrap_or_default(),
            objective: text(o.objective, "objective")?
                .map(|s| parse_objective(&s))
                .transpose()?
                .unwrap_or(GapObjective::MaximizeGaps),
            gamma_a: f.layer(o.gamma_a, "gamma-a")?,
            c_h: f.resolve(o.c_h, "c-h", defaults.c_h)?,
            gamma_star: f.layer(o.gamma_star, "gamma-star")?,
            confidence: f.resolve(o.confidence, "confidence", defaults.confidence)?,
            h_p: f.resolve(o.h_p, "h-p", DEFAULT_DERIVATIVE_STEP)?,
            grid: match text(o.grid, "grid")? {
                Some(g) => parse_grid(&g)?,
                None => default_grid(),
            },
            block_symbol: match text(o.block_symbol, "block-symbol")? {
                Some(s) => parse_block_symbol(&s)?,
                None => Some(0),
            },
            run_match: text(o.run_match, "run-match")?
                .map(|s| parse_run_match(&s))
                .transpose()?
                .unwrap_or_default(),
            progress_every: f.resolve(o.progress_every, "progress-every", 10)?,
            per_trial: o.per_trial,
        })
    }

    fn experiment(&self) -> ExperimentConfig {
        ExperimentConfig {
            k: self.k,
            d: self.d,
            beta: self.beta,
            alpha: self.alpha,
            trials: self.trials,
            seed: self.seed,
            gamma_a: self.gamma_a,
            c_h: self.c_h,
            block_mode: self.block_mode,
            block_symbol: self.block_symbol,
            run_match: self.run_match,
            objective: self.objective,
            gamma_star: self.gamma_star,
            confidence: self.confidence,
        }
    }

    fn estimator(&self) -> EstimatorSettings {
        EstimatorSettings {
            confidence: self.confidence,
            ..EstimatorSettings::default()
        }
    }

    fn gamma_n(&self) -> usize {
        self.n.unwrap_or(1000)
    }

    fn echo_estimator(&self, command: &str) -> ConfigEcho {
        let mut e = ConfigEcho::default();
        e.push("command", command)
            .push("k", self.k)
            .push("n", self.gamma_n())
            .push("trials", self.trials)
            .push("seed", self.seed)
            .push("confidence", fmt6(self.confidence));
        e
    }
}

fn echo_experiment(command: &str, s: &Settings, r: &experiments::Resolved) -> ConfigEcho {
    let mut e = ConfigEcho::default();
    e.push("command", command)
        .push("k", r.config.k)
        .push("n", r.n)
        .push("d", r.d)
        .push("ell", r.ell)
        .push("d_alpha", r.d_alpha)
        .push("beta", fmt6(r.config.beta))
        .push("alpha", fmt6(r.config.alpha))
        .push("trials", r.config.trials)
        .push("seed", r.config.seed)
        .push("block_mode", name_of_mode(r.config.block_mode))
        .push(
            "block_symbol",
            r.config
                .block_symbol
                .map_or("random".to_owned(), |b| b.to_string()),
        )
        .push("run_match", name_of_run_match(r.config.run_match))
        .push("objective", name_of_objective(s.objective))
        .push("gamma_star", fmt6(r.gamma_star))
        .push("gamma_a", fmt6(r.gamma_a))
        .push("c_h", fmt6(r.config.c_h))
        .push("k_threshold", fmt6(r.thresholds.k_threshold))
        .push("h_threshold", fmt6(r.thresholds.h_threshold))
        .push("confidence", fmt6(r.config.confidence));
    e
}

#[derive(Serialize)]
struct TrialOutput<'a> {
    summary: &'a lcslab::TableRow,
    resamples: usize,
    trials: &'a [lcslab::TrialRecord],
}

fn emit_trial_run(
    out: &mut Vec<u8>,
    command: &str,
    s: &Settings,
    run: &TrialRun,
) -> anyhow::Result<()> {
    let mut echo = echo_experiment(command, s, &run.resolved);
    echo.push("resamples", run.resamples);
    match s.format {
        Format::Json => report::write_json(
            out,
            &echo,
            "result",
            &TrialOutput {
                summary: &run.row,
                resamples: run.resamples,
                trials: &run.records,
            },
        )?,
        Format::Csv => {
            echo.write_comments(out)?;
            if s.per_trial {
                report::write_trials_csv(out, &run.records)?;
            } else {
                report::write_summary_csv(out, std::slice::from_ref(&run.row))?;
            }
        }
    }
    Ok(())
}

fn emit_estimates(
    out: &mut Vec<u8>,
    s: &Settings,
    echo: &ConfigEcho,
    rows: &[(&str, lcslab::Estimate)],
    json: &impl Serialize,
) -> anyhow::Result<()> {
    match s.format {
        Format::Json => report::write_json(out, echo, "result", json)?,
        Format::Csv => {
            echo.write_comments(out)?;
            report::write_estimates_csv(out, rows)?;
        }
    }
    Ok(())
}

fn experiment_n(s: &Settings) -> Option<usize> {
    s.n.or_else(|| s.ell.map(table_length))
}

fn run(command: Command, s: &Settings, out: &mut Vec<u8>) -> anyhow::Result<()> {
    match command {
        Command::Lcs { x, y } => {
            let (x, y) = parse_pair(&x, &y, s)?;
            let len = lcslab::lcs_length(&x, &y)?;
            let mut echo = ConfigEcho::default();
            echo.push("command", "lcs")
                .push("x", &x)
                .push("y", &y)
                .push("k", x.alphabet().size());
            match s.format {
                Format::Json => report::write_json(out, &echo, "lcs_length", &len)?,
                Format::Csv => {
                    echo.write_comments(out)?;
                    writeln!(out, "lcs_length\n{len}")?;
                }
            }
        }
        Command::Gamma => {
            let e = estimators::estimate_gamma_with(
                s.k,
                s.gamma_n(),
                s.p,
                s.trials,
                s.seed,
                &s.estimator(),
            )?;
            let (nx, ny) = estimators::rounded_lengths(s.gamma_n(), s.p)?;
            let mut echo = s.echo_estimator("gamma");
            echo.push("p", fmt6(s.p))
                .push("len_x", nx)
                .push("len_y", ny);
            emit_estimates(out, s, &echo, &[("gamma", e)], &e)?;
        }
        Command::Curve => {
            let c = estimators::estimate_curve_with(
                s.k,
                s.gamma_n(),
                &s.grid,
                s.trials,
                s.seed,
                &s.estimator(),
            )?;
            let mut echo = s.echo_estimator("curve");
            let grid: Vec<String> = s.grid.iter().map(|&p| fmt6(p)).collect();
            echo.push("grid", grid.join(";"))
                .push("p_m_hat", fmt6(c.p_m_hat));
            match s.format {
                Format::Json => report::write_json(out, &echo, "result", &c)?,
                Format::Csv => {
                    echo.write_comments(out)?;
                    report::write_curve_csv(out, &c)?;
                }
            }
        }
        Command::Gaps => {
            let run = experiments::run_gap_trials(&s.experiment(), experiment_n(s), s.ell)?;
            emit_trial_run(out, "gaps", s, &run)?;
        }
        Command::Delta => {
            let run = experiments::run_delta_trials(&s.experiment(), experiment_n(s), s.ell)?;
            emit_trial_run(out, "delta", s, &run)?;
        }
        Command::Events { event } => {
            let ev: Event = event.parse()?;
            let cfg = s.experiment();
            let resolved = cfg.resolve(s.n, s.ell)?;
            let e = estimate_event_probability_at(ev, &cfg, s.n, s.ell)?;
            let mut echo = echo_experiment("events", s, &resolved);
            echo.push("event", format!("{ev:?}"));
            let name = format!("P({ev:?})");
            emit_estimates(out, s, &echo, &[(name.as_str(), e)], &e)?;
        }
        Command::Condition3 => {
            let r = estimators::check_condition3_with(
                s.k,
                s.gamma_n(),
                s.trials,
                s.seed,
                s.h_p,
                &s.estimator(),
            )?;
            let mut echo = s.echo_estimator("condition3");
            echo.push("h_p", fmt6(s.h_p))
                .push("decision_ci", "normal")
                .push("p_m_hat", fmt6(r.p_m_hat))
                .push("verdict", r.verdict);
            let rows = [
                ("gamma0", r.gamma0),
                ("right_derivative", r.right_derivative),
                ("margin", r.margin),
            ];
            emit_estimates(out, s, &echo, &rows, &r)?;
        }
        Command::OracleCheck { instances } => {
            let results = selfcheck::run_all(instances, s.seed);
            let mut echo = ConfigEcho::default();
            echo.push("command", "oracle-check")
                .push("instances", instances)
                .push("seed", s.seed);
            match s.format {
                Format::Json => report::write_json(out, &echo, "suites", &results)?,
                Format::Csv => {
                    echo.write_comments(out)?;
                    writeln!(out, "suite,cases,mismatches")?;
                    for r in &results {
                        writeln!(out, "{},{},{}", r.suite, r.cases, r.mismatches)?;
                    }
                }
            }
            let failed: usize = results.iter().map(|r| r.mismatches).sum();
            if failed > 0 {
                anyhow::bail!("oracle check found {failed} mismatches");
            }
        }
    }
    Ok(())
}

fn parse_pair(x: &str, y: &str, s: &Settings) -> anyhow::Result<(SymbolSequence, SymbolSequence)> {
    let alphabet = match s.k_given {
        Some(k) => Alphabet::new(k)?,
        None => {
            let a: SymbolSequence = x.parse()?;
            let b: SymbolSequence = y.parse()?;
            a.alphabet().max(b.alphabet())
        }
    };
    Ok((
        SymbolSequence::parse_with(x, alphabet)?,
        SymbolSequence::parse_with(y, alphabet)?,
    ))
}

fn is_usage(err: &anyhow::Error) -> bool {
    err.downcast_ref::<UsageError>().is_some()
        || err
            .downcast_ref::<LabError>()
            .is_some_and(LabError::is_usage)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    env_logger::Builder::new()
        .filter_level(log::LevelFilter::Info)
        .parse_env("LCSLAB_LOG")
        .format_timestamp(None)
        .init();

    let result = Settings::resolve(cli.opts).and_then(|s| {
        lcslab::progress::set_progress_interval(s.progress_every);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(s.jobs)
            .build()
            .context("building worker pool")?;
        let mut out = Vec::new();
        let res = pool.install(|| run(cli.command, &s, &mut out));
        std::io::stdout().write_all(&out)?;
        res
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if is_usage(&e) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
