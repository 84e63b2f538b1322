//! `lpwave`: run the verification experiments from the command line.
//!
//! Exit codes: 0 when every verdict passes, 2 when any verdict fails,
//! 1 on execution errors. Reports go to stdout as JSON; diagnostics go to
//! stderr.

mod catalog;
mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use config::RunConfig;
use lpwave::experiments::{
    exp_ch_lower_bound, exp_conservation, exp_discontinuity, exp_localization,
    exp_novikov_lower_bound, exp_remainder_scaling, ChLowerBoundParams, ConservationParams,
    DiscontinuityParams, ExperimentReport, LocalizationParams, NovikovLowerBoundParams,
    RemainderParams, Thresholds,
};
use lpwave::initial_data::PacketSpec;
use lpwave::ModelKind;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "lpwave",
    about = "Frequency-block analysis and solver experiments for shallow-water wave models",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug, Default)]
struct CommonArgs {
    /// TOML configuration file; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for report files (omit to skip writing files).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format: csv, json, or both.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Grid size N (power of two).
    #[arg(long = "grid-n", global = true)]
    grid_n: Option<usize>,
    /// Box length L.
    #[arg(long = "grid-l", global = true)]
    grid_l: Option<f64>,
    /// Random seed (echoed into reports).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Packet scale step k.
    #[arg(long)]
    k: Option<u32>,
    /// Regularity index sigma.
    #[arg(long)]
    sigma: Option<f64>,
    /// Lebesgue exponent p (a number or "inf").
    #[arg(long)]
    p: Option<String>,
    /// Displacement size eps for the discontinuity runs.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Model: ch, b, dp, or novikov.
    #[arg(long)]
    model: Option<String>,
    /// b coefficient for the b-family model.
    #[arg(long)]
    b: Option<f64>,
    /// Horizon for conservation runs.
    #[arg(long = "t-end")]
    t_end: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Block localization of one wave packet.
    Localization {
        #[command(flatten)]
        common: CommonArgs,
        /// Packet scale n.
        #[arg(long)]
        n: Option<u32>,
        /// Optional secondary index i (< n).
        #[arg(long)]
        i: Option<u32>,
        /// Use the difference carrier 2^kn - 2^ki instead of the sum.
        #[arg(long, requires = "i")]
        minus: bool,
    },
    /// Block lower bound for the squared packet series.
    ChLowerBound {
        #[command(flatten)]
        common: CommonArgs,
        /// Tested scales, e.g. --n 1 --n 2.
        #[arg(long = "n")]
        n_list: Vec<u32>,
        /// Series truncation (defaults to the largest tested scale).
        #[arg(long = "n-max")]
        n_max: Option<u32>,
    },
    /// Spectral lower bounds for the power-law datum.
    NovikovLowerBound {
        #[command(flatten)]
        common: CommonArgs,
        /// Tested blocks, e.g. --j 4 --j 5.
        #[arg(long = "j")]
        j_list: Vec<u32>,
    },
    /// Remainder and first-difference scaling in t.
    Remainder {
        #[command(flatten)]
        common: CommonArgs,
        /// Sample times (repeatable); default spans 1e-5..1e-3.
        #[arg(long = "t")]
        t_list: Vec<f64>,
    },
    /// The scale-matched displacement mechanism.
    Discontinuity {
        #[command(flatten)]
        common: CommonArgs,
        /// Tested scales (packet n or block j depending on the model).
        #[arg(long = "n", alias = "j")]
        scales: Vec<u32>,
    },
    /// Conservation drift and integrator-order diagnostics.
    Conservation {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run every experiment with its defaults.
    All {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// List the experiments and what each one checks.
    List {
        /// Machine-readable output.
        #[arg(long)]
        json: bool,
    },
}

fn resolve_config(common: &CommonArgs) -> anyhow::Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = &common.out {
        cfg.out_dir = Some(v.display().to_string());
    }
    if let Some(v) = &common.format {
        cfg.format = v.parse()?;
    }
    if let Some(v) = common.grid_n {
        cfg.grid_n = v;
    }
    if let Some(v) = common.grid_l {
        cfg.grid_l = v;
    }
    if let Some(v) = common.seed {
        cfg.seed = v;
    }
    if let Some(v) = common.k {
        cfg.k = v;
    }
    if let Some(v) = common.sigma {
        cfg.sigma = v;
    }
    if let Some(v) = &common.p {
        cfg.p = v.clone();
    }
    if let Some(v) = common.epsilon {
        cfg.epsilon = v;
    }
    if let Some(v) = &common.model {
        cfg.model = v.clone();
    }
    if let Some(v) = common.b {
        cfg.b = v;
    }
    if let Some(v) = common.t_end {
        cfg.t_end = v;
    }
    Ok(cfg)
}

fn run_localization(
    cfg: &RunConfig,
    n: Option<u32>,
    i: Option<u32>,
    minus: bool,
) -> anyhow::Result<ExperimentReport> {
    let grid = cfg.grid()?;
    let n = n.unwrap_or(2);
    let sign = if minus {
        lpwave::initial_data::Sign::Minus
    } else {
        lpwave::initial_data::Sign::Plus
    };
    let packet = match i {
        Some(i) => PacketSpec::pair(cfg.k, n, i, sign),
        None => PacketSpec::single(cfg.k, n),
    };
    Ok(exp_localization(
        &grid,
        &LocalizationParams { packet },
        &Thresholds::default(),
    )?)
}

fn run_ch_lower_bound(
    cfg: &RunConfig,
    n_list: &[u32],
    n_max: Option<u32>,
) -> anyhow::Result<ExperimentReport> {
    let grid = cfg.grid()?;
    let params = ChLowerBoundParams {
        k: cfg.k,
        sigma: cfg.sigma,
        p: cfg.lp()?,
        n_list: if n_list.is_empty() {
            cfg.n_list.clone()
        } else {
            n_list.to_vec()
        },
        n_max: n_max.or(cfg.n_max),
    };
    Ok(exp_ch_lower_bound(&grid, &params, &Thresholds::default())?)
}

fn run_novikov_lower_bound(cfg: &RunConfig, j_list: &[u32]) -> anyhow::Result<ExperimentReport> {
    let grid = cfg.grid()?;
    let j_list = if j_list.is_empty() {
        cfg.j_list.clone()
    } else {
        j_list.to_vec()
    };
    let params = NovikovLowerBoundParams {
        sigma: cfg.sigma,
        j_list: j_list.iter().map(|&j| j as i32).collect(),
    };
    Ok(exp_novikov_lower_bound(&grid, &params, &Thresholds::default())?)
}

fn run_remainder(cfg: &RunConfig, t_list: &[f64]) -> anyhow::Result<ExperimentReport> {
    let grid = cfg.grid()?;
    let model = cfg.model_kind()?;
    let mut params = RemainderParams::defaults_for(model);
    params.sigma = cfg.sigma;
    params.p = cfg.lp()?;
    params.k = cfg.k;
    if !t_list.is_empty() {
        params.t_list = t_list.to_vec();
    } else if let Some(list) = &cfg.t_list {
        params.t_list = list.clone();
    }
    Ok(exp_remainder_scaling(&grid, &params, &Thresholds::default())?)
}

fn run_discontinuity(cfg: &RunConfig, scales: &[u32]) -> anyhow::Result<ExperimentReport> {
    let grid = cfg.grid()?;
    let model = cfg.model_kind()?;
    let mut params = DiscontinuityParams::defaults_for(model);
    params.sigma = cfg.sigma;
    params.p = cfg.lp()?;
    params.k = cfg.k;
    params.epsilon = cfg.epsilon;
    if !scales.is_empty() {
        params.scales = scales.to_vec();
    } else if !matches!(model, ModelKind::Novikov) {
        params.scales = cfg.n_list.clone();
    }
    Ok(exp_discontinuity(&grid, &params, &Thresholds::default())?)
}

fn run_conservation(cfg: &RunConfig) -> anyhow::Result<ExperimentReport> {
    let grid = cfg.grid()?;
    let mut params = ConservationParams::defaults_for(cfg.model_kind()?);
    params.sigma = cfg.sigma;
    params.k = cfg.k;
    params.t_end = cfg.t_end;
    Ok(exp_conservation(&grid, &params, &Thresholds::default())?)
}

fn emit_reports(cfg: &RunConfig, reports: &[ExperimentReport]) -> anyhow::Result<bool> {
    let out_dir = cfg.out_dir.as_ref().map(PathBuf::from);
    let mut all_pass = true;
    for report in reports {
        let mut annotated = report.clone();
        annotated.param("seed", cfg.seed);
        annotated.param("run_config", cfg);
        let written = output::emit(&annotated, out_dir.as_deref(), cfg.format)?;
        for path in written {
            eprintln!("wrote {}", path.display());
        }
        println!("{}", serde_json::to_string_pretty(&annotated)?);
        eprintln!(
            "{}: {}",
            annotated.name,
            if annotated.verdict { "pass" } else { "FAIL" }
        );
        all_pass &= annotated.verdict;
    }
    Ok(all_pass)
}

fn dispatch(command: &Command) -> anyhow::Result<bool> {
    match command {
        Command::List { json } => {
            if *json {
                catalog::print_json()?;
            } else {
                catalog::print_human();
            }
            Ok(true)
        }
        Command::Localization { common, n, i, minus } => {
            let cfg = resolve_config(common)?;
            let report = run_localization(&cfg, *n, *i, *minus)?;
            emit_reports(&cfg, &[report])
        }
        Command::ChLowerBound {
            common,
            n_list,
            n_max,
        } => {
            let cfg = resolve_config(common)?;
            let report = run_ch_lower_bound(&cfg, n_list, *n_max)?;
            emit_reports(&cfg, &[report])
        }
        Command::NovikovLowerBound { common, j_list } => {
            let cfg = resolve_config(common)?;
            let report = run_novikov_lower_bound(&cfg, j_list)?;
            emit_reports(&cfg, &[report])
        }
        Command::Remainder { common, t_list } => {
            let cfg = resolve_config(common)?;
            let report = run_remainder(&cfg, t_list)?;
            emit_reports(&cfg, &[report])
        }
        Command::Discontinuity { common, scales } => {
            let cfg = resolve_config(common)?;
            let report = run_discontinuity(&cfg, scales)?;
            emit_reports(&cfg, &[report])
        }
        Command::Conservation { common } => {
            let cfg = resolve_config(common)?;
            let report = run_conservation(&cfg)?;
            emit_reports(&cfg, &[report])
        }
        Command::All { common } => {
            let cfg = resolve_config(common)?;
            let mut all_pass = emit_reports(
                &cfg,
                &[
                    run_localization(&cfg, None, None, false)?,
                    run_ch_lower_bound(&cfg, &[], None)?,
                    run_novikov_lower_bound(&cfg, &[])?,
                ],
            )?;
            for model in ["ch", "dp", "novikov"] {
                // per-model subdirectory so the reports do not collide
                let mut model_cfg = cfg.clone();
                model_cfg.model = model.into();
                model_cfg.out_dir = cfg
                    .out_dir
                    .as_ref()
                    .map(|d| format!("{d}/{model}"));
                let mut reports = vec![
                    run_remainder(&model_cfg, &[])?,
                    run_conservation(&model_cfg)?,
                ];
                if model != "dp" {
                    reports.push(run_discontinuity(&model_cfg, &[])?);
                }
                all_pass &= emit_reports(&model_cfg, &reports)?;
            }
            Ok(all_pass)
        }
    }
}

fn main() -> ExitCode {
    // die quietly when the consumer of stdout goes away (e.g. `lpwave list | head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
