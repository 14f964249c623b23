//! Command-line front end shared by the `coopsim` binary.
//!
//! Subcommands: `run`, `sweep`, `adaptive`, `oracle`, `analyze` and
//! `baselines`. Exit status is 0 on success, 1 on configuration errors and 2
//! on runtime (I/O or simulation) errors.
//!
//! CSV files start with a `# coopsim generator=chacha8 seed=N` comment line
//! and print floats with Rust's shortest round-trip formatting, so parsing a
//! file gives back the exact in-memory values.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use thiserror::Error;

use crate::analysis::{busy_period_moments, drift_constants, exact_busy_period_moments, throughput_lower_bound};
use crate::config::{parse_list, parse_policy, ConfigError, RunConfig};
use crate::model::PowerSet;
use crate::oracle::{grid_search, grid_search_with_coop, optimal_two_point, simulate_stationary, StationaryPolicy};
use crate::sim::{run_adaptive, run_episode, sweep_v, FrameRecord, PolicySpec, RunMetrics, GENERATOR};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "coopsim", version, about = "Cooperative cognitive femtocell simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one episode; writes frames.csv and summary.csv.
    Run(Common),
    /// One episode per V; writes sweep.csv.
    Sweep(Common),
    /// Episode with a PU rate schedule; writes frames.csv and moving_average.csv.
    Adaptive(Common),
    /// Offline stationary optimum; prints key=value lines and writes oracle.csv.
    Oracle {
        #[command(flatten)]
        common: Common,
        /// Check the policy by Monte-Carlo simulation.
        #[arg(long)]
        validate: bool,
        #[arg(long, default_value_t = 10_000_000)]
        validate_slots: u64,
        /// Grid search with this step instead of the closed form.
        #[arg(long)]
        grid_step: Option<f64>,
        /// Pin the cooperation probability (implies a grid search).
        #[arg(long)]
        coop_prob: Option<f64>,
    },
    /// Frame-length bounds, moments, drift constants and throughput guarantees.
    Analyze(Common),
    /// The three baselines and FBDPP at one operating point.
    Baselines(Common),
}

/// Flags shared by every subcommand; each overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub frames: Option<u64>,
    #[arg(long)]
    pub v: Option<f64>,
    /// Comma-separated V values.
    #[arg(long)]
    pub v_list: Option<String>,
    #[arg(long)]
    pub policy: Option<String>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub window: Option<usize>,
}

impl Common {
    /// Loads the config and applies the overrides; nothing runs if this fails.
    pub fn load(&self) -> Result<RunConfig, CliError> {
        let mut c = RunConfig::from_path(&self.config)?;
        if let Some(seed) = self.seed {
            c.seed = seed;
        }
        if let Some(frames) = self.frames {
            c.frames = frames;
        }
        if let Some(v) = self.v {
            c.v = v;
        }
        if let Some(list) = &self.v_list {
            c.v_list = parse_list(list).map_err(|m| CliError::Usage(format!("--v-list: {m}")))?;
        }
        if let Some(policy) = &self.policy {
            c.policy = parse_policy(policy).map_err(|m| CliError::Usage(format!("--policy: {m}")))?;
        }
        if let Some(dir) = &self.out_dir {
            c.out_dir = dir.clone();
        }
        if let Some(w) = self.window {
            c.window = w;
        }
        c.validate()?;
        Ok(c)
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let mut out = std::io::stdout().lock();
    match execute(&cli.command, &mut out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("coopsim: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Run(c) => cmd_run(&c.load()?, out),
        Command::Sweep(c) => cmd_sweep(&c.load()?, out),
        Command::Adaptive(c) => cmd_adaptive(&c.load()?, out),
        Command::Oracle {
            common,
            validate,
            validate_slots,
            grid_step,
            coop_prob,
        } => {
            let opts = OracleOptions {
                validate_slots: validate.then_some(*validate_slots),
                grid_step: *grid_step,
                coop_prob: *coop_prob,
            };
            cmd_oracle(&common.load()?, &opts, out)
        }
        Command::Analyze(c) => cmd_analyze(&c.load()?, out),
        Command::Baselines(c) => cmd_baselines(&c.load()?, out),
    }
}

/// Rayon pool sized by `COOPSIM_THREADS` when set.
fn pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(s) = std::env::var("COOPSIM_THREADS") {
        let n: usize = s
            .parse()
            .map_err(|_| CliError::Usage(format!("COOPSIM_THREADS must be a positive integer, got `{s}`")))?;
        builder = builder.num_threads(n.max(1));
    }
    builder.build().map_err(runtime)
}

fn out_path(config: &RunConfig, name: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(&config.out_dir).map_err(runtime)?;
    Ok(config.out_dir.join(name))
}

fn csv_writer(path: &Path, seed: u64) -> Result<csv::Writer<File>, CliError> {
    let mut file = File::create(path).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    writeln!(file, "# coopsim generator={GENERATOR} seed={seed}").map_err(runtime)?;
    Ok(csv::Writer::from_writer(file))
}

fn write_rows(path: &Path, seed: u64, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv_writer(path, seed)?;
    w.write_record(header).map_err(runtime)?;
    for row in rows {
        w.write_record(row).map_err(runtime)?;
    }
    w.flush().map_err(runtime)
}

pub const FRAMES_HEADER: [&str; 8] = [
    "frame",
    "frame_len",
    "admitted",
    "served",
    "power_idle",
    "power_coop",
    "q_su_end",
    "x_su_end",
];
pub const SUMMARY_HEADER: [&str; 7] = [
    "policy",
    "v",
    "throughput_admitted",
    "throughput_served",
    "avg_power",
    "max_q_su",
    "seed",
];
pub const SWEEP_HEADER: [&str; 4] = ["v", "throughput_admitted", "avg_q_su", "avg_power"];

pub fn write_frames_csv(path: &Path, m: &RunMetrics) -> Result<(), CliError> {
    let rows: Vec<Vec<String>> = m
        .frames
        .iter()
        .map(|f| {
            vec![
                f.frame.to_string(),
                f.frame_len.to_string(),
                f.admitted.to_string(),
                f.served.to_string(),
                f.power_idle.to_string(),
                f.power_coop.to_string(),
                f.q_su_end.to_string(),
                f.x_su_end.to_string(),
            ]
        })
        .collect();
    write_rows(path, m.seed, &FRAMES_HEADER, &rows)
}

fn reader(path: &Path) -> Result<csv::Reader<File>, CliError> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| runtime(format!("{}: {e}", path.display())))
}

fn field<T: std::str::FromStr>(record: &csv::StringRecord, i: usize) -> Result<T, CliError> {
    record
        .get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| runtime(format!("bad CSV field {i} in {record:?}")))
}

/// Reads a `frames.csv`. The PU rate is not part of the schema and comes back as NaN.
pub fn read_frames_csv(path: &Path) -> Result<Vec<FrameRecord>, CliError> {
    let mut r = reader(path)?;
    r.records()
        .map(|rec| {
            let rec = rec.map_err(runtime)?;
            Ok(FrameRecord {
                frame: field(&rec, 0)?,
                frame_len: field(&rec, 1)?,
                admitted: field(&rec, 2)?,
                served: field(&rec, 3)?,
                power_idle: field(&rec, 4)?,
                power_coop: field(&rec, 5)?,
                q_su_end: field(&rec, 6)?,
                x_su_end: field(&rec, 7)?,
                lambda_pu: f64::NAN,
            })
        })
        .collect()
}

/// One summary row, as strings in [`SUMMARY_HEADER`] order.
pub fn summary_row(m: &RunMetrics) -> Vec<String> {
    vec![
        m.policy.clone(),
        m.v.to_string(),
        m.throughput_admitted().to_string(),
        m.throughput_served().to_string(),
        m.avg_power().to_string(),
        m.max_q_su.to_string(),
        m.seed.to_string(),
    ]
}

/// Reads any CSV written by this module into header and rows.
pub fn read_csv_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>), CliError> {
    let mut r = reader(path)?;
    let header = r.headers().map_err(runtime)?.iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|r| r.iter().map(String::from).collect()).map_err(runtime))
        .collect::<Result<_, _>>()?;
    Ok((header, rows))
}

pub fn cmd_run(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let m = run_episode(&config.scenario()).map_err(runtime)?;
    write_frames_csv(&out_path(config, "frames.csv")?, &m)?;
    write_rows(
        &out_path(config, "summary.csv")?,
        m.seed,
        &SUMMARY_HEADER,
        &[summary_row(&m)],
    )?;
    writeln!(
        out,
        "policy={} v={} frames={} slots={} throughput_admitted={} throughput_served={} avg_power={} max_q_su={} seed={}",
        m.policy,
        m.v,
        m.frames.len(),
        m.total_slots,
        m.throughput_admitted(),
        m.throughput_served(),
        m.avg_power(),
        m.max_q_su,
        m.seed
    )
    .map_err(runtime)
}

pub fn cmd_sweep(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let results = pool()?
        .install(|| sweep_v(&config.scenario(), &config.v_list))
        .map_err(runtime)?;
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|(v, m)| {
            vec![
                v.to_string(),
                m.throughput_admitted().to_string(),
                m.avg_q_su().to_string(),
                m.avg_power().to_string(),
            ]
        })
        .collect();
    write_rows(&out_path(config, "sweep.csv")?, config.seed, &SWEEP_HEADER, &rows)?;
    for row in &rows {
        writeln!(
            out,
            "v={} throughput_admitted={} avg_q_su={} avg_power={}",
            row[0], row[1], row[2], row[3]
        )
        .map_err(runtime)?;
    }
    Ok(())
}

pub fn cmd_adaptive(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let m = run_adaptive(&config.scenario()).map_err(runtime)?;
    write_frames_csv(&out_path(config, "frames.csv")?, &m)?;
    let rows: Vec<Vec<String>> = m
        .moving_average(config.window)
        .iter()
        .map(|p| {
            vec![
                p.frame.to_string(),
                p.lambda_pu.to_string(),
                p.throughput.to_string(),
                p.coop_power.to_string(),
                p.power.to_string(),
            ]
        })
        .collect();
    write_rows(
        &out_path(config, "moving_average.csv")?,
        m.seed,
        &["frame", "lambda_pu", "throughput", "coop_power", "power"],
        &rows,
    )?;
    writeln!(
        out,
        "frames={} throughput_admitted={} avg_power={} avg_coop_power={} window={}",
        m.frames.len(),
        m.throughput_admitted(),
        m.avg_power(),
        m.avg_coop_power(),
        config.window
    )
    .map_err(runtime)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct OracleOptions {
    /// Monte-Carlo horizon when validating.
    pub validate_slots: Option<u64>,
    pub grid_step: Option<f64>,
    pub coop_prob: Option<f64>,
}

pub fn oracle_policy(config: &RunConfig, opts: &OracleOptions) -> Result<StationaryPolicy, CliError> {
    let usage = |e: crate::oracle::OracleError| CliError::Usage(e.to_string());
    match (opts.grid_step, opts.coop_prob) {
        (step, Some(q)) => grid_search_with_coop(&config.params, step.unwrap_or(1e-3), q).map_err(usage),
        (Some(step), None) => grid_search(&config.params, step).map_err(usage),
        (None, None) => optimal_two_point(&config.params).map_err(usage),
    }
}

pub fn cmd_oracle(config: &RunConfig, opts: &OracleOptions, out: &mut dyn Write) -> Result<(), CliError> {
    let policy = oracle_policy(config, opts)?;
    let mut lines = vec![
        ("upsilon_star", policy.upsilon.to_string()),
        ("coop_prob", policy.coop_prob.to_string()),
        ("idle_tx_prob", policy.idle_tx_prob.to_string()),
        ("pi_0", policy.pi_0.to_string()),
        ("power_used", policy.power_used.to_string()),
    ];
    if let Some(slots) = opts.validate_slots {
        let est = simulate_stationary(&policy, &config.params, slots, config.seed);
        lines.push(("mc_slots", est.slots.to_string()));
        lines.push(("mc_admitted", est.admitted.to_string()));
        lines.push(("mc_service_capacity", est.service_capacity.to_string()));
        lines.push(("mc_avg_power", est.avg_power.to_string()));
        lines.push(("mc_idle_fraction", est.idle_fraction.to_string()));
    }
    for (k, v) in &lines {
        writeln!(out, "{k}={v}").map_err(runtime)?;
    }
    let header: Vec<&str> = lines.iter().map(|(k, _)| *k).collect();
    let row: Vec<String> = lines.into_iter().map(|(_, v)| v).collect();
    write_rows(&out_path(config, "oracle.csv")?, config.seed, &header, &[row])
}

pub fn cmd_analyze(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let p = &config.params;
    let analysis = |e: crate::analysis::AnalysisError| CliError::Usage(e.to_string());
    let constants = drift_constants(p).map_err(analysis)?;
    let (e_b, e_b2) = busy_period_moments(p.lambda_pu, p.phi_nc()).map_err(analysis)?;
    let (_, e_b2_exact) = exact_busy_period_moments(p.lambda_pu, p.phi_nc()).map_err(analysis)?;
    let upsilon_star = match p.power_set {
        PowerSet::TwoPoint { .. } => optimal_two_point(p),
        PowerSet::FiniteGrid { .. } => grid_search(p, 1e-3),
    }
    .map_err(|e| CliError::Usage(e.to_string()))?
    .upsilon;

    let mut w = |k: &str, v: f64| writeln!(out, "{k}={v}").map_err(runtime);
    w("t_min", constants.t_min)?;
    w("t_max", constants.t_max)?;
    w("e_b", e_b)?;
    w("e_b2", e_b2)?;
    w("e_b2_first_passage", e_b2_exact)?;
    w("d", constants.d_const)?;
    w("b", constants.b_const)?;
    w("c", constants.c_const)?;
    w("upsilon_star", upsilon_star)?;
    for &v in &config.v_list {
        let bound = throughput_lower_bound(v, upsilon_star, &constants);
        let flag = if bound <= 0.0 { " vacuous" } else { "" };
        writeln!(out, "throughput_lower_bound v={v} value={bound}{flag}").map_err(runtime)?;
    }
    Ok(())
}

/// FBDPP and the three baselines at the config's operating point.
pub fn baseline_table(config: &RunConfig) -> Result<Vec<RunMetrics>, CliError> {
    let policies = [
        PolicySpec::Fbdpp,
        PolicySpec::NoCoop,
        PolicySpec::AlwaysCoop,
        PolicySpec::CounterBased,
    ];
    let scenario = config.scenario();
    pool()?
        .install(|| {
            policies
                .par_iter()
                .map(|&policy| run_episode(&scenario.clone().with_policy(policy)))
                .collect::<Result<Vec<_>, _>>()
        })
        .map_err(runtime)
}

pub fn cmd_baselines(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let table = baseline_table(config)?;
    writeln!(
        out,
        "{:<12} {:>12} {:>12} {:>10} {:>10}",
        "policy", "admitted", "served", "power", "slots"
    )
    .map_err(runtime)?;
    for m in &table {
        writeln!(
            out,
            "{:<12} {:>12.4} {:>12.4} {:>10.4} {:>10}",
            m.policy,
            m.throughput_admitted(),
            m.throughput_served(),
            m.avg_power(),
            m.total_slots
        )
        .map_err(runtime)?;
    }
    let rows: Vec<Vec<String>> = table.iter().map(summary_row).collect();
    write_rows(&out_path(config, "baselines.csv")?, config.seed, &SUMMARY_HEADER, &rows)
}
