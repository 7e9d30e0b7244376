//! Experiment orchestration behind the `rwdp` binary: flag/config-file
//! resolution, deterministic replica fan-out, and CSV emission.
//!
//! Output format: `#`-prefixed metadata lines (build id, RNG algorithm,
//! full resolved config), a header row, data rows, and where applicable a
//! pooled footer row. Identical config and seed produce byte-identical
//! output; replica results are collected in index order so threading never
//! changes bytes. `lambda = inf` is spelled `inf`.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::analytic::{self, GapScenario};
use crate::couplings;
use crate::environment::PruneConfig;
use crate::error::{Error, Result};
use crate::estimators::{self, BlockMoments, SpeedMethod};
use crate::params::Params;
use crate::rng::RNG_ALGORITHM;
use crate::walker::{self, PlainConfig};

pub const BUILD_ID: &str = concat!("rwdp ", env!("CARGO_PKG_VERSION"));

#[derive(Parser, Debug)]
#[command(
    name = "rwdp",
    version,
    about = "Monte Carlo laboratory for biased random walks on dynamical percolation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print every closed-form quantity for one parameter point
    Formulas(FormulasArgs),
    /// Estimate the speed by plain or regenerative simulation
    Simulate(SimulateArgs),
    /// Occupancy fractions of the adjacent-edge projection and far-edge marginals
    Stationary(StationaryArgs),
    /// Coupled two-walker experiments (disparity order coupling, gap scenarios)
    Coupling(CouplingArgs),
    /// Backward-attempt event decomposition over k-block windows
    Events(EventsArgs),
    /// Weighted least-squares fit of speeds against the exponential model
    Fit(FitArgs),
}

/// Flags shared by every subcommand. Any flag not given on the command
/// line falls back to the `key=value` config file, then to the default.
#[derive(Args, Debug, Default, Clone)]
pub struct CommonArgs {
    /// Plain-text key=value file substituting for absent flags
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output CSV path (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Lattice dimension
    #[arg(short = 'd', long)]
    pub d: Option<u32>,
    /// Open probability on refresh, in (0,1)
    #[arg(short = 'p', long)]
    pub p: Option<f64>,
    /// Edge refresh rate
    #[arg(short = 'm', long)]
    pub mu: Option<f64>,
    /// Bias; `inf` for the totally asymmetric walk
    #[arg(short = 'l', long)]
    pub lambda: Option<f64>,
    /// 64-bit seed echoed into the output metadata
    #[arg(short = 's', long)]
    pub seed: Option<u64>,
    /// Worker threads (default: all available); affects scheduling only,
    /// never output bytes
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Args, Debug, Default)]
pub struct FormulasArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug, Default)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// `plain` (fixed horizon) or `regen` (regeneration blocks)
    #[arg(long)]
    pub mode: Option<String>,
    /// Time horizon per replica (plain mode)
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Regeneration blocks per replica (regen mode)
    #[arg(long)]
    pub blocks: Option<u64>,
    /// Independent replicas
    #[arg(long)]
    pub replicas: Option<u64>,
    /// Enable the approximate cache-pruning pass (long plain runs)
    #[arg(long)]
    pub prune: bool,
}

#[derive(Args, Debug, Default)]
pub struct StationaryArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Poisson inspection rate for occupancy sampling
    #[arg(long)]
    pub inspection_rate: Option<f64>,
    /// Time discarded before counting occupancy samples
    #[arg(long)]
    pub burn_in: Option<f64>,
    /// Also estimate the marginal of relative edge e_i (0 disables)
    #[arg(long)]
    pub far_edge: Option<i64>,
    /// Replicas for the far-edge estimate
    #[arg(long)]
    pub far_reps: Option<u64>,
    /// Inspection time for the far-edge estimate
    #[arg(long)]
    pub far_time: Option<f64>,
}

#[derive(Args, Debug, Default)]
pub struct CouplingArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// `disparity` or `gap`
    #[arg(long)]
    pub experiment: Option<String>,
    /// Gap scenario A|B|C|D (gap experiment)
    #[arg(long)]
    pub scenario: Option<String>,
    /// Initial open probability of edge {0,1} for the X walker
    #[arg(long)]
    pub p1: Option<f64>,
    /// Initial open probability of edge {0,1} for the Y walker
    #[arg(long)]
    pub p2: Option<f64>,
    /// Horizon of each disparity run
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Coupled repetitions
    #[arg(long)]
    pub reps: Option<u64>,
}

#[derive(Args, Debug, Default)]
pub struct EventsArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Blocks per super-block window
    #[arg(long)]
    pub k: Option<u32>,
    /// Number of super-blocks
    #[arg(long)]
    pub reps: Option<u64>,
}

#[derive(Args, Debug, Default)]
pub struct FitArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Input CSV of lambda,speed,sigma rows
    #[arg(long)]
    pub input: Option<PathBuf>,
}

/// key=value overlay loaded from `--config`.
pub struct ConfigMap(BTreeMap<String, String>);

impl ConfigMap {
    pub fn empty() -> ConfigMap {
        ConfigMap(BTreeMap::new())
    }

    pub fn load(path: &Path) -> Result<ConfigMap> {
        let text = std::fs::read_to_string(path)?;
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::MalformedInput {
                    line: i + 1,
                    msg: format!("expected key=value, got {line:?}"),
                });
            };
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(ConfigMap(map))
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                Error::invalid(format!("config key {key} has unparseable value {raw:?}"))
            }),
        }
    }

    /// CLI flag wins, then the config file, then the default.
    pub fn resolve<T: FromStr>(&self, cli: Option<T>, key: &str, default: T) -> Result<T> {
        match cli {
            Some(v) => Ok(v),
            None => Ok(self.get(key)?.unwrap_or(default)),
        }
    }

    pub fn resolve_opt<T: FromStr>(&self, cli: Option<T>, key: &str) -> Result<Option<T>> {
        match cli {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }
}

fn load_config(common: &CommonArgs) -> Result<ConfigMap> {
    match &common.config {
        Some(path) => ConfigMap::load(path),
        None => Ok(ConfigMap::empty()),
    }
}

fn resolve_params(common: &CommonArgs, cfg: &ConfigMap, default_lambda: f64) -> Result<Params> {
    let d = cfg.resolve(common.d, "d", 1)?;
    let p = cfg.resolve(common.p, "p", 0.5)?;
    let mu = cfg.resolve(common.mu, "mu", 1.0)?;
    let lambda = cfg.resolve(common.lambda, "lambda", default_lambda)?;
    Params::new(d, p, mu, lambda)
}

fn positive(value: f64, name: &str) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::invalid(format!("{name} must be positive")))
    }
}

fn at_least_one(value: u64, name: &str) -> Result<u64> {
    if value >= 1 {
        Ok(value)
    } else {
        Err(Error::invalid(format!("{name} must be at least 1")))
    }
}

/// Run `f(replica_index)` for every replica on the requested pool and
/// collect the results in replica order.
pub fn fan_out<T, F>(replicas: u64, threads: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    let run = || (0..replicas).into_par_iter().map(&f).collect();
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    }
}

struct Csv<'w> {
    w: &'w mut dyn Write,
}

impl<'w> Csv<'w> {
    fn new(w: &'w mut dyn Write, command: &str, config: &[(&str, String)]) -> Result<Csv<'w>> {
        writeln!(w, "# build: {BUILD_ID}")?;
        writeln!(w, "# rng: {RNG_ALGORITHM}")?;
        let echo: Vec<String> = config.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(w, "# config: command={command} {}", echo.join(" "))?;
        Ok(Csv { w })
    }

    fn row(&mut self, cells: &[&dyn Display]) -> Result<()> {
        let mut first = true;
        for c in cells {
            if !first {
                write!(self.w, ",")?;
            }
            write!(self.w, "{c}")?;
            first = false;
        }
        writeln!(self.w)?;
        Ok(())
    }

    fn kv(&mut self, key: &str, value: impl Display) -> Result<()> {
        writeln!(self.w, "{key},{value}")?;
        Ok(())
    }
}

fn open_sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(std::io::BufWriter::new(std::fs::File::create(path)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Formulas(a) => {
            let mut w = open_sink(&a.common.out)?;
            cmd_formulas(&a, &mut *w)
        }
        Command::Simulate(a) => {
            let mut w = open_sink(&a.common.out)?;
            cmd_simulate(&a, &mut *w)
        }
        Command::Stationary(a) => {
            let mut w = open_sink(&a.common.out)?;
            cmd_stationary(&a, &mut *w)
        }
        Command::Coupling(a) => {
            let mut w = open_sink(&a.common.out)?;
            cmd_coupling(&a, &mut *w)
        }
        Command::Events(a) => {
            let mut w = open_sink(&a.common.out)?;
            cmd_events(&a, &mut *w)
        }
        Command::Fit(a) => {
            let mut w = open_sink(&a.common.out)?;
            cmd_fit(&a, &mut *w)
        }
    }
}

/// Every analytic quantity defined at the given parameter point, as
/// `quantity,value` rows.
pub fn cmd_formulas(args: &FormulasArgs, w: &mut dyn Write) -> Result<()> {
    let cfg = load_config(&args.common)?;
    let params = resolve_params(&args.common, &cfg, 2.0)?;
    let (d, p, mu, lambda) = (params.d, params.p, params.mu, params.lambda);
    let echo = [
        ("d", d.to_string()),
        ("p", p.to_string()),
        ("mu", mu.to_string()),
        ("lambda", lambda.to_string()),
    ];
    let mut csv = Csv::new(w, "formulas", &echo)?;
    csv.row(&[&"quantity", &"value"])?;
    csv.kv("tarwdp_speed", analytic::tarwdp_speed(mu, p))?;
    csv.kv("c_mu_p", analytic::c_mu_p(mu, p))?;
    csv.kv("expected_tau1", analytic::expected_tau1(mu))?;
    csv.kv("critical_mu", analytic::critical_mu(p))?;
    if lambda.is_finite() {
        csv.kv("z_lambda", analytic::z_lambda(&params)?)?;
        csv.kv("speed_1d_order2", analytic::speed_expansion_1d(mu, p, lambda))?;
        csv.kv(
            "speed_1d_order2_valid",
            analytic::speed_expansion_1d_valid(lambda),
        )?;
        if lambda >= 1.0 {
            csv.kv("p_e1_k1", analytic::p_e1_prediction(mu, lambda, 1)?)?;
        }
    }
    if d >= 2 {
        csv.kv("c1_coefficient", analytic::c1_coefficient(d, mu, p)?)?;
    }
    let chain = analytic::projection_chain(mu, p);
    for (name, v) in [
        ("stationary_00", chain.stationary[0]),
        ("stationary_10", chain.stationary[1]),
        ("stationary_01", chain.stationary[2]),
        ("stationary_11", chain.stationary[3]),
        ("left_open_marginal", chain.left_open_marginal()),
        ("right_open_marginal", chain.right_open_marginal()),
    ] {
        csv.kv(name, v)?;
    }
    csv.kv("c_consistency_residual", analytic::c_consistency_residual(mu, p))?;
    for n in 1..=3 {
        csv.kv(
            &format!("gamma_vs_exp_n{n}"),
            analytic::gamma_vs_exp(n, mu)?,
        )?;
    }
    for s in [GapScenario::A, GapScenario::B, GapScenario::C, GapScenario::D] {
        csv.kv(
            &format!("gap_expectation_{s}"),
            analytic::gap_scenario_expectation(s, mu, p),
        )?;
    }
    csv.kv(
        "speed_disparity_extremes",
        analytic::speed_disparity(mu, p, 0.0, 1.0)?,
    )?;
    Ok(())
}

struct ReplicaSummary {
    events: u64,
    displacement: i64,
    time: f64,
    speed: f64,
    forward: u64,
    backward: u64,
    orthogonal: u64,
    moments: BlockMoments,
}

/// Per-replica speed rows plus a pooled footer (plain: batch means across
/// replicas; regen: pooled ratio with the delta-method error).
pub fn cmd_simulate(args: &SimulateArgs, w: &mut dyn Write) -> Result<()> {
    let cfg = load_config(&args.common)?;
    let params = resolve_params(&args.common, &cfg, f64::INFINITY)?;
    let seed = cfg.resolve(args.common.seed, "seed", 0)?;
    let mode = cfg.resolve(args.mode.clone(), "mode", "plain".to_string())?;
    let horizon = positive(cfg.resolve(args.horizon, "horizon", 1e5)?, "horizon")?;
    let blocks = at_least_one(cfg.resolve(args.blocks, "blocks", 10_000)?, "blocks")?;
    let replicas = at_least_one(cfg.resolve(args.replicas, "replicas", 4)?, "replicas")?;
    let prune = args.prune || cfg.resolve(None, "prune", false)?;
    let threads = cfg.resolve_opt(args.common.threads, "threads")?;

    let echo = [
        ("d", params.d.to_string()),
        ("p", params.p.to_string()),
        ("mu", params.mu.to_string()),
        ("lambda", params.lambda.to_string()),
        ("mode", mode.clone()),
        ("horizon", horizon.to_string()),
        ("blocks", blocks.to_string()),
        ("replicas", replicas.to_string()),
        ("prune", prune.to_string()),
        ("seed", seed.to_string()),
    ];
    let mut csv = Csv::new(w, "simulate", &echo)?;
    csv.row(&[
        &"replica",
        &"stream",
        &"events",
        &"displacement",
        &"time",
        &"speed",
        &"std_error",
        &"forward_attempts",
        &"backward_attempts",
        &"orthogonal_attempts",
    ])?;

    let summaries: Vec<ReplicaSummary> = match mode.as_str() {
        "plain" => fan_out(replicas, threads, |r| {
            let mut pc = PlainConfig::new(horizon);
            if prune {
                pc.prune = Some(PruneConfig::recommended(params.mu));
            }
            let run = walker::run_plain(&params, &pc, seed, r)?;
            let s = run.state;
            Ok(ReplicaSummary {
                events: s.attempts,
                displacement: s.pos[0],
                time: horizon,
                speed: s.pos[0] as f64 / horizon,
                forward: s.forward_attempts(),
                backward: s.backward_attempts,
                orthogonal: s.orthogonal_attempts,
                moments: BlockMoments::default(),
            })
        })?,
        "regen" => fan_out(replicas, threads, |r| {
            let mut m = BlockMoments::default();
            let state = walker::run_regen_with(&params, blocks, seed, r, |b| {
                m.push_block(b);
            })?;
            Ok(ReplicaSummary {
                events: 2 * state.attempts,
                displacement: state.pos[0],
                time: state.t,
                speed: m.sum_dx / m.sum_dt,
                forward: state.forward_attempts(),
                backward: state.backward_attempts,
                orthogonal: state.orthogonal_attempts,
                moments: m,
            })
        })?,
        other => {
            return Err(Error::invalid(format!(
                "mode must be plain or regen, got {other:?}"
            )))
        }
    };

    for (r, s) in summaries.iter().enumerate() {
        csv.row(&[
            &r,
            &r,
            &s.events,
            &s.displacement,
            &s.time,
            &s.speed,
            &"",
            &s.forward,
            &s.backward,
            &s.orthogonal,
        ])?;
    }

    let total_events: u64 = summaries.iter().map(|s| s.events).sum();
    let total_disp: i64 = summaries.iter().map(|s| s.displacement).sum();
    let total_time: f64 = summaries.iter().map(|s| s.time).sum();
    let pooled = if mode == "plain" {
        let n = replicas as f64;
        let speeds: Vec<f64> = summaries.iter().map(|s| s.speed).collect();
        let mean = speeds.iter().sum::<f64>() / n;
        let var = speeds.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        (total_disp as f64 / total_time, (var / n).sqrt(), SpeedMethod::BatchMeans)
    } else {
        let mut m = BlockMoments::default();
        for s in &summaries {
            m.merge(&s.moments);
        }
        let est = estimators::regen_speed_from_moments(&m)?;
        (est.value, est.std_error, SpeedMethod::RegenerationRatio)
    };
    csv.row(&[
        &"pooled",
        &pooled.2,
        &total_events,
        &total_disp,
        &total_time,
        &pooled.0,
        &pooled.1,
        &"",
        &"",
        &"",
    ])?;
    Ok(())
}

/// Occupancy fractions of the adjacent-edge projection (d = 1 totally
/// asymmetric runs) and optional far-edge marginal.
pub fn cmd_stationary(args: &StationaryArgs, w: &mut dyn Write) -> Result<()> {
    let cfg = load_config(&args.common)?;
    let params = resolve_params(&args.common, &cfg, f64::INFINITY)?;
    if params.d != 1 || !params.is_totally_asymmetric() {
        return Err(Error::invalid(
            "stationary requires d = 1 and lambda = inf (the projection is Markov only there)",
        ));
    }
    let seed = cfg.resolve(args.common.seed, "seed", 0)?;
    let horizon = positive(cfg.resolve(args.horizon, "horizon", 500_100.0)?, "horizon")?;
    let rate = positive(
        cfg.resolve(args.inspection_rate, "inspection_rate", 2.0)?,
        "inspection_rate",
    )?;
    let burn_in = cfg.resolve(args.burn_in, "burn_in", 100.0)?;
    if burn_in < 0.0 || burn_in >= horizon {
        return Err(Error::invalid("burn_in must lie in [0, horizon)"));
    }
    let far_edge = cfg.resolve(args.far_edge, "far_edge", 0)?;
    let far_reps = cfg.resolve(args.far_reps, "far_reps", 100_000)?;
    let far_time = positive(cfg.resolve(args.far_time, "far_time", 200.0)?, "far_time")?;

    let echo = [
        ("p", params.p.to_string()),
        ("mu", params.mu.to_string()),
        ("lambda", params.lambda.to_string()),
        ("horizon", horizon.to_string()),
        ("inspection_rate", rate.to_string()),
        ("burn_in", burn_in.to_string()),
        ("far_edge", far_edge.to_string()),
        ("seed", seed.to_string()),
    ];
    let mut csv = Csv::new(w, "stationary", &echo)?;
    csv.row(&[&"quantity", &"value"])?;

    let mut pc = PlainConfig::new(horizon);
    pc.inspection_rate = rate;
    let run = walker::run_plain(&params, &pc, seed, 0)?;
    let frac = walker::occupancy_fractions(&run.samples, burn_in)?;
    let n_used = run.samples.iter().filter(|s| s.t > burn_in).count();
    let chain = analytic::projection_chain(params.mu, params.p);
    csv.kv("samples", n_used)?;
    for (i, name) in ["occ_00", "occ_10", "occ_01", "occ_11"].iter().enumerate() {
        csv.kv(name, frac[i])?;
    }
    for (i, name) in [
        "stationary_00",
        "stationary_10",
        "stationary_01",
        "stationary_11",
    ]
    .iter()
    .enumerate()
    {
        csv.kv(name, chain.stationary[i])?;
    }
    csv.kv("right_open_marginal_empirical", frac[2] + frac[3])?;
    csv.kv("right_open_marginal_analytic", chain.right_open_marginal())?;
    if far_edge > 0 {
        let m = walker::far_edge_marginal(&params, far_edge, far_time, far_reps, seed ^ 0xfa5)?;
        csv.kv(&format!("far_edge_marginal_i{far_edge}"), m)?;
        let expected = if far_edge == 1 {
            chain.right_open_marginal()
        } else {
            params.p
        };
        csv.kv("far_edge_expected", expected)?;
    }
    Ok(())
}

/// Disparity or gap-scenario experiment with summary statistics.
pub fn cmd_coupling(args: &CouplingArgs, w: &mut dyn Write) -> Result<()> {
    let cfg = load_config(&args.common)?;
    let params = resolve_params(&args.common, &cfg, f64::INFINITY)?;
    let (mu, p) = (params.mu, params.p);
    let seed = cfg.resolve(args.common.seed, "seed", 0)?;
    let experiment = cfg.resolve(args.experiment.clone(), "experiment", "disparity".to_string())?;
    let reps = at_least_one(cfg.resolve(args.reps, "reps", 10_000)?, "reps")?;
    let threads = cfg.resolve_opt(args.common.threads, "threads")?;

    match experiment.as_str() {
        "disparity" => {
            let p1 = cfg.resolve(args.p1, "p1", 0.0)?;
            let p2 = cfg.resolve(args.p2, "p2", 1.0)?;
            let horizon = positive(cfg.resolve(args.horizon, "horizon", 50.0)?, "horizon")?;
            let echo = [
                ("mu", mu.to_string()),
                ("p", p.to_string()),
                ("p1", p1.to_string()),
                ("p2", p2.to_string()),
                ("horizon", horizon.to_string()),
                ("reps", reps.to_string()),
                ("seed", seed.to_string()),
            ];
            let mut csv = Csv::new(w, "coupling", &echo)?;
            csv.row(&[&"quantity", &"value"])?;
            let runs = fan_out(reps, threads, |r| {
                couplings::disparity_run(mu, p, p1, p2, horizon, seed, r)
            })?;
            let n = reps as f64;
            let mean = |f: &dyn Fn(&couplings::DisparityRun) -> f64| {
                runs.iter().map(f).sum::<f64>() / n
            };
            let sd = |f: &dyn Fn(&couplings::DisparityRun) -> f64, m: f64| {
                (runs.iter().map(|r| (f(r) - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            };
            let gap = mean(&|r| r.final_gap as f64);
            let sx = mean(&|r| r.s_x);
            let sy = mean(&|r| r.s_y);
            csv.kv("reps", reps)?;
            csv.kv("order_violations", 0)?;
            csv.kv("mean_gap", gap)?;
            csv.kv("se_gap", sd(&|r| r.final_gap as f64, gap) / n.sqrt())?;
            csv.kv("expected_gap", analytic::speed_disparity(mu, p, p1, p2)?)?;
            csv.kv("mean_s_x", sx)?;
            csv.kv("se_s_x", sd(&|r| r.s_x, sx) / n.sqrt())?;
            csv.kv("expected_s_x", analytic::crossing_time_mean(mu, p, p1))?;
            csv.kv("mean_s_y", sy)?;
            csv.kv("se_s_y", sd(&|r| r.s_y, sy) / n.sqrt())?;
            csv.kv("expected_s_y", analytic::crossing_time_mean(mu, p, p2))?;
            Ok(())
        }
        "gap" => {
            let scenario: GapScenario = cfg
                .resolve(args.scenario.clone(), "scenario", "A".to_string())?
                .parse()?;
            let echo = [
                ("mu", mu.to_string()),
                ("p", p.to_string()),
                ("scenario", scenario.to_string()),
                ("reps", reps.to_string()),
                ("seed", seed.to_string()),
            ];
            let mut csv = Csv::new(w, "coupling", &echo)?;
            csv.row(&[&"quantity", &"value"])?;
            let runs = fan_out(reps, threads, |r| couplings::gap_run(scenario, mu, p, seed, r))?;
            let n = reps as f64;
            let mean = runs.iter().map(|r| r.s).sum::<f64>() / n;
            let sd =
                (runs.iter().map(|r| (r.s - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0)).sqrt();
            csv.kv("reps", reps)?;
            csv.kv("scenario", scenario)?;
            csv.kv("mean_s", mean)?;
            csv.kv("se_s", sd / n.sqrt())?;
            csv.kv(
                "expected_s",
                analytic::gap_scenario_expectation(scenario, mu, p),
            )?;
            csv.kv("exact_s", couplings::gap_scenario_exact(scenario, mu, p))?;
            Ok(())
        }
        other => Err(Error::invalid(format!(
            "experiment must be disparity or gap, got {other:?}"
        ))),
    }
}

/// Backward-attempt decomposition over k-block windows.
pub fn cmd_events(args: &EventsArgs, w: &mut dyn Write) -> Result<()> {
    let cfg = load_config(&args.common)?;
    let params = resolve_params(&args.common, &cfg, 3.0)?;
    let seed = cfg.resolve(args.common.seed, "seed", 0)?;
    let k = cfg.resolve(args.k, "k", 5)?;
    let reps = at_least_one(cfg.resolve(args.reps, "reps", 100_000)?, "reps")?;
    if params.d != 1 {
        return Err(Error::invalid("events requires d = 1"));
    }
    let echo = [
        ("mu", params.mu.to_string()),
        ("p", params.p.to_string()),
        ("lambda", params.lambda.to_string()),
        ("k", k.to_string()),
        ("reps", reps.to_string()),
        ("seed", seed.to_string()),
    ];
    let mut csv = Csv::new(w, "events", &echo)?;
    csv.row(&[&"quantity", &"value"])?;
    let (p0, p1, p2) =
        couplings::event_decomposition(params.mu, params.p, params.lambda, k, reps, seed)?;
    let pred = analytic::p_e1_prediction(params.mu, params.lambda, k)?;
    csv.kv("reps", reps)?;
    csv.kv("k", k)?;
    csv.kv("p_e0", p0)?;
    csv.kv("p_e1", p1)?;
    csv.kv("p_e2_plus", p2)?;
    csv.kv("p_e1_predicted", pred)?;
    csv.kv("sigma_e1", (pred * (1.0 - pred) / reps as f64).sqrt())?;
    Ok(())
}

/// Parse `lambda,speed,sigma` rows (header and `#` comments tolerated).
pub fn parse_fit_csv(text: &str) -> Result<Vec<(f64, f64, f64)>> {
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let cells: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if i == 0 && cells.first().map_or(false, |c| c.parse::<f64>().is_err()) {
            continue; // header row
        }
        if cells.len() != 3 {
            return Err(Error::MalformedInput {
                line: i + 1,
                msg: format!("expected 3 comma-separated fields, got {}", cells.len()),
            });
        }
        let mut vals = [0.0f64; 3];
        for (j, c) in cells.iter().enumerate() {
            vals[j] = c.parse().map_err(|_| Error::MalformedInput {
                line: i + 1,
                msg: format!("unparseable number {c:?}"),
            })?;
        }
        points.push((vals[0], vals[1], vals[2]));
    }
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} usable rows; the fit needs at least 3",
            points.len()
        )));
    }
    Ok(points)
}

/// Fit the exponential speed model to an input CSV and print coefficients,
/// standard errors, z-scores, and the monotonicity verdict.
pub fn cmd_fit(args: &FitArgs, w: &mut dyn Write) -> Result<()> {
    let cfg = load_config(&args.common)?;
    let input: Option<PathBuf> = match &args.input {
        Some(p) => Some(p.clone()),
        None => cfg.resolve_opt(None, "input")?,
    };
    let input = input.ok_or_else(|| Error::invalid("fit requires --input"))?;
    let text = std::fs::read_to_string(&input)?;
    let points = parse_fit_csv(&text)?;
    let fit = estimators::fit_exponential(&points)?;
    let echo = [
        ("input", input.display().to_string()),
        ("points", points.len().to_string()),
    ];
    let mut csv = Csv::new(w, "fit", &echo)?;
    csv.row(&[&"quantity", &"value"])?;
    csv.kv("a0", fit.a0)?;
    csv.kv("a1", fit.a1)?;
    csv.kv("a2", fit.a2)?;
    csv.kv("se_a0", fit.se_a0())?;
    csv.kv("se_a1", fit.se_a1())?;
    csv.kv("se_a2", fit.se_a2())?;
    csv.kv("z_a1", fit.z_a1)?;
    csv.kv("z_a2", fit.z_a2)?;
    csv.kv("verdict", estimators::dichotomy_sign_test(&fit))?;
    Ok(())
}
