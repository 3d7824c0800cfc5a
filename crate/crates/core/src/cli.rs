//! Command-line front end. `run` returns the process exit code:
//! 0 ok, 1 bad input, 2 inadmissible regime, 3 solver failure.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::model::{classify_regime, ModelParams, WaveKind};
use crate::sim::{self, SimConfig, SimKind, SimReport};
use crate::wave::{self, SolutionStatus, SolveOptions, WaveSolution};

pub const EXIT_OK: i32 = 0;
pub const EXIT_BAD_INPUT: i32 = 1;
pub const EXIT_INADMISSIBLE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "fhn", about = "Traveling fronts and pulses of the FitzHugh-Nagumo system")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default, Clone)]
pub struct CommonArgs {
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub d: Option<f64>,
    /// key=value configuration file; flags take precedence over it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Newton grid spacing in the moving frame.
    #[arg(long, global = true)]
    pub h: Option<f64>,
    /// Largest left window of the Newton grid.
    #[arg(long, global = true)]
    pub max_left: Option<f64>,
    /// Lab-frame nodes for simulations.
    #[arg(long, global = true)]
    pub sim_n: Option<usize>,
    #[arg(long, global = true)]
    pub dtau: Option<f64>,
    #[arg(long, global = true)]
    pub tau_max: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Regime classification and closed-form constants.
    Regime {
        #[arg(long, value_enum, default_value = "front")]
        kind: KindArg,
    },
    /// Forward front, or the reversed front with --reversed.
    Front {
        #[arg(long)]
        reversed: bool,
    },
    /// Pulse, reported together with the front speed.
    Pulse,
    /// Direct simulation with level-set speed measurement.
    Simulate {
        #[arg(long, value_enum, default_value = "front")]
        kind: SimKindArg,
        /// Skip the wave solves that provide predicted speeds.
        #[arg(long)]
        no_predict: bool,
    },
    /// Forward fronts over a descending list of d.
    Sweep {
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        d_list: Vec<f64>,
    },
    /// Re-runs every check on a saved wave directory.
    Validate {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Front,
    Reversed,
    Pulse,
}

impl From<KindArg> for WaveKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Front => WaveKind::Front,
            KindArg::Reversed => WaveKind::ReversedFront,
            KindArg::Pulse => WaveKind::Pulse,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimKindArg {
    Front,
    Reversed,
    Pulse,
    Both,
}

impl From<SimKindArg> for SimKind {
    fn from(k: SimKindArg) -> Self {
        match k {
            SimKindArg::Front => SimKind::Front,
            SimKindArg::Reversed => SimKind::Reversed,
            SimKindArg::Pulse => SimKind::Pulse,
            SimKindArg::Both => SimKind::Both,
        }
    }
}

/// Fully resolved configuration, echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub beta: f64,
    pub gamma: f64,
    pub d: f64,
    pub out: PathBuf,
    pub h: f64,
    pub max_left: f64,
    pub sim_n: usize,
    pub dtau: f64,
    pub tau_max: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let bvp = wave::BvpOptions::default();
        let sim = SimConfig::new(ModelParams { beta: 0.45, gamma: 50.0, d: 1e-5 });
        Self {
            beta: 0.45,
            gamma: 50.0,
            d: 1e-5,
            out: PathBuf::from("."),
            h: bvp.h,
            max_left: bvp.max_left,
            sim_n: sim.n,
            dtau: sim.dtau,
            tau_max: sim.tau_max,
        }
    }
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("config line {}: expected key=value", k + 1)))?;
        out.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(out)
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Parse(format!("config key {key}: cannot parse {value:?}")))
}

impl RunConfig {
    /// Applies a key=value map over `self`.
    pub fn apply_map(&mut self, map: &BTreeMap<String, String>) -> Result<()> {
        for (k, v) in map {
            match k.as_str() {
                "beta" => self.beta = parse_num(k, v)?,
                "gamma" => self.gamma = parse_num(k, v)?,
                "d" => self.d = parse_num(k, v)?,
                "out" => self.out = PathBuf::from(v),
                "h" => self.h = parse_num(k, v)?,
                "max_left" => self.max_left = parse_num(k, v)?,
                "sim_n" => self.sim_n = parse_num(k, v)?,
                "dtau" => self.dtau = parse_num(k, v)?,
                "tau_max" => self.tau_max = parse_num(k, v)?,
                _ => return Err(Error::Parse(format!("unknown config key {k:?}"))),
            }
        }
        Ok(())
    }

    /// Defaults, then the config file, then flags.
    pub fn resolve(args: &CommonArgs) -> Result<Self> {
        let mut cfg = Self::default();
        if let Some(path) = &args.config {
            let text = std::fs::read_to_string(path)?;
            cfg.apply_map(&parse_config_text(&text)?)?;
        }
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(x) = &args.$f { cfg.$f = x.clone(); })* };
        }
        set!(beta, gamma, d, out, h, max_left, sim_n, dtau, tau_max);
        cfg.check()?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<()> {
        self.params()?;
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::InvalidParams(format!("h = {} must be positive", self.h)));
        }
        if !(self.max_left > 0.0 && self.max_left.is_finite()) {
            return Err(Error::InvalidParams(format!("max_left = {} must be positive", self.max_left)));
        }
        if self.sim_n < 16 {
            return Err(Error::InvalidParams(format!("sim_n = {} must be at least 16", self.sim_n)));
        }
        if !(self.dtau > 0.0 && self.dtau.is_finite() && self.tau_max > 0.0) {
            return Err(Error::InvalidParams("dtau and tau_max must be positive".into()));
        }
        Ok(())
    }

    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.beta, self.gamma, self.d)
    }

    pub fn solve_options(&self) -> SolveOptions {
        let mut o = SolveOptions::default();
        o.bvp.h = self.h;
        o.bvp.max_left = self.max_left.max(o.bvp.min_left);
        o
    }

    pub fn sim_config(&self) -> Result<SimConfig> {
        let mut s = SimConfig::new(self.params()?);
        s.n = self.sim_n;
        s.dtau = self.dtau;
        s.tau_max = self.tau_max;
        Ok(s)
    }

    /// key=value text that `parse_config_text` reads back.
    pub fn to_text(&self) -> String {
        use crate::weighted::fmt_f64 as f;
        format!(
            "beta = {}\ngamma = {}\nd = {}\nout = {}\nh = {}\nmax_left = {}\nsim_n = {}\ndtau = {}\ntau_max = {}\n",
            f(self.beta),
            f(self.gamma),
            f(self.d),
            self.out.display(),
            f(self.h),
            f(self.max_left),
            self.sim_n,
            f(self.dtau),
            f(self.tau_max)
        )
    }
}

/// Pipeline stage an error came from, for exit-code 3 messages.
pub fn stage_of(e: &Error) -> &'static str {
    match e {
        Error::NoBracket(_) | Error::Degenerate(_) | Error::NonConvergence { .. } => "find_speed",
        Error::NewtonDivergence(_) | Error::Singular(_) => "refine_bvp",
        Error::BlowUp { .. } => "simulate",
        Error::RootBracket { .. } | Error::NoConnection(_) => "constants",
        _ => "solve",
    }
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParams(_) | Error::Parse(_) | Error::Io(_) => EXIT_BAD_INPUT,
        Error::Regime(_) | Error::Hypothesis(_) => EXIT_INADMISSIBLE,
        _ => EXIT_SOLVER,
    }
}

fn emit<W: Write>(out: &mut W, value: &serde_json::Value) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn fail<W: Write>(err: &mut W, e: &Error) -> i32 {
    let code = exit_code(e);
    if code == EXIT_SOLVER {
        let _ = writeln!(err, "error in {}: {e}", stage_of(e));
    } else {
        let _ = writeln!(err, "error: {e}");
    }
    code
}

/// Parses `args` (program name first) and runs the command, writing JSON to
/// `out` and diagnostics to `err`.
pub fn run<I, S, W1, W2>(args: I, out: &mut W1, err: &mut W2) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
    W1: Write,
    W2: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_BAD_INPUT } else { EXIT_OK };
        }
    };
    let cfg = match RunConfig::resolve(&cli.common) {
        Ok(c) => c,
        Err(e) => return fail(err, &e),
    };
    match dispatch(&cli.command, &cfg, out) {
        Ok(code) => code,
        Err(e) => fail(err, &e),
    }
}

fn dispatch<W: Write>(cmd: &Command, cfg: &RunConfig, out: &mut W) -> Result<i32> {
    match cmd {
        Command::Regime { kind } => cmd_regime(cfg, (*kind).into(), out),
        Command::Front { reversed } => {
            cmd_wave(cfg, if *reversed { WaveKind::ReversedFront } else { WaveKind::Front }, out)
        }
        Command::Pulse => cmd_wave(cfg, WaveKind::Pulse, out),
        Command::Simulate { kind, no_predict } => cmd_simulate(cfg, (*kind).into(), !no_predict, out),
        Command::Sweep { d_list } => cmd_sweep(cfg, d_list, out),
        Command::Validate { input } => cmd_validate(cfg, input, out),
    }
}

pub fn cmd_regime<W: Write>(cfg: &RunConfig, kind: WaveKind, out: &mut W) -> Result<i32> {
    let report = classify_regime(&cfg.params()?)?;
    let admits = report.admits(kind);
    emit(out, &json!({ "config": cfg, "kind": kind, "admissible": admits, "regime": report }))?;
    Ok(if admits { EXIT_OK } else { EXIT_INADMISSIBLE })
}

fn save_config(cfg: &RunConfig) -> Result<()> {
    std::fs::create_dir_all(&cfg.out)?;
    std::fs::write(cfg.out.join("config.txt"), cfg.to_text())?;
    Ok(())
}

fn wave_summary(s: &WaveSolution) -> serde_json::Value {
    let r = &s.report;
    json!({
        "kind": r.kind,
        "c": r.c,
        "kappa": r.kappa,
        "el_residual": r.el_residual,
        "status": r.status,
        "failing_checks": r.failing_checks,
    })
}

pub fn cmd_wave<W: Write>(cfg: &RunConfig, kind: WaveKind, out: &mut W) -> Result<i32> {
    let params = cfg.params()?;
    let opts = cfg.solve_options();
    let sol = wave::solve_wave(&params, kind, &opts)?;
    save_config(cfg)?;
    sol.save(&cfg.out)?;
    let mut summary = json!({ "config": cfg, "wave": wave_summary(&sol) });
    let mut ok = sol.report.status == SolutionStatus::Accepted;
    if kind == WaveKind::Pulse {
        let front = wave::solve_front(&params, &opts)?;
        let faster = sol.report.c > front.report.c;
        summary["front_speed"] = json!(front.report.c);
        summary["pulse_faster_than_front"] = json!(faster);
        ok &= faster;
    }
    emit(out, &summary)?;
    Ok(if ok { EXIT_OK } else { EXIT_SOLVER })
}

/// Predicted rescaled speed √(dc²) for a simulation orientation.
pub fn predicted_speed(params: &ModelParams, kind: SimKind, opts: &SolveOptions) -> Result<f64> {
    let wk = sim::wave_kind(kind).ok_or_else(|| Error::InvalidParams("no single wave for both".into()))?;
    let s = wave::solve_wave(params, wk, opts)?;
    Ok((s.report.kappa).sqrt())
}

pub fn cmd_simulate<W: Write>(cfg: &RunConfig, kind: SimKind, predict: bool, out: &mut W) -> Result<i32> {
    let params = cfg.params()?;
    let sc = cfg.sim_config()?;
    let opts = cfg.solve_options();
    let kinds = if kind == SimKind::Both { vec![SimKind::Front, SimKind::Reversed] } else { vec![kind] };
    save_config(cfg)?;
    let mut reports: Vec<SimReport> = Vec::new();
    let mut notes = Vec::new();
    for k in kinds {
        let pred = if predict {
            match predicted_speed(&params, k, &opts) {
                Ok(p) => Some(p),
                Err(e) => {
                    notes.push(format!("{k:?}: no predicted speed ({e})"));
                    None
                }
            }
        } else {
            None
        };
        let (report, state) = sim::run_single(k, &sc, pred)?;
        let name = format!("{k:?}").to_lowercase();
        let stride = (state.grid.n / 2048).max(1);
        sim::write_snapshot(&state, stride, true, std::fs::File::create(cfg.out.join(format!("sim_{name}.csv")))?)?;
        let f = std::fs::File::create(cfg.out.join(format!("sim_{name}.json")))?;
        serde_json::to_writer_pretty(f, &report)?;
        reports.push(report);
    }
    let determined = reports.iter().all(|r| r.outcome != sim::Outcome::Undetermined);
    let both = kind == SimKind::Both;
    let bidirectional = both && sim::bidirectional(&reports);
    let summary: Vec<_> = reports
        .iter()
        .map(|r| {
            json!({
                "kind": r.kind,
                "outcome": r.outcome,
                "sigma_measured": r.sigma_measured,
                "sigma_predicted": r.sigma_predicted,
                "relative_error": r.relative_error,
                "tau_end": r.tau_end,
            })
        })
        .collect();
    let mut v = json!({ "config": cfg, "runs": summary, "notes": notes });
    if both {
        v["bidirectional"] = json!(bidirectional);
    }
    emit(out, &v)?;
    Ok(if determined && (!both || bidirectional) { EXIT_OK } else { EXIT_SOLVER })
}

pub fn cmd_sweep<W: Write>(cfg: &RunConfig, d_list: &[f64], out: &mut W) -> Result<i32> {
    let params = cfg.params()?;
    let rows = wave::d_sweep(&params, d_list, &cfg.solve_options())?;
    save_config(cfg)?;
    wave::write_sweep_csv(&rows, std::fs::File::create(cfg.out.join("sweep.csv"))?)?;
    emit(out, &json!({ "config": cfg, "rows": rows }))?;
    Ok(if rows.iter().all(|r| r.error.is_none()) { EXIT_OK } else { EXIT_SOLVER })
}

pub fn cmd_validate<W: Write>(cfg: &RunConfig, input: &Path, out: &mut W) -> Result<i32> {
    let stored = WaveSolution::load(input)?;
    let fresh = stored.revalidate()?;
    let identical = fresh.report == stored.report;
    emit(out, &json!({ "config": cfg, "identical": identical, "wave": fresh.report }))?;
    Ok(if fresh.report.status == SolutionStatus::Accepted { EXIT_OK } else { EXIT_SOLVER })
}
