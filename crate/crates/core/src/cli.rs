//! JSON run configuration and the `tempokey` subcommands.
//!
//! Each `render_*` function validates the configuration and produces the
//! complete output text before anything is written, so a rejected
//! configuration never leaves a partial file behind.
//!
//! Exit codes: 0 success, 2 configuration or validation error, 3 statistical
//! inconsistency, 4 I/O error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{IsTerminal, Write as _};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::attack::{
    effective_coherence, holevo_chi_ae, max_qber, mutual_info_ab, optimize_attack_bruteforce,
    s_rho_e_max, AttackOptimum, ThreeStateAttackGeometry,
};
use crate::channel::ChannelParams;
use crate::distance::{
    qber_sweep, rate_cutoff, secure_distance, sweep, uniform_grid, CutoffLength,
};
use crate::error::{invalid, Error, Result};
use crate::protocol::{ProtocolKind, DEFAULT_C3TS_COHERENCE_FRACTION};
use crate::pulse::{SourceMode, DEFAULT_DECOY_MU};
use crate::sim::{
    compare_to_analytic, run_simulation, AttackModel, ComparisonReport, SimConfig, SimResult,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_STATISTICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Significant digits written to CSV files.
pub const CSV_DIGITS: usize = 12;

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::Config(_) => EXIT_CONFIG,
            Error::Estimation(_) => EXIT_STATISTICAL,
            Error::Io(_) => EXIT_IO,
        }
    }
}

/// Inclusive evenly spaced grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Grid {
    pub fn points(&self) -> Result<Vec<f64>> {
        uniform_grid(self.min, self.max, self.step)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    #[serde(default = "default_sim_protocol")]
    pub protocol: ProtocolKind,
    #[serde(default = "default_n_pulses")]
    pub n_pulses: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub attack: AttackModel,
    #[serde(default = "default_half")]
    pub measure_coherence_prob: f64,
    #[serde(default = "default_phases")]
    pub interferometer_phases: Vec<f64>,
    #[serde(default = "default_half")]
    pub c3ts_coherence_fraction: f64,
}

impl Default for SimulationSection {
    fn default() -> Self {
        Self {
            protocol: default_sim_protocol(),
            n_pulses: default_n_pulses(),
            seed: 0,
            attack: AttackModel::None,
            measure_coherence_prob: default_half(),
            interferometer_phases: default_phases(),
            c3ts_coherence_fraction: DEFAULT_C3TS_COHERENCE_FRACTION,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSection {
    #[serde(default = "default_sim_protocol")]
    pub protocol: ProtocolKind,
    pub q: f64,
    #[serde(default = "default_one")]
    pub v_a: f64,
    /// Observed coherence to reproduce; defaults to `(1 − 2Q)·V_A`.
    #[serde(default)]
    pub coherence: Option<f64>,
    #[serde(default = "default_resolution")]
    pub grid_resolution: usize,
}

impl Default for OptimizerSection {
    fn default() -> Self {
        Self {
            protocol: default_sim_protocol(),
            q: 0.05,
            v_a: 1.0,
            coherence: None,
            grid_resolution: default_resolution(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub path: Option<PathBuf>,
}

/// Everything a subcommand needs; every section has defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub channel: ChannelParams,
    #[serde(default = "default_protocols")]
    pub protocols: Vec<ProtocolKind>,
    #[serde(default = "default_visibilities")]
    pub visibilities: Vec<f64>,
    #[serde(default = "default_qber_grid")]
    pub qber_grid: Grid,
    #[serde(default = "default_sources")]
    pub sources: Vec<SourceMode>,
    #[serde(default = "default_length_grid")]
    pub length_grid: Grid,
    #[serde(default)]
    pub simulation: SimulationSection,
    #[serde(default)]
    pub attack_optimizer: OptimizerSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all sections have defaults")
    }
}

fn default_sim_protocol() -> ProtocolKind {
    ProtocolKind::Ts2
}
fn default_n_pulses() -> u64 {
    1_000_000
}
fn default_half() -> f64 {
    0.5
}
fn default_one() -> f64 {
    1.0
}
fn default_phases() -> Vec<f64> {
    vec![0.0, std::f64::consts::PI]
}
fn default_resolution() -> usize {
    400
}
fn default_protocols() -> Vec<ProtocolKind> {
    vec![ProtocolKind::Ts2, ProtocolKind::Ts3]
}
fn default_visibilities() -> Vec<f64> {
    vec![1.0, 0.95, 0.9]
}
fn default_qber_grid() -> Grid {
    Grid {
        min: 0.0,
        max: 0.25,
        step: 0.005,
    }
}
fn default_sources() -> Vec<SourceMode> {
    vec![
        SourceMode::FaintNoDecoy { mu: None },
        SourceMode::SinglePhoton,
        SourceMode::FaintDecoy {
            mu: DEFAULT_DECOY_MU,
        },
    ]
}
fn default_length_grid() -> Grid {
    Grid {
        min: 0.0,
        max: 300.0,
        step: 1.0,
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.channel.validate()?;
        if self.protocols.is_empty() {
            return invalid("protocols must not be empty");
        }
        if self.visibilities.is_empty() {
            return invalid("visibilities must not be empty");
        }
        if let Some(v) = self.visibilities.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return invalid(format!("visibility {v} outside [0, 1]"));
        }
        for s in &self.sources {
            s.validate()?;
        }
        if self.qber_grid.max > 0.5 {
            return invalid("QBER grid must stay within [0, 1/2]");
        }
        Ok(())
    }

    fn sim_config(&self) -> SimConfig {
        let s = &self.simulation;
        SimConfig {
            protocol: s.protocol,
            channel: self.channel,
            n_pulses: s.n_pulses,
            seed: s.seed,
            attack: s.attack,
            measure_coherence_prob: s.measure_coherence_prob,
            interferometer_phases: s.interferometer_phases.clone(),
            c3ts_coherence_fraction: s.c3ts_coherence_fraction,
        }
    }
}

/// Rounds to [`CSV_DIGITS`] significant digits and prints the shortest form
/// that parses back to the rounded value.
pub fn format_sig(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{:.*e}", CSV_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses");
    let a = rounded.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

fn echo_comment(cfg: &RunConfig) -> String {
    format!(
        "# config: {}\n",
        serde_json::to_string(cfg).expect("config serializes")
    )
}

pub fn render_qber_curve(cfg: &RunConfig) -> Result<String> {
    cfg.validate()?;
    let qs = cfg.qber_grid.points()?;
    let mut out = echo_comment(cfg);
    out.push_str("protocol,V_A,Q,I_AB,chi_AE,delta_I\n");
    for &p in &cfg.protocols {
        for row in qber_sweep(p, &cfg.visibilities, &qs)? {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                row.protocol,
                format_sig(row.v_a),
                format_sig(row.q),
                format_sig(row.i_ab),
                format_sig(row.chi_ae),
                format_sig(row.delta_i)
            )
            .expect("string write");
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceEntry {
    pub protocol: ProtocolKind,
    pub v_a: f64,
    pub max_qber: f64,
    pub length_km: CutoffLength,
    pub bracket_width_km: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub config: RunConfig,
    pub secure_distances: Vec<DistanceEntry>,
}

pub fn distance_report(cfg: &RunConfig) -> Result<DistanceReport> {
    cfg.validate()?;
    let mut secure_distances = Vec::new();
    for &protocol in &cfg.protocols {
        for &v_a in &cfg.visibilities {
            let c = cfg.channel.with_visibility(v_a);
            let r = secure_distance(protocol, &c)?;
            secure_distances.push(DistanceEntry {
                protocol,
                v_a,
                max_qber: max_qber(protocol, v_a)?,
                length_km: r.length_km,
                bracket_width_km: r.bracket_width_km,
            });
        }
    }
    Ok(DistanceReport {
        config: cfg.clone(),
        secure_distances,
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

pub fn render_distance(cfg: &RunConfig) -> Result<String> {
    Ok(to_json(&distance_report(cfg)?))
}

pub fn render_rate_curve(cfg: &RunConfig) -> Result<String> {
    cfg.validate()?;
    if cfg.sources.is_empty() {
        return invalid("sources must not be empty");
    }
    let g = cfg.length_grid;
    g.points()?;
    let mut out = echo_comment(cfg);
    out.push_str("source,protocol,L_km,rate,rate_db\n");
    let mut footer = String::from("# cutoff,source,protocol,L_km,bracket_km\n");
    for &source in &cfg.sources {
        for &protocol in &cfg.protocols {
            let curve = sweep(source, protocol, &cfg.channel, g.min, g.max, g.step)?;
            for p in &curve.points {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    source.label(),
                    protocol,
                    format_sig(p.length_km),
                    format_sig(p.rate),
                    p.rate_db.map(format_sig).unwrap_or_default()
                )
                .expect("string write");
            }
            let cut = rate_cutoff(source, protocol, &cfg.channel)?;
            let km = match cut.length_km {
                CutoffLength::Km(x) => format_sig(x),
                CutoffLength::Unbounded => "unbounded".into(),
            };
            writeln!(
                footer,
                "# cutoff,{},{},{},{}",
                source.label(),
                protocol,
                km,
                format_sig(cut.bracket_width_km)
            )
            .expect("string write");
        }
    }
    out.push_str(&footer);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimulationVerdict {
    Consistent,
    AttackDetected,
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub config: RunConfig,
    pub expect_attack: bool,
    pub result: SimResult,
    pub comparison: ComparisonReport,
    pub verdict: SimulationVerdict,
}

impl SimulationReport {
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            SimulationVerdict::Inconsistent => EXIT_STATISTICAL,
            _ => EXIT_OK,
        }
    }
}

pub fn simulation_report(cfg: &RunConfig, expect_attack: bool) -> Result<SimulationReport> {
    cfg.validate()?;
    let sim = cfg.sim_config();
    let result = run_simulation(&sim)?;
    let comparison = compare_to_analytic(&result, &sim)?;
    let only_visibility = comparison.flagged().all(|r| r.quantity == "visibility");
    let verdict = if !comparison.any_flagged() {
        SimulationVerdict::Consistent
    } else if expect_attack && sim.attack != AttackModel::None && only_visibility {
        SimulationVerdict::AttackDetected
    } else {
        SimulationVerdict::Inconsistent
    };
    Ok(SimulationReport {
        config: cfg.clone(),
        expect_attack,
        result,
        comparison,
        verdict,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttackReport {
    pub config: RunConfig,
    pub protocol: ProtocolKind,
    pub q: f64,
    /// Coherence Eve has to reproduce (`V₁₂` for 2TS/C3TS, `cos φ` for 3TS).
    pub coherence: f64,
    pub bruteforce: AttackOptimum,
    pub s_rho_e_closed: f64,
    pub difference: f64,
    pub chi_ae_bruteforce: f64,
    pub chi_ae_closed: f64,
    pub i_ab: f64,
    /// `χ_AE / I_AB` from the closed form; absent when `I_AB = 0`.
    pub chi_over_i_ab: Option<f64>,
}

pub fn attack_report(cfg: &RunConfig) -> Result<AttackReport> {
    cfg.validate()?;
    let o = &cfg.attack_optimizer;
    let coherence = match o.coherence {
        Some(v) => v,
        None => (1.0 - 2.0 * o.q) * o.v_a,
    };
    // range-checks q and v_a
    effective_coherence(o.protocol, o.q, o.v_a)?;
    let bruteforce = optimize_attack_bruteforce(o.protocol, o.q, coherence, o.grid_resolution)?;
    let key_coherence = match o.protocol {
        ProtocolKind::Ts2 | ProtocolKind::C3ts => coherence,
        ProtocolKind::Ts3 => ThreeStateAttackGeometry::from_cos_phi(coherence)?.v13,
    };
    let s_closed = s_rho_e_max(o.q, key_coherence)?;
    let chi_closed = holevo_chi_ae(o.q, o.q, s_closed)?;
    let i_ab = mutual_info_ab(o.q, o.q)?;
    Ok(AttackReport {
        config: cfg.clone(),
        protocol: o.protocol,
        q: o.q,
        coherence,
        s_rho_e_closed: s_closed,
        difference: bruteforce.s_rho_e - s_closed,
        chi_ae_bruteforce: holevo_chi_ae(
            bruteforce.params.q1,
            bruteforce.params.q2,
            bruteforce.s_rho_e,
        )?,
        chi_ae_closed: chi_closed,
        i_ab,
        chi_over_i_ab: (i_ab > 0.0).then(|| chi_closed / i_ab),
        bruteforce,
    })
}

#[derive(Parser, Debug)]
#[command(
    name = "tempokey",
    version,
    about = "Security analysis of time-coding QKD"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output file; defaults to `output.path` in the config, else stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Overrides `simulation.seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Treat a flagged visibility as the expected outcome of the configured attack.
    #[arg(long)]
    pub expect_attack: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Information balance against QBER (CSV).
    QberCurve(CommonArgs),
    /// Secure distance per protocol and visibility (JSON).
    Distance(CommonArgs),
    /// Key rate against fiber length per source (CSV).
    RateCurve(CommonArgs),
    /// Pulse-level Monte Carlo checked against the analytic model (JSON).
    Simulate(SimulateArgs),
    /// Brute-force attack search against the closed form (JSON).
    AttackOptimize(CommonArgs),
}

impl Command {
    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::QberCurve(a)
            | Command::Distance(a)
            | Command::RateCurve(a)
            | Command::AttackOptimize(a) => a,
            Command::Simulate(a) => &a.common,
        }
    }
}

/// Output text of a subcommand and the exit code it ends with.
pub struct Rendered {
    pub text: String,
    pub exit_code: i32,
}

pub fn execute(command: &Command) -> Result<(Rendered, Option<PathBuf>)> {
    let common = command.common();
    let mut cfg = RunConfig::load(&common.config)?;
    let rendered = match command {
        Command::QberCurve(_) => plain(render_qber_curve(&cfg)?),
        Command::Distance(_) => plain(render_distance(&cfg)?),
        Command::RateCurve(_) => plain(render_rate_curve(&cfg)?),
        Command::AttackOptimize(_) => plain(to_json(&attack_report(&cfg)?)),
        Command::Simulate(a) => {
            if let Some(seed) = a.seed {
                cfg.simulation.seed = seed;
            }
            let report = simulation_report(&cfg, a.expect_attack)?;
            Rendered {
                text: to_json(&report),
                exit_code: report.exit_code(),
            }
        }
    };
    Ok((rendered, common.out.clone().or(cfg.output.path.clone())))
}

fn plain(text: String) -> Rendered {
    Rendered {
        text,
        exit_code: EXIT_OK,
    }
}

fn log(level: &str, color: &str, msg: &str) {
    let stderr = std::io::stderr();
    let styled = stderr.is_terminal() && std::env::var_os("NO_COLOR").is_none();
    let mut h = stderr.lock();
    let _ = if styled {
        writeln!(h, "\x1b[{color}m{level}\x1b[0m: {msg}")
    } else {
        writeln!(h, "{level}: {msg}")
    };
}

/// Parses arguments, runs the subcommand and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = execute(&cli.command).and_then(|(rendered, path)| {
        match &path {
            Some(p) => {
                std::fs::write(p, &rendered.text)?;
                log("info", "32", &format!("wrote {}", p.display()));
            }
            None => std::io::stdout()
                .lock()
                .write_all(rendered.text.as_bytes())?,
        }
        Ok(rendered.exit_code)
    });
    match result {
        Ok(code) => {
            if code == EXIT_STATISTICAL {
                log(
                    "error",
                    "31",
                    "simulation disagrees with the analytic model",
                );
            }
            code
        }
        Err(e) => {
            log("error", "31", &e.to_string());
            e.exit_code()
        }
    }
}
