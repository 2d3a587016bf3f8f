//! Run configuration: command-line flags layered over an optional
//! `key=value` file, then per-subcommand defaults.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use spinport::teleport::CorrectionStrategy;
use spinport::Spin;

use crate::error::CliError;

#[derive(Copy, Clone, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    SqueezeCurve,
    FidelityVsJ,
    FidelityVsAngle,
    SqueezeTransfer,
    Superposition,
    Entanglement,
    Perfect,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::SqueezeCurve => "squeeze-curve",
            Command::FidelityVsJ => "fidelity-vs-j",
            Command::FidelityVsAngle => "fidelity-vs-angle",
            Command::SqueezeTransfer => "squeeze-transfer",
            Command::Superposition => "superposition",
            Command::Entanglement => "entanglement",
            Command::Perfect => "perfect",
        }
    }

    fn default_j(self) -> &'static str {
        match self {
            Command::SqueezeCurve => "1/2,1,2,5,10,20",
            Command::FidelityVsJ => "1/2..20",
            Command::FidelityVsAngle | Command::SqueezeTransfer | Command::Superposition => "20",
            Command::Entanglement => "1/2..5",
            Command::Perfect => "1/2..4",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum InteractionKind {
    Kp,
    Alpha,
    General16,
}

impl FromStr for InteractionKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "kp" => Ok(InteractionKind::Kp),
            "alpha" => Ok(InteractionKind::Alpha),
            "general16" => Ok(InteractionKind::General16),
            _ => Err(CliError::Config(format!("unknown interaction '{s}' (kp|alpha|general16)"))),
        }
    }
}

impl InteractionKind {
    fn name(self) -> &'static str {
        match self {
            InteractionKind::Kp => "kp",
            InteractionKind::Alpha => "alpha",
            InteractionKind::General16 => "general16",
        }
    }
}

/// `opt` selects the teleportation-optimal μ for each spin.
#[derive(Clone, Debug, PartialEq)]
pub enum MuSetting {
    Optimal,
    Values(Vec<f64>),
}

/// Raw settings as strings, keyed like the long flags (without `--`).
pub type RawSettings = BTreeMap<String, String>;

pub const KEYS: [&str; 14] = [
    "j",
    "mu",
    "sigma-deg",
    "alpha",
    "strategy",
    "interaction",
    "seed",
    "theta-step-deg",
    "theta-max-deg",
    "quad-theta",
    "quad-phi",
    "max-evals",
    "inputs",
    "out",
];

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub spins: Vec<Spin>,
    pub mu: MuSetting,
    pub sigma_deg: f64,
    pub alpha: Option<f64>,
    pub strategy: Option<CorrectionStrategy>,
    pub interaction: InteractionKind,
    pub seed: u64,
    pub theta_step_deg: f64,
    pub theta_max_deg: f64,
    pub quad_theta: usize,
    pub quad_phi: usize,
    pub max_evals: usize,
    pub inputs: usize,
    pub out: Option<PathBuf>,
}

pub fn read_config_file(path: &Path) -> Result<RawSettings, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<RawSettings, CliError> {
    let mut out = RawSettings::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("config line {}: expected key=value", lineno + 1)))?;
        let key = k.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!("config line {}: unknown key '{}'", lineno + 1, k.trim())));
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

fn parse_f64(key: &str, v: &str) -> Result<f64, CliError> {
    let x: f64 = v.trim().parse().map_err(|_| CliError::Config(format!("{key}: not a number: '{v}'")))?;
    if !x.is_finite() {
        return Err(CliError::Config(format!("{key}: must be finite, got '{v}'")));
    }
    Ok(x)
}

fn parse_usize(key: &str, v: &str) -> Result<usize, CliError> {
    v.trim().parse().map_err(|_| CliError::Config(format!("{key}: not a non-negative integer: '{v}'")))
}

fn parse_spin(v: &str) -> Result<Spin, CliError> {
    let s: Spin = v.trim().parse().map_err(|e| CliError::Config(format!("j: {e}")))?;
    if s.twice() == 0 {
        return Err(CliError::Config("j: must be positive".into()));
    }
    Ok(s)
}

/// Comma-separated spins; `a..b` expands to every half-integer in `[a, b]`.
pub fn parse_spin_list(v: &str) -> Result<Vec<Spin>, CliError> {
    let mut out = Vec::new();
    for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((lo, hi)) = item.split_once("..") {
            let (lo, hi) = (parse_spin(lo)?, parse_spin(hi)?);
            if hi.twice() < lo.twice() {
                return Err(CliError::Config(format!("j: empty range '{item}'")));
            }
            out.extend((lo.twice()..=hi.twice()).map(Spin::from_twice));
        } else {
            out.push(parse_spin(item)?);
        }
    }
    if out.is_empty() {
        return Err(CliError::Config("j: empty list".into()));
    }
    Ok(out)
}

fn parse_mu(v: &str) -> Result<MuSetting, CliError> {
    if v.trim() == "opt" {
        return Ok(MuSetting::Optimal);
    }
    let vals = v
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_f64("mu", s))
        .collect::<Result<Vec<_>, _>>()?;
    if vals.is_empty() {
        return Err(CliError::Config("mu: empty grid".into()));
    }
    if vals.iter().any(|&m| m < 0.0) {
        return Err(CliError::Config("mu: values must be non-negative".into()));
    }
    Ok(MuSetting::Values(vals))
}

impl RunConfig {
    /// Merges `flags` over `file` over the subcommand defaults and validates
    /// every physical parameter.
    pub fn resolve(command: Command, flags: &RawSettings, file: &RawSettings) -> Result<Self, CliError> {
        let get = |k: &str| flags.get(k).or_else(|| file.get(k)).map(String::as_str);
        let spins = parse_spin_list(get("j").unwrap_or(command.default_j()))?;
        let mu = match get("mu") {
            Some(v) => parse_mu(v)?,
            None if command == Command::SqueezeCurve => MuSetting::Values(spinport::squeezed::default_mu_grid()),
            None => MuSetting::Optimal,
        };
        let sigma_deg = parse_f64("sigma-deg", get("sigma-deg").unwrap_or("20"))?;
        if sigma_deg <= 0.0 {
            return Err(CliError::Config("sigma-deg: must be positive".into()));
        }
        let alpha = get("alpha").map(|v| parse_f64("alpha", v)).transpose()?;
        let strategy = get("strategy")
            .map(|v| v.parse::<CorrectionStrategy>().map_err(|e| CliError::Config(format!("strategy: {e}"))))
            .transpose()?;
        let default_interaction = if command == Command::Entanglement { "general16" } else { "kp" };
        let interaction: InteractionKind = get("interaction").unwrap_or(default_interaction).parse()?;
        let seed = get("seed")
            .map(|v| v.trim().parse::<u64>().map_err(|_| CliError::Config(format!("seed: not a u64: '{v}'"))))
            .transpose()?
            .unwrap_or(0);
        let (step_default, max_default) = match command {
            Command::Superposition => ("0.5", "10"),
            _ => ("2", "90"),
        };
        let theta_step_deg = parse_f64("theta-step-deg", get("theta-step-deg").unwrap_or(step_default))?;
        let theta_max_deg = parse_f64("theta-max-deg", get("theta-max-deg").unwrap_or(max_default))?;
        if theta_step_deg <= 0.0 || theta_max_deg < 0.0 {
            return Err(CliError::Config("theta grid: step must be positive and max non-negative".into()));
        }
        let quad_theta = parse_usize("quad-theta", get("quad-theta").unwrap_or("64"))?;
        let quad_phi = parse_usize("quad-phi", get("quad-phi").unwrap_or("32"))?;
        let max_evals = parse_usize("max-evals", get("max-evals").unwrap_or("4000"))?;
        let inputs = parse_usize("inputs", get("inputs").unwrap_or("20"))?;
        if quad_theta == 0 || quad_phi == 0 || max_evals == 0 || inputs == 0 {
            return Err(CliError::Config("grid sizes and counts must be positive".into()));
        }

        if interaction == InteractionKind::Alpha && alpha.is_none() && command != Command::Entanglement {
            return Err(CliError::Config("interaction alpha needs --alpha".into()));
        }
        if interaction == InteractionKind::General16 && command != Command::Entanglement {
            return Err(CliError::Config(format!("interaction general16 is only available for entanglement, not {}", command.name())));
        }
        if let MuSetting::Values(v) = &mu {
            if command != Command::SqueezeCurve && v.len() != 1 {
                return Err(CliError::Config(format!("mu: {} takes a single value or 'opt'", command.name())));
            }
        } else if command == Command::SqueezeCurve {
            return Err(CliError::Config("mu: squeeze-curve needs explicit values".into()));
        }

        Ok(RunConfig {
            command,
            spins,
            mu,
            sigma_deg,
            alpha,
            strategy,
            interaction,
            seed,
            theta_step_deg,
            theta_max_deg,
            quad_theta,
            quad_phi,
            max_evals,
            inputs,
            out: get("out").map(PathBuf::from),
        })
    }

    /// Space-free `key=value;…` form for the manifest. The output path is not
    /// part of it, so the same run written to different files is identical.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        let js: Vec<String> = self.spins.iter().map(|j| j.to_string()).collect();
        write!(s, "j={}", js.join(",")).unwrap();
        match &self.mu {
            MuSetting::Optimal => s.push_str(";mu=opt"),
            MuSetting::Values(v) => {
                let vs: Vec<String> = v.iter().map(|x| format!("{x:e}")).collect();
                write!(s, ";mu={}", vs.join(",")).unwrap();
            }
        }
        write!(s, ";sigma-deg={}", self.sigma_deg).unwrap();
        match self.alpha {
            Some(a) => write!(s, ";alpha={a}").unwrap(),
            None => s.push_str(";alpha=none"),
        }
        let strategy = match self.strategy {
            None => "both",
            Some(CorrectionStrategy::Simple) => "simple",
            Some(CorrectionStrategy::OrientationPreserving) => "orient",
        };
        write!(
            s,
            ";strategy={strategy};interaction={};seed={};theta-step-deg={};theta-max-deg={};quad-theta={};quad-phi={};max-evals={};inputs={}",
            self.interaction.name(),
            self.seed,
            self.theta_step_deg,
            self.theta_max_deg,
            self.quad_theta,
            self.quad_phi,
            self.max_evals,
            self.inputs
        )
        .unwrap();
        s
    }

    pub fn strategies(&self) -> Vec<CorrectionStrategy> {
        match self.strategy {
            Some(s) => vec![s],
            None => vec![CorrectionStrategy::Simple, CorrectionStrategy::OrientationPreserving],
        }
    }

    pub fn theta_grid_deg(&self) -> Vec<f64> {
        let start = if self.command == Command::Superposition { 1.0 } else { 0.0 };
        let n = ((self.theta_max_deg - start) / self.theta_step_deg + 1e-9).floor().max(0.0) as usize;
        (0..=n).map(|k| start + k as f64 * self.theta_step_deg).collect()
    }
}
