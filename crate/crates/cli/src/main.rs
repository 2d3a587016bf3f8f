//! `spinport`: CSV tables for spin-j teleportation and entanglement-swapping
//! experiments.

mod commands;
mod config;
mod error;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use config::{Command, RawSettings, RunConfig};
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "spinport", version, about = "Spin-j teleportation and entanglement-swapping experiments")]
struct Args {
    /// Experiment to run
    #[arg(value_enum)]
    command: Command,
    /// Spin list, e.g. `1/2,1,3/2` or `1/2..5`
    #[arg(long)]
    j: Option<String>,
    /// Resource parameter: a value, a comma grid (squeeze-curve), or `opt`
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    /// Ensemble width in degrees; the weighting uses sigma = (deg·π/180)²
    #[arg(long, allow_hyphen_values = true)]
    sigma_deg: Option<String>,
    /// Coupling for `--interaction alpha`
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// `simple` or `orient` (default: both)
    #[arg(long)]
    strategy: Option<String>,
    /// `kp`, `alpha` or `general16`
    #[arg(long)]
    interaction: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    theta_step_deg: Option<String>,
    #[arg(long)]
    theta_max_deg: Option<String>,
    /// Gauss-Legendre nodes in θ for ensemble averages
    #[arg(long)]
    quad_theta: Option<String>,
    /// Uniform nodes in φ for ensemble averages
    #[arg(long)]
    quad_phi: Option<String>,
    /// Simplex evaluation budget per restart (entanglement, general16)
    #[arg(long)]
    max_evals: Option<String>,
    /// Random inputs per spin (perfect)
    #[arg(long)]
    inputs: Option<String>,
    /// Output CSV path; several tables get `_<tag>` suffixes. Default: stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// `key=value` file; command-line flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Args {
    fn flags(&self) -> RawSettings {
        let pairs = [
            ("j", &self.j),
            ("mu", &self.mu),
            ("sigma-deg", &self.sigma_deg),
            ("alpha", &self.alpha),
            ("strategy", &self.strategy),
            ("interaction", &self.interaction),
            ("seed", &self.seed),
            ("theta-step-deg", &self.theta_step_deg),
            ("theta-max-deg", &self.theta_max_deg),
            ("quad-theta", &self.quad_theta),
            ("quad-phi", &self.quad_phi),
            ("max-evals", &self.max_evals),
            ("inputs", &self.inputs),
        ];
        let mut m: RawSettings =
            pairs.into_iter().filter_map(|(k, v)| v.clone().map(|v| (k.to_string(), v))).collect();
        if let Some(p) = &self.out {
            m.insert("out".into(), p.display().to_string());
        }
        m
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("SPINPORT_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("SPINPORT_THREADS: not a non-negative integer: '{v}'")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("SPINPORT_THREADS: {e}")))?;
    }
    Ok(())
}

fn tagged_path(base: &Path, tag: &str) -> PathBuf {
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}_{tag}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{tag}"),
    };
    base.with_file_name(name)
}

fn run(args: &Args) -> Result<(), CliError> {
    init_threads()?;
    let file = match &args.config {
        Some(p) => config::read_config_file(p)?,
        None => RawSettings::new(),
    };
    let cfg = RunConfig::resolve(args.command, &args.flags(), &file)?;
    let manifest = format!("{} {} {}", cfg.command.name(), cfg.canonical(), env!("CARGO_PKG_VERSION"));
    let output = commands::run(&cfg)?;
    let several = output.tables.len() > 1;
    match &cfg.out {
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            for t in &output.tables {
                t.write(&manifest, &mut lock)?;
            }
            lock.flush()?;
        }
        Some(path) => {
            for t in &output.tables {
                let target = match (&t.tag, several) {
                    (Some(tag), true) => tagged_path(path, tag),
                    _ => path.clone(),
                };
                let mut w = BufWriter::new(File::create(&target)?);
                t.write(&manifest, &mut w)?;
                w.flush()?;
            }
        }
    }
    if !output.failures.is_empty() {
        return Err(CliError::Check(output.failures.join("; ")));
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {e}", e.kind());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
