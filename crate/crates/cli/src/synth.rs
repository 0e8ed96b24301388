use std::path::PathBuf;

use clap::Args;
use emharm::harmonics::QuadratureRule;
use emharm::maxwell_radial::{Medium, WaveNumber};
use emharm::synthesis::{synthesize, PartialWave};
use serde::Deserialize;

use crate::error::{CliError, CliResult};
use crate::format::{emit, json_text, read_text, Format, GridSpec};
use crate::samples;

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Gauss–Legendre nodes in cos θ times uniform nodes in φ.
    #[arg(long, default_value = "8x16")]
    pub grid: GridSpec,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SynthConfig {
    k: f64,
    radius: f64,
    #[serde(default = "Medium::vacuum")]
    medium: Medium,
    waves: Vec<PartialWave>,
}

pub fn run(args: &SynthArgs) -> CliResult<()> {
    let cfg: SynthConfig = serde_json::from_str(&read_text(&args.config)?)
        .map_err(|e| CliError::validation(format!("{}: {e}", args.config.display())))?;
    let k = WaveNumber::new(cfg.k)?;
    let rule = QuadratureRule::new(args.grid.n_theta, args.grid.n_phi)?;
    let points: Vec<(f64, f64, f64)> =
        rule.nodes().iter().map(|n| (cfg.radius, n.theta, n.phi)).collect();
    let out = synthesize(&cfg.waves, k, &cfg.medium, &points)?;
    let text = match args.format {
        Format::Csv => samples::to_csv(&out)?,
        Format::Json => json_text(&samples::to_json(&out))?,
    };
    emit(args.out.as_deref(), &text)
}
