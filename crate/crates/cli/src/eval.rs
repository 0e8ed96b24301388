use std::path::PathBuf;

use clap::{Args, ValueEnum};
use emharm::harmonics::{flm, xlm, AngularPoint, QuadratureRule};
use emharm::specfun::{ylm, ModeIndex};
use num_complex::Complex64;
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::format::{complex_json, emit, json_text, num, Format, GridSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Harmonic {
    Ylm,
    Xlm,
    Flm,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, value_enum)]
    pub harmonic: Harmonic,
    #[arg(long, allow_hyphen_values = true)]
    pub l: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub m: i64,
    /// Gauss–Legendre nodes in cos θ times uniform nodes in φ.
    #[arg(long, default_value = "8x16")]
    pub grid: GridSpec,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

const COMPONENTS: [&str; 3] = ["r", "theta", "phi"];

fn column_names(h: Harmonic) -> Vec<String> {
    match h {
        Harmonic::Ylm => vec!["y".into()],
        Harmonic::Xlm => COMPONENTS.iter().map(|c| format!("x_{c}")).collect(),
        Harmonic::Flm => COMPONENTS
            .iter()
            .flat_map(|a| COMPONENTS.iter().map(move |b| format!("f_{a}_{b}")))
            .collect(),
    }
}

fn values(h: Harmonic, mode: ModeIndex, p: AngularPoint) -> Vec<Complex64> {
    match h {
        Harmonic::Ylm => vec![ylm(mode, p.theta(), p.phi())],
        Harmonic::Xlm => xlm(mode, p).0.to_vec(),
        Harmonic::Flm => flm(mode, p).to_row_major().to_vec(),
    }
}

pub fn run(args: &EvalArgs) -> CliResult<()> {
    let mode = ModeIndex::from_signed(args.l, args.m)?;
    let rule = QuadratureRule::new(args.grid.n_theta, args.grid.n_phi)?;
    let mut rows = Vec::with_capacity(rule.len());
    for n in rule.nodes() {
        let p = AngularPoint::new(n.theta, n.phi)?;
        rows.push((n.theta, n.phi, values(args.harmonic, mode, p)));
    }
    let names = column_names(args.harmonic);
    let text = match args.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["theta".to_string(), "phi".to_string()];
            for n in &names {
                header.push(format!("{n}_re"));
                header.push(format!("{n}_im"));
            }
            w.write_record(&header)?;
            for (t, p, vals) in &rows {
                let mut rec = vec![num(*t), num(*p)];
                for z in vals {
                    rec.push(num(z.re));
                    rec.push(num(z.im));
                }
                w.write_record(&rec)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Numerical(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| CliError::Numerical(e.to_string()))?
        }
        Format::Json => json_text(&json!({
            "harmonic": format!("{:?}", args.harmonic).to_lowercase(),
            "l": mode.l(),
            "m": mode.m(),
            "grid": { "n_theta": rule.n_theta(), "n_phi": rule.n_phi() },
            "columns": names,
            "points": rows.iter().map(|(t, p, vals)| json!({
                "theta": t,
                "phi": p,
                "values": vals.iter().map(|&z| complex_json(z)).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        }))?,
    };
    emit(args.out.as_deref(), &text)
}
