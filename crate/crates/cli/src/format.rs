use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde_json::Value;

use crate::error::{CliError, CliResult};

/// Shortest decimal form that parses back to the same double.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// `[re, im]` as a JSON array.
pub fn complex_json(z: Complex64) -> Value {
    serde_json::json!([z.re, z.im])
}

pub fn complex_pair_json(v: [Complex64; 2]) -> Value {
    Value::Array(v.iter().map(|&z| complex_json(z)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// `NθxNφ`, e.g. `8x16`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl FromStr for GridSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("grid '{s}' must look like NTHETAxNPHI"))?;
        let parse = |t: &str| -> Result<usize, String> {
            match t.trim().parse::<usize>() {
                Ok(n) if n > 0 => Ok(n),
                _ => Err(format!("grid '{s}': node counts must be positive integers")),
            }
        };
        Ok(GridSpec { n_theta: parse(a)?, n_phi: parse(b)? })
    }
}

/// Writes `text` to `out`, or to stdout when `out` is `None`.
pub fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::validation(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}

pub fn json_text(v: &Value) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}
