//! Field samples as CSV: `r,theta,phi` followed by real/imaginary pairs of
//! `E_r, E_θ, E_φ, H_r, H_θ, H_φ` in the local spherical frame.

use emharm::harmonics::QuadratureRule;
use emharm::synthesis::FieldSample;
use emharm::tensor3::CVec3;
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::format::{complex_json, num};

pub const HEADER: [&str; 15] = [
    "r", "theta", "phi", "e_r_re", "e_r_im", "e_theta_re", "e_theta_im", "e_phi_re", "e_phi_im",
    "h_r_re", "h_r_im", "h_theta_re", "h_theta_im", "h_phi_re", "h_phi_im",
];

pub fn to_csv(samples: &[FieldSample]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER)?;
    for s in samples {
        let mut row = vec![num(s.r), num(s.theta), num(s.phi)];
        for v in [&s.e, &s.h] {
            for z in v.0 {
                row.push(num(z.re));
                row.push(num(z.im));
            }
        }
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Numerical(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Numerical(e.to_string()))
}

pub fn to_json(samples: &[FieldSample]) -> Value {
    let vec_json = |v: &CVec3| Value::Array(v.0.iter().map(|&z| complex_json(z)).collect());
    json!({
        "samples": samples.iter().map(|s| json!({
            "r": s.r,
            "theta": s.theta,
            "phi": s.phi,
            "e": vec_json(&s.e),
            "h": vec_json(&s.h),
        })).collect::<Vec<_>>()
    })
}

pub fn from_csv(text: &str) -> CliResult<Vec<FieldSample>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers()?.clone();
    if header.iter().map(str::trim).ne(HEADER.iter().copied()) {
        return Err(CliError::validation(format!(
            "field sample header must be {}",
            HEADER.join(",")
        )));
    }
    let mut out = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let vals = rec
            .iter()
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| CliError::validation(format!("row {}: {e}", line + 1)))?;
        let z = |i: usize| Complex64::new(vals[i], vals[i + 1]);
        out.push(FieldSample {
            r: vals[0],
            theta: vals[1],
            phi: vals[2],
            e: CVec3::new(z(3), z(5), z(7)),
            h: CVec3::new(z(9), z(11), z(13)),
        });
    }
    if out.is_empty() {
        return Err(CliError::validation("no field samples"));
    }
    Ok(out)
}

/// Recovers the product rule the samples were taken on: θ-major order with
/// a constant number of azimuthal nodes per polar node.
pub fn infer_rule(samples: &[FieldSample]) -> CliResult<QuadratureRule> {
    let first_theta = samples[0].theta;
    let n_phi = samples.iter().take_while(|s| s.theta == first_theta).count();
    if !samples.len().is_multiple_of(n_phi) {
        return Err(CliError::validation(format!(
            "{} samples do not form a grid with {n_phi} azimuthal nodes",
            samples.len()
        )));
    }
    let rule = QuadratureRule::new(samples.len() / n_phi, n_phi)?;
    Ok(rule)
}
