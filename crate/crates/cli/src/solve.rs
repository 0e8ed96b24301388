use std::path::{Path, PathBuf};

use clap::Args;
use emharm::maxwell_radial::{Medium, MediumProfile, RadialProfile, WaveNumber};
use emharm::specfun::{ModeIndex, RadialKind};
use emharm::synthesis::{
    match_layered, match_sphere, project_samples, recover_coefficients, truncation_lmax,
    PartialWave, SphereMatch, TransferMethod,
};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::format::{complex_pair_json, emit, json_text, read_text};
use crate::samples;

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Field samples (CSV) on a quadrature grid to project onto partial waves.
    #[arg(long)]
    pub project: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SphereSpec {
    radius: f64,
    eps: [f64; 2],
    mu: [f64; 2],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IncidentSpec {
    l: i64,
    m: i64,
    c: [[f64; 2]; 2],
}

#[derive(Debug, Deserialize, Clone, Copy, Default)]
#[serde(rename_all = "snake_case")]
enum Method {
    #[default]
    ClosedForm,
    Numerical,
}

/// Parameters of `solve`; exactly one of `sphere` and `profile` is given.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct JobConfig {
    k: f64,
    #[serde(default)]
    sphere: Option<SphereSpec>,
    #[serde(default)]
    host: Option<Medium>,
    #[serde(default)]
    profile: Option<RadialProfile>,
    #[serde(default)]
    lmax: Option<usize>,
    #[serde(default)]
    incident: Option<Vec<IncidentSpec>>,
    #[serde(default)]
    method: Method,
}

enum Scatterer {
    Sphere { radius: f64, sphere: Medium, host: Medium },
    Layered { profile: RadialProfile, method: TransferMethod },
}

impl Scatterer {
    fn outer_radius(&self) -> f64 {
        match self {
            Scatterer::Sphere { radius, .. } => *radius,
            Scatterer::Layered { profile, .. } => profile.outer_radius().unwrap_or(0.0),
        }
    }

    fn medium_at(&self, r: f64) -> Medium {
        match self {
            Scatterer::Sphere { radius, sphere, host } => {
                if r < *radius {
                    *sphere
                } else {
                    *host
                }
            }
            Scatterer::Layered { profile, .. } => profile.medium_at(r),
        }
    }

    fn solve(&self, k: WaveNumber, incident: &PartialWave) -> CliResult<SphereMatch> {
        let l = incident.mode().l();
        Ok(match self {
            Scatterer::Sphere { radius, sphere, host } => {
                match_sphere(l, k, sphere, host, *radius, incident)?
            }
            Scatterer::Layered { profile, method } => match_layered(l, k, profile, incident, *method)?,
        })
    }
}

fn scatterer(cfg: &JobConfig) -> CliResult<Scatterer> {
    match (&cfg.sphere, &cfg.profile) {
        (Some(s), None) => {
            let c = |v: [f64; 2]| Complex64::new(v[0], v[1]);
            let sphere = Medium::new(c(s.eps), c(s.mu))?;
            if !(s.radius.is_finite() && s.radius > 0.0) {
                return Err(CliError::validation(format!("sphere radius must be positive, got {}", s.radius)));
            }
            Ok(Scatterer::Sphere { radius: s.radius, sphere, host: cfg.host.unwrap_or_else(Medium::vacuum) })
        }
        (None, Some(p)) => {
            if cfg.host.is_some() {
                return Err(CliError::validation("'host' only applies to 'sphere'; use profile.outer"));
            }
            let method = match cfg.method {
                Method::ClosedForm => TransferMethod::ClosedForm,
                Method::Numerical => TransferMethod::Numerical,
            };
            Ok(Scatterer::Layered { profile: p.clone(), method })
        }
        _ => Err(CliError::validation("config needs exactly one of 'sphere' or 'profile'")),
    }
}

fn incident_waves(cfg: &JobConfig, lmax: usize) -> CliResult<Vec<PartialWave>> {
    let c = |v: [f64; 2]| Complex64::new(v[0], v[1]);
    match &cfg.incident {
        Some(list) => list
            .iter()
            .map(|s| {
                let mode = ModeIndex::from_signed(s.l, s.m)?;
                Ok(PartialWave::regular(mode, [c(s.c[0]), c(s.c[1])])?)
            })
            .collect(),
        None => (1..=lmax)
            .map(|l| Ok(PartialWave::regular(ModeIndex::new(l, 0)?, [Complex64::new(1.0, 0.0); 2])?))
            .collect(),
    }
}

fn projected(path: &Path, k: WaveNumber, scat: &Scatterer, lmax: usize) -> CliResult<Value> {
    let samples = samples::from_csv(&read_text(path)?)?;
    let rule = samples::infer_rule(&samples)?;
    let r = samples[0].r;
    let med = scat.medium_at(r);
    let kinds = (RadialKind::BesselJ, RadialKind::Hankel1);
    // highest degree the sample grid resolves
    let resolved = (rule.n_theta() - 1).min((rule.n_phi() - 1) / 2);
    let lmax = lmax.min(resolved);
    if lmax == 0 {
        return Err(CliError::validation(format!(
            "{}x{} sample grid cannot resolve l = 1",
            rule.n_theta(),
            rule.n_phi()
        )));
    }
    let mut out = Vec::new();
    for mode in ModeIndex::range(1, lmax) {
        let proj = project_samples(&samples, mode, &rule)?;
        let w = recover_coefficients(&proj, kinds, k, r, &med)?;
        out.push(json!({
            "l": mode.l(),
            "m": mode.m(),
            "c1": complex_pair_json(w.c1),
            "c2": complex_pair_json(w.c2),
        }));
    }
    Ok(json!({ "radius": r, "lmax": lmax, "kinds": [kinds.0, kinds.1], "waves": out }))
}

pub fn run(args: &SolveArgs) -> CliResult<()> {
    let cfg: JobConfig = serde_json::from_str(&read_text(&args.config)?)
        .map_err(|e| CliError::validation(format!("{}: {e}", args.config.display())))?;
    let k = WaveNumber::new(cfg.k)?;
    let scat = scatterer(&cfg)?;
    let x = k.get() * scat.outer_radius();
    let lmax = cfg.lmax.unwrap_or_else(|| truncation_lmax(x));
    if lmax == 0 {
        return Err(emharm::error::Error::MonopoleMode.into());
    }

    let mut modes = Vec::new();
    for inc in incident_waves(&cfg, lmax)? {
        let m = scat.solve(k, &inc)?;
        modes.push(json!({
            "l": inc.mode().l(),
            "m": inc.mode().m(),
            "incident": complex_pair_json(inc.c1),
            "scattered": complex_pair_json(m.scattered),
            "interior": complex_pair_json(m.interior),
        }));
    }
    // response to unit incidence, independent of m
    let mut ratios = Vec::new();
    for l in 1..=lmax {
        let unit = PartialWave::regular(ModeIndex::new(l, 0)?, [Complex64::new(1.0, 0.0); 2])?;
        let m = scat.solve(k, &unit)?;
        ratios.push(json!({
            "l": l,
            "electric": [m.scattered[0].re, m.scattered[0].im],
            "magnetic": [m.scattered[1].re, m.scattered[1].im],
        }));
    }
    let mut report = json!({
        "k": k.get(),
        "outer_radius": scat.outer_radius(),
        "size_parameter": x,
        "lmax": lmax,
        "modes": modes,
        "ratios": ratios,
    });
    if let Some(path) = &args.project {
        report["projected"] = projected(path, k, &scat, lmax)?;
    }
    emit(args.out.as_deref(), &json_text(&report)?)
}
