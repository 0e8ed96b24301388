use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use emharm::harmonics::{
    flm, gram_tensors, invariant_residuals, l_dot_er_cross_xlm, l_dot_xlm, l_squared_check,
    lz_check, AngularPoint, QuadratureRule,
};
use emharm::maxwell_radial::{closed_form_transfer, propagate, Medium, TangentialState, WaveNumber};
use emharm::specfun::{ylm, ModeIndex, RadialKind};
use emharm::synthesis::{maxwell_residual, PartialWave};
use emharm::tensor3::{dyad, CTensor3, CVec3};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::format::{emit, json_text};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Ortho,
    Invariants,
    Maxwell,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long, default_value_t = 4)]
    pub lmax: usize,
    /// Overrides the tolerance of every check in the suite.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Where the largest error occurred.
    pub worst: String,
}

/// Running maximum with the label of its location.
struct Worst {
    error: f64,
    at: String,
}

impl Worst {
    fn new() -> Self {
        Worst { error: 0.0, at: String::new() }
    }

    /// NaN counts as the worst possible error and sticks.
    fn update(&mut self, error: f64, at: impl FnOnce() -> String) {
        if self.error.is_nan() {
            return;
        }
        if error.is_nan() || error > self.error || self.at.is_empty() {
            self.error = error;
            self.at = at();
        }
    }

    fn report(self, check: &str, tolerance: f64) -> CheckReport {
        CheckReport {
            check: check.into(),
            max_error: self.error,
            tolerance,
            pass: self.error <= tolerance,
            worst: self.at,
        }
    }
}

fn label(m: ModeIndex) -> String {
    format!("(l={}, m={})", m.l(), m.m())
}

/// Deterministic directions spread over the sphere, away from the poles.
fn sweep(n: usize) -> Vec<AngularPoint> {
    (0..n)
        .map(|i| {
            let u = (i as f64 + 0.5) / n as f64;
            let g = (i as f64 * 0.618_033_988_749_895).fract();
            AngularPoint::new((1.0 - 2.0 * u).acos().clamp(1e-3, PI - 1e-3), g * 2.0 * PI)
                .expect("angles in range")
        })
        .collect()
}

fn ortho(lmax: usize, tol: Option<f64>) -> CliResult<Vec<CheckReport>> {
    let modes = ModeIndex::range(1, lmax.max(1));
    let rule = QuadratureRule::for_lmax(lmax.max(1));
    let grams = gram_tensors(&modes, &rule, flm)?;
    let n = modes.len();
    let mut gram = Worst::new();
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { CTensor3::identity() } else { CTensor3::zero() };
            let err = grams[i * n + j].max_abs_diff(&target);
            gram.update(err, || format!("{} x {}", label(modes[i]), label(modes[j])));
        }
    }
    // l = 0 carries only the longitudinal part
    let mono = ModeIndex::new(0, 0)?;
    let g0 = gram_tensors(&[mono], &rule, flm)?;
    let er = CVec3::e_r();
    let mut monopole = Worst::new();
    monopole.update(g0[0].max_abs_diff(&dyad(&er, &er)), || label(mono));
    let t = tol.unwrap_or(1e-10);
    Ok(vec![gram.report("gram_identity", t), monopole.report("gram_monopole_rank_one", t)])
}

fn invariants(lmax: usize, tol: Option<f64>) -> CliResult<Vec<CheckReport>> {
    let points = sweep(100);
    let names = ["trace", "det", "adjoint", "trace_adjoint", "trace_square"];
    let mut inv: Vec<Worst> = names.iter().map(|_| Worst::new()).collect();
    let eig_names = ["eigen_l_squared", "eigen_lz", "eigen_l_dot_x", "eigen_l_dot_er_cross_x"];
    let mut eig: Vec<Worst> = eig_names.iter().map(|_| Worst::new()).collect();
    for mode in ModeIndex::range(0, lmax) {
        let lam = mode.l_squared().sqrt();
        for &p in &points {
            let r = invariant_residuals(mode, p);
            let at = || format!("{} at (θ={:.6}, φ={:.6})", label(mode), p.theta(), p.phi());
            for (w, v) in inv.iter_mut().zip([r.trace, r.det, r.adjoint, r.trace_adjoint, r.trace_square]) {
                w.update(v, at);
            }
            let y = ylm(mode, p.theta(), p.phi());
            let scale = y.norm().max(1.0 / (4.0 * PI).sqrt());
            let e = [
                l_squared_check(mode, p) / (scale * mode.l_squared().max(1.0)),
                lz_check(mode, p) / scale,
                (l_dot_xlm(mode, p) - y * lam).norm() / (scale * lam.max(1.0)),
                l_dot_er_cross_xlm(mode, p).norm() / (scale * lam.max(1.0)),
            ];
            for (w, v) in eig.iter_mut().zip(e) {
                w.update(v, at);
            }
        }
    }
    let mut out: Vec<CheckReport> = inv
        .into_iter()
        .zip(names)
        .map(|(w, n)| w.report(n, tol.unwrap_or(1e-12)))
        .collect();
    out.extend(eig.into_iter().zip(eig_names).map(|(w, n)| w.report(n, tol.unwrap_or(1e-10))));
    Ok(out)
}

fn maxwell(lmax: usize, tol: Option<f64>) -> CliResult<Vec<CheckReport>> {
    let k = WaveNumber::new(1.0)?;
    let med = Medium::new(Complex64::new(2.0, 0.3), Complex64::new(1.1, 0.05))?;
    let c = Complex64::new;
    let waves = ModeIndex::range(1, lmax.max(1))
        .into_iter()
        .map(|mode| {
            let s = 1.0 / mode.l() as f64;
            PartialWave::new(
                mode,
                [c(s, 0.1 * mode.m() as f64), c(0.0, 0.5 * s)],
                [c(0.3, -0.2), c(-0.1 * mode.m() as f64, 0.4)],
                (RadialKind::BesselJ, RadialKind::Hankel1),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    let points = [(1.2, 0.7, 0.4), (1.9, 1.9, 2.5), (2.6, 2.6, 5.1), (0.8, 1.2, 3.7)];
    let mut curl = Worst::new();
    for &pt in &points {
        let res = maxwell_residual(&waves, k, &med, pt)?;
        curl.update(res, || format!("r={}, θ={}, φ={}", pt.0, pt.1, pt.2));
    }

    let mut transfer = Worst::new();
    let w0 = TangentialState::new(c(1.0, 0.0), c(0.3, -0.2), c(0.0, 0.7), c(-0.4, 0.1));
    for l in 1..=lmax.max(1) {
        for (r0, r1) in [(0.5, 10.0), (10.0, 0.5)] {
            let got = propagate(l, k, &med, r0, r1, &w0)?.as_vector();
            let expect = closed_form_transfer(l, k, &med, r0, r1)? * w0.as_vector();
            let err = (got - expect).norm() / expect.norm();
            transfer.update(err, || format!("l={l}, r {r0} -> {r1}"));
        }
    }
    Ok(vec![
        curl.report("curl_residual", tol.unwrap_or(1e-5)),
        transfer.report("propagator_vs_closed_form", tol.unwrap_or(1e-8)),
    ])
}

pub fn run(args: &VerifyArgs) -> CliResult<()> {
    if let Some(t) = args.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(CliError::validation(format!("--tol must be positive, got {t}")));
        }
    }
    let checks = match args.suite {
        Suite::Ortho => ortho(args.lmax, args.tol)?,
        Suite::Invariants => invariants(args.lmax, args.tol)?,
        Suite::Maxwell => maxwell(args.lmax, args.tol)?,
    };
    let pass = checks.iter().all(|c| c.pass);
    let report = serde_json::json!({
        "suite": format!("{:?}", args.suite).to_lowercase(),
        "lmax": args.lmax,
        "pass": pass,
        "checks": checks,
    });
    emit(args.out.as_deref(), &json_text(&report)?)?;
    match checks.iter().find(|c| !c.pass) {
        None => Ok(()),
        Some(bad) => {
            let worst = checks
                .iter()
                .filter(|c| !c.pass)
                .max_by(|a, b| (a.max_error / a.tolerance).total_cmp(&(b.max_error / b.tolerance)))
                .unwrap_or(bad);
            Err(CliError::Numerical(format!(
                "check {} failed: max error {:e} > {:e} at {}",
                worst.check, worst.max_error, worst.tolerance, worst.worst
            )))
        }
    }
}
