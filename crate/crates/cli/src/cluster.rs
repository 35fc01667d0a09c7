use crate::args::{ClusterArgs, Direction, Format};
use crate::config::{parse_grid, parse_range, pick, pick_flag, ConfigFile};
use crate::error::CliError;
use crate::output::{csv, write_file, Context};
use crate::state;
use cluster_decay::{bound_check, decay_fit, kms_rearrangement_check, scan, BoundReport, ClusterScan, FitOptions, ScanSample};
use serde::Serialize;

const DEFAULT_RADII: &str = "4..10:0.25";
const DEFAULT_FIT_WINDOW: &str = "5..10";
const DEFAULT_REARRANGEMENT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Serialize)]
struct Row {
    r: f64,
    r_e: f64,
    re: f64,
    im: f64,
    abs: f64,
}

#[derive(Serialize)]
struct Fit {
    rate: f64,
    prefactor: f64,
    residual: f64,
    window: (f64, f64),
    used: usize,
    dropped_below_noise: usize,
}

#[derive(Serialize)]
struct Bound {
    rate: f64,
    c_star: f64,
    passed: bool,
    violation_index: Option<usize>,
    violation_r_e: Option<f64>,
}

impl From<&BoundReport> for Bound {
    fn from(b: &BoundReport) -> Self {
        Self {
            rate: b.rate,
            c_star: b.c_star,
            passed: b.passed,
            violation_index: b.violation.map(|v| v.0),
            violation_r_e: b.violation.map(|v| v.1),
        }
    }
}

#[derive(Serialize)]
struct Rearrangement {
    r: f64,
    max_relative_gap: f64,
    tolerance: f64,
    passed: bool,
}

#[derive(Serialize)]
struct Report<'a> {
    n: usize,
    powers: &'a [u32],
    u: &'a [f64],
    mass: f64,
    beta: Option<f64>,
    direction: &'a str,
    fit: Fit,
    bound: Bound,
    #[serde(skip_serializing_if = "Option::is_none")]
    negative_control: Option<Bound>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rearrangement: Option<Rearrangement>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<&'a [Row]>,
}

fn rows(samples: &[ScanSample]) -> Vec<Row> {
    samples
        .iter()
        .map(|s| Row { r: s.r, r_e: s.r_e, re: s.value.re, im: s.value.im, abs: s.value.norm() })
        .collect()
}

/// Runs the scan; a failed bound, negative control or rearrangement check
/// is reported after the output is written.
pub fn run(args: &ClusterArgs, file: &ConfigFile, ctx: &Context) -> Result<Option<String>, CliError> {
    let params = state(&args.state, file)?;
    let n = pick(args.n, &file.n).unwrap_or(1);
    if n == 0 {
        return Err(CliError::Domain("n must be >= 1".into()));
    }
    let powers = pick(args.powers.clone(), &file.powers).unwrap_or_else(|| vec![2; n + 1]);
    let u = pick(args.u.clone(), &file.u).unwrap_or_else(|| {
        let step = if params.is_vacuum() { 1.0 } else { params.beta / (n as f64 + 1.0) };
        (1..=n).map(|i| step * i as f64).collect()
    });
    if powers.len() != n + 1 || u.len() != n {
        return Err(CliError::Domain(format!("n = {n} needs {} powers and {n} imaginary times", n + 1)));
    }
    let direction = pick(args.direction, &file.direction).unwrap_or(Direction::Spatial);
    let radii = parse_grid(pick(args.radii.clone(), &file.radii).as_deref().unwrap_or(DEFAULT_RADII))?;
    let (lo, hi, _) = parse_range(pick(args.fit_window.clone(), &file.fit_window).as_deref().unwrap_or(DEFAULT_FIT_WINDOW))?;
    let negative = pick_flag(args.negative_control, file.negative_control);

    let s = match direction {
        Direction::Spatial => ClusterScan::spatial(powers.clone(), params, u.clone(), [0.0, 0.0, 1.0], radii.clone()),
        Direction::URay => ClusterScan::imaginary_time_ray(powers.clone(), params, u.clone(), radii.clone()),
    };
    let samples = scan(&s)?;
    let fit = decay_fit(&samples, &FitOptions::window(lo, hi))?;
    let rate = pick(args.bound_rate, &file.bound_rate).unwrap_or(params.mass / (n as f64).sqrt());
    let bound = bound_check(&samples, rate);
    let control = negative.then(|| bound_check(&samples, fit.rate + params.mass));
    let rearrangement = if params.is_vacuum() {
        None
    } else {
        let r = radii[radii.len() / 2];
        let tol = ctx.tolerance.unwrap_or(DEFAULT_REARRANGEMENT_TOLERANCE);
        let rep = kms_rearrangement_check(&s, r, tol)?;
        Some(Rearrangement { r, max_relative_gap: rep.max_relative_gap, tolerance: tol, passed: rep.passed })
    };

    let mut failure = None;
    if !bound.passed {
        failure = Some(format!("decay bound with rate {rate} violated at r_e = {:?}", bound.violation.map(|v| v.1)));
    }
    if let Some(c) = &control {
        if c.passed {
            failure = Some(format!("negative control with rate {} unexpectedly passed", c.rate));
        } else {
            failure = Some(format!(
                "negative control: bound with rate {} violated at r_e = {}",
                c.rate,
                c.violation.map_or(f64::NAN, |v| v.1)
            ));
        }
    }
    if let Some(r) = &rearrangement {
        if !r.passed {
            failure = Some(format!("KMS rearrangement gap {} exceeds {}", r.max_relative_gap, r.tolerance));
        }
    }

    let table = rows(&samples);
    let mut report = Report {
        n,
        powers: &powers,
        u: &u,
        mass: params.mass,
        beta: (!params.is_vacuum()).then_some(params.beta),
        direction: match direction {
            Direction::Spatial => "spatial",
            Direction::URay => "u-ray",
        },
        fit: Fit {
            rate: fit.rate,
            prefactor: fit.prefactor,
            residual: fit.residual,
            window: fit.window,
            used: fit.used,
            dropped_below_noise: fit.dropped_below_noise,
        },
        bound: (&bound).into(),
        negative_control: control.as_ref().map(Bound::from),
        rearrangement,
        samples: None,
    };
    match ctx.format_or(Format::Csv) {
        Format::Csv => {
            ctx.emit(&csv(&table)?)?;
            let text = ctx.json("cluster", &report)?;
            match pick(args.report.clone(), &file.report) {
                Some(path) => write_file(&path, &text)?,
                None => eprint!("{text}"),
            }
        }
        Format::Json => {
            report.samples = Some(&table);
            ctx.emit(&ctx.json("cluster", &report)?)?;
        }
    }
    Ok(failure)
}
