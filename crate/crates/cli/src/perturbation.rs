use crate::args::{CheckCommand, CorrectArgs, Format, KmsCommand, Mode, Shape, ShiftArgs, StateArgs, TermArgs};
use crate::config::{parse_indices, parse_monomial, pick, ConfigFile, Scalar};
use crate::error::CliError;
use crate::output::{csv, Context};
use crate::state;
use kms_perturbation::{
    first_order_sequence, second_order_correction, t_shift_invariance, thermal_mass, van_hove_limit,
    wick_reordering_check, BumpShape, Correction, InteractionSpec, NumericsConfig, SmearingMode, TimeSmearing,
    VanHoveProfile, VanHoveReport, PRINTED_THERMAL_MASS_FACTOR,
};
use propagators::QuadratureConfig;
use serde::Serialize;
use wick_algebra::WickMonomial;

const DEFAULT_EPSILON: f64 = 0.1;
const DEFAULT_VANHOVE_TOLERANCE: f64 = 1e-4;
const DEFAULT_SHIFT_TOLERANCE: f64 = 1e-4;
const DEFAULT_REORDER_TOLERANCE: f64 = 1e-10;

pub fn run(command: &KmsCommand, file: &ConfigFile, ctx: &Context) -> Result<Option<String>, CliError> {
    match command {
        KmsCommand::ThermalMass(s) => thermal(s, file, ctx).map(|_| None),
        KmsCommand::Correct(c) => correct(c, file, ctx).map(|_| None),
        KmsCommand::Check(c) => match &c.command {
            CheckCommand::Shift(s) => shift(s, file, ctx),
            CheckCommand::Reorder(s) => reorder(s, file, ctx),
        },
    }
}

#[derive(Serialize)]
struct ThermalMass {
    mass: f64,
    beta: f64,
    value: f64,
    error: f64,
    tolerance: f64,
    /// `1/(12β²)`, only at `m = 0`.
    massless_closed_form: Option<f64>,
    /// `1/(12π²β²)`, only at `m = 0`, for comparison.
    printed_closed_form: Option<f64>,
}

fn thermal(args: &StateArgs, file: &ConfigFile, ctx: &Context) -> Result<(), CliError> {
    let params = state(args, file)?;
    let tolerance = ctx.tolerance.unwrap_or(QuadratureConfig::default().rel_tol);
    let est = thermal_mass(&params, &QuadratureConfig::default().with_rel_tol(tolerance))?;
    let b2 = params.beta * params.beta;
    let massless = params.mass == 0.0;
    let report = ThermalMass {
        mass: params.mass,
        beta: params.beta,
        value: est.value,
        error: est.error,
        tolerance,
        massless_closed_form: massless.then(|| 1.0 / (12.0 * b2)),
        printed_closed_form: massless.then(|| PRINTED_THERMAL_MASS_FACTOR / b2),
    };
    let text = match ctx.format_or(Format::Json) {
        Format::Json => ctx.json("kms thermal-mass", &report)?,
        Format::Csv => csv(&[&report])?,
    };
    ctx.emit(&text)
}

fn terms(args: &TermArgs, file: &ConfigFile) -> Result<(WickMonomial, InteractionSpec), CliError> {
    let obs = parse_monomial(pick(args.obs.clone(), &file.obs).as_deref().unwrap_or("phi4"))?;
    let int = parse_monomial(pick(args.interaction.clone(), &file.int).as_deref().unwrap_or("phi4"))?;
    Ok((WickMonomial::at_origin(0, obs), InteractionSpec::new(int)?))
}

fn epsilon(flag: Option<f64>, file: &ConfigFile) -> Result<f64, CliError> {
    match (flag, &file.epsilon) {
        (Some(e), _) => Ok(e),
        (None, Some(e)) => e.as_f64(),
        (None, None) => Ok(DEFAULT_EPSILON),
    }
}

#[derive(Serialize)]
struct CorrectionReport<'a> {
    order: u32,
    tolerance: f64,
    corrections: &'a [Correction],
    van_hove: Option<VanHoveReport>,
}

#[derive(Serialize)]
struct CorrectionRow {
    profile_index: u32,
    value: f64,
    imaginary_part: f64,
    error: f64,
    certified: bool,
}

fn correct(args: &CorrectArgs, file: &ConfigFile, ctx: &Context) -> Result<(), CliError> {
    let params = state(&args.state, file)?;
    let (a, interaction) = terms(&args.term, file)?;
    let order = pick(args.order, &file.order).unwrap_or(1);
    let vanhove = match (&args.vanhove, &file.vanhove) {
        (Some(v), _) => v.clone(),
        (None, Some(Scalar::Number(x))) => format!("{x}"),
        (None, Some(Scalar::Text(v))) => v.clone(),
        (None, None) => "2".into(),
    };
    let indices = parse_indices(&vanhove)?;
    let shape = match pick(args.shape, &file.shape).unwrap_or(Shape::Symmetric) {
        Shape::Symmetric => BumpShape::Symmetric,
        Shape::Skewed => BumpShape::Skewed,
    };
    let mode = match pick(args.mode, &file.mode).unwrap_or(Mode::Full) {
        Mode::Full => SmearingMode::Full,
        Mode::Delta => SmearingMode::Delta,
    };
    let smearing = TimeSmearing::new(epsilon(args.epsilon, file)?)?.with_shape(shape).with_mode(mode);
    let defaults = NumericsConfig::default();
    let cfg = NumericsConfig {
        rel_tol: ctx.tolerance.unwrap_or(defaults.rel_tol),
        seed: pick(args.seed, &file.seed).unwrap_or(defaults.seed),
        qmc_points: pick(args.qmc_points, &file.qmc_points).unwrap_or(defaults.qmc_points),
        qmc_shifts: pick(args.qmc_shifts, &file.qmc_shifts).unwrap_or(defaults.qmc_shifts),
        ..defaults
    };
    let corrections = match order {
        1 => first_order_sequence(&a, &interaction, &smearing, &indices, &params, &cfg)?,
        2 => indices
            .iter()
            .map(|&n| second_order_correction(&a, &interaction, &smearing, &VanHoveProfile::new(n)?, &params, &cfg))
            .collect::<Result<Vec<_>, _>>()?,
        _ => return Err(CliError::Domain(format!("order must be 1 or 2, got {order}"))),
    };
    let van_hove = if corrections.len() >= 3 {
        let tol = pick(args.vanhove_tolerance, &file.vanhove_tolerance).unwrap_or(DEFAULT_VANHOVE_TOLERANCE);
        let pairs: Vec<(u32, f64)> = corrections.iter().map(|c| (c.profile_index, c.value)).collect();
        Some(van_hove_limit(&pairs, tol)?)
    } else {
        None
    };
    let text = match ctx.format_or(Format::Json) {
        Format::Json => ctx.json(
            "kms correct",
            &CorrectionReport { order, tolerance: cfg.rel_tol, corrections: &corrections, van_hove },
        )?,
        Format::Csv => {
            let rows: Vec<CorrectionRow> = corrections
                .iter()
                .map(|c| CorrectionRow {
                    profile_index: c.profile_index,
                    value: c.value,
                    imaginary_part: c.imaginary_part,
                    error: c.error,
                    certified: c.certified,
                })
                .collect();
            csv(&rows)?
        }
    };
    ctx.emit(&text)
}

fn shift(args: &ShiftArgs, file: &ConfigFile, ctx: &Context) -> Result<Option<String>, CliError> {
    ctx.require_json("kms check shift")?;
    let params = state(&args.state, file)?;
    let (a, interaction) = terms(&args.term, file)?;
    let h = VanHoveProfile::new(pick(args.index, &file.index).unwrap_or(2))?;
    let base = pick(args.base_time, &file.base_time).unwrap_or(-1.5 * DEFAULT_EPSILON);
    let shifts = pick(args.shifts.clone(), &file.shifts).unwrap_or_else(|| vec![-0.3, -0.15, 0.0]);
    let tolerance = ctx.tolerance.unwrap_or(DEFAULT_SHIFT_TOLERANCE);
    let report =
        t_shift_invariance(&a, &interaction, &h, &params, base, &shifts, tolerance, &NumericsConfig::default())?;
    ctx.emit(&ctx.json("kms check shift", &report)?)?;
    Ok((!report.passed).then(|| {
        format!("shift spread {:.3e} exceeds tolerance {:.1e}", report.max_relative_spread, report.tolerance)
    }))
}

fn reorder(args: &StateArgs, file: &ConfigFile, ctx: &Context) -> Result<Option<String>, CliError> {
    ctx.require_json("kms check reorder")?;
    let params = state(args, file)?;
    let tolerance = ctx.tolerance.unwrap_or(DEFAULT_REORDER_TOLERANCE);
    let report = wick_reordering_check(&params, tolerance)?;
    ctx.emit(&ctx.json("kms check reorder", &report)?)?;
    Ok((!report.passed).then(|| {
        format!("reordering gap {:.3e} exceeds tolerance {:.1e}", report.consistency_gap, report.tolerance)
    }))
}
