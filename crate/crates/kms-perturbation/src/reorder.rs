use crate::KmsError;
use num_complex::Complex64;
use propagators::quad::{exponential_tail_cutoff, integrate_real, uniform_breakpoints};
use propagators::{kms_two_point, ComplexTimeDisplacement, Estimate, FieldParams, QuadratureConfig};
use serde::Serialize;
use std::f64::consts::PI;
use wick_algebra::{full_with_self_contractions, ContractionTable};

/// The commonly quoted closed form `c(β) = 1/(12π²β²)` at `m = 0`, kept for
/// comparison; the integral itself gives `1/(12β²)`.
pub const PRINTED_THERMAL_MASS_FACTOR: f64 = 1.0 / (12.0 * PI * PI);

/// `c(β) = (D^β − D^vac)(0) = ∫ d³p/(2π)³ 1/(ω_p (e^{βω_p} − 1))`.
pub fn thermal_mass(params: &FieldParams, cfg: &QuadratureConfig) -> Result<Estimate<f64>, KmsError> {
    params.validate()?;
    if params.is_vacuum() {
        return Err(KmsError::Invalid("the thermal mass needs a finite beta".into()));
    }
    let (m, beta) = (params.mass, params.beta);
    let cut = exponential_tail_cutoff(beta, 1, cfg.abs_tol.max(1e-300) * 2.0 * PI * PI);
    let bp = uniform_breakpoints(0.0, cut, 2.0 / beta);
    let f = |p: f64| {
        let w = (p * p + m * m).sqrt();
        p * p / (w * (beta * w).exp_m1()) / (2.0 * PI * PI)
    };
    Ok(integrate_real(f, &bp, cfg)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReorderingReport {
    pub beta: f64,
    pub mass: f64,
    pub c: f64,
    /// Coefficient of `:φ²:_β` in `:φ⁴:_vac`.
    pub q2: f64,
    /// Constant term of `:φ⁴:_vac`.
    pub q0: f64,
    pub q2_over_c: f64,
    pub q0_over_c2: f64,
    /// The quoted constant term `6c(β)`, for comparison with `q0`.
    pub printed_constant_term: f64,
    /// Largest relative mismatch between the two pipelines over the
    /// sampled separations.
    pub consistency_gap: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// `D^β(−iu, r)`, in closed form at `m = 0`.
fn euclidean_two_point(u: f64, r: f64, params: &FieldParams) -> Result<Complex64, KmsError> {
    if params.mass > 0.0 {
        return Ok(kms_two_point(&ComplexTimeDisplacement::imaginary(u, r), params)?);
    }
    let beta = params.beta;
    let k = 2.0 * PI / beta;
    let v = if r == 0.0 {
        1.0 / (2.0 * beta * beta * (1.0 - (k * u).cos()))
    } else {
        (k * r).sinh() / (4.0 * PI * beta * r * ((k * r).cosh() - (k * u).cos()))
    };
    Ok(Complex64::new(v, 0.0))
}

/// Matches `:φ⁴:_vac = :φ⁴:_β + q₂ :φ²:_β + q₀` against thermal expectation
/// values of vacuum-ordered products, each vacuum self-line contributing
/// `c(β)`.
pub fn wick_reordering_check(params: &FieldParams, tolerance: f64) -> Result<ReorderingReport, KmsError> {
    let c = thermal_mass(params, &QuadratureConfig::default())?.value;
    let beta = params.beta;
    let pair = |d: Complex64| ContractionTable::from_fn(2, |_, _| d);
    let q0 = full_with_self_contractions(&[4], &ContractionTable::zeros(1), &[c]).re;
    let mut q2 = f64::NAN;
    let mut gap: f64 = 0.0;
    for (uf, r) in [(0.5, 0.0), (0.3, 0.5), (0.1, 1.0), (0.5, 2.0)] {
        let d = euclidean_two_point(uf * beta, r, params)?;
        let mixed = full_with_self_contractions(&[4, 2], &pair(d), &[c, 0.0]);
        let q2_here = (mixed / (d * d * 2.0)).re;
        let direct = full_with_self_contractions(&[4, 4], &pair(d), &[c, c]);
        let reordered = d.powu(4) * 24.0 + d * d * (2.0 * q2_here * q2_here) + q0 * q0;
        gap = gap.max((direct - reordered).norm() / direct.norm());
        if q2.is_nan() {
            q2 = q2_here;
        } else {
            gap = gap.max((q2_here - q2).abs() / q2.abs().max(f64::MIN_POSITIVE));
        }
    }
    let (q2_over_c, q0_over_c2) = if c > 0.0 { (q2 / c, q0 / (c * c)) } else { (f64::NAN, f64::NAN) };
    Ok(ReorderingReport {
        beta,
        mass: params.mass,
        c,
        q2,
        q0,
        q2_over_c,
        q0_over_c2,
        printed_constant_term: 6.0 * c,
        consistency_gap: gap,
        tolerance,
        passed: gap <= tolerance,
    })
}
