use crate::numerics::{two_point, ConnectedGraphs};
use crate::{
    require_at_origin, Correction, InteractionSpec, KmsError, NumericsConfig, SimplexDomain, SmearingMode,
    TimeSmearing, VanHoveProfile,
};
use num_complex::Complex64;
use propagators::FieldParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;
use wick_algebra::WickMonomial;

const HALTON_BASES: [u32; 7] = [2, 3, 5, 7, 11, 13, 17];

/// Amplitude of the deformation of the relative angle cosine.
const ANGLE_AMPLITUDE: f64 = 0.5;

/// Real configuration of the two insertions: `x₁ = r₁ ẑ` and `x₂` at
/// polar angle `acos(cos_angle)` from `ẑ` in the `xz`-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecondOrderPoint {
    pub t: [f64; 2],
    pub u: [f64; 2],
    pub r: [f64; 2],
    pub cos_angle: f64,
}

impl SecondOrderPoint {
    pub fn positions(&self) -> [[f64; 3]; 2] {
        let c = self.cos_angle.clamp(-1.0, 1.0);
        let s = (1.0 - c * c).sqrt();
        [[0.0, 0.0, self.r[0]], [self.r[1] * s, 0.0, self.r[1] * c]]
    }

    /// `A`, `α_{z₁,x₁}(:φ^k:)`, `α_{z₂,x₂}(:φ^k:)` in operator order; `A = 𝟙`
    /// is dropped.
    pub fn monomials(&self, a: &WickMonomial, interaction: &InteractionSpec) -> Vec<WickMonomial> {
        let x = self.positions();
        let mut out = Vec::new();
        if a.power > 0 {
            out.push(*a);
        }
        for i in 0..2 {
            out.push(WickMonomial::new(a.label + 1 + i, interaction.power, self.t[i], self.u[i], x[i]));
        }
        out
    }
}

/// Line `(1, 2)` folded into `v ≤ β/2`: `D^β(T, v) = D^β(−T, β − v)`.
fn folded(time: f64, v: f64, params: &FieldParams) -> (f64, f64) {
    if !params.is_vacuum() && v > params.beta / 2.0 {
        (-time, params.beta - v)
    } else {
        (time, v)
    }
}

struct SecondOrder<'a> {
    graphs: ConnectedGraphs,
    observable: bool,
    params: &'a FieldParams,
    tol: f64,
}

impl SecondOrder<'_> {
    /// Graph sum with the relative radius `ρ² = r₁² + r₂² − 2r₁r₂c` taken at
    /// a possibly complex `c`.
    fn evaluate(&self, p: &SecondOrderPoint, c: Complex64) -> Result<Complex64, KmsError> {
        let rho = (c * (-2.0 * p.r[0] * p.r[1]) + p.r[0] * p.r[0] + p.r[1] * p.r[1]).sqrt();
        let (time, v) = folded(p.t[0] - p.t[1], p.u[1] - p.u[0], self.params);
        let d12 = two_point(time, v, rho, self.params, self.tol)?;
        if !self.observable {
            return Ok(self.graphs.evaluate(|_, _| d12));
        }
        let d01 = two_point(-p.t[0], p.u[0], Complex64::new(p.r[0], 0.0), self.params, self.tol)?;
        let d02 = two_point(-p.t[1], p.u[1], Complex64::new(p.r[1], 0.0), self.params, self.tol)?;
        Ok(self.graphs.evaluate(|i, j| match (i, j) {
            (0, 1) => d01,
            (0, 2) => d02,
            _ => d12,
        }))
    }
}

/// `ω^c(A ⊗ α_{t₁+iu₁,x₁}(:φ^k:) ⊗ α_{t₂+iu₂,x₂}(:φ^k:))` at a real point.
pub fn second_order_integrand(
    a: &WickMonomial,
    interaction: &InteractionSpec,
    params: &FieldParams,
    point: &SecondOrderPoint,
) -> Result<Complex64, KmsError> {
    require_at_origin(a)?;
    let so = build(a, interaction, params, 1e-15)?;
    if so.graphs.is_empty() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if !(point.u[0] >= 0.0 && point.u[0] <= point.u[1]) || (!params.is_vacuum() && !(point.u[1] < params.beta)) {
        return Err(KmsError::Invalid(format!("imaginary times {:?} leave the simplex", point.u)));
    }
    so.evaluate(point, Complex64::new(point.cos_angle, 0.0))
}

fn build<'a>(
    a: &WickMonomial,
    interaction: &InteractionSpec,
    params: &'a FieldParams,
    tol: f64,
) -> Result<SecondOrder<'a>, KmsError> {
    params.require_massive()?;
    let observable = a.power > 0;
    let powers: Vec<u32> =
        if observable { vec![a.power, interaction.power, interaction.power] } else { vec![interaction.power; 2] };
    Ok(SecondOrder { graphs: ConnectedGraphs::new(&powers), observable, params, tol })
}

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as f64;
    let mut inv = 1.0 / b;
    let mut x = 0.0;
    while i > 0 {
        x += (i % base as u64) as f64 * inv;
        i /= base as u64;
        inv /= b;
    }
    x
}

/// `∫_{β𝒮₂} du ∫d³x₁d³x₂ h h ∫dt₁dt₂ χ̇⁻χ̇⁻ ω^c(A ⊗ α(:φ^k:) ⊗ α(:φ^k:))` by
/// randomly shifted Halton points over the seven variables left after the
/// rotation reduction. The relative angle cosine runs on a complex contour
/// that avoids the light-cone singularity of the line between the
/// insertions. The error bar is the spread over shifts; the result is never
/// certified.
pub fn second_order_correction(
    a: &WickMonomial,
    interaction: &InteractionSpec,
    smearing: &TimeSmearing,
    h: &VanHoveProfile,
    params: &FieldParams,
    cfg: &NumericsConfig,
) -> Result<Correction, KmsError> {
    cfg.validate()?;
    require_at_origin(a)?;
    if params.is_vacuum() {
        return Err(KmsError::Invalid("the second-order term is implemented for thermal states".into()));
    }
    if smearing.mode == SmearingMode::Delta {
        return Err(KmsError::Invalid("the second-order term diverges without time smearing".into()));
    }
    let so = build(a, interaction, params, cfg.series_tol)?;
    let mut out = Correction::header(a, interaction, 2, smearing, h, params);
    out.certified = false;
    if so.graphs.is_empty() {
        out.diagnostic = Some(format!("no connected graph joins degrees ({}, {k}, {k})", a.power, k = interaction.power));
        return Ok(out);
    }
    let simplex = SimplexDomain::new(2, params.beta)?;
    let (lo, _) = smearing.support();
    let eps = smearing.epsilon;
    let outer = h.outer_radius();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut estimates = Vec::with_capacity(cfg.qmc_shifts);
    for _ in 0..cfg.qmc_shifts {
        let shift: [f64; 7] = std::array::from_fn(|_| rng.gen::<f64>());
        let mut sum = Complex64::new(0.0, 0.0);
        for i in 1..=cfg.qmc_points as u64 {
            let w: [f64; 7] = std::array::from_fn(|d| (radical_inverse(i, HALTON_BASES[d]) + shift[d]).fract());
            let t = [lo + eps * w[0], lo + eps * w[1]];
            let u = simplex.from_cube(&w[2..4]);
            let r = [outer * w[4], outer * w[5]];
            let s = 2.0 * w[6] - 1.0;
            let (time, _) = folded(t[0] - t[1], u[1] - u[0], params);
            let sigma = time.signum() * ANGLE_AMPLITUDE;
            let c = Complex64::new(s, -sigma * (1.0 - s * s));
            let dc = Complex64::new(1.0, 2.0 * sigma * s);
            let p = SecondOrderPoint { t, u: [u[0], u[1]], r, cos_angle: s };
            let weight = smearing.density(t[0]) * smearing.density(t[1])
                * (4.0 * PI * r[0] * r[0] * h.value(r[0]))
                * (2.0 * PI * r[1] * r[1] * h.value(r[1]));
            if weight == 0.0 {
                continue;
            }
            sum += so.evaluate(&p, c)? * dc * weight;
        }
        let volume = eps * eps * simplex.volume() * outer * outer * 2.0;
        estimates.push(sum * (volume / cfg.qmc_points as f64));
    }
    let n = estimates.len() as f64;
    let mean: Complex64 = estimates.iter().sum::<Complex64>() / n;
    let var = estimates.iter().map(|e| (e - mean).norm_sqr()).sum::<f64>() / (n - 1.0);
    out.value = mean.re;
    out.imaginary_part = mean.im;
    out.error = (var / n).sqrt();
    out.diagnostic = Some(format!("{} shifts x {} Halton points", cfg.qmc_shifts, cfg.qmc_points));
    Ok(out)
}
