use crate::bessel::bessel_k1;
use crate::quad::{exponential_tail_cutoff, integrate, uniform_breakpoints, Estimate, QuadratureConfig};
use crate::{ComplexTimeDisplacement, FieldParams, PropagatorError};
use num_complex::Complex64;
use std::f64::consts::PI;

const FOUR_PI_SQ: f64 = 4.0 * PI * PI;

pub fn dispersion(p: [f64; 3], params: &FieldParams) -> f64 {
    (p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + params.mass * params.mass).sqrt()
}

fn omega(p: f64, m: f64) -> f64 {
    (p * p + m * m).sqrt()
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Closed-form vacuum function `m K₁(m s) / (4π² s)` with
/// `s² = r² + (u + it)²`, accepting a complex radius for contour deformation.
///
/// At `u = 0` a negative `s²` is resolved by the `u → 0⁺` limit.
pub fn vac_two_point_at(t: f64, u: f64, r: Complex64, m: f64) -> Complex64 {
    let tau = Complex64::new(u, t);
    let s2 = r * r + tau * tau;
    let s = if u == 0.0 && s2.im == 0.0 && s2.re < 0.0 {
        Complex64::new(0.0, t.signum() * (-s2.re).sqrt())
    } else {
        s2.sqrt()
    };
    if m == 0.0 {
        return (s2 * FOUR_PI_SQ).inv();
    }
    bessel_k1(s * m) * m / (s * FOUR_PI_SQ)
}

fn check_vacuum_displacement(d: &ComplexTimeDisplacement) -> Result<(), PropagatorError> {
    if !(d.u >= 0.0) || !d.t.is_finite() || !(d.r >= 0.0) || !d.r.is_finite() {
        return Err(PropagatorError::Domain(format!("inadmissible displacement {d:?}")));
    }
    if d.u == 0.0 && (d.r == 0.0 || d.r == d.t.abs()) {
        return Err(PropagatorError::Domain(format!("displacement {d:?} lies on the light cone")));
    }
    Ok(())
}

/// Vacuum two-point function at `t − iu`, radius `r`.
pub fn vac_two_point(d: &ComplexTimeDisplacement, params: &FieldParams) -> Result<Complex64, PropagatorError> {
    params.require_massive()?;
    check_vacuum_displacement(d)?;
    Ok(vac_two_point_at(d.t, d.u, Complex64::new(d.r, 0.0), params.mass))
}

fn panel_width(d: &ComplexTimeDisplacement, scale: f64) -> f64 {
    let osc = d.r.max(d.t.abs());
    let mut w = 2.0f64.min(scale);
    if osc > 0.0 {
        w = w.min(PI / osc);
    }
    w
}

/// Radial momentum quadrature of the vacuum function, the oracle for the
/// closed form.
pub fn vac_two_point_quadrature(
    d: &ComplexTimeDisplacement,
    params: &FieldParams,
    cfg: &QuadratureConfig,
) -> Result<Estimate<Complex64>, PropagatorError> {
    params.validate()?;
    if !(d.u > 0.0) {
        return Err(PropagatorError::Domain("quadrature needs u > 0".into()));
    }
    let m = params.mass;
    let tau = Complex64::new(d.u, d.t);
    let cut = exponential_tail_cutoff(d.u, 1, cfg.abs_tol * FOUR_PI_SQ * 0.1);
    let bp = uniform_breakpoints(0.0, cut, panel_width(d, 4.0 / d.u));
    let f = |p: f64| {
        let w = omega(p, m);
        (-tau * w).exp() * (p * p * sinc(p * d.r) / (w * FOUR_PI_SQ))
    };
    integrate(f, &bp, cfg)
}

/// Bose part `D_th = D_+^β − D_+^vac` by radial quadrature; valid for `|u| < β`.
pub fn thermal_part(
    d: &ComplexTimeDisplacement,
    params: &FieldParams,
    cfg: &QuadratureConfig,
) -> Result<Estimate<Complex64>, PropagatorError> {
    params.validate()?;
    let beta = params.beta;
    if params.is_vacuum() {
        return Ok(Estimate { value: Complex64::new(0.0, 0.0), error: 0.0, evaluations: 0 });
    }
    if !(d.u.abs() < beta) {
        return Err(PropagatorError::Domain(format!("|u| = {} must be below beta = {beta}", d.u.abs())));
    }
    let m = params.mass;
    let rate = beta - d.u.abs();
    let cut = exponential_tail_cutoff(rate, 1, cfg.abs_tol * FOUR_PI_SQ * 0.1);
    let bp = uniform_breakpoints(0.0, cut, panel_width(d, (4.0 / beta).min(4.0 / rate)));
    let f = |p: f64| {
        let w = omega(p, m);
        let denom = -(-beta * w).exp_m1();
        let plus = Complex64::new(0.0, w * d.t).exp() * (-w * (beta - d.u)).exp();
        let minus = Complex64::new(0.0, -w * d.t).exp() * (-w * (beta + d.u)).exp();
        (plus + minus) * (p * p * sinc(p * d.r) / (FOUR_PI_SQ * w * denom))
    };
    integrate(f, &bp, cfg)
}

/// Thermal two-point function with the quadrature configuration exposed.
pub fn kms_two_point_with(
    d: &ComplexTimeDisplacement,
    params: &FieldParams,
    cfg: &QuadratureConfig,
) -> Result<Estimate<Complex64>, PropagatorError> {
    params.require_massive()?;
    if params.is_vacuum() {
        let v = vac_two_point(d, params)?;
        return Ok(Estimate { value: v, error: 0.0, evaluations: 0 });
    }
    if !(d.u > 0.0 && d.u < params.beta) {
        return Err(PropagatorError::Domain(format!("u = {} outside (0, beta = {})", d.u, params.beta)));
    }
    let vac = vac_two_point(d, params)?;
    let th = thermal_part(d, params, cfg)?;
    Ok(Estimate { value: vac + th.value, error: th.error, evaluations: th.evaluations })
}

/// `D_+^β` at `t − iu`: vacuum closed form plus quadrature of the Bose part.
pub fn kms_two_point(d: &ComplexTimeDisplacement, params: &FieldParams) -> Result<Complex64, PropagatorError> {
    kms_two_point_with(d, params, &QuadratureConfig::default()).map(|e| e.value)
}

/// Image sum over imaginary-time translates of the vacuum closed form,
/// `Σ_{k≥0} D^vac(t − i(u+kβ)) + Σ_{k≥1} D^vac(−t − i(kβ−u))`, for complex `r`.
pub fn thermal_images_at(t: f64, u: f64, r: Complex64, params: &FieldParams) -> Result<Complex64, PropagatorError> {
    thermal_images_with(t, u, r, params, 1e-17)
}

/// Image sum truncated once the next pair of images falls below `rel_tol`
/// relative to the partial sum.
pub fn thermal_images_with(
    t: f64,
    u: f64,
    r: Complex64,
    params: &FieldParams,
    rel_tol: f64,
) -> Result<Complex64, PropagatorError> {
    let m = params.mass;
    let beta = params.beta;
    let mut sum = vac_two_point_at(t, u, r, m);
    if params.is_vacuum() {
        return Ok(sum);
    }
    let q = (-m * beta).exp();
    for k in 1..200_000 {
        let kb = k as f64 * beta;
        let a = vac_two_point_at(t, u + kb, r, m);
        let b = vac_two_point_at(-t, kb - u, r, m);
        sum += a + b;
        if (a.norm() + b.norm()) < rel_tol * (1.0 - q) * sum.norm() {
            return Ok(sum);
        }
    }
    Err(PropagatorError::Quadrature { achieved: f64::NAN, requested: rel_tol })
}

/// Matsubara series `(4πβr)⁻¹ Σₙ e^{iωₙ(u+it)} e^{−Mₙ r}`, `Mₙ = √(ωₙ² + m²)`,
/// for complex `r` with `Re r > |t|`. Converges like `e^{−2π n (Re r − |t|)/β}`.
pub fn thermal_matsubara_at(
    t: f64,
    u: f64,
    r: Complex64,
    params: &FieldParams,
    rel_tol: f64,
) -> Result<Complex64, PropagatorError> {
    let beta = params.beta;
    if params.is_vacuum() || !(beta > 0.0) {
        return Err(PropagatorError::Domain("the Matsubara series needs a finite beta".into()));
    }
    let gap = r.re - t.abs();
    if !(gap > 0.0) {
        return Err(PropagatorError::Domain(format!("Matsubara series needs Re r > |t|, got r = {r}, t = {t}")));
    }
    let m = params.mass;
    let tau = Complex64::new(u, t);
    let mut sum = (-r * m).exp();
    let q = (-2.0 * PI * gap / beta).exp();
    for n in 1..1_000_000 {
        let w = 2.0 * PI * n as f64 / beta;
        let term = (tau * w).cos() * (-r * (w * w + m * m).sqrt()).exp() * 2.0;
        sum += term;
        if term.norm() < rel_tol * (1.0 - q) * sum.norm() {
            return Ok(sum / (r * 4.0 * PI * beta));
        }
    }
    Err(PropagatorError::Quadrature { achieved: f64::NAN, requested: rel_tol })
}

/// `D_+^β` via the image sum; an independent route to [`kms_two_point`].
pub fn kms_two_point_images(d: &ComplexTimeDisplacement, params: &FieldParams) -> Result<Complex64, PropagatorError> {
    params.require_massive()?;
    if params.is_vacuum() {
        return vac_two_point(d, params);
    }
    if !(d.u > 0.0 && d.u < params.beta) || !(d.r >= 0.0) {
        return Err(PropagatorError::Domain(format!("u = {} outside (0, beta = {})", d.u, params.beta)));
    }
    thermal_images_at(d.t, d.u, Complex64::new(d.r, 0.0), params)
}

/// How the thermal two-point function is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThermalRoute {
    /// Vacuum closed form plus radial quadrature of the Bose part.
    #[default]
    Quadrature,
    /// Imaginary-time image sum of vacuum closed forms.
    ImageSum,
}

/// State two-point function for `0 <= u < β`; `u = 0` is admitted off the
/// light cone through the boundary-value branch of the vacuum part.
pub fn state_two_point(
    d: &ComplexTimeDisplacement,
    params: &FieldParams,
    route: ThermalRoute,
) -> Result<Complex64, PropagatorError> {
    params.require_massive()?;
    check_vacuum_displacement(d)?;
    if params.is_vacuum() {
        return vac_two_point(d, params);
    }
    if !(d.u < params.beta) {
        return Err(PropagatorError::Domain(format!("u = {} outside [0, beta = {})", d.u, params.beta)));
    }
    match route {
        ThermalRoute::Quadrature => {
            let th = thermal_part(d, params, &QuadratureConfig::default())?;
            Ok(vac_two_point_at(d.t, d.u, Complex64::new(d.r, 0.0), params.mass) + th.value)
        }
        ThermalRoute::ImageSum => thermal_images_at(d.t, d.u, Complex64::new(d.r, 0.0), params),
    }
}

/// The two members of the KMS boundary identity for the two-point function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCheck {
    /// `D_+^β(t − iβ + iδ, r)` extrapolated to `δ → 0`.
    pub shifted: Complex64,
    /// `D_+^β(−t − i0, r)`.
    pub direct: Complex64,
    /// Extrapolation error estimate.
    pub achieved: f64,
}

impl BoundaryCheck {
    pub fn members(&self) -> (Complex64, Complex64) {
        (self.shifted, self.direct)
    }

    pub fn relative_gap(&self) -> f64 {
        (self.shifted - self.direct).norm() / self.direct.norm()
    }
}

fn neville_at_zero(xs: &[f64], ys: &[Complex64]) -> (Complex64, f64) {
    let n = xs.len();
    let mut p = ys.to_vec();
    let mut prev = p[0];
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (xs[i], xs[i + level]);
            p[i] = (p[i] * xj - p[i + 1] * xi) / (xj - xi);
        }
        if level == n - 2 {
            prev = p[0];
        }
    }
    (p[0], (p[0] - prev).norm())
}

const BOUNDARY_NODES: usize = 6;

/// Evaluates both sides of `ω(φ α_{t+iβ}(φ)) = ω(α_t(φ) φ)` at distance `r`.
pub fn kms_boundary_check(t: f64, r: f64, params: &FieldParams) -> Result<BoundaryCheck, PropagatorError> {
    params.require_massive()?;
    if params.is_vacuum() {
        return Err(PropagatorError::Domain("boundary check needs finite beta".into()));
    }
    let beta = params.beta;
    let cfg = QuadratureConfig::default();
    let h = beta / 200.0;
    let deltas: Vec<f64> = (1..=BOUNDARY_NODES).map(|k| k as f64 * h).collect();
    let mut shifted_vals = Vec::with_capacity(BOUNDARY_NODES);
    for &delta in &deltas {
        let d = ComplexTimeDisplacement::new(t, beta - delta, r);
        shifted_vals.push(kms_two_point_with(&d, params, &cfg)?.value);
    }
    let (shifted, err_shifted) = neville_at_zero(&deltas, &shifted_vals);

    let d0 = ComplexTimeDisplacement::new(-t, 0.0, r);
    let (direct, err_direct) = if check_vacuum_displacement(&d0).is_ok() {
        let vac = vac_two_point_at(-t, 0.0, Complex64::new(r, 0.0), params.mass);
        let th = thermal_part(&d0, params, &cfg)?;
        (vac + th.value, th.error)
    } else {
        let mut vals = Vec::with_capacity(BOUNDARY_NODES);
        for &delta in &deltas {
            let d = ComplexTimeDisplacement::new(-t, delta, r);
            vals.push(kms_two_point_with(&d, params, &cfg)?.value);
        }
        neville_at_zero(&deltas, &vals)
    };
    Ok(BoundaryCheck { shifted, direct, achieved: err_shifted + err_direct })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dispersion_examples() {
        assert_eq!(dispersion([0.0, 0.0, 0.0], &FieldParams::vacuum(1.0)), 1.0);
        assert_eq!(dispersion([3.0, 0.0, 0.0], &FieldParams::vacuum(4.0)), 5.0);
        assert_eq!(dispersion([0.0, 2.0, 0.0], &FieldParams::vacuum(0.0)), 2.0);
    }

    #[test]
    fn neville_recovers_polynomial() {
        let xs = [0.1, 0.2, 0.3, 0.4];
        let ys: Vec<Complex64> = xs.iter().map(|&x| Complex64::new(2.0 - x + 3.0 * x * x * x, x)).collect();
        let (v, _) = neville_at_zero(&xs, &ys);
        assert!((v - Complex64::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn timelike_boundary_value_takes_sign_of_time() {
        let up = vac_two_point_at(1.0, 0.0, Complex64::new(0.5, 0.0), 1.0);
        let near = vac_two_point_at(1.0, 1e-9, Complex64::new(0.5, 0.0), 1.0);
        assert!((up - near).norm() < 1e-6 * up.norm());
        let down = vac_two_point_at(-1.0, 0.0, Complex64::new(0.5, 0.0), 1.0);
        assert!((down - up.conj()).norm() < 1e-12 * up.norm());
    }
}
