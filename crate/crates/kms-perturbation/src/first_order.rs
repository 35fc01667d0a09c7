use crate::numerics::{tolerance, try_integrate, two_point, ConnectedGraphs};
use crate::{
    require_at_origin, Correction, InteractionSpec, KmsError, NumericsConfig, SmearingMode, TimeSmearing,
    VanHoveProfile,
};
use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use propagators::{bessel_k1_real, thermal_images_with, vac_two_point_at, Estimate, FieldParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use wick_algebra::WickMonomial;

const TIME_NODES: usize = 16;
const TIME_PANELS: usize = 2;

/// How the insertion time is weighted.
#[derive(Debug, Clone, Copy)]
enum TimeWeight {
    Smeared(TimeSmearing),
    Sharp(f64),
}

impl TimeWeight {
    /// Insertion times with their weights; a smeared weight uses
    /// Gauss-Legendre panels over the support.
    fn nodes(&self) -> Vec<(f64, f64)> {
        match self {
            TimeWeight::Sharp(t) => vec![(*t, 1.0)],
            TimeWeight::Smeared(s) if s.mode == SmearingMode::Delta => vec![(s.delta_time(), 1.0)],
            TimeWeight::Smeared(s) => {
                let (lo, hi) = s.support();
                let gl = GaussLegendre::new(TIME_NODES.try_into().expect("nonzero degree"));
                let width = (hi - lo) / TIME_PANELS as f64;
                (0..TIME_PANELS)
                    .flat_map(|k| {
                        let a = lo + k as f64 * width;
                        gl.iter()
                            .map(|(x, w)| {
                                let t = a + 0.5 * width * (x + 1.0);
                                (t, 0.5 * width * w * s.density(t))
                            })
                            .collect::<Vec<_>>()
                    })
                    .collect()
            }
        }
    }

    fn reference(&self) -> f64 {
        match self {
            TimeWeight::Smeared(s) => s.delta_time(),
            TimeWeight::Sharp(t) => *t,
        }
    }

    fn max_abs_time(&self) -> f64 {
        match self {
            TimeWeight::Smeared(s) => 2.0 * s.epsilon,
            TimeWeight::Sharp(t) => t.abs(),
        }
    }
}

/// The two halves of the imaginary-time interval: `u ∈ [0, U]` with the
/// insertion at `t + iu`, and the folded half seen from the other side of
/// the KMS strip, where the line carries time `+t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Branch {
    Direct,
    Folded,
}

impl Branch {
    const BOTH: [Branch; 2] = [Branch::Direct, Branch::Folded];

    fn line_time(self, t: f64) -> f64 {
        match self {
            Branch::Direct => -t,
            Branch::Folded => t,
        }
    }
}

/// Radial segment integrals `∫ r² G(r) dr`, from which every van Hove
/// profile value is assembled without re-evaluating shared segments.
struct Shells {
    near: Estimate<Complex64>,
    plain: Vec<Estimate<Complex64>>,
    ramp: Vec<Estimate<Complex64>>,
    tail: f64,
}

impl Shells {
    fn total(&self, index: u32) -> (Complex64, f64) {
        let n = index as usize;
        let mut v = self.near.value + self.ramp[n].value;
        let mut e = self.near.error + self.ramp[n].error + self.tail;
        for k in 1..n {
            v += self.plain[k].value;
            e += self.plain[k].error;
        }
        (v * (4.0 * PI), e * 4.0 * PI)
    }
}

struct FirstOrder<'a> {
    graphs: ConnectedGraphs,
    params: &'a FieldParams,
    cfg: &'a NumericsConfig,
    u_max: f64,
    amplitude: f64,
    tail: f64,
}

impl<'a> FirstOrder<'a> {
    fn new(
        a: &WickMonomial,
        interaction: &InteractionSpec,
        params: &'a FieldParams,
        cfg: &'a NumericsConfig,
        max_time: f64,
        volume: f64,
    ) -> Result<Self, KmsError> {
        cfg.validate()?;
        params.require_massive()?;
        require_at_origin(a)?;
        let graphs = ConnectedGraphs::new(&[a.power, interaction.power]);
        let (u_max, amplitude, tail) = if params.is_vacuum() {
            let tail_at = |u: f64| vacuum_tail(&graphs, params.mass, u, max_time, volume);
            let mut u = 1.0f64.max(2.0 * max_time);
            while tail_at(u) > cfg.vacuum_tail_tol {
                u *= 1.25;
            }
            (u, cfg.contour_amplitude, tail_at(u))
        } else {
            (params.beta / 2.0, cfg.contour_amplitude.min(params.beta / 5.0), 0.0)
        };
        Ok(Self { graphs, params, cfg, u_max, amplitude, tail })
    }

    fn integrand(&self, time: f64, u: f64, r: Complex64) -> Result<Complex64, KmsError> {
        let d = two_point(time, u, r, self.params, self.cfg.series_tol)?;
        Ok(self.graphs.evaluate(|_, _| d))
    }

    fn u_breakpoints(&self) -> Vec<f64> {
        let mut bp = vec![0.0];
        bp.extend((0..5).rev().map(|k| self.u_max / 2f64.powi(k)));
        bp
    }

    /// `∫₀^U du Σ_j w_j ω^c(t_j − iu, r)` on one branch.
    fn slice(&self, branch: Branch, nodes: &[(f64, f64)], r: Complex64) -> Result<Complex64, KmsError> {
        let f = |u: f64| -> Result<Complex64, KmsError> {
            let mut sum = Complex64::new(0.0, 0.0);
            for &(t, w) in nodes {
                sum += self.integrand(branch.line_time(t), u, r)? * w;
            }
            Ok(sum)
        };
        let est = try_integrate(f, &self.u_breakpoints(), &tolerance(self.cfg.rel_tol * 1e-2))?;
        Ok(est.value)
    }

    /// `r(τ) = τ + iσa·4(τ/R)(1 − τ/R)` with its derivative.
    fn contour(&self, sigma: f64, tau: f64) -> (Complex64, Complex64) {
        let big_r = self.cfg.contour_radius;
        let a = sigma * self.amplitude;
        let x = tau / big_r;
        (Complex64::new(tau, 4.0 * a * x * (1.0 - x)), Complex64::new(1.0, 4.0 * a * (1.0 - 2.0 * x) / big_r))
    }

    fn shells(&self, weight: &TimeWeight, max_index: u32) -> Result<Shells, KmsError> {
        let big_r = self.cfg.contour_radius;
        if weight.reference() == 0.0 {
            return Err(KmsError::Invalid("an insertion at t = 0 coincides with the observable".into()));
        }
        if !(weight.max_abs_time() <= 0.8 * big_r) || big_r > 1.0 {
            return Err(KmsError::Invalid(format!(
                "insertion times up to {} need a contour radius in [{}, 1]",
                weight.max_abs_time(),
                weight.max_abs_time() / 0.8
            )));
        }
        let cfg = tolerance(self.cfg.rel_tol);
        let nodes = weight.nodes();
        let mut near = Estimate { value: Complex64::new(0.0, 0.0), error: 0.0, evaluations: 0 };
        for branch in Branch::BOTH {
            let sigma = branch.line_time(weight.reference()).signum();
            let g = |tau: f64| -> Result<Complex64, KmsError> {
                let (r, dr) = self.contour(sigma, tau);
                Ok(r * r * dr * self.slice(branch, &nodes, r)?)
            };
            let est = try_integrate(g, &[0.0, 0.25 * big_r, 0.5 * big_r, big_r], &cfg)?;
            near.value += est.value;
            near.error += est.error;
            near.evaluations += est.evaluations;
        }
        let memo: RefCell<HashMap<u64, Complex64>> = RefCell::new(HashMap::new());
        let real_g = |r: f64| -> Result<Complex64, KmsError> {
            if let Some(v) = memo.borrow().get(&r.to_bits()) {
                return Ok(*v);
            }
            let rc = Complex64::new(r, 0.0);
            let v = self.slice(Branch::Direct, &nodes, rc)? + self.slice(Branch::Folded, &nodes, rc)?;
            memo.borrow_mut().insert(r.to_bits(), v);
            Ok(v)
        };
        if big_r < 1.0 {
            let est = try_integrate(|r| Ok(real_g(r)? * r * r), &[big_r, 1.0], &cfg)?;
            near.value += est.value;
            near.error += est.error;
        }
        let zero = Estimate { value: Complex64::new(0.0, 0.0), error: 0.0, evaluations: 0 };
        let mut plain = vec![zero; max_index as usize + 1];
        let mut ramp = vec![zero; max_index as usize + 1];
        for k in 1..=max_index as usize {
            let (lo, hi) = (k as f64, k as f64 + 1.0);
            if k < max_index as usize {
                plain[k] = try_integrate(|r| Ok(real_g(r)? * r * r), &[lo, hi], &cfg)?;
            }
            ramp[k] = try_integrate(|r| Ok(real_g(r)? * r * r * (hi - r)), &[lo, hi], &cfg)?;
        }
        Ok(Shells { near, plain, ramp, tail: self.tail })
    }
}

/// Bound on `∫_U^∞ du ∫d³x h |ω^c|` for both vacuum branches, using
/// `|D(t − iu, r)| ≤ D(−i√(u² − t²), 0)`.
fn vacuum_tail(graphs: &ConnectedGraphs, m: f64, u: f64, max_time: f64, volume: f64) -> f64 {
    let sigma = (u * u - max_time * max_time).max(1e-300).sqrt();
    let d = m * bessel_k1_real(m * sigma) / (4.0 * PI * PI * sigma);
    graphs
        .graphs
        .iter()
        .map(|(g, c)| {
            let l = g.line_count() as i32;
            2.0 * c * volume * d.powi(l) / (l as f64 * m)
        })
        .sum()
}

fn max_time(smearing: &TimeSmearing) -> f64 {
    2.0 * smearing.epsilon
}

/// `−∫₀^β du ∫d³x h(x) ∫dt χ̇⁻(t) ω^c(A ⊗ α_{t+iu,x}(:φ^k:))` for every
/// van Hove index in `indices`, sharing all radial segments.
pub fn first_order_sequence(
    a: &WickMonomial,
    interaction: &InteractionSpec,
    smearing: &TimeSmearing,
    indices: &[u32],
    params: &FieldParams,
    cfg: &NumericsConfig,
) -> Result<Vec<Correction>, KmsError> {
    let profiles: Vec<VanHoveProfile> = indices.iter().map(|&n| VanHoveProfile::new(n)).collect::<Result<_, _>>()?;
    let Some(max_index) = indices.iter().copied().max() else {
        return Ok(Vec::new());
    };
    let volume = VanHoveProfile::new(max_index)?.volume();
    let fo = FirstOrder::new(a, interaction, params, cfg, max_time(smearing), volume)?;
    let headers = profiles.iter().map(|h| Correction::header(a, interaction, 1, smearing, h, params));
    if fo.graphs.is_empty() {
        let note = format!("no connected graph joins degrees ({}, {})", a.power, interaction.power);
        return Ok(headers.map(|c| Correction { diagnostic: Some(note.clone()), ..c }).collect());
    }
    let shells = fo.shells(&TimeWeight::Smeared(*smearing), max_index)?;
    Ok(headers
        .zip(&profiles)
        .map(|(c, h)| {
            let (v, e) = shells.total(h.index);
            Correction { value: -v.re, imaginary_part: -v.im, error: e, ..c }
        })
        .collect())
}

pub fn first_order_correction(
    a: &WickMonomial,
    interaction: &InteractionSpec,
    smearing: &TimeSmearing,
    h: &VanHoveProfile,
    params: &FieldParams,
    cfg: &NumericsConfig,
) -> Result<Correction, KmsError> {
    let mut v = first_order_sequence(a, interaction, smearing, &[h.index], params, cfg)?;
    Ok(v.remove(0))
}

/// `T(t) = ∫₀^β du ∫d³x h(x) ω^c(A ⊗ α_{t+iu,x}(:φ^k:))` with its error.
pub fn shift_integral(
    a: &WickMonomial,
    interaction: &InteractionSpec,
    h: &VanHoveProfile,
    params: &FieldParams,
    t: f64,
    cfg: &NumericsConfig,
) -> Result<(Complex64, f64), KmsError> {
    let fo = FirstOrder::new(a, interaction, params, cfg, t.abs(), h.volume())?;
    if fo.graphs.is_empty() {
        return Ok((Complex64::new(0.0, 0.0), 0.0));
    }
    Ok(fo.shells(&TimeWeight::Sharp(t), h.index)?.total(h.index))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftReport {
    pub base_time: f64,
    pub shifts: Vec<f64>,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub max_relative_spread: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Evaluates `T(base_time + s)` for every shift `s` and compares the spread
/// with `tolerance`.
#[allow(clippy::too_many_arguments)]
pub fn t_shift_invariance(
    a: &WickMonomial,
    interaction: &InteractionSpec,
    h: &VanHoveProfile,
    params: &FieldParams,
    base_time: f64,
    shifts: &[f64],
    tolerance: f64,
    cfg: &NumericsConfig,
) -> Result<ShiftReport, KmsError> {
    if params.is_vacuum() {
        return Err(KmsError::Invalid("shift invariance is checked in thermal states".into()));
    }
    if shifts.is_empty() {
        return Err(KmsError::Invalid("no shifts given".into()));
    }
    let mut values = Vec::new();
    let mut errors = Vec::new();
    for s in shifts {
        let (v, e) = shift_integral(a, interaction, h, params, base_time + s, cfg)?;
        values.push(v.re);
        errors.push(e);
    }
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let scale = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let spread = if scale > 0.0 { (hi - lo) / scale } else { 0.0 };
    Ok(ShiftReport {
        base_time,
        shifts: shifts.to_vec(),
        values,
        errors,
        max_relative_spread: spread,
        tolerance,
        passed: spread < tolerance,
    })
}

const MC_PEAK_WIDTH: f64 = 0.05;

/// Sampling density concentrated near the light cone `u = 0`, `τ = |t|`:
/// a truncated Cauchy law in `τ` times `∝ (u + w)⁻²` in `u`.
struct LightConePeak {
    centre: f64,
    width: f64,
    outer: f64,
    u_max: f64,
}

impl LightConePeak {
    fn angles(&self) -> (f64, f64) {
        let a0 = (-self.centre / self.width).atan();
        (a0, ((self.outer - self.centre) / self.width).atan() - a0)
    }

    fn u_norm(&self) -> f64 {
        1.0 / self.width - 1.0 / (self.u_max + self.width)
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> (f64, f64) {
        let (a0, span) = self.angles();
        let tau = self.centre + self.width * (a0 + span * rng.gen::<f64>()).tan();
        let u = 1.0 / (1.0 / self.width - self.u_norm() * rng.gen::<f64>()) - self.width;
        (u.clamp(0.0, self.u_max), tau.clamp(0.0, self.outer))
    }

    fn density(&self, u: f64, tau: f64) -> f64 {
        let (_, span) = self.angles();
        let z = (tau - self.centre) / self.width;
        let p_tau = 1.0 / (self.width * span * (1.0 + z * z));
        let p_u = 1.0 / (self.u_norm() * (u + self.width).powi(2));
        p_tau * p_u
    }
}

/// Importance-sampled Monte Carlo estimate of a first-order correction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloCheck {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    /// `|quadrature − mean| / std_error`.
    pub deviation: f64,
    pub consistent: bool,
}

/// Samples `(t, u, τ)` from an even mixture of the uniform law and a light
/// cone peak, on a radial contour of half the quadrature's amplitude, with
/// the image sum for every propagator.
pub fn monte_carlo_first_order(
    a: &WickMonomial,
    interaction: &InteractionSpec,
    smearing: &TimeSmearing,
    h: &VanHoveProfile,
    params: &FieldParams,
    cfg: &NumericsConfig,
    quadrature_value: f64,
) -> Result<MonteCarloCheck, KmsError> {
    let fo = FirstOrder::new(a, interaction, params, cfg, max_time(smearing), h.volume())?;
    let (lo, _) = smearing.support();
    let big_r = cfg.contour_radius;
    let outer = h.outer_radius();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.monte_carlo_samples;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..n {
        let (t, wt) = match smearing.mode {
            SmearingMode::Delta => (smearing.delta_time(), 1.0),
            SmearingMode::Full => {
                let t = lo + smearing.epsilon * rng.gen::<f64>();
                (t, smearing.density(t) * smearing.epsilon)
            }
        };
        let peak = LightConePeak { centre: t.abs(), width: MC_PEAK_WIDTH, outer, u_max: fo.u_max };
        let (u, tau) = if rng.gen::<bool>() {
            (fo.u_max * rng.gen::<f64>(), outer * rng.gen::<f64>())
        } else {
            peak.sample(&mut rng)
        };
        let density = 0.5 / (fo.u_max * outer) + 0.5 * peak.density(u, tau);
        let mut x = Complex64::new(0.0, 0.0);
        for branch in Branch::BOTH {
            let time = branch.line_time(t);
            let (r, dr) = if tau < big_r {
                let sigma = time.signum() * 0.5;
                fo.contour(sigma, tau)
            } else {
                (Complex64::new(tau, 0.0), Complex64::new(1.0, 0.0))
            };
            let d = if params.is_vacuum() {
                vac_two_point_at(time, u, r, params.mass)
            } else {
                thermal_images_with(time, u, r, params, 1e-12)?
            };
            x += fo.graphs.evaluate(|_, _| d) * r * r * dr * h.value(tau);
        }
        let sample = -4.0 * PI * x.re * wt / density;
        sum += sample;
        sum_sq += sample * sample;
    }
    let mean = sum / n as f64;
    let var = (sum_sq / n as f64 - mean * mean).max(0.0) * n as f64 / (n as f64 - 1.0);
    let std_error = (var / n as f64).sqrt();
    let deviation = (quadrature_value - mean).abs() / std_error.max(f64::MIN_POSITIVE);
    Ok(MonteCarloCheck { mean, std_error, samples: n, deviation, consistent: deviation <= 5.0 })
}
