use crate::{ClusterError, ScanSample};

/// Log-linear fit `|F| ≈ prefactor · e^{−rate · r_e}` on a window of `r_e`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub rate: f64,
    pub prefactor: f64,
    /// Root-mean-square residual of `log|F|`.
    pub residual: f64,
    pub window: (f64, f64),
    pub used: usize,
    pub dropped_below_noise: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub window: (f64, f64),
    pub noise_floor: f64,
    pub min_points: usize,
}

impl FitOptions {
    pub fn window(lo: f64, hi: f64) -> Self {
        Self { window: (lo, hi), noise_floor: 1e-250, min_points: 4 }
    }
}

/// Least-squares fit of `log|F|` against `r_e` over the samples inside the
/// window whose magnitude exceeds ten times the noise floor.
pub fn decay_fit(samples: &[ScanSample], opts: &FitOptions) -> Result<DecayFit, ClusterError> {
    let (lo, hi) = opts.window;
    let inside: Vec<&ScanSample> = samples.iter().filter(|s| s.r_e >= lo && s.r_e <= hi).collect();
    let pts: Vec<(f64, f64)> =
        inside.iter().filter(|s| s.value.norm() > 10.0 * opts.noise_floor).map(|s| (s.r_e, s.value.norm().ln())).collect();
    let dropped = inside.len() - pts.len();
    if pts.len() < opts.min_points {
        return Err(ClusterError::Fit(format!(
            "{} usable samples in window [{lo}, {hi}] ({dropped} below noise), need {}",
            pts.len(),
            opts.min_points
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    let used_lo = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let used_hi = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    Ok(DecayFit {
        rate: -slope,
        prefactor: intercept.exp(),
        residual,
        window: (used_lo, used_hi),
        used: pts.len(),
        dropped_below_noise: dropped,
    })
}

/// Result of checking `|F| ≤ c* e^{−rate · r_e}` on sampled points.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub rate: f64,
    pub c_star: f64,
    /// `|F| e^{rate · r_e}` per sample.
    pub constants: Vec<f64>,
    pub passed: bool,
    /// First sample where the running constant grows, with its `r_e`.
    pub violation: Option<(usize, f64)>,
}

/// The bound holds with a single finite constant if `c_k = |F_k| e^{rate r_k}`
/// peaks in the inner half of the samples and its sliding-window maxima
/// do not increase outward.
pub fn bound_check_samples(points: &[(f64, f64)], rate: f64) -> BoundReport {
    let constants: Vec<f64> = points.iter().map(|&(r, f)| f.abs() * (rate * r).exp()).collect();
    let n = constants.len();
    let c_star = constants.iter().cloned().fold(0.0, f64::max);
    let mut violation = None;
    if n >= 2 {
        let half = n.div_ceil(2);
        let inner = constants[..half].iter().cloned().fold(0.0, f64::max);
        let outer = constants[half..].iter().cloned().fold(0.0, f64::max);
        let width = (n / 4).max(2).min(n);
        let maxima: Vec<f64> = constants.windows(width).map(|w| w.iter().cloned().fold(0.0, f64::max)).collect();
        if let Some(k) = maxima.windows(2).position(|w| w[1] > w[0] * (1.0 + 1e-9)) {
            violation = Some(k + width);
        } else if outer > inner * (1.0 + 1e-9) {
            violation = constants.iter().position(|&c| c == outer);
        }
        if !c_star.is_finite() {
            violation = violation.or(Some(constants.iter().position(|c| !c.is_finite()).unwrap_or(0)));
        }
    }
    let violation = violation.map(|k| (k, points[k].0));
    BoundReport { rate, c_star, constants, passed: violation.is_none(), violation }
}

pub fn bound_check(samples: &[ScanSample], rate: f64) -> BoundReport {
    let pts: Vec<(f64, f64)> = samples.iter().map(|s| (s.r_e, s.value.norm())).collect();
    bound_check_samples(&pts, rate)
}
