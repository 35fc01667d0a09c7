use crate::ClusterError;
use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use propagators::quad::{exponential_tail_cutoff, integrate, uniform_breakpoints};
use propagators::{Estimate, QuadratureConfig};
use std::f64::consts::PI;

const PANELS: usize = 32;
const NODES: usize = 20;

/// Test function of the four Euclidean coordinates `(y₀, y⃗)`: a point
/// source, or `exp(−ρ²/2σ²)(1 − ρ²/R²)²` on the ball `ρ < R` normalized to
/// unit integral. Its transform is tabulated once on construction.
#[derive(Debug, Clone, PartialEq)]
pub enum Bump {
    Point,
    Smooth { radius: f64, sigma: f64, nodes: Vec<(f64, f64)> },
}

impl Bump {
    pub fn point() -> Self {
        Bump::Point
    }

    pub fn smooth(radius: f64, sigma: f64) -> Result<Self, ClusterError> {
        if !(radius > 0.0 && sigma > 0.0) {
            return Err(ClusterError::Invalid(format!("bump needs R > 0 and σ > 0, got {radius}, {sigma}")));
        }
        let profile = |rho: f64| {
            let x = 1.0 - (rho / radius).powi(2);
            if x <= 0.0 {
                0.0
            } else {
                (-rho * rho / (2.0 * sigma * sigma)).exp() * x * x
            }
        };
        let gl = GaussLegendre::new(NODES.try_into().expect("nonzero degree"));
        let mut nodes = Vec::with_capacity(PANELS * NODES);
        let h = radius / PANELS as f64;
        for k in 0..PANELS {
            let (a, b) = (k as f64 * h, (k + 1) as f64 * h);
            for (x, w) in gl.as_node_weight_pairs() {
                let y0 = 0.5 * (a + b) + 0.5 * (b - a) * x;
                let smax = (radius * radius - y0 * y0).max(0.0).sqrt();
                let slice: f64 = gl
                    .as_node_weight_pairs()
                    .into_iter()
                    .map(|(xs, ws)| {
                        let s = 0.5 * smax * (1.0 + xs);
                        0.5 * smax * ws * s * s * profile((y0 * y0 + s * s).sqrt())
                    })
                    .sum();
                nodes.push((y0, 0.5 * (b - a) * w * 4.0 * PI * slice));
            }
        }
        let norm: f64 = 2.0 * nodes.iter().map(|n| n.1).sum::<f64>();
        for n in &mut nodes {
            n.1 /= norm;
        }
        Ok(Bump::Smooth { radius, sigma, nodes })
    }

    pub fn radius(&self) -> f64 {
        match self {
            Bump::Point => 0.0,
            Bump::Smooth { radius, .. } => *radius,
        }
    }

    /// Four-dimensional Fourier transform at Euclidean momentum `k`.
    pub fn transform(&self, k: f64) -> f64 {
        match self {
            Bump::Point => 1.0,
            Bump::Smooth { nodes, .. } => 2.0 * nodes.iter().map(|&(y, w)| w * (k * y).cos()).sum::<f64>(),
        }
    }
}

/// `I_f^b(−iu, x) = ∫ d³p/(2ω) e^{i p·x − (u+b)ω} f̂(±ω, p)`; on the mass shell
/// the Euclidean momentum of `(ω, p)` is `√(2p² + m²)`.
pub fn mass_shell_integral(
    bump: &Bump,
    mass: f64,
    u: f64,
    x: [f64; 3],
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate<Complex64>, ClusterError> {
    if !(mass > 0.0) {
        return Err(ClusterError::Invalid(format!("mass must be > 0, got {mass}")));
    }
    if !(u > 0.0) || !(b >= 0.0) {
        return Err(ClusterError::Invalid(format!("need u > 0 and b >= 0, got u = {u}, b = {b}")));
    }
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let rate = u + b;
    let cut = exponential_tail_cutoff(rate, 2, cfg.abs_tol * 1e-2);
    let width = if r > 0.0 { (PI / r).min(2.0) } else { 2.0 };
    let bp = uniform_breakpoints(0.0, cut, width.min(cut));
    let f = |p: f64| {
        let w = (p * p + mass * mass).sqrt();
        let sinc = if p * r < 1e-4 { 1.0 - (p * r).powi(2) / 6.0 } else { (p * r).sin() / (p * r) };
        let k = (2.0 * p * p + mass * mass).sqrt();
        Complex64::new(4.0 * PI * p * p * sinc * (-rate * w).exp() * bump.transform(k) / (2.0 * w), 0.0)
    };
    Ok(integrate(f, &bp, cfg)?)
}
