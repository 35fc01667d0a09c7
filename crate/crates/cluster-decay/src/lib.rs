//! Connected correlation functions of translated Wick monomials, their
//! exponential decay fits, and the mass-shell integrals behind the decay
//! bounds.

mod fit;
mod mass_shell;

pub use fit::{bound_check, bound_check_samples, decay_fit, BoundReport, DecayFit, FitOptions};
pub use mass_shell::{mass_shell_integral, Bump};

use num_complex::Complex64;
use propagators::{FieldParams, PropagatorError, ThermalRoute};
use thiserror::Error;
use wick_algebra::{connected_correlation, CorrelationProblem, WickError, WickMonomial};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClusterError {
    #[error(transparent)]
    Wick(#[from] WickError),
    #[error(transparent)]
    Propagator(#[from] PropagatorError),
    #[error("invalid scan: {0}")]
    Invalid(String),
    #[error("fit failed: {0}")]
    Fit(String),
}

/// `F_n(r) = ω^c(A₀ ⊗ α_{iu₁(r), x₁(r)}(A₁) ⊗ ⋯)` with `A₀` at the origin,
/// `xᵢ(r) = r·dᵢ` and `uᵢ(r) = uᵢ + r·wᵢ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterScan {
    pub powers: Vec<u32>,
    pub state: FieldParams,
    pub u: Vec<f64>,
    pub directions: Vec<[f64; 3]>,
    pub u_ray: Vec<f64>,
    pub radii: Vec<f64>,
    pub route: ThermalRoute,
}

/// One evaluated point of a scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSample {
    pub r: f64,
    pub r_e: f64,
    pub u: [f64; 4],
    pub value: Complex64,
}

fn norm3(x: [f64; 3]) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

impl ClusterScan {
    /// Spatial scan with every translated factor moved along `direction`.
    pub fn spatial(powers: Vec<u32>, state: FieldParams, u: Vec<f64>, direction: [f64; 3], radii: Vec<f64>) -> Self {
        let n = u.len();
        Self { powers, state, u, directions: vec![direction; n], u_ray: vec![0.0; n], radii, route: ThermalRoute::default() }
    }

    /// Imaginary-time ray: `uᵢ(r) = uᵢ + r`, positions fixed at the origin.
    pub fn imaginary_time_ray(powers: Vec<u32>, state: FieldParams, u: Vec<f64>, radii: Vec<f64>) -> Self {
        let n = u.len();
        Self { powers, state, u, directions: vec![[0.0; 3]; n], u_ray: vec![1.0; n], radii, route: ThermalRoute::default() }
    }

    pub fn with_directions(mut self, directions: Vec<[f64; 3]>) -> Self {
        self.directions = directions;
        self
    }

    pub fn with_route(mut self, route: ThermalRoute) -> Self {
        self.route = route;
        self
    }

    pub fn order(&self) -> usize {
        self.u.len()
    }

    pub fn validate(&self) -> Result<(), ClusterError> {
        let n = self.order();
        if n == 0 || self.powers.len() != n + 1 {
            return Err(ClusterError::Invalid(format!("{} powers for {} imaginary times", self.powers.len(), n)));
        }
        if self.directions.len() != n || self.u_ray.len() != n {
            return Err(ClusterError::Invalid("one direction and one u-ray weight per translated factor".into()));
        }
        self.state.require_massive()?;
        if self.radii.windows(2).any(|w| !(w[1] > w[0])) || self.radii.iter().any(|r| !(*r >= 0.0)) {
            return Err(ClusterError::Invalid("radii must be non-negative and strictly increasing".into()));
        }
        let mut prev = 0.0;
        for &u in &self.u {
            if !(u > prev) {
                return Err(ClusterError::Invalid("imaginary times must satisfy 0 < u₁ < … < u_n".into()));
            }
            prev = u;
        }
        if !self.state.is_vacuum() {
            if !(prev < self.state.beta) {
                return Err(ClusterError::Invalid("imaginary times must stay below beta".into()));
            }
            if self.u_ray.iter().any(|w| *w != 0.0) {
                return Err(ClusterError::Invalid("imaginary-time rays are only defined in the vacuum".into()));
            }
        }
        if self.u_ray.windows(2).any(|w| w[1] < w[0]) || self.u_ray.iter().any(|w| *w < 0.0) {
            return Err(ClusterError::Invalid("u-ray weights must be non-negative and non-decreasing".into()));
        }
        Ok(())
    }

    fn monomials(&self, r: f64) -> Vec<WickMonomial> {
        let mut out = vec![WickMonomial::at_origin(0, self.powers[0])];
        for i in 0..self.order() {
            let d = self.directions[i];
            let x = [r * d[0], r * d[1], r * d[2]];
            out.push(WickMonomial::new(i + 1, self.powers[i + 1], 0.0, self.u[i] + r * self.u_ray[i], x));
        }
        out
    }

    /// Euclidean distance entering the bound: includes the `uᵢ` in the
    /// vacuum, spatial only in a thermal state.
    pub fn r_e(&self, r: f64) -> f64 {
        let mut s = 0.0;
        for m in &self.monomials(r)[1..] {
            s += norm3(m.x).powi(2);
            if self.state.is_vacuum() {
                s += m.u * m.u;
            }
        }
        s.sqrt()
    }
}

/// Evaluates `F_n` at radius `r` through the connected graph expansion.
pub fn cluster_function(scan: &ClusterScan, r: f64) -> Result<Complex64, ClusterError> {
    scan.validate()?;
    let problem = CorrelationProblem::new(scan.monomials(r), scan.state).with_route(scan.route);
    Ok(connected_correlation(&problem)?)
}

/// Evaluates the scan at every radius.
pub fn scan(scan: &ClusterScan) -> Result<Vec<ScanSample>, ClusterError> {
    scan.validate()?;
    scan.radii
        .iter()
        .map(|&r| {
            let mut u = [0.0; 4];
            for (k, m) in scan.monomials(r)[1..].iter().enumerate().take(4) {
                u[k] = m.u;
            }
            Ok(ScanSample { r, r_e: scan.r_e(r), u, value: cluster_function(scan, r)? })
        })
        .collect()
}

/// Outcome of the cyclic KMS rearrangement at one radius.
#[derive(Debug, Clone, PartialEq)]
pub struct RearrangementReport {
    pub r: f64,
    pub original: Complex64,
    pub rotated: Vec<Complex64>,
    pub max_relative_gap: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Compares `F_n` with every cyclic rotation of its factors, where factors
/// moved past the end acquire `u + β`.
pub fn kms_rearrangement_check(scan: &ClusterScan, r: f64, tolerance: f64) -> Result<RearrangementReport, ClusterError> {
    scan.validate()?;
    if scan.state.is_vacuum() {
        return Err(ClusterError::Invalid("rearrangement needs a thermal state".into()));
    }
    let beta = scan.state.beta;
    let base = scan.monomials(r);
    let original = connected_correlation(&CorrelationProblem::new(base.clone(), scan.state).with_route(scan.route))?;
    let n = base.len();
    let mut rotated = Vec::new();
    let mut gap: f64 = 0.0;
    for k in 1..n {
        let shift = base[k].u;
        let ms: Vec<WickMonomial> = (0..n)
            .map(|j| {
                let src = base[(k + j) % n];
                let wrapped = if k + j >= n { beta } else { 0.0 };
                WickMonomial { u: src.u + wrapped - shift, ..src }
            })
            .collect();
        let v = connected_correlation(&CorrelationProblem::new(ms, scan.state).with_route(scan.route))?;
        let scale = original.norm().max(f64::MIN_POSITIVE);
        gap = gap.max((v - original).norm() / scale);
        rotated.push(v);
    }
    Ok(RearrangementReport { r, original, rotated, max_relative_gap: gap, tolerance, passed: gap <= tolerance })
}
