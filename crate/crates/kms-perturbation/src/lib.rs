//! Low-order corrections to KMS and ground states of `:φ^k:` interactions,
//! their van Hove limit, and the thermal-mass reordering of Wick products.
//!
//! Corrections are reported per expansion order and never summed. The
//! interaction enters through its time-smeared density
//! `K = ∫d³x h(x) ∫dt χ̇⁻(t) α_{t,x}(:φ^k:)`.

mod first_order;
mod numerics;
mod reorder;
mod second_order;
mod van_hove;

pub use first_order::{
    first_order_correction, first_order_sequence, monte_carlo_first_order, shift_integral, t_shift_invariance,
    MonteCarloCheck, ShiftReport,
};
pub use numerics::two_point;
pub use reorder::{thermal_mass, wick_reordering_check, ReorderingReport, PRINTED_THERMAL_MASS_FACTOR};
pub use second_order::{second_order_correction, second_order_integrand, SecondOrderPoint};
pub use van_hove::{van_hove_limit, VanHoveReport, VanHoveStatus};

use propagators::{FieldParams, PropagatorError};
use serde::Serialize;
use thiserror::Error;
use wick_algebra::{WickError, WickMonomial};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KmsError {
    #[error(transparent)]
    Propagator(#[from] PropagatorError),
    #[error(transparent)]
    Wick(#[from] WickError),
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// Interaction density `:φ^k:`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct InteractionSpec {
    pub power: u32,
}

impl InteractionSpec {
    pub fn new(power: u32) -> Result<Self, KmsError> {
        if power % 2 != 0 || !(2..=6).contains(&power) {
            return Err(KmsError::Invalid(format!("interaction power must be even in 2..=6, got {power}")));
        }
        Ok(Self { power })
    }

    pub fn phi4() -> Self {
        Self { power: 4 }
    }

    pub fn name(&self) -> String {
        monomial_name(self.power)
    }
}

impl Default for InteractionSpec {
    fn default() -> Self {
        Self::phi4()
    }
}

pub(crate) fn monomial_name(power: u32) -> String {
    if power == 0 {
        "1".into()
    } else {
        format!("phi{power}")
    }
}

/// Polynomial bump `(t + 2ε)^a (−ε − t)^b` on `(−2ε, −ε)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BumpShape {
    /// `a = b = 2`.
    #[default]
    Symmetric,
    /// `a = 2`, `b = 4`, weighted towards `−2ε`.
    Skewed,
}

impl BumpShape {
    fn exponents(self) -> (i32, i32) {
        match self {
            BumpShape::Symmetric => (2, 2),
            BumpShape::Skewed => (2, 4),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmearingMode {
    #[default]
    Full,
    /// Replaces `χ̇⁻` by a point mass at `−3ε/2`.
    Delta,
}

/// Normalized switching density `χ̇⁻` supported in `(−2ε, −ε)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeSmearing {
    pub epsilon: f64,
    pub shape: BumpShape,
    pub mode: SmearingMode,
}

impl TimeSmearing {
    pub fn new(epsilon: f64) -> Result<Self, KmsError> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(KmsError::Invalid(format!("epsilon must be > 0, got {epsilon}")));
        }
        Ok(Self { epsilon, shape: BumpShape::default(), mode: SmearingMode::default() })
    }

    pub fn with_shape(mut self, shape: BumpShape) -> Self {
        self.shape = shape;
        self
    }

    pub fn with_mode(mut self, mode: SmearingMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn support(&self) -> (f64, f64) {
        (-2.0 * self.epsilon, -self.epsilon)
    }

    pub fn delta_time(&self) -> f64 {
        -1.5 * self.epsilon
    }

    pub fn density(&self, t: f64) -> f64 {
        let (lo, hi) = self.support();
        if !(t > lo && t < hi) {
            return 0.0;
        }
        let (a, b) = self.shape.exponents();
        let e = self.epsilon;
        let fact = |n: i32| (1..=n).map(f64::from).product::<f64>();
        let norm = fact(a + b + 1) / (fact(a) * fact(b) * e.powi(a + b + 1));
        norm * (t - lo).powi(a) * (hi - t).powi(b)
    }
}

/// Radial van Hove cutoff: `1` below `n`, `0` above `n + 1`, linear between.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VanHoveProfile {
    pub index: u32,
}

impl VanHoveProfile {
    pub fn new(index: u32) -> Result<Self, KmsError> {
        if index == 0 {
            return Err(KmsError::Invalid("van Hove index must be >= 1".into()));
        }
        Ok(Self { index })
    }

    pub fn value(&self, r: f64) -> f64 {
        let n = self.index as f64;
        (n + 1.0 - r).clamp(0.0, 1.0)
    }

    pub fn outer_radius(&self) -> f64 {
        self.index as f64 + 1.0
    }

    /// `∫ d³x h(x)`.
    pub fn volume(&self) -> f64 {
        let n = self.index as f64;
        4.0 * std::f64::consts::PI * (n * n * n / 3.0 + n * n / 2.0 + n / 3.0 + 1.0 / 12.0)
    }
}

/// The ordered region `0 ≤ u₁ ≤ … ≤ u_n ≤ scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimplexDomain {
    pub order: usize,
    pub scale: f64,
}

impl SimplexDomain {
    pub fn new(order: usize, scale: f64) -> Result<Self, KmsError> {
        if order == 0 || !(scale > 0.0 && scale.is_finite()) {
            return Err(KmsError::Invalid(format!("simplex needs order >= 1 and finite scale > 0, got {order}, {scale}")));
        }
        Ok(Self { order, scale })
    }

    pub fn volume(&self) -> f64 {
        self.scale.powi(self.order as i32) / (1..=self.order).map(|k| k as f64).product::<f64>()
    }

    /// Maps a point of the unit cube onto the simplex by sorting; every
    /// simplex point has `order!` preimages.
    pub fn from_cube(&self, w: &[f64]) -> Vec<f64> {
        let mut u: Vec<f64> = w.iter().map(|x| x * self.scale).collect();
        u.sort_by(f64::total_cmp);
        u
    }

    pub fn contains(&self, u: &[f64]) -> bool {
        u.len() == self.order
            && u.first().is_some_and(|&a| a >= 0.0)
            && u.last().is_some_and(|&b| b <= self.scale)
            && u.windows(2).all(|w| w[0] <= w[1])
    }
}

/// Tolerances, contour geometry and sampling budgets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NumericsConfig {
    /// Relative tolerance of the outermost quadrature.
    pub rel_tol: f64,
    /// Truncation of image and Matsubara sums.
    pub series_tol: f64,
    /// Maximal imaginary excursion of the deformed radial contour.
    pub contour_amplitude: f64,
    /// The radial contour is deformed on `[0, contour_radius]`.
    pub contour_radius: f64,
    /// Absolute bound on the neglected imaginary-time tail in the vacuum.
    pub vacuum_tail_tol: f64,
    pub monte_carlo_samples: usize,
    pub qmc_points: usize,
    pub qmc_shifts: usize,
    pub seed: u64,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            series_tol: 1e-13,
            contour_amplitude: 0.2,
            contour_radius: 1.0,
            vacuum_tail_tol: 1e-12,
            monte_carlo_samples: 20_000,
            qmc_points: 4096,
            qmc_shifts: 8,
            seed: 7,
        }
    }
}

impl NumericsConfig {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn validate(&self) -> Result<(), KmsError> {
        let ok = self.rel_tol > 0.0
            && self.series_tol > 0.0
            && self.contour_amplitude > 0.0
            && self.contour_amplitude < self.contour_radius / 4.0
            && self.vacuum_tail_tol > 0.0
            && self.monte_carlo_samples >= 2
            && self.qmc_points >= 1
            && self.qmc_shifts >= 2;
        if ok {
            Ok(())
        } else {
            Err(KmsError::Invalid(format!("inconsistent numerics {self:?}")))
        }
    }
}

/// Per-order correction with its provenance, as written to JSON reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Correction {
    pub observable: String,
    pub interaction: String,
    pub order: u32,
    /// `None` in the vacuum.
    pub beta: Option<f64>,
    pub mass: f64,
    pub epsilon: f64,
    pub mode: SmearingMode,
    pub shape: BumpShape,
    pub profile_index: u32,
    pub value: f64,
    /// Residual imaginary part; vanishes up to quadrature error.
    pub imaginary_part: f64,
    pub error: f64,
    pub certified: bool,
    pub diagnostic: Option<String>,
}

impl Correction {
    pub(crate) fn header(
        a: &WickMonomial,
        interaction: &InteractionSpec,
        order: u32,
        smearing: &TimeSmearing,
        h: &VanHoveProfile,
        params: &FieldParams,
    ) -> Self {
        Self {
            observable: monomial_name(a.power),
            interaction: interaction.name(),
            order,
            beta: (!params.is_vacuum()).then_some(params.beta),
            mass: params.mass,
            epsilon: smearing.epsilon,
            mode: smearing.mode,
            shape: smearing.shape,
            profile_index: h.index,
            value: 0.0,
            imaginary_part: 0.0,
            error: 0.0,
            certified: true,
            diagnostic: None,
        }
    }
}

pub(crate) fn require_at_origin(a: &WickMonomial) -> Result<(), KmsError> {
    if a.t != 0.0 || a.u != 0.0 || a.x != [0.0; 3] {
        return Err(KmsError::Invalid("the observable must sit at the origin".into()));
    }
    Ok(())
}
