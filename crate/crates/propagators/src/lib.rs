//! Free scalar two-point functions at complexified time.
//!
//! Conventions: natural units, `ω_p = √(p² + m²)`, momentum measure
//! `(2π)⁻³ d³p`. A displacement `(t, u, r)` stands for the time argument
//! `t − iu` at spatial distance `r`.

mod bessel;
pub mod quad;
mod two_point;

pub use bessel::{bessel_k1, bessel_k1_real};
pub use quad::{Estimate, QuadratureConfig};
pub use two_point::{
    dispersion, kms_boundary_check, kms_two_point, kms_two_point_images, kms_two_point_with,
    state_two_point, thermal_images_at, thermal_images_with, thermal_matsubara_at, thermal_part, vac_two_point, vac_two_point_at,
    vac_two_point_quadrature, BoundaryCheck, ThermalRoute,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PropagatorError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("quadrature did not converge: achieved {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },
}

/// Mass and inverse temperature; `beta = +∞` is the vacuum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldParams {
    pub mass: f64,
    pub beta: f64,
}

impl FieldParams {
    pub fn vacuum(mass: f64) -> Self {
        Self { mass, beta: f64::INFINITY }
    }

    pub fn thermal(mass: f64, beta: f64) -> Self {
        Self { mass, beta }
    }

    pub fn is_vacuum(&self) -> bool {
        self.beta.is_infinite()
    }

    pub fn validate(&self) -> Result<(), PropagatorError> {
        if !(self.mass >= 0.0 && self.mass.is_finite()) {
            return Err(PropagatorError::Domain(format!("mass must be finite and >= 0, got {}", self.mass)));
        }
        if !(self.beta > 0.0) {
            return Err(PropagatorError::Domain(format!("beta must be > 0, got {}", self.beta)));
        }
        Ok(())
    }

    pub fn require_massive(&self) -> Result<(), PropagatorError> {
        self.validate()?;
        if self.mass <= 0.0 {
            return Err(PropagatorError::Domain("mass must be > 0".into()));
        }
        Ok(())
    }
}

/// Relative displacement with time argument `t − iu` and spatial distance `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexTimeDisplacement {
    pub t: f64,
    pub u: f64,
    pub r: f64,
}

impl ComplexTimeDisplacement {
    pub fn new(t: f64, u: f64, r: f64) -> Self {
        Self { t, u, r }
    }

    pub fn imaginary(u: f64, r: f64) -> Self {
        Self { t: 0.0, u, r }
    }

    pub fn from_vector(t: f64, u: f64, x: [f64; 3]) -> Self {
        Self { t, u, r: (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt() }
    }
}
