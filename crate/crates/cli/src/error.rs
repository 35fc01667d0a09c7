use cluster_decay::ClusterError;
use kms_perturbation::KmsError;
use propagators::PropagatorError;
use scattering_symbolic::SymbolicError;
use thiserror::Error;
use wick_algebra::WickError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Proof(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Proof(_) => 4,
        }
    }
}

impl From<PropagatorError> for CliError {
    fn from(e: PropagatorError) -> Self {
        match e {
            PropagatorError::Domain(_) => CliError::Domain(e.to_string()),
            PropagatorError::Quadrature { .. } => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<WickError> for CliError {
    fn from(e: WickError) -> Self {
        match e {
            WickError::Propagator(p) => p.into(),
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<KmsError> for CliError {
    fn from(e: KmsError) -> Self {
        match e {
            KmsError::Propagator(p) => p.into(),
            KmsError::Wick(w) => w.into(),
            KmsError::Invalid(m) => CliError::Domain(m),
        }
    }
}

impl From<ClusterError> for CliError {
    fn from(e: ClusterError) -> Self {
        match e {
            ClusterError::Propagator(p) => p.into(),
            ClusterError::Wick(w) => w.into(),
            ClusterError::Invalid(_) => CliError::Domain(e.to_string()),
            ClusterError::Fit(_) => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<SymbolicError> for CliError {
    fn from(e: SymbolicError) -> Self {
        match e {
            SymbolicError::Profile(_) | SymbolicError::Precondition(_) => CliError::Domain(e.to_string()),
            SymbolicError::StepBudget(_) | SymbolicError::SearchExhausted { .. } => CliError::Proof(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Domain(format!("i/o error: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Domain(format!("csv error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Domain(format!("json error: {e}"))
    }
}
