//! Error classes and their exit codes.

use vdw_core::anomaly::AnomalyError;
use vdw_core::bec::BecError;
use vdw_core::media::MediumError;
use vdw_core::renorm::RenormError;
use vdw_core::stress_engine::StressError;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad config, bad arguments, missing files.
    Validation(String),
    /// A computation did not reach its tolerance.
    NonConvergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::NonConvergence(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "validation",
            CliError::NonConvergence(_) => "non_convergence",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::NonConvergence(m) => m,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": { "kind": self.kind(), "exit_code": self.exit_code(), "message": self.message() } })
            .to_string()
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.kind(), self.message())
    }
}

impl std::error::Error for CliError {}

impl From<MediumError> for CliError {
    fn from(e: MediumError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<StressError> for CliError {
    fn from(e: StressError) -> Self {
        match e {
            StressError::Invalid(_) | StressError::Medium(_) => CliError::Validation(e.to_string()),
            _ => CliError::NonConvergence(e.to_string()),
        }
    }
}

impl From<AnomalyError> for CliError {
    fn from(e: AnomalyError) -> Self {
        match e {
            AnomalyError::Stress(s) => s.into(),
            AnomalyError::Quadrature { .. } | AnomalyError::Divergent { .. } => CliError::NonConvergence(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<BecError> for CliError {
    fn from(e: BecError) -> Self {
        match e {
            BecError::Quadrature { .. } => CliError::NonConvergence(e.to_string()),
            BecError::Anomaly(a) => a.into(),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<RenormError> for CliError {
    fn from(e: RenormError) -> Self {
        match e {
            RenormError::Invalid(_) | RenormError::Medium(_) | RenormError::MissingTail => CliError::Validation(e.to_string()),
            _ => CliError::NonConvergence(e.to_string()),
        }
    }
}
