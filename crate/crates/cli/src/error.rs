use thiserror::Error;

/// Failures mapped onto process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("{0}")]
    Singularity(String),

    #[error("{0}")]
    Integrator(String),

    #[error("{0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Singularity(_) => 3,
            CliError::Integrator(_) => 4,
            CliError::Verification(_) => 5,
        }
    }
}

impl From<curved_nbody::Error> for CliError {
    fn from(e: curved_nbody::Error) -> Self {
        use curved_nbody::Error as E;
        match e {
            E::StepSizeUnderflow { .. } | E::StepLimit { .. } => CliError::Integrator(e.to_string()),
            E::SingularityApproach { .. } | E::Singularity(_) => CliError::Singularity(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}
