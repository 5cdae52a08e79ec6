use thiserror::Error;

/// Failure of an experiment, mapped onto the CLI exit codes.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("configuration rejected:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
    #[error("trace mismatch: {0}")]
    Mismatch(String),
    #[error("sampling interval {interval:.3e} exceeds eps/4 = {:.3e}", .eps / 4.0)]
    Undersampled { interval: f64, eps: f64 },
    #[error("numerical abort: {0}")]
    Numerical(#[from] lowmach_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("format: {0}")]
    Format(#[from] serde_json::Error),
}

impl LabError {
    pub fn config(msg: impl Into<String>) -> Self {
        Self::Config(vec![msg.into()])
    }

    /// 2 for configuration problems, 3 for everything that aborts a run.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Format(_) | Self::Undersampled { .. } => 2,
            Self::Numerical(_) | Self::Io(_) | Self::Mismatch(_) => 3,
        }
    }
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
