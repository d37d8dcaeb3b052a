use thiserror::Error;

/// Errors raised by the map, induced-system and statistics kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum IbtError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("argument {value} outside the domain {domain}")]
    Domain { value: f64, domain: &'static str },

    /// The orbit came within the exclusion radius of the cut line `x = A`.
    #[error("orbit point x = {x} lies within {radius:e} of the cut A (step {step})")]
    NearCut { x: f64, radius: f64, step: usize },

    /// An excursion away from the base exceeded the return-time cap.
    #[error("return time exceeded the cap r_max = {cap}")]
    TailOverflow { cap: usize },

    #[error("numerical failure in {what}: {detail}")]
    Numeric { what: &'static str, detail: String },
}

impl IbtError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        IbtError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn numeric(what: &'static str, detail: impl Into<String>) -> Self {
        IbtError::Numeric {
            what,
            detail: detail.into(),
        }
    }

    /// Re-tag a near-cut error with the orbit index at which it happened.
    pub fn at_step(self, step: usize) -> Self {
        match self {
            IbtError::NearCut { x, radius, .. } => IbtError::NearCut { x, radius, step },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, IbtError>;
