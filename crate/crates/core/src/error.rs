use thiserror::Error;

/// Errors raised by the geometric operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeoError {
    #[error("receivers {0} and {1} coincide")]
    DuplicateReceiver(usize, usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("expected {expected} receivers, got {got}")]
    ReceiverCount { expected: usize, got: usize },
    #[error("non-finite input")]
    NonFinite,
    #[error("operation requires non-collinear receivers")]
    DegenerateConfig,
    #[error("operation requires collinear receivers")]
    NotCollinear,
    #[error("point coincides with receiver {0}")]
    AtReceiver(usize),
    #[error("infeasible measurement: {0}")]
    Infeasible(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("point is not a node of the surface")]
    NotANode,
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("point does not lie on the hull boundary")]
    NotOnBoundary,
}

impl GeoError {
    /// True for errors caused by the receiver configuration itself.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            GeoError::DuplicateReceiver(..)
                | GeoError::DimensionMismatch(_)
                | GeoError::ReceiverCount { .. }
                | GeoError::DegenerateConfig
                | GeoError::NotCollinear
        )
    }

    pub fn kind(&self) -> &'static str {
        match self {
            GeoError::DuplicateReceiver(..) => "duplicate_receiver",
            GeoError::DimensionMismatch(_) => "dimension_mismatch",
            GeoError::ReceiverCount { .. } => "receiver_count",
            GeoError::NonFinite => "non_finite",
            GeoError::DegenerateConfig => "degenerate_config",
            GeoError::NotCollinear => "not_collinear",
            GeoError::AtReceiver(_) => "at_receiver",
            GeoError::Infeasible(_) => "infeasible",
            GeoError::UnknownLabel(_) => "unknown_label",
            GeoError::NotANode => "not_a_node",
            GeoError::InvalidParam(_) => "invalid_param",
            GeoError::NotOnBoundary => "not_on_boundary",
        }
    }
}

pub type Result<T> = std::result::Result<T, GeoError>;
