use thiserror::Error;

/// Everything that can go wrong while evaluating a surface.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("stencil point ({u}, {v}) is outside the immersion domain")]
    StencilOutOfDomain { u: f64, v: f64 },

    #[error("degenerate tangent plane: relative Gram determinant {w2:e} is below threshold")]
    DegenerateTangentPlane { w2: f64 },

    #[error("Frenet integration step rejected at v={v}: frame drift {drift:e}")]
    IntegrationStepRejected { v: f64, drift: f64 },

    #[error("profile domain error at u={u}: {reason}")]
    ProfileDomain { u: f64, reason: String },

    #[error("normal-frame gauge changes across the stencil around ({u}, {v})")]
    GaugeDiscontinuity { u: f64, v: f64 },

    #[error("formula and direct routes for R.h disagree by {gap:e}")]
    RouteDisagreement { gap: f64 },

    #[error("surface carries no meridian payload")]
    NotAMeridian,

    #[error("invalid specification: {0}")]
    InvalidSpec(String),
}

impl GeomError {
    /// Errors caused by where the point sits (pole guard, singular chart)
    /// rather than by an internal inconsistency.
    pub fn is_domain_error(&self) -> bool {
        matches!(
            self,
            GeomError::ProfileDomain { .. } | GeomError::DegenerateTangentPlane { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, GeomError>;
