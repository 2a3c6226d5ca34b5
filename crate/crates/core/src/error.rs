use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate edge at vertex {0}")]
    DegenerateEdge(usize),
    #[error("degenerate vertex area at vertex {0}")]
    DegenerateVertexArea(usize),
    #[error("degenerate tangent estimate at vertex {0}")]
    DegenerateTangent(usize),
    #[error("vector not normal (tangential residual {0:.3e})")]
    VectorNotNormal(f64),
    #[error("vertex {0} has no full triangle fan")]
    BoundaryVertex(usize),
    #[error("vertex {0} is an endpoint of an open curve")]
    Endpoint(usize),
    #[error("vortex collision between vortices {0} and {1}")]
    VortexCollision(usize, usize),
    #[error("near collision: separation {0:.3e} below 1e-6")]
    NearCollision(f64),
    #[error("integrator stalled: residual {residual:.3e} after {iterations} iterations")]
    IntegratorStalled { residual: f64, iterations: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("singular evaluation: q coincides with p")]
    SingularEvaluation,
    #[error("evaluation inside core: distance {0:.3e} to the carrier")]
    InsideCore(f64),
    #[error("truncation below mesh resolution: eps {eps:.3e} < 3h = {min:.3e}")]
    TruncationBelowResolution { eps: f64, min: f64 },
    #[error("asymptotic regime not reached: fit residual {0:.3}")]
    AsymptoticRegimeNotReached(f64),
    #[error("torsion undefined at flat point {0}")]
    TorsionUndefined(usize),
    #[error("topology change suspected: segments {0} and {1} closer than {2:.3e}")]
    TopologyChange(usize, usize, f64),
    #[error("mesh degeneration: triangle {0} has aspect ratio {1:.1}")]
    MeshDegeneration(usize, f64),
    #[error("alpha is not closed on triangle {0} (defect {1:.3e})")]
    NonClosedAlpha(usize, f64),
    #[error("non-exact alpha: pairing requires the bounded-domain primitive, not implemented")]
    NonExactAlpha,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    /// True for failures of the numerics (stalled integrators, poor fits,
    /// collapsing meshes) as opposed to rejected inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NearCollision(_)
                | Error::IntegratorStalled { .. }
                | Error::AsymptoticRegimeNotReached(_)
                | Error::TopologyChange(..)
                | Error::MeshDegeneration(..)
                | Error::DegenerateVertexArea(_)
                | Error::DegenerateTangent(_)
        )
    }
}
