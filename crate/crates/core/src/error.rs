use thiserror::Error;

use crate::lattice::LatticePoint;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("points must have at least one coordinate")]
    ZeroDimension,

    #[error("inverted bounds on axis {axis}: lower {lower} > upper {upper}")]
    InvertedBounds { axis: usize, lower: i64, upper: i64 },

    #[error("non-finite coordinate at index {index}")]
    NonFinite { index: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "closest-point solve did not converge after {iterations} iterations \
         (residual {residual:e}, last iterate {last:?})"
    )]
    NonConvergence {
        last: Vec<f64>,
        residual: f64,
        iterations: usize,
    },

    #[error("level-set gradient vanishes at {point:?} (norm {norm:e})")]
    Singularity { point: Vec<f64>, norm: f64 },

    #[error("chart jacobian is rank deficient at parameter {param:?}")]
    ImmersionViolation { param: Vec<f64> },

    #[error(
        "query point is {distance} from the manifold, outside the working neighborhood {radius}"
    )]
    OutsideNeighborhood { distance: f64, radius: f64 },

    #[error(
        "curvature is only implemented for 2-surfaces in R^3 \
         (got a {manifold_dim}-manifold in R^{ambient_dim})"
    )]
    UnsupportedDimension {
        manifold_dim: usize,
        ambient_dim: usize,
    },

    #[error("first fundamental form is singular (determinant {determinant:e})")]
    SingularMetric { determinant: f64 },

    #[error("vector is not tangent: normal component {normal:e} exceeds tolerance")]
    NotTangent { normal: f64 },

    #[error("tangent vectors are linearly dependent (gram determinant {gram:e})")]
    DependentVectors { gram: f64 },

    #[error("embedding has no position for lattice point {0}")]
    MissingEmbedding(LatticePoint),

    #[error("at lattice point {point}: {source}")]
    AtPoint {
        point: LatticePoint,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at(self, point: &LatticePoint) -> Error {
        match self {
            e @ Error::AtPoint { .. } => e,
            other => Error::AtPoint {
                point: point.clone(),
                source: Box::new(other),
            },
        }
    }

    /// The underlying error with any lattice-point context stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtPoint { source, .. } => source.root(),
            other => other,
        }
    }
}
