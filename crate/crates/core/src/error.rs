use thiserror::Error;

/// Errors raised by the element, mesh, assembly and study layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degree unsupported: Nedelec degree {0} (supported: 1, 2)")]
    UnsupportedDegree(usize),

    #[error("geometric order unsupported: {0} (supported: 1, 2)")]
    UnsupportedOrder(usize),

    #[error("no quadrature rule of exactness {requested}: maximum available is {max}")]
    QuadratureUnavailable { requested: usize, max: usize },

    #[error("quadrature certification failed for degree {degree}: monomial {exponents:?} has relative error {error:e}")]
    QuadratureCertification {
        degree: usize,
        exponents: Vec<u32>,
        error: f64,
    },

    #[error("point ({0}, {1}, {2}) lies outside the reference tetrahedron")]
    OutsideReference(f64, f64, f64),

    #[error("singular Jacobian in cell {cell} (det = {det:e})")]
    SingularJacobian { cell: usize, det: f64 },

    #[error("non-positive Jacobian determinant in cell {cell} (det = {det:e})")]
    NonPositiveJacobian { cell: usize, det: f64 },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("gmsh parse error ({section}, line {line}): {message}")]
    Parse {
        section: String,
        line: usize,
        message: String,
    },

    #[error("unsupported element type {0} in gmsh file")]
    UnsupportedElementType(i64),

    #[error("ray from the origin in direction ({0}, {1}, {2}) does not meet the mesh boundary; is the mesh star-shaped?")]
    RayIntersection(f64, f64, f64),

    #[error("interpolation orientation inconsistency on {entity} {index}")]
    Orientation { entity: &'static str, index: usize },

    #[error("empty interior system: every degree of freedom lies on the boundary")]
    EmptyInteriorSystem,

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("iterative solver did not converge in {iterations} iterations (last relative residual {last:e})")]
    NotConverged {
        iterations: usize,
        last: f64,
        history: Vec<f64>,
    },

    #[error("solution residual {residual:e} exceeds tolerance {tol:e}")]
    ResidualTooLarge { residual: f64, tol: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("level {level}: {source}")]
    AtLevel {
        level: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
