use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("inadmissible quantum index: {0}")]
    Admissibility(String),

    #[error("AB flux constraint violated: {0}")]
    ConstraintViolation(String),

    #[error("branch error: {0}")]
    Branch(String),

    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("mode not normalizable: {0}")]
    Normalizability(String),

    #[error("grid size error: {0}")]
    Size(String),

    #[error("grid error: {0}")]
    Grid(String),

    #[error("singularity: rho fell below {threshold:e} at t = {t}")]
    Singularity { t: f64, threshold: f64 },

    #[error("profile error: {0}")]
    Profile(String),

    #[error("family error: {0}")]
    Family(String),

    #[error("coverage error: {0}")]
    Coverage(String),

    #[error("quadrature degree error: {0}")]
    QuadratureDegree(String),

    #[error("eigensolver failed to converge at index {index} after {iterations} iterations")]
    Convergence { index: usize, iterations: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
