use num_complex::Complex64;
use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cannot lift a branch value {0}: the fiber is a single ramified point")]
    BranchPointLift(Complex64),
    #[error("continuation step collapsed below {min_step:e} near {near}")]
    StepCollapse { near: Complex64, min_step: f64 },
    #[error("path passes within {clearance:e} of branch value {branch}")]
    BranchProximity { branch: Complex64, clearance: f64 },
    #[error("path segments do not connect at {0}")]
    DisconnectedPath(Complex64),
    #[error("adaptive quadrature did not converge within depth {0}")]
    Nonconvergence(usize),
    #[error("form coefficient is singular at a branch point in this chart")]
    ChartSingularity,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("mesh resolution {0} is too low")]
    ResolutionTooLow(usize),
    #[error(
        "boundary arc {arc} deviates from its fitted plane by {deviation:e} (limit {limit:e})"
    )]
    NonPlanarBoundary {
        arc: usize,
        deviation: f64,
        limit: f64,
    },
    #[error("lattice generators do not span three dimensions")]
    RankDeficient,
    #[error("point configuration is degenerate (rank {0})")]
    DegenerateConfiguration(usize),
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("lifted cover is disconnected ({components} components)")]
    DisconnectedCover { components: usize },
    #[error("monodromy values do not sum to zero modulo {0}")]
    InconsistentMonodromy(usize),
    #[error("permutation is not an automorphism of the map")]
    NotAutomorphism,
    #[error("automorphism has order {found}, expected {expected}")]
    WrongOrder { expected: usize, found: usize },
    #[error("automorphism fixes a dart")]
    NotFree,
    #[error("could not pair triangles along the requested edges")]
    PairingFailure,
    #[error("gluing across edge {edge} needs a rotation of {rotation:e} rad")]
    NotTranslation { edge: usize, rotation: f64 },
    #[error("cone angle {angle} is not a multiple of 2*pi")]
    NonIntegralOrder { angle: f64 },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
