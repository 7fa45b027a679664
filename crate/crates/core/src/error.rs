use thiserror::Error;

use crate::space::ModeLabel;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("mode {0} appears more than once")]
    DuplicateMode(ModeLabel),
    #[error("mode {0} has cutoff 0; every mode needs at least one photon of capacity")]
    ZeroCutoff(ModeLabel),
    #[error("a Hilbert space needs at least one mode")]
    EmptySpace,
    #[error("unknown mode {0}")]
    UnknownMode(String),
    #[error("operands live on different Hilbert spaces")]
    SpaceMismatch,
    #[error("spaces share mode {0}")]
    OverlappingModes(ModeLabel),
    #[error("occupation {count} exceeds cutoff {cutoff} of mode {mode}")]
    CutoffExceeded {
        mode: ModeLabel,
        count: usize,
        cutoff: usize,
    },
    #[error(
        "cutoff {cutoff} too small for |alpha| = {alpha_abs}: truncated weight {deficit:.3e} \
         (need < 1e-12; smallest valid cutoff is {required})"
    )]
    CutoffTooSmall {
        cutoff: usize,
        alpha_abs: f64,
        deficit: f64,
        required: usize,
    },
    #[error("odd cat state with alpha = 0 is the zero vector")]
    DegenerateAmplitude,
    #[error("coefficients not normalized: |cH|^2 + |cV|^2 = {0}")]
    NotNormalized(f64),
    #[error("reflectivity {0} outside [0, 1]")]
    BadReflectivity(f64),
    #[error("tap port {0} is not in vacuum")]
    TapNotVacuum(String),
    #[error("output port {0} is not in vacuum")]
    OutputNotVacuum(String),
    #[error("efficiency {0} outside the allowed range")]
    BadEta(f64),
    #[error("expected a single-mode state, got {0} modes")]
    MultiModeInput(usize),
    #[error("bad bipartition: {0}")]
    BadPartition(String),
    #[error("state has zero norm")]
    ZeroNorm,
    #[error(
        "Hilbert space dimension {dim} exceeds the limit {limit} \
         (~{bytes} bytes for one state vector)"
    )]
    DimensionTooLarge { dim: usize, limit: usize, bytes: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
}
