use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The truncated basis cannot hold the state to the required accuracy.
    #[error("truncation overflow in {stage}: norm deficit {deficit:.3e} exceeds {limit:.1e} at cutoff {cutoff}")]
    TruncationOverflow {
        stage: String,
        deficit: f64,
        limit: f64,
        cutoff: usize,
    },

    #[error("expected a {expected}-mode state, got {actual} mode(s)")]
    ModeMismatch { expected: usize, actual: usize },

    #[error("mode index {index} out of range for a {modes}-mode state")]
    ModeIndex { index: usize, modes: usize },

    #[error("states have different cutoffs ({0} vs {1})")]
    CutoffMismatch(usize, usize),

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("projection onto the {photons}-photon subspace is empty (weight {weight:.3e})")]
    EmptyProjection { photons: usize, weight: f64 },

    #[error("{0} is undefined at zero mean photon number")]
    UndefinedStatistic(&'static str),

    #[error("state is not normalized: norm deficit {0:.3e}")]
    Unnormalized(f64),

    #[error("negative probability {value:.3e} for outcome {outcome}")]
    NegativeProbability { outcome: usize, value: f64 },

    #[error("probability curve is not normalized consistently: total varies by {spread:.3e} over the stencil")]
    InconsistentNormalization { spread: f64 },

    #[error("singular operating point: {0}")]
    SingularOperatingPoint(String),

    #[error("signal derivative vanishes at phi = {phi} (|dS/dphi| = {derivative:.3e})")]
    VanishingDerivative { phi: f64, derivative: f64 },

    #[error("unphysical second moments: n(n+1) - |<a²>|² = {margin:.3e}")]
    UnphysicalMoments { margin: f64 },

    #[error("unknown probe state `{0}`")]
    UnknownState(String),

    #[error("{0}")]
    InvalidInput(String),
}
