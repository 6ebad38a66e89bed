use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("operator length mismatch: {left} vs {right} qubits")]
    LengthMismatch { left: usize, right: usize },
    #[error("stabilizers belong to different sub-lattices")]
    SublatticeMismatch,
    #[error("residual operator has a nonzero syndrome")]
    NonTrivialSyndrome,
    #[error("inconsistent Clifford deformation at qubit {qubit}")]
    InconsistentDeformation { qubit: usize },
    #[error("stabilizer rank {rank} does not equal N-1 = {expected}")]
    StabilizerRank { rank: usize, expected: usize },
    #[error("invalid noise parameters: {0}")]
    InvalidNoise(String),
    #[error("invalid metric parameters: {0}")]
    InvalidMetric(String),
    #[error("matching graph has an odd number of nodes ({0})")]
    OddNodeCount(usize),
    #[error("matching graph has no perfect matching")]
    NoPerfectMatching,
    #[error("threshold fit failed: {0}")]
    FitFailed(String),
    #[error("invalid experiment: {0}")]
    InvalidExperiment(String),
    #[error("trial failed at d=({d1},{d2}) p={p} t={trial}: {source}")]
    Trial {
        d1: usize,
        d2: usize,
        p: f64,
        trial: u64,
        #[source]
        source: Box<Error>,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
