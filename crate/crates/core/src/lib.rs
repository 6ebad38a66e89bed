//! Noise-tailored Clifford-deformed surface codes: lattice construction,
//! Pauli algebra, code families, Pauli noise models, matching decoders and
//! Monte Carlo experiments.

pub mod code;
pub mod decoder;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod matching;
pub mod noise;
pub mod pauli;

pub use code::{build_family, CodeFamily, CodeLayout};
pub use decoder::{Correction, Decoder, MetricKind, WeightMetric};
pub use error::{Error, Result};
pub use geometry::{build_lattice, Lattice, LatticeSpec, Layout, Sublattice};
pub use noise::{NoiseModel, QubitRates};
pub use pauli::{LogicalClass, LogicalPair, Pauli, PauliOperator, Syndrome};
