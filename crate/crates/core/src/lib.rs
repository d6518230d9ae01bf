//! Conditional averages of a two-level variable between preparation and
//! post-selection, and what it takes to push them outside the eigenvalue
//! range.
//!
//! - [`quasiprob`]: finite signed distributions; weighted averages and their
//!   normal/anomalous classification.
//! - [`transitions`]: route amplitudes between selected states, the strong
//!   (projective) conditional average, and weak values with their signed
//!   quasi-weight pairs.
//! - [`pointer`]: a finite-accuracy Gaussian pointer — reading densities on
//!   a grid, the strong/weak limits of the mean reading, classical offset
//!   mixtures, and seeded sampling of readings.
//! - [`classical`]: a disturbance-based coin protocol whose rescaled average
//!   grows arbitrarily large while remaining normal, for contrast with the
//!   genuinely anomalous quantum case.

pub mod classical;
pub mod pointer;
pub mod quasiprob;
mod sum;
pub mod transitions;

pub use classical::{ClassicalError, ClassicalModelParams, ProtocolRunReport};
pub use pointer::{
    mean_reading, mixed_reading_density, pure_reading_density, sample_readings,
    strong_outcome_probabilities, Grid, MixtureForm, MixtureSpec, PointerConfig, PointerError,
    ReadingDensity,
};
pub use quasiprob::{
    AverageClassification, AverageKind, DistributionError, SignedDistribution,
    WEIGHT_SUM_TOLERANCE,
};
pub use transitions::{
    transition_amplitudes, AmplitudePair, QubitState, TransitionError, WeakValueResult,
};
