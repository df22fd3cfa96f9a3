//! Pulse-by-pulse Monte Carlo generator of timestamped detection records.

mod cascade;
mod config;
mod detection;
mod rng;
mod simulate;
mod stream;

pub use cascade::{project_polarization, sample_pair_event, CascadeOutcome, PairPolarization, Port};
pub use config::{ExperimentConfig, ExperimentKind, RelativePol};
pub use detection::{apply_detection_chain, DetectionRecord, Emission};
pub use rng::PulseRng;
pub use simulate::{background_probability, simulate, HOM_CHANNELS, LIFETIME_TRIGGER};
pub use stream::{StreamHeader, TimeTagStream};
