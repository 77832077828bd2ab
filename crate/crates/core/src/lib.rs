//! Multi-cell massive MIMO uplink simulation under uncorrelated Rayleigh
//! fading and the double scattering channel model.
//!
//! The crate covers the whole chain of one experiment: network layout and
//! large-scale fading ([`geometry`]), channel models and their second-order
//! statistics ([`channel`]), LMMSE estimation under pilot contamination
//! ([`estimation`]), linear detection ([`detection`]) and Monte-Carlo
//! evaluation of the ergodic SE lower bound ([`engine`]).

#[cfg(test)]
#[macro_use]
mod testutil;

pub mod channel;
pub mod config;
pub mod detection;
pub mod engine;
pub mod error;
pub mod estimation;
pub mod geometry;
pub mod linalg;
pub mod powers;
pub mod rng;

pub use channel::{ChannelModelSpec, ChannelTensor, DoubleScatteringParams, NetworkChannels};
pub use config::{ExperimentConfig, ModelTemplate, PilotConfig, SamplingConfig, ScatteringConfig};
pub use detection::{DetectionMatrix, DetectorKind};
pub use engine::{run_experiment, SeReport, SeSummary};
pub use error::{Error, Result};
pub use geometry::{LinkGeometry, NetworkConfig, UserDrop};
pub use powers::Powers;
