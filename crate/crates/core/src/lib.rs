//! Deterministic simulation of noise-based logic.
//!
//! Logic values are carried by stochastic signals instead of voltage levels:
//!
//! - [`noise`]: seeded random telegraph waves, band-limited Gaussian noise and
//!   Bernoulli spike trains, derived from labeled substreams of one master seed.
//! - [`rtw`]: instantaneous Boolean gates on random telegraph waves, squeezed
//!   (LOW is the zero signal) and non-squeezed (LOW is its own noise).
//! - [`spike`]: the same gates as set algebra on spike trains, the orthon, both
//!   orthogonator families and first-spike presence detection.
//! - [`continuum`]: correlator-based decoding of continuum noise logic values.
//! - [`hyperspace`]: product-noise basis vectors over noise-bits.
//! - [`verify`]: string equality verification by exchanging a few bits of an
//!   RTW product signature.
//!
//! Continuum math is generic over the scalar type (see [`Real`]); the
//! `*64` / `*32` aliases below fix it for the common cases.

pub mod continuum;
pub mod error;
pub mod hyperspace;
pub mod noise;
pub mod rtw;
pub mod scalar;
pub mod spike;
pub mod stats;
pub mod verify;

pub use error::{NblError, Result};
pub use noise::{RtwSequence, SpikeTrain, StreamKey};
pub use scalar::Real;

pub type ContinuumSignal64 = noise::ContinuumSignal<f64>;
pub type ContinuumSignal32 = noise::ContinuumSignal<f32>;
pub type ReferenceSet64 = continuum::ReferenceSet<f64>;
pub type ReferenceSet32 = continuum::ReferenceSet<f32>;
pub type CorrelatorConfig64 = continuum::CorrelatorConfig<f64>;
pub type CorrelatorConfig32 = continuum::CorrelatorConfig<f32>;
pub type ContinuumHyperspace64 = hyperspace::Hyperspace<noise::ContinuumSignal<f64>>;
pub type RtwHyperspace = hyperspace::Hyperspace<RtwSequence>;
