//! Conformance bench for NR FR1 transmitters carried over an analog
//! radio-over-free-space-optics fronthaul link.
//!
//! The crate generates test-model waveforms ([`nr`]), passes them through a
//! configurable impairment chain ([`channel`]), recovers the resource grid
//! ([`rx`]) and measures ACLR and EVM against transmitter limits
//! ([`conformance`]). [`harness`] ties the pieces into reproducible scenarios.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod conformance;
pub mod dsp;
pub mod error;
pub mod harness;
pub mod io;
pub mod nr;
pub mod rx;
pub mod signal;

pub use error::{Error, Result};
pub use signal::{SampledSignal, SignalKind, SignalMeta};
