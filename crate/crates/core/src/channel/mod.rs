//! Analog optical fronthaul link as an ordered chain of impairment stages.

pub mod chain;
pub mod presets;
pub mod stages;

pub use chain::{run_chain, stage_seed, ChannelChain, DetectorModel, Stage, StageKind};
pub use presets::{build_chain, LinkKnobs, Preset};
pub use stages::{add_awgn, laser_pi_transfer, noisy_amplify, quantize, AmplifierModel, LaserModel, QuantizerModel};
