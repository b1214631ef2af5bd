//! NR test-model waveform generation.

pub mod modulation;
pub mod numerology;
pub mod ofdm;
pub mod prbs;
pub mod rf;
pub mod test_model;

pub use modulation::{qam_modulate, Modulation};
pub use numerology::{make_numerology, CarrierConfig, Numerology};
pub use ofdm::{ofdm_modulate, papr_db};
pub use rf::{downconvert_fixed, upconvert_to_passband, upconvert_with_filter, TxFilter};
pub use test_model::{build_test_model_grid, ReRole, ResourceGrid, TestModelId, TestModelSpec};
