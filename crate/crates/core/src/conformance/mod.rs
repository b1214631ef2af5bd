//! Transmitter measurements: Welch PSD, ACLR, EVM and limit evaluation.

pub mod aclr;
pub mod evm;
pub mod limits;
pub mod psd;

pub use aclr::{aclr_from_psd, aclr_segment_len, measure_aclr, AclrResult, ACLR_CAP_DB, DEFAULT_CHANNEL_SPACING_HZ};
pub use evm::{measure_evm, EvmReference, EvmResult, ModulationEvm};
pub use limits::{all_pass, evaluate_limits, EvmLimit, Limits, Tier, Verdict};
pub use psd::{welch_psd, PsdEstimate, WindowKind, DEFAULT_OVERLAP, DEFAULT_SEGMENT};
