//! File formats: IQ captures with JSON sidecars and CSV exports.

pub mod export;
pub mod iq;

pub use export::{
    write_channel_estimate_csv, write_constellation_csv, write_psd_csv, write_subcarrier_evm_csv, write_trace_csv,
};
pub use iq::{read_iq, sidecar_path, write_iq, IqSidecar};
