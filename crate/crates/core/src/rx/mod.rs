//! Receiver: carrier recovery, synchronization, CP removal and FFT, LS
//! channel estimation and zero-forcing equalization.

pub mod costas;
pub mod demod;
pub mod equalize;
pub mod estimate;
pub mod pipeline;
pub mod sync;

pub use costas::{costas_downconvert, CostasConfig, CostasOutput, CostasTrace};
pub use demod::{ofdm_demodulate, ofdm_demodulate_with, DemodOptions, ReceivedGrid};
pub use equalize::{zf_equalize, EqualizedGrid};
pub use estimate::{average_over_slots, estimate_channel_ls, track_common_phase, ChannelEstimate};
pub use pipeline::{receive, CarrierRecovery, RecoveryPath, RxConfig, RxOutput};
pub use sync::{time_synchronize, time_synchronize_with, SyncResult};
