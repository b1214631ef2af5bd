//! Shared signal-processing building blocks.

pub mod fir;
pub mod resample;
pub mod response;
pub mod window;

pub use response::{fir_from_measured_response, FrequencyResponse, ResponsePoint};
