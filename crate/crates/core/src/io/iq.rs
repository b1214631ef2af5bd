//! Raw little-endian f32 sample files with a JSON sidecar.
//!
//! Complex captures interleave I and Q; real captures are a plain sequence.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{SampledSignal, Samples, SignalKind, SignalMeta, StageRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IqSidecar {
    pub kind: SignalKind,
    pub sample_rate_hz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub carrier_hz: Option<f64>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub description: String,
    /// Stage power trace of the channel that produced the capture.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub history: Vec<StageRecord>,
}

impl IqSidecar {
    pub fn of(sig: &SampledSignal) -> Self {
        Self {
            kind: sig.kind(),
            sample_rate_hz: sig.rate_hz,
            carrier_hz: sig.meta.carrier_hz,
            seed: sig.meta.seed,
            description: sig.meta.description.clone(),
            history: sig.meta.history.clone(),
        }
    }
}

/// `capture.iq` -> `capture.json`.
pub fn sidecar_path(iq_path: &Path) -> PathBuf {
    iq_path.with_extension("json")
}

fn encode(sig: &SampledSignal) -> Vec<u8> {
    let mut out = Vec::with_capacity(sig.len() * 8);
    let mut put = |v: f64| out.extend_from_slice(&(v as f32).to_le_bytes());
    match &sig.samples {
        Samples::Real(x) => x.iter().for_each(|&v| put(v)),
        Samples::Complex(x) => x.iter().for_each(|v| {
            put(v.re);
            put(v.im);
        }),
    }
    out
}

/// Writes the samples as f32 and the sidecar as pretty JSON.
pub fn write_iq(iq_path: &Path, meta_path: &Path, sig: &SampledSignal) -> Result<()> {
    fs::write(iq_path, encode(sig))?;
    fs::write(meta_path, serde_json::to_string_pretty(&IqSidecar::of(sig))? + "\n")?;
    Ok(())
}

pub fn read_iq(iq_path: &Path, meta_path: &Path) -> Result<SampledSignal> {
    let meta: IqSidecar = serde_json::from_str(&fs::read_to_string(meta_path)?)
        .map_err(|e| Error::Format(format!("{}: {e}", meta_path.display())))?;
    if !(meta.sample_rate_hz > 0.0) {
        return Err(Error::Format("sidecar sample rate must be positive".into()));
    }
    let bytes = fs::read(iq_path)?;
    if bytes.len() % 4 != 0 {
        return Err(Error::Format(format!("{} is not a whole number of f32 values", iq_path.display())));
    }
    let vals: Vec<f64> = bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect();
    let sig = match meta.kind {
        SignalKind::Real => SampledSignal::real(vals, meta.sample_rate_hz),
        SignalKind::Complex => {
            if !vals.len().is_multiple_of(2) {
                return Err(Error::Format("complex capture has an odd number of values".into()));
            }
            let x = vals.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect();
            SampledSignal::complex(x, meta.sample_rate_hz)
        }
    };
    Ok(sig.with_meta(SignalMeta {
        carrier_hz: meta.carrier_hz,
        seed: meta.seed,
        description: meta.description,
        history: meta.history,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn complex_round_trip_is_exact_after_f32_rounding() {
        let dir = tempfile::tempdir().unwrap();
        let x: Vec<Complex64> = (0..1000).map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
        let sig = SampledSignal::complex(x, 30.72e6)
            .with_meta(SignalMeta { seed: Some(9), description: "t".into(), ..SignalMeta::default() })
            .rounded_to_f32();
        let (p, m) = (dir.path().join("a.iq"), dir.path().join("a.json"));
        write_iq(&p, &m, &sig).unwrap();
        assert_eq!(fs::metadata(&p).unwrap().len(), 8000);
        let back = read_iq(&p, &m).unwrap();
        assert_eq!(back, sig);
    }

    #[test]
    fn sidecar_fields() {
        let dir = tempfile::tempdir().unwrap();
        let sig = SampledSignal::real(vec![0.5, -0.25], 2.4576e9)
            .with_meta(SignalMeta { carrier_hz: Some(627e6), seed: Some(1), ..SignalMeta::default() });
        let (p, m) = (dir.path().join("r.iq"), dir.path().join("r.json"));
        write_iq(&p, &m, &sig).unwrap();
        let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&m).unwrap()).unwrap();
        assert_eq!(v["kind"], "real");
        assert_eq!(v["sample_rate_hz"], 2.4576e9);
        assert_eq!(v["carrier_hz"], 627e6);
        assert_eq!(v["seed"], 1);
    }

    #[test]
    fn truncated_file_is_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let (p, m) = (dir.path().join("b.iq"), dir.path().join("b.json"));
        write_iq(&p, &m, &SampledSignal::real(vec![1.0; 4], 1.0)).unwrap();
        fs::write(&p, [0u8; 6]).unwrap();
        assert!(matches!(read_iq(&p, &m), Err(Error::Format(_))));
    }

    proptest! {
        #[test]
        fn real_values_survive(v in prop::collection::vec(-1e3f32..1e3f32, 1..200)) {
            let dir = tempfile::tempdir().unwrap();
            let sig = SampledSignal::real(v.iter().map(|&x| x as f64).collect(), 1e6);
            let (p, m) = (dir.path().join("c.iq"), dir.path().join("c.json"));
            write_iq(&p, &m, &sig).unwrap();
            prop_assert_eq!(read_iq(&p, &m).unwrap().samples, sig.samples);
        }
    }
}
