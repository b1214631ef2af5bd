//! CSV exports of measurement artifacts.

use std::path::Path;

use crate::conformance::{EvmResult, PsdEstimate};
use crate::error::Result;
use crate::rx::{ChannelEstimate, EqualizedGrid};

/// `freq_hz,psd_db`, density in dB relative to total power per Hz.
pub fn write_psd_csv(path: &Path, psd: &PsdEstimate) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["freq_hz", "psd_db"])?;
    for (f, d) in psd.freqs_hz.iter().zip(psd.density_db()) {
        w.write_record([f.to_string(), d.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// `re,im,subcarrier,symbol` for every valid RE.
pub fn write_constellation_csv(path: &Path, eq: &EqualizedGrid) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["re", "im", "subcarrier", "symbol"])?;
    for l in 0..eq.n_symbols {
        for k in 0..eq.n_subcarriers {
            let i = eq.idx(l, k);
            if eq.valid[i] {
                let v = eq.values[i];
                w.write_record([v.re.to_string(), v.im.to_string(), k.to_string(), l.to_string()])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// `index,value`.
pub fn write_trace_csv(path: &Path, values: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["index", "value"])?;
    for (i, v) in values.iter().enumerate() {
        w.write_record([i.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// `subcarrier,re,im` of the first slot's estimate.
pub fn write_channel_estimate_csv(path: &Path, est: &ChannelEstimate) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["subcarrier", "re", "im"])?;
    if let Some(h) = est.per_slot.first() {
        for (k, v) in h.iter().enumerate() {
            w.write_record([k.to_string(), v.re.to_string(), v.im.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `subcarrier,evm_pct`, empty where undefined.
pub fn write_subcarrier_evm_csv(path: &Path, evm: &EvmResult) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["subcarrier", "evm_pct"])?;
    for (k, v) in evm.per_subcarrier_pct.iter().enumerate() {
        w.write_record([k.to_string(), v.map(|x| x.to_string()).unwrap_or_default()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn headers_and_rows() {
        let dir = tempfile::tempdir().unwrap();
        let eq = EqualizedGrid::from_values(vec![Complex64::new(1.0, -1.0); 6], 2, 3, 2);
        let p = dir.path().join("c.csv");
        write_constellation_csv(&p, &eq).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "re,im,subcarrier,symbol");
        assert_eq!(lines.len(), 7);
        assert_eq!(lines[6], "1,-1,2,1");

        let p = dir.path().join("t.csv");
        write_trace_csv(&p, &[0.5, 1.5]).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "index,value\n0,0.5\n1,1.5\n");

        let est = ChannelEstimate::known(vec![Complex64::new(0.0, 2.0)], 1);
        let p = dir.path().join("h.csv");
        write_channel_estimate_csv(&p, &est).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "subcarrier,re,im\n0,0,2\n");
    }
}
