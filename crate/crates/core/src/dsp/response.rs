//! Tabulated frequency responses and FIR realization by frequency sampling.

use std::f64::consts::PI;
use std::io::Read;
use std::path::Path;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResponsePoint {
    pub freq_hz: f64,
    pub mag_db: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_deg: Option<f64>,
}

/// Amplitude (and optionally phase) response sampled at increasing frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyResponse {
    points: Vec<ResponsePoint>,
}

impl FrequencyResponse {
    pub fn new(points: Vec<ResponsePoint>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Format("a response needs at least two points".into()));
        }
        for w in points.windows(2) {
            if w[1].freq_hz <= w[0].freq_hz {
                return Err(Error::Format(format!(
                    "frequencies must increase strictly ({} then {})",
                    w[0].freq_hz, w[1].freq_hz
                )));
            }
        }
        if points.iter().any(|p| !p.freq_hz.is_finite() || !p.mag_db.is_finite()) {
            return Err(Error::Format("non-finite response value".into()));
        }
        Ok(Self { points })
    }

    /// Magnitude-only table from (Hz, dB) pairs.
    pub fn from_magnitudes(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(freq_hz, mag_db)| ResponsePoint { freq_hz, mag_db, phase_deg: None })
                .collect(),
        )
    }

    /// |H| of a single real pole at `corner_hz`, tabulated on [0, max_hz].
    pub fn single_pole(corner_hz: f64, max_hz: f64, n_points: usize) -> Self {
        let pairs: Vec<(f64, f64)> = (0..n_points)
            .map(|i| {
                let f = max_hz * i as f64 / (n_points - 1) as f64;
                (f, -10.0 * (1.0 + (f / corner_hz).powi(2)).log10())
            })
            .collect();
        Self::from_magnitudes(&pairs).expect("monotone grid")
    }

    pub fn points(&self) -> &[ResponsePoint] {
        &self.points
    }

    pub fn has_phase(&self) -> bool {
        self.points.iter().all(|p| p.phase_deg.is_some())
    }

    /// Linear interpolation in dB (and degrees); values outside the table are held.
    pub fn eval(&self, f: f64) -> (f64, f64) {
        let pts = &self.points;
        let phase = |p: &ResponsePoint| p.phase_deg.unwrap_or(0.0);
        if f <= pts[0].freq_hz {
            return (pts[0].mag_db, phase(&pts[0]));
        }
        let last = pts.last().unwrap();
        if f >= last.freq_hz {
            return (last.mag_db, phase(last));
        }
        let i = pts.partition_point(|p| p.freq_hz <= f);
        let (a, b) = (&pts[i - 1], &pts[i]);
        let t = (f - a.freq_hz) / (b.freq_hz - a.freq_hz);
        (
            a.mag_db + t * (b.mag_db - a.mag_db),
            phase(a) + t * (phase(b) - phase(a)),
        )
    }

    /// Reads `freq_hz,mag_db[,phase_deg]` CSV text.
    pub fn from_csv_reader<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
        let headers = rdr.headers()?.clone();
        let cols: Vec<&str> = headers.iter().collect();
        if cols.len() < 2 || cols[0] != "freq_hz" || cols[1] != "mag_db" || (cols.len() == 3 && cols[2] != "phase_deg") || cols.len() > 3 {
            return Err(Error::Format(format!("unexpected response header {cols:?}")));
        }
        let mut points = Vec::new();
        for rec in rdr.deserialize() {
            let p: ResponsePoint = rec?;
            points.push(p);
        }
        Self::new(points)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }

    pub fn to_csv_string(&self) -> String {
        let mut s = String::from(if self.has_phase() { "freq_hz,mag_db,phase_deg\n" } else { "freq_hz,mag_db\n" });
        for p in &self.points {
            match p.phase_deg {
                Some(ph) if self.has_phase() => s.push_str(&format!("{},{},{}\n", p.freq_hz, p.mag_db, ph)),
                _ => s.push_str(&format!("{},{}\n", p.freq_hz, p.mag_db)),
            }
        }
        s
    }
}

/// Designs an odd-length FIR whose response matches `resp` at the `n_taps`
/// DFT frequencies of `rate_hz`.
///
/// Without a phase column the taps are symmetric (linear phase, delay
/// `(n_taps-1)/2`). With one, the tabulated phase is added on top of that delay.
pub fn fir_from_measured_response(resp: &FrequencyResponse, rate_hz: f64, n_taps: usize) -> Result<Vec<f64>> {
    if n_taps == 0 {
        return Err(Error::Config("n_taps must be positive".into()));
    }
    let n = n_taps | 1;
    let mid = (n - 1) / 2;
    let with_phase = resp.has_phase();
    let mut spec: Vec<Complex64> = (0..n)
        .map(|i| {
            // bins above n/2 mirror the negative frequencies
            let (k, sign) = if i <= mid { (i as f64, 1.0) } else { ((n - i) as f64, -1.0) };
            let (db, deg) = resp.eval(k * rate_hz / n as f64);
            let ph = if with_phase { sign * deg.to_radians() } else { 0.0 };
            Complex64::from_polar(10f64.powf(db / 20.0), ph)
        })
        .collect();
    FftPlanner::<f64>::new().plan_fft_inverse(n).process(&mut spec);
    // zero-phase impulse centred on index 0; rotate so it is centred on `mid`
    let taps = (0..n)
        .map(|j| spec[(j + n - mid) % n].re / n as f64)
        .collect();
    Ok(taps)
}

/// Complex response of real taps at `f_hz`, referenced to the centre tap.
pub fn realized_response_db(taps: &[f64], rate_hz: f64, f_hz: f64) -> f64 {
    let mid = (taps.len() - 1) as f64 / 2.0;
    let w = 2.0 * PI * f_hz / rate_hz;
    let h: Complex64 = taps
        .iter()
        .enumerate()
        .map(|(i, &t)| Complex64::from_polar(t, -w * (i as f64 - mid)))
        .sum();
    20.0 * h.norm().log10()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_table_gives_unit_impulse() {
        let r = FrequencyResponse::from_magnitudes(&[(0.0, 0.0), (1e9, 0.0)]).unwrap();
        let h = fir_from_measured_response(&r, 2.4576e9, 255).unwrap();
        assert_eq!(h.len(), 255);
        assert!((h[127] - 1.0).abs() < 1e-12);
        let side = h.iter().enumerate().filter(|(i, _)| *i != 127).map(|(_, v)| v.abs()).fold(0.0, f64::max);
        assert!(20.0 * side.log10() < -60.0 || side == 0.0);
    }

    #[test]
    fn single_pole_corner_is_realized() {
        let fs = 2.4576e9;
        let r = FrequencyResponse::single_pole(720e6, fs / 2.0, 257);
        let h = fir_from_measured_response(&r, fs, 255).unwrap();
        let at = realized_response_db(&h, fs, 720e6);
        assert!((at + 3.0103).abs() < 0.5, "{at}");
        // tolerance across the table up to 0.4 fs
        for p in r.points().iter().filter(|p| p.freq_hz <= 0.4 * fs) {
            let got = realized_response_db(&h, fs, p.freq_hz);
            assert!((got - p.mag_db).abs() < 0.5, "{} {} {}", p.freq_hz, got, p.mag_db);
        }
    }

    #[test]
    fn descending_frequencies_are_a_format_error() {
        let e = FrequencyResponse::from_magnitudes(&[(0.0, 0.0), (2e6, -1.0), (1e6, -2.0)]);
        assert!(matches!(e, Err(Error::Format(_))));
        let csv = "freq_hz,mag_db\n0,0\n5,-1\n5,-2\n";
        assert!(matches!(FrequencyResponse::from_csv_reader(csv.as_bytes()), Err(Error::Format(_))));
    }

    #[test]
    fn csv_round_trip_with_phase() {
        let csv = "freq_hz,mag_db,phase_deg\n0,0,0\n1e8,-1.5,-10\n2e8,-3,-20\n";
        let r = FrequencyResponse::from_csv_reader(csv.as_bytes()).unwrap();
        assert!(r.has_phase());
        let back = FrequencyResponse::from_csv_reader(r.to_csv_string().as_bytes()).unwrap();
        assert_eq!(r, back);
        let (db, deg) = r.eval(1.5e8);
        assert!((db + 2.25).abs() < 1e-12 && (deg + 15.0).abs() < 1e-12);
        assert_eq!(r.eval(5e8), (-3.0, -20.0));
    }

    #[test]
    fn bad_header_rejected() {
        assert!(FrequencyResponse::from_csv_reader("f,m\n0,0\n1,0\n".as_bytes()).is_err());
    }
}
