//! Gray-mapped square QAM following the NR modulation mapper.
//!
//! For a square constellation with `2m` bits per symbol the in-phase bits are
//! the even positions b0, b2, .., and the quadrature bits the odd ones. The
//! amplitude along each axis is built from the inside out:
//! `(1-2b0) * (2^(m-1) - (1-2b2) * (2^(m-2) - ...))`, then the whole
//! constellation is scaled to unit mean power.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Modulation {
    #[serde(rename = "QPSK")]
    Qpsk,
    #[serde(rename = "64QAM")]
    Qam64,
    #[serde(rename = "256QAM")]
    Qam256,
}

impl Modulation {
    pub fn from_order(order: usize) -> Result<Self> {
        match order {
            4 => Ok(Self::Qpsk),
            64 => Ok(Self::Qam64),
            256 => Ok(Self::Qam256),
            _ => Err(Error::Input(format!("unsupported modulation order {order}"))),
        }
    }

    pub fn order(self) -> usize {
        match self {
            Self::Qpsk => 4,
            Self::Qam64 => 64,
            Self::Qam256 => 256,
        }
    }

    pub fn bits_per_symbol(self) -> usize {
        self.order().trailing_zeros() as usize
    }

    fn axis_bits(self) -> usize {
        self.bits_per_symbol() / 2
    }

    /// sqrt of the mean power of the unnormalized odd-integer grid: 2, 42, 170.
    fn norm(self) -> f64 {
        let m = self.order() as f64;
        (2.0 * (m - 1.0) / 3.0).sqrt()
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Qpsk => "QPSK",
            Self::Qam64 => "64QAM",
            Self::Qam256 => "256QAM",
        }
    }

    /// Maps one symbol worth of bits (`bits_per_symbol` entries of 0/1).
    pub fn map(self, bits: &[u8]) -> Complex64 {
        debug_assert_eq!(bits.len(), self.bits_per_symbol());
        let m = self.axis_bits();
        let axis = |offset: usize| -> f64 {
            let mut t = 1.0;
            for j in (1..m).rev() {
                t = (1u32 << (m - j)) as f64 - (1.0 - 2.0 * bits[offset + 2 * j] as f64) * t;
            }
            (1.0 - 2.0 * bits[offset] as f64) * t
        };
        Complex64::new(axis(0), axis(1)) / self.norm()
    }

    /// All constellation points indexed by their bit label (b0 as the MSB).
    pub fn alphabet(self) -> Vec<Complex64> {
        let n = self.bits_per_symbol();
        (0..self.order())
            .map(|label| {
                let bits: Vec<u8> = (0..n).map(|i| ((label >> (n - 1 - i)) & 1) as u8).collect();
                self.map(&bits)
            })
            .collect()
    }

    /// Nearest constellation point (per-axis slicing of the square grid).
    pub fn hard_decision(self, z: Complex64) -> Complex64 {
        let levels = 1i64 << self.axis_bits();
        let slice = |v: f64| -> f64 {
            let u = v * self.norm();
            // nearest odd integer
            let k = 2.0 * ((u - 1.0) / 2.0).round() + 1.0;
            k.clamp(-(levels as f64 - 1.0), levels as f64 - 1.0)
        };
        Complex64::new(slice(z.re), slice(z.im)) / self.norm()
    }
}

/// Maps a bit stream to unit-average-power QAM symbols.
pub fn qam_modulate(bits: &[u8], order: usize) -> Result<Vec<Complex64>> {
    let m = Modulation::from_order(order)?;
    let bps = m.bits_per_symbol();
    if !bits.len().is_multiple_of(bps) {
        return Err(Error::Input(format!(
            "bit count {} not divisible by {bps}",
            bits.len()
        )));
    }
    Ok(bits.chunks_exact(bps).map(|c| m.map(c)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// The mapper equations written out literally for each order.
    fn table_oracle(m: Modulation, b: &[u8]) -> Complex64 {
        let s = |i: usize| 1.0 - 2.0 * b[i] as f64;
        match m {
            Modulation::Qpsk => Complex64::new(s(0), s(1)) / 2f64.sqrt(),
            Modulation::Qam64 => Complex64::new(
                s(0) * (4.0 - s(2) * (2.0 - s(4))),
                s(1) * (4.0 - s(3) * (2.0 - s(5))),
            ) / 42f64.sqrt(),
            Modulation::Qam256 => Complex64::new(
                s(0) * (8.0 - s(2) * (4.0 - s(4) * (2.0 - s(6)))),
                s(1) * (8.0 - s(3) * (4.0 - s(5) * (2.0 - s(7)))),
            ) / 170f64.sqrt(),
        }
    }

    const ALL: [Modulation; 3] = [Modulation::Qpsk, Modulation::Qam64, Modulation::Qam256];

    #[test]
    fn matches_mapper_table_exhaustively() {
        for m in ALL {
            let n = m.bits_per_symbol();
            for label in 0..m.order() {
                let bits: Vec<u8> = (0..n).map(|i| ((label >> (n - 1 - i)) & 1) as u8).collect();
                let got = m.map(&bits);
                let want = table_oracle(m, &bits);
                assert!((got - want).norm() < 1e-15, "{m:?} label {label}");
            }
        }
    }

    #[test]
    fn qpsk_zero_bits() {
        let s = qam_modulate(&[0, 0], 4).unwrap();
        let v = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s[0] - Complex64::new(v, v)).norm() < 1e-15);
    }

    #[test]
    fn unit_power_and_distinct_points() {
        for m in ALL {
            let a = m.alphabet();
            let p = a.iter().map(|z| z.norm_sqr()).sum::<f64>() / a.len() as f64;
            assert!((p - 1.0).abs() < 1e-12, "{m:?}");
            for i in 0..a.len() {
                for j in i + 1..a.len() {
                    assert!((a[i] - a[j]).norm() > 1e-3);
                }
            }
        }
        for z in Modulation::Qpsk.alphabet() {
            assert!((z.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn gray_neighbours_differ_by_one_bit() {
        for m in ALL {
            let a = m.alphabet();
            let step = 2.0 / m.norm();
            for i in 0..a.len() {
                for j in 0..a.len() {
                    let d = (a[i] - a[j]).norm();
                    if (d - step).abs() < 1e-9 {
                        assert_eq!((i ^ j).count_ones(), 1, "{m:?} {i} {j}");
                    }
                }
            }
        }
    }

    #[test]
    fn indivisible_bit_count_rejected() {
        assert!(qam_modulate(&[0, 1, 1], 4).is_err());
        assert!(qam_modulate(&[0; 10], 64).is_err());
        assert!(qam_modulate(&[0; 8], 16).is_err());
    }

    proptest! {
        #[test]
        fn hard_decision_recovers_points(label in 0usize..256, dre in -0.3f64..0.3, dim in -0.3f64..0.3) {
            for m in ALL {
                let a = m.alphabet();
                let p = a[label % a.len()];
                let d = Complex64::new(dre, dim) / m.norm();
                prop_assert!((m.hard_decision(p + d) - p).norm() < 1e-12);
            }
        }
    }
}
