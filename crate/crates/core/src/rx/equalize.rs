//! Zero-forcing equalization.

use num_complex::Complex64;

use super::demod::ReceivedGrid;
use super::estimate::ChannelEstimate;
use crate::error::{Error, Result};

pub const DEFAULT_ZF_FLOOR: f64 = 1e-6;

/// Equalized subcarrier values with a per-RE validity mask.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualizedGrid {
    pub n_symbols: usize,
    pub n_subcarriers: usize,
    pub symbols_per_slot: usize,
    pub values: Vec<Complex64>,
    /// False where the channel estimate fell below the floor; such REs are
    /// excluded from EVM.
    pub valid: Vec<bool>,
}

impl EqualizedGrid {
    pub fn idx(&self, symbol: usize, subcarrier: usize) -> usize {
        symbol * self.n_subcarriers + subcarrier
    }

    pub fn get(&self, symbol: usize, subcarrier: usize) -> Complex64 {
        self.values[self.idx(symbol, subcarrier)]
    }

    /// Treats `values` as perfectly equalized (every RE valid).
    pub fn from_values(values: Vec<Complex64>, n_symbols: usize, n_subcarriers: usize, symbols_per_slot: usize) -> Self {
        assert_eq!(values.len(), n_symbols * n_subcarriers);
        Self { n_symbols, n_subcarriers, symbols_per_slot, valid: vec![true; values.len()], values }
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(|a, b| a.total_cmp(b));
    v[v.len() / 2]
}

/// `X = Y / H` per subcarrier. Subcarriers whose `|H|` is below `floor_rel`
/// times the slot's median `|H|` are masked.
pub fn zf_equalize(rx: &ReceivedGrid, h: &ChannelEstimate, floor_rel: f64) -> Result<EqualizedGrid> {
    if h.n_subcarriers() != rx.n_subcarriers {
        return Err(Error::Input("channel estimate width differs from the grid".into()));
    }
    if h.per_slot.len() < rx.n_slots() {
        return Err(Error::Input("channel estimate covers fewer slots than the grid".into()));
    }
    let n = rx.n_subcarriers;
    let mut values = vec![Complex64::new(0.0, 0.0); rx.values.len()];
    let mut valid = vec![false; rx.values.len()];
    for slot in 0..rx.n_slots() {
        let hs = &h.per_slot[slot];
        let floor = floor_rel * median(hs.iter().filter(|v| v.norm().is_finite()).map(|v| v.norm()).collect());
        let ok: Vec<bool> = hs
            .iter()
            .zip(&h.valid[slot])
            .map(|(v, &good)| good && v.norm() > floor && v.norm() > 0.0)
            .collect();
        for l in slot * rx.symbols_per_slot..(slot + 1) * rx.symbols_per_slot {
            for k in 0..n {
                let i = l * n + k;
                if ok[k] {
                    values[i] = rx.values[i] / hs[k];
                    valid[i] = true;
                }
            }
        }
    }
    if !valid.iter().any(|&v| v) {
        return Err(Error::Equalization("every subcarrier is below the estimate floor".into()));
    }
    Ok(EqualizedGrid { n_symbols: rx.n_symbols, n_subcarriers: n, symbols_per_slot: rx.symbols_per_slot, values, valid })
}
