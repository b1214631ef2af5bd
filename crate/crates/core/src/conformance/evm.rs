//! Error vector magnitude over the PDSCH data REs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nr::{Modulation, ReRole, ResourceGrid};
use crate::rx::EqualizedGrid;

/// What the equalized symbols are compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum EvmReference {
    /// The transmitted grid.
    #[default]
    Known,
    /// Nearest constellation point of each equalized symbol (unboosted grids only).
    HardDecision,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulationEvm {
    pub modulation: Modulation,
    pub rms_pct: f64,
    pub n_re: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvmResult {
    pub rms_pct: f64,
    /// One entry per occupied subcarrier; `None` where no valid data RE exists.
    pub per_subcarrier_pct: Vec<Option<f64>>,
    pub per_modulation: Vec<ModulationEvm>,
    /// Number of data REs that entered the average.
    pub n_re: usize,
    pub n_symbols: usize,
}

impl EvmResult {
    /// Median of the defined per-subcarrier values.
    pub fn median_subcarrier_pct(&self) -> f64 {
        let mut v: Vec<f64> = self.per_subcarrier_pct.iter().flatten().copied().collect();
        v.sort_by(|a, b| a.total_cmp(b));
        if v.is_empty() { 0.0 } else { v[v.len() / 2] }
    }
}

/// RMS EVM `100 sqrt(sum |X - R|^2 / sum |R|^2)` over valid data REs, DMRS excluded.
///
/// `reference` may be longer than `eq`; its leading symbols are used.
pub fn measure_evm(eq: &EqualizedGrid, reference: &ResourceGrid, mode: EvmReference) -> Result<EvmResult> {
    if eq.n_subcarriers != reference.n_subcarriers || eq.n_symbols > reference.n_symbols {
        return Err(Error::Input("equalized and reference grids are not congruent".into()));
    }
    let n_sc = eq.n_subcarriers;
    let m = reference.modulation;
    let mut err_k = vec![0.0; n_sc];
    let mut ref_k = vec![0.0; n_sc];
    let mut n_re = 0;
    for l in 0..eq.n_symbols {
        for k in 0..n_sc {
            let i = eq.idx(l, k);
            if !eq.valid[i] || reference.roles[i] != ReRole::Data {
                continue;
            }
            let x = eq.values[i];
            let r = match mode {
                EvmReference::Known => reference.reference[i],
                EvmReference::HardDecision => m.hard_decision(x),
            };
            err_k[k] += (x - r).norm_sqr();
            ref_k[k] += r.norm_sqr();
            n_re += 1;
        }
    }
    let (e, p): (f64, f64) = (err_k.iter().sum(), ref_k.iter().sum());
    if p <= 0.0 {
        return Err(Error::UndefinedEvm);
    }
    let rms_pct = 100.0 * (e / p).sqrt();
    let per_subcarrier_pct = err_k
        .iter()
        .zip(&ref_k)
        .map(|(e, p)| if *p > 0.0 { Some(100.0 * (e / p).sqrt()) } else { None })
        .collect();
    Ok(EvmResult {
        rms_pct,
        per_subcarrier_pct,
        per_modulation: vec![ModulationEvm { modulation: m, rms_pct, n_re }],
        n_re,
        n_symbols: eq.n_symbols,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::stages::complex_noise;
    use crate::nr::{build_test_model_grid, make_numerology, TestModelId, TestModelSpec};
    use num_complex::Complex64;

    fn grid(id: TestModelId, subframes: usize) -> ResourceGrid {
        let num = make_numerology(30e3, 20e6).unwrap();
        build_test_model_grid(&TestModelSpec::new(id, 51, 4), &num, subframes).unwrap()
    }

    fn eq_of(g: &ResourceGrid, values: Vec<Complex64>) -> EqualizedGrid {
        EqualizedGrid::from_values(values, g.n_symbols, g.n_subcarriers, g.symbols_per_slot)
    }

    #[test]
    fn perfect_and_proportional() {
        let g = grid(TestModelId::Tm3_1, 1);
        let r = measure_evm(&eq_of(&g, g.symbols.clone()), &g, EvmReference::Known).unwrap();
        assert_eq!(r.rms_pct, 0.0);
        assert_eq!(r.per_subcarrier_pct.len(), 612);
        let r = measure_evm(&eq_of(&g, g.symbols.iter().map(|v| v * 1.1).collect()), &g, EvmReference::Known).unwrap();
        assert!((r.rms_pct - 10.0).abs() < 1e-9);
        let n_data = g.roles.iter().filter(|&&r| r == ReRole::Data).count();
        assert_eq!(r.n_re, n_data);
    }

    #[test]
    fn dmrs_errors_are_ignored() {
        let g = grid(TestModelId::Tm1_1, 1);
        let v = g
            .symbols
            .iter()
            .zip(&g.roles)
            .map(|(&s, &r)| if r == ReRole::Dmrs { s * 5.0 } else { s })
            .collect();
        assert_eq!(measure_evm(&eq_of(&g, v), &g, EvmReference::Known).unwrap().rms_pct, 0.0);
    }

    #[test]
    fn thirty_db_snr_gives_3_16_pct() {
        let g = grid(TestModelId::Tm3_1a, 10);
        let noise = complex_noise(g.symbols.len(), 1e-3, 17);
        let v = g.symbols.iter().zip(noise).map(|(a, b)| a + b).collect();
        let r = measure_evm(&eq_of(&g, v), &g, EvmReference::Known).unwrap();
        assert!(r.n_re >= 100_000);
        assert!((r.rms_pct - 100.0 * 10f64.powf(-1.5)).abs() < 0.2, "{}", r.rms_pct);
    }

    #[test]
    fn hard_decision_matches_known_at_high_snr() {
        let g = grid(TestModelId::Tm3_1, 1);
        let noise = complex_noise(g.symbols.len(), 1e-4, 3);
        let v: Vec<Complex64> = g.symbols.iter().zip(noise).map(|(a, b)| a + b).collect();
        let a = measure_evm(&eq_of(&g, v.clone()), &g, EvmReference::Known).unwrap();
        let b = measure_evm(&eq_of(&g, v), &g, EvmReference::HardDecision).unwrap();
        assert!((a.rms_pct - b.rms_pct).abs() < 1e-9);
    }

    #[test]
    fn masked_res_are_excluded_and_zero_reference_errors() {
        let g = grid(TestModelId::Tm3_1, 1);
        let mut eq = eq_of(&g, g.symbols.iter().map(|v| v * 2.0).collect());
        eq.valid.iter_mut().for_each(|v| *v = false);
        assert!(matches!(measure_evm(&eq, &g, EvmReference::Known), Err(Error::UndefinedEvm)));
    }

    #[test]
    fn added_noise_never_lowers_evm() {
        let g = grid(TestModelId::Tm3_1, 2);
        let base = complex_noise(g.symbols.len(), 1e-3, 5);
        let v: Vec<Complex64> = g.symbols.iter().zip(&base).map(|(a, b)| a + b).collect();
        let mut last = measure_evm(&eq_of(&g, v.clone()), &g, EvmReference::Known).unwrap().rms_pct;
        let mut cur = v;
        for seed in 0..5 {
            let extra = complex_noise(g.symbols.len(), 5e-4, 100 + seed);
            cur = cur.iter().zip(&extra).map(|(a, b)| a + b).collect();
            let e = measure_evm(&eq_of(&g, cur.clone()), &g, EvmReference::Known).unwrap().rms_pct;
            assert!(e > last, "{e} <= {last}");
            last = e;
        }
    }
}
