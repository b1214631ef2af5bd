//! NR-FR1 test-model resource grids (TM1.1, TM1.2, TM3.1, TM3.1a).
//!
//! The grids carry full-band PDSCH with one DMRS symbol per slot. Control
//! channels, SSB and PT-RS are not modelled.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::modulation::{qam_modulate, Modulation};
use super::numerology::Numerology;
use super::prbs::Prbs23;
use crate::error::{config, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TestModelId {
    #[serde(rename = "TM1.1")]
    Tm1_1,
    #[serde(rename = "TM1.2")]
    Tm1_2,
    #[serde(rename = "TM3.1")]
    Tm3_1,
    #[serde(rename = "TM3.1a")]
    Tm3_1a,
}

impl TestModelId {
    pub const ALL: [TestModelId; 4] = [Self::Tm1_1, Self::Tm1_2, Self::Tm3_1, Self::Tm3_1a];

    pub fn modulation(self) -> Modulation {
        match self {
            Self::Tm1_1 | Self::Tm1_2 => Modulation::Qpsk,
            Self::Tm3_1 => Modulation::Qam64,
            Self::Tm3_1a => Modulation::Qam256,
        }
    }

    /// TM1.x exercise unwanted emissions, TM3.x modulation quality.
    pub fn requires_aclr(self) -> bool {
        matches!(self, Self::Tm1_1 | Self::Tm1_2)
    }

    pub fn requires_evm(self) -> bool {
        !self.requires_aclr()
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Tm1_1 => "TM1.1",
            Self::Tm1_2 => "TM1.2",
            Self::Tm3_1 => "TM3.1",
            Self::Tm3_1a => "TM3.1a",
        }
    }
}

impl fmt::Display for TestModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_uppercase();
        let t = t.strip_prefix("NR-FR1-").unwrap_or(&t);
        match t {
            "TM1.1" => Ok(Self::Tm1_1),
            "TM1.2" => Ok(Self::Tm1_2),
            "TM3.1" => Ok(Self::Tm3_1),
            "TM3.1A" => Ok(Self::Tm3_1a),
            _ => Err(Error::Config(format!("unknown test model `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DmrsConfig {
    /// Symbol indices within a slot carrying DMRS.
    pub symbols: Vec<usize>,
    /// Every `stride`-th subcarrier of a DMRS symbol is a pilot.
    pub stride: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestModelSpec {
    pub id: TestModelId,
    pub modulation: Modulation,
    /// Per-RB power offset in dB.
    pub power_pattern_db: Vec<f64>,
    pub prbs_seed: u64,
    pub dmrs: DmrsConfig,
}

/// Share of RBs boosted in the default TM1.2 pattern.
pub const TM1_2_BOOST_FRACTION: f64 = 0.4;
pub const TM1_2_BOOST_DB: f64 = 3.0;

impl TestModelSpec {
    /// Default layout: DMRS on symbol 2 with stride 2, DMRS seed = data seed + 1.
    pub fn new(id: TestModelId, n_rb: usize, seed: u64) -> Self {
        let power_pattern_db = match id {
            TestModelId::Tm1_2 => tm1_2_default_pattern(n_rb),
            _ => vec![0.0; n_rb],
        };
        Self {
            id,
            modulation: id.modulation(),
            power_pattern_db,
            prbs_seed: seed,
            dmrs: DmrsConfig {
                symbols: vec![2],
                stride: 2,
                seed: seed.wrapping_add(1),
            },
        }
    }

    pub fn validate(&self, num: &Numerology) -> Result<()> {
        if self.modulation != self.id.modulation() {
            return config(format!("{} must use {}", self.id, self.id.modulation().name()));
        }
        if self.power_pattern_db.len() != num.n_rb {
            return config("power pattern length must equal n_rb");
        }
        if self.id != TestModelId::Tm1_2 && self.power_pattern_db.iter().any(|&p| p != 0.0) {
            return config(format!("{} has no power boosting", self.id));
        }
        if self.power_pattern_db.iter().any(|p| !p.is_finite()) {
            return config("power offsets must be finite");
        }
        if self.dmrs.stride == 0 || self.dmrs.symbols.is_empty() {
            return config("DMRS needs at least one symbol and a non-zero stride");
        }
        if self.dmrs.symbols.iter().any(|&s| s >= num.symbols_per_slot) {
            return config("DMRS symbol index outside the slot");
        }
        Ok(())
    }
}

/// First 40% of RBs at +3 dB, the rest lowered so total power is unchanged.
pub fn tm1_2_default_pattern(n_rb: usize) -> Vec<f64> {
    let n_boost = (TM1_2_BOOST_FRACTION * n_rb as f64).round() as usize;
    let boost = 10f64.powf(TM1_2_BOOST_DB / 10.0);
    let rest = n_rb - n_boost;
    let deboost_lin = (n_rb as f64 - n_boost as f64 * boost) / rest as f64;
    let deboost = 10.0 * deboost_lin.log10();
    (0..n_rb)
        .map(|rb| if rb < n_boost { TM1_2_BOOST_DB } else { deboost })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReRole {
    Data,
    Dmrs,
}

/// Complex symbols indexed by (OFDM symbol, subcarrier), row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceGrid {
    pub n_symbols: usize,
    pub n_subcarriers: usize,
    pub symbols_per_slot: usize,
    pub symbols: Vec<Complex64>,
    pub roles: Vec<ReRole>,
    /// Untouched copy of what was transmitted.
    pub reference: Vec<Complex64>,
    pub modulation: Modulation,
}

impl ResourceGrid {
    pub fn zeros(n_symbols: usize, n_subcarriers: usize, symbols_per_slot: usize) -> Self {
        let n = n_symbols * n_subcarriers;
        Self {
            n_symbols,
            n_subcarriers,
            symbols_per_slot,
            symbols: vec![Complex64::new(0.0, 0.0); n],
            roles: vec![ReRole::Data; n],
            reference: vec![Complex64::new(0.0, 0.0); n],
            modulation: Modulation::Qpsk,
        }
    }

    pub fn idx(&self, symbol: usize, subcarrier: usize) -> usize {
        symbol * self.n_subcarriers + subcarrier
    }

    pub fn get(&self, symbol: usize, subcarrier: usize) -> Complex64 {
        self.symbols[self.idx(symbol, subcarrier)]
    }

    pub fn set(&mut self, symbol: usize, subcarrier: usize, v: Complex64) {
        let i = self.idx(symbol, subcarrier);
        self.symbols[i] = v;
        self.reference[i] = v;
    }

    pub fn row(&self, symbol: usize) -> &[Complex64] {
        &self.symbols[symbol * self.n_subcarriers..(symbol + 1) * self.n_subcarriers]
    }

    pub fn role(&self, symbol: usize, subcarrier: usize) -> ReRole {
        self.roles[self.idx(symbol, subcarrier)]
    }

    pub fn n_slots(&self) -> usize {
        self.n_symbols / self.symbols_per_slot
    }

    /// Symbol indices (grid-global) of the DMRS symbols in `slot`.
    pub fn dmrs_symbols_in_slot(&self, slot: usize) -> Vec<usize> {
        let lo = slot * self.symbols_per_slot;
        (lo..lo + self.symbols_per_slot)
            .filter(|&l| self.row_roles(l).contains(&ReRole::Dmrs))
            .collect()
    }

    pub fn row_roles(&self, symbol: usize) -> &[ReRole] {
        &self.roles[symbol * self.n_subcarriers..(symbol + 1) * self.n_subcarriers]
    }

    /// A grid of the same shape holding `values` instead of the transmitted symbols.
    pub fn with_symbols(&self, values: Vec<Complex64>) -> Self {
        assert_eq!(values.len(), self.symbols.len());
        Self {
            symbols: values,
            ..self.clone()
        }
    }

    /// The grid with every data RE zeroed, leaving only the pilots.
    pub fn dmrs_only(&self) -> Self {
        let values = self
            .reference
            .iter()
            .zip(&self.roles)
            .map(|(&v, &r)| if r == ReRole::Dmrs { v } else { Complex64::new(0.0, 0.0) })
            .collect();
        self.with_symbols(values)
    }
}

fn qpsk_sequence(prbs: &mut Prbs23, n: usize) -> Vec<Complex64> {
    qam_modulate(&prbs.bits(2 * n), 4).expect("even bit count")
}

/// Fills a grid of `n_subframes` x 1 ms with the test model's content.
pub fn build_test_model_grid(
    tm: &TestModelSpec,
    num: &Numerology,
    n_subframes: usize,
) -> Result<ResourceGrid> {
    if n_subframes == 0 {
        return config("grid must span at least one subframe");
    }
    tm.validate(num)?;
    let n_sc = num.n_subcarriers();
    let n_symbols = n_subframes * num.symbols_per_subframe();
    let mut grid = ResourceGrid::zeros(n_symbols, n_sc, num.symbols_per_slot);
    grid.modulation = tm.modulation;

    for l in 0..n_symbols {
        if tm.dmrs.symbols.contains(&(l % num.symbols_per_slot)) {
            for k in (0..n_sc).step_by(tm.dmrs.stride) {
                let i = grid.idx(l, k);
                grid.roles[i] = ReRole::Dmrs;
            }
        }
    }

    let n_data = grid.roles.iter().filter(|&&r| r == ReRole::Data).count();
    let n_dmrs = grid.roles.len() - n_data;
    let bps = tm.modulation.bits_per_symbol();
    let data = qam_modulate(&Prbs23::new(tm.prbs_seed).bits(n_data * bps), tm.modulation.order())?;
    let pilots = qpsk_sequence(&mut Prbs23::new(tm.dmrs.seed), n_dmrs);

    let amp: Vec<f64> = tm
        .power_pattern_db
        .iter()
        .map(|db| 10f64.powf(db / 20.0))
        .collect();
    let (mut di, mut pi) = (0, 0);
    for i in 0..grid.symbols.len() {
        let k = i % n_sc;
        let v = match grid.roles[i] {
            ReRole::Data => {
                di += 1;
                data[di - 1]
            }
            ReRole::Dmrs => {
                pi += 1;
                pilots[pi - 1]
            }
        };
        grid.symbols[i] = v * amp[k / 12];
    }
    grid.reference = grid.symbols.clone();
    Ok(grid)
}
