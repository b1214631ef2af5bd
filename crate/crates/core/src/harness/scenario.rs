//! Scenario configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::{build_chain, ChannelChain, LinkKnobs, Preset};
use crate::conformance::{EvmReference, Limits};
use crate::error::{config, Result};
use crate::nr::{make_numerology, CarrierConfig, Numerology, ResourceGrid, TestModelId, TestModelSpec, TxFilter};
use crate::rx::RxConfig;

/// Where the channel chain acts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    /// Real RF signal at the passband rate.
    #[default]
    Passband,
    /// Complex baseband at the numerology rate; ACLR is not measured.
    Baseband,
}

/// Everything needed to reproduce one conformance run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Scenario {
    pub tm: TestModelId,
    pub scs_hz: f64,
    pub bandwidth_hz: f64,
    /// `None` places the carrier at 627 MHz with the default passband rate.
    pub carrier: Option<CarrierConfig>,
    /// Simulate the passband at 50 GS/s (only when `carrier` is `None`).
    pub high_rate: bool,
    pub domain: Domain,
    pub preset: Preset,
    /// Preset parameters; `None` takes the defaults for the carrier.
    pub knobs: Option<LinkKnobs>,
    /// Explicit stage list, used instead of the preset.
    pub chain: Option<ChannelChain>,
    pub rx: RxConfig,
    pub limits: Limits,
    pub evm_reference: EvmReference,
    pub seed: u64,
    pub n_subframes: usize,
    /// Raised-cosine transmit window overlap in samples.
    pub window_len: usize,
    pub tx_filter: TxFilter,
    /// Not part of the echo, so reports do not depend on where they are written.
    #[serde(skip_serializing)]
    pub out_dir: Option<PathBuf>,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            tm: TestModelId::Tm1_1,
            scs_hz: 30e3,
            bandwidth_hz: 20e6,
            carrier: None,
            high_rate: false,
            domain: Domain::Passband,
            preset: Preset::Ideal,
            knobs: None,
            chain: None,
            rx: RxConfig::default(),
            limits: Limits::default(),
            evm_reference: EvmReference::Known,
            seed: 1,
            n_subframes: 2,
            window_len: 32,
            tx_filter: TxFilter::Channel,
            out_dir: None,
        }
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn numerology(&self) -> Result<Numerology> {
        make_numerology(self.scs_hz, self.bandwidth_hz)
    }

    pub fn carrier_config(&self, num: &Numerology) -> Result<CarrierConfig> {
        let c = match &self.carrier {
            Some(c) => c.clone(),
            None if self.high_rate => CarrierConfig::high_rate(num),
            None => CarrierConfig::n71(num),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn test_model(&self, num: &Numerology) -> TestModelSpec {
        TestModelSpec::new(self.tm, num.n_rb, self.seed)
    }

    pub fn grid(&self, num: &Numerology) -> Result<ResourceGrid> {
        crate::nr::build_test_model_grid(&self.test_model(num), num, self.n_subframes)
    }

    pub fn knobs_for(&self, carrier: &CarrierConfig) -> LinkKnobs {
        self.knobs.clone().unwrap_or_else(|| LinkKnobs::for_carrier(carrier))
    }

    /// The explicit chain, or the preset's chain for this carrier.
    pub fn channel_chain(&self, carrier: &CarrierConfig) -> Result<ChannelChain> {
        if let Some(c) = &self.chain {
            return Ok(c.clone());
        }
        if self.domain == Domain::Baseband && self.preset != Preset::Ideal {
            return config(format!("preset {} models a passband link; use an explicit chain at baseband", self.preset));
        }
        Ok(build_chain(self.preset, carrier, &self.knobs_for(carrier), self.seed))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_subframes == 0 {
            return config("n_subframes must be at least 1");
        }
        if self.carrier.is_some() && self.high_rate {
            return config("high_rate applies only to the default carrier");
        }
        let num = self.numerology()?;
        self.test_model(&num).validate(&num)?;
        let carrier = self.carrier_config(&num)?;
        self.limits.validate()?;
        let rate = match self.domain {
            Domain::Passband => carrier.passband_rate_hz,
            Domain::Baseband => num.sample_rate_hz,
        };
        self.channel_chain(&carrier)?.validate(rate)?;
        Ok(())
    }

    /// Where artifacts go: the scenario's directory, `NRFSO_OUT_DIR`, or `nrfso-out`.
    pub fn resolved_out_dir(&self) -> PathBuf {
        self.out_dir.clone().unwrap_or_else(default_out_dir)
    }
}

pub const OUT_DIR_ENV: &str = "NRFSO_OUT_DIR";

pub fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("nrfso-out"))
}
