//! Transmitter limits and pass/fail verdicts.

use serde::{Deserialize, Serialize};

use super::aclr::AclrResult;
use super::evm::EvmResult;
use crate::error::{config, Error, Result};
use crate::nr::{Modulation, TestModelId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvmLimit {
    pub modulation: Modulation,
    /// Conformance-test limit in percent.
    pub conformance_pct: f64,
    /// Minimum requirement in percent.
    pub minimum_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Limits {
    pub aclr_min_db: f64,
    pub evm_max_pct: Vec<EvmLimit>,
}

impl Default for Limits {
    fn default() -> Self {
        let lim = |modulation, conformance_pct, minimum_pct| EvmLimit { modulation, conformance_pct, minimum_pct };
        Self {
            aclr_min_db: 44.2,
            evm_max_pct: vec![
                lim(Modulation::Qpsk, 18.5, 17.5),
                lim(Modulation::Qam64, 9.0, 8.0),
                lim(Modulation::Qam256, 4.5, 3.5),
            ],
        }
    }
}

impl Limits {
    pub fn validate(&self) -> Result<()> {
        if !(self.aclr_min_db > 0.0) {
            return config("aclr_min_db must be positive");
        }
        for l in &self.evm_max_pct {
            if !(l.minimum_pct > 0.0) || l.conformance_pct < l.minimum_pct {
                return config(format!(
                    "{} EVM limits need 0 < minimum <= conformance",
                    l.modulation.name()
                ));
            }
        }
        Ok(())
    }

    pub fn evm_limit(&self, m: Modulation) -> Option<&EvmLimit> {
        self.evm_max_pct.iter().find(|l| l.modulation == m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tier {
    Conformance,
    Minimum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    /// `aclr-lower`, `aclr-upper` or `evm`.
    pub test: String,
    pub tier: Tier,
    pub measured: f64,
    pub limit: f64,
    /// Positive when passing: measured minus limit for ACLR, limit minus measured for EVM.
    pub margin: f64,
    pub unit: String,
    pub pass: bool,
}

/// Verdicts for every measurement present; fails when a measurement the
/// test model requires is missing.
pub fn evaluate_limits(
    aclr: Option<&AclrResult>,
    evm: Option<&EvmResult>,
    tm: TestModelId,
    limits: &Limits,
) -> Result<Vec<Verdict>> {
    limits.validate()?;
    if tm.requires_aclr() && aclr.is_none() {
        return Err(Error::IncompleteTest(format!("{tm} requires an ACLR measurement")));
    }
    if tm.requires_evm() && evm.is_none() {
        return Err(Error::IncompleteTest(format!("{tm} requires an EVM measurement")));
    }
    let mut out = Vec::new();
    if let Some(a) = aclr {
        for (test, v) in [("aclr-lower", a.aclr_lower_db), ("aclr-upper", a.aclr_upper_db)] {
            let margin = v - limits.aclr_min_db;
            out.push(Verdict {
                test: test.into(),
                tier: Tier::Conformance,
                measured: v,
                limit: limits.aclr_min_db,
                margin,
                unit: "dB".into(),
                pass: margin >= 0.0,
            });
        }
    }
    if let Some(e) = evm {
        let m = tm.modulation();
        let lim = limits
            .evm_limit(m)
            .ok_or_else(|| Error::IncompleteTest(format!("no EVM limit for {}", m.name())))?;
        for (tier, limit) in [(Tier::Conformance, lim.conformance_pct), (Tier::Minimum, lim.minimum_pct)] {
            let margin = limit - e.rms_pct;
            out.push(Verdict {
                test: "evm".into(),
                tier,
                measured: e.rms_pct,
                limit,
                margin,
                unit: "%".into(),
                pass: margin >= 0.0,
            });
        }
    }
    Ok(out)
}

pub fn all_pass(verdicts: &[Verdict]) -> bool {
    verdicts.iter().all(|v| v.pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn aclr(lo: f64, hi: f64) -> AclrResult {
        AclrResult {
            assigned_power: 1.0,
            lower_power: 10f64.powf(-lo / 10.0),
            upper_power: 10f64.powf(-hi / 10.0),
            aclr_lower_db: lo,
            aclr_upper_db: hi,
            capped_lower: false,
            capped_upper: false,
            integration_bw_hz: 18.36e6,
            channel_spacing_hz: 20e6,
            bin_hz: 75e3,
        }
    }

    fn evm(pct: f64) -> EvmResult {
        EvmResult { rms_pct: pct, per_subcarrier_pct: vec![], per_modulation: vec![], n_re: 1, n_symbols: 1 }
    }

    #[test]
    fn aclr_margins() {
        let v = evaluate_limits(Some(&aclr(45.0, 46.1)), None, TestModelId::Tm1_1, &Limits::default()).unwrap();
        assert_eq!(v.len(), 2);
        assert!(all_pass(&v));
        assert!((v[0].margin - 0.8).abs() < 1e-9);
        assert!((v[1].margin - 1.9).abs() < 1e-9);
        let v = evaluate_limits(Some(&aclr(44.0, 46.1)), None, TestModelId::Tm1_2, &Limits::default()).unwrap();
        assert!(!v[0].pass && v[1].pass);
    }

    #[test]
    fn evm_tiers_are_separate() {
        let v = evaluate_limits(None, Some(&evm(8.5)), TestModelId::Tm3_1, &Limits::default()).unwrap();
        let conf = v.iter().find(|v| v.tier == Tier::Conformance).unwrap();
        let min = v.iter().find(|v| v.tier == Tier::Minimum).unwrap();
        assert!(conf.pass && !min.pass);
        assert_eq!((conf.limit, min.limit), (9.0, 8.0));
        let v = evaluate_limits(None, Some(&evm(3.4)), TestModelId::Tm3_1a, &Limits::default()).unwrap();
        assert!(all_pass(&v));
        assert_eq!(v[0].limit, 4.5);
    }

    #[test]
    fn missing_measurement_is_incomplete() {
        let l = Limits::default();
        assert!(matches!(evaluate_limits(None, None, TestModelId::Tm3_1a, &l), Err(Error::IncompleteTest(_))));
        assert!(matches!(evaluate_limits(None, Some(&evm(1.0)), TestModelId::Tm1_1, &l), Err(Error::IncompleteTest(_))));
    }

    #[test]
    fn both_reported_when_available() {
        let v = evaluate_limits(Some(&aclr(50.0, 50.0)), Some(&evm(1.0)), TestModelId::Tm1_1, &Limits::default()).unwrap();
        assert_eq!(v.len(), 4);
        assert_eq!(v[2].limit, 18.5);
    }

    #[test]
    fn invalid_limits_rejected() {
        let mut l = Limits::default();
        l.evm_max_pct[1].minimum_pct = 10.0;
        assert!(l.validate().is_err());
        let l = Limits { aclr_min_db: 0.0, ..Limits::default() };
        assert!(l.validate().is_err());
    }
}
