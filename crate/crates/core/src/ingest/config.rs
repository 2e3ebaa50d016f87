//! Model configuration file. A user file only needs the keys it changes;
//! everything else keeps the calibrated defaults.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::affect::{DecayTable, HolidayTable, SatelliteRegimes, ShockConfig};
use crate::backtest::BacktestConfig;
use crate::cogvec::{DimensionRegistry, Registry, DEFAULT_DIMENSIONS};
use crate::error::{Error, Result};
use crate::garch::pir::PirConfig;
use crate::garch::{GarchMode, ParamArsenal};
use crate::macrostate::{QuadrantPrototypes, DEFAULT_MCFI_ALPHA};
use crate::strategy::StrategyConfig;

/// Dimensions the simulation and macro indices read by name.
pub const REQUIRED_DIMENSIONS: [&str; 8] = [
    "joy",
    "anticipation",
    "fear",
    "agency",
    "fomo",
    "greed",
    "regret",
    "uncertainty",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegistrySection {
    pub labels: Vec<String>,
}

impl Default for RegistrySection {
    fn default() -> Self {
        RegistrySection {
            labels: DEFAULT_DIMENSIONS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    /// Reject arsenal ranges that leave the reference table.
    pub strict_ranges: bool,
    pub mcfi_alpha: f64,
    pub noise_sd: f64,
    pub garch_mode: GarchMode,
    pub registry: RegistrySection,
    pub arsenal: ParamArsenal,
    pub decay: DecayTable,
    pub holiday: HolidayTable,
    pub shock: ShockConfig,
    pub satellite: SatelliteRegimes,
    pub quadrants: QuadrantPrototypes,
    pub strategy: StrategyConfig,
    pub backtest: BacktestConfig,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            strict_ranges: false,
            mcfi_alpha: DEFAULT_MCFI_ALPHA,
            noise_sd: 0.0,
            garch_mode: GarchMode::Dynamic,
            registry: RegistrySection::default(),
            arsenal: ParamArsenal::default(),
            decay: DecayTable::default(),
            holiday: HolidayTable::default(),
            shock: ShockConfig::default(),
            satellite: SatelliteRegimes::default(),
            quadrants: QuadrantPrototypes::default(),
            strategy: StrategyConfig::default(),
            backtest: BacktestConfig::default(),
        }
    }
}

fn merge(base: &mut toml::Value, patch: toml::Value) {
    match (base, patch) {
        (toml::Value::Table(b), toml::Value::Table(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

impl ModelConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let patch: toml::Value = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut base = toml::Value::try_from(ModelConfig::default())
            .map_err(|e| Error::Config(format!("default config: {e}")))?;
        merge(&mut base, patch);
        let cfg: ModelConfig = base
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn registry(&self) -> Result<Registry> {
        Ok(DimensionRegistry::new(self.registry.labels.iter().map(String::as_str))?.shared())
    }

    pub fn validate(&self) -> Result<()> {
        let reg = self.registry()?;
        let known = |dim: &str, place: &str| -> Result<()> {
            if reg.contains(dim) {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "{place} refers to dimension `{dim}` missing from the registry"
                )))
            }
        };
        for dim in REQUIRED_DIMENSIONS {
            known(dim, "the model")?;
        }
        for dim in self.decay.0.keys() {
            known(dim, "decay")?;
        }
        for dim in self.holiday.0.keys() {
            known(dim, "holiday")?;
        }
        for (class, delta) in &self.shock.events {
            for dim in delta.keys() {
                known(dim, &format!("shock.events.{class}"))?;
            }
        }
        for (q, qp) in &self.arsenal.quadrants {
            known(
                &qp.core_dimension,
                &format!("arsenal.quadrants.{}", q.letter()),
            )?;
        }
        if !(0.0..=1.0).contains(&self.mcfi_alpha) {
            return Err(Error::OutOfRange {
                name: "mcfi_alpha".into(),
                value: self.mcfi_alpha,
                lo: 0.0,
                hi: 1.0,
            });
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return Err(Error::invalid("noise_sd", "must be a finite value >= 0"));
        }
        self.decay.validate()?;
        self.holiday.validate()?;
        self.shock.validate()?;
        self.satellite.validate()?;
        self.arsenal.validate()?;
        if self.strict_ranges {
            self.arsenal.check_reference_ranges()?;
        }
        self.quadrants.validate()?;
        self.strategy.validate()?;
        self.backtest.validate()?;
        Ok(())
    }

    pub fn pir_config(&self) -> PirConfig {
        PirConfig {
            decay: self.decay.clone(),
            satellite: self.satellite.clone(),
            shock: self.shock.clone(),
            arsenal: self.arsenal.clone(),
            garch_mode: self.garch_mode,
            prototypes: self.quadrants.clone(),
            mcfi_alpha: self.mcfi_alpha,
            noise_sd: self.noise_sd,
        }
    }
}

pub fn load_model_config(path: &Path) -> Result<ModelConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ModelConfig::from_toml_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::macrostate::QuadrantId;

    #[test]
    fn defaults_carry_calibrated_constants() {
        let cfg = ModelConfig::from_toml_str("").unwrap();
        assert_eq!(cfg, ModelConfig::default());
        assert_eq!(cfg.shock.lambda, 1.5);
        assert_eq!(cfg.shock.mdi_threshold, 1.2);
        assert_eq!(cfg.backtest.cost_rate, 0.0026);
        assert_eq!(cfg.strategy.fear_stop_base, 0.30);
        assert_eq!(cfg.decay.0["fear"].alpha, 0.32);
    }

    #[test]
    fn serialized_defaults_reload_identically() {
        let text = ModelConfig::default().to_toml_string().unwrap();
        for section in [
            "[registry]",
            "[arsenal]",
            "[decay",
            "[holiday]",
            "[shock]",
            "[satellite",
            "[quadrants]",
            "[strategy]",
            "[backtest]",
        ] {
            assert!(text.contains(section), "missing {section}");
        }
        assert_eq!(
            ModelConfig::from_toml_str(&text).unwrap(),
            ModelConfig::default()
        );
    }

    #[test]
    fn partial_override_keeps_the_rest() {
        let cfg = ModelConfig::from_toml_str(
            "[shock]\nlambda = 2.0\n[arsenal.quadrants.B]\nbeta = [0.82, 0.88]\n",
        )
        .unwrap();
        assert_eq!(cfg.shock.lambda, 2.0);
        assert_eq!(cfg.shock.mdi_threshold, 1.2);
        let b = cfg.arsenal.quadrant(QuadrantId::B).unwrap();
        assert_eq!((b.beta.lo, b.beta.hi), (0.82, 0.88));
        assert_eq!(b.core_dimension, "fear");
    }

    #[test]
    fn strict_ranges_reject_low_beta() {
        let text = "[arsenal.quadrants.B]\nbeta = 0.2\n";
        assert!(ModelConfig::from_toml_str(text).is_ok());
        let err = ModelConfig::from_toml_str(&format!("strict_ranges = true\n{text}")).unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::OutOfRange { .. }), "{msg}");
        assert!(msg.contains("[0.80,0.90]"), "{msg}");
    }

    #[test]
    fn bear_override_allowed_under_strict_ranges() {
        let cfg = ModelConfig::from_toml_str(
            "strict_ranges = true\n[arsenal.quadrants.B.override]\nalpha_neg = 0.18\n",
        )
        .unwrap();
        let sel = cfg.arsenal.quadrant(QuadrantId::B).unwrap().selection();
        assert_eq!(sel.alpha_neg, 0.18);
    }

    #[test]
    fn dangling_dimension_rejected() {
        let err =
            ModelConfig::from_toml_str("[decay.hope]\nalpha = 0.1\nthreshold = 0.5\n").unwrap_err();
        assert!(matches!(err, Error::Config(m) if m.contains("hope")));
        let err = ModelConfig::from_toml_str("[shock.events.rumor]\ngossip = 0.3\n").unwrap_err();
        assert!(matches!(err, Error::Config(m) if m.contains("gossip")));
        let err = ModelConfig::from_toml_str("[registry]\nlabels = [\"joy\"]\n").unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn extended_registry_admits_new_dimension() {
        let mut labels: Vec<String> = DEFAULT_DIMENSIONS
            .iter()
            .map(|s| format!("\"{s}\""))
            .collect();
        labels.push("\"patience\"".into());
        let text = format!(
            "[registry]\nlabels = [{}]\n[decay.patience]\nalpha = 0.1\nthreshold = 0.5\n",
            labels.join(", ")
        );
        let cfg = ModelConfig::from_toml_str(&text).unwrap();
        assert!(cfg.registry().unwrap().contains("patience"));
    }

    #[test]
    fn negative_rates_and_bad_toml_rejected() {
        assert!(ModelConfig::from_toml_str("[backtest]\ncost_rate = -0.1\n").is_err());
        assert!(ModelConfig::from_toml_str("[backtest]\nrisk_free_daily = -0.1\n").is_err());
        assert!(ModelConfig::from_toml_str("[backtest\n").is_err());
        assert!(ModelConfig::from_toml_str("mystery = 1\n").is_err());
    }
}
