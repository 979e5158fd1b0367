//! Experiment config schema and the resolved run context.

use std::collections::BTreeMap;

use ergodix::descriptor::{build_hom_set, HomDescriptor, ObservableDescriptor, SystemDescriptor, WindowDescriptor};
use ergodix::mixing::VerdictRule;
use ergodix::{DynamicalSystem, FolnerWindow, HomSet, Observable, SystemHandle};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use crate::{config_error, ConfigError};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub schema: Option<String>,
    #[serde(default)]
    pub description: Option<String>,
    #[serde(default)]
    pub system: Option<SystemDescriptor>,
    #[serde(default)]
    pub observables: BTreeMap<String, ObservableDescriptor>,
    #[serde(default)]
    pub homomorphisms: Vec<HomDescriptor>,
    #[serde(default)]
    pub windows: Option<WindowDescriptor>,
    #[serde(default)]
    pub thresholds: Option<Thresholds>,
    /// Subcommand-specific parameters.
    #[serde(default)]
    pub params: Option<Value>,
    #[serde(default)]
    pub outputs: Option<Outputs>,
    #[serde(default)]
    pub seed: Option<u64>,
}

/// Overrides for the decay-verdict rule.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    #[serde(default)]
    pub threshold_factor: Option<f64>,
    #[serde(default)]
    pub tail_fraction: Option<f64>,
    #[serde(default)]
    pub persist_factor: Option<f64>,
}

/// Artifact file names, relative to `--out`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default)]
    pub csv: Option<String>,
    #[serde(default)]
    pub json: Option<String>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let config: ExperimentConfig = serde_json::from_str(text)?;
        if let Some(s) = &config.schema {
            if s != ergodix::SCHEMA {
                return config_error(format!("unsupported schema {s:?}; expected {:?}", ergodix::SCHEMA));
            }
        }
        if let Some(o) = &config.outputs {
            for name in [&o.csv, &o.json].into_iter().flatten() {
                if name.is_empty() || name.contains(['/', '\\']) || name == "failures.json" {
                    return config_error(format!("output name {name:?} must be a plain file name"));
                }
            }
        }
        Ok(config)
    }
}

/// A config with its system, observables and windows built.
pub struct Context {
    pub config: ExperimentConfig,
    pub seed: Option<u64>,
    pub system: Option<SystemHandle>,
    pub observables: BTreeMap<String, Observable>,
}

impl Context {
    pub fn new(config: ExperimentConfig, seed: Option<u64>) -> Result<Self, ConfigError> {
        let system = config.system.as_ref().map(SystemDescriptor::build).transpose()?;
        let mut observables = BTreeMap::new();
        if !config.observables.is_empty() {
            let Some(sys) = &system else {
                return config_error("observables need a `system`");
            };
            for (name, desc) in &config.observables {
                let obs = desc.build(sys).map_err(|e| ConfigError(format!("observable {name:?}: {e}")))?;
                observables.insert(name.clone(), obs);
            }
        }
        Ok(Self { config, seed, system, observables })
    }

    pub fn system(&self) -> Result<&SystemHandle, ConfigError> {
        self.system.as_ref().ok_or_else(|| ConfigError("this subcommand needs a `system`".into()))
    }

    pub fn observable(&self, name: &str) -> Result<&Observable, ConfigError> {
        self.observables.get(name).ok_or_else(|| {
            let known: Vec<&str> = self.observables.keys().map(String::as_str).collect();
            ConfigError(format!("unknown observable {name:?}; defined: {}", known.join(", ")))
        })
    }

    pub fn lattice_dim(&self) -> Option<usize> {
        self.system.as_ref().map(|s| s.lattice_dim())
    }

    pub fn windows(&self) -> Result<Vec<FolnerWindow>, ConfigError> {
        let Some(w) = &self.config.windows else {
            return config_error("this subcommand needs `windows`");
        };
        Ok(w.build(self.lattice_dim())?)
    }

    pub fn hom_set(&self) -> Result<HomSet, ConfigError> {
        let q = self.lattice_dim().ok_or_else(|| ConfigError("homomorphisms need a `system`".into()))?;
        if self.config.homomorphisms.is_empty() {
            return config_error("this subcommand needs `homomorphisms`");
        }
        Ok(build_hom_set(&self.config.homomorphisms, q)?)
    }

    pub fn rule(&self) -> Result<VerdictRule, ConfigError> {
        let mut rule = VerdictRule::default();
        if let Some(t) = self.config.thresholds {
            rule.threshold_factor = t.threshold_factor.unwrap_or(rule.threshold_factor);
            rule.tail_fraction = t.tail_fraction.unwrap_or(rule.tail_fraction);
            rule.persist_factor = t.persist_factor.unwrap_or(rule.persist_factor);
        }
        rule.validate()?;
        Ok(rule)
    }

    pub fn seed(&self) -> Result<u64, ConfigError> {
        self.seed.ok_or_else(|| ConfigError("randomized runs need a seed (`seed` in the config or --seed)".into()))
    }

    /// Parses `params` into the subcommand's parameter type.
    pub fn params<P: DeserializeOwned>(&self) -> Result<P, ConfigError> {
        let v = self.config.params.clone().unwrap_or_else(|| Value::Object(Default::default()));
        serde_json::from_value(v).map_err(|e| ConfigError(format!("params: {e}")))
    }

    pub fn csv_name(&self, subcommand: &str) -> String {
        self.config.outputs.as_ref().and_then(|o| o.csv.clone()).unwrap_or_else(|| format!("{subcommand}.csv"))
    }

    pub fn json_name(&self, subcommand: &str) -> String {
        self.config.outputs.as_ref().and_then(|o| o.json.clone()).unwrap_or_else(|| format!("{subcommand}.json"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_top_level_keys() {
        assert!(ExperimentConfig::parse(r#"{"sytem":{"kind":"shift","q":1,"d":2}}"#).is_err());
    }

    #[test]
    fn rejects_foreign_schema() {
        assert!(ExperimentConfig::parse(r#"{"schema":"other/2"}"#).is_err());
        assert!(ExperimentConfig::parse(r#"{"schema":"ergodix/1"}"#).is_ok());
    }

    #[test]
    fn rejects_path_outputs() {
        assert!(ExperimentConfig::parse(r#"{"outputs":{"csv":"../x.csv"}}"#).is_err());
    }

    #[test]
    fn builds_context() {
        let c = ExperimentConfig::parse(
            r#"{"system":{"kind":"rotation","p":1,"Q":5},
                "observables":{"v":{"kind":"named","name":"V"}},
                "windows":{"n_min":1,"n_max":3},
                "homomorphisms":[1]}"#,
        )
        .unwrap();
        let ctx = Context::new(c, None).unwrap();
        assert!(ctx.observable("v").is_ok());
        assert!(ctx.observable("w").is_err());
        assert_eq!(ctx.windows().unwrap().len(), 3);
        assert!(ctx.seed().is_err());
        assert_eq!(ctx.csv_name("mix"), "mix.csv");
    }

    #[test]
    fn observables_need_a_system() {
        let c = ExperimentConfig::parse(r#"{"observables":{"v":{"kind":"identity"}}}"#).unwrap();
        assert!(Context::new(c, None).is_err());
    }
}
