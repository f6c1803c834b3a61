//! On-disk scenario configuration: a JSON document with an explicit schema
//! version, strict about unknown fields. The numeric interface is `f64`;
//! the loaded config converts into a [`ScenarioConfig`] ready to run.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::design::{sdd_design, SddKind};
use crate::model::MgParams;
use crate::scenario::{
    ControlLaw, InitialFunction, ScenarioConfig, ScenarioError, Schedule, Segment,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported schema version {0} (expected {SCHEMA_VERSION})")]
    SchemaVersion(u32),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema: u32,
    pub params: ParamsConfig,
    pub segments: Vec<SegmentConfig>,
    pub phi: PhiConfig,
    pub horizon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classify: Option<ClassifyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

/// Tail-classification tolerance overrides; omitted fields keep the
/// defaults (eps_eq 1e-4, eps_per 1e-3, max_period 8).
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct ClassifyConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_eq: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_per: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_period: Option<usize>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub mu: f64,
    pub p: f64,
    pub n: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SegmentConfig {
    pub t_start: f64,
    pub law: LawConfig,
    pub tau: f64,
}

/// Control law description. `type` selects the law; `k` is the gain for the
/// additive laws; delay control takes `mode` = "smooth" or "step" (the
/// latter with `threshold`, `low`, `high`).
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct LawConfig {
    #[serde(rename = "type")]
    pub kind: LawKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<DelayMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub low: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub high: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum LawKind {
    None,
    Constant,
    Proportional,
    Pyragas,
    Delay,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum DelayMode {
    Smooth,
    Step,
}

/// Initial history function. Families: `constant` (a), `affine` (a + b t),
/// `sinusoid` (a + b sin(c t + d), d optional), `exponential`
/// (a + slope·t + b e^{c t}, slope optional).
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PhiConfig {
    pub family: PhiFamily,
    pub a: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum PhiFamily {
    Constant,
    Affine,
    Sinusoid,
    Exponential,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
}

impl ConfigFile {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: ConfigFile = serde_json::from_str(text)?;
        if cfg.schema != SCHEMA_VERSION {
            return Err(ConfigError::SchemaVersion(cfg.schema));
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Validate and convert into a runnable scenario.
    pub fn to_scenario(&self) -> Result<ScenarioConfig<f64>, ConfigError> {
        let params = MgParams::new(self.params.mu, self.params.p, self.params.n)
            .map_err(ScenarioError::from)?;
        let mut segments = Vec::with_capacity(self.segments.len());
        for seg in &self.segments {
            let law = seg.law.to_law(&params, seg.tau)?;
            segments.push(Segment {
                start: seg.t_start,
                law,
                tau: seg.tau,
            });
        }
        let schedule = Schedule::new(segments)?;
        let phi = self.phi.to_initial_function()?;
        let classify = self.classify.map(|c| {
            let mut s = crate::diagnostics::ClassifySettings::default();
            if let Some(v) = c.eps_eq {
                s.eps_eq = v;
            }
            if let Some(v) = c.eps_per {
                s.eps_per = v;
            }
            if let Some(v) = c.max_period {
                s.max_period = v;
            }
            s
        });
        Ok(ScenarioConfig {
            params,
            schedule,
            phi,
            horizon: self.horizon,
            step: self.step,
            classify,
        })
    }
}

impl LawConfig {
    pub fn none() -> Self {
        LawConfig {
            kind: LawKind::None,
            k: None,
            mode: None,
            threshold: None,
            low: None,
            high: None,
        }
    }

    pub fn gain(kind: LawKind, k: f64) -> Self {
        LawConfig {
            kind,
            k: Some(k),
            mode: None,
            threshold: None,
            low: None,
            high: None,
        }
    }

    pub fn delay_smooth() -> Self {
        LawConfig {
            kind: LawKind::Delay,
            k: None,
            mode: Some(DelayMode::Smooth),
            threshold: None,
            low: None,
            high: None,
        }
    }

    pub fn delay_step(threshold: f64, low: f64, high: f64) -> Self {
        LawConfig {
            kind: LawKind::Delay,
            k: None,
            mode: Some(DelayMode::Step),
            threshold: Some(threshold),
            low: Some(low),
            high: Some(high),
        }
    }

    fn reject_delay_fields(&self) -> Result<(), ConfigError> {
        if self.mode.is_some()
            || self.threshold.is_some()
            || self.low.is_some()
            || self.high.is_some()
        {
            return Err(ConfigError::Invalid(format!(
                "law type {:?} takes no delay fields",
                self.kind
            )));
        }
        Ok(())
    }

    fn to_law(self, params: &MgParams<f64>, tau: f64) -> Result<ControlLaw<f64>, ConfigError> {
        let need_k = || {
            self.k.ok_or_else(|| {
                ConfigError::Invalid(format!("law type {:?} requires field k", self.kind))
            })
        };
        match self.kind {
            LawKind::None => {
                self.reject_delay_fields()?;
                if self.k.is_some() {
                    return Err(ConfigError::Invalid("law type none takes no gain".into()));
                }
                Ok(ControlLaw::None)
            }
            LawKind::Constant => {
                self.reject_delay_fields()?;
                Ok(ControlLaw::Constant(need_k()?))
            }
            LawKind::Proportional => {
                self.reject_delay_fields()?;
                Ok(ControlLaw::Proportional(need_k()?))
            }
            LawKind::Pyragas => {
                self.reject_delay_fields()?;
                Ok(ControlLaw::Pyragas(need_k()?))
            }
            LawKind::Delay => {
                if self.k.is_some() {
                    return Err(ConfigError::Invalid("delay control takes no gain k".into()));
                }
                let mode = self.mode.ok_or_else(|| {
                    ConfigError::Invalid("delay control requires field mode".into())
                })?;
                let kind = match mode {
                    DelayMode::Smooth => {
                        if self.threshold.is_some() || self.low.is_some() || self.high.is_some() {
                            return Err(ConfigError::Invalid(
                                "smooth delay control takes no step fields".into(),
                            ));
                        }
                        SddKind::Smooth
                    }
                    DelayMode::Step => SddKind::Step {
                        threshold: self.threshold.ok_or_else(|| {
                            ConfigError::Invalid("step delay control requires threshold".into())
                        })?,
                        low: self.low.ok_or_else(|| {
                            ConfigError::Invalid("step delay control requires low".into())
                        })?,
                        high: self.high.ok_or_else(|| {
                            ConfigError::Invalid("step delay control requires high".into())
                        })?,
                    },
                };
                let design = sdd_design(params, tau, kind).map_err(ScenarioError::from)?;
                Ok(ControlLaw::DelayControl(design))
            }
        }
    }
}

impl PhiConfig {
    pub fn constant(a: f64) -> Self {
        PhiConfig {
            family: PhiFamily::Constant,
            a,
            b: None,
            c: None,
            d: None,
            slope: None,
        }
    }

    fn to_initial_function(self) -> Result<InitialFunction<f64>, ConfigError> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| {
                ConfigError::Invalid(format!(
                    "phi family {:?} requires field {name}",
                    self.family
                ))
            })
        };
        let reject = |v: Option<f64>, name: &str| {
            if v.is_some() {
                Err(ConfigError::Invalid(format!(
                    "phi family {:?} does not take field {name}",
                    self.family
                )))
            } else {
                Ok(())
            }
        };
        match self.family {
            PhiFamily::Constant => {
                reject(self.b, "b")?;
                reject(self.c, "c")?;
                reject(self.d, "d")?;
                reject(self.slope, "slope")?;
                Ok(InitialFunction::Constant { a: self.a })
            }
            PhiFamily::Affine => {
                reject(self.c, "c")?;
                reject(self.d, "d")?;
                reject(self.slope, "slope")?;
                Ok(InitialFunction::Affine {
                    a: self.a,
                    b: need(self.b, "b")?,
                })
            }
            PhiFamily::Sinusoid => {
                reject(self.slope, "slope")?;
                Ok(InitialFunction::Sinusoid {
                    a: self.a,
                    b: need(self.b, "b")?,
                    c: need(self.c, "c")?,
                    d: self.d.unwrap_or(0.0),
                })
            }
            PhiFamily::Exponential => {
                reject(self.d, "d")?;
                Ok(InitialFunction::Exponential {
                    a: self.a,
                    b: self.slope.unwrap_or(0.0),
                    c: need(self.b, "b")?,
                    d: need(self.c, "c")?,
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{
        "schema": 1,
        "params": {"mu": 1.0, "p": 2.0, "n": 9.65},
        "segments": [
            {"t_start": 0.0, "law": {"type": "none"}, "tau": 3.0},
            {"t_start": 80.0, "law": {"type": "constant", "k": 0.39}, "tau": 3.0}
        ],
        "phi": {"family": "sinusoid", "a": 2.0, "b": 0.02, "c": 1.0},
        "horizon": 160.0
    }"#;

    #[test]
    fn parses_and_converts() {
        let cfg = ConfigFile::from_json(EXAMPLE).unwrap();
        let scenario = cfg.to_scenario().unwrap();
        assert_eq!(scenario.schedule.segments().len(), 2);
        assert_eq!(scenario.horizon, 160.0);
        assert!((scenario.phi.eval(0.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_unknown_fields() {
        let bad = EXAMPLE.replace("\"horizon\": 160.0", "\"horizon\": 160.0, \"extra\": 1");
        assert!(matches!(
            ConfigFile::from_json(&bad),
            Err(ConfigError::Parse(_))
        ));
        let bad = EXAMPLE.replace(
            "{\"type\": \"constant\", \"k\": 0.39}",
            "{\"type\": \"constant\", \"k\": 0.39, \"oops\": 2}",
        );
        assert!(matches!(
            ConfigFile::from_json(&bad),
            Err(ConfigError::Parse(_))
        ));
    }

    #[test]
    fn rejects_wrong_schema_version() {
        let bad = EXAMPLE.replace("\"schema\": 1", "\"schema\": 2");
        assert!(matches!(
            ConfigFile::from_json(&bad),
            Err(ConfigError::SchemaVersion(2))
        ));
    }

    #[test]
    fn law_field_validation() {
        let bad = EXAMPLE.replace(
            "{\"type\": \"constant\", \"k\": 0.39}",
            "{\"type\": \"constant\"}",
        );
        let cfg = ConfigFile::from_json(&bad).unwrap();
        assert!(matches!(cfg.to_scenario(), Err(ConfigError::Invalid(_))));
        let bad = EXAMPLE.replace("{\"type\": \"none\"}", "{\"type\": \"none\", \"k\": 0.1}");
        let cfg = ConfigFile::from_json(&bad).unwrap();
        assert!(matches!(cfg.to_scenario(), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn delay_law_round_trip() {
        let text = r#"{
            "schema": 1,
            "params": {"mu": 1.0, "p": 2.0, "n": 6.0},
            "segments": [
                {"t_start": 0.0, "law": {"type": "none"}, "tau": 5.0},
                {"t_start": 31.0, "law": {"type": "delay", "mode": "step", "threshold": 1.0, "low": 4.0, "high": 5.0}, "tau": 5.0}
            ],
            "phi": {"family": "constant", "a": 2.0},
            "horizon": 131.0
        }"#;
        let cfg = ConfigFile::from_json(text).unwrap();
        let scenario = cfg.to_scenario().unwrap();
        match &scenario.schedule.segments()[1].law {
            ControlLaw::DelayControl(d) => {
                assert_eq!(d.bounds(), (4.0, 5.0));
                assert!(!d.slope_compliant());
            }
            other => panic!("expected delay control, got {other:?}"),
        }
        // Round-trip the struct through JSON.
        let again = ConfigFile::from_json(&cfg.to_json()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn phi_families_from_config() {
        let mk = |phi: &str| {
            let text = EXAMPLE.replace(
                "{\"family\": \"sinusoid\", \"a\": 2.0, \"b\": 0.02, \"c\": 1.0}",
                phi,
            );
            ConfigFile::from_json(&text).unwrap().to_scenario()
        };
        // Plain form a + b e^{c t}.
        let s = mk("{\"family\": \"exponential\", \"a\": 1.0, \"b\": 0.1, \"c\": -1.0}").unwrap();
        assert!((s.phi.eval(-1.0) - (1.0 + 0.1 * 1.0f64.exp())).abs() < 1e-15);
        // Extended form with the affine part.
        let s = mk(
            "{\"family\": \"exponential\", \"a\": 0.0, \"b\": 0.1, \"c\": 1.0, \"slope\": -1.2}",
        )
        .unwrap();
        assert!((s.phi.eval(-2.0) - (2.4 + 0.1 * (-2.0f64).exp())).abs() < 1e-15);
        // Sinusoid phase.
        let s = mk("{\"family\": \"sinusoid\", \"a\": 0.5, \"b\": 0.01, \"c\": 2.0, \"d\": 1.5707963267948966}").unwrap();
        assert!((s.phi.eval(-0.3) - (0.5 + 0.01 * (-0.6f64).cos())).abs() < 1e-12);
        // Missing required coefficient.
        assert!(mk("{\"family\": \"affine\", \"a\": 1.0}").is_err());
    }
}
