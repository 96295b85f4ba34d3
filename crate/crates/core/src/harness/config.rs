//! JSON run configuration.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::geometry::{MetricParams, Profile};
use crate::jet::C64;
use crate::solutions::DiracModeParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(rename = "C1", default)]
    pub c1: f64,
    #[serde(rename = "C2", default)]
    pub c2: f64,
    pub profile: Profile,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    #[serde(default)]
    pub m: i32,
    pub m1: i32,
    pub m2: i32,
    #[serde(default)]
    pub lambda_re: f64,
    #[serde(default)]
    pub lambda_im: f64,
    #[serde(default)]
    pub eta_re: f64,
    #[serde(default)]
    pub eta_im: f64,
}

impl ModeConfig {
    pub fn triple(m: i32, m1: i32, m2: i32) -> Self {
        ModeConfig { m, m1, m2, lambda_re: 0.0, lambda_im: 0.0, eta_re: 0.0, eta_im: 0.0 }
    }

    pub fn lambda(&self) -> C64 {
        C64::new(self.lambda_re, self.lambda_im)
    }

    pub fn eta(&self) -> C64 {
        C64::new(self.eta_re, self.eta_im)
    }

    pub fn dirac(&self) -> DiracModeParams {
        DiracModeParams::new(self.m, self.m1, self.m2, self.lambda(), self.eta())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Pointwise residual threshold for closed-form fields.
    pub residual: f64,
    /// Threshold for checks chained through Kummer functions.
    pub kummer: f64,
    /// Relative tolerance on norm values.
    pub norm_rel: f64,
    /// `rel_tol` handed to the adaptive quadrature.
    pub quadrature: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { residual: 1e-6, kummer: 1e-5, norm_rel: 1e-8, quadrature: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub params: ParamsConfig,
    #[serde(default)]
    pub modes: Vec<ModeConfig>,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Grid in the `--grid` syntax; the default grid when absent.
    #[serde(default)]
    pub grid: Option<String>,
    /// Check ids or group names to run when none are given on the command line.
    #[serde(default)]
    pub checks: Option<Vec<String>>,
    /// Replacement expected values, keyed by check id.
    #[serde(default)]
    pub expected_overrides: BTreeMap<String, f64>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            params: ParamsConfig { n: 1.0, c1: 0.5, c2: -0.8, profile: Profile::ScalarFlat },
            modes: vec![ModeConfig::triple(0, -2, 1), ModeConfig::triple(0, -3, 2), ModeConfig::triple(1, -4, 3)],
            tolerances: Tolerances::default(),
            grid: None,
            checks: None,
            expected_overrides: BTreeMap::new(),
        }
    }
}

impl Config {
    pub fn from_json(text: &str) -> Result<Config> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?;
        Config::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn metric(&self) -> Result<MetricParams> {
        let p = self.params;
        MetricParams::new(p.n, p.c1, p.c2, p.profile).map_err(|e| LabError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.metric()?;
        let t = self.tolerances;
        for (name, v) in [("residual", t.residual), ("kummer", t.kummer), ("norm_rel", t.norm_rel)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(LabError::Config(format!("tolerance `{name}` must be positive")));
            }
        }
        if !(t.quadrature > 0.0 && t.quadrature <= 1e-2) {
            return Err(LabError::Config("tolerance `quadrature` must lie in (0, 1e-2]".into()));
        }
        if let Some(g) = &self.grid {
            crate::harness::scan::Grid::parse(g, &self.metric()?)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_defaults() {
        let cfg = Config::default();
        let back = Config::from_json(&cfg.to_json()).unwrap();
        assert_eq!(cfg, back);
        let minimal = Config::from_json(r#"{"params": {"N": 2, "profile": "TaubNut"}}"#).unwrap();
        assert_eq!(minimal.tolerances, Tolerances::default());
        assert_eq!(minimal.metric().unwrap().c1(), -4.0);
    }

    #[test]
    fn spec_keys_parse() {
        let text = r#"{
            "params": {"N": 1, "C1": 0.5, "C2": -0.8, "profile": "ScalarFlat"},
            "modes": [{"m": 0, "m1": -2, "m2": 1, "lambda_re": 0, "lambda_im": 0, "eta_re": 0, "eta_im": 0}],
            "tolerances": {"residual": 1e-7},
            "grid": "r=1.1:5:4;theta=pi/2"
        }"#;
        let cfg = Config::from_json(text).unwrap();
        assert_eq!(cfg.modes[0].dirac().m1, -2);
        assert_eq!(cfg.tolerances.residual, 1e-7);
        assert_eq!(cfg.tolerances.kummer, 1e-5);
    }

    #[test]
    fn malformed_configs_are_rejected() {
        for text in [
            "{",
            r#"{"params": {"N": 1, "profile": "Flat"}}"#,
            r#"{"params": {"N": -1, "profile": "TaubNut"}}"#,
            r#"{"params": {"N": 1, "profile": "TaubNut"}, "extra": 1}"#,
            r#"{"params": {"N": 1, "C1": 0, "C2": 5, "profile": "ScalarFlat"}}"#,
            r#"{"params": {"N": 1, "profile": "TaubNut"}, "tolerances": {"quadrature": 0.5}}"#,
            r#"{"params": {"N": 1, "profile": "TaubNut"}, "grid": "r=a:b:c"}"#,
        ] {
            assert!(matches!(Config::from_json(text), Err(LabError::Config(_))), "{text}");
        }
    }
}
