//! Structured verification reports and their JSON / markdown renderings.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::config::Config;
use super::scan::ScanStats;

/// Bumped whenever a field is renamed or removed.
pub const SCHEMA_VERSION: &str = "taubnut-lab/report/v1";

/// JSON has no NaN or infinity; those are written as the strings `"NaN"`,
/// `"inf"` and `"-inf"`.
mod float {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_nan() {
            s.serialize_str("NaN")
        } else if v.is_infinite() {
            s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
        } else {
            s.serialize_f64(*v)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "NaN" => Ok(f64::NAN),
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(D::Error::custom(format!("`{other}` is not a float"))),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToleranceKind {
    /// `|computed − expected| ≤ tolerance`
    Absolute,
    /// `|computed − expected| ≤ tolerance · |expected|`
    Relative,
}

impl ToleranceKind {
    pub fn accepts(self, computed: f64, expected: f64, tolerance: f64) -> bool {
        let bound = match self {
            ToleranceKind::Absolute => tolerance,
            ToleranceKind::Relative => tolerance * expected.abs(),
        };
        (computed - expected).abs() <= bound
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualStatistics {
    #[serde(with = "float")]
    pub max: f64,
    #[serde(with = "float")]
    pub mean: f64,
    pub count: usize,
}

impl From<ScanStats> for ResidualStatistics {
    fn from(s: ScanStats) -> Self {
        ResidualStatistics { max: s.max, mean: s.mean, count: s.count }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub id: String,
    pub description: String,
    pub parameters: BTreeMap<String, Value>,
    pub statistics: Option<ResidualStatistics>,
    #[serde(with = "float")]
    pub expected: f64,
    #[serde(with = "float")]
    pub computed: f64,
    pub tolerance: f64,
    pub tolerance_kind: ToleranceKind,
    pub passed: bool,
    pub wall_time_s: f64,
    pub notes: Vec<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema: String,
    pub version: String,
    pub config: Config,
    pub reports: Vec<VerificationReport>,
    pub passed: usize,
    pub failed: usize,
    pub wall_time_s: f64,
}

impl SuiteReport {
    pub fn new(config: Config, reports: Vec<VerificationReport>, wall_time_s: f64) -> Self {
        let passed = reports.iter().filter(|r| r.passed).count();
        SuiteReport {
            schema: SCHEMA_VERSION.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            failed: reports.len() - passed,
            passed,
            reports,
            wall_time_s,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            0
        } else {
            1
        }
    }

    pub fn get(&self, id: &str) -> Option<&VerificationReport> {
        self.reports.iter().find(|r| r.id == id)
    }

    /// Pretty JSON. `serde_json` writes the shortest string that parses back
    /// to the same `f64`, so values round-trip exactly.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<SuiteReport> {
        serde_json::from_str(text)
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# Verification report\n");
        let _ = writeln!(
            out,
            "{} passed, {} failed ({:.2} s, schema `{}`)\n",
            self.passed, self.failed, self.wall_time_s, self.schema
        );
        let _ = writeln!(out, "| check | result | computed | expected | tolerance | max residual | time (s) |");
        let _ = writeln!(out, "|---|---|---|---|---|---|---|");
        for r in &self.reports {
            let tol = match r.tolerance_kind {
                ToleranceKind::Absolute => format!("{:.1e}", r.tolerance),
                ToleranceKind::Relative => format!("{:.1e} rel", r.tolerance),
            };
            let max = r.statistics.map(|s| format!("{:.3e} ({} pts)", s.max, s.count)).unwrap_or_else(|| "-".into());
            let _ = writeln!(
                out,
                "| `{}` | {} | {:.10e} | {:.10e} | {} | {} | {:.3} |",
                r.id,
                if r.passed { "pass" } else { "**FAIL**" },
                r.computed,
                r.expected,
                tol,
                max,
                r.wall_time_s
            );
        }
        let details: Vec<_> = self.reports.iter().filter(|r| r.error.is_some() || !r.notes.is_empty()).collect();
        if !details.is_empty() {
            let _ = writeln!(out, "\n## Notes\n");
            for r in details {
                if let Some(e) = &r.error {
                    let _ = writeln!(out, "- `{}`: error: {e}", r.id);
                }
                for n in &r.notes {
                    let _ = writeln!(out, "- `{}`: {n}", r.id);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(id: &str, computed: f64, passed: bool) -> VerificationReport {
        VerificationReport {
            id: id.into(),
            description: String::new(),
            parameters: BTreeMap::new(),
            statistics: None,
            expected: 1.0,
            computed,
            tolerance: 1e-8,
            tolerance_kind: ToleranceKind::Relative,
            passed,
            wall_time_s: 0.0,
            notes: vec![],
            error: None,
        }
    }

    #[test]
    fn tolerance_kinds() {
        assert!(ToleranceKind::Absolute.accepts(1e-7, 0.0, 1e-6));
        assert!(!ToleranceKind::Absolute.accepts(2e-6, 0.0, 1e-6));
        assert!(ToleranceKind::Relative.accepts(100.0 + 1e-7, 100.0, 1e-8));
        assert!(!ToleranceKind::Relative.accepts(100.0 + 1e-5, 100.0, 1e-8));
        assert!(!ToleranceKind::Absolute.accepts(f64::NAN, 0.0, 1.0));
    }

    #[test]
    fn floats_round_trip_through_json() {
        let x = 0.1 + 0.2;
        let suite = SuiteReport::new(Config::default(), vec![report("a", x, true), report("b", 1.0 / 3.0, false)], 0.5);
        let back = SuiteReport::from_json(&suite.to_json()).unwrap();
        assert_eq!(back.reports[0].computed.to_bits(), x.to_bits());
        assert_eq!(back, suite);
        assert_eq!(suite.exit_code(), 1);
        assert_eq!(suite.schema, SCHEMA_VERSION);
    }

    #[test]
    fn non_finite_values_survive_json() {
        let mut r = report("a", f64::NAN, false);
        r.expected = f64::NEG_INFINITY;
        let suite = SuiteReport::new(Config::default(), vec![r, report("b", f64::INFINITY, false)], 0.0);
        let back = SuiteReport::from_json(&suite.to_json()).unwrap();
        assert!(back.reports[0].computed.is_nan());
        assert_eq!(back.reports[0].expected, f64::NEG_INFINITY);
        assert_eq!(back.reports[1].computed, f64::INFINITY);
    }

    #[test]
    fn markdown_lists_every_check() {
        let suite = SuiteReport::new(Config::default(), vec![report("x.one", 1.0, true), report("x.two", 2.0, false)], 0.0);
        let md = suite.to_markdown();
        assert!(md.contains("`x.one` | pass"));
        assert!(md.contains("`x.two` | **FAIL**"));
        assert!(md.contains("1 passed, 1 failed"));
    }
}
