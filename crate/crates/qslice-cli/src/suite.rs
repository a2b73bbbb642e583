//! Runs a selection of checks and assembles the report.

use std::time::Instant;

use serde_json::{json, Map, Value};

use crate::checks::{all_checks, CheckDef};
use crate::config::SuiteConfig;

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub id: String,
    pub anchor: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
    /// Wall time; populated only when the config asks for timings, so the
    /// default report stays byte-for-byte reproducible.
    pub ms: Option<f64>,
    pub note: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub checks: Vec<CheckOutcome>,
    pub pass: bool,
}

/// Validate the config, resolve the selection (empty means everything),
/// and run the checks in id order.
pub fn run_suite(cfg: &SuiteConfig, selection: &[String]) -> Result<SuiteReport, String> {
    cfg.validate().map_err(|e| e.to_string())?;
    let defs = all_checks();
    let chosen: Vec<&CheckDef> = if selection.is_empty() {
        defs.iter().collect()
    } else {
        let mut ids: Vec<&str> = selection.iter().map(String::as_str).collect();
        ids.sort_unstable();
        ids.dedup();
        let mut picked = Vec::with_capacity(ids.len());
        for id in ids {
            match defs.iter().find(|d| d.id == id) {
                Some(def) => picked.push(def),
                None => return Err(format!("unknown check id `{id}`")),
            }
        }
        picked
    };
    let mut checks = Vec::with_capacity(chosen.len());
    for def in chosen {
        let start = Instant::now();
        let data = (def.run)(cfg)?;
        let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
        // A non-finite residual must read as a failure, not serialize to null.
        let residual = if data.residual.is_finite() {
            data.residual
        } else {
            f64::MAX
        };
        checks.push(CheckOutcome {
            id: def.id.to_string(),
            anchor: def.anchor.to_string(),
            residual,
            tol: data.tol,
            pass: residual <= data.tol,
            ms: cfg.timings.then_some(elapsed_ms),
            note: data.note,
        });
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(SuiteReport {
        config: cfg.clone(),
        checks,
        pass,
    })
}

fn config_json(cfg: &SuiteConfig) -> Value {
    let mut m = Map::new();
    m.insert("n_max".into(), json!(cfg.n_max));
    m.insert("radial_order".into(), json!(cfg.radial_order));
    m.insert("theta_order".into(), json!(cfg.theta_order));
    m.insert("hemi_polar".into(), json!(cfg.hemi_polar));
    m.insert("hemi_azimuth".into(), json!(cfg.hemi_azimuth));
    m.insert("measure".into(), json!(cfg.measure));
    m.insert("weight_mode".into(), json!(cfg.weight_mode));
    m.insert("w_mode".into(), json!(cfg.w_mode));
    m.insert("seed".into(), json!(cfg.seed));
    m.insert("timings".into(), json!(cfg.timings));
    let tols: Map<String, Value> = cfg
        .tolerances
        .iter()
        .map(|(id, tol)| (id.clone(), json!(tol)))
        .collect();
    m.insert("tolerances".into(), Value::Object(tols));
    Value::Object(m)
}

impl SuiteReport {
    /// JSON form: object keys sorted, floats in shortest round-trip form,
    /// `ms`/`note` present on every check (null when absent).
    pub fn to_json(&self) -> String {
        let mut root = Map::new();
        root.insert("config".into(), config_json(&self.config));
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                let mut m = Map::new();
                m.insert("id".into(), json!(c.id));
                m.insert("anchor".into(), json!(c.anchor));
                m.insert("residual".into(), json!(c.residual));
                m.insert("tol".into(), json!(c.tol));
                m.insert("pass".into(), json!(c.pass));
                m.insert("ms".into(), c.ms.map_or(Value::Null, |v| json!(v)));
                m.insert(
                    "note".into(),
                    c.note.as_ref().map_or(Value::Null, |s| json!(s)),
                );
                Value::Object(m)
            })
            .collect();
        root.insert("checks".into(), Value::Array(checks));
        root.insert("pass".into(), json!(self.pass));
        let mut out =
            serde_json::to_string_pretty(&Value::Object(root)).expect("report serializes");
        out.push('\n');
        out
    }

    /// One line per check plus a summary line.
    pub fn human(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!(
                "{status}  {:<18} residual {:>12.3e}  tol {:>8.1e}",
                c.id, c.residual, c.tol
            ));
            if let Some(ms) = c.ms {
                out.push_str(&format!("  [{ms:7.1} ms]"));
            }
            out.push_str(&format!("  {}\n", c.anchor));
            if let Some(note) = &c.note {
                out.push_str(&format!("      {note}\n"));
            }
        }
        let passed = self.checks.iter().filter(|c| c.pass).count();
        out.push_str(&format!(
            "{}: {passed} of {} checks passed\n",
            if self.pass { "PASS" } else { "FAIL" },
            self.checks.len()
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_cfg() -> SuiteConfig {
        SuiteConfig::default()
    }

    #[test]
    fn unknown_check_id_is_an_error() {
        let err = run_suite(&quick_cfg(), &["no.such.check".to_string()]).unwrap_err();
        assert!(err.contains("no.such.check"));
    }

    #[test]
    fn invalid_config_is_an_error() {
        let mut cfg = quick_cfg();
        cfg.n_max = 0;
        assert!(run_suite(&cfg, &["angular.mass".to_string()]).is_err());
    }

    #[test]
    fn selection_is_sorted_and_deduplicated() {
        let sel = vec![
            "angular.vector".to_string(),
            "angular.mass".to_string(),
            "angular.vector".to_string(),
        ];
        let report = run_suite(&quick_cfg(), &sel).unwrap();
        let ids: Vec<&str> = report.checks.iter().map(|c| c.id.as_str()).collect();
        assert_eq!(ids, ["angular.mass", "angular.vector"]);
        assert!(report.pass);
    }

    #[test]
    fn json_is_deterministic_without_timings() {
        let sel = vec!["angular.mass".to_string()];
        let a = run_suite(&quick_cfg(), &sel).unwrap().to_json();
        let b = run_suite(&quick_cfg(), &sel).unwrap().to_json();
        assert_eq!(a, b);
        assert!(a.contains("\"ms\": null"));
    }

    #[test]
    fn timings_populate_ms() {
        let mut cfg = quick_cfg();
        cfg.timings = true;
        let report = run_suite(&cfg, &["angular.mass".to_string()]).unwrap();
        assert!(report.checks[0].ms.is_some());
        assert!(!report.to_json().contains("\"ms\": null"));
    }

    #[test]
    fn tolerance_override_flips_a_check() {
        let mut cfg = quick_cfg();
        cfg.tolerances.insert("angular.mass".to_string(), 1e-300);
        let report = run_suite(&cfg, &["angular.mass".to_string()]).unwrap();
        assert!(!report.pass);
        assert_eq!(report.checks[0].tol, 1e-300);
    }
}
