//! Suite configuration: defaults, flat key=value files, flag overrides.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use qslice::MomentMeasure;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Everything the verification suite needs to run. All fields are plain
/// data so a config can round-trip through the key=value form unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    /// Truncation index: coefficient vectors run 0..=n_max.
    pub n_max: usize,
    /// Radial Gauss rule order.
    pub radial_order: usize,
    /// Circle rule order.
    pub theta_order: usize,
    /// Hemisphere rule orders (polar, azimuth).
    pub hemi_polar: usize,
    pub hemi_azimuth: usize,
    /// Measure spec: `exponential`, `gamma:S`, or `moments:PATH`.
    pub measure: String,
    /// Area-weight convention reported by the geometry audit
    /// (`paper` or `jacobian`); the audit always evaluates both.
    pub weight_mode: String,
    /// Transform normalization highlighted in reports (`paper` or
    /// `isometric`); the scale check always evaluates both.
    pub w_mode: String,
    /// Base seed; each check derives its own stream from this and its id.
    pub seed: u64,
    /// Record per-check wall time in reports (breaks byte-for-byte
    /// determinism of the output, so off by default).
    pub timings: bool,
    /// Per-check tolerance overrides, keyed by check id.
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            n_max: 64,
            radial_order: 40,
            theta_order: 64,
            hemi_polar: 32,
            hemi_azimuth: 64,
            measure: "exponential".to_string(),
            weight_mode: "paper".to_string(),
            w_mode: "paper".to_string(),
            seed: 17,
            timings: false,
            tolerances: BTreeMap::new(),
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| ConfigError(format!("{key}: {e}")))
}

impl SuiteConfig {
    /// Apply one key=value setting. Keys are case-insensitive and accept
    /// `-` for `_`; `tol.<check-id>` sets a tolerance override.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        // Tolerance ids are case-sensitive (`tol.basis.ortho.H`), so peel
        // the prefix off before normalizing.
        if let Some(id) = key.trim().strip_prefix("tol.") {
            let tol: f64 = parse_num(key.trim(), value)?;
            self.tolerances.insert(id.to_string(), tol);
            return Ok(());
        }
        let norm = key.trim().to_ascii_lowercase().replace('-', "_");
        match norm.as_str() {
            "n_max" | "nmax" => self.n_max = parse_num(&norm, value)?,
            "radial_order" => self.radial_order = parse_num(&norm, value)?,
            "theta_order" => self.theta_order = parse_num(&norm, value)?,
            "hemi_polar" => self.hemi_polar = parse_num(&norm, value)?,
            "hemi_azimuth" => self.hemi_azimuth = parse_num(&norm, value)?,
            "measure" => self.measure = value.trim().to_string(),
            "weight_mode" => self.weight_mode = value.trim().to_ascii_lowercase(),
            "w_mode" => self.w_mode = value.trim().to_ascii_lowercase(),
            "seed" => self.seed = parse_num(&norm, value)?,
            "timings" => {
                self.timings = match value.trim() {
                    "" | "true" | "1" => true,
                    "false" | "0" => false,
                    other => return Err(ConfigError(format!("timings: expected true/false, got `{other}`"))),
                }
            }
            _ => return Err(ConfigError(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Read a flat key=value file: one setting per line, blank lines and
    /// `#` comments ignored.
    pub fn load_file(&mut self, path: impl AsRef<Path>) -> Result<(), ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("{}:{}: expected key=value", path.display(), idx + 1)))?;
            self.apply(key, value)
                .map_err(|e| ConfigError(format!("{}:{}: {}", path.display(), idx + 1, e.0)))?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_max < 1 {
            return Err(ConfigError("n_max must be at least 1".into()));
        }
        for (name, v) in [
            ("radial_order", self.radial_order),
            ("theta_order", self.theta_order),
            ("hemi_polar", self.hemi_polar),
            ("hemi_azimuth", self.hemi_azimuth),
        ] {
            if v < 1 {
                return Err(ConfigError(format!("{name} must be at least 1")));
            }
        }
        match self.weight_mode.as_str() {
            "paper" | "jacobian" => {}
            other => return Err(ConfigError(format!("weight_mode: `{other}` is not paper|jacobian"))),
        }
        match self.w_mode.as_str() {
            "paper" | "isometric" => {}
            other => return Err(ConfigError(format!("w_mode: `{other}` is not paper|isometric"))),
        }
        for (id, tol) in &self.tolerances {
            if !(tol.is_finite() && *tol > 0.0) {
                return Err(ConfigError(format!("tol.{id} must be a positive finite number")));
            }
        }
        self.build_measure()?;
        Ok(())
    }

    /// Construct the radial measure named by the config.
    pub fn build_measure(&self) -> Result<MomentMeasure, ConfigError> {
        let spec = self.measure.trim();
        if spec == "exponential" {
            return Ok(MomentMeasure::exponential());
        }
        if let Some(s) = spec.strip_prefix("gamma:") {
            let s: f64 = s
                .parse()
                .map_err(|e| ConfigError(format!("measure gamma shape: {e}")))?;
            return MomentMeasure::gamma(s).map_err(|e| ConfigError(format!("measure: {e}")));
        }
        if let Some(path) = spec.strip_prefix("moments:") {
            return MomentMeasure::from_moments_file(path)
                .map_err(|e| ConfigError(format!("measure file: {e}")));
        }
        Err(ConfigError(format!(
            "measure: `{spec}` is not exponential | gamma:S | moments:PATH"
        )))
    }

    /// Per-check tolerance: the override if present, the shipped default
    /// otherwise.
    pub fn tol(&self, id: &str, default_tol: f64) -> f64 {
        self.tolerances.get(id).copied().unwrap_or(default_tol)
    }

    /// Canonical key=value serialization; `apply`ing these pairs onto a
    /// default config reproduces `self`.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let mut pairs = vec![
            ("hemi_azimuth".to_string(), self.hemi_azimuth.to_string()),
            ("hemi_polar".to_string(), self.hemi_polar.to_string()),
            ("measure".to_string(), self.measure.clone()),
            ("n_max".to_string(), self.n_max.to_string()),
            ("radial_order".to_string(), self.radial_order.to_string()),
            ("seed".to_string(), self.seed.to_string()),
            ("theta_order".to_string(), self.theta_order.to_string()),
            ("timings".to_string(), self.timings.to_string()),
            ("w_mode".to_string(), self.w_mode.clone()),
            ("weight_mode".to_string(), self.weight_mode.clone()),
        ];
        for (id, tol) in &self.tolerances {
            pairs.push((format!("tol.{id}"), format!("{tol}")));
        }
        pairs.sort();
        pairs
    }
}
