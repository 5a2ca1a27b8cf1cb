//! Flat `key = value` configuration with bracketed sections: parser,
//! validation, canonical serialization and the config hash embedded in every
//! output file.

use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{CliError, Result};
use vacuumgas::GasParameters;

/// Fully resolved run configuration. Every field has a default; files and
/// `--override` entries set subsets. The whole pipeline is seed-free.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    // [params]
    pub gamma: f64,
    pub lambda: f64,
    pub mu: f64,
    /// Time-weight offset; None means the midpoint default.
    pub delta: Option<f64>,
    // [run]
    pub mass: f64,
    pub n_cells: usize,
    pub cfl: f64,
    pub t_end: f64,
    pub preset: String,
    pub amplitude: f64,
    pub ode_tol: f64,
    pub samples_per_decade: usize,
    pub snapshot_count: usize,
    // [fit]
    pub fit_window_lo: f64,
    /// None means "use t_end".
    pub fit_window_hi: Option<f64>,
    // [correction]
    pub correction_t_end: f64,
    pub correction_k_max: usize,
    // [refine]
    pub refine_n_list: Vec<usize>,
    pub t_probe: f64,
    // [sweep]
    pub gamma_list: Vec<f64>,
    pub lambda_list: Vec<f64>,
    pub mu_list: Vec<f64>,
    // [hardy]
    pub hardy_theta_list: Vec<f64>,
    pub hardy_n_list: Vec<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            gamma: 2.0,
            lambda: 1.0,
            mu: 3.0,
            delta: None,
            mass: 1.0,
            n_cells: 400,
            cfl: 0.5,
            t_end: 100.0,
            preset: "dilation".into(),
            amplitude: 0.01,
            ode_tol: 1e-10,
            samples_per_decade: 40,
            snapshot_count: 9,
            fit_window_lo: 10.0,
            fit_window_hi: None,
            correction_t_end: 1e6,
            correction_k_max: 3,
            refine_n_list: vec![100, 200, 400, 800],
            t_probe: 1.0,
            gamma_list: vec![2.0],
            lambda_list: vec![1.0],
            mu_list: vec![3.0],
            hardy_theta_list: vec![1.5, 2.0, 3.0],
            hardy_n_list: vec![100, 200, 400, 800, 1600],
        }
    }
}

fn parse_f64(section: &str, key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>().map_err(|_| {
        CliError::Validation(format!("[{section}] {key}: not a number: {v:?}"))
    })
}

fn parse_usize(section: &str, key: &str, v: &str) -> Result<usize> {
    v.parse::<usize>().map_err(|_| {
        CliError::Validation(format!("[{section}] {key}: not a count: {v:?}"))
    })
}

fn parse_f64_list(section: &str, key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .map(|s| parse_f64(section, key, s.trim()))
        .collect()
}

fn parse_usize_list(section: &str, key: &str, v: &str) -> Result<Vec<usize>> {
    v.split(',')
        .map(|s| parse_usize(section, key, s.trim()))
        .collect()
}

/// Parse the `[section] key = value` text format. Unknown sections/keys and
/// duplicate keys are errors; '#' starts a comment.
pub fn parse_config_text(text: &str) -> Result<RunConfig> {
    let mut config = RunConfig::default();
    let mut seen: BTreeMap<String, ()> = BTreeMap::new();
    let mut section = String::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| {
                    CliError::Validation(format!("line {}: unterminated section", lineno + 1))
                })?
                .trim();
            section = name.to_string();
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Validation(format!("line {}: expected key = value", lineno + 1))
        })?;
        let key = key.trim();
        let value = value.trim();
        if value.is_empty() {
            return Err(CliError::Validation(format!(
                "line {}: empty value for {key}",
                lineno + 1
            )));
        }
        let full = format!("{section}.{key}");
        if seen.insert(full.clone(), ()).is_some() {
            return Err(CliError::Validation(format!("duplicate key {full}")));
        }
        apply_key(&mut config, &section, key, value)?;
    }
    validate(&config)?;
    Ok(config)
}

/// Apply one `section.key=value` override string.
pub fn apply_override(config: &mut RunConfig, entry: &str) -> Result<()> {
    let (path, value) = entry.split_once('=').ok_or_else(|| {
        CliError::Validation(format!("override must be section.key=value, got {entry:?}"))
    })?;
    let (section, key) = path.trim().split_once('.').ok_or_else(|| {
        CliError::Validation(format!("override key must be section.key, got {path:?}"))
    })?;
    apply_key(config, section.trim(), key.trim(), value.trim())?;
    validate(config)
}

fn apply_key(config: &mut RunConfig, section: &str, key: &str, value: &str) -> Result<()> {
    match (section, key) {
        ("params", "gamma") => config.gamma = parse_f64(section, key, value)?,
        ("params", "lambda") => config.lambda = parse_f64(section, key, value)?,
        ("params", "mu") => config.mu = parse_f64(section, key, value)?,
        ("params", "delta") => config.delta = Some(parse_f64(section, key, value)?),
        ("run", "mass") => config.mass = parse_f64(section, key, value)?,
        ("run", "n_cells") => config.n_cells = parse_usize(section, key, value)?,
        ("run", "cfl") => config.cfl = parse_f64(section, key, value)?,
        ("run", "t_end") => config.t_end = parse_f64(section, key, value)?,
        ("run", "preset") => config.preset = value.to_string(),
        ("run", "amplitude") => config.amplitude = parse_f64(section, key, value)?,
        ("run", "ode_tol") => config.ode_tol = parse_f64(section, key, value)?,
        ("run", "samples_per_decade") => {
            config.samples_per_decade = parse_usize(section, key, value)?
        }
        ("run", "snapshot_count") => config.snapshot_count = parse_usize(section, key, value)?,
        ("fit", "window_lo") => config.fit_window_lo = parse_f64(section, key, value)?,
        ("fit", "window_hi") => config.fit_window_hi = Some(parse_f64(section, key, value)?),
        ("correction", "t_end") => config.correction_t_end = parse_f64(section, key, value)?,
        ("correction", "k_max") => config.correction_k_max = parse_usize(section, key, value)?,
        ("refine", "n_list") => config.refine_n_list = parse_usize_list(section, key, value)?,
        ("refine", "t_probe") => config.t_probe = parse_f64(section, key, value)?,
        ("sweep", "gamma_list") => config.gamma_list = parse_f64_list(section, key, value)?,
        ("sweep", "lambda_list") => config.lambda_list = parse_f64_list(section, key, value)?,
        ("sweep", "mu_list") => config.mu_list = parse_f64_list(section, key, value)?,
        ("hardy", "theta_list") => {
            config.hardy_theta_list = parse_f64_list(section, key, value)?
        }
        ("hardy", "n_list") => config.hardy_n_list = parse_usize_list(section, key, value)?,
        _ => {
            return Err(CliError::Validation(format!(
                "unknown configuration key [{section}] {key}"
            )))
        }
    }
    Ok(())
}

/// Structural validation beyond what the core constructors check.
pub fn validate(config: &RunConfig) -> Result<()> {
    let _ = config.gas_parameters()?;
    if !(config.mass > 0.0 && config.mass.is_finite()) {
        return Err(CliError::Validation(format!(
            "mass must be positive, got {}",
            config.mass
        )));
    }
    if config.n_cells < 8 || config.n_cells % 2 != 0 {
        return Err(CliError::Validation(format!(
            "n_cells must be even and >= 8, got {}",
            config.n_cells
        )));
    }
    if !(config.cfl > 0.0 && config.cfl <= 1.0) {
        return Err(CliError::Validation(format!(
            "cfl must lie in (0, 1], got {}",
            config.cfl
        )));
    }
    if !(config.t_end > 0.0) {
        return Err(CliError::Validation(format!(
            "t_end must be positive, got {}",
            config.t_end
        )));
    }
    if !(config.ode_tol > 0.0) {
        return Err(CliError::Validation(format!(
            "ode_tol must be positive, got {}",
            config.ode_tol
        )));
    }
    vacuumgas::Preset::parse(&config.preset)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    if config.samples_per_decade == 0 || config.snapshot_count == 0 {
        return Err(CliError::Validation(
            "samples_per_decade and snapshot_count must be positive".into(),
        ));
    }
    if config.correction_k_max > 4 {
        return Err(CliError::Validation(format!(
            "correction k_max is capped at 4, got {}",
            config.correction_k_max
        )));
    }
    if config.refine_n_list.len() < 3 {
        return Err(CliError::Validation(
            "refine n_list needs at least 3 grids".into(),
        ));
    }
    for &n in config.refine_n_list.iter().chain(config.hardy_n_list.iter()) {
        if n < 8 || n % 2 != 0 {
            return Err(CliError::Validation(format!(
                "grid sizes must be even and >= 8, got {n}"
            )));
        }
    }
    if config.gamma_list.is_empty() || config.lambda_list.is_empty() || config.mu_list.is_empty() {
        return Err(CliError::Validation("sweep lists must be non-empty".into()));
    }
    Ok(())
}

impl RunConfig {
    pub fn gas_parameters(&self) -> Result<GasParameters> {
        let p = match self.delta {
            Some(d) => GasParameters::with_delta(self.gamma, self.lambda, self.mu, d),
            None => GasParameters::new(self.gamma, self.lambda, self.mu),
        };
        p.map_err(|e| CliError::Validation(e.to_string()))
    }

    pub fn fit_window(&self) -> (f64, f64) {
        (self.fit_window_lo, self.fit_window_hi.unwrap_or(self.t_end))
    }

    /// Canonical text form: every key in fixed order, resolved values.
    /// Parsing it back yields an equal config.
    pub fn canonical_text(&self) -> String {
        let mut s = String::new();
        let list_f = |v: &[f64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let list_u = |v: &[usize]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let _ = writeln!(s, "[params]");
        let _ = writeln!(s, "gamma = {}", self.gamma);
        let _ = writeln!(s, "lambda = {}", self.lambda);
        let _ = writeln!(s, "mu = {}", self.mu);
        if let Some(d) = self.delta {
            let _ = writeln!(s, "delta = {d}");
        }
        let _ = writeln!(s, "[run]");
        let _ = writeln!(s, "mass = {}", self.mass);
        let _ = writeln!(s, "n_cells = {}", self.n_cells);
        let _ = writeln!(s, "cfl = {}", self.cfl);
        let _ = writeln!(s, "t_end = {}", self.t_end);
        let _ = writeln!(s, "preset = {}", self.preset);
        let _ = writeln!(s, "amplitude = {}", self.amplitude);
        let _ = writeln!(s, "ode_tol = {}", self.ode_tol);
        let _ = writeln!(s, "samples_per_decade = {}", self.samples_per_decade);
        let _ = writeln!(s, "snapshot_count = {}", self.snapshot_count);
        let _ = writeln!(s, "[fit]");
        let _ = writeln!(s, "window_lo = {}", self.fit_window_lo);
        if let Some(hi) = self.fit_window_hi {
            let _ = writeln!(s, "window_hi = {hi}");
        }
        let _ = writeln!(s, "[correction]");
        let _ = writeln!(s, "t_end = {}", self.correction_t_end);
        let _ = writeln!(s, "k_max = {}", self.correction_k_max);
        let _ = writeln!(s, "[refine]");
        let _ = writeln!(s, "n_list = {}", list_u(&self.refine_n_list));
        let _ = writeln!(s, "t_probe = {}", self.t_probe);
        let _ = writeln!(s, "[sweep]");
        let _ = writeln!(s, "gamma_list = {}", list_f(&self.gamma_list));
        let _ = writeln!(s, "lambda_list = {}", list_f(&self.lambda_list));
        let _ = writeln!(s, "mu_list = {}", list_f(&self.mu_list));
        let _ = writeln!(s, "[hardy]");
        let _ = writeln!(s, "theta_list = {}", list_f(&self.hardy_theta_list));
        let _ = writeln!(s, "n_list = {}", list_u(&self.hardy_n_list));
        s
    }

    /// SHA-256 of the canonical text, hex-encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_text().as_bytes());
        digest.iter().fold(String::new(), |mut acc, b| {
            let _ = write!(acc, "{b:02x}");
            acc
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_identity() {
        let mut config = RunConfig::default();
        config.gamma = 1.5;
        config.lambda = 0.5;
        config.mu = 1.0;
        config.delta = Some(0.6);
        config.refine_n_list = vec![80, 160, 320];
        let text = config.canonical_text();
        let parsed = parse_config_text(&text).unwrap();
        assert_eq!(parsed, config);
        assert_eq!(parsed.hash(), config.hash());
    }

    #[test]
    fn comments_and_whitespace() {
        let text = "
# whole-line comment
[params]
gamma = 2.5   # trailing comment
  lambda =0.75

[run]
t_end = 42
";
        let c = parse_config_text(text).unwrap();
        assert_eq!(c.gamma, 2.5);
        assert_eq!(c.lambda, 0.75);
        assert_eq!(c.t_end, 42.0);
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        assert!(parse_config_text("[params]\nwarp = 9\n").is_err());
        assert!(parse_config_text("[bogus]\ngamma = 2\n").is_err());
        assert!(parse_config_text("[params]\ngamma = 2\ngamma = 3\n").is_err());
        assert!(parse_config_text("[params]\ngamma 2\n").is_err());
        assert!(parse_config_text("[params\ngamma = 2\n").is_err());
    }

    #[test]
    fn rejects_invalid_physics() {
        assert!(parse_config_text("[params]\ngamma = 0.5\n").is_err());
        assert!(parse_config_text("[params]\nlambda = 2\n").is_err());
        assert!(parse_config_text("[run]\nn_cells = 7\n").is_err());
        assert!(parse_config_text("[run]\ncfl = 1.5\n").is_err());
        assert!(parse_config_text("[run]\npreset = tornado\n").is_err());
        assert!(parse_config_text("[params]\ndelta = 99\n").is_err());
    }

    #[test]
    fn overrides() {
        let mut c = RunConfig::default();
        apply_override(&mut c, "params.gamma=1.5").unwrap();
        apply_override(&mut c, "run.n_cells=64").unwrap();
        apply_override(&mut c, "refine.n_list=32,64,128").unwrap();
        assert_eq!(c.gamma, 1.5);
        assert_eq!(c.n_cells, 64);
        assert_eq!(c.refine_n_list, vec![32, 64, 128]);
        assert!(apply_override(&mut c, "nonsense").is_err());
        assert!(apply_override(&mut c, "run.warp=1").is_err());
        assert!(apply_override(&mut c, "params.gamma=0.1").is_err());
    }

    #[test]
    fn hash_distinguishes_configs() {
        let a = RunConfig::default();
        let mut b = RunConfig::default();
        b.amplitude = 0.02;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
