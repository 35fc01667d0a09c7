use crate::args::{Direction, Format, Grid, Mode, Shape};
use crate::error::CliError;
use serde::Deserialize;
use std::path::{Path, PathBuf};

/// A number or a string, for keys shared by flags of different types.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Number(f64),
    Text(String),
}

impl Scalar {
    pub fn as_f64(&self) -> Result<f64, CliError> {
        match self {
            Scalar::Number(x) => Ok(*x),
            Scalar::Text(s) => s.trim().parse().map_err(|_| CliError::Domain(format!("not a number: {s}"))),
        }
    }

    /// Decimal numbers become exact fractions: `0.25` is `25/100`.
    pub fn as_rational_text(&self) -> String {
        match self {
            Scalar::Text(s) => s.clone(),
            Scalar::Number(x) => {
                let text = format!("{x}");
                match text.split_once('.') {
                    Some((int, frac)) => format!("{int}{frac}/1{}", "0".repeat(frac.len())),
                    None => text,
                }
            }
        }
    }
}

/// Keys of the `--config` file, one per long flag.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ConfigFile {
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub tolerance: Option<f64>,
    pub reproducible: Option<bool>,
    pub mass: Option<f64>,
    pub beta: Option<f64>,
    pub grid: Option<Grid>,
    pub n: Option<usize>,
    pub powers: Option<Vec<u32>>,
    pub u: Option<Vec<f64>>,
    pub direction: Option<Direction>,
    pub radii: Option<String>,
    pub fit_window: Option<String>,
    pub bound_rate: Option<f64>,
    pub report: Option<PathBuf>,
    pub negative_control: Option<bool>,
    pub obs: Option<String>,
    pub int: Option<String>,
    pub order: Option<u32>,
    pub vanhove: Option<Scalar>,
    pub vanhove_tolerance: Option<f64>,
    pub epsilon: Option<Scalar>,
    pub shape: Option<Shape>,
    pub mode: Option<Mode>,
    pub seed: Option<u64>,
    pub qmc_points: Option<usize>,
    pub qmc_shifts: Option<usize>,
    pub index: Option<u32>,
    pub base_time: Option<f64>,
    pub shifts: Option<Vec<f64>>,
    pub t: Option<Scalar>,
    pub s: Option<Scalar>,
    pub depth: Option<usize>,
    pub corrupt_rules: Option<bool>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Domain(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Domain(format!("invalid config {}: {e}", path.display())))
    }
}

/// The flag if given, else the config value.
pub fn pick<T: Clone>(flag: Option<T>, file: &Option<T>) -> Option<T> {
    flag.or_else(|| file.clone())
}

pub fn pick_flag(flag: bool, file: Option<bool>) -> bool {
    flag || file.unwrap_or(false)
}

/// `lo..hi`, or `lo..hi:step` when `step` is allowed.
pub fn parse_range(text: &str) -> Result<(f64, f64, Option<f64>), CliError> {
    let bad = || CliError::Domain(format!("invalid range `{text}`, expected lo..hi or lo..hi:step"));
    let (span, step) = match text.split_once(':') {
        Some((span, step)) => (span, Some(step.trim().parse::<f64>().map_err(|_| bad())?)),
        None => (text, None),
    };
    let (lo, hi) = span.split_once("..").ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(lo <= hi) {
        return Err(bad());
    }
    Ok((lo, hi, step))
}

/// Evenly spaced points `lo, lo + step, …` up to `hi` inclusive.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let (lo, hi, step) = parse_range(text)?;
    let step = step.ok_or_else(|| CliError::Domain(format!("radii `{text}` need a step, lo..hi:step")))?;
    if !(step > 0.0) {
        return Err(CliError::Domain(format!("step must be > 0 in `{text}`")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|k| lo + step * k as f64).collect())
}

/// `n` or `n1..n2`, inclusive.
pub fn parse_indices(text: &str) -> Result<Vec<u32>, CliError> {
    let bad = || CliError::Domain(format!("invalid van Hove indices `{text}`, expected n or n1..n2"));
    match text.split_once("..") {
        Some((a, b)) => {
            let a: u32 = a.trim().parse().map_err(|_| bad())?;
            let b: u32 = b.trim().parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            Ok((a..=b).collect())
        }
        None => Ok(vec![text.trim().parse().map_err(|_| bad())?]),
    }
}

/// `1` for the identity, `phiK` for `:φ^K:`.
pub fn parse_monomial(text: &str) -> Result<u32, CliError> {
    let t = text.trim();
    if t == "1" {
        return Ok(0);
    }
    t.strip_prefix("phi")
        .and_then(|k| k.parse().ok())
        .ok_or_else(|| CliError::Domain(format!("invalid monomial `{text}`, expected 1 or phiK")))
}
