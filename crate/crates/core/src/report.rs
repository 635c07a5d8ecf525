//! Output formats: the rate CSV, the run manifest and the layered run
//! configuration that both the CLI and manifests share.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{RateCurve, ScenarioConfig};

pub const CSV_HEADER: [&str; 6] = [
    "M",
    "rate_conventional_mean",
    "rate_conventional_stderr",
    "rate_lensed_mean",
    "rate_lensed_stderr",
    "n_trials",
];

/// Formats a value with at least ten significant digits and a `.` decimal
/// point regardless of locale.
pub fn format_value(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-3..1e6).contains(&a) {
        let digits = if a == 0.0 { 10 } else { (9 - a.log10().floor() as i32).max(0) as usize };
        format!("{v:.digits$}")
    } else {
        format!("{v:.9e}")
    }
}

pub fn write_rate_csv<W: Write>(curve: &RateCurve, writer: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| Error::domain("CSV output", e.to_string());
    csv.write_record(CSV_HEADER).map_err(io)?;
    for (k, m) in curve.m_values.iter().enumerate() {
        let (c, l) = (curve.conventional[k], curve.lensed[k]);
        csv.write_record([
            m.to_string(),
            format_value(c.mean),
            format_value(c.stderr),
            format_value(l.mean),
            format_value(l.stderr),
            curve.n_trials.to_string(),
        ])
        .map_err(io)?;
    }
    csv.flush()
        .map_err(|e| Error::domain("CSV output", e.to_string()))
}

pub fn write_rate_csv_file(curve: &RateCurve, path: &Path) -> Result<()> {
    let file = fs::File::create(path)
        .map_err(|e| Error::domain("output path", format!("{}: {e}", path.display())))?;
    write_rate_csv(curve, std::io::BufWriter::new(file))
}

/// Path counts for a run; a single count or a list in config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PathCounts {
    One(usize),
    Many(Vec<usize>),
}

impl PathCounts {
    pub fn to_vec(&self) -> Vec<usize> {
        match self {
            PathCounts::One(l) => vec![*l],
            PathCounts::Many(v) => v.clone(),
        }
    }
}

/// A scenario with one or more path counts, fully resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub antennas: usize,
    pub spacing: f64,
    pub beamwidth: f64,
    pub aperture: f64,
    pub angular_spread: f64,
    pub snr_db: f64,
    pub paths: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    #[serde(default, rename = "M", skip_serializing_if = "Option::is_none")]
    pub m_values: Option<Vec<usize>>,
}

impl RunConfig {
    pub fn from_scenario(base: &ScenarioConfig, paths: Vec<usize>) -> Self {
        Self {
            antennas: base.antennas,
            spacing: base.spacing,
            beamwidth: base.beamwidth,
            aperture: base.aperture,
            angular_spread: base.angular_spread,
            snr_db: base.snr_db,
            paths,
            trials: base.trials,
            seed: base.seed,
            m_values: base.m_values.clone(),
        }
    }

    /// One validated scenario per path count, in the order given.
    pub fn scenarios(&self) -> Result<Vec<ScenarioConfig>> {
        if self.paths.is_empty() {
            return Err(Error::domain("paths", "at least one path count is required"));
        }
        self.paths
            .iter()
            .map(|&paths| {
                let s = ScenarioConfig {
                    antennas: self.antennas,
                    spacing: self.spacing,
                    beamwidth: self.beamwidth,
                    aperture: self.aperture,
                    angular_spread: self.angular_spread,
                    snr_db: self.snr_db,
                    paths,
                    trials: self.trials,
                    seed: self.seed,
                    m_values: self.m_values.clone(),
                };
                s.validate()?;
                Ok(s)
            })
            .collect()
    }
}

/// Partially specified configuration as read from a file. Missing keys fall
/// back to the preset.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub antennas: Option<usize>,
    pub spacing: Option<f64>,
    pub beamwidth: Option<f64>,
    pub aperture: Option<f64>,
    pub angular_spread: Option<f64>,
    pub snr_db: Option<f64>,
    pub paths: Option<PathCounts>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    #[serde(rename = "M")]
    pub m_values: Option<Vec<usize>>,
}

impl ConfigOverrides {
    pub fn apply(&self, cfg: &mut RunConfig) {
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = &self.$field {
                    cfg.$field = v.clone();
                }
            )*};
        }
        set!(antennas, spacing, beamwidth, aperture, angular_spread, snr_db, trials, seed);
        if let Some(p) = &self.paths {
            cfg.paths = p.to_vec();
        }
        if let Some(m) = &self.m_values {
            cfg.m_values = Some(m.clone());
        }
    }

    /// Parses TOML text. A manifest is accepted as well: its `[config]`
    /// table is used.
    pub fn from_toml(text: &str) -> Result<Self> {
        let bad = |e: toml::de::Error| Error::domain("config file", e.message().to_string());
        let mut table: toml::Table = toml::from_str(text).map_err(bad)?;
        let body = match table.remove("config") {
            Some(toml::Value::Table(inner)) if table.contains_key("tool_version") => inner,
            Some(other) => {
                table.insert("config".into(), other);
                table
            }
            None => table,
        };
        body.try_into().map_err(bad)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::domain("config file", format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }
}

/// Record of one CLI invocation, written next to its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    pub runtime_seconds: f64,
    pub outputs: Vec<String>,
    pub config: RunConfig,
}

impl RunManifest {
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::domain("manifest", e.to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_toml()?)
            .map_err(|e| Error::domain("manifest path", format!("{}: {e}", path.display())))
    }
}

/// Output locations for a run writing to `out`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputLayout {
    pub csv: Vec<PathBuf>,
    pub manifest: PathBuf,
}

/// With one path count the CSV goes to `out`; with several, each gets an
/// `_L<count>` suffix. The manifest sits beside them as
/// `<stem>.manifest.toml`.
pub fn output_layout(out: &Path, paths: &[usize]) -> OutputLayout {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "rates".into());
    let ext = out
        .extension()
        .map(|e| e.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv".into());
    let csv = if paths.len() == 1 {
        vec![out.to_path_buf()]
    } else {
        paths
            .iter()
            .map(|l| out.with_file_name(format!("{stem}_L{l}.{ext}")))
            .collect()
    };
    OutputLayout {
        csv,
        manifest: out.with_file_name(format!("{stem}.manifest.toml")),
    }
}
