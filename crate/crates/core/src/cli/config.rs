use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;

use super::CliError;
use crate::units::mhz;
use crate::SystemParams;

/// Rates in MHz (`rate / 2pi`).
#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsSection {
    pub kappa_ex: f64,
    pub kappa_i: f64,
    pub h: f64,
    pub gamma: f64,
    pub g_tw: f64,
    pub g_tw_im: f64,
    pub drive: f64,
    pub drive_im: f64,
    pub delta_a: f64,
    pub delta_c: f64,
    /// `omega_A - omega_C`, used by detuning sweeps.
    pub atom_cavity_offset: f64,
}

impl ParamsSection {
    pub fn to_params(&self) -> SystemParams {
        SystemParams {
            kappa_ex: mhz(self.kappa_ex),
            kappa_i: mhz(self.kappa_i),
            h: mhz(self.h),
            gamma: mhz(self.gamma),
            g_tw: Complex64::new(mhz(self.g_tw), mhz(self.g_tw_im)),
            delta_a: mhz(self.delta_a),
            delta_c: mhz(self.delta_c),
            drive: Complex64::new(mhz(self.drive), mhz(self.drive_im)),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default)]
    pub scale: Scale,
}

impl GridSection {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        if self.count == 0 {
            return Err(CliError::Config("grid.count: empty grid".into()));
        }
        if self.count < 2 {
            return Err(CliError::Config("grid.count: a sweep needs at least 2 points".into()));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(CliError::Config("grid.start/grid.stop: must be finite".into()));
        }
        let last = (self.count - 1) as f64;
        match self.scale {
            Scale::Linear => {
                Ok((0..self.count).map(|k| self.start + (self.stop - self.start) * k as f64 / last).collect())
            }
            Scale::Log => {
                if !(self.start > 0.0 && self.stop > 0.0) {
                    return Err(CliError::Config("grid.scale: log grids need positive start and stop".into()));
                }
                let (a, b) = (self.start.ln(), self.stop.ln());
                Ok((0..self.count).map(|k| (a + (b - a) * k as f64 / last).exp()).collect())
            }
        }
    }
}

/// Secondary parameter producing one curve per value.
#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum SeriesParam {
    GTw,
    Drive,
    KappaI,
}

impl SeriesParam {
    pub fn column(self) -> &'static str {
        match self {
            SeriesParam::GTw => "g_tw_over_2pi_MHz",
            SeriesParam::Drive => "E_p_over_2pi_MHz",
            SeriesParam::KappaI => "kappa_i_over_2pi_MHz",
        }
    }

    pub fn apply(self, params: &ParamsSection, value: f64) -> ParamsSection {
        let mut p = *params;
        match self {
            SeriesParam::GTw => {
                p.g_tw = value;
                p.g_tw_im = 0.0;
            }
            SeriesParam::Drive => {
                p.drive = value;
                p.drive_im = 0.0;
            }
            SeriesParam::KappaI => p.kappa_i = value,
        }
        p
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SeriesSection {
    pub param: SeriesParam,
    pub values: Vec<f64>,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PulseSection {
    /// Microseconds.
    pub t_p: f64,
    pub alpha_sq: f64,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct FockSection {
    pub cutoff: usize,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    pub format: Format,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Linear,
    Master,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub workers: usize,
    pub strict: bool,
    pub model: Option<Model>,
    pub max_dim: usize,
    pub tolerance: f64,
}

impl Default for RunSection {
    fn default() -> Self {
        Self { workers: 1, strict: false, model: None, max_dim: crate::model::DEFAULT_MAX_DIM, tolerance: 5e-3 }
    }
}

/// Parsed configuration file.
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub params: ParamsSection,
    pub fock: Option<FockSection>,
    pub grid: Option<GridSection>,
    pub series: Option<SeriesSection>,
    pub pulse: Option<PulseSection>,
    pub output: OutputSection,
    pub run: RunSection,
}

/// Recursively overlays `over` onto `base`.
fn merge(base: &mut toml::Table, over: toml::Table) {
    for (key, value) in over {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

fn parse_table(text: &str, origin: &str) -> Result<toml::Table, CliError> {
    text.parse::<toml::Table>().map_err(|e| CliError::Config(format!("{origin}: {e}")))
}

/// Builds the configuration from preset fragments and an optional file, later
/// sources taking precedence key by key.
pub fn load(preset: &[&str], file: Option<&Path>) -> Result<FileConfig, CliError> {
    let mut table = toml::Table::new();
    for fragment in preset {
        merge(&mut table, parse_table(fragment, "preset")?);
    }
    if let Some(path) = file {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        merge(&mut table, parse_table(&text, &path.display().to_string())?);
    }
    FileConfig::deserialize(toml::Value::Table(table)).map_err(|e| CliError::Config(format!("configuration: {e}")))
}
