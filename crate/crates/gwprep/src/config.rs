use std::path::{Path, PathBuf};

use gwprep_core::gatecost::CostPolicy;
use gwprep_core::grover_rudolph::GrConfig;
use gwprep_core::phase_prep::PhaseConfig;
use gwprep_core::qgan::QganConfig;
use gwprep_core::waveform::{frequency_grid, FrequencyGrid, MassMode, WaveformParams};
use gwprep_core::Precision;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::presets;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub f_min: f64,
    pub f_max: f64,
    pub n: u32,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            f_min: 40.0,
            f_max: 168.0,
            n: 6,
        }
    }
}

/// Simulator used by `prepare`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Stores nonzero amplitudes only; double precision.
    #[default]
    Sparse,
    Dense,
}

/// Distribution the generator is trained against.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainTarget {
    #[default]
    Waveform,
    Uniform,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub waveform: WaveformParams,
    pub grid: GridConfig,
    pub mass_mode: MassMode,
    pub backend: Backend,
    pub precision: Precision,
    pub gr: GrConfig,
    pub phase: PhaseConfig,
    pub qgan: QganConfig,
    pub train_target: TrainTarget,
    /// Trained generator angles for `prepare --method pqc`; the bundled
    /// `n = 6`, `L = 20` set is used when absent.
    pub pqc_params: Option<PathBuf>,
    pub cost: CostPolicy,
    /// Durations in seconds for `cost`, ascending.
    pub durations: Vec<f64>,
    pub output_dir: Option<PathBuf>,
    /// Overrides `qgan.seed` when present.
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::config(format!("invalid config: {e}")))
    }

    /// Reads a config file, or a bundled preset when `source` names one and no
    /// such file exists.
    pub fn load(source: &str) -> Result<Self, CliError> {
        let path = Path::new(source);
        if path.exists() {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::config(format!("cannot read {source}: {e}")))?;
            return Self::from_json(&text);
        }
        match presets::preset(source) {
            Some(text) => Self::from_json(text),
            None => Err(CliError::config(format!(
                "{source} is neither a file nor a preset ({})",
                presets::NAMES.join(", ")
            ))),
        }
    }

    /// Applies the seed override and checks every section.
    pub fn resolve(mut self) -> Result<Self, CliError> {
        if let Some(seed) = self.seed {
            self.qgan.seed = seed;
        }
        self.seed = Some(self.qgan.seed);
        self.waveform.validate()?;
        let grid = self.frequency_grid()?;
        let n = grid.n;
        if self.gr.n != n {
            return Err(CliError::config(format!("gr.n = {} but the grid has n = {n}", self.gr.n)));
        }
        self.gr.validate()?;
        self.phase.validate(n)?;
        self.qgan.validate()?;
        if self.backend == Backend::Sparse && self.precision == Precision::Single {
            return Err(CliError::config("single precision needs the dense backend"));
        }
        if self.durations.iter().any(|t| !(*t > 0.0)) || self.durations.windows(2).any(|w| w[1] < w[0]) {
            return Err(CliError::config("durations must be positive and ascending"));
        }
        Ok(self)
    }

    pub fn frequency_grid(&self) -> Result<FrequencyGrid, CliError> {
        Ok(frequency_grid(self.grid.f_min, self.grid.f_max, self.grid.n)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
