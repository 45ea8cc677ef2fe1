//! Run configuration: a sectioned `key = value` file (TOML syntax).
//!
//! ```text
//! [network]
//! preset = "paper-synthetic"      # or: file = "net.txt"
//!
//! [model]
//! alpha = 1.0                     # decay rate of e^{-alpha (t - s)}
//! damping = "0.85"                # or "linear:0.01:0.99"
//! personalization = "uniform"     # input | inverse-input | file:PATH
//! dangling = "same"               # or any personalization spec
//!
//! [solver]
//! kind = "auto"                   # direct | power
//! tol = 1e-12
//! max_iter = 100000
//!
//! [grid]
//! points = 101                    # continuous networks
//! truncate = 0                    # > 0: solve the truncation instead
//!
//! [quadrature]
//! tol = 1e-10
//! max_subdivisions = 65536
//!
//! [output]
//! format = "csv"
//! path = "out.csv"                # stdout when absent
//! header = true
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::{load_network, NetworkFile};
use crate::network::{DampingSchedule, DecayKernel, PersonalizationSchedule};
use crate::output::Format;
use crate::pagerank::{SolverConfig, TrajectoryOptions};
use crate::presets;
use crate::quadrature::QuadratureConfig;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub alpha: f64,
    pub damping: String,
    pub personalization: String,
    pub dangling: String,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            damping: "0.85".into(),
            personalization: "uniform".into(),
            dangling: "same".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub points: usize,
    pub truncate: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            points: 101,
            truncate: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    pub header: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            format: Format::Csv,
            path: None,
            header: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub network: NetworkSection,
    pub model: ModelSection,
    pub solver: SolverConfig,
    pub grid: GridSection,
    pub quadrature: QuadratureConfig,
    pub output: OutputSection,
    /// 0 lets the thread pool decide.
    pub threads: usize,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::invalid(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::invalid(format!("config file {} not found", path.display())));
        }
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Internal(format!("config: {e}")))
    }

    /// Checks that exactly one network source is named and that it exists.
    pub fn validate(&self) -> Result<()> {
        match (&self.network.preset, &self.network.file) {
            (Some(_), Some(_)) => Err(Error::invalid("give either a network preset or a file, not both")),
            (None, None) => Err(Error::invalid("no network source given")),
            (Some(name), None) if presets::by_name(name).is_none() => {
                Err(Error::invalid(format!("unknown preset '{name}'")))
            }
            (None, Some(path)) if !path.exists() => Err(Error::NotFound(path.clone())),
            _ => Ok(()),
        }
    }

    pub fn load_network(&self) -> Result<NetworkFile> {
        self.validate()?;
        match (&self.network.preset, &self.network.file) {
            (Some(name), _) => presets::by_name(name)
                .expect("validated")
                .map(NetworkFile::Continuous),
            (None, Some(path)) => load_network(path),
            (None, None) => unreachable!("validated"),
        }
    }

    pub fn trajectory_options(&self) -> Result<TrajectoryOptions> {
        let mut opts = TrajectoryOptions::new(
            DecayKernel::exponential(self.model.alpha),
            parse_damping(&self.model.damping)?,
            parse_personalization(&self.model.personalization)?,
        )
        .with_solver(self.solver);
        if self.model.dangling != "same" {
            opts = opts.with_dangling(parse_personalization(&self.model.dangling)?);
        }
        Ok(opts)
    }
}

/// `0.85` or `linear:START:END`.
pub fn parse_damping(spec: &str) -> Result<DampingSchedule> {
    let bad = || Error::invalid(format!("damping spec '{spec}' is not a number or linear:START:END"));
    if let Some(rest) = spec.strip_prefix("linear:") {
        let (a, b) = rest.split_once(':').ok_or_else(bad)?;
        let start: f64 = a.trim().parse().map_err(|_| bad())?;
        let end: f64 = b.trim().parse().map_err(|_| bad())?;
        for v in [start, end] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::ScheduleRange(format!("damping {v} outside (0, 1)")));
            }
        }
        return Ok(DampingSchedule::LinearByIndex { start, end });
    }
    let value: f64 = spec.trim().parse().map_err(|_| bad())?;
    if !(value > 0.0 && value < 1.0) {
        return Err(Error::ScheduleRange(format!("damping {value} outside (0, 1)")));
    }
    Ok(DampingSchedule::Constant(value))
}

/// `uniform`, `input`, `inverse-input` or `file:PATH`.
///
/// A personalization file holds whitespace-separated positive weights, one
/// line per instant; a single line applies to every instant.
pub fn parse_personalization(spec: &str) -> Result<PersonalizationSchedule> {
    match spec {
        "uniform" => Ok(PersonalizationSchedule::Uniform),
        "input" => Ok(PersonalizationSchedule::Input),
        "inverse-input" => Ok(PersonalizationSchedule::InverseInput),
        other => {
            let path = other.strip_prefix("file:").ok_or_else(|| {
                Error::invalid(format!(
                    "personalization '{other}' is not uniform, input, inverse-input or file:PATH"
                ))
            })?;
            let text = std::fs::read_to_string(path).map_err(|e| {
                Error::invalid(format!("personalization file {path}: {e}"))
            })?;
            let mut rows = Vec::new();
            for (idx, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let row = line
                    .split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<f64>().map_err(|_| Error::parse(idx + 1, format!("bad weight '{s}'"))))
                    .collect::<Result<Vec<_>>>()?;
                rows.push(row);
            }
            if rows.is_empty() {
                return Err(Error::invalid(format!("personalization file {path} is empty")));
            }
            Ok(PersonalizationSchedule::per_instant(format!("file:{path}"), rows))
        }
    }
}
