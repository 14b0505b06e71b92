use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use jcrabi_core::berry::{GaugeConvention, BERRY_N_MAX, DEFAULT_PHI_NODES, MIN_PHI_NODES};
use jcrabi_core::fock::TruncationConfig;
use jcrabi_core::models::{Frame, Model, ModelKind, ModelParams};
use jcrabi_core::spectra::SWEEP_N_MAX;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelChoice {
    Jc,
    Rabi,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GaugeChoice {
    Parallel,
    Anchor,
}

impl GaugeChoice {
    pub fn convention(self) -> GaugeConvention {
        match self {
            GaugeChoice::Parallel => GaugeConvention::ParallelTransport,
            GaugeChoice::Anchor => GaugeConvention::AnchorComponent(None),
        }
    }

    pub fn tag(self) -> &'static str {
        self.convention().tag()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every subcommand; unset flags fall back to the config
/// file, then to the defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct RunFlags {
    #[arg(long, value_enum)]
    pub model: Option<ModelChoice>,
    /// Coupling strengths, comma separated or repeated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub g: Vec<f64>,
    /// Resonator frequency.
    #[arg(long, allow_negative_numbers = true)]
    pub omega: Option<f64>,
    /// Qubit splitting.
    #[arg(long = "Omega", allow_negative_numbers = true)]
    pub qubit_omega: Option<f64>,
    #[arg(long)]
    pub nmax: Option<usize>,
    /// Number of levels per table row.
    #[arg(long)]
    pub levels: Option<usize>,
    #[arg(long)]
    pub phi_nodes: Option<usize>,
    #[arg(long, value_enum)]
    pub gauge: Option<GaugeChoice>,
    /// Eigenindex at phi = 0 (0 is the ground state).
    #[arg(long)]
    pub level: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON file with any of the run settings; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    model: Option<ModelChoice>,
    #[serde(default, deserialize_with = "one_or_many")]
    g: Option<Vec<f64>>,
    omega: Option<f64>,
    #[serde(rename = "Omega")]
    qubit_omega: Option<f64>,
    n_max: Option<usize>,
    k_levels: Option<usize>,
    phi_nodes: Option<usize>,
    gauge: Option<GaugeChoice>,
    level: Option<usize>,
    output_dir: Option<PathBuf>,
    format: Option<Format>,
}

fn one_or_many<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<Vec<f64>>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(f64),
        Many(Vec<f64>),
    }
    Ok(Option::<OneOrMany>::deserialize(d)?.map(|v| match v {
        OneOrMany::One(x) => vec![x],
        OneOrMany::Many(v) => v,
    }))
}

/// Settings after merging flags, file and defaults. `model` and `n_max`
/// stay optional because their defaults depend on the subcommand.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub model: Option<ModelChoice>,
    pub omega: f64,
    #[serde(rename = "Omega")]
    pub qubit_omega: f64,
    pub g: Vec<f64>,
    pub n_max: Option<usize>,
    pub k_levels: usize,
    pub phi_nodes: usize,
    pub gauge: GaugeChoice,
    pub level: usize,
    pub output_dir: PathBuf,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: None,
            omega: 1.0,
            qubit_omega: 1.0,
            g: vec![0.1],
            n_max: None,
            k_levels: 11,
            phi_nodes: DEFAULT_PHI_NODES,
            gauge: GaugeChoice::Anchor,
            level: 1,
            output_dir: PathBuf::from("."),
            format: Format::Csv,
        }
    }
}

impl RunConfig {
    pub fn resolve(flags: &RunFlags) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(path) => read_config_file(path)?,
            None => FileConfig::default(),
        };
        let d = RunConfig::default();
        let cfg = RunConfig {
            model: flags.model.or(file.model),
            omega: flags.omega.or(file.omega).unwrap_or(d.omega),
            qubit_omega: flags.qubit_omega.or(file.qubit_omega).unwrap_or(d.qubit_omega),
            g: if flags.g.is_empty() { file.g.unwrap_or(d.g) } else { flags.g.clone() },
            n_max: flags.nmax.or(file.n_max),
            k_levels: flags.levels.or(file.k_levels).unwrap_or(d.k_levels),
            phi_nodes: flags.phi_nodes.or(file.phi_nodes).unwrap_or(d.phi_nodes),
            gauge: flags.gauge.or(file.gauge).unwrap_or(d.gauge),
            level: flags.level.or(file.level).unwrap_or(d.level),
            output_dir: flags.out.clone().or(file.output_dir).unwrap_or(d.output_dir),
            format: flags.format.or(file.format).unwrap_or(d.format),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let positive = |name: &str, x: f64| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(CliError::Usage(format!("{name} must be positive, got {x}")))
            }
        };
        positive("omega", self.omega)?;
        positive("Omega", self.qubit_omega)?;
        if self.g.is_empty() {
            return Err(CliError::Usage("at least one g is required".into()));
        }
        for &g in &self.g {
            if !(g.is_finite() && g >= 0.0) {
                return Err(CliError::Usage(format!("g must be non-negative, got {g}")));
            }
        }
        if self.n_max == Some(0) {
            return Err(CliError::Usage("nmax must be at least 1".into()));
        }
        if self.k_levels == 0 {
            return Err(CliError::Usage("levels must be at least 1".into()));
        }
        if self.phi_nodes < MIN_PHI_NODES {
            return Err(CliError::Usage(format!(
                "phi-nodes must be at least {MIN_PHI_NODES}, got {}",
                self.phi_nodes
            )));
        }
        Ok(())
    }

    pub fn params(&self, g: f64) -> Result<ModelParams, CliError> {
        ModelParams::with_omega(self.omega, self.qubit_omega, g).map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn truncation(&self, default: usize) -> Result<TruncationConfig, CliError> {
        TruncationConfig::new(self.n_max.unwrap_or(default)).map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn sweep_truncation(&self) -> Result<TruncationConfig, CliError> {
        self.truncation(SWEEP_N_MAX)
    }

    pub fn berry_truncation(&self) -> Result<TruncationConfig, CliError> {
        self.truncation(BERRY_N_MAX)
    }

    /// Models selected for commands that accept both.
    pub fn models(&self, default: ModelChoice, frame: Frame) -> Vec<ModelKind> {
        match self.model.unwrap_or(default) {
            ModelChoice::Jc => vec![ModelKind::new(Model::JaynesCummings, frame)],
            ModelChoice::Rabi => vec![ModelKind::new(Model::Rabi, frame)],
            ModelChoice::Both => vec![
                ModelKind::new(Model::JaynesCummings, frame),
                ModelKind::new(Model::Rabi, frame),
            ],
        }
    }

    /// The single model of commands that need one.
    pub fn single_model(&self, default: ModelChoice, frame: Frame) -> Result<ModelKind, CliError> {
        match self.models(default, frame).as_slice() {
            [one] => Ok(*one),
            _ => Err(CliError::Usage("this command takes --model jc or --model rabi".into())),
        }
    }

    /// `key: value` pairs recorded at the top of every output file.
    pub fn metadata(&self, command: &str) -> Vec<(String, String)> {
        let model = match self.model {
            Some(ModelChoice::Jc) => "jc",
            Some(ModelChoice::Rabi) => "rabi",
            Some(ModelChoice::Both) => "both",
            None => "default",
        };
        let g: Vec<String> = self.g.iter().map(|g| g.to_string()).collect();
        vec![
            ("tool".into(), format!("jcrabi {}", env!("CARGO_PKG_VERSION"))),
            ("command".into(), command.into()),
            ("model".into(), model.into()),
            ("omega".into(), self.omega.to_string()),
            ("Omega".into(), self.qubit_omega.to_string()),
            ("g".into(), g.join(",")),
            ("n_max".into(), self.n_max.map_or("default".into(), |n| n.to_string())),
            ("k_levels".into(), self.k_levels.to_string()),
            ("phi_nodes".into(), self.phi_nodes.to_string()),
            ("gauge".into(), self.gauge.tag().into()),
            ("level".into(), self.level.to_string()),
            ("output_dir".into(), self.output_dir.display().to_string()),
            (
                "format".into(),
                match self.format {
                    Format::Csv => "csv",
                    Format::Json => "json",
                }
                .into(),
            ),
        ]
    }
}

fn read_config_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn defaults() {
        let cfg = RunConfig::resolve(&RunFlags::default()).unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.phi_nodes, 720);
        assert_eq!(cfg.k_levels, 11);
        assert_eq!(cfg.sweep_truncation().unwrap().n_max(), 200);
        assert_eq!(cfg.berry_truncation().unwrap().n_max(), 150);
    }

    #[test]
    fn flags_override_file() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        write!(file, r#"{{"g": 0.5, "Omega": 2.0, "n_max": 40, "gauge": "parallel", "level": 3}}"#).unwrap();
        let flags = RunFlags {
            config: Some(file.path().to_path_buf()),
            nmax: Some(60),
            level: Some(2),
            ..RunFlags::default()
        };
        let cfg = RunConfig::resolve(&flags).unwrap();
        assert_eq!(cfg.g, vec![0.5]);
        assert_eq!(cfg.qubit_omega, 2.0);
        assert_eq!(cfg.n_max, Some(60));
        assert_eq!(cfg.level, 2);
        assert_eq!(cfg.gauge, GaugeChoice::Parallel);
    }

    #[test]
    fn rejects_bad_values_and_unknown_keys() {
        let bad = RunFlags {
            omega: Some(0.0),
            ..RunFlags::default()
        };
        assert!(matches!(RunConfig::resolve(&bad), Err(CliError::Usage(_))));
        let bad = RunFlags {
            phi_nodes: Some(8),
            ..RunFlags::default()
        };
        assert!(RunConfig::resolve(&bad).is_err());
        let mut file = tempfile::NamedTempFile::new().unwrap();
        write!(file, r#"{{"coupling": 0.5}}"#).unwrap();
        let flags = RunFlags {
            config: Some(file.path().to_path_buf()),
            ..RunFlags::default()
        };
        assert!(matches!(RunConfig::resolve(&flags), Err(CliError::Usage(_))));
    }

    #[test]
    fn single_model_needs_a_choice() {
        let mut cfg = RunConfig::default();
        assert_eq!(
            cfg.single_model(ModelChoice::Rabi, Frame::Lab).unwrap(),
            ModelKind::RabiLab
        );
        cfg.model = Some(ModelChoice::Both);
        assert!(cfg.single_model(ModelChoice::Rabi, Frame::Lab).is_err());
    }
}
