//! Study files in, result tables out.

mod config;
mod results;
mod series;

use std::path::{Path, PathBuf};

pub use config::{
    assemble, config_hash, BranchOverlay, ClusterConfig, CostScenario, LoadOptions, NodeConfig,
    StudyConfig, TreeConfig,
};
pub use results::{write_results, RunRecord};
pub use series::{load_series, SeriesTable};

use crate::cluster::ClusterError;
use crate::study::Study;
use crate::tree::TreeError;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}{}: {message}", line.map(|l| format!(", line {l}")).unwrap_or_default())]
    Schema {
        path: String,
        line: Option<usize>,
        message: String,
    },
    #[error("missing series: {0}")]
    MissingSeries(String),
    #[error("value out of range: {0}")]
    Range(String),
    #[error("{path}, row {row}: {message}")]
    Parse {
        path: String,
        row: usize,
        message: String,
    },
    #[error("{path}: key '{key}' has no row for step {step}")]
    Gap {
        path: String,
        key: String,
        step: usize,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
}

/// A study as read from disk.
#[derive(Clone, Debug)]
pub struct LoadedStudy {
    /// Configuration as written in the file, before run-time adjustments.
    pub config: StudyConfig,
    pub series: SeriesTable,
    pub study: Study,
    /// Hash of the adjusted configuration and the series.
    pub hash: String,
    pub path: PathBuf,
}

pub fn read_config(path: &Path) -> Result<StudyConfig, IoError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })?;
    StudyConfig::parse(&text, &path.display().to_string())
}

/// Reads a study configuration and its series file and resolves them.
pub fn load_study(path: &Path, opts: &LoadOptions) -> Result<LoadedStudy, IoError> {
    let config = read_config(path)?;
    let series_path = path.parent().unwrap_or(Path::new(".")).join(&config.series);
    if !series_path.is_file() {
        return Err(IoError::MissingSeries(format!(
            "series file {} does not exist",
            series_path.display()
        )));
    }
    let series = load_series(&series_path)?;
    let study = assemble(&config, &series, opts)?;
    let hash = config_hash(&config.adjusted(opts)?, &series);
    Ok(LoadedStudy {
        config,
        series,
        study,
        hash,
        path: path.to_path_buf(),
    })
}

/// Writes `config` and `series` into `dir` as `<stem>.toml` and the series file
/// named in the configuration.
pub fn write_study(
    dir: &Path,
    stem: &str,
    config: &StudyConfig,
    series: &SeriesTable,
) -> Result<PathBuf, IoError> {
    let io = |p: &Path| {
        let path = p.display().to_string();
        move |source| IoError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let cfg_path = dir.join(format!("{stem}.toml"));
    std::fs::write(&cfg_path, config.to_toml()).map_err(io(&cfg_path))?;
    let series_path = dir.join(&config.series);
    std::fs::write(&series_path, series.to_csv()).map_err(io(&series_path))?;
    Ok(cfg_path)
}
