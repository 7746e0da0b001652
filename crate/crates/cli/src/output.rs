use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use magcoh::config::ConfigError;
use magcoh::fock::FockError;
use magcoh::gdyn::DynError;
use magcoh::minpacket::MinPacketError;
use magcoh::wavefields::WaveError;
use magcoh::PhysicalConfig;
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Gate(String),
    Engine(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Gate(_) => 2,
            CliError::Engine(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Gate(m) => write!(f, "numerical gate failed: {m}"),
            CliError::Engine(m) => write!(f, "engine error: {m}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<DynError> for CliError {
    fn from(e: DynError) -> Self {
        match e {
            DynError::WronskianDrift { .. } | DynError::InvariantDrift { .. } | DynError::NonPhysical { .. } => {
                CliError::Gate(e.to_string())
            }
            DynError::InvalidProfile(_) | DynError::InvalidTimes(_) | DynError::UnsupportedConfig(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Engine(e.to_string()),
        }
    }
}

impl From<WaveError> for CliError {
    fn from(e: WaveError) -> Self {
        match e {
            WaveError::GridTooCoarse { .. } | WaveError::BranchMismatch { .. } | WaveError::BadWronskian { .. } => {
                CliError::Gate(e.to_string())
            }
            WaveError::InvalidGrid(_) | WaveError::InvalidParameter(_) | WaveError::CenterOutsideGrid { .. } => {
                CliError::Usage(e.to_string())
            }
            WaveError::Fock(f) => f.into(),
            _ => CliError::Engine(e.to_string()),
        }
    }
}

impl From<FockError> for CliError {
    fn from(e: FockError) -> Self {
        CliError::Engine(e.to_string())
    }
}

impl From<MinPacketError> for CliError {
    fn from(e: MinPacketError) -> Self {
        match e {
            MinPacketError::Wave(w) => w.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Engine(format!("i/o: {e}"))
    }
}

#[derive(Debug, Serialize)]
pub struct RunManifest<'a, P: Serialize> {
    pub command: &'a str,
    pub params: &'a P,
    pub config: PhysicalConfig,
    pub config_sha256: String,
    pub version: &'static str,
    pub duration_s: f64,
    pub outputs: Vec<String>,
}

pub fn config_hash(config: &PhysicalConfig) -> String {
    let json = serde_json::to_string(config).expect("config serializes");
    Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Output files held in memory until the whole run has succeeded.
pub struct Artifacts {
    prefix: PathBuf,
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Artifacts {
    pub fn new(prefix: &Path) -> Self {
        Self { prefix: prefix.to_path_buf(), files: Vec::new() }
    }

    pub fn add(&mut self, suffix: &str, bytes: Vec<u8>) {
        let mut name = self.prefix.clone().into_os_string();
        name.push(suffix);
        self.files.push((PathBuf::from(name), bytes));
    }

    /// Writes every file and then the manifest, each through a temporary
    /// sibling that is renamed into place.
    pub fn commit<P: Serialize>(
        mut self,
        command: &str,
        params: &P,
        config: &PhysicalConfig,
        started: Instant,
    ) -> Result<Vec<PathBuf>, CliError> {
        let manifest = RunManifest {
            command,
            params,
            config: *config,
            config_sha256: config_hash(config),
            version: env!("CARGO_PKG_VERSION"),
            duration_s: started.elapsed().as_secs_f64(),
            outputs: self.files.iter().map(|(p, _)| p.display().to_string()).collect(),
        };
        let body = serde_json::to_vec_pretty(&manifest).map_err(|e| CliError::Engine(e.to_string()))?;
        self.add(".manifest.json", body);
        if let Some(dir) = self.prefix.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        let mut written = Vec::new();
        for (path, bytes) in &self.files {
            let mut tmp = path.clone().into_os_string();
            tmp.push(".partial");
            let tmp = PathBuf::from(tmp);
            fs::write(&tmp, bytes)?;
            fs::rename(&tmp, path)?;
            written.push(path.clone());
        }
        Ok(written)
    }
}
