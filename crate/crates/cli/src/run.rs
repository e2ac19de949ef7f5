use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use icdc_core::formats::{read_intrinsics, read_pfm_file};
use icdc_core::mapping::{read_map, MultiTrajectoryMap};
use icdc_core::{DepthMap, FrameId};

use crate::config::{Paths, RunConfig};
use crate::error::{CliError, CliResult};

/// Resolved settings shared by every command.
pub struct Run {
    pub cfg: RunConfig,
    pub seed: u64,
    pub command: String,
    hash: String,
}

impl Run {
    /// Validates the effective config and fixes the seed and hash.
    pub fn new(mut cfg: RunConfig, seed_flag: Option<u64>, command: &str) -> CliResult<Self> {
        let seed = cfg.resolve_seed(seed_flag)?;
        cfg.validate()?;
        let hash = cfg.hash();
        Ok(Self { cfg, seed, command: command.to_string(), hash })
    }

    /// Metadata lines written at the top of every text output.
    pub fn header(&self) -> Vec<String> {
        vec![
            format!("version={}", env!("CARGO_PKG_VERSION")),
            format!("config_hash={}", self.hash),
            format!("seed={}", self.seed),
            format!("command={}", self.command),
        ]
    }

    /// The output location from the flag or the config.
    pub fn output(&self) -> CliResult<PathBuf> {
        self.cfg.output.clone().ok_or_else(|| CliError::config("no output given (--out or `output` in the config)"))
    }
}

/// Writes a file through a buffered writer, creating parent directories.
pub fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).map_err(|e| CliError::io(path, e))
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

fn locate(explicit: &Option<PathBuf>, dataset: &Option<PathBuf>, name: &str) -> CliResult<PathBuf> {
    match (explicit, dataset) {
        (Some(p), _) => Ok(p.clone()),
        (None, Some(d)) => Ok(d.join(name)),
        (None, None) => Err(CliError::config(format!("no path for {name}: set --dataset or the matching [paths] entry"))),
    }
}

/// A synthesized dataset: the map with cameras attached and the depth
/// directory.
pub struct Dataset {
    pub map: MultiTrajectoryMap,
    pub depth_dir: Option<PathBuf>,
}

impl Dataset {
    pub fn load(paths: &Paths) -> CliResult<Self> {
        let map_path = locate(&paths.map, &paths.dataset, "map.txt")?;
        let intr_path = locate(&paths.intrinsics, &paths.dataset, "intrinsics.txt")?;
        let mut map = read_map(&read_text(&map_path)?).map_err(|e| CliError::data(format!("{}: {e}", map_path.display())))?;
        map.cameras = read_intrinsics(&read_text(&intr_path)?)
            .map_err(|e| CliError::data(format!("{}: {e}", intr_path.display())))?;
        map.validate().map_err(|e| CliError::data(format!("{}: {e}", map_path.display())))?;
        Ok(Self {
            map,
            depth_dir: locate(&paths.depth, &paths.dataset, "depth").ok(),
        })
    }

    pub fn depth(&self, id: FrameId) -> CliResult<DepthMap> {
        let dir = self.depth_dir.as_ref().ok_or_else(|| CliError::config("no depth directory: set --dataset or paths.depth"))?;
        let path = dir.join(format!("{id}.pfm"));
        read_pfm_file(&path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
    }
}
