//! Output directory bookkeeping and the run manifest.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

pub struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
}

impl Outputs {
    pub fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Writes `name` through `f` and records it for the manifest.
    pub fn write(&mut self, name: &str, f: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
        let path = self.dir.join(name);
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(file);
        f(&mut w).and_then(|()| w.flush()).with_context(|| format!("writing {}", path.display()))?;
        if !self.files.iter().any(|n| n == name) {
            self.files.push(name.to_string());
        }
        Ok(())
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }
}

pub fn sha256_hex(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

pub struct Manifest {
    pub command: String,
    pub seed: u64,
    pub threads: usize,
    pub paper_scale: bool,
    pub config: Vec<(String, String)>,
    pub wall_clock: Duration,
}

impl Manifest {
    /// Writes `manifest.txt` listing every output with its checksum.
    pub fn write(&self, outputs: &Outputs) -> Result<PathBuf> {
        let mut lines = vec![
            format!("version = {}", env!("CARGO_PKG_VERSION")),
            format!("command = {}", self.command),
            format!("seed = {}", self.seed),
            format!("threads = {}", self.threads),
            format!("paper_scale = {}", self.paper_scale),
            format!("wall_clock_seconds = {:.3}", self.wall_clock.as_secs_f64()),
        ];
        for (k, v) in &self.config {
            lines.push(format!("config.{k} = {v}"));
        }
        for name in outputs.files() {
            lines.push(format!("sha256.{name} = {}", sha256_hex(&outputs.dir().join(name))?));
        }
        let path = outputs.dir().join("manifest.txt");
        std::fs::write(&path, lines.join("\n") + "\n").with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}
