//! Output directory handling: snapshot files, event log and the run
//! manifest.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use mkperc_core::netcap::{
    export_pajek, export_snapshot_csv, write_metrics_csv, Snapshot, SnapshotSink,
};
use mkperc_core::percolation::MetricsRow;
use mkperc_core::sim::Event;
use mkperc_core::{Error, Result};

use crate::Failure;

pub fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    }
}

pub struct OutputDir {
    root: PathBuf,
}

#[derive(Serialize)]
struct FileEntry {
    path: String,
    bytes: u64,
    sha256: String,
}

#[derive(Serialize)]
struct RunManifest<'a, C: Serialize> {
    tool: &'static str,
    version: &'static str,
    seed: u64,
    config: &'a C,
    started_unix: u64,
    finished_unix: u64,
    files: Vec<FileEntry>,
}

const MANIFEST: &str = "manifest.json";

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, Failure> {
        std::fs::create_dir_all(root).map_err(|e| io_failure(root, e))?;
        Ok(Self {
            root: root.to_path_buf(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_json<T: Serialize + ?Sized>(&self, name: &str, value: &T) -> Result<(), Failure> {
        let path = self.path(name);
        let text = serde_json::to_string_pretty(value).map_err(Error::from)?;
        std::fs::write(&path, text + "\n").map_err(|e| io_failure(&path, e))
    }

    pub fn write_metrics(&self, rows: &[MetricsRow]) -> Result<(), Failure> {
        Ok(write_metrics_csv(rows, &self.path("metrics.csv"))?)
    }

    /// Meeting events only, one `tick,a,b` line each.
    pub fn write_events(&self, events: &[Event]) -> Result<(), Failure> {
        let path = self.path("events.csv");
        let file = std::fs::File::create(&path).map_err(|e| io_failure(&path, e))?;
        let mut w = std::io::BufWriter::new(file);
        for e in events {
            if let Event::Meeting { tick, a, b } = e {
                writeln!(w, "{tick},{a},{b}").map_err(|e| io_failure(&path, e))?;
            }
        }
        w.flush().map_err(|e| io_failure(&path, e))
    }

    fn inventory(&self) -> Result<Vec<FileEntry>, Failure> {
        let mut files = Vec::new();
        let mut stack = vec![self.root.clone()];
        while let Some(dir) = stack.pop() {
            for entry in std::fs::read_dir(&dir).map_err(|e| io_failure(&dir, e))? {
                let path = entry.map_err(|e| io_failure(&dir, e))?.path();
                if path.is_dir() {
                    stack.push(path);
                    continue;
                }
                let rel = path.strip_prefix(&self.root).unwrap_or(&path);
                if rel == Path::new(MANIFEST) {
                    continue;
                }
                let bytes = std::fs::read(&path).map_err(|e| io_failure(&path, e))?;
                files.push(FileEntry {
                    path: rel.to_string_lossy().replace('\\', "/"),
                    bytes: bytes.len() as u64,
                    sha256: hex(&Sha256::digest(&bytes)),
                });
            }
        }
        files.sort_by(|a, b| a.path.cmp(&b.path));
        Ok(files)
    }

    /// Hashes every file under the directory and writes `manifest.json`
    /// through a temporary file and a rename.
    pub fn write_manifest<C: Serialize>(&self, config: &C, seed: u64, started: u64) -> Result<(), Failure> {
        let manifest = RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            seed,
            config,
            started_unix: started,
            finished_unix: unix_now(),
            files: self.inventory()?,
        };
        let tmp = self.path(".manifest.json.tmp");
        let text = serde_json::to_string_pretty(&manifest).map_err(Error::from)?;
        std::fs::write(&tmp, text + "\n").map_err(|e| io_failure(&tmp, e))?;
        let dest = self.path(MANIFEST);
        std::fs::rename(&tmp, &dest).map_err(|e| io_failure(&dest, e))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Streams each snapshot to `snapshots/` as CSV edge lists and Pajek files.
pub struct SnapshotWriter {
    dir: PathBuf,
    count: usize,
}

impl SnapshotWriter {
    pub fn new(out: &OutputDir) -> Result<Self, Failure> {
        let dir = out.path("snapshots");
        std::fs::create_dir_all(&dir).map_err(|e| io_failure(&dir, e))?;
        Ok(Self { dir, count: 0 })
    }

    pub fn finish(self) -> Result<(), Failure> {
        log::info!("wrote {} snapshots to {}", self.count, self.dir.display());
        Ok(())
    }
}

impl SnapshotSink for SnapshotWriter {
    fn accept(&mut self, snapshot: Snapshot) -> Result<()> {
        export_snapshot_csv(&snapshot, &self.dir)?;
        export_pajek(
            &snapshot.meeting,
            &self.dir.join(format!("meeting_t{:08}.net", snapshot.tick)),
        )?;
        export_pajek(
            &snapshot.knowledge,
            &self.dir.join(format!("knowledge_t{:08}.net", snapshot.tick)),
        )?;
        self.count += 1;
        Ok(())
    }
}
