//! Text emission and the run manifest.
//!
//! Every file starts with `# mbcl <kind> format <v>` and a `#` line naming
//! the columns. The manifest is written last; its presence marks a complete
//! run.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use sha2::{Digest, Sha256};

use crate::error::Result;

pub const OUTPUT_FORMAT: u32 = 1;
pub const MANIFEST_NAME: &str = "manifest.txt";

pub fn header(kind: &str, columns: &[&str], sep: &str) -> String {
    format!("# mbcl {kind} format {OUTPUT_FORMAT}\n# {}\n", columns.join(sep))
}

pub fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InventoryEntry {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

/// Output directory that remembers what was written to it.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    inventory: Vec<InventoryEntry>,
}

impl OutputDir {
    pub fn create(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        // A stale manifest would mark a half-written run as complete.
        let stale = root.join(MANIFEST_NAME);
        if stale.exists() {
            fs::remove_file(stale)?;
        }
        Ok(OutputDir { root, inventory: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.root.join(name);
        fs::write(&path, contents)?;
        let digest = Sha256::digest(contents.as_bytes());
        self.inventory.push(InventoryEntry {
            name: name.to_string(),
            bytes: contents.len(),
            sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        });
        Ok(path)
    }

    pub fn inventory(&self) -> &[InventoryEntry] {
        &self.inventory
    }

    pub fn finish(self, manifest: &RunManifest) -> Result<PathBuf> {
        let path = self.root.join(MANIFEST_NAME);
        fs::write(&path, manifest.render(&self.inventory))?;
        Ok(path)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaskStatus {
    pub task: String,
    pub status: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunManifest {
    pub command: String,
    pub config: Vec<(String, String)>,
    pub started: u64,
    pub finished: u64,
    pub tasks: Vec<TaskStatus>,
    pub notes: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, config: Vec<(String, String)>, started: u64) -> Self {
        RunManifest { command: command.into(), config, started, finished: started, tasks: Vec::new(), notes: Vec::new() }
    }

    pub fn task(&mut self, task: impl Into<String>, status: impl Into<String>) {
        self.tasks.push(TaskStatus { task: task.into(), status: status.into() });
    }

    pub fn render(&self, inventory: &[InventoryEntry]) -> String {
        let mut s = format!("# mbcl manifest format {OUTPUT_FORMAT}\n");
        let _ = writeln!(s, "command = {}", self.command);
        let _ = writeln!(s, "version = {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(s, "started_unix = {}", self.started);
        let _ = writeln!(s, "finished_unix = {}", self.finished);
        s.push_str("\n[config]\n");
        for (k, v) in &self.config {
            let _ = writeln!(s, "{k} = {v}");
        }
        if !self.notes.is_empty() {
            s.push_str("\n[notes]\n");
            for n in &self.notes {
                let _ = writeln!(s, "{n}");
            }
        }
        let _ = writeln!(s, "\n[tasks] {}", self.tasks.len());
        for t in &self.tasks {
            let _ = writeln!(s, "{} {}", t.task, t.status);
        }
        let _ = writeln!(s, "\n[files] {}", inventory.len());
        for f in inventory {
            let _ = writeln!(s, "{} {} {}", f.name, f.bytes, f.sha256);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_lists_every_file_and_is_last() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(dir.path()).unwrap();
        let a = header("a", &["x", "y"], " ");
        out.write("a.dat", &a).unwrap();
        out.write("b.csv", "1,2\n").unwrap();
        let mut m = RunManifest::new("test", vec![("n".into(), "10".into())], 5);
        m.task("N=10 c=1", "ok");
        let path = out.finish(&m).unwrap();
        let text = fs::read_to_string(path).unwrap();
        assert!(text.contains(&format!("a.dat {} ", a.len())));
        assert!(text.contains("b.csv 4 "));
        assert!(text.contains("[files] 2"));
        assert!(text.contains("N=10 c=1 ok"));
        assert!(text.contains("n = 10"));

        // Reopening removes the old manifest until the new run completes.
        let _again = OutputDir::create(dir.path()).unwrap();
        assert!(!dir.path().join(MANIFEST_NAME).exists());
    }

    #[test]
    fn header_names_columns_and_version() {
        assert_eq!(header("levels", &["index", "energy"], " "), "# mbcl levels format 1\n# index energy\n");
    }
}
