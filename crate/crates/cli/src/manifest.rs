//! Run manifests: what was run, with which config and seed, which files
//! came out (with digests), and how each check fared. A manifest plus its
//! listed files is the complete, re-verifiable record of an experiment.

use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

pub fn check(name: &str, pass: bool, detail: String) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        pass,
        detail,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputFile {
    pub name: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub experiment: String,
    pub seed: u64,
    pub config: BTreeMap<String, String>,
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
    pub outputs: Vec<OutputFile>,
    pub checks: Vec<CheckResult>,
}

impl ExperimentManifest {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn file_name(experiment: &str) -> String {
        format!("{experiment}.manifest.json")
    }

    pub fn write(&self, dir: &Path) -> io::Result<PathBuf> {
        let path = dir.join(Self::file_name(&self.experiment));
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        std::fs::write(&path, text)?;
        Ok(path)
    }
}

pub fn now_unix_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let out = h.finalize();
    let mut s = String::with_capacity(64);
    for b in out {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// Collects experiment outputs: writes each file under the out directory
/// and records its digest for the manifest.
pub struct Outputs {
    dir: PathBuf,
    pub files: Vec<OutputFile>,
}

impl Outputs {
    pub fn new(dir: &Path) -> io::Result<Outputs> {
        std::fs::create_dir_all(dir)?;
        Ok(Outputs {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> io::Result<()> {
        std::fs::write(self.dir.join(name), text)?;
        self.files.push(OutputFile {
            name: name.to_string(),
            sha256: sha256_hex(text.as_bytes()),
            bytes: text.len() as u64,
        });
        Ok(())
    }
}

/// Re-verify every manifest in a directory: all listed outputs must exist
/// with matching digests, and the recorded checks must have passed. Returns
/// one report line per verified item and whether everything held.
pub fn verify_dir(dir: &Path) -> io::Result<(bool, Vec<String>)> {
    let mut names: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.ends_with(".manifest.json"))
        })
        .collect();
    names.sort();
    let mut ok = true;
    let mut lines = Vec::new();
    if names.is_empty() {
        ok = false;
        lines.push(format!("no manifests found in {}", dir.display()));
    }
    for path in names {
        let text = std::fs::read_to_string(&path)?;
        let manifest: ExperimentManifest = match serde_json::from_str(&text) {
            Ok(m) => m,
            Err(e) => {
                ok = false;
                lines.push(format!("{}: unreadable manifest: {e}", path.display()));
                continue;
            }
        };
        for file in &manifest.outputs {
            let fpath = dir.join(&file.name);
            match std::fs::read(&fpath) {
                Ok(bytes) => {
                    let digest = sha256_hex(&bytes);
                    if digest == file.sha256 {
                        lines.push(format!("{}: {} verified", manifest.experiment, file.name));
                    } else {
                        ok = false;
                        lines.push(format!(
                            "{}: {} DIGEST MISMATCH (recorded {}, found {digest})",
                            manifest.experiment, file.name, file.sha256
                        ));
                    }
                }
                Err(e) => {
                    ok = false;
                    lines.push(format!("{}: {} MISSING ({e})", manifest.experiment, file.name));
                }
            }
        }
        for c in &manifest.checks {
            if c.pass {
                lines.push(format!("{}: check {} pass", manifest.experiment, c.name));
            } else {
                ok = false;
                lines.push(format!(
                    "{}: check {} FAIL ({})",
                    manifest.experiment, c.name, c.detail
                ));
            }
        }
    }
    Ok((ok, lines))
}
