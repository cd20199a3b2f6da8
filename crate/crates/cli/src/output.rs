//! Deterministic output files: CSV with `#` metadata comments, or JSON with
//! an embedded manifest block. Reruns with identical manifests must produce
//! byte-identical files, so nothing time- or locale-dependent goes in.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

/// Canonical manifest hash: sha256 over the JSON rendering. `serde_json`
/// maps are sorted, so the rendering is stable.
pub fn manifest_hash(manifest: &serde_json::Value) -> String {
    let mut hasher = Sha256::new();
    hasher.update(manifest.to_string().as_bytes());
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub struct CsvSink {
    buffer: String,
}

impl CsvSink {
    pub fn new(manifest: &serde_json::Value, header: &[&str]) -> Self {
        let mut buffer = String::new();
        buffer.push_str(&format!("# tool: cfp {}\n", env!("CARGO_PKG_VERSION")));
        buffer.push_str(&format!("# manifest_sha256: {}\n", manifest_hash(manifest)));
        if let Some(map) = manifest.as_object() {
            for (k, v) in map {
                buffer.push_str(&format!("# {k}: {v}\n"));
            }
        }
        buffer.push_str(&header.join(","));
        buffer.push('\n');
        CsvSink { buffer }
    }

    pub fn row<S: AsRef<str>>(&mut self, cells: &[S]) {
        let mut first = true;
        for cell in cells {
            if !first {
                self.buffer.push(',');
            }
            self.buffer.push_str(cell.as_ref());
            first = false;
        }
        self.buffer.push('\n');
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.buffer.as_bytes())
    }
}

/// JSON output with the manifest and its hash embedded.
pub fn write_json(path: &Path, manifest: &serde_json::Value, body: serde_json::Value) -> Result<()> {
    let document = serde_json::json!({
        "manifest": manifest,
        "manifest_sha256": manifest_hash(manifest),
        "result": body,
    });
    let mut text = serde_json::to_string_pretty(&document).context("serializing output")?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)
                .with_context(|| format!("creating output directory {}", dir.display()))?;
        }
    }
    let mut file = std::fs::File::create(path)
        .with_context(|| format!("cannot write output file {}", path.display()))?;
    file.write_all(bytes)?;
    Ok(())
}

/// Stable float rendering (shortest round-trip).
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}
