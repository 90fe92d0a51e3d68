//! File export helpers. Every written file starts with a comment line naming
//! the tool version and the config fingerprint.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{PapError, Result};

pub const TOOL_NAME: &str = "pap";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Header comment body (without the leading `#`).
pub fn header_line(fingerprint: &str) -> String {
    format!("{TOOL_NAME} {TOOL_VERSION} fingerprint={fingerprint}")
}

/// Creates `path` (and its parent directories) and hands a buffered writer
/// to `body`. I/O failures carry the path.
pub fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| PapError::io(parent, e))?;
    }
    let file = File::create(path).map_err(|e| PapError::io(path, e))?;
    let mut out = BufWriter::new(file);
    body(&mut out).map_err(|e| PapError::io(path, e))?;
    out.flush().map_err(|e| PapError::io(path, e))
}

/// Writes `{"tool", "fingerprint", "result"}` as pretty JSON; JSON has no
/// comments, so the header travels as fields.
pub fn write_json(path: &Path, fingerprint: &str, value: &serde_json::Value) -> Result<()> {
    let mut doc = serde_json::Map::new();
    doc.insert("tool".into(), format!("{TOOL_NAME} {TOOL_VERSION}").into());
    doc.insert("fingerprint".into(), fingerprint.into());
    doc.insert("result".into(), value.clone());
    write_file(path, |out| {
        serde_json::to_writer_pretty(&mut *out, &serde_json::Value::Object(doc))?;
        writeln!(out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_names_version_and_fingerprint() {
        let h = header_line("abc");
        assert!(h.starts_with("pap "));
        assert!(h.ends_with("fingerprint=abc"));
    }

    #[test]
    fn io_errors_carry_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "x").unwrap();
        let target = blocker.join("sub").join("out.csv");
        let err = write_file(&target, |_| Ok(())).unwrap_err();
        assert!(err.to_string().contains("file"), "{err}");
        assert_eq!(err.category(), crate::ErrorCategory::Io);
    }
}
