//! Atomic output writing.
//!
//! Results land on disk through a temporary file renamed over the final
//! name, so a crash or error mid-write never leaves a truncated file where
//! a reader expects a complete one. All failures here are
//! [`CliError::Runtime`] — the inputs were fine, the run was not.

use std::fs;
use std::path::Path;
use std::process;

use serde::Serialize;

use crate::error::CliError;

fn runtime(path: &Path, why: impl std::fmt::Display) -> CliError {
    CliError::Runtime(format!("{}: {why}", path.display()))
}

/// Creates `dir` and any missing parents.
pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| runtime(dir, e))
}

/// Writes `bytes` to `path` via a temporary sibling plus rename. The rename
/// happens within one directory, which makes it atomic on POSIX systems.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let file_name = path
        .file_name()
        .ok_or_else(|| runtime(path, "path has no file name"))?;
    let tmp = path.with_file_name(format!(
        "{}.tmp{}",
        file_name.to_string_lossy(),
        process::id()
    ));
    fs::write(&tmp, bytes).map_err(|e| runtime(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        runtime(path, e)
    })
}

/// Serializes `value` as pretty-printed JSON (trailing newline included) and
/// writes it atomically.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| runtime(path, e))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_existing_content_and_leaves_no_droppings() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_atomic(&path, b"first").unwrap();
        write_atomic(&path, b"second").unwrap();
        assert_eq!(fs::read(&path).unwrap(), b"second");
        let entries: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
        assert_eq!(entries.len(), 1, "temporary files must not survive");
    }

    #[test]
    fn write_failures_are_runtime_errors() {
        let err = write_atomic(Path::new("/nonexistent/dir/out.csv"), b"x").unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
