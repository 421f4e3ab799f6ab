//! Output plumbing shared by every subcommand.
//!
//! A command produces one primary result, already rendered. It goes to
//! stdout unless `--output FILE` was given, in which case the file gains
//! a `FILE.manifest.json` sidecar recording the command, its full
//! parameter set, seeds, input digests, tool version, and wall-clock
//! runtime. Two runs whose manifests agree on everything but the runtime
//! write byte-identical primary files.

use std::error::Error;
use std::fmt::Display;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;
use sha2::{Digest, Sha256};

pub type BoxError = Box<dyn Error>;

/// A rendered command result plus everything the manifest needs.
pub struct Run {
    pub command: &'static str,
    pub params: serde_json::Value,
    pub seeds: Vec<u64>,
    /// Files whose content determined the result, digested into the manifest.
    pub inputs: Vec<PathBuf>,
    pub primary: Vec<u8>,
    pub output: Option<PathBuf>,
    /// Secondary report printed to stdout even when the primary goes to a file.
    pub stdout_extra: Option<String>,
}

#[derive(Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    command: &'a str,
    version: &'a str,
    params: &'a serde_json::Value,
    seeds: &'a [u64],
    inputs: Vec<InputDigest>,
    runtime_seconds: f64,
}

pub fn deliver(run: Run, elapsed: Duration) -> Result<(), BoxError> {
    match &run.output {
        Some(path) => {
            fs::write(path, &run.primary).map_err(|e| format!("{}: {e}", path.display()))?;
            let manifest = RunManifest {
                command: run.command,
                version: env!("CARGO_PKG_VERSION"),
                params: &run.params,
                seeds: &run.seeds,
                inputs: digest_all(&run.inputs)?,
                runtime_seconds: elapsed.as_secs_f64(),
            };
            let manifest_path = format!("{}.manifest.json", path.display());
            fs::write(&manifest_path, json_pretty(&manifest)?)
                .map_err(|e| format!("{manifest_path}: {e}"))?;
        }
        None => io::stdout().write_all(&run.primary)?,
    }
    if let Some(extra) = &run.stdout_extra {
        io::stdout().write_all(extra.as_bytes())?;
    }
    Ok(())
}

fn digest_all(paths: &[PathBuf]) -> Result<Vec<InputDigest>, BoxError> {
    paths
        .iter()
        .map(|p| {
            Ok(InputDigest {
                path: p.display().to_string(),
                sha256: sha256_file(p).map_err(|e| format!("{}: {e}", p.display()))?,
            })
        })
        .collect()
}

fn sha256_file(path: &Path) -> io::Result<String> {
    let mut file = fs::File::open(path)?;
    let mut hasher = Sha256::new();
    io::copy(&mut file, &mut hasher)?;
    let mut hex = String::with_capacity(64);
    for byte in hasher.finalize() {
        use std::fmt::Write as _;
        let _ = write!(hex, "{byte:02x}");
    }
    Ok(hex)
}

pub fn json_pretty<T: Serialize>(value: &T) -> Result<Vec<u8>, BoxError> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn json_string<T: Serialize>(value: &T) -> Result<String, BoxError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

/// Serialize rows through the csv crate; the header comes from the
/// struct's field names.
pub fn csv_rows<T: Serialize>(rows: &[T]) -> Result<Vec<u8>, BoxError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    Ok(writer.into_inner().map_err(|e| e.to_string())?)
}

/// One header line plus one row of already-formatted cells. Callers only
/// pass numeric or enum-token cells, so no quoting is needed.
pub fn csv_single(header: &str, cells: &[String]) -> Vec<u8> {
    format!("{header}\n{}\n", cells.join(",")).into_bytes()
}

pub fn cell<T: Display>(value: &Option<T>) -> String {
    value.as_ref().map(T::to_string).unwrap_or_default()
}
