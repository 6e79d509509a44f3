//! Artifact writers. JSON goes through `serde_json` with struct field order
//! (maps are `BTreeMap`-backed), CSV through `csv`, and every float is
//! printed in its shortest round-trip form, so identical inputs give
//! byte-identical files.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
pub struct Envelope<'a, C: Serialize, R: Serialize> {
    pub schema_version: u32,
    pub command: &'a str,
    pub config: &'a C,
    pub result: &'a R,
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(CliError::io(dir))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value).map_err(|e| CliError::Encode(e.to_string()))
}

/// Writes `<dir>/<name>` and returns the document.
pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<String, CliError> {
    ensure_dir(dir)?;
    let doc = to_json(value)?;
    let path = dir.join(name);
    fs::write(&path, format!("{doc}\n")).map_err(CliError::io(&path))?;
    Ok(doc)
}

pub fn write_envelope<C: Serialize, R: Serialize>(
    dir: &Path,
    command: &str,
    config: &C,
    result: &R,
) -> Result<String, CliError> {
    let env = Envelope { schema_version: SCHEMA_VERSION, command, config, result };
    write_json(dir, &format!("{command}.json"), &env)
}

pub fn write_csv<I>(dir: &Path, name: &str, header: &[&str], rows: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    ensure_dir(dir)?;
    let path = dir.join(name);
    let csv_err = |e: csv::Error| CliError::Encode(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(CliError::io(&path))
}

pub fn num(v: f64) -> String {
    format!("{v}")
}
