//! Output files. Every JSON file is an envelope carrying the artifact
//! version and the full run configuration; every CSV file starts with one
//! `# {json}` comment line holding the same provenance.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::shooting::SolutionRecord;
use crate::VERSION;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    pub command: String,
    pub config: RunConfig,
    /// Solution the file was derived from, when there is one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record: Option<SolutionRecord>,
}

impl Provenance {
    pub fn new(command: impl Into<String>, config: &RunConfig) -> Self {
        Provenance { version: VERSION.to_string(), command: command.into(), config: config.clone(), record: None }
    }

    pub fn with_record(mut self, record: &SolutionRecord) -> Self {
        self.record = Some(record.clone());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub provenance: Provenance,
    pub data: T,
}

pub fn write_json<T: Serialize>(path: &Path, provenance: &Provenance, data: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, &Envelope { provenance: provenance.clone(), data })?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<Envelope<T>> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Writes the provenance line and lets `body` write the CSV rows.
pub fn write_csv<F>(path: &Path, provenance: &Provenance, body: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# {}", serde_json::to_string(provenance)?)?;
    body(&mut w)?;
    w.flush()?;
    Ok(())
}

/// Provenance from the first line of a CSV written by [`write_csv`].
pub fn read_csv_provenance(path: &Path) -> Result<Provenance> {
    let mut first = String::new();
    BufReader::new(File::open(path)?).read_line(&mut first)?;
    let json = first
        .strip_prefix("# ")
        .ok_or_else(|| Error::Config(format!("{}: missing provenance line", path.display())))?;
    serde_json::from_str(json.trim_end()).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// A solution record from a record envelope, a bare record, or the
/// provenance of an orbit CSV. Also returns the configuration found
/// alongside it.
pub fn read_record(path: &Path) -> Result<(SolutionRecord, Option<RunConfig>)> {
    let text = std::fs::read_to_string(path)?;
    if text.trim().is_empty() {
        return Err(Error::Config(format!("{}: empty file", path.display())));
    }
    if text.starts_with('#') {
        let prov = read_csv_provenance(path)?;
        let record = prov
            .record
            .ok_or_else(|| Error::Config(format!("{}: CSV provenance carries no solution record", path.display())))?;
        return Ok((record, Some(prov.config)));
    }
    if let Ok(env) = serde_json::from_str::<Envelope<SolutionRecord>>(&text) {
        return Ok((env.data, Some(env.provenance.config)));
    }
    let record: SolutionRecord =
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: not a solution record: {e}", path.display())))?;
    Ok((record, None))
}

/// A run configuration from a config file, or the configuration embedded
/// in any JSON or CSV output file.
pub fn read_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    let config = if text.starts_with('#') {
        read_csv_provenance(path)?.config
    } else {
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        match value.get("provenance") {
            Some(prov) => serde_json::from_value::<Provenance>(prov.clone())
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
                .config,
            None => return RunConfig::from_json(&text),
        }
    };
    config.validate()?;
    Ok(config)
}
