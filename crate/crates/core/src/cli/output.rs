use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

/// Echo of a command's full configuration, embedded in every artifact.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'static str,
    pub params: serde_json::Value,
}

impl RunConfig {
    pub fn new<A: Serialize>(subcommand: &'static str, args: &A) -> Result<Self> {
        Ok(Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            subcommand,
            params: serde_json::to_value(args)?,
        })
    }

    /// Single-line JSON, for CSV comment headers.
    pub fn compact(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

/// Writes through a temporary file in the target directory, then renames;
/// `None` or `-` writes to stdout.
pub fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        None => write_stdout(bytes),
        Some(p) if p == Path::new("-") => write_stdout(bytes),
        Some(p) => {
            let dir = match p.parent() {
                Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
                _ => PathBuf::from("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
            tmp.write_all(bytes)?;
            tmp.flush()?;
            tmp.persist(p).map_err(|e| Error::Io(e.error))?;
            Ok(())
        }
    }
}

fn write_stdout(bytes: &[u8]) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(bytes)?;
    out.flush()?;
    Ok(())
}

pub fn json_document<P: Serialize>(config: &RunConfig, key: &str, payload: &P) -> Result<Vec<u8>> {
    let mut map = serde_json::Map::new();
    map.insert("config".into(), serde_json::to_value(config)?);
    map.insert(key.into(), serde_json::to_value(payload)?);
    let mut s = serde_json::to_string_pretty(&serde_json::Value::Object(map))?;
    s.push('\n');
    Ok(s.into_bytes())
}

/// CSV with the configuration on a leading `#` comment line.
pub struct CsvDocument {
    text: String,
}

impl CsvDocument {
    pub fn new(config: &RunConfig, header: &[String]) -> Self {
        let mut text = format!("# {}\n", config.compact());
        text.push_str(&header.join(","));
        text.push('\n');
        Self { text }
    }

    pub fn row<I: IntoIterator<Item = String>>(&mut self, fields: I) {
        let fields: Vec<String> = fields.into_iter().collect();
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.text.into_bytes()
    }
}

pub fn warn(msg: impl std::fmt::Display) {
    eprintln!("clrq:warning: {msg}");
}
