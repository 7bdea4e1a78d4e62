//! Versioned JSON and CSV persistence.
//!
//! JSON artifacts are wrapped in `{"kind", "schema_version", "data"}` and
//! checked on load. CSV files start with a `# <kind> v<version>` comment
//! line followed by a header row.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct EnvelopeRef<'a, T> {
    kind: &'a str,
    schema_version: u32,
    data: &'a T,
}

#[derive(Deserialize)]
struct Envelope<T> {
    kind: String,
    schema_version: u32,
    data: T,
}

pub fn to_json_string<T: Serialize>(kind: &str, data: &T) -> Result<String> {
    let env = EnvelopeRef {
        kind,
        schema_version: SCHEMA_VERSION,
        data,
    };
    serde_json::to_string_pretty(&env).map_err(|e| HarnessError::Json {
        path: "<memory>".into(),
        source: e,
    })
}

pub fn from_json_str<T: DeserializeOwned>(text: &str, kind: &str, origin: &Path) -> Result<T> {
    let env: Envelope<T> = serde_json::from_str(text).map_err(|e| HarnessError::Json {
        path: origin.to_path_buf(),
        source: e,
    })?;
    if env.kind != kind {
        return Err(HarnessError::Invalid(format!(
            "{}: expected a `{kind}` file, found `{}`",
            origin.display(),
            env.kind
        )));
    }
    if env.schema_version != SCHEMA_VERSION {
        return Err(HarnessError::Invalid(format!(
            "{}: schema version {} (this build reads {SCHEMA_VERSION})",
            origin.display(),
            env.schema_version
        )));
    }
    Ok(env.data)
}

pub fn write_json<T: Serialize>(path: &Path, kind: &str, data: &T) -> Result<()> {
    let file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let env = EnvelopeRef {
        kind,
        schema_version: SCHEMA_VERSION,
        data,
    };
    serde_json::to_writer(&mut w, &env).map_err(|e| HarnessError::Json {
        path: path.to_path_buf(),
        source: e,
    })?;
    w.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path, kind: &str) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    from_json_str(&text, kind, path)
}

/// JSON to `out`, or pretty-printed to stdout when `out` is `None`.
pub fn emit_json<T: Serialize>(out: Option<&Path>, kind: &str, data: &T) -> Result<()> {
    match out {
        Some(path) => write_json(path, kind, data),
        None => {
            println!("{}", to_json_string(kind, data)?);
            Ok(())
        }
    }
}

pub fn write_csv<R: Serialize>(writer: impl Write, kind: &str, rows: &[R]) -> Result<()> {
    let mut writer = writer;
    writeln!(writer, "# {kind} v{SCHEMA_VERSION}").map_err(|e| HarnessError::io("<csv>", e))?;
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| HarnessError::io("<csv>", e))
}

pub fn write_csv_file<R: Serialize>(path: &Path, kind: &str, rows: &[R]) -> Result<()> {
    let file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    write_csv(BufWriter::new(file), kind, rows)
}

/// Rows of a CSV written by [`write_csv`]; the version comment is checked.
pub fn read_csv_file<R: DeserializeOwned>(path: &Path, kind: &str) -> Result<Vec<R>> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let expected = format!("# {kind} v{SCHEMA_VERSION}");
    if text.lines().next() != Some(expected.as_str()) {
        return Err(HarnessError::Invalid(format!("{}: missing `{expected}` line", path.display())));
    }
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    r.deserialize().map(|row| row.map_err(HarnessError::from)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossRow {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
}

pub fn loss_rows(report: &ris_mec_core::surrogate::FitReport) -> Vec<LossRow> {
    report
        .train_loss
        .iter()
        .zip(&report.val_loss)
        .enumerate()
        .map(|(epoch, (&train_loss, &val_loss))| LossRow {
            epoch,
            train_loss,
            val_loss,
        })
        .collect()
}
