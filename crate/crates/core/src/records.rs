//! Newline-delimited JSON files for instances and transcripts.
//!
//! The first line of every file is a header naming the record kind and the
//! format version. Each later line is one record.

use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::GameTranscript;
use crate::model::Instance;

pub const FORMAT_VERSION: u32 = 1;
pub const INSTANCES: &str = "mindgames.instances";
pub const TRANSCRIPTS: &str = "mindgames.transcripts";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub schema: String,
    pub version: u32,
}

impl Header {
    pub fn new(schema: &str) -> Self {
        Header { schema: schema.to_string(), version: FORMAT_VERSION }
    }
}

#[derive(Debug, Error)]
pub enum RecordError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("missing header line")]
    MissingHeader,
    #[error("expected `{expected}` records, found `{found}`")]
    SchemaMismatch { expected: String, found: String },
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u32),
}

fn json_line<T: Serialize>(item: &T) -> io::Result<String> {
    serde_json::to_string(item).map_err(io::Error::other)
}

pub fn write_ndjson<T: Serialize, W: Write>(mut w: W, schema: &str, items: &[T]) -> Result<(), RecordError> {
    writeln!(w, "{}", json_line(&Header::new(schema))?)?;
    for item in items {
        writeln!(w, "{}", json_line(item)?)?;
    }
    w.flush()?;
    Ok(())
}

fn check_header(line: &str, schema: &str) -> Result<(), RecordError> {
    let header: Header = serde_json::from_str(line).map_err(|source| RecordError::Json { line: 1, source })?;
    if header.schema != schema {
        return Err(RecordError::SchemaMismatch { expected: schema.to_string(), found: header.schema });
    }
    if header.version != FORMAT_VERSION {
        return Err(RecordError::UnsupportedVersion(header.version));
    }
    Ok(())
}

/// Read every record. Blank lines are skipped.
pub fn read_ndjson<T: DeserializeOwned, R: BufRead>(r: R, schema: &str) -> Result<Vec<T>, RecordError> {
    let mut lines = r.lines().enumerate();
    let first = loop {
        match lines.next() {
            Some((_, line)) => {
                let line = line?;
                if !line.trim().is_empty() {
                    break line;
                }
            }
            None => return Err(RecordError::MissingHeader),
        }
    };
    check_header(&first, schema)?;
    let mut out = Vec::new();
    for (i, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|source| RecordError::Json { line: i + 1, source })?);
    }
    Ok(out)
}

pub fn save<T: Serialize>(path: &Path, schema: &str, items: &[T]) -> Result<(), RecordError> {
    write_ndjson(BufWriter::new(File::create(path)?), schema, items)
}

pub fn load<T: DeserializeOwned>(path: &Path, schema: &str) -> Result<Vec<T>, RecordError> {
    read_ndjson(BufReader::new(File::open(path)?), schema)
}

pub fn save_instances(path: &Path, instances: &[Instance]) -> Result<(), RecordError> {
    save(path, INSTANCES, instances)
}

pub fn load_instances(path: &Path) -> Result<Vec<Instance>, RecordError> {
    load(path, INSTANCES)
}

pub fn save_transcripts(path: &Path, transcripts: &[GameTranscript]) -> Result<(), RecordError> {
    save(path, TRANSCRIPTS, transcripts)
}

pub fn load_transcripts(path: &Path) -> Result<Vec<GameTranscript>, RecordError> {
    load(path, TRANSCRIPTS)
}

/// Appends one record per line, flushing after each so a crash loses at
/// most the record being written.
pub struct Appender {
    file: File,
}

impl Appender {
    /// Open for appending, writing the header if the file is new or empty.
    pub fn open(path: &Path, schema: &str) -> Result<Self, RecordError> {
        let mut file = OpenOptions::new().create(true).append(true).read(true).open(path)?;
        if file.metadata()?.len() == 0 {
            writeln!(file, "{}", json_line(&Header::new(schema))?)?;
        } else {
            let mut first = String::new();
            BufReader::new(File::open(path)?).read_line(&mut first)?;
            check_header(first.trim_end(), schema)?;
        }
        Ok(Appender { file })
    }

    pub fn append<T: Serialize>(&mut self, item: &T) -> Result<(), RecordError> {
        let mut line = json_line(item)?;
        line.push('\n');
        self.file.write_all(line.as_bytes())?;
        self.file.flush()?;
        Ok(())
    }
}
