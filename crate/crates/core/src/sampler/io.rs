//! JSON Lines encoding of chain histories: one metadata line, then one line
//! per record. Floats are written with 17 significant digits.

use std::fs;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use super::history::{ChainHistory, ChainRecord, HistoryMeta, HISTORY_VERSION};
use crate::error::{Error, Result};
use crate::geometry::Grasp;

/// serde_json formatter writing every float as `d.dddddddddddddddde±x`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SigDigits17;

impl Formatter for SigDigits17 {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn to_json_line<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits17);
    value.serialize(&mut ser).expect("in-memory serialization");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

#[derive(Serialize, Deserialize)]
struct RecordLine {
    iter: usize,
    g: [f64; 7],
    measure: f64,
    feasible: bool,
    accepted: bool,
    temperature: f64,
}

impl From<&ChainRecord> for RecordLine {
    fn from(r: &ChainRecord) -> Self {
        Self {
            iter: r.iter,
            g: r.proposal.to_array(),
            measure: r.measure,
            feasible: r.feasible,
            accepted: r.accepted,
            temperature: r.temperature,
        }
    }
}

pub fn write_history<W: Write>(history: &ChainHistory, mut out: W) -> io::Result<()> {
    writeln!(out, "{}", to_json_line(&history.meta))?;
    for r in &history.records {
        writeln!(out, "{}", to_json_line(&RecordLine::from(r)))?;
    }
    out.flush()
}

pub fn history_to_string(history: &ChainHistory) -> String {
    let mut buf = Vec::new();
    write_history(history, &mut buf).expect("in-memory write");
    String::from_utf8(buf).expect("UTF-8")
}

/// Parses a history; `origin` only labels error messages.
pub fn read_history<R: Read>(input: R, origin: &Path) -> Result<ChainHistory> {
    let reader = BufReader::new(input);
    let mut meta: Option<HistoryMeta> = None;
    let mut records = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(origin, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse {
            path: origin.to_path_buf(),
            line: n + 1,
            msg,
        };
        match &meta {
            None => {
                let m: HistoryMeta =
                    serde_json::from_str(&line).map_err(|e| err(format!("metadata: {e}")))?;
                if m.version != HISTORY_VERSION {
                    return Err(Error::IncompatibleVersion(format!(
                        "{}: version {} (expected {HISTORY_VERSION})",
                        origin.display(),
                        m.version
                    )));
                }
                meta = Some(m);
            }
            Some(_) => {
                let r: RecordLine =
                    serde_json::from_str(&line).map_err(|e| err(format!("record: {e}")))?;
                let proposal = Grasp::from_array(r.g).map_err(|e| err(e.to_string()))?;
                if let Some(prev) = records.last().map(|p: &ChainRecord| p.iter) {
                    if r.iter <= prev {
                        return Err(err(format!("iter {} after {prev}", r.iter)));
                    }
                }
                records.push(ChainRecord {
                    iter: r.iter,
                    proposal,
                    measure: r.measure,
                    feasible: r.feasible,
                    accepted: r.accepted,
                    temperature: r.temperature,
                });
            }
        }
    }
    let meta = meta.ok_or_else(|| Error::Parse {
        path: origin.to_path_buf(),
        line: 0,
        msg: "missing metadata line".into(),
    })?;
    Ok(ChainHistory { meta, records })
}

pub fn save_history(history: &ChainHistory, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_history(history, io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

pub fn load_history(path: impl AsRef<Path>) -> Result<ChainHistory> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_history(file, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_use_seventeen_significant_digits() {
        assert_eq!(to_json_line(&0.1f64), "1.0000000000000001e-1");
        assert_eq!(to_json_line(&-2.5f64), "-2.5000000000000000e0");
        let back: f64 = serde_json::from_str(&to_json_line(&(1.0f64 / 3.0))).unwrap();
        assert_eq!(back, 1.0 / 3.0);
    }

    #[test]
    fn rejects_unknown_version() {
        let text = r#"{"version":2,"object":"o","seed":1,"sampler":"rw","params":{}}"#;
        let err = read_history(text.as_bytes(), Path::new("h")).unwrap_err();
        assert!(matches!(err, Error::IncompatibleVersion(_)));
    }

    #[test]
    fn rejects_non_increasing_iters() {
        let meta = r#"{"version":1,"object":"o","seed":1,"sampler":"rw","params":{}}"#;
        let rec = r#"{"iter":0,"g":[0,0,0,1,0,0,0],"measure":0.5,"feasible":false,"accepted":true,"temperature":1}"#;
        let text = format!("{meta}\n{rec}\n{rec}\n");
        assert!(matches!(
            read_history(text.as_bytes(), Path::new("h")),
            Err(Error::Parse { line: 3, .. })
        ));
    }
}
