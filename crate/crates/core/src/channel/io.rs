use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{validate, Channel};
use crate::error::{Error, Result};

/// On-disk JSON shape: `{"rows": n, "cols": m, "p": [[...], ...]}`.
#[derive(Serialize, Deserialize)]
pub(crate) struct ChannelRepr {
    rows: usize,
    cols: usize,
    p: Vec<Vec<f64>>,
}

impl TryFrom<ChannelRepr> for Channel {
    type Error = Error;

    fn try_from(repr: ChannelRepr) -> Result<Channel> {
        let k = validate(&repr.p)?;
        if k.shape() != (repr.rows, repr.cols) {
            return Err(Error::ShapeMismatch(format!(
                "header says {}x{}, matrix is {}x{}",
                repr.rows,
                repr.cols,
                k.rows(),
                k.cols()
            )));
        }
        Ok(k)
    }
}

impl From<Channel> for ChannelRepr {
    fn from(k: Channel) -> Self {
        ChannelRepr { rows: k.rows(), cols: k.cols(), p: k.to_rows() }
    }
}

pub fn parse_json(text: &str) -> Result<Channel> {
    serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })
}

pub fn to_json(k: &Channel) -> String {
    serde_json::to_string(k).expect("channel serialization is infallible")
}

/// One matrix row per line, comma-separated decimals. Blank lines are skipped.
pub fn parse_csv(text: &str) -> Result<Channel> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let row = record
            .iter()
            .map(|field| {
                field.parse::<f64>().map_err(|e| Error::Parse {
                    line,
                    message: format!("{field:?}: {e}"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first().map(Vec::len) {
            if row.len() != first {
                return Err(Error::Parse {
                    line,
                    message: format!("{} fields, expected {first}", row.len()),
                });
            }
        }
        rows.push(row);
    }
    validate(&rows)
}

/// Reads a channel from `.json` or `.csv`; other extensions are sniffed by content.
pub fn read_channel(path: impl AsRef<Path>) -> Result<Channel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => parse_json(&text),
        Some("csv") => parse_csv(&text),
        _ if text.trim_start().starts_with('{') => parse_json(&text),
        _ => parse_csv(&text),
    }
}
