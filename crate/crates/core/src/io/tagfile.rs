//! Binary and CSV encodings of [`TimeTagStream`].
//!
//! Binary layout, little-endian:
//!
//! ```text
//! "CSTG" | version u16 | header_len u32 | header (TOML, header_len bytes)
//! then record_count × { channel u16 | pulse_index u48 | timestamp_ps u64 }
//! ```
//!
//! The CSV variant carries the same TOML header as `#`-prefixed lines,
//! followed by `channel,pulse_index,timestamp_ps` rows.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::{DetectionRecord, ExperimentConfig, StreamHeader, TimeTagStream};
use crate::physics::SourceParams;

use super::atomic::write_atomic;

pub const MAGIC: &[u8; 4] = b"CSTG";
pub const FORMAT_VERSION: u16 = 1;
pub const RECORD_BYTES: usize = 16;
const PREAMBLE_BYTES: usize = 10;
const CSV_COLUMNS: &str = "channel,pulse_index,timestamp_ps";
const PULSE_MAX: u64 = (1 << 48) - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TagFormat {
    Binary,
    Csv,
}

impl TagFormat {
    /// `.csv` selects CSV; anything else is binary.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Self::Csv,
            _ => Self::Binary,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TagHeader {
    format_version: u16,
    record_count: u64,
    source: SourceParams,
    experiment: ExperimentConfig,
}

fn header_text(stream: &TimeTagStream) -> String {
    toml::to_string(&TagHeader {
        format_version: FORMAT_VERSION,
        record_count: stream.record_count() as u64,
        source: stream.header.source,
        experiment: stream.header.experiment.clone(),
    })
    .expect("header serializes")
}

fn parse_header(text: &str, offset: u64) -> Result<TagHeader> {
    toml::from_str(text).map_err(|e| Error::Format {
        offset: offset + e.span().map_or(0, |s| s.start as u64),
        message: format!("invalid header: {}", e.message()),
    })
}

fn check_order(records: &[DetectionRecord], offset_of: impl Fn(usize) -> u64) -> Result<()> {
    if let Some(i) = records.windows(2).position(|w| w[1] < w[0]) {
        return Err(Error::Format {
            offset: offset_of(i + 1),
            message: format!("record {} is out of time order", i + 1),
        });
    }
    Ok(())
}

pub fn encode_binary(stream: &TimeTagStream) -> Vec<u8> {
    let header = header_text(stream);
    let mut out =
        Vec::with_capacity(PREAMBLE_BYTES + header.len() + stream.record_count() * RECORD_BYTES);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(header.len() as u32).to_le_bytes());
    out.extend_from_slice(header.as_bytes());
    for r in stream.records() {
        out.extend_from_slice(&r.channel.to_le_bytes());
        out.extend_from_slice(&r.pulse_index.to_le_bytes()[..6]);
        out.extend_from_slice(&r.timestamp.to_le_bytes());
    }
    out
}

pub fn decode_binary(bytes: &[u8]) -> Result<TimeTagStream> {
    if bytes.len() < PREAMBLE_BYTES {
        return Err(Error::Format {
            offset: bytes.len() as u64,
            message: "file shorter than the preamble".into(),
        });
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::Format {
            offset: 0,
            message: format!("bad magic {:?}", &bytes[..4]),
        });
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != FORMAT_VERSION {
        return Err(Error::Format {
            offset: 4,
            message: format!("unsupported format version {version}"),
        });
    }
    let header_len = u32::from_le_bytes(bytes[6..10].try_into().expect("4 bytes")) as usize;
    let body_start = PREAMBLE_BYTES + header_len;
    if bytes.len() < body_start {
        return Err(Error::Format {
            offset: bytes.len() as u64,
            message: format!("header truncated: expected {header_len} bytes"),
        });
    }
    let text = std::str::from_utf8(&bytes[PREAMBLE_BYTES..body_start]).map_err(|e| Error::Format {
        offset: (PREAMBLE_BYTES + e.valid_up_to()) as u64,
        message: "header is not UTF-8".into(),
    })?;
    let header = parse_header(text, PREAMBLE_BYTES as u64)?;
    let body = &bytes[body_start..];
    let expected = header.record_count as usize;
    if body.len() != expected * RECORD_BYTES {
        let found = body.len() / RECORD_BYTES;
        let partial = body.len() % RECORD_BYTES;
        return Err(Error::Format {
            offset: (body_start + found * RECORD_BYTES) as u64,
            message: format!(
                "expected {expected} records, found {found}{}",
                if partial > 0 {
                    format!(" plus {partial} trailing bytes")
                } else {
                    String::new()
                }
            ),
        });
    }
    let records: Vec<DetectionRecord> = body
        .chunks_exact(RECORD_BYTES)
        .map(|c| {
            let channel = u16::from_le_bytes([c[0], c[1]]);
            let mut pulse = [0u8; 8];
            pulse[..6].copy_from_slice(&c[2..8]);
            let timestamp = u64::from_le_bytes(c[8..16].try_into().expect("8 bytes"));
            DetectionRecord::new(channel, u64::from_le_bytes(pulse), timestamp)
        })
        .collect();
    check_order(&records, |i| (body_start + i * RECORD_BYTES) as u64)?;
    Ok(TimeTagStream::from_sorted(
        StreamHeader {
            source: header.source,
            experiment: header.experiment,
        },
        records,
    ))
}

pub fn encode_csv(stream: &TimeTagStream) -> String {
    let mut out = String::new();
    for line in header_text(stream).lines() {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str(CSV_COLUMNS);
    out.push('\n');
    for r in stream.records() {
        out.push_str(&format!("{},{},{}\n", r.channel, r.pulse_index, r.timestamp));
    }
    out
}

pub fn decode_csv(text: &str) -> Result<TimeTagStream> {
    let mut header = String::new();
    let mut body_offset = 0usize;
    for line in text.split_inclusive('\n') {
        match line.strip_prefix('#') {
            Some(rest) => {
                header.push_str(rest.strip_prefix(' ').unwrap_or(rest));
                body_offset += line.len();
            }
            None => break,
        }
    }
    if header.is_empty() {
        return Err(Error::Format {
            offset: 0,
            message: "missing `#` header block".into(),
        });
    }
    let header = parse_header(&header, 0)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(&text.as_bytes()[body_offset..]);
    let columns = reader.headers().map_err(|e| Error::Format {
        offset: body_offset as u64,
        message: e.to_string(),
    })?;
    if columns.iter().collect::<Vec<_>>().join(",") != CSV_COLUMNS {
        return Err(Error::Format {
            offset: body_offset as u64,
            message: format!("expected columns `{CSV_COLUMNS}`"),
        });
    }
    let mut records = Vec::with_capacity(header.record_count as usize);
    let mut offsets = Vec::with_capacity(header.record_count as usize);
    for row in reader.records() {
        let row = row.map_err(|e| Error::Format {
            offset: body_offset as u64 + e.position().map_or(0, |p| p.byte()),
            message: e.to_string(),
        })?;
        let at = body_offset as u64 + row.position().map_or(0, |p| p.byte());
        let field = |i: usize| -> Result<u64> {
            row.get(i)
                .and_then(|s| s.trim().parse::<u64>().ok())
                .ok_or_else(|| Error::Format {
                    offset: at,
                    message: format!("field {i} is not an unsigned integer"),
                })
        };
        let channel = u16::try_from(field(0)?).map_err(|_| Error::Format {
            offset: at,
            message: "channel exceeds u16".into(),
        })?;
        let pulse = field(1)?;
        if pulse > PULSE_MAX {
            return Err(Error::Format {
                offset: at,
                message: "pulse_index exceeds 48 bits".into(),
            });
        }
        records.push(DetectionRecord::new(channel, pulse, field(2)?));
        offsets.push(at);
    }
    if records.len() as u64 != header.record_count {
        return Err(Error::Format {
            offset: text.len() as u64,
            message: format!(
                "expected {} records, found {}",
                header.record_count,
                records.len()
            ),
        });
    }
    check_order(&records, |i| offsets[i])?;
    Ok(TimeTagStream::from_sorted(
        StreamHeader {
            source: header.source,
            experiment: header.experiment,
        },
        records,
    ))
}

/// Writes atomically; the encoding follows the file extension.
pub fn write_tagfile(path: &Path, stream: &TimeTagStream) -> Result<()> {
    let bytes = match TagFormat::from_path(path) {
        TagFormat::Binary => encode_binary(stream),
        TagFormat::Csv => encode_csv(stream).into_bytes(),
    };
    write_atomic(path, &bytes)
}

/// Reads either encoding, detected from the magic bytes.
pub fn read_tagfile(path: &Path) -> Result<TimeTagStream> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(MAGIC) {
        decode_binary(&bytes)
    } else {
        let text = String::from_utf8(bytes).map_err(|e| Error::Format {
            offset: e.utf8_error().valid_up_to() as u64,
            message: "neither a binary tag file nor UTF-8 CSV".into(),
        })?;
        decode_csv(&text)
    }
}
