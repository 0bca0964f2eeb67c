//! Embedding sequence files.
//!
//! Binary layout, all little-endian:
//!
//! | bytes  | content                                  |
//! |--------|------------------------------------------|
//! | 0..4   | ASCII `MALN`                             |
//! | 4..6   | version, `u16` (1)                       |
//! | 6..10  | frame count `n`, `u32`                   |
//! | 10..14 | frame dimension `dim`, `u32`             |
//! | 14..   | `n * dim` IEEE-754 `f32`, frame-major    |
//!
//! CSV: one frame per line, comma-separated decimals, the same number of
//! columns on every line. Blank lines and lines starting with `#` are skipped.
//! Values are parsed to the nearest `f32` and widened, so CSV and binary
//! files holding the same numbers load to identical sequences.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use bestalign::EmbeddingSequence;
use thiserror::Error;

pub const MAGIC: [u8; 4] = *b"MALN";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 14;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("truncated file: ends at byte offset {offset}, {expected} bytes expected ({what})")]
    Truncated {
        offset: usize,
        expected: usize,
        what: &'static str,
    },
    #[error("not an embedding file: magic bytes are not \"MALN\"")]
    BadMagic,
    #[error("unsupported embedding file version {0}")]
    Version(u16),
    #[error("header declares an empty sequence ({n} frames of dimension {dim})")]
    Empty { n: u32, dim: u32 },
    #[error("{extra} unexpected trailing bytes after the payload at byte offset {offset}")]
    Trailing { offset: usize, extra: usize },
    #[error("non-finite value at byte offset {offset} (frame {frame}, component {component})")]
    NonFinite {
        offset: usize,
        frame: usize,
        component: usize,
    },
    #[error("CSV line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InputFormat {
    #[default]
    Auto,
    Bin,
    Csv,
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(InputFormat::Auto),
            "bin" => Ok(InputFormat::Bin),
            "csv" => Ok(InputFormat::Csv),
            other => Err(format!("unknown format '{other}' (expected auto, bin or csv)")),
        }
    }
}

pub fn decode_binary(bytes: &[u8]) -> Result<EmbeddingSequence, FormatError> {
    if bytes.len() < 4 {
        return Err(FormatError::Truncated {
            offset: bytes.len(),
            expected: HEADER_LEN,
            what: "header",
        });
    }
    if bytes[..4] != MAGIC {
        return Err(FormatError::BadMagic);
    }
    if bytes.len() < HEADER_LEN {
        return Err(FormatError::Truncated {
            offset: bytes.len(),
            expected: HEADER_LEN,
            what: "header",
        });
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != VERSION {
        return Err(FormatError::Version(version));
    }
    let n = u32::from_le_bytes(bytes[6..10].try_into().unwrap());
    let dim = u32::from_le_bytes(bytes[10..14].try_into().unwrap());
    if n == 0 || dim == 0 {
        return Err(FormatError::Empty { n, dim });
    }
    let count = (n as usize)
        .checked_mul(dim as usize)
        .filter(|c| c.checked_mul(4).is_some())
        .ok_or_else(|| FormatError::Invalid(format!("payload size {n} x {dim} overflows")))?;
    let expected = HEADER_LEN + count * 4;
    if bytes.len() < expected {
        return Err(FormatError::Truncated {
            offset: bytes.len(),
            expected,
            what: "payload",
        });
    }
    if bytes.len() > expected {
        return Err(FormatError::Trailing {
            offset: expected,
            extra: bytes.len() - expected,
        });
    }
    let mut data = Vec::with_capacity(count);
    for (k, chunk) in bytes[HEADER_LEN..].chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes(chunk.try_into().unwrap());
        if !v.is_finite() {
            return Err(FormatError::NonFinite {
                offset: HEADER_LEN + 4 * k,
                frame: k / dim as usize,
                component: k % dim as usize,
            });
        }
        data.push(f64::from(v));
    }
    EmbeddingSequence::from_flat(data, n as usize, dim as usize)
        .map_err(|e| FormatError::Invalid(e.to_string()))
}

/// Serialize with every component narrowed to `f32`.
pub fn encode_binary(seq: &EmbeddingSequence) -> Result<Vec<u8>, FormatError> {
    let n = u32::try_from(seq.len())
        .map_err(|_| FormatError::Invalid(format!("{} frames exceed the u32 header field", seq.len())))?;
    let dim = u32::try_from(seq.dim())
        .map_err(|_| FormatError::Invalid(format!("dimension {} exceeds the u32 header field", seq.dim())))?;
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * seq.as_flat().len());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&n.to_le_bytes());
    out.extend_from_slice(&dim.to_le_bytes());
    for &v in seq.as_flat() {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
    Ok(out)
}

pub fn decode_csv(text: &str) -> Result<EmbeddingSequence, FormatError> {
    let mut data = Vec::new();
    let mut dim = None;
    let mut n = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = 0;
        for field in line.split(',') {
            let field = field.trim();
            let v: f32 = field.parse().map_err(|_| FormatError::Csv {
                line: line_no,
                message: format!("cannot parse '{field}' as a number"),
            })?;
            if !v.is_finite() {
                return Err(FormatError::Csv {
                    line: line_no,
                    message: format!("non-finite value '{field}'"),
                });
            }
            data.push(f64::from(v));
            cols += 1;
        }
        match dim {
            None => dim = Some(cols),
            Some(d) if d != cols => {
                return Err(FormatError::Csv {
                    line: line_no,
                    message: format!("{cols} columns, expected {d}"),
                })
            }
            Some(_) => {}
        }
        n += 1;
    }
    let dim = dim.ok_or_else(|| FormatError::Invalid("CSV file contains no frames".into()))?;
    EmbeddingSequence::from_flat(data, n, dim).map_err(|e| FormatError::Invalid(e.to_string()))
}

/// One frame per line; each value is the shortest decimal that parses back to
/// the same `f32`.
pub fn encode_csv(seq: &EmbeddingSequence) -> String {
    let mut out = String::new();
    for frame in seq.frames() {
        for (k, &v) in frame.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            write!(out, "{}", v as f32).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn decode(bytes: &[u8], format: InputFormat) -> Result<EmbeddingSequence, FormatError> {
    let binary = match format {
        InputFormat::Bin => true,
        InputFormat::Csv => false,
        InputFormat::Auto => bytes.starts_with(&MAGIC),
    };
    if binary {
        decode_binary(bytes)
    } else {
        let text = std::str::from_utf8(bytes)
            .map_err(|e| FormatError::Invalid(format!("neither an embedding file nor UTF-8 CSV: {e}")))?;
        decode_csv(text)
    }
}

pub fn load(path: &Path, format: InputFormat) -> Result<EmbeddingSequence, FormatError> {
    let bytes = std::fs::read(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })?;
    decode(&bytes, format)
}
