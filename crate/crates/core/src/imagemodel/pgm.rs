//! Netpbm graymap (PGM) reader and writer.
//!
//! Reads ASCII (`P2`) and binary (`P5`) graymaps with any maxval up to 65535;
//! 16-bit binary samples are big-endian. Comments (`#` to end of line) are
//! accepted anywhere in the header. Samples are converted to `f64` without
//! rescaling. Writing always produces `P5` with maxval 255.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::Image;

#[derive(Debug, thiserror::Error)]
pub enum PgmError {
    #[error("unsupported magic number {found:?} at byte {offset} (expected P2 or P5)")]
    UnsupportedMagic { offset: usize, found: String },

    #[error("malformed header at byte {offset}: {reason}")]
    MalformedHeader { offset: usize, reason: String },

    #[error("truncated payload at byte {offset}: expected {expected} samples, found {found}")]
    TruncatedPayload {
        offset: usize,
        expected: usize,
        found: usize,
    },

    #[error("invalid sample at byte {offset}: {reason}")]
    InvalidSample { offset: usize, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Encoding {
    Ascii,
    Binary,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    /// Reads a decimal integer token. Returns the token start offset on failure.
    fn unsigned(&mut self) -> Result<u64, usize> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        let mut value: u64 = 0;
        while let Some(&b) = self.bytes.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(u64::from(b - b'0')))
                .ok_or(start)?;
            self.pos += 1;
        }
        let terminated = self
            .bytes
            .get(self.pos)
            .is_none_or(|b| b.is_ascii_whitespace() || *b == b'#');
        if self.pos == start || !terminated {
            return Err(start);
        }
        Ok(value)
    }

    fn header_field(&mut self, name: &str) -> Result<u64, PgmError> {
        self.unsigned().map_err(|offset| PgmError::MalformedHeader {
            offset,
            reason: format!("expected {name} as a decimal integer"),
        })
    }
}

/// Parses an in-memory PGM file.
pub fn parse_pgm(bytes: &[u8]) -> Result<Image, PgmError> {
    let encoding = match bytes.get(..2) {
        Some(b"P2") => Encoding::Ascii,
        Some(b"P5") => Encoding::Binary,
        other => {
            return Err(PgmError::UnsupportedMagic {
                offset: 0,
                found: String::from_utf8_lossy(other.unwrap_or(bytes)).into_owned(),
            })
        }
    };
    let mut cur = Cursor { bytes, pos: 2 };
    if !cur
        .bytes
        .get(2)
        .is_some_and(|b| b.is_ascii_whitespace() || *b == b'#')
    {
        return Err(PgmError::MalformedHeader {
            offset: 2,
            reason: "expected whitespace after magic number".into(),
        });
    }

    cur.skip_whitespace_and_comments();
    let width_at = cur.pos;
    let width = cur.header_field("width")?;
    let height = cur.header_field("height")?;
    cur.skip_whitespace_and_comments();
    let maxval_at = cur.pos;
    let maxval = cur.header_field("maxval")?;
    if width == 0 || height == 0 {
        return Err(PgmError::MalformedHeader {
            offset: width_at,
            reason: format!("zero dimension {width}x{height}"),
        });
    }
    if maxval == 0 || maxval > 65535 {
        return Err(PgmError::MalformedHeader {
            offset: maxval_at,
            reason: format!("maxval {maxval} outside 1..=65535"),
        });
    }
    let (rows, cols) = (height as usize, width as usize);
    let expected = rows
        .checked_mul(cols)
        .ok_or_else(|| PgmError::MalformedHeader {
            offset: width_at,
            reason: "dimensions overflow".into(),
        })?;

    let data = match encoding {
        Encoding::Binary => {
            // Exactly one whitespace byte separates maxval from the raster.
            if cur.pos >= bytes.len() {
                return Err(PgmError::TruncatedPayload {
                    offset: cur.pos,
                    expected,
                    found: 0,
                });
            }
            let start = cur.pos + 1;
            let payload = &bytes[start..];
            let width_bytes = if maxval < 256 { 1 } else { 2 };
            let found = payload.len() / width_bytes;
            if found < expected {
                return Err(PgmError::TruncatedPayload {
                    offset: start + found * width_bytes,
                    expected,
                    found,
                });
            }
            let mut data = Vec::with_capacity(expected);
            for (idx, chunk) in payload.chunks(width_bytes).take(expected).enumerate() {
                let v = if width_bytes == 1 {
                    u64::from(chunk[0])
                } else {
                    u64::from(u16::from_be_bytes([chunk[0], chunk[1]]))
                };
                if v > maxval {
                    return Err(PgmError::InvalidSample {
                        offset: start + idx * width_bytes,
                        reason: format!("value {v} exceeds maxval {maxval}"),
                    });
                }
                data.push(v as f64);
            }
            data
        }
        Encoding::Ascii => {
            let mut data = Vec::with_capacity(expected);
            for _ in 0..expected {
                cur.skip_whitespace_and_comments();
                if cur.pos >= bytes.len() {
                    return Err(PgmError::TruncatedPayload {
                        offset: cur.pos,
                        expected,
                        found: data.len(),
                    });
                }
                let at = cur.pos;
                let v = cur.unsigned().map_err(|offset| PgmError::InvalidSample {
                    offset,
                    reason: "expected a decimal integer".into(),
                })?;
                if v > maxval {
                    return Err(PgmError::InvalidSample {
                        offset: at,
                        reason: format!("value {v} exceeds maxval {maxval}"),
                    });
                }
                data.push(v as f64);
            }
            data
        }
    };

    Ok(Image { rows, cols, data })
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<Image, PgmError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| PgmError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_pgm(&bytes)
}

/// Clamps to `[0, 255]`, rounds half away from zero. NaN maps to 0.
fn to_byte(v: f64) -> u8 {
    if v.is_nan() {
        0
    } else {
        v.clamp(0.0, 255.0).round() as u8
    }
}

/// Encodes `image` as a binary maxval-255 PGM.
pub fn write_pgm<W: Write>(image: &Image, mut out: W) -> std::io::Result<()> {
    write!(out, "P5\n{} {}\n255\n", image.cols(), image.rows())?;
    let payload: Vec<u8> = image.data().iter().map(|&v| to_byte(v)).collect();
    out.write_all(&payload)?;
    out.flush()
}

pub fn save_pgm(image: &Image, path: impl AsRef<Path>) -> Result<(), PgmError> {
    let path = path.as_ref();
    let io_err = |source| PgmError::Io {
        path: path.display().to_string(),
        source,
    };
    let file = fs::File::create(path).map_err(io_err)?;
    write_pgm(image, std::io::BufWriter::new(file)).map_err(io_err)
}
