//! File formats.
//!
//! Field files hold one scalar field:
//!
//! ```text
//! offset  size  content
//! 0       4     b"SDF1"
//! 4       4     width,  u32 little-endian
//! 8       4     height, u32 little-endian
//! 12      4*w*h row-major f32 little-endian values
//! ```
//!
//! Label files are 16-bit grayscale PNG or PGM (`P2` plain / `P5` raw), with
//! the pixel value as label id.

use std::fs;
use std::path::Path;

use image::{ImageBuffer, ImageFormat, Luma};

use crate::error::{Error, Result};
use crate::grid::{LabelMap, ScalarField};

pub const FIELD_MAGIC: &[u8; 4] = b"SDF1";
const FIELD_HEADER: usize = 12;
const PNG_SIGNATURE: &[u8] = b"\x89PNG\r\n\x1a\n";

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

pub fn encode_field(field: &ScalarField) -> Result<Vec<u8>> {
    let width = u32::try_from(field.width()).map_err(|_| format_err("field too wide"))?;
    let height = u32::try_from(field.height()).map_err(|_| format_err("field too tall"))?;
    let mut out = Vec::with_capacity(FIELD_HEADER + 4 * field.len());
    out.extend_from_slice(FIELD_MAGIC);
    out.extend_from_slice(&width.to_le_bytes());
    out.extend_from_slice(&height.to_le_bytes());
    for (i, &v) in field.data().iter().enumerate() {
        let single = v as f32;
        if !single.is_finite() {
            return Err(format_err(format!(
                "value {v} at index {i} is not representable as a finite f32"
            )));
        }
        out.extend_from_slice(&single.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_field(bytes: &[u8]) -> Result<ScalarField> {
    if bytes.len() < FIELD_HEADER || &bytes[..4] != FIELD_MAGIC {
        return Err(format_err("missing SDF1 header"));
    }
    let width = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let height = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    if width == 0 || height == 0 {
        return Err(format_err(format!("empty field {width}x{height}")));
    }
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| format_err("field dimensions overflow"))?;
    let payload = &bytes[FIELD_HEADER..];
    if payload.len() != expected {
        return Err(format_err(format!(
            "payload is {} bytes, expected {expected} for {width}x{height}",
            payload.len()
        )));
    }
    let mut data = Vec::with_capacity(width * height);
    for (i, chunk) in payload.chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes(chunk.try_into().unwrap());
        if !v.is_finite() {
            return Err(format_err(format!("non-finite value at index {i}")));
        }
        data.push(v as f64);
    }
    ScalarField::new(width, height, data)
}

pub fn read_field(path: impl AsRef<Path>) -> Result<ScalarField> {
    decode_field(&fs::read(path)?)
}

pub fn write_field(path: impl AsRef<Path>, field: &ScalarField) -> Result<()> {
    fs::write(path, encode_field(field)?)?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabelFormat {
    Png,
    /// Raw binary PGM (`P5`), 16 bits per sample.
    Pgm,
}

impl LabelFormat {
    /// `.png` selects PNG, `.pgm`/`.pnm` selects PGM.
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        match ext.as_deref() {
            Some("png") => Ok(Self::Png),
            Some("pgm") | Some("pnm") => Ok(Self::Pgm),
            _ => Err(format_err(format!(
                "cannot infer label format from {}",
                path.display()
            ))),
        }
    }
}

pub fn decode_labels(bytes: &[u8]) -> Result<LabelMap> {
    if bytes.starts_with(PNG_SIGNATURE) {
        decode_png(bytes)
    } else if bytes.starts_with(b"P2") || bytes.starts_with(b"P5") {
        decode_pgm(bytes)
    } else {
        Err(format_err("label file is neither PNG nor PGM"))
    }
}

pub fn encode_labels(labels: &LabelMap, format: LabelFormat) -> Result<Vec<u8>> {
    if let Some(&big) = labels.data().iter().find(|&&v| v > u16::MAX as u32) {
        return Err(format_err(format!("label {big} does not fit in 16 bits")));
    }
    match format {
        LabelFormat::Png => encode_png(labels),
        LabelFormat::Pgm => Ok(encode_pgm(labels)),
    }
}

pub fn read_labels(path: impl AsRef<Path>) -> Result<LabelMap> {
    decode_labels(&fs::read(path)?)
}

pub fn write_labels(path: impl AsRef<Path>, labels: &LabelMap) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_labels(labels, LabelFormat::from_path(path)?)?;
    fs::write(path, bytes)?;
    Ok(())
}

fn decode_png(bytes: &[u8]) -> Result<LabelMap> {
    let img = image::load_from_memory_with_format(bytes, ImageFormat::Png)
        .map_err(|e| format_err(format!("PNG decode: {e}")))?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let data: Vec<u32> = match img {
        image::DynamicImage::ImageLuma16(buf) => {
            buf.into_raw().into_iter().map(u32::from).collect()
        }
        image::DynamicImage::ImageLuma8(buf) => buf.into_raw().into_iter().map(u32::from).collect(),
        other => {
            return Err(format_err(format!(
                "label PNG must be grayscale, got {:?}",
                other.color()
            )))
        }
    };
    LabelMap::new(w, h, data).map_err(|e| format_err(e.to_string()))
}

fn encode_png(labels: &LabelMap) -> Result<Vec<u8>> {
    let raw: Vec<u16> = labels.data().iter().map(|&v| v as u16).collect();
    let buf: ImageBuffer<Luma<u16>, Vec<u16>> =
        ImageBuffer::from_raw(labels.width() as u32, labels.height() as u32, raw)
            .ok_or_else(|| format_err("label buffer size mismatch"))?;
    let mut out = std::io::Cursor::new(Vec::new());
    buf.write_to(&mut out, ImageFormat::Png)
        .map_err(|e| format_err(format!("PNG encode: {e}")))?;
    Ok(out.into_inner())
}

fn encode_pgm(labels: &LabelMap) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n65535\n", labels.width(), labels.height()).into_bytes();
    for &v in labels.data() {
        out.extend_from_slice(&(v as u16).to_be_bytes());
    }
    out
}

/// Header tokens of a PNM file: magic, width, height, maxval. Returns the
/// byte offset just past the single whitespace byte that ends the header.
fn pgm_header(bytes: &[u8]) -> Result<([usize; 3], usize)> {
    let mut values = [0usize; 3];
    let mut pos = 2;
    for slot in values.iter_mut() {
        loop {
            match bytes.get(pos) {
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(_) => break,
                None => return Err(format_err("truncated PGM header")),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        let token = std::str::from_utf8(&bytes[start..pos]).unwrap();
        *slot = token
            .parse()
            .map_err(|_| format_err("malformed PGM header"))?;
    }
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => Ok((values, pos + 1)),
        _ => Err(format_err("malformed PGM header")),
    }
}

fn decode_pgm(bytes: &[u8]) -> Result<LabelMap> {
    let ([w, h, maxval], body) = pgm_header(bytes)?;
    if maxval == 0 || maxval > u16::MAX as usize {
        return Err(format_err(format!("PGM maxval {maxval} out of range")));
    }
    let n = w
        .checked_mul(h)
        .ok_or_else(|| format_err("PGM dimensions overflow"))?;
    let data: Vec<u32> = if bytes[1] == b'5' {
        let payload = &bytes[body..];
        let sample = if maxval < 256 { 1 } else { 2 };
        if payload.len() != n * sample {
            return Err(format_err(format!(
                "PGM payload is {} bytes, expected {}",
                payload.len(),
                n * sample
            )));
        }
        if sample == 1 {
            payload.iter().map(|&b| b as u32).collect()
        } else {
            payload
                .chunks_exact(2)
                .map(|c| u16::from_be_bytes([c[0], c[1]]) as u32)
                .collect()
        }
    } else {
        let text = std::str::from_utf8(&bytes[body..])
            .map_err(|_| format_err("plain PGM body is not ASCII"))?;
        let values: Vec<u32> = text
            .lines()
            .map(|line| line.split('#').next().unwrap_or(""))
            .flat_map(str::split_ascii_whitespace)
            .map(|t| {
                t.parse()
                    .map_err(|_| format_err(format!("bad PGM sample {t:?}")))
            })
            .collect::<Result<_>>()?;
        if values.len() != n {
            return Err(format_err(format!(
                "PGM has {} samples, expected {n}",
                values.len()
            )));
        }
        values
    };
    if let Some(&v) = data.iter().find(|&&v| v as usize > maxval) {
        return Err(format_err(format!(
            "PGM sample {v} exceeds maxval {maxval}"
        )));
    }
    LabelMap::new(w, h, data).map_err(|e| format_err(e.to_string()))
}
