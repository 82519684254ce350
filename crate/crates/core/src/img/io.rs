//! Image file I/O: binary PGM (P5, 8- or 16-bit big-endian) and 8-bit
//! grayscale PNG. Intensities are scaled to `[0, 1]` by the format's maxval
//! on load and quantized on save.

use std::fs;
use std::io::BufWriter;
use std::path::Path;

use crate::{Error, Image, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitDepth {
    Eight,
    Sixteen,
}

impl BitDepth {
    fn maxval(self) -> u32 {
        match self {
            BitDepth::Eight => 255,
            BitDepth::Sixteen => 65535,
        }
    }
}

/// Load a PGM or PNG file; the format is sniffed from the magic bytes, not
/// the extension.
pub fn load_image(path: &Path) -> Result<Image> {
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    if bytes.starts_with(b"\x89PNG") {
        load_png(path, &bytes)
    } else {
        load_pgm(path, &bytes)
    }
}

/// Decode an in-memory PGM or PNG buffer; `label` only feeds diagnostics.
pub(crate) fn decode_bytes(label: &Path, bytes: &[u8]) -> Result<Image> {
    if bytes.starts_with(b"\x89PNG") {
        load_png(label, bytes)
    } else {
        load_pgm(label, bytes)
    }
}

/// Encode to PGM bytes without touching the filesystem.
pub(crate) fn encode_pgm_bytes(img: &Image, depth: BitDepth) -> Vec<u8> {
    let maxval = depth.maxval();
    let mut out = format!("P5\n{} {}\n{}\n", img.width(), img.height(), maxval).into_bytes();
    match depth {
        BitDepth::Eight => {
            out.extend(img.as_slice().iter().map(|&v| quantize(v, 255) as u8));
        }
        BitDepth::Sixteen => {
            for &v in img.as_slice() {
                out.extend_from_slice(&(quantize(v, 65535) as u16).to_be_bytes());
            }
        }
    }
    out
}

/// Save as PGM or 8-bit grayscale PNG depending on the extension. Values are
/// clamped to `[0, 1]` before quantization.
pub fn save_image(img: &Image, path: &Path, depth: BitDepth) -> Result<()> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("pgm") => save_pgm(img, path, depth),
        Some("png") => match depth {
            BitDepth::Eight => save_png(img, path),
            BitDepth::Sixteen => Err(Error::UnsupportedDepth {
                path: path.to_owned(),
                detail: "PNG output is 8-bit grayscale only".into(),
            }),
        },
        _ => Err(Error::InvalidArgument(format!(
            "unsupported image extension: {}",
            path.display()
        ))),
    }
}

fn load_pgm(path: &Path, bytes: &[u8]) -> Result<Image> {
    if !bytes.starts_with(b"P5") {
        return Err(Error::PgmMagic {
            path: path.to_owned(),
        });
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        *field = next_pgm_int(path, bytes, &mut pos)?;
    }
    let (width, height, maxval) = (fields[0], fields[1], fields[2]);
    if width == 0 || height == 0 {
        return Err(Error::PgmHeader {
            path: path.to_owned(),
            detail: "zero dimension".into(),
        });
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::UnsupportedDepth {
            path: path.to_owned(),
            detail: format!("maxval {maxval}"),
        });
    }
    // Single whitespace byte separates the header from the raster.
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(Error::PgmHeader {
            path: path.to_owned(),
            detail: "missing whitespace before pixel data".into(),
        });
    }
    pos += 1;
    let wide = maxval > 255;
    let expected = width * height * if wide { 2 } else { 1 };
    let raster = &bytes[pos..];
    if raster.len() < expected {
        return Err(Error::Truncated {
            path: path.to_owned(),
            expected,
            got: raster.len(),
        });
    }
    let scale = 1.0 / maxval as f64;
    let data: Vec<f64> = if wide {
        raster[..expected]
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64 * scale)
            .collect()
    } else {
        raster[..expected].iter().map(|&b| b as f64 * scale).collect()
    };
    Image::from_vec(width, height, data)
}

fn next_pgm_int(path: &Path, bytes: &[u8], pos: &mut usize) -> Result<usize> {
    // Skip whitespace and `#` comments between header tokens.
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
        } else {
            break;
        }
    }
    let start = *pos;
    while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::PgmHeader {
            path: path.to_owned(),
            detail: "expected integer header field".into(),
        });
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::PgmHeader {
            path: path.to_owned(),
            detail: "integer field out of range".into(),
        })
}

fn save_pgm(img: &Image, path: &Path, depth: BitDepth) -> Result<()> {
    fs::write(path, encode_pgm_bytes(img, depth)).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

fn quantize(v: f64, maxval: u32) -> u32 {
    (v.clamp(0.0, 1.0) * maxval as f64).round() as u32
}

fn load_png(path: &Path, bytes: &[u8]) -> Result<Image> {
    let decoder = png::Decoder::new(std::io::Cursor::new(bytes));
    let mut reader = decoder.read_info().map_err(|e| Error::Png {
        path: path.to_owned(),
        detail: e.to_string(),
    })?;
    let info = reader.info();
    if info.color_type != png::ColorType::Grayscale || info.bit_depth != png::BitDepth::Eight {
        return Err(Error::UnsupportedDepth {
            path: path.to_owned(),
            detail: format!(
                "PNG must be 8-bit grayscale, got {:?}/{:?}",
                info.color_type, info.bit_depth
            ),
        });
    }
    let mut buf = vec![0u8; reader.output_buffer_size().unwrap_or(0)];
    let frame = reader.next_frame(&mut buf).map_err(|e| Error::Png {
        path: path.to_owned(),
        detail: e.to_string(),
    })?;
    let (width, height) = (frame.width as usize, frame.height as usize);
    let data = buf[..width * height]
        .iter()
        .map(|&b| b as f64 / 255.0)
        .collect();
    Image::from_vec(width, height, data)
}

fn save_png(img: &Image, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    let mut encoder = png::Encoder::new(
        BufWriter::new(file),
        img.width() as u32,
        img.height() as u32,
    );
    encoder.set_color(png::ColorType::Grayscale);
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder.write_header().map_err(|e| Error::Png {
        path: path.to_owned(),
        detail: e.to_string(),
    })?;
    let pixels: Vec<u8> = img
        .as_slice()
        .iter()
        .map(|&v| quantize(v, 255) as u8)
        .collect();
    writer.write_image_data(&pixels).map_err(|e| Error::Png {
        path: path.to_owned(),
        detail: e.to_string(),
    })
}
