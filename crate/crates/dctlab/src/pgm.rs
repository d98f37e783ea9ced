//! Binary PGM (P5) with 8-bit samples.

use std::fs;
use std::path::Path;

use dctlab_core::codec::GrayImage;

use crate::io::write_atomic;

#[derive(Debug, thiserror::Error)]
pub enum PgmError {
    #[error("not a binary PGM (expected magic P5)")]
    BadMagic,
    #[error("malformed header: {0}")]
    Header(&'static str),
    #[error("maxval {0} is unsupported; only 8-bit images (maxval ≤ 255) are accepted")]
    Maxval(u32),
    #[error("pixel data truncated: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error(transparent)]
    Core(#[from] dctlab_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while self.data.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &'static str) -> Result<u32, PgmError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.data.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.data[start..self.pos]).ok().and_then(|s| s.parse().ok()).ok_or(PgmError::Header(what))
    }
}

pub fn decode(data: &[u8]) -> Result<GrayImage, PgmError> {
    if !data.starts_with(b"P5") {
        return Err(PgmError::BadMagic);
    }
    let mut c = Cursor { data, pos: 2 };
    let width = c.number("width")? as usize;
    let height = c.number("height")? as usize;
    let maxval = c.number("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(PgmError::Maxval(maxval));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if !data.get(c.pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(PgmError::Header("missing separator after maxval"));
    }
    let start = c.pos + 1;
    let expected = width * height;
    let found = data.len().saturating_sub(start);
    if found < expected {
        return Err(PgmError::Truncated { expected, found });
    }
    Ok(GrayImage::new(width, height, data[start..start + expected].to_vec())?)
}

pub fn encode(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.samples());
    out
}

pub fn read(path: &Path) -> Result<GrayImage, PgmError> {
    decode(&fs::read(path)?)
}

pub fn write(path: &Path, img: &GrayImage) -> std::io::Result<()> {
    write_atomic(path, &encode(img))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let img = GrayImage::from_fn(13, 7, |x, y| (x * 19 + y * 7) as u8);
        let back = decode(&encode(&img)).unwrap();
        assert_eq!(back, img);
        assert_eq!(encode(&back), encode(&img));
    }

    #[test]
    fn header_comments_are_skipped() {
        let mut data = b"P5 # made by hand\n2 # width above\n2\n255\n".to_vec();
        data.extend([0, 64, 128, 255]);
        let img = decode(&data).unwrap();
        assert_eq!(img.samples(), &[0, 64, 128, 255]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(decode(b"P2\n1 1\n255\n0"), Err(PgmError::BadMagic)));
        assert!(matches!(decode(b"P5\n1 1\n65535\n\0\0"), Err(PgmError::Maxval(65535))));
        assert!(matches!(decode(b"P5\n4 4\n255\n\0\0"), Err(PgmError::Truncated { expected: 16, found: 2 })));
        assert!(matches!(decode(b"P5\nx 4\n255\n"), Err(PgmError::Header("width"))));
    }
}
