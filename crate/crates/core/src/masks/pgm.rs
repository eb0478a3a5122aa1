//! Portable graymap (PGM) reading and writing.

use crate::{Error, Result};

/// Grayscale raster, row 0 at the top.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub data: Vec<u16>,
}

impl Raster {
    pub fn new(width: usize, height: usize, maxval: u16) -> Self {
        Self { width, height, maxval, data: vec![0; width * height] }
    }

    pub fn get(&self, col: usize, row: usize) -> u16 {
        self.data[row * self.width + col]
    }

    pub fn set(&mut self, col: usize, row: usize, v: u16) {
        self.data[row * self.width + col] = v;
    }

    /// Parses a P2 (ASCII) or P5 (binary) graymap.
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let mut cur = Cursor { bytes, pos: 0 };
        let magic = cur.token()?;
        let binary = match magic.as_slice() {
            b"P2" => false,
            b"P5" => true,
            _ => return Err(pgm_err(0, "expected magic number P2 or P5")),
        };
        let width = cur.number()?;
        let height = cur.number()?;
        let maxval_at = cur.pos;
        let maxval = cur.number()?;
        if width == 0 || height == 0 {
            return Err(pgm_err(maxval_at, "zero image dimension"));
        }
        if maxval == 0 || maxval > 65535 {
            return Err(pgm_err(maxval_at, format!("maxval {maxval} outside 1..=65535")));
        }
        let maxval = maxval as u16;
        let count = width
            .checked_mul(height)
            .ok_or_else(|| pgm_err(maxval_at, "image dimensions overflow"))?;
        let mut data = Vec::with_capacity(count);
        if binary {
            // exactly one whitespace byte separates the header from the raster
            match bytes.get(cur.pos) {
                Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
                _ => return Err(pgm_err(cur.pos, "missing whitespace after header")),
            }
            let wide = maxval > 255;
            let need = count * if wide { 2 } else { 1 };
            let body = &bytes[cur.pos..];
            if body.len() < need {
                return Err(pgm_err(
                    bytes.len(),
                    format!("raster truncated: {} of {need} bytes", body.len()),
                ));
            }
            for i in 0..count {
                let v = if wide {
                    u16::from_be_bytes([body[2 * i], body[2 * i + 1]])
                } else {
                    body[i] as u16
                };
                if v > maxval {
                    let at = cur.pos + if wide { 2 * i } else { i };
                    return Err(pgm_err(at, format!("sample {v} exceeds maxval {maxval}")));
                }
                data.push(v);
            }
        } else {
            for _ in 0..count {
                let at = cur.skip_space();
                let v = cur.number()?;
                if v > maxval as usize {
                    return Err(pgm_err(at, format!("sample {v} exceeds maxval {maxval}")));
                }
                data.push(v as u16);
            }
        }
        Ok(Self { width, height, maxval, data })
    }

    /// Binary (P5) encoding.
    pub fn to_p5(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n{}\n", self.width, self.height, self.maxval).into_bytes();
        if self.maxval > 255 {
            for v in &self.data {
                out.extend_from_slice(&v.to_be_bytes());
            }
        } else {
            out.extend(self.data.iter().map(|&v| v as u8));
        }
        out
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read(path)?)
    }

    pub fn write(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_p5())?;
        Ok(())
    }
}

fn pgm_err(offset: usize, message: impl Into<String>) -> Error {
    Error::Pgm { offset, message: message.into() }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    /// Skips whitespace and `#` comments; returns the new position.
    fn skip_space(&mut self) -> usize {
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
        self.pos
    }

    fn token(&mut self) -> Result<Vec<u8>> {
        let start = self.skip_space();
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() || b == b'#' {
                break;
            }
            self.pos += 1;
        }
        if self.pos == start {
            return Err(pgm_err(start, "unexpected end of header"));
        }
        Ok(self.bytes[start..self.pos].to_vec())
    }

    fn number(&mut self) -> Result<usize> {
        let start = self.skip_space();
        let tok = self.token()?;
        std::str::from_utf8(&tok)
            .ok()
            .filter(|s| s.bytes().all(|b| b.is_ascii_digit()))
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| {
                pgm_err(start, format!("expected a decimal integer, found {:?}", String::from_utf8_lossy(&tok)))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ascii_and_binary_agree() {
        let ascii = b"P2\n# comment\n3 2\n255\n0 1 2\n253 254 255\n";
        let a = Raster::parse(ascii).unwrap();
        let b = Raster::parse(&a.to_p5()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.get(2, 1), 255);
        assert_eq!(a.get(1, 0), 1);
    }

    #[test]
    fn sixteen_bit_roundtrip() {
        let mut r = Raster::new(2, 2, 1000);
        r.set(1, 1, 999);
        assert_eq!(Raster::parse(&r.to_p5()).unwrap(), r);
    }

    #[test]
    fn errors_carry_offsets() {
        match Raster::parse(b"P6\n1 1\n255\n\0") {
            Err(Error::Pgm { offset, .. }) => assert_eq!(offset, 0),
            other => panic!("{other:?}"),
        }
        match Raster::parse(b"P2\n2 x\n255\n") {
            Err(Error::Pgm { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("{other:?}"),
        }
        match Raster::parse(b"P5\n2 2\n255\n\x01\x02") {
            Err(Error::Pgm { offset, .. }) => assert_eq!(offset, 13),
            other => panic!("{other:?}"),
        }
        match Raster::parse(b"P2\n2 1\n10\n3 11\n") {
            Err(Error::Pgm { offset, .. }) => assert_eq!(offset, 12),
            other => panic!("{other:?}"),
        }
    }
}
