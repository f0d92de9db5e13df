//! Binary PGM image I/O: magic `P5`, whitespace-separated width, height,
//! and maxval (must be 255), then raw bytes. Comment lines starting with
//! `#` are tolerated on read and never written. Malformed input reports
//! the byte offset of the problem.

use super::{Boundary, GridField};
use crate::{Error, Result};

fn err(offset: usize, msg: &str) -> Error {
    Error::Pgm {
        msg: msg.to_string(),
        offset,
    }
}

struct Scanner<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn skip_separators(&mut self) {
        loop {
            while self.pos < self.data.len() && self.data[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos < self.data.len() && self.data[self.pos] == b'#' {
                while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                return;
            }
        }
    }

    fn token(&mut self, what: &str) -> Result<(usize, &'a [u8])> {
        self.skip_separators();
        let start = self.pos;
        while self.pos < self.data.len() && !self.data[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(err(start, &format!("expected {what}, found end of data")));
        }
        Ok((start, &self.data[start..self.pos]))
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        let (start, tok) = self.token(what)?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| err(start, &format!("invalid {what}")))
    }
}

/// Parse a binary PGM image into a grid with unit spacing.
pub fn read_pgm(data: &[u8]) -> Result<GridField> {
    let mut s = Scanner { data, pos: 0 };
    let (at, magic) = s.token("magic number")?;
    if magic != b"P5" {
        return Err(err(at, "expected magic `P5`"));
    }
    let width = s.number("width")?;
    let height = s.number("height")?;
    let (at, maxtok) = {
        s.skip_separators();
        let start = s.pos;
        let t = s.token("maxval")?;
        let _ = start;
        t
    };
    let maxval: usize = std::str::from_utf8(maxtok)
        .ok()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| err(at, "invalid maxval"))?;
    if maxval != 255 {
        return Err(err(at, "only maxval 255 is supported"));
    }
    if width < 3 || height < 3 {
        return Err(err(at, "image must be at least 3x3"));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if s.pos >= data.len() || !data[s.pos].is_ascii_whitespace() {
        return Err(err(s.pos, "expected whitespace before the raster"));
    }
    s.pos += 1;
    let need = width * height;
    let have = data.len() - s.pos;
    if have < need {
        return Err(err(
            data.len(),
            &format!("raster truncated: need {need} bytes, have {have}"),
        ));
    }
    if have > need {
        return Err(err(s.pos + need, "trailing bytes after the raster"));
    }
    let values = data[s.pos..].iter().map(|b| *b as f64).collect();
    GridField::new_2d(
        [0.0, 0.0],
        [1.0, 1.0],
        [width, height],
        values,
        0.0,
        Boundary::NeumannZeroFlux,
    )
}

/// Serialize a grid as binary PGM, rounding and clamping values to
/// `0..=255`.
pub fn write_pgm(g: &GridField) -> Result<Vec<u8>> {
    if g.dim != 2 {
        return Err(Error::InvalidParameter("PGM output needs a 2-D field".to_string()));
    }
    let mut out = format!("P5\n{} {}\n255\n", g.shape[0], g.shape[1]).into_bytes();
    out.extend(
        g.values
            .iter()
            .map(|v| v.round().clamp(0.0, 255.0) as u8),
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(w: usize, h: usize) -> Vec<u8> {
        let mut d = format!("P5\n{w} {h}\n255\n").into_bytes();
        d.extend((0..w * h).map(|i| (i % 251) as u8));
        d
    }

    #[test]
    fn round_trip() {
        let bytes = sample(7, 5);
        let img = read_pgm(&bytes).unwrap();
        assert_eq!(img.shape, [7, 5]);
        assert_eq!(img.at(3, 2), (2 * 7 + 3) as f64);
        assert_eq!(write_pgm(&img).unwrap(), bytes);
    }

    #[test]
    fn comments_tolerated() {
        let mut d = b"P5\n# a comment\n4 3\n# another\n255\n".to_vec();
        d.extend([0u8; 12]);
        let img = read_pgm(&d).unwrap();
        assert_eq!(img.shape, [4, 3]);
    }

    #[test]
    fn malformed_inputs_report_offsets() {
        // Wrong magic at offset 0.
        match read_pgm(b"P2\n3 3\n255\n") {
            Err(Error::Pgm { offset, .. }) => assert_eq!(offset, 0),
            other => panic!("{other:?}"),
        }
        // Truncated raster reports the end of data.
        let mut d = format!("P5\n4 4\n255\n").into_bytes();
        d.extend([0u8; 7]);
        match read_pgm(&d) {
            Err(Error::Pgm { offset, msg }) => {
                assert_eq!(offset, d.len());
                assert!(msg.contains("truncated"));
            }
            other => panic!("{other:?}"),
        }
        // Unsupported maxval points at the maxval token.
        match read_pgm(b"P5\n3 3\n65535\n") {
            Err(Error::Pgm { offset, .. }) => assert_eq!(offset, 7),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn values_clamped_on_write() {
        let g = GridField::new_2d(
            [0.0, 0.0],
            [1.0, 1.0],
            [3, 3],
            vec![-5.0, 0.0, 100.4, 255.0, 300.0, 17.6, 1.0, 2.0, 3.0],
            0.0,
            Boundary::NeumannZeroFlux,
        )
        .unwrap();
        let bytes = write_pgm(&g).unwrap();
        let img = read_pgm(&bytes).unwrap();
        assert_eq!(img.values[0], 0.0);
        assert_eq!(img.values[2], 100.0);
        assert_eq!(img.values[4], 255.0);
        assert_eq!(img.values[5], 18.0);
    }
}
