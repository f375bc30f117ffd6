//! Binary field files.
//!
//! Layout, all integers `u32` little-endian:
//!
//! ```text
//! b"LPF1"
//! dims
//! resolution           (once per axis)
//! components
//! period               (f64 LE)
//! encoding             (1 = f64 LE)
//! payload              (row-major, components interleaved last)
//! ```

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{Grid, SampledField};

pub const MAGIC: &[u8; 4] = b"LPF1";
pub const ENCODING_F64_LE: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct FieldHeader {
    pub dims: usize,
    pub resolutions: Vec<usize>,
    pub components: usize,
    pub period: f64,
    pub encoding: u32,
}

impl FieldHeader {
    pub fn of(field: &SampledField) -> Self {
        let grid = field.grid();
        FieldHeader {
            dims: grid.dims(),
            resolutions: vec![grid.resolution(); grid.dims()],
            components: field.n_components(),
            period: grid.period(),
            encoding: ENCODING_F64_LE,
        }
    }

    pub fn payload_len(&self) -> usize {
        self.resolutions.iter().product::<usize>() * self.components * 8
    }

    fn validate(&self) -> Result<Grid> {
        if self.encoding != ENCODING_F64_LE {
            return Err(Error::HeaderMismatch(format!(
                "unknown encoding tag {}",
                self.encoding
            )));
        }
        let n = self.resolutions[0];
        if self.resolutions.iter().any(|&r| r != n) {
            return Err(Error::HeaderMismatch(format!(
                "anisotropic resolutions {:?}",
                self.resolutions
            )));
        }
        let grid = Grid::new(self.dims, n, self.period)
            .map_err(|e| Error::HeaderMismatch(e.to_string()))?;
        if self.components != 1 && self.components != self.dims {
            return Err(Error::HeaderMismatch(format!(
                "{} components on a {}-dimensional grid",
                self.components, self.dims
            )));
        }
        Ok(grid)
    }
}

fn read_u32(bytes: &[u8], pos: &mut usize) -> Result<u32> {
    let chunk = bytes
        .get(*pos..*pos + 4)
        .ok_or_else(|| Error::HeaderMismatch("header ends early".into()))?;
    *pos += 4;
    Ok(u32::from_le_bytes(chunk.try_into().unwrap()))
}

pub fn encode_field(field: &SampledField) -> Vec<u8> {
    let h = FieldHeader::of(field);
    let mut out = Vec::with_capacity(24 + 4 * h.dims + h.payload_len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(h.dims as u32).to_le_bytes());
    for r in &h.resolutions {
        out.extend_from_slice(&(*r as u32).to_le_bytes());
    }
    out.extend_from_slice(&(h.components as u32).to_le_bytes());
    out.extend_from_slice(&h.period.to_le_bytes());
    out.extend_from_slice(&h.encoding.to_le_bytes());
    for v in field.to_interleaved() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Parses and validates the header, returning it with the payload offset.
pub fn decode_header(bytes: &[u8]) -> Result<(FieldHeader, usize)> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(Error::BadMagic);
    }
    let mut pos = 4;
    let dims = read_u32(bytes, &mut pos)? as usize;
    if !(1..=3).contains(&dims) {
        return Err(Error::HeaderMismatch(format!("dimension {dims}")));
    }
    let resolutions = (0..dims)
        .map(|_| read_u32(bytes, &mut pos).map(|r| r as usize))
        .collect::<Result<Vec<_>>>()?;
    let components = read_u32(bytes, &mut pos)? as usize;
    let period_bytes = bytes
        .get(pos..pos + 8)
        .ok_or_else(|| Error::HeaderMismatch("header ends early".into()))?;
    let period = f64::from_le_bytes(period_bytes.try_into().unwrap());
    pos += 8;
    let encoding = read_u32(bytes, &mut pos)?;
    Ok((
        FieldHeader {
            dims,
            resolutions,
            components,
            period,
            encoding,
        },
        pos,
    ))
}

pub fn decode_field(bytes: &[u8]) -> Result<SampledField> {
    let (header, offset) = decode_header(bytes)?;
    let grid = header.validate()?;
    let payload = &bytes[offset..];
    let expected = header.payload_len();
    if payload.len() < expected {
        return Err(Error::TruncatedPayload {
            expected,
            found: payload.len(),
        });
    }
    if payload.len() > expected {
        return Err(Error::HeaderMismatch(format!(
            "{} trailing bytes after payload",
            payload.len() - expected
        )));
    }
    let values: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    SampledField::from_interleaved(grid, header.components, &values)
}

/// Writes `bytes` to a temporary file beside `path`, then renames it over
/// `path`.
pub fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::IoFailure(e.error))?;
    Ok(())
}

pub fn save_field(field: &SampledField, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path, &encode_field(field))
}

pub fn load_field(path: impl AsRef<Path>) -> Result<SampledField> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode_field(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::white_noise;
    use std::f64::consts::PI;

    #[test]
    fn round_trip_is_bit_identical() {
        let g = Grid::new(3, 8, 1.5).unwrap();
        let f = white_noise(&g, 3, 2).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.lpf");
        save_field(&f, &path).unwrap();
        let back = load_field(&path).unwrap();
        assert_eq!(encode_field(&back), encode_field(&f));
        assert_eq!(back, f);
    }

    #[test]
    fn signed_zero_survives() {
        let g = Grid::new(1, 4, 2.0 * PI).unwrap();
        let f = SampledField::scalar(g, vec![-0.0, 0.0, 1.0, -2.5]).unwrap();
        let back = decode_field(&encode_field(&f)).unwrap();
        assert!(back.component(0)[0].is_sign_negative());
        assert!(back.component(0)[1].is_sign_positive());
    }

    #[test]
    fn header_layout() {
        let g = Grid::new(2, 4, 2.0).unwrap();
        let bytes = encode_field(&SampledField::zeros(g, 2).unwrap());
        assert_eq!(&bytes[..4], b"LPF1");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 2);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 4);
        assert_eq!(u32::from_le_bytes(bytes[12..16].try_into().unwrap()), 4);
        assert_eq!(u32::from_le_bytes(bytes[16..20].try_into().unwrap()), 2);
        assert_eq!(f64::from_le_bytes(bytes[20..28].try_into().unwrap()), 2.0);
        assert_eq!(u32::from_le_bytes(bytes[28..32].try_into().unwrap()), 1);
        assert_eq!(bytes.len(), 32 + 16 * 2 * 8);
    }

    #[test]
    fn corrupt_files_are_rejected() {
        let g = Grid::new(2, 4, 2.0 * PI).unwrap();
        let good = encode_field(&white_noise(&g, 1, 0).unwrap());

        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(matches!(decode_field(&bad), Err(Error::BadMagic)));
        assert!(matches!(decode_field(b"LP"), Err(Error::BadMagic)));

        let short = &good[..good.len() - 3];
        assert!(matches!(
            decode_field(short),
            Err(Error::TruncatedPayload {
                expected: 128,
                found: 125
            })
        ));

        let mut bad = good.clone();
        bad[28] = 7;
        assert!(matches!(decode_field(&bad), Err(Error::HeaderMismatch(_))));

        let mut bad = good.clone();
        bad[12] = 8;
        assert!(matches!(decode_field(&bad), Err(Error::HeaderMismatch(_))));

        let mut long = good;
        long.push(0);
        assert!(matches!(decode_field(&long), Err(Error::HeaderMismatch(_))));
    }
}
