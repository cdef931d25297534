use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{parse_tag, Axis, PhaseField, PhaseGrid};
use crate::C64;

pub const QPSF_MAGIC: &[u8; 8] = b"QPSF0001";
pub const QPSF_ENDIAN_MARKER: u32 = 0x0102_0304;
pub const QPSF_HEADER_LEN: usize = 76;
const TAG_LEN: usize = 16;

/// Fixed 76-byte little-endian header of a QPSF file.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFileHeader {
    pub n: u32,
    pub m: u32,
    pub q_min: f64,
    pub dq: f64,
    pub p_min: f64,
    pub dp: f64,
    pub hbar: f64,
    pub tag: String,
}

impl GridFileHeader {
    pub fn of(field: &PhaseField) -> Result<Self> {
        let g = &field.grid;
        let tag = field.tag();
        if tag.len() > TAG_LEN {
            return Err(Error::Config(format!("tag {tag:?} exceeds {TAG_LEN} bytes")));
        }
        let dim = |v: usize| {
            u32::try_from(v).map_err(|_| Error::Config(format!("axis length {v} does not fit in u32")))
        };
        Ok(Self {
            n: dim(g.n())?,
            m: dim(g.m())?,
            q_min: g.q.min,
            dq: g.q.step,
            p_min: g.p.min,
            dp: g.p.step,
            hbar: g.hbar,
            tag,
        })
    }

    pub fn to_bytes(&self) -> [u8; QPSF_HEADER_LEN] {
        let mut b = [0u8; QPSF_HEADER_LEN];
        b[..8].copy_from_slice(QPSF_MAGIC);
        b[8..12].copy_from_slice(&QPSF_ENDIAN_MARKER.to_le_bytes());
        b[12..16].copy_from_slice(&self.n.to_le_bytes());
        b[16..20].copy_from_slice(&self.m.to_le_bytes());
        for (k, v) in [self.q_min, self.dq, self.p_min, self.dp, self.hbar].iter().enumerate() {
            b[20 + 8 * k..28 + 8 * k].copy_from_slice(&v.to_le_bytes());
        }
        b[60..60 + self.tag.len()].copy_from_slice(self.tag.as_bytes());
        b
    }

    pub fn from_bytes(b: &[u8; QPSF_HEADER_LEN]) -> Result<Self> {
        if &b[..8] != QPSF_MAGIC {
            return Err(Error::Format("not a QPSF file (bad magic)".into()));
        }
        let u32_at = |o: usize| u32::from_le_bytes(b[o..o + 4].try_into().unwrap());
        let f64_at = |o: usize| f64::from_le_bytes(b[o..o + 8].try_into().unwrap());
        if u32_at(8) != QPSF_ENDIAN_MARKER {
            return Err(Error::Format(format!("bad endianness marker {:#010x}", u32_at(8))));
        }
        let raw = &b[60..];
        let end = raw.iter().position(|&c| c == 0).unwrap_or(TAG_LEN);
        if raw[end..].iter().any(|&c| c != 0) {
            return Err(Error::Format("tag is not null-padded".into()));
        }
        let tag = std::str::from_utf8(&raw[..end])
            .map_err(|_| Error::Format("tag is not UTF-8".into()))?
            .to_string();
        Ok(Self {
            n: u32_at(12),
            m: u32_at(16),
            q_min: f64_at(20),
            dq: f64_at(28),
            p_min: f64_at(36),
            dp: f64_at(44),
            hbar: f64_at(52),
            tag,
        })
    }
}

/// Header followed by `n*m` interleaved `(re, im)` pairs, q-major.
pub fn write_qpsf<W: Write>(field: &PhaseField, mut w: W) -> Result<()> {
    let h = GridFileHeader::of(field)?;
    w.write_all(&h.to_bytes())?;
    let mut buf = Vec::with_capacity(field.values.len() * 16);
    for v in &field.values {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    w.flush()?;
    Ok(())
}

pub fn read_qpsf<R: Read>(mut r: R) -> Result<PhaseField> {
    let mut hb = [0u8; QPSF_HEADER_LEN];
    r.read_exact(&mut hb)
        .map_err(|_| Error::Format("file shorter than the QPSF header".into()))?;
    let h = GridFileHeader::from_bytes(&hb)?;
    let (plane, kind) = parse_tag(&h.tag)?;
    let grid = PhaseGrid {
        q: Axis::new(h.q_min, h.dq, h.n as usize),
        p: Axis::new(h.p_min, h.dp, h.m as usize),
        hbar: h.hbar,
        plane,
    };
    if h.n == 0 || h.m == 0 || !(h.dq > 0.0) || !(h.dp > 0.0) || !(h.hbar > 0.0) {
        return Err(Error::Format("QPSF header describes an invalid grid".into()));
    }
    let len = (h.n as usize)
        .checked_mul(h.m as usize)
        .and_then(|c| c.checked_mul(16))
        .ok_or_else(|| Error::Format("payload size overflows".into()))?;
    let mut payload = Vec::new();
    r.read_to_end(&mut payload)?;
    if payload.len() != len {
        return Err(Error::Format(format!(
            "payload has {} bytes, header implies {len}",
            payload.len()
        )));
    }
    let values = payload
        .chunks_exact(16)
        .map(|c| {
            C64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    PhaseField::new(grid, values, kind)
}

pub fn save_qpsf(field: &PhaseField, path: impl AsRef<Path>) -> Result<()> {
    write_qpsf(field, BufWriter::new(File::create(path)?))
}

pub fn load_qpsf(path: impl AsRef<Path>) -> Result<PhaseField> {
    read_qpsf(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{DistKind, Plane};

    fn field() -> PhaseField {
        let grid = PhaseGrid {
            q: Axis::new(-1.5, 0.25, 5),
            p: Axis::new(-0.3, 0.1, 3),
            hbar: 0.5,
            plane: Plane::PositionMomentum,
        };
        let values = (0..15).map(|k| C64::new((k as f64).sin() / 3.0, -1e-300 * k as f64)).collect();
        PhaseField::new(grid, values, DistKind::SigmaKr(0.25)).unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let f = field();
        let mut bytes = Vec::new();
        write_qpsf(&f, &mut bytes).unwrap();
        assert_eq!(bytes.len(), QPSF_HEADER_LEN + 15 * 16);
        assert_eq!(&bytes[8..12], &[4, 3, 2, 1]);
        let back = read_qpsf(bytes.as_slice()).unwrap();
        assert_eq!(back.kind, f.kind);
        assert_eq!(back.grid, f.grid);
        for (a, b) in back.values.iter().zip(&f.values) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn rejects_corruption() {
        let f = field();
        let mut bytes = Vec::new();
        write_qpsf(&f, &mut bytes).unwrap();
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(read_qpsf(bad.as_slice()), Err(Error::Format(_))));
        let mut bad = bytes.clone();
        bad[8..12].copy_from_slice(&QPSF_ENDIAN_MARKER.to_be_bytes());
        assert!(matches!(read_qpsf(bad.as_slice()), Err(Error::Format(_))));
        assert!(matches!(read_qpsf(&bytes[..bytes.len() - 1]), Err(Error::Format(_))));
        let mut long = bytes.clone();
        long.push(0);
        assert!(matches!(read_qpsf(long.as_slice()), Err(Error::Format(_))));
        assert!(read_qpsf(&bytes[..40]).is_err());
    }

    #[test]
    fn long_tags_are_refused() {
        let mut f = field();
        f.kind = DistKind::SigmaKr(0.123456789);
        assert!(write_qpsf(&f, Vec::new()).is_err());
    }
}
