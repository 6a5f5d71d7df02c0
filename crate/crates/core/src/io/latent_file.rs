//! The `COGL` latent file.
//!
//! Layout (little-endian throughout, 28-byte header):
//!
//! | offset | size | field                                   |
//! |--------|------|-----------------------------------------|
//! | 0      | 4    | magic `b"COGL"`                         |
//! | 4      | 2    | version, `u16` = 1                      |
//! | 6      | 1    | dtype, `u8`: 1 = `f64`, 2 = `f32`       |
//! | 7      | 1    | flags, `u8` = 0                         |
//! | 8      | 8    | dim D, `u64`                            |
//! | 16     | 8    | count N, `u64`                          |
//! | 24     | 4    | reserved, `u32` = 0                     |
//! | 28     | ...  | N * D values, latent-major              |
//!
//! The payload must be exactly `N * D * size_of(dtype)` bytes.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::latent::Latent;

pub const MAGIC: [u8; 4] = *b"COGL";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dtype {
    F64 = 1,
    F32 = 2,
}

impl Dtype {
    pub fn from_byte(b: u8) -> Result<Self> {
        match b {
            1 => Ok(Dtype::F64),
            2 => Ok(Dtype::F32),
            other => Err(Error::BadDtype(other)),
        }
    }

    pub fn size(self) -> usize {
        match self {
            Dtype::F64 => 8,
            Dtype::F32 => 4,
        }
    }
}

/// Serializes latents of a common dimension.
pub fn encode_latents(latents: &[Latent], dtype: Dtype) -> Result<Vec<u8>> {
    let Some(first) = latents.first() else {
        return Err(Error::invalid(
            "latents",
            "cannot write an empty latent list",
        ));
    };
    let dim = first.dim();
    let mut out = Vec::with_capacity(HEADER_LEN + latents.len() * dim * dtype.size());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(dtype as u8);
    out.push(0);
    out.extend_from_slice(&(dim as u64).to_le_bytes());
    out.extend_from_slice(&(latents.len() as u64).to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    for x in latents {
        crate::error::check_dim(dim, x.dim())?;
        for (i, &v) in x.as_slice().iter().enumerate() {
            match dtype {
                Dtype::F64 => out.extend_from_slice(&v.to_le_bytes()),
                Dtype::F32 => {
                    let narrow = v as f32;
                    if !narrow.is_finite() {
                        return Err(Error::NonFinite { index: i });
                    }
                    out.extend_from_slice(&narrow.to_le_bytes());
                }
            }
        }
    }
    Ok(out)
}

/// Parses a whole `COGL` file image.
pub fn decode_latents(bytes: &[u8]) -> Result<Vec<Latent>> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::LengthMismatch {
            expected: HEADER_LEN as u64,
            found: bytes.len() as u64,
        });
    }
    let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
    if magic != MAGIC {
        return Err(Error::BadMagic { found: magic });
    }
    let version = u16::from_le_bytes(bytes[4..6].try_into().unwrap());
    if version != VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let dtype = Dtype::from_byte(bytes[6])?;
    if bytes[7] != 0 {
        return Err(Error::BadHeader {
            field: "flags",
            value: bytes[7] as u64,
        });
    }
    let dim = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
    let count = u64::from_le_bytes(bytes[16..24].try_into().unwrap());
    let reserved = u32::from_le_bytes(bytes[24..28].try_into().unwrap());
    if reserved != 0 {
        return Err(Error::BadHeader {
            field: "reserved",
            value: reserved as u64,
        });
    }
    if dim == 0 {
        return Err(Error::BadHeader {
            field: "dim",
            value: 0,
        });
    }
    let expected = dim
        .checked_mul(count)
        .and_then(|n| n.checked_mul(dtype.size() as u64))
        .ok_or(Error::DimensionOverflow { dim, count })?;
    let payload = &bytes[HEADER_LEN..];
    if payload.len() as u64 != expected {
        return Err(Error::LengthMismatch {
            expected,
            found: payload.len() as u64,
        });
    }
    let dim = dim as usize;
    let values: Vec<f64> = match dtype {
        Dtype::F64 => payload
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect(),
        Dtype::F32 => payload
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
            .collect(),
    };
    values
        .chunks_exact(dim)
        .map(|c| Latent::new(c.to_vec()))
        .collect()
}

pub fn write_latents(path: impl AsRef<Path>, latents: &[Latent], dtype: Dtype) -> Result<()> {
    fs::write(path, encode_latents(latents, dtype)?)?;
    Ok(())
}

pub fn read_latents(path: impl AsRef<Path>) -> Result<Vec<Latent>> {
    decode_latents(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(v: &[f64]) -> Latent {
        Latent::new(v.to_vec()).unwrap()
    }

    #[test]
    fn size_from_layout() {
        let bytes =
            encode_latents(&[lat(&[1.0, 2.0, 3.0]), lat(&[4.0, 5.0, 6.0])], Dtype::F64).unwrap();
        assert_eq!(bytes.len(), 28 + 48);
        assert_eq!(&bytes[..8], b"COGL\x01\x00\x01\x00");
        assert_eq!(&bytes[8..16], &3u64.to_le_bytes());
        assert_eq!(&bytes[16..24], &2u64.to_le_bytes());
        assert_eq!(&bytes[28..36], &1.0f64.to_le_bytes());
    }

    #[test]
    fn f32_rounds_to_nearest() {
        let x = lat(&[0.1, 1.0 / 3.0, -7.25]);
        let back =
            decode_latents(&encode_latents(std::slice::from_ref(&x), Dtype::F32).unwrap()).unwrap();
        for (a, b) in back[0].as_slice().iter().zip(x.as_slice()) {
            assert_eq!(*a, (*b as f32) as f64);
        }
        assert!(encode_latents(&[lat(&[1e300])], Dtype::F32).is_err());
    }

    #[test]
    fn bad_magic() {
        let mut bytes = encode_latents(&[lat(&[1.0])], Dtype::F64).unwrap();
        bytes[0] = b'X';
        assert!(matches!(
            decode_latents(&bytes),
            Err(Error::BadMagic { .. })
        ));
    }

    #[test]
    fn bad_version_and_flags() {
        let good = encode_latents(&[lat(&[1.0])], Dtype::F64).unwrap();
        let mut b = good.clone();
        b[4] = 2;
        assert!(matches!(
            decode_latents(&b),
            Err(Error::UnsupportedVersion(2))
        ));
        let mut b = good.clone();
        b[7] = 1;
        assert!(matches!(
            decode_latents(&b),
            Err(Error::BadHeader { field: "flags", .. })
        ));
        let mut b = good;
        b[25] = 1;
        assert!(matches!(
            decode_latents(&b),
            Err(Error::BadHeader {
                field: "reserved",
                ..
            })
        ));
    }

    #[test]
    fn truncated_and_trailing() {
        let good = encode_latents(&[lat(&[1.0, 2.0])], Dtype::F64).unwrap();
        assert!(matches!(
            decode_latents(&good[..good.len() - 1]),
            Err(Error::LengthMismatch { .. })
        ));
        let mut long = good.clone();
        long.push(0);
        assert!(matches!(
            decode_latents(&long),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            decode_latents(&good[..10]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn overflowing_header() {
        let mut b = encode_latents(&[lat(&[1.0])], Dtype::F64).unwrap();
        b[8..16].copy_from_slice(&u64::MAX.to_le_bytes());
        b[16..24].copy_from_slice(&2u64.to_le_bytes());
        assert!(matches!(
            decode_latents(&b),
            Err(Error::DimensionOverflow { .. })
        ));
    }

    #[test]
    fn non_finite_payload_rejected() {
        let mut b = encode_latents(&[lat(&[1.0])], Dtype::F64).unwrap();
        b[28..36].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(matches!(decode_latents(&b), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn mixed_dimensions_rejected() {
        assert!(encode_latents(&[lat(&[1.0]), lat(&[1.0, 2.0])], Dtype::F64).is_err());
        assert!(encode_latents(&[], Dtype::F64).is_err());
    }
}
