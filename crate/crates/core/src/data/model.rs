//! Model file: the trained head as a binary section.
//!
//! ```text
//! "HEAD"  version:u8  n:u32  l:u32  W: n*l f64 row-major  b: n f64
//! ```
//! All values little-endian.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::head::HeadParams;

pub const HEAD_MAGIC: &[u8; 4] = b"HEAD";
pub const HEAD_VERSION: u8 = 1;
const HEADER_LEN: usize = 4 + 1 + 4 + 4;

pub fn write_model(path: impl AsRef<Path>, params: &HeadParams) -> Result<()> {
    let mut buf = Vec::new();
    write_model_to(&mut buf, params)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn write_model_to(buf: &mut Vec<u8>, params: &HeadParams) -> Result<()> {
    let n = u32::try_from(params.n_classes())
        .map_err(|_| Error::InvalidArgument("n exceeds u32".into()))?;
    let l =
        u32::try_from(params.dim()).map_err(|_| Error::InvalidArgument("l exceeds u32".into()))?;
    buf.extend_from_slice(HEAD_MAGIC);
    buf.push(HEAD_VERSION);
    buf.extend_from_slice(&n.to_le_bytes());
    buf.extend_from_slice(&l.to_le_bytes());
    for v in params.as_flat() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    Ok(())
}

pub fn read_model(path: impl AsRef<Path>) -> Result<HeadParams> {
    read_model_from(&fs::read(path)?)
}

pub fn read_model_from(bytes: &[u8]) -> Result<HeadParams> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Truncated {
            what: "model header",
            expected: HEADER_LEN,
            found: bytes.len(),
        });
    }
    if &bytes[..4] != HEAD_MAGIC {
        return Err(Error::BadMagic {
            expected: String::from_utf8_lossy(HEAD_MAGIC).into_owned(),
            found: String::from_utf8_lossy(&bytes[..4]).into_owned(),
        });
    }
    if bytes[4] != HEAD_VERSION {
        return Err(Error::UnsupportedVersion(bytes[4]));
    }
    let n = u32::from_le_bytes(bytes[5..9].try_into().unwrap()) as usize;
    let l = u32::from_le_bytes(bytes[9..13].try_into().unwrap()) as usize;
    let k = n
        .checked_mul(l)
        .and_then(|v| v.checked_add(n))
        .ok_or_else(|| Error::InvalidArgument("model size overflows".into()))?;
    let body = &bytes[HEADER_LEN..];
    if body.len() < k * 8 {
        return Err(Error::Truncated {
            what: "model parameters",
            expected: k * 8,
            found: body.len(),
        });
    }
    if body.len() > k * 8 {
        return Err(Error::InvalidArgument(format!(
            "{} trailing bytes after model",
            body.len() - k * 8
        )));
    }
    let theta = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    HeadParams::from_flat(n, l, theta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let p = HeadParams::from_parts(
            2,
            3,
            vec![0.1, -0.2, 1e-300, 4.0, 5.5, -6.0],
            vec![0.7, -0.8],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_model_to(&mut buf, &p).unwrap();
        assert_eq!(&buf[..5], b"HEAD\x01");
        assert_eq!(buf.len(), 13 + 8 * 8);
        assert_eq!(read_model_from(&buf).unwrap(), p);
    }

    #[test]
    fn corrupt_models() {
        let p = HeadParams::zeros(2, 2).unwrap();
        let mut buf = Vec::new();
        write_model_to(&mut buf, &p).unwrap();
        assert!(matches!(
            read_model_from(&buf[..buf.len() - 3]),
            Err(Error::Truncated { .. })
        ));
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_model_from(&bad), Err(Error::BadMagic { .. })));
        let mut nan = buf.clone();
        nan[13..21].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(read_model_from(&nan).is_err());
    }
}
