//! FVEC: labelled feature vectors in one little-endian binary file.
//!
//! ```text
//! "FVEC"  version:u8  dim:u32  count:u32
//! payload     count * dim f32, row-major
//! labels      count i32   (1..=n class index, 0 for category-1 objects)
//! provenance  count u8    (0 accepted, 1 legacy-rejected, 2 non-euro)
//! ```

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::Dataset;
use crate::error::{Error, Result};
use crate::types::{FeatureVector, LabeledSample, Provenance, SampleLabel};

pub const FVEC_MAGIC: &[u8; 4] = b"FVEC";
pub const FVEC_VERSION: u8 = 1;
const HEADER_LEN: usize = 4 + 1 + 4 + 4;

pub fn write_fvec(path: impl AsRef<Path>, samples: &[LabeledSample]) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    write_fvec_to(&mut w, samples)?;
    w.flush()?;
    Ok(())
}

pub fn write_fvec_to<W: Write>(w: &mut W, samples: &[LabeledSample]) -> Result<()> {
    let dim = samples
        .first()
        .ok_or(Error::Empty("samples"))?
        .features()
        .dim();
    for s in samples {
        if s.features().dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: s.features().dim(),
            });
        }
    }
    let dim32 =
        u32::try_from(dim).map_err(|_| Error::InvalidArgument("dimension exceeds u32".into()))?;
    let count = u32::try_from(samples.len())
        .map_err(|_| Error::InvalidArgument("too many samples".into()))?;

    w.write_all(FVEC_MAGIC)?;
    w.write_all(&[FVEC_VERSION])?;
    w.write_all(&dim32.to_le_bytes())?;
    w.write_all(&count.to_le_bytes())?;
    for s in samples {
        for &v in s.features().values() {
            w.write_all(&(v as f32).to_le_bytes())?;
        }
    }
    for s in samples {
        let label = match s.label() {
            SampleLabel::Class(c) => i32::try_from(c)
                .map_err(|_| Error::InvalidArgument(format!("class index {c} exceeds i32")))?,
            SampleLabel::Cat1 => 0,
        };
        w.write_all(&label.to_le_bytes())?;
    }
    for s in samples {
        w.write_all(&[s.provenance().to_u8()])?;
    }
    Ok(())
}

/// Reads and validates an FVEC file; labels must lie in `0..=n_classes`.
pub fn read_fvec(path: impl AsRef<Path>, n_classes: usize) -> Result<Dataset> {
    read_fvec_from(&fs::read(path)?, n_classes)
}

pub fn read_fvec_from(bytes: &[u8], n_classes: usize) -> Result<Dataset> {
    if bytes.len() < 4 {
        return Err(Error::Truncated {
            what: "header",
            expected: HEADER_LEN,
            found: bytes.len(),
        });
    }
    if &bytes[..4] != FVEC_MAGIC {
        return Err(Error::BadMagic {
            expected: String::from_utf8_lossy(FVEC_MAGIC).into_owned(),
            found: String::from_utf8_lossy(&bytes[..4]).into_owned(),
        });
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::Truncated {
            what: "header",
            expected: HEADER_LEN,
            found: bytes.len(),
        });
    }
    if bytes[4] != FVEC_VERSION {
        return Err(Error::UnsupportedVersion(bytes[4]));
    }
    let dim = u32::from_le_bytes(bytes[5..9].try_into().unwrap()) as usize;
    let count = u32::from_le_bytes(bytes[9..13].try_into().unwrap()) as usize;
    if dim == 0 {
        return Err(Error::InvalidArgument("FVEC dimension is zero".into()));
    }

    let payload_len = count
        .checked_mul(dim)
        .and_then(|v| v.checked_mul(4))
        .ok_or_else(|| Error::InvalidArgument("FVEC size overflows".into()))?;
    let sections = [
        ("payload", payload_len),
        ("labels", count * 4),
        ("provenance", count),
    ];
    let mut offset = HEADER_LEN;
    let mut ranges = Vec::with_capacity(3);
    for (what, len) in sections {
        let end = offset + len;
        if bytes.len() < end {
            return Err(Error::Truncated {
                what,
                expected: len,
                found: bytes.len() - offset,
            });
        }
        ranges.push(offset..end);
        offset = end;
    }
    if bytes.len() != offset {
        return Err(Error::InvalidArgument(format!(
            "{} trailing bytes after FVEC provenance block",
            bytes.len() - offset
        )));
    }

    let payload = &bytes[ranges[0].clone()];
    let labels = &bytes[ranges[1].clone()];
    let provenance = &bytes[ranges[2].clone()];

    let mut samples = Vec::with_capacity(count);
    for record in 0..count {
        let row = &payload[record * dim * 4..(record + 1) * dim * 4];
        let values: Vec<f64> = row
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
            .collect();
        let features = FeatureVector::new(values).map_err(|_| Error::InvalidRecord {
            record,
            reason: "non-finite feature value".into(),
        })?;

        let raw = i32::from_le_bytes(labels[record * 4..record * 4 + 4].try_into().unwrap());
        if raw < 0 || raw as usize > n_classes {
            return Err(Error::LabelOutOfRange {
                record,
                label: raw as i64,
                n_classes,
            });
        }
        let label = if raw == 0 {
            SampleLabel::Cat1
        } else {
            SampleLabel::Class(raw as usize)
        };
        let prov = Provenance::from_u8(provenance[record]).ok_or_else(|| Error::InvalidRecord {
            record,
            reason: format!("unknown provenance tag {}", provenance[record]),
        })?;
        let sample =
            LabeledSample::new(features, label, prov).map_err(|e| Error::InvalidRecord {
                record,
                reason: e.to_string(),
            })?;
        samples.push(sample);
    }
    Ok(Dataset {
        n_classes,
        dim,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples() -> Vec<LabeledSample> {
        let f = |v: [f64; 4]| FeatureVector::new(v.to_vec()).unwrap();
        vec![
            LabeledSample::genuine(f([0.1, -2.5, 3.0, 1e-3]), 1).unwrap(),
            LabeledSample::new(
                f([1.0, 2.0, 3.0, 4.0]),
                SampleLabel::Class(3),
                Provenance::LegacyRejectedGenuine,
            )
            .unwrap(),
            LabeledSample::new(
                f([0.0, 0.0, -1.0, 7.25]),
                SampleLabel::Cat1,
                Provenance::NonEuroCat1,
            )
            .unwrap(),
        ]
    }

    fn encode(s: &[LabeledSample]) -> Vec<u8> {
        let mut buf = Vec::new();
        write_fvec_to(&mut buf, s).unwrap();
        buf
    }

    #[test]
    fn round_trip_at_f32_precision() {
        let s = samples();
        let bytes = encode(&s);
        assert_eq!(bytes.len(), HEADER_LEN + 3 * 4 * 4 + 3 * 4 + 3);
        let d = read_fvec_from(&bytes, 3).unwrap();
        assert_eq!(d.dim, 4);
        for (a, b) in s.iter().zip(&d.samples) {
            assert_eq!(a.label(), b.label());
            assert_eq!(a.provenance(), b.provenance());
            for (x, y) in a.features().values().iter().zip(b.features().values()) {
                assert_eq!(*x as f32 as f64, *y);
            }
        }
    }

    #[test]
    fn header_layout() {
        let bytes = encode(&samples());
        assert_eq!(&bytes[..4], b"FVEC");
        assert_eq!(bytes[4], 1);
        assert_eq!(&bytes[5..9], &4u32.to_le_bytes());
        assert_eq!(&bytes[9..13], &3u32.to_le_bytes());
        assert_eq!(&bytes[13..17], &0.1f32.to_le_bytes());
    }

    #[test]
    fn bad_magic() {
        let mut bytes = encode(&samples());
        bytes[3] = b'X';
        let err = read_fvec_from(&bytes, 3).unwrap_err();
        assert!(matches!(err, Error::BadMagic { .. }));
        assert!(err.to_string().contains("bad magic"));
    }

    #[test]
    fn truncated_payload() {
        let s: Vec<_> = std::iter::repeat_n(samples()[0].clone(), 10).collect();
        let bytes = encode(&s);
        // Keep the header claiming 10 records but only 9 rows of payload.
        let cut = &bytes[..HEADER_LEN + 9 * 4 * 4];
        let err = read_fvec_from(cut, 3).unwrap_err();
        assert!(
            matches!(
                err,
                Error::Truncated {
                    what: "payload",
                    ..
                }
            ),
            "{err}"
        );
        assert!(err.to_string().contains("truncated"));
        assert!(matches!(
            read_fvec_from(&bytes[..8], 3),
            Err(Error::Truncated { what: "header", .. })
        ));
        assert!(matches!(
            read_fvec_from(&bytes[..bytes.len() - 1], 3),
            Err(Error::Truncated { .. })
        ));
    }

    #[test]
    fn label_out_of_range() {
        let bytes = encode(&samples());
        let err = read_fvec_from(&bytes, 2).unwrap_err();
        assert!(
            matches!(
                err,
                Error::LabelOutOfRange {
                    record: 1,
                    label: 3,
                    n_classes: 2
                }
            ),
            "{err}"
        );
        let mut neg = bytes.clone();
        let at = HEADER_LEN + 3 * 16;
        neg[at..at + 4].copy_from_slice(&(-1i32).to_le_bytes());
        assert!(matches!(
            read_fvec_from(&neg, 3),
            Err(Error::LabelOutOfRange { label: -1, .. })
        ));
    }

    #[test]
    fn non_finite_and_bad_tags() {
        let mut bytes = encode(&samples());
        bytes[HEADER_LEN..HEADER_LEN + 4].copy_from_slice(&f32::NAN.to_le_bytes());
        assert!(matches!(
            read_fvec_from(&bytes, 3),
            Err(Error::InvalidRecord { record: 0, .. })
        ));

        let mut bytes = encode(&samples());
        let last = bytes.len() - 1;
        bytes[last] = 9;
        assert!(matches!(
            read_fvec_from(&bytes, 3),
            Err(Error::InvalidRecord { record: 2, .. })
        ));

        // A class label paired with the non-euro tag.
        let mut bytes = encode(&samples());
        bytes[last] = 2;
        bytes[last - 1] = 2;
        assert!(matches!(
            read_fvec_from(&bytes, 3),
            Err(Error::InvalidRecord { record: 1, .. })
        ));
    }

    #[test]
    fn version_and_trailing_bytes() {
        let mut bytes = encode(&samples());
        bytes[4] = 2;
        assert!(matches!(
            read_fvec_from(&bytes, 3),
            Err(Error::UnsupportedVersion(2))
        ));
        let mut bytes = encode(&samples());
        bytes.push(0);
        assert!(read_fvec_from(&bytes, 3).is_err());
    }

    #[test]
    fn writer_rejects_mixed_dims_and_empty() {
        let mut s = samples();
        s.push(LabeledSample::genuine(FeatureVector::new(vec![1.0]).unwrap(), 1).unwrap());
        assert!(write_fvec_to(&mut Vec::new(), &s).is_err());
        assert!(write_fvec_to(&mut Vec::new(), &[]).is_err());
    }
}
