//! Binary checkpoint layout (all integers and floats little-endian):
//!
//! ```text
//! magic            8 bytes  "SFNETMLP"
//! version          u32
//! layer count L    u32
//! layer sizes      L x u32
//! hidden act tag   u8       (1 = ReLU)
//! output act tag   u8       (1 = softmax)
//! per layer k:     weights (out x in, row-major f64), then biases (out x f64)
//! ```

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use ndarray::{Array1, Array2};

use super::{MlpError, MlpModel};

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"SFNETMLP";
pub const CHECKPOINT_VERSION: u32 = 1;

const RELU_TAG: u8 = 1;
const SOFTMAX_TAG: u8 = 1;

pub fn write_model<W: Write>(model: &MlpModel, w: &mut W) -> Result<(), MlpError> {
    let sizes = model.layer_sizes();
    let mut buf = Vec::with_capacity(16 + 4 * sizes.len() + 8 * model.parameter_count());
    buf.extend_from_slice(CHECKPOINT_MAGIC);
    buf.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(sizes.len() as u32).to_le_bytes());
    for &d in sizes {
        let d = u32::try_from(d).map_err(|_| MlpError::ShapeMismatch("layer size exceeds u32".into()))?;
        buf.extend_from_slice(&d.to_le_bytes());
    }
    buf.push(RELU_TAG);
    buf.push(SOFTMAX_TAG);
    for (wk, bk) in model.weights().iter().zip(model.biases()) {
        for v in wk.iter().chain(bk.iter()) {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_model<R: Read>(r: &mut R) -> Result<MlpModel, MlpError> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    parse(&bytes)
}

pub fn save_model(model: &MlpModel, path: impl AsRef<Path>) -> Result<(), MlpError> {
    let mut buf = Vec::new();
    write_model(model, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<MlpModel, MlpError> {
    parse(&fs::read(path)?)
}

struct Cursor<'a> {
    bytes: &'a [u8],
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], MlpError> {
        if self.bytes.len() < n {
            return Err(MlpError::CorruptCheckpoint("truncated".into()));
        }
        let (head, tail) = self.bytes.split_at(n);
        self.bytes = tail;
        Ok(head)
    }

    fn u32(&mut self) -> Result<u32, MlpError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u8(&mut self) -> Result<u8, MlpError> {
        Ok(self.take(1)?[0])
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>, MlpError> {
        let raw = self.take(n.checked_mul(8).ok_or_else(|| MlpError::CorruptCheckpoint("size overflow".into()))?)?;
        Ok(raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect())
    }
}

fn parse(bytes: &[u8]) -> Result<MlpModel, MlpError> {
    let mut c = Cursor { bytes };
    if c.take(8).map_err(|_| MlpError::CorruptCheckpoint("missing magic".into()))? != CHECKPOINT_MAGIC {
        return Err(MlpError::CorruptCheckpoint("bad magic".into()));
    }
    let version = c.u32()?;
    if version != CHECKPOINT_VERSION {
        return Err(MlpError::VersionMismatch {
            found: version,
            expected: CHECKPOINT_VERSION,
        });
    }
    let layers = c.u32()? as usize;
    if layers < 2 {
        return Err(MlpError::CorruptCheckpoint(format!("{layers} layers")));
    }
    let sizes = (0..layers)
        .map(|_| c.u32().map(|d| d as usize))
        .collect::<Result<Vec<_>, _>>()?;
    if sizes.contains(&0) {
        return Err(MlpError::CorruptCheckpoint("zero-width layer".into()));
    }
    if c.u8()? != RELU_TAG || c.u8()? != SOFTMAX_TAG {
        return Err(MlpError::CorruptCheckpoint("unknown activation tag".into()));
    }
    let expected: usize = sizes.windows(2).map(|w| w[1] * (w[0] + 1)).sum();
    if c.bytes.len() != expected * 8 {
        return Err(MlpError::CorruptCheckpoint(format!(
            "expected {} parameter bytes, found {}",
            expected * 8,
            c.bytes.len()
        )));
    }
    let mut weights = Vec::with_capacity(layers - 1);
    let mut biases = Vec::with_capacity(layers - 1);
    for w in sizes.windows(2) {
        let wk = Array2::from_shape_vec((w[1], w[0]), c.f64s(w[0] * w[1])?)
            .map_err(|e| MlpError::CorruptCheckpoint(e.to_string()))?;
        weights.push(wk);
        biases.push(Array1::from(c.f64s(w[1])?));
    }
    Ok(MlpModel::from_parts(sizes, weights, biases))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn encoded(model: &MlpModel) -> Vec<u8> {
        let mut buf = Vec::new();
        write_model(model, &mut buf).unwrap();
        buf
    }

    #[test]
    fn round_trip_is_exact() {
        let m = MlpModel::new(&[6, 5, 4, 3], 17);
        let back = read_model(&mut encoded(&m).as_slice()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn truncated_checkpoint() {
        let bytes = encoded(&MlpModel::new(&[4, 3, 2], 1));
        for cut in [0, 5, 12, 20, bytes.len() - 1] {
            assert!(
                matches!(parse(&bytes[..cut]), Err(MlpError::CorruptCheckpoint(_))),
                "cut at {cut}"
            );
        }
    }

    #[test]
    fn wrong_magic_and_version() {
        let mut bytes = encoded(&MlpModel::new(&[4, 3, 2], 1));
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(parse(&bad), Err(MlpError::CorruptCheckpoint(_))));
        bytes[8] = 9;
        assert!(matches!(
            parse(&bytes),
            Err(MlpError::VersionMismatch { found: 9, .. })
        ));
    }
}
