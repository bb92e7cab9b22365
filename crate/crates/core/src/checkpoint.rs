//! Binary checkpoint container.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! offset  size  field
//! 0       8     magic  b"KGACKPT\0"
//! 8       4     format version (u32, currently 1)
//! 12      8     header length H in bytes (u64)
//! 20      H     UTF-8 JSON header
//! 20+H    ...   tensor data: every tensor in header order, row-major, f64 LE
//! ```
//!
//! The header records the model kind, dimension, vocabulary sizes, TransE
//! norm, the training config, completed epochs and each tensor's
//! name/owner/shape. Values are stored as raw IEEE-754 bits, so a save/load
//! round trip is bit-exact, NaN payloads included.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kge::{zeroed_params, ModelKind, ModelParams, Norm, Tensor};
use crate::trainer::TrainingConfig;

const MAGIC: &[u8; 8] = b"KGACKPT\0";
const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub params: ModelParams,
    pub config: TrainingConfig,
    pub completed_epochs: usize,
}

#[derive(Serialize, Deserialize)]
struct Header {
    kind: ModelKind,
    dim: usize,
    num_entities: usize,
    num_relations: usize,
    norm: Norm,
    completed_epochs: usize,
    config: TrainingConfig,
    tensors: Vec<Tensor>,
}

impl Checkpoint {
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let p = &self.params;
        let header = Header {
            kind: p.kind,
            dim: p.dim,
            num_entities: p.num_entities,
            num_relations: p.num_relations,
            norm: p.norm,
            completed_epochs: self.completed_epochs,
            config: self.config.clone(),
            tensors: p.tensors.clone(),
        };
        let json = serde_json::to_vec(&header)?;
        let values: usize = p.tensors.iter().map(|t| t.data.len()).sum();
        let mut out = Vec::with_capacity(20 + json.len() + 8 * values);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(json.len() as u64).to_le_bytes());
        out.extend_from_slice(&json);
        for t in &p.tensors {
            for v in &t.data {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Checkpoint> {
        let bad = |m: &str| Error::Checkpoint(m.to_string());
        if bytes.len() < 20 || &bytes[..8] != MAGIC {
            return Err(bad("not a checkpoint file"));
        }
        let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
        if version != VERSION {
            return Err(Error::Checkpoint(format!("unsupported version {version}")));
        }
        let header_len = u64::from_le_bytes(bytes[12..20].try_into().unwrap());
        let header_end = usize::try_from(header_len)
            .ok()
            .and_then(|n| n.checked_add(20))
            .filter(|&end| end <= bytes.len())
            .ok_or_else(|| bad("truncated header"))?;
        let header: Header = serde_json::from_slice(&bytes[20..header_end])?;

        // The layout must be exactly what this model kind would allocate.
        let expected = zeroed_params(header.kind, header.num_entities, header.num_relations, header.dim)
            .map_err(|e| Error::Checkpoint(e.to_string()))?;
        if expected.tensors.len() != header.tensors.len() {
            return Err(bad("tensor count does not match model kind"));
        }
        let mut tensors = Vec::with_capacity(header.tensors.len());
        let mut data = &bytes[header_end..];
        for (spec, want) in header.tensors.into_iter().zip(&expected.tensors) {
            if spec.name != want.name || spec.rows != want.rows || spec.cols != want.cols {
                return Err(Error::Checkpoint(format!("unexpected shape for tensor {}", spec.name)));
            }
            let n = spec.rows * spec.cols;
            if data.len() < 8 * n {
                return Err(bad("truncated tensor data"));
            }
            let (chunk, rest) = data.split_at(8 * n);
            data = rest;
            let values = chunk
                .chunks_exact(8)
                .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
                .collect();
            tensors.push(Tensor { data: values, ..spec });
        }
        if !data.is_empty() {
            return Err(bad("trailing bytes after tensor data"));
        }
        Ok(Checkpoint {
            params: ModelParams {
                kind: header.kind,
                dim: header.dim,
                num_entities: header.num_entities,
                num_relations: header.num_relations,
                norm: header.norm,
                tensors,
            },
            config: header.config,
            completed_epochs: header.completed_epochs,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let bytes = self.to_bytes()?;
        let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(&bytes).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Checkpoint> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Checkpoint::from_bytes(&bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kge::init_params;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sample(kind: ModelKind) -> Checkpoint {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        Checkpoint {
            params: init_params(kind, 5, 2, 8, &mut rng).unwrap(),
            config: TrainingConfig { model: kind, dim: 8, ..TrainingConfig::default() },
            completed_epochs: 4,
        }
    }

    #[test]
    fn round_trip_every_model() {
        for kind in ModelKind::ALL {
            let ck = sample(kind);
            let back = Checkpoint::from_bytes(&ck.to_bytes().unwrap()).unwrap();
            assert_eq!(back, ck, "{kind}");
        }
    }

    #[test]
    fn rejects_damage() {
        let bytes = sample(ModelKind::TransE).to_bytes().unwrap();
        assert!(Checkpoint::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(Checkpoint::from_bytes(&extra).is_err());
        let mut magic = bytes;
        magic[0] = b'X';
        assert!(Checkpoint::from_bytes(&magic).is_err());
    }
}
