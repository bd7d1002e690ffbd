//! Named parameter tensors and the `NNWB` container.
//!
//! Layout (little-endian): magic `NNWB`, `u32` version (1), `u32` tensor
//! count, then per tensor: `u16` name length, UTF-8 name, `u8` rank,
//! `u32 × rank` dims, `f32 × product(dims)` values in row-major order.

use std::collections::BTreeMap;
use std::path::Path;

use super::{ConvnetError, Tensor};

const MAGIC: &[u8; 4] = b"NNWB";
const VERSION: u32 = 1;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightStore {
    tensors: BTreeMap<String, Tensor>,
}

impl WeightStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, tensor: Tensor) -> Option<Tensor> {
        self.tensors.insert(name.into(), tensor)
    }

    pub fn get(&self, name: &str) -> Option<&Tensor> {
        self.tensors.get(name)
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut Tensor> {
        self.tensors.get_mut(name)
    }

    pub fn require(&self, name: &str) -> Result<&Tensor, ConvnetError> {
        self.get(name).ok_or_else(|| ConvnetError::MissingWeight(name.to_string()))
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Tensor)> {
        self.tensors.iter()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.tensors.keys().map(String::as_str)
    }

    /// Serializes to the `NNWB` container. Values are stored as `f32`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(self.tensors.len() as u32).to_le_bytes());
        for (name, t) in &self.tensors {
            out.extend_from_slice(&(name.len() as u16).to_le_bytes());
            out.extend_from_slice(name.as_bytes());
            out.push(t.dims().len() as u8);
            for d in t.dims() {
                out.extend_from_slice(&(*d as u32).to_le_bytes());
            }
            for v in t.values() {
                out.extend_from_slice(&(*v as f32).to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ConvnetError> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4) != Some(MAGIC.as_slice()) {
            return Err(ConvnetError::BadMagic);
        }
        let header = |r: &mut Reader| r.u32().ok_or(ConvnetError::TruncatedHeader);
        let version = header(&mut r)?;
        if version != VERSION {
            return Err(ConvnetError::VersionUnsupported(version));
        }
        let count = header(&mut r)?;
        let mut store = WeightStore::new();
        for index in 0..count {
            let name_len = r.u16().ok_or(ConvnetError::TruncatedHeader)? as usize;
            let name_bytes = r.take(name_len).ok_or(ConvnetError::TruncatedHeader)?;
            let name = String::from_utf8(name_bytes.to_vec())
                .map_err(|_| ConvnetError::InvalidTensor(format!("tensor #{index} has a non UTF-8 name")))?;
            let truncated = || ConvnetError::TruncatedTensor(name.clone());
            let rank = r.take(1).ok_or_else(truncated)?[0] as usize;
            if !(1..=4).contains(&rank) {
                return Err(ConvnetError::InvalidTensor(format!("{name}: rank {rank}")));
            }
            let mut dims = Vec::with_capacity(rank);
            for _ in 0..rank {
                dims.push(r.u32().ok_or_else(truncated)? as usize);
            }
            let n = dims
                .iter()
                .try_fold(1usize, |acc, d| acc.checked_mul(*d))
                .ok_or_else(truncated)?;
            let byte_len = n.checked_mul(4).ok_or_else(truncated)?;
            let raw = r.take(byte_len).ok_or_else(truncated)?;
            let values = raw
                .chunks_exact(4)
                .map(|c| f64::from(f32::from_le_bytes([c[0], c[1], c[2], c[3]])))
                .collect();
            let tensor = Tensor::new(dims, values)
                .map_err(|e| ConvnetError::InvalidTensor(format!("{name}: {e}")))?;
            if store.tensors.contains_key(&name) {
                return Err(ConvnetError::DuplicateName(name));
            }
            store.tensors.insert(name, tensor);
        }
        Ok(store)
    }

    pub fn load(path: &Path) -> Result<Self, ConvnetError> {
        let bytes = std::fs::read(path).map_err(|e| ConvnetError::Io(format!("{}: {e}", path.display())))?;
        Self::from_bytes(&bytes)
    }

    pub fn save(&self, path: &Path) -> Result<(), ConvnetError> {
        std::fs::write(path, self.to_bytes()).map_err(|e| ConvnetError::Io(format!("{}: {e}", path.display())))
    }
}

impl FromIterator<(String, Tensor)> for WeightStore {
    fn from_iter<I: IntoIterator<Item = (String, Tensor)>>(iter: I) -> Self {
        Self {
            tensors: iter.into_iter().collect(),
        }
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Option<&'a [u8]> {
        let end = self.pos.checked_add(n)?;
        let s = self.bytes.get(self.pos..end)?;
        self.pos = end;
        Some(s)
    }

    fn u16(&mut self) -> Option<u16> {
        self.take(2).map(|b| u16::from_le_bytes([b[0], b[1]]))
    }

    fn u32(&mut self) -> Option<u32> {
        self.take(4).map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }
}
