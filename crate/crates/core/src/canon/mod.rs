//! Coloured-graph encodings and canonical forms.

mod engine;
mod graph;

use sha2::{Digest, Sha256};

pub use engine::{canonize, Canonical, SearchCounters};
pub use graph::{
    ColourMode, ColouredGraph, OpfLayout, BLACK, BLUE, GREEN, POSITION_BASE, RED, YELLOW,
};

use crate::factor::Opf;
use crate::latin::LatinSquare;

/// Byte string identifying a coloured graph up to isomorphism.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    bytes: Vec<u8>,
}

impl CanonicalForm {
    pub(crate) fn encode(nv: usize, classes: &[(u32, u32)], bitmap: &[u64]) -> Self {
        let mut bytes = Vec::with_capacity(16 + 8 * classes.len() + 8 * bitmap.len());
        bytes.extend_from_slice(b"CF1");
        bytes.extend_from_slice(&(nv as u32).to_le_bytes());
        bytes.extend_from_slice(&(classes.len() as u32).to_le_bytes());
        for &(c, k) in classes {
            bytes.extend_from_slice(&c.to_le_bytes());
            bytes.extend_from_slice(&k.to_le_bytes());
        }
        for w in bitmap {
            bytes.extend_from_slice(&w.to_le_bytes());
        }
        Self { bytes }
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// SHA-256 of the bytes, lowercase hex.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(&self.bytes))
    }
}

pub fn canonical_form(g: &ColouredGraph) -> CanonicalForm {
    canonize(g).form
}

pub fn automorphism_group_order(g: &ColouredGraph) -> u128 {
    canonize(g).group_order
}

pub fn is_isomorphic(a: &ColouredGraph, b: &ColouredGraph) -> bool {
    a.vertex_count() == b.vertex_count()
        && a.edge_count() == b.edge_count()
        && canonical_form(a) == canonical_form(b)
}

pub fn opf_form(p: &Opf, mode: ColourMode) -> CanonicalForm {
    canonical_form(&ColouredGraph::from_opf(p, mode))
}

pub fn opf_digest(p: &Opf, mode: ColourMode) -> String {
    opf_form(p, mode).digest()
}

pub fn latin_form(l: &LatinSquare, mode: ColourMode) -> CanonicalForm {
    canonical_form(&ColouredGraph::from_latin(l, mode))
}
