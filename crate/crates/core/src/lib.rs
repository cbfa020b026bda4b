//! Exact enumeration and analysis of perfect 1-factorisations of `K_{n,n}`
//! and row-Hamiltonian Latin squares.

pub mod canon;
pub mod error;
pub mod factor;
pub mod families;
pub mod latin;
pub mod order;
pub mod search;
pub mod seeds;

pub use canon::{CanonicalForm, ColourMode, ColouredGraph};
pub use error::{Error, Result};
pub use factor::{OneFactor, Opf, VertexMap};
pub use latin::{Conjugate, InvariantRecord, LatinSquare};
pub use search::{ClassRecord, Enumeration, Screen, SearchStats};
pub use seeds::{Seed, SeedSet};
