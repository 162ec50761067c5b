//! Minimum-genus embeddings of Cartesian products of `K_{2r,2r}`, even cycles
//! and even paths, built from handle surgery on quadrilateral faces and
//! certified against the Euler lower bound.

pub mod constructions;
pub mod embedding;
pub mod error;
pub mod family;
pub mod formulas;
pub mod graph;
pub mod oracle;
pub mod surgery;

pub use constructions::{ConstructionResult, Constructor};
pub use embedding::{
    euler_genus, genus_lower_bound, trace_faces, validate, Dart, Embedding, EmbeddingCertificate,
    Face, FaceSet, Violation,
};
pub use error::{Error, Result};
pub use family::{build_family, parse_family_expr, Atom, ConstructionShape, FamilyExpr};
pub use graph::{cartesian_product, is_bipartite, Graph, Label, VertexId};
pub use oracle::{OracleResult, SearchBudget};
pub use surgery::{FaceFamily, FaceReservoir, HandleKind, HandleRecord, Pairing, QuadFace};
