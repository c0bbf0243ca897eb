//! Bakry-Emery curvature on finite graphs.
//!
//! The crate computes the normalized Laplacian and the gamma calculus
//! (`Γ`, `Γ₂`, `Γᵢ`) on unweighted graphs, per-vertex girth, the exact
//! pointwise curvature under the curvature-dimension condition `CD(K, n)`, and
//! a seeded falsification search for the exponential variant `CDE(K, n)`.
//! [`verify`] checks the two curvature lower bounds that hold at vertices
//! whose two-ball is a tree (girth at least five).

pub mod cli;
pub mod curvature_cd;
pub mod curvature_cde;
pub mod generators;
pub mod girth;
pub mod graph;
pub mod operators;
pub mod spectra;
pub mod verify;

pub use curvature_cd::{assemble_cd_forms, cd_check, cd_curvature, CdForms, CdResult};
pub use curvature_cde::{cde_check, cde_estimate, cde_ratio, CdeEstimate, CdeSample};
pub use girth::{graph_girth, has_girth_at_least, vertex_girth, GirthValue};
pub use graph::{
    parse_edge_list, serialize_edge_list, BallRadius, Graph, GraphError, LocalBall, Vertex,
    VertexFunction,
};
