//! The two-coloured bipartite graph of a CDS instance.
//!
//! Nodes are Alice's signals `A1..AX` and Bob's signals `B1..BY`. A qualified
//! edge `{Ax, By}` means the secret must be decodable from that pair, an
//! unqualified edge means the pair must learn nothing about it.

mod components;
mod cover;
mod instance;
mod iso;
mod random;

pub use components::{qualified_components, QualifiedComponent, Shape};
pub use cover::{
    internal_qualified_edge_candidates, min_connected_edge_cover, min_connected_edge_cover_with,
    rho, rho_with, Candidate, CoverOptions, CoverResult, CoverWitness, Rho, RhoReport,
};
pub use instance::{CdsInstance, Edge, EdgeKind, NodeId, Side};
pub use iso::isomorphic;
pub use random::{random_instance, RandomShape};
