//! Conditional disclosure of secrets (CDS) over two-coloured bipartite graphs.
//!
//! An instance is a bipartite graph between Alice's signals `A1..AX` and
//! Bob's signals `B1..BY`; qualified edges are input pairs where the secret
//! must be decodable, unqualified edges are pairs that must learn nothing.
//! The crate computes the covering parameter rho, the linear converse bound
//! `(rho-1)/(2 rho)`, synthesises rate-optimal vector linear schemes when
//! every qualified component is a path or a cycle, and checks arbitrary
//! linear schemes both algebraically and by exhaustive enumeration.

pub mod bounds;
pub mod catalog;
pub mod error;
pub mod ff;
pub mod graph;
pub mod rational;
pub mod scheme;
pub mod search;
pub mod synth;

pub use error::{Error, Result};
