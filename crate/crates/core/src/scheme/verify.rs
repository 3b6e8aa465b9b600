use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use super::LinearScheme;
use crate::error::Result;
use crate::ff::rowspace_intersection;
use crate::graph::{CdsInstance, Edge, EdgeKind, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// `H_v` has rank `N`.
    FullRowRank,
    /// Qualified edge: `rank(P_v F_v - P_u F_u) = L`.
    Correctness,
    /// Qualified edge: the noise spaces overlap in at least `L` dimensions.
    NoiseAlignment,
    /// Unqualified edge: `P_v F_v = P_u F_u`.
    SignalAlignment,
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckKind::FullRowRank => "full_row_rank",
            CheckKind::Correctness => "correctness",
            CheckKind::NoiseAlignment => "noise_alignment",
            CheckKind::SignalAlignment => "signal_alignment",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckRecord {
    /// Set for per-node checks.
    pub node: Option<NodeId>,
    /// Set for per-edge checks.
    pub edge: Option<Edge>,
    pub edge_type: Option<EdgeKind>,
    /// Dimension of the intersection of the two noise row spaces.
    pub overlap_dim: Option<usize>,
    pub check: CheckKind,
    pub pass: bool,
    pub detail: String,
}

impl fmt::Display for CheckRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.pass { "pass" } else { "FAIL" };
        match (self.node, self.edge, self.edge_type) {
            (Some(v), _, _) => write!(f, "{status} {} {v}: {}", self.check, self.detail),
            (_, Some(e), Some(k)) => write!(f, "{status} {} {k} {e}: {}", self.check, self.detail),
            _ => write!(f, "{status} {}: {}", self.check, self.detail),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub records: Vec<CheckRecord>,
    pub overall: bool,
}

impl VerificationReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    /// Failing edges, deduplicated, in edge order.
    pub fn failing_edges(&self) -> Vec<Edge> {
        let mut out: Vec<Edge> = self.failures().filter_map(|r| r.edge).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Checks full row rank of every `H_v`, decodability on every qualified edge
/// and signal alignment on every unqualified edge.
pub fn verify_linear(inst: &CdsInstance, scheme: &LinearScheme) -> Result<VerificationReport> {
    scheme.check_shape(inst)?;
    let n = scheme.signal_len();
    let l = scheme.secret_len();
    let mut records = Vec::new();
    for v in inst.nodes() {
        let rank = scheme.nodes[&v].h.rank();
        records.push(CheckRecord {
            node: Some(v),
            edge: None,
            edge_type: None,
            overlap_dim: None,
            check: CheckKind::FullRowRank,
            pass: rank == n,
            detail: format!("rank {rank} of {n}"),
        });
    }

    let mut edges: Vec<(Edge, EdgeKind)> = inst.edges().map(|(k, e)| (e, k)).collect();
    edges.sort_unstable();
    let per_edge: Vec<Result<Vec<CheckRecord>>> = edges
        .par_iter()
        .map(|&(e, kind)| check_edge(scheme, e, kind, l))
        .collect();
    for r in per_edge {
        records.extend(r?);
    }
    let overall = records.iter().all(|r| r.pass);
    Ok(VerificationReport { records, overall })
}

fn check_edge(scheme: &LinearScheme, e: Edge, kind: EdgeKind, l: usize) -> Result<Vec<CheckRecord>> {
    let pv = &scheme.nodes[&e.a()];
    let pu = &scheme.nodes[&e.b()];
    let meet = rowspace_intersection(&pv.h, &pu.h)?;
    let dim = meet.dim();
    let lhs = meet.proj_a.mul(&pv.f)?;
    let rhs = meet.proj_b.mul(&pu.f)?;
    let record = |check, pass, detail| CheckRecord {
        node: None,
        edge: Some(e),
        edge_type: Some(kind),
        overlap_dim: Some(dim),
        check,
        pass,
        detail,
    };
    Ok(match kind {
        EdgeKind::Qualified => {
            let rank = lhs.sub(&rhs)?.rank();
            vec![
                record(
                    CheckKind::Correctness,
                    rank == l,
                    format!("decodable secret dimension {rank} of {l}"),
                ),
                record(
                    CheckKind::NoiseAlignment,
                    dim >= l,
                    format!("noise overlap dimension {dim}, need at least {l}"),
                ),
            ]
        }
        EdgeKind::Unqualified => {
            let bad = (0..dim).find(|&i| lhs.row(i) != rhs.row(i));
            let detail = match bad {
                None => format!("aligned on all {dim} shared noise dimensions"),
                Some(i) => format!(
                    "shared noise direction {:?} carries secret {:?} at {} but {:?} at {}",
                    meet.basis.row(i),
                    lhs.row(i),
                    e.a(),
                    rhs.row(i),
                    e.b()
                ),
            };
            vec![record(CheckKind::SignalAlignment, bad.is_none(), detail)]
        }
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::ff::{FieldMatrix, PrimeField};
    use crate::scheme::Precoder;

    #[test]
    fn zero_secret_scheme() {
        // F = 0, H = I_N with L_Z = N: secure everywhere, never decodable.
        let inst = CdsInstance::new(
            "z",
            2,
            2,
            [Edge::new(1, 1), Edge::new(2, 2)],
            [Edge::new(1, 2), Edge::new(2, 1)],
        )
        .unwrap();
        let f = PrimeField::new(5).unwrap();
        let nodes: BTreeMap<NodeId, Precoder> = inst
            .nodes()
            .map(|v| {
                (
                    v,
                    Precoder {
                        f: FieldMatrix::zeros(f, 2, 1),
                        h: FieldMatrix::identity(f, 2),
                    },
                )
            })
            .collect();
        let scheme = LinearScheme::new(f, 1, 2, 2, nodes).unwrap();
        let report = verify_linear(&inst, &scheme).unwrap();
        assert!(!report.overall);
        for r in &report.records {
            match (r.edge_type, r.check) {
                (Some(EdgeKind::Unqualified), _) => assert!(r.pass),
                (Some(EdgeKind::Qualified), CheckKind::Correctness) => assert!(!r.pass),
                _ => {}
            }
        }
        assert_eq!(report.failing_edges(), vec![Edge::new(1, 1), Edge::new(2, 2)]);
    }
}
