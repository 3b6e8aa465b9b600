use serde::Serialize;

use super::{CdsInstance, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Path,
    Cycle,
    Other,
}

impl std::fmt::Display for Shape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Shape::Path => "path",
            Shape::Cycle => "cycle",
            Shape::Other => "other",
        })
    }
}

/// A maximal set of nodes connected through qualified edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QualifiedComponent {
    /// Sorted node set.
    pub nodes: Vec<NodeId>,
    pub shape: Shape,
    pub edge_count: usize,
    /// Nodes in edge order for paths and cycles. A path starts at its smaller
    /// endpoint; a cycle starts at its lowest A-node and heads to the lower of
    /// that node's two qualified neighbours.
    pub traversal: Option<Vec<NodeId>>,
}

/// Partition of all nodes into qualified components, ordered by smallest node.
pub fn qualified_components(inst: &CdsInstance) -> Vec<QualifiedComponent> {
    let n = inst.node_count();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut members = vec![start];
        seen[start] = true;
        let mut k = 0;
        while k < members.len() {
            let v = members[k];
            k += 1;
            for &w in inst.qualified_neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    members.push(w);
                }
            }
        }
        members.sort_unstable();
        out.push(describe(inst, &members));
    }
    out
}

fn describe(inst: &CdsInstance, members: &[usize]) -> QualifiedComponent {
    let degree = |v: usize| inst.qualified_neighbors(v).len();
    let edge_count = members.iter().map(|&v| degree(v)).sum::<usize>() / 2;
    let nodes: Vec<NodeId> = members.iter().map(|&v| inst.node(v)).collect();
    let max_deg = members.iter().map(|&v| degree(v)).max().unwrap_or(0);

    let (shape, order) = if max_deg <= 2 && edge_count + 1 == members.len() {
        // Smallest endpoint; a lone node is its own endpoint.
        let start = *members.iter().find(|&&v| degree(v) <= 1).expect("path has an endpoint");
        (Shape::Path, Some(walk(inst, start, None, members.len())))
    } else if max_deg == 2 && edge_count == members.len() {
        let start = *members
            .iter()
            .find(|&&v| inst.node(v).side == super::Side::A)
            .expect("bipartite cycle has an A-node");
        let next = inst.qualified_neighbors(start)[0];
        (Shape::Cycle, Some(walk(inst, start, Some(next), members.len())))
    } else {
        (Shape::Other, None)
    };
    QualifiedComponent {
        nodes,
        shape,
        edge_count,
        traversal: order.map(|o| o.into_iter().map(|v| inst.node(v)).collect()),
    }
}

/// Follows a max-degree-2 component from `start`, optionally forcing the first step.
fn walk(inst: &CdsInstance, start: usize, first: Option<usize>, len: usize) -> Vec<usize> {
    let mut order = vec![start];
    let mut prev = start;
    let mut cur = match first.or_else(|| inst.qualified_neighbors(start).first().copied()) {
        Some(c) => c,
        None => return order,
    };
    while order.len() < len {
        order.push(cur);
        let next = inst
            .qualified_neighbors(cur)
            .iter()
            .copied()
            .find(|&w| w != prev);
        match next {
            Some(w) if w != start => {
                prev = cur;
                cur = w;
            }
            _ => break,
        }
    }
    order
}
