use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

/// A signal node. Ordering puts every A-node before every B-node, then by index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId {
    pub side: Side,
    /// 1-based.
    pub index: u32,
}

impl NodeId {
    pub fn a(index: u32) -> Self {
        NodeId {
            side: Side::A,
            index,
        }
    }

    pub fn b(index: u32) -> Self {
        NodeId {
            side: Side::B,
            index,
        }
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.side {
            Side::A => 'A',
            Side::B => 'B',
        };
        write!(f, "{s}{}", self.index)
    }
}

impl FromStr for NodeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.chars();
        let side = match chars.next() {
            Some('A') => Side::A,
            Some('B') => Side::B,
            _ => return Err(Error::Parse(format!("bad node id {s:?}"))),
        };
        let index: u32 = chars
            .as_str()
            .parse()
            .map_err(|_| Error::Parse(format!("bad node id {s:?}")))?;
        if index == 0 {
            return Err(Error::Parse(format!("node ids are 1-based, got {s:?}")));
        }
        Ok(NodeId { side, index })
    }
}

impl Serialize for NodeId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NodeId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The pair `{Ax, By}`; serialised as `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[u32; 2]", into = "[u32; 2]")]
pub struct Edge {
    pub x: u32,
    pub y: u32,
}

impl From<[u32; 2]> for Edge {
    fn from([x, y]: [u32; 2]) -> Self {
        Edge { x, y }
    }
}

impl From<Edge> for [u32; 2] {
    fn from(e: Edge) -> Self {
        [e.x, e.y]
    }
}

impl Edge {
    pub fn new(x: u32, y: u32) -> Self {
        Edge { x, y }
    }

    /// The edge joining two nodes on opposite sides.
    pub fn between(u: NodeId, v: NodeId) -> Option<Self> {
        match (u.side, v.side) {
            (Side::A, Side::B) => Some(Edge::new(u.index, v.index)),
            (Side::B, Side::A) => Some(Edge::new(v.index, u.index)),
            _ => None,
        }
    }

    pub fn a(&self) -> NodeId {
        NodeId::a(self.x)
    }

    pub fn b(&self) -> NodeId {
        NodeId::b(self.y)
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v == self.a() || v == self.b()
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{A{},B{}}}", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Qualified,
    Unqualified,
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeKind::Qualified => "qualified",
            EdgeKind::Unqualified => "unqualified",
        })
    }
}

/// Wire form of an instance file.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    name: String,
    a_count: u32,
    b_count: u32,
    qualified: Vec<[u32; 2]>,
    unqualified: Vec<[u32; 2]>,
}

/// A validated CDS instance. Immutable once built.
///
/// Nodes carry a dense index: `Ax -> x-1`, `By -> a_count + y-1`, which
/// agrees with the `NodeId` ordering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CdsInstance {
    name: String,
    a_count: u32,
    b_count: u32,
    qualified: BTreeSet<Edge>,
    unqualified: BTreeSet<Edge>,
    q_adj: Vec<Vec<usize>>,
    u_adj: Vec<Vec<usize>>,
}

impl CdsInstance {
    /// Validates disjointness, index ranges and that every node has at least
    /// one unqualified edge.
    pub fn new(
        name: impl Into<String>,
        a_count: u32,
        b_count: u32,
        qualified: impl IntoIterator<Item = Edge>,
        unqualified: impl IntoIterator<Item = Edge>,
    ) -> Result<Self> {
        let name = name.into();
        if a_count == 0 || b_count == 0 {
            return Err(Error::Validation(format!(
                "instance {name:?} needs at least one A-node and one B-node"
            )));
        }
        let in_range = |e: &Edge| (1..=a_count).contains(&e.x) && (1..=b_count).contains(&e.y);
        let mut q = BTreeSet::new();
        for e in qualified {
            if !in_range(&e) {
                return Err(Error::Validation(format!(
                    "qualified edge {e} out of range for {a_count} A-nodes and {b_count} B-nodes"
                )));
            }
            if !q.insert(e) {
                return Err(Error::Validation(format!("qualified edge {e} listed twice")));
            }
        }
        let mut u = BTreeSet::new();
        for e in unqualified {
            if !in_range(&e) {
                return Err(Error::Validation(format!(
                    "unqualified edge {e} out of range for {a_count} A-nodes and {b_count} B-nodes"
                )));
            }
            if q.contains(&e) {
                return Err(Error::Validation(format!(
                    "edge {e} is listed as both qualified and unqualified"
                )));
            }
            if !u.insert(e) {
                return Err(Error::Validation(format!("unqualified edge {e} listed twice")));
            }
        }
        let n = (a_count + b_count) as usize;
        let mut q_adj = vec![Vec::new(); n];
        let mut u_adj = vec![Vec::new(); n];
        let idx = |e: &Edge| ((e.x - 1) as usize, (a_count + e.y - 1) as usize);
        for e in &q {
            let (i, j) = idx(e);
            q_adj[i].push(j);
            q_adj[j].push(i);
        }
        for e in &u {
            let (i, j) = idx(e);
            u_adj[i].push(j);
            u_adj[j].push(i);
        }
        for list in q_adj.iter_mut().chain(u_adj.iter_mut()) {
            list.sort_unstable();
        }
        let inst = CdsInstance {
            name,
            a_count,
            b_count,
            qualified: q,
            unqualified: u,
            q_adj,
            u_adj,
        };
        if let Some(i) = (0..n).find(|&i| inst.u_adj[i].is_empty()) {
            return Err(Error::Validation(format!(
                "node {} has no unqualified edge",
                inst.node(i)
            )));
        }
        Ok(inst)
    }

    /// Parses and validates an instance file.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("instance file: {e}")))?;
        CdsInstance::new(
            file.name,
            file.a_count,
            file.b_count,
            file.qualified.into_iter().map(Edge::from),
            file.unqualified.into_iter().map(Edge::from),
        )
    }

    /// Canonical serialisation: fixed key order, edge lists sorted.
    pub fn to_json(&self) -> String {
        let list = |set: &BTreeSet<Edge>| {
            let items: Vec<String> = set.iter().map(|e| format!("[{},{}]", e.x, e.y)).collect();
            format!("[{}]", items.join(", "))
        };
        format!(
            "{{\n  \"name\": {},\n  \"a_count\": {},\n  \"b_count\": {},\n  \"qualified\": {},\n  \"unqualified\": {}\n}}\n",
            serde_json::to_string(&self.name).expect("string serialises"),
            self.a_count,
            self.b_count,
            list(&self.qualified),
            list(&self.unqualified),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn a_count(&self) -> u32 {
        self.a_count
    }

    pub fn b_count(&self) -> u32 {
        self.b_count
    }

    pub fn node_count(&self) -> usize {
        (self.a_count + self.b_count) as usize
    }

    pub fn qualified(&self) -> &BTreeSet<Edge> {
        &self.qualified
    }

    pub fn unqualified(&self) -> &BTreeSet<Edge> {
        &self.unqualified
    }

    /// All edges in `(kind, edge)` order: qualified first, each list sorted.
    pub fn edges(&self) -> impl Iterator<Item = (EdgeKind, Edge)> + '_ {
        self.qualified
            .iter()
            .map(|&e| (EdgeKind::Qualified, e))
            .chain(self.unqualified.iter().map(|&e| (EdgeKind::Unqualified, e)))
    }

    pub fn edge_kind(&self, e: Edge) -> Option<EdgeKind> {
        if self.qualified.contains(&e) {
            Some(EdgeKind::Qualified)
        } else if self.unqualified.contains(&e) {
            Some(EdgeKind::Unqualified)
        } else {
            None
        }
    }

    pub fn node(&self, i: usize) -> NodeId {
        let a = self.a_count as usize;
        if i < a {
            NodeId::a(i as u32 + 1)
        } else {
            NodeId::b((i - a) as u32 + 1)
        }
    }

    pub fn index(&self, v: NodeId) -> Option<usize> {
        match v.side {
            Side::A if (1..=self.a_count).contains(&v.index) => Some(v.index as usize - 1),
            Side::B if (1..=self.b_count).contains(&v.index) => {
                Some((self.a_count + v.index - 1) as usize)
            }
            _ => None,
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.node_count()).map(|i| self.node(i))
    }

    /// Dense endpoints `(A-side, B-side)` of an edge.
    pub fn edge_index(&self, e: Edge) -> (usize, usize) {
        ((e.x - 1) as usize, (self.a_count + e.y - 1) as usize)
    }

    pub fn qualified_neighbors(&self, i: usize) -> &[usize] {
        &self.q_adj[i]
    }

    pub fn unqualified_neighbors(&self, i: usize) -> &[usize] {
        &self.u_adj[i]
    }

    /// Edge between two dense indices, if the pair lies across the bipartition.
    pub fn edge_between(&self, i: usize, j: usize) -> Option<Edge> {
        Edge::between(self.node(i), self.node(j))
    }
}
