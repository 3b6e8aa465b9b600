//! Internal qualified edges, connected edge covers and the parameter rho.
//!
//! A connected edge set covering a node set `S` spans a connected subgraph on
//! at least `|S|` nodes, and any connected node set `T ⊇ S` yields one with
//! `|T| - 1` edges (a spanning tree). So a minimum connected cover of the
//! nodes of `P` that contains `e = {u, v}` has exactly `|T*| - 1` edges, where
//! `T*` is a smallest connected node set (in the qualified graph) containing
//! `V_P`; a spanning tree of `T*` grown from `e` keeps `e` in the cover. The
//! search below is a branch and bound over such node sets.
//!
//! Endpoint lemma: if `e = {u, v}` joins two nodes of an unqualified path
//! `P'`, the sub-path of `P'` from `u` to `v` is an unqualified path whose node
//! set is contained in that of `P'`, so its cover is no larger. Enumerating
//! only paths that start and end at the endpoints of `e` therefore keeps the
//! minimum.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use super::{CdsInstance, Edge, EdgeKind, NodeId};

/// An internal qualified edge together with an unqualified path joining its endpoints.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Candidate {
    pub edge: Edge,
    /// From the A-endpoint of `edge` to its B-endpoint.
    pub path: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverWitness {
    pub edge: Edge,
    pub path: Vec<NodeId>,
    /// Sorted.
    pub cover: Vec<Edge>,
    pub size: usize,
}

impl CoverWitness {
    /// Re-checks every invariant from scratch against `inst`.
    pub fn check(&self, inst: &CdsInstance) -> Result<(), String> {
        if inst.edge_kind(self.edge) != Some(EdgeKind::Qualified) {
            return Err(format!("{} is not a qualified edge", self.edge));
        }
        if !self.path.contains(&self.edge.a()) || !self.path.contains(&self.edge.b()) {
            return Err(format!("path does not contain both endpoints of {}", self.edge));
        }
        for (i, v) in self.path.iter().enumerate() {
            if inst.index(*v).is_none() {
                return Err(format!("path node {v} is not in the instance"));
            }
            if self.path[..i].contains(v) {
                return Err(format!("path repeats {v}"));
            }
        }
        for w in self.path.windows(2) {
            match Edge::between(w[0], w[1]) {
                Some(e) if inst.edge_kind(e) == Some(EdgeKind::Unqualified) => {}
                _ => return Err(format!("{} and {} are not joined by an unqualified edge", w[0], w[1])),
            }
        }
        if self.size != self.cover.len() {
            return Err(format!("size {} but cover has {} edges", self.size, self.cover.len()));
        }
        for (i, e) in self.cover.iter().enumerate() {
            if inst.edge_kind(*e) != Some(EdgeKind::Qualified) {
                return Err(format!("cover edge {e} is not qualified"));
            }
            if self.cover[..i].contains(e) {
                return Err(format!("cover repeats {e}"));
            }
        }
        if !self.cover.contains(&self.edge) {
            return Err(format!("cover does not contain {}", self.edge));
        }
        // Connectivity of the cover by union-find on its endpoints.
        let mut parent: HashMap<NodeId, NodeId> = HashMap::new();
        fn find(parent: &mut HashMap<NodeId, NodeId>, v: NodeId) -> NodeId {
            let p = *parent.entry(v).or_insert(v);
            if p == v {
                return v;
            }
            let r = find(parent, p);
            parent.insert(v, r);
            r
        }
        for e in &self.cover {
            let (ra, rb) = (find(&mut parent, e.a()), find(&mut parent, e.b()));
            if ra != rb {
                parent.insert(ra, rb);
            }
        }
        let root = find(&mut parent, self.edge.a());
        let covered: Vec<NodeId> = parent.keys().copied().collect();
        for v in covered {
            if find(&mut parent, v) != root {
                return Err("cover is not connected".into());
            }
        }
        for v in &self.path {
            if !parent.contains_key(v) {
                return Err(format!("path node {v} is not covered"));
            }
        }
        Ok(())
    }
}

impl fmt::Display for CoverWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path: Vec<String> = self.path.iter().map(ToString::to_string).collect();
        let cover: Vec<String> = self.cover.iter().map(ToString::to_string).collect();
        write!(
            f,
            "e = {}, P = {}, M = {{{}}} ({} edges)",
            self.edge,
            path.join("-"),
            cover.join(", "),
            self.size
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverOptions {
    /// Covers inside components with more qualified edges than this fall back
    /// to the greedy bound unless `force_exhaustive` is set.
    pub exact_edge_limit: usize,
    pub force_exhaustive: bool,
    /// Longest unqualified path (in edges) enumerated by `rho`; `None` means all.
    pub max_path_len: Option<usize>,
    pub parallel: bool,
}

impl Default for CoverOptions {
    fn default() -> Self {
        CoverOptions {
            exact_edge_limit: 20,
            force_exhaustive: false,
            max_path_len: None,
            parallel: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverResult {
    /// `None` means no connected cover exists.
    pub witness: Option<CoverWitness>,
    /// False when the greedy upper bound was returned.
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rho {
    Finite(u64),
    Infinite,
}

impl Rho {
    pub fn finite(self) -> Option<u64> {
        match self {
            Rho::Finite(r) => Some(r),
            Rho::Infinite => None,
        }
    }
}

impl fmt::Display for Rho {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rho::Finite(r) => write!(f, "{r}"),
            Rho::Infinite => f.write_str("infinite"),
        }
    }
}

impl Serialize for Rho {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Rho::Finite(r) => s.serialize_u64(*r),
            Rho::Infinite => s.serialize_str("infinite"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RhoReport {
    pub value: Rho,
    pub witness: Option<CoverWitness>,
    /// False if a path cap truncated enumeration or a cover fell back to greedy.
    pub exact: bool,
    /// Number of (edge, path) pairs whose cover was actually searched.
    pub evaluated: usize,
}

/// Every qualified edge `{u, v}` paired with every simple unqualified `u`-`v`
/// path of at most `max_path_len` edges, in lexicographic order.
pub fn internal_qualified_edge_candidates(inst: &CdsInstance, max_path_len: usize) -> Vec<Candidate> {
    let mut out = Vec::new();
    for &e in inst.qualified() {
        paths_for_edge(inst, e, max_path_len, None, &mut |_, path| {
            if path.is_empty() {
                return true;
            }
            out.push(Candidate {
                edge: e,
                path: path.iter().map(|&i| inst.node(i)).collect(),
            });
            true
        });
    }
    out
}

/// DFS over simple unqualified paths from the A-end of `e` to its B-end.
/// `allowed` restricts the nodes that may appear; `visit` returns whether to
/// keep extending prefixes of the current length (used for pruning).
fn paths_for_edge(
    inst: &CdsInstance,
    e: Edge,
    max_len: usize,
    allowed: Option<&[bool]>,
    visit: &mut dyn FnMut(usize, &[usize]) -> bool,
) {
    let (u, v) = inst.edge_index(e);
    let mut on_path = vec![false; inst.node_count()];
    let mut path = vec![u];
    on_path[u] = true;
    fn rec(
        inst: &CdsInstance,
        target: usize,
        max_len: usize,
        allowed: Option<&[bool]>,
        on_path: &mut [bool],
        path: &mut Vec<usize>,
        visit: &mut dyn FnMut(usize, &[usize]) -> bool,
    ) {
        let last = *path.last().expect("path is never empty");
        if last == target {
            visit(path.len(), path);
            return;
        }
        if path.len() > max_len {
            return;
        }
        // A completed path has at least one more node than the current prefix.
        if !visit(path.len() + 1, &[]) {
            return;
        }
        for &w in inst.unqualified_neighbors(last) {
            if on_path[w] || allowed.is_some_and(|a| !a[w]) {
                continue;
            }
            on_path[w] = true;
            path.push(w);
            rec(inst, target, max_len, allowed, on_path, path, visit);
            path.pop();
            on_path[w] = false;
        }
    }
    rec(inst, v, max_len, allowed, &mut on_path, &mut path, visit);
}

pub fn min_connected_edge_cover(inst: &CdsInstance, e: Edge, path: &[NodeId]) -> CoverResult {
    min_connected_edge_cover_with(inst, e, path, &CoverOptions::default())
}

/// Minimum connected qualified edge set containing `e` and covering `path`.
/// The path itself is not validated here; `CoverWitness::check` does that.
pub fn min_connected_edge_cover_with(
    inst: &CdsInstance,
    e: Edge,
    path: &[NodeId],
    opts: &CoverOptions,
) -> CoverResult {
    let none = CoverResult {
        witness: None,
        exact: true,
    };
    if inst.edge_kind(e) != Some(EdgeKind::Qualified) {
        return none;
    }
    let mut terminals = Vec::with_capacity(path.len());
    for v in path {
        match inst.index(*v) {
            Some(i) => terminals.push(i),
            None => return none,
        }
    }
    let (u, v) = inst.edge_index(e);
    if !terminals.contains(&u) || !terminals.contains(&v) {
        return none;
    }
    let limit = component_edge_count(inst, u);
    let exhaustive = opts.force_exhaustive || limit <= opts.exact_edge_limit;
    match steiner_nodes(inst, u, v, &terminals, exhaustive) {
        Some(nodes) => CoverResult {
            witness: Some(build_witness(inst, e, path.to_vec(), &nodes)),
            exact: exhaustive,
        },
        None => none,
    }
}

pub fn rho(inst: &CdsInstance) -> RhoReport {
    rho_with(inst, &CoverOptions::default())
}

/// Minimum of the connected cover size over all internal-edge candidates.
/// Ties go to the lexicographically smallest `(edge, path)`, so parallel and
/// sequential evaluation agree.
pub fn rho_with(inst: &CdsInstance, opts: &CoverOptions) -> RhoReport {
    let n = inst.node_count();
    let max_len = opts.max_path_len.unwrap_or(n);
    let comp = component_ids(inst);
    let edges: Vec<Edge> = inst.qualified().iter().copied().collect();

    let per_edge = |e: &Edge| best_for_edge(inst, *e, max_len, &comp, opts);
    let results: Vec<EdgeBest> = if opts.parallel {
        edges.par_iter().map(per_edge).collect()
    } else {
        edges.iter().map(per_edge).collect()
    };

    let mut exact = max_len + 1 >= n;
    let mut evaluated = 0;
    let mut best: Option<(usize, Edge, Vec<usize>)> = None;
    for (e, r) in edges.iter().zip(results) {
        exact &= r.exact;
        evaluated += r.evaluated;
        if let Some((size, path)) = r.best {
            let better = match &best {
                None => true,
                Some((s, be, bp)) => (size, *e, &path) < (*s, *be, bp),
            };
            if better {
                best = Some((size, *e, path));
            }
        }
    }
    match best {
        None => RhoReport {
            value: Rho::Infinite,
            witness: None,
            exact,
            evaluated,
        },
        Some((size, e, path)) => {
            let ids: Vec<NodeId> = path.iter().map(|&i| inst.node(i)).collect();
            let (u, v) = inst.edge_index(e);
            let exhaustive = opts.force_exhaustive || component_edge_count(inst, u) <= opts.exact_edge_limit;
            let nodes = steiner_nodes(inst, u, v, &path, exhaustive).expect("cover existed during search");
            let witness = build_witness(inst, e, ids, &nodes);
            debug_assert_eq!(witness.size, size);
            RhoReport {
                value: Rho::Finite(size as u64),
                witness: Some(witness),
                exact,
                evaluated,
            }
        }
    }
}

struct EdgeBest {
    /// `(cover size, path)`.
    best: Option<(usize, Vec<usize>)>,
    exact: bool,
    evaluated: usize,
}

fn best_for_edge(inst: &CdsInstance, e: Edge, max_len: usize, comp: &[usize], opts: &CoverOptions) -> EdgeBest {
    let (u, v) = inst.edge_index(e);
    // Paths that leave the component of e can never be covered.
    let allowed: Vec<bool> = comp.iter().map(|&c| c == comp[u]).collect();
    let exhaustive = opts.force_exhaustive || component_edge_count(inst, u) <= opts.exact_edge_limit;
    let mut cache: HashMap<Vec<usize>, Option<usize>> = HashMap::new();
    let mut best: Option<(usize, Vec<usize>)> = None;
    let mut evaluated = 0;
    paths_for_edge(inst, e, max_len, Some(&allowed), &mut |nodes, path| {
        // Any cover of k nodes needs k - 1 edges; ties keep the earlier path.
        let bound = best.as_ref().map_or(usize::MAX, |b| b.0);
        if nodes.saturating_sub(1) >= bound {
            return false;
        }
        if path.is_empty() {
            return true;
        }
        let mut key = path.to_vec();
        key.sort_unstable();
        let size = *cache.entry(key).or_insert_with(|| {
            evaluated += 1;
            steiner_nodes(inst, u, v, path, exhaustive).map(|s| s.len() - 1)
        });
        if let Some(size) = size {
            if size < bound {
                best = Some((size, path.to_vec()));
            }
        }
        true
    });
    EdgeBest {
        best,
        exact: exhaustive,
        evaluated,
    }
}

fn component_ids(inst: &CdsInstance) -> Vec<usize> {
    let n = inst.node_count();
    let mut comp = vec![usize::MAX; n];
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = s;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for &w in inst.qualified_neighbors(x) {
                if comp[w] == usize::MAX {
                    comp[w] = s;
                    stack.push(w);
                }
            }
        }
    }
    comp
}

fn component_edge_count(inst: &CdsInstance, start: usize) -> usize {
    let comp = component_ids(inst);
    (0..inst.node_count())
        .filter(|&i| comp[i] == comp[start])
        .map(|i| inst.qualified_neighbors(i).len())
        .sum::<usize>()
        / 2
}

/// Spanning tree of `nodes` (connected in the qualified graph) that contains `e`.
fn build_witness(inst: &CdsInstance, e: Edge, path: Vec<NodeId>, nodes: &[usize]) -> CoverWitness {
    let (u, v) = inst.edge_index(e);
    let mut inside = vec![false; inst.node_count()];
    for &x in nodes {
        inside[x] = true;
    }
    let mut seen = vec![false; inst.node_count()];
    seen[u] = true;
    seen[v] = true;
    let mut cover = vec![e];
    let mut queue = VecDeque::from([u, v]);
    while let Some(x) = queue.pop_front() {
        for &w in inst.qualified_neighbors(x) {
            if inside[w] && !seen[w] {
                seen[w] = true;
                cover.push(inst.edge_between(x, w).expect("qualified edges cross sides"));
                queue.push_back(w);
            }
        }
    }
    cover.sort_unstable();
    CoverWitness {
        edge: e,
        path,
        size: cover.len(),
        cover,
    }
}

const FAR: usize = usize::MAX;

/// Smallest connected node set containing `u`, `v` and all `terminals`.
/// With `exhaustive == false` only the greedy set is returned.
fn steiner_nodes(inst: &CdsInstance, u: usize, v: usize, terminals: &[usize], exhaustive: bool) -> Option<Vec<usize>> {
    let n = inst.node_count();
    let mut s = Steiner {
        inst,
        is_terminal: vec![false; n],
        in_set: vec![false; n],
        banned: vec![false; n],
        set: Vec::new(),
        best: Vec::new(),
    };
    for &t in terminals {
        s.is_terminal[t] = true;
    }
    for x in [u, v] {
        s.in_set[x] = true;
        s.set.push(x);
    }
    s.best = s.greedy()?;
    if exhaustive {
        s.branch();
    }
    let mut best = s.best;
    best.sort_unstable();
    Some(best)
}

struct Steiner<'a> {
    inst: &'a CdsInstance,
    is_terminal: Vec<bool>,
    in_set: Vec<bool>,
    banned: Vec<bool>,
    set: Vec<usize>,
    best: Vec<usize>,
}

impl Steiner<'_> {
    /// Multi-source BFS over non-banned nodes. `from_set` seeds from the
    /// current set (distance 0), otherwise from uncovered terminals
    /// (distance 1); distance counts nodes not yet in the set.
    fn distances(&self, from_set: bool) -> (Vec<usize>, Vec<usize>) {
        let n = self.inst.node_count();
        let mut dist = vec![FAR; n];
        let mut prev = vec![FAR; n];
        let mut queue = VecDeque::new();
        for x in 0..n {
            let seed = if from_set {
                self.in_set[x]
            } else {
                self.is_terminal[x] && !self.in_set[x]
            };
            if seed {
                dist[x] = usize::from(!from_set);
                queue.push_back(x);
            }
        }
        while let Some(x) = queue.pop_front() {
            for &w in self.inst.qualified_neighbors(x) {
                if dist[w] == FAR && !self.banned[w] && !self.in_set[w] {
                    dist[w] = dist[x] + 1;
                    prev[w] = x;
                    queue.push_back(w);
                }
            }
        }
        (dist, prev)
    }

    fn uncovered(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.inst.node_count()).filter(|&x| self.is_terminal[x] && !self.in_set[x])
    }

    /// Repeatedly attaches the nearest uncovered terminal by a shortest path.
    fn greedy(&mut self) -> Option<Vec<usize>> {
        let saved_set = self.set.clone();
        let saved_in = self.in_set.clone();
        let result = loop {
            if self.uncovered().next().is_none() {
                break Some(self.set.clone());
            }
            let (dist, prev) = self.distances(true);
            let target = self.uncovered().filter(|&t| dist[t] != FAR).min_by_key(|&t| (dist[t], t));
            let Some(mut x) = target else { break None };
            while !self.in_set[x] {
                self.in_set[x] = true;
                self.set.push(x);
                x = prev[x];
            }
        };
        self.set = saved_set;
        self.in_set = saved_in;
        result
    }

    fn branch(&mut self) {
        if self.uncovered().next().is_none() {
            if self.set.len() < self.best.len() {
                self.best = self.set.clone();
            }
            return;
        }
        let (dist, _) = self.distances(true);
        let mut missing = 0;
        let mut farthest = 0;
        for t in self.uncovered() {
            if dist[t] == FAR {
                return;
            }
            missing += 1;
            farthest = farthest.max(dist[t]);
        }
        let bound = missing.max(farthest);
        if self.set.len() + bound >= self.best.len() {
            return;
        }
        let frontier: Vec<usize> = (0..self.inst.node_count()).filter(|&x| dist[x] == 1).collect();
        if let Some(&t) = frontier.iter().find(|&&x| self.is_terminal[x]) {
            // Terminals must be in every solution; no branching needed.
            self.include(t);
            return;
        }
        let (to_term, _) = self.distances(false);
        let Some(&w) = frontier.iter().min_by_key(|&&x| (to_term[x], x)) else {
            return;
        };
        self.include(w);
        self.banned[w] = true;
        self.branch();
        self.banned[w] = false;
    }

    fn include(&mut self, w: usize) {
        self.in_set[w] = true;
        self.set.push(w);
        self.branch();
        self.set.pop();
        self.in_set[w] = false;
    }
}
