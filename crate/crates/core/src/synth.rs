//! Rate `(rho-1)/(2 rho)` schemes for instances whose qualified components are
//! all paths or cycles.
//!
//! Each component gets its own block of noise symbols laid out as a sliding
//! window of length `rho` along the component. Every noise symbol `z_j` is
//! then tagged with a payload (a secret symbol or a Cauchy combination of the
//! secret) scaled by a coefficient that is shared inside each unqualified
//! component of the nodes holding `z_j` and distinct across them.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ff::{cauchy_matrix, next_prime, FieldMatrix, PrimeField};
use crate::graph::{qualified_components, rho, CdsInstance, NodeId, QualifiedComponent, Rho, Shape};
use crate::scheme::{LinearScheme, Precoder};

/// Smallest prime `>= 2 rho - 2`.
pub fn choose_field(rho: Rho) -> Result<PrimeField> {
    match rho {
        Rho::Infinite => Err(Error::Synthesis(
            "rho is infinite: the instance has no internal qualified edge, so the rate-1/2 regime applies and this construction does not".into(),
        )),
        Rho::Finite(r) if r < 5 => Err(Error::Synthesis(format!(
            "rho = {r}, but every instance with an internal qualified edge has rho >= 5"
        ))),
        Rho::Finite(r) => PrimeField::new(next_prime(2 * r - 2)),
    }
}

/// Noise windows of one qualified component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NoiseLayout {
    pub shape: Shape,
    /// Nodes in path or cycle order.
    pub traversal: Vec<NodeId>,
    /// Local indices held by each node, aligned with `traversal`, in row order.
    pub windows: Vec<Vec<usize>>,
    /// Local indices run over `first_index .. first_index + noise_count`.
    pub first_index: usize,
    pub noise_count: usize,
}

impl NoiseLayout {
    pub fn window(&self, v: NodeId) -> Option<&[usize]> {
        let i = self.traversal.iter().position(|&w| w == v)?;
        Some(&self.windows[i])
    }

    /// Nodes holding local index `j`, in traversal order.
    pub fn holders(&self, j: usize) -> Vec<NodeId> {
        self.traversal
            .iter()
            .zip(&self.windows)
            .filter(|(_, w)| w.contains(&j))
            .map(|(&v, _)| v)
            .collect()
    }

    pub fn indices(&self) -> std::ops::Range<usize> {
        self.first_index..self.first_index + self.noise_count
    }
}

/// Path: node `i` (1-based) holds `i-1 ..= i+rho-2`. Cycle: node `i` holds
/// `i, i+1, .., i+rho-1` reduced into `1..=n`.
pub fn noise_layout(component: &QualifiedComponent, rho: u64) -> Result<NoiseLayout> {
    let rho = rho as usize;
    let traversal = component.traversal.clone().ok_or_else(|| {
        Error::Synthesis(format!(
            "qualified component containing {} is neither a path nor a cycle",
            component.nodes[0]
        ))
    })?;
    let n = traversal.len();
    match component.shape {
        Shape::Path => Ok(NoiseLayout {
            shape: Shape::Path,
            windows: (1..=n).map(|i| (i - 1..=i + rho - 2).collect()).collect(),
            traversal,
            first_index: 0,
            noise_count: n + rho - 1,
        }),
        Shape::Cycle => {
            if n < rho {
                return Err(Error::Synthesis(format!(
                    "qualified cycle through {} has {n} nodes, fewer than rho = {rho}",
                    traversal[0]
                )));
            }
            Ok(NoiseLayout {
                shape: Shape::Cycle,
                windows: (1..=n)
                    .map(|i| (i..i + rho).map(|j| (j - 1) % n + 1).collect())
                    .collect(),
                traversal,
                first_index: 1,
                noise_count: n,
            })
        }
        Shape::Other => unreachable!("only paths and cycles have a traversal"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", content = "index", rename_all = "lowercase")]
pub enum Payload {
    None,
    /// `s_i`, 1-based.
    Secret(usize),
    /// `l_i`, row `i` (1-based) of the Cauchy combination.
    Combination(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymbolEntry {
    pub payload: Payload,
    /// Unqualified components of the holders, in numbering order.
    pub groups: Vec<Vec<NodeId>>,
    pub coefficients: BTreeMap<NodeId, u64>,
}

/// Payload and per-node coefficient for every local noise index of one component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoefficientTable {
    pub entries: BTreeMap<usize, SymbolEntry>,
}

impl CoefficientTable {
    pub fn coefficient(&self, j: usize, v: NodeId) -> Option<u64> {
        self.entries.get(&j)?.coefficients.get(&v).copied()
    }
}

/// Groups are numbered by the traversal position of their earliest member.
pub fn coefficient_table(inst: &CdsInstance, layout: &NoiseLayout, rho: u64) -> CoefficientTable {
    let l = rho as usize - 1;
    let rep = |j: usize| (j - 1) % l + 1;
    let mut entries = BTreeMap::new();
    for j in layout.indices() {
        let holders = layout.holders(j);
        let payload = match layout.shape {
            Shape::Path if j == 0 => Payload::None,
            Shape::Cycle if j <= l => Payload::Combination(j),
            _ => Payload::Secret(rep(j)),
        };
        let groups = unqualified_groups(inst, &holders);
        let mut coefficients = BTreeMap::new();
        if payload != Payload::None {
            for (k, g) in groups.iter().enumerate() {
                for &v in g {
                    coefficients.insert(v, k as u64 + 1);
                }
            }
        }
        entries.insert(
            j,
            SymbolEntry {
                payload,
                groups,
                coefficients,
            },
        );
    }
    CoefficientTable { entries }
}

/// Connected components of the unqualified graph induced on `holders`.
fn unqualified_groups(inst: &CdsInstance, holders: &[NodeId]) -> Vec<Vec<NodeId>> {
    let idx: Vec<usize> = holders.iter().map(|&v| inst.index(v).expect("holder in instance")).collect();
    let mut group = vec![usize::MAX; holders.len()];
    let mut out: Vec<Vec<NodeId>> = Vec::new();
    for start in 0..holders.len() {
        if group[start] != usize::MAX {
            continue;
        }
        let g = out.len();
        group[start] = g;
        let mut members = vec![start];
        let mut k = 0;
        while k < members.len() {
            let x = idx[members[k]];
            k += 1;
            for (pos, &y) in idx.iter().enumerate() {
                if group[pos] == usize::MAX && inst.unqualified_neighbors(x).contains(&y) {
                    group[pos] = g;
                    members.push(pos);
                }
            }
        }
        members.sort_unstable();
        out.push(members.into_iter().map(|m| holders[m]).collect());
    }
    out
}

/// Everything the construction decided, kept for inspection and rendering.
#[derive(Debug, Clone)]
pub struct Synthesis {
    pub rho: u64,
    pub scheme: LinearScheme,
    pub components: Vec<(NoiseLayout, CoefficientTable)>,
    /// First global noise column of each component.
    pub offsets: Vec<usize>,
    pub cauchy: FieldMatrix,
}

pub fn synthesize(inst: &CdsInstance) -> Result<LinearScheme> {
    synthesize_detailed(inst).map(|s| s.scheme)
}

pub fn synthesize_detailed(inst: &CdsInstance) -> Result<Synthesis> {
    let comps = qualified_components(inst);
    if let Some(c) = comps.iter().find(|c| c.shape == Shape::Other) {
        return Err(Error::Synthesis(format!(
            "qualified component containing {} is neither a path nor a cycle",
            c.nodes[0]
        )));
    }
    let r = rho(inst).value;
    let field = choose_field(r)?;
    let r = r.finite().expect("choose_field rejects infinite rho");
    let l = r as usize - 1;
    let n = r as usize;

    let xs: Vec<u64> = (0..l as u64).collect();
    let ys: Vec<u64> = (1..=l as u64).map(|j| r - 2 + j).collect();
    let cauchy = cauchy_matrix(&xs, &ys, field)?;

    let mut components = Vec::new();
    let mut offsets = Vec::new();
    let mut total = 0;
    for c in &comps {
        let layout = noise_layout(c, r)?;
        let table = coefficient_table(inst, &layout, r);
        offsets.push(total);
        total += layout.noise_count;
        components.push((layout, table));
    }

    let mut nodes = BTreeMap::new();
    for ((layout, table), &offset) in components.iter().zip(&offsets) {
        for (v, window) in layout.traversal.iter().zip(&layout.windows) {
            let mut f = FieldMatrix::zeros(field, n, l);
            let mut h = FieldMatrix::zeros(field, n, total);
            for (row, &j) in window.iter().enumerate() {
                h.set(row, offset + j - layout.first_index, 1);
                let entry = &table.entries[&j];
                let k = entry.coefficients.get(v).copied().unwrap_or(0);
                match entry.payload {
                    Payload::None => {}
                    Payload::Secret(i) => f.set(row, i - 1, field.reduce(k)),
                    Payload::Combination(i) => {
                        for col in 0..l {
                            f.set(row, col, field.mul(k, cauchy.get(i - 1, col)));
                        }
                    }
                }
            }
            nodes.insert(*v, Precoder { f, h });
        }
    }
    let scheme = LinearScheme::new(field, l, total, n, nodes)?;
    Ok(Synthesis {
        rho: r,
        scheme,
        components,
        offsets,
        cauchy,
    })
}

impl Synthesis {
    /// One line per node, e.g. `B1 = (z1_1, s1+z1_2, 2l3+z2_3, ...)`, where
    /// `zq_j` is local noise index `j` of component `q` (1-based).
    pub fn render(&self) -> String {
        let mut lines: BTreeMap<NodeId, String> = BTreeMap::new();
        for (q, (layout, table)) in self.components.iter().enumerate() {
            for (v, window) in layout.traversal.iter().zip(&layout.windows) {
                let parts: Vec<String> = window
                    .iter()
                    .map(|&j| {
                        let entry = &table.entries[&j];
                        let k = entry.coefficients.get(v).copied().unwrap_or(0);
                        let coeff = if k == 1 { String::new() } else { k.to_string() };
                        let noise = format!("z{}_{j}", q + 1);
                        match entry.payload {
                            Payload::None => noise,
                            Payload::Secret(i) => format!("{coeff}s{i}+{noise}"),
                            Payload::Combination(i) => format!("{coeff}l{i}+{noise}"),
                        }
                    })
                    .collect();
                lines.insert(*v, format!("{v} = ({})", parts.join(", ")));
            }
        }
        let mut out = String::new();
        for line in lines.values() {
            let _ = writeln!(out, "{line}");
        }
        out
    }
}
