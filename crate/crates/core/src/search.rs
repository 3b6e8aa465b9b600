//! Randomised search for linear schemes at a fixed `(p, L, N, L_Z)`.
//!
//! Noise first: every node draws a support of `N` noise coordinates, so `H_v`
//! is a row selection of the identity and two nodes overlap exactly in their
//! shared coordinates. A shared coordinate `j` can help a qualified edge
//! `{u, v}` only if `u` and `v` fall in different unqualified components of
//! the nodes holding `j`; otherwise signal alignment forces them to carry the
//! same secret payload on `j`. Supports are improved by min-conflicts local
//! search until every qualified edge has `L` helpful coordinates.
//!
//! Signals second: with supports fixed, signal alignment on unqualified edges
//! says exactly that all holders of `j` in one unqualified component carry the
//! same payload row. Those rows are the free variables; they are drawn at
//! random (or as scaled MDS directions) and the qualified ranks are checked.
//! Every returned scheme has passed `verify_linear`.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ff::{cauchy_matrix, FieldMatrix, PrimeField};
use crate::graph::CdsInstance;
use crate::scheme::{verify_linear, LinearScheme, Precoder};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PayloadMode {
    /// Independent uniform payload row per unqualified component.
    Generic,
    /// Payload rows `k * d_j` where `d_j` is a row of `[I_L; C]` for a
    /// `rows x L` Cauchy matrix `C` and `k` numbers the unqualified components.
    Cauchy { rows: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchParams {
    pub p: u64,
    pub secret_len: usize,
    pub signal_len: usize,
    pub noise_len: usize,
    pub seed: u64,
    /// Total number of noise configurations sampled across all restarts.
    pub budget: u64,
    /// Configurations per restart.
    pub restart_len: u64,
    pub mode: PayloadMode,
    /// Payload draws tried per configuration that meets every qualified demand.
    pub payload_attempts: usize,
    pub parallel: bool,
}

impl SearchParams {
    pub fn new(p: u64, secret_len: usize, signal_len: usize, noise_len: usize, seed: u64, budget: u64) -> Self {
        SearchParams {
            p,
            secret_len,
            signal_len,
            noise_len,
            seed,
            budget,
            restart_len: 20_000,
            mode: PayloadMode::Generic,
            payload_attempts: 50,
            parallel: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub scheme: Option<LinearScheme>,
    /// Index of the restart that produced the scheme.
    pub restart: Option<u64>,
    pub restarts: u64,
}

pub fn random_scheme_search(inst: &CdsInstance, params: &SearchParams) -> Result<SearchOutcome> {
    let field = PrimeField::new(params.p)?;
    if params.secret_len == 0 || params.signal_len == 0 || params.noise_len == 0 {
        return Err(Error::Scheme("L, N and L_Z must be positive".into()));
    }
    if let PayloadMode::Cauchy { rows } = params.mode {
        if rows + params.secret_len > params.p as usize {
            return Err(Error::CauchyTooLarge {
                needed: rows + params.secret_len,
                p: params.p,
            });
        }
    }
    let restart_len = params.restart_len.max(1);
    let restarts = params.budget.div_ceil(restart_len);
    let none = SearchOutcome {
        scheme: None,
        restart: None,
        restarts,
    };
    if params.signal_len > params.noise_len {
        // H_v cannot have full row rank.
        return Ok(none);
    }
    let ctx = Context::new(inst, field, params);
    let attempt = |r: u64| {
        let moves = restart_len.min(params.budget - r * restart_len);
        ctx.restart(r, moves).map(|s| (r, s))
    };
    let found = if params.parallel {
        (0..restarts).into_par_iter().find_map_first(attempt)
    } else {
        (0..restarts).find_map(attempt)
    };
    Ok(match found {
        Some((r, scheme)) => SearchOutcome {
            scheme: Some(scheme),
            restart: Some(r),
            restarts,
        },
        None => none,
    })
}

struct Context<'a> {
    inst: &'a CdsInstance,
    field: PrimeField,
    params: &'a SearchParams,
    /// Qualified edges as dense index pairs.
    edges: Vec<(usize, usize)>,
    /// Qualified edges incident to each node.
    incident: Vec<Vec<usize>>,
    directions: Option<FieldMatrix>,
}

impl<'a> Context<'a> {
    fn new(inst: &'a CdsInstance, field: PrimeField, params: &'a SearchParams) -> Self {
        let edges: Vec<(usize, usize)> = inst.qualified().iter().map(|&e| inst.edge_index(e)).collect();
        let mut incident = vec![Vec::new(); inst.node_count()];
        for (k, &(u, v)) in edges.iter().enumerate() {
            incident[u].push(k);
            incident[v].push(k);
        }
        let directions = match params.mode {
            PayloadMode::Generic => None,
            PayloadMode::Cauchy { rows } => {
                let l = params.secret_len as u64;
                let xs: Vec<u64> = (0..rows as u64).collect();
                let ys: Vec<u64> = (0..l).map(|j| rows as u64 + j).collect();
                let c = cauchy_matrix(&xs, &ys, field).expect("parameters checked against p");
                Some(FieldMatrix::identity(field, params.secret_len).vstack(&c).expect("same width"))
            }
        };
        Context {
            inst,
            field,
            params,
            edges,
            incident,
            directions,
        }
    }

    fn restart(&self, r: u64, moves: u64) -> Option<LinearScheme> {
        if moves == 0 {
            return None;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.params.seed);
        rng.set_stream(r);
        let mut state = Supports::random(self, &mut rng);
        let l = self.params.secret_len;
        for used in 1..=moves {
            if state.score == 0 {
                if let Some(s) = self.signals(&state, &mut rng) {
                    return Some(s);
                }
            }
            if used == moves {
                break;
            }
            // Min-conflicts move on a random deficient edge, or a random
            // perturbation if none is deficient (signals failed above).
            let bad: Vec<usize> = (0..self.edges.len()).filter(|&k| state.useful[k] < l).collect();
            let w = match bad.choose(&mut rng) {
                Some(&k) => {
                    let (u, v) = self.edges[k];
                    if rng.gen_bool(0.5) {
                        u
                    } else {
                        v
                    }
                }
                None => rng.gen_range(0..self.inst.node_count()),
            };
            let out = **state.support[w].iter().collect::<Vec<_>>().choose(&mut rng).expect("N > 0");
            let free: Vec<usize> = (0..self.params.noise_len).filter(|j| !state.support[w].contains(j)).collect();
            let Some(&inn) = free.choose(&mut rng) else { continue };
            let before = state.score;
            state.swap(self, w, out, inn);
            if state.score > before && !rng.gen_bool(0.02) {
                state.swap(self, w, inn, out);
            }
        }
        None
    }

    /// Draws payload rows for a support configuration with zero deficit.
    fn signals(&self, state: &Supports, rng: &mut ChaCha8Rng) -> Option<LinearScheme> {
        let l = self.params.secret_len;
        let p = self.params.p;
        for _ in 0..self.params.payload_attempts {
            // rows[j][c]: payload of unqualified component c of holders of j.
            let rows: Vec<Vec<Vec<u64>>> = match &self.directions {
                None => (0..self.params.noise_len)
                    .map(|j| {
                        (0..state.group_count[j])
                            .map(|_| (0..l).map(|_| rng.gen_range(0..p)).collect())
                            .collect()
                    })
                    .collect(),
                Some(dirs) => {
                    let assign = self.assign_directions(state, dirs.rows(), rng)?;
                    (0..self.params.noise_len)
                        .map(|j| {
                            (0..state.group_count[j])
                                .map(|c| {
                                    let k = (c as u64 + 1) % p;
                                    dirs.row(assign[j]).iter().map(|&x| self.field.mul(k, x)).collect()
                                })
                                .collect()
                        })
                        .collect()
                }
            };
            if !self.qualified_ranks_ok(state, &rows) {
                continue;
            }
            let scheme = self.build(state, &rows);
            if verify_linear(self.inst, &scheme).map(|r| r.overall).unwrap_or(false) {
                return Some(scheme);
            }
        }
        None
    }

    /// Gives every coordinate a direction so that each qualified edge sees `L`
    /// distinct directions on its helpful shared coordinates.
    fn assign_directions(&self, state: &Supports, count: usize, rng: &mut ChaCha8Rng) -> Option<Vec<usize>> {
        let l = self.params.secret_len;
        let mut dir: Vec<usize> = (0..self.params.noise_len).map(|_| rng.gen_range(0..count)).collect();
        let helpful: Vec<Vec<usize>> = self
            .edges
            .iter()
            .map(|&(u, v)| state.helpful_shared(u, v))
            .collect();
        let deficit = |dir: &[usize], k: usize| {
            let mut seen: Vec<usize> = helpful[k].iter().map(|&j| dir[j]).collect();
            seen.sort_unstable();
            seen.dedup();
            l.saturating_sub(seen.len())
        };
        let total = |dir: &[usize]| (0..self.edges.len()).map(|k| deficit(dir, k)).sum::<usize>();
        let mut score = total(&dir);
        for _ in 0..20_000 {
            if score == 0 {
                return Some(dir);
            }
            let bad: Vec<usize> = (0..self.edges.len()).filter(|&k| deficit(&dir, k) > 0).collect();
            let k = *bad.choose(rng)?;
            let j = *helpful[k].choose(rng)?;
            let old = dir[j];
            dir[j] = rng.gen_range(0..count);
            let next = total(&dir);
            if next <= score || rng.gen_bool(0.02) {
                score = next;
            } else {
                dir[j] = old;
            }
        }
        None
    }

    fn qualified_ranks_ok(&self, state: &Supports, rows: &[Vec<Vec<u64>>]) -> bool {
        let l = self.params.secret_len;
        self.edges.iter().all(|&(u, v)| {
            let diffs: Vec<Vec<u64>> = state
                .helpful_shared(u, v)
                .into_iter()
                .map(|j| {
                    let a = &rows[j][state.group[j][u]];
                    let b = &rows[j][state.group[j][v]];
                    a.iter().zip(b).map(|(&x, &y)| self.field.sub(x, y)).collect()
                })
                .collect();
            diffs.len() >= l
                && FieldMatrix::from_rows_with_cols(self.field, &diffs, l)
                    .map(|m| m.rank() == l)
                    .unwrap_or(false)
        })
    }

    fn build(&self, state: &Supports, rows: &[Vec<Vec<u64>>]) -> LinearScheme {
        let (n, l, lz) = (self.params.signal_len, self.params.secret_len, self.params.noise_len);
        let mut nodes = BTreeMap::new();
        for w in 0..self.inst.node_count() {
            let mut f = FieldMatrix::zeros(self.field, n, l);
            let mut h = FieldMatrix::zeros(self.field, n, lz);
            for (r, &j) in state.support[w].iter().enumerate() {
                h.set(r, j, 1);
                for (c, &x) in rows[j][state.group[j][w]].iter().enumerate() {
                    f.set(r, c, x);
                }
            }
            nodes.insert(self.inst.node(w), Precoder { f, h });
        }
        LinearScheme::new(self.field, l, lz, n, nodes).expect("shapes are consistent")
    }
}

const NONE: usize = usize::MAX;

/// Noise supports with cached unqualified grouping per coordinate.
struct Supports {
    /// Sorted coordinates held by each node.
    support: Vec<std::collections::BTreeSet<usize>>,
    /// `group[j][w]`: unqualified component of `w` among holders of `j`, or `NONE`.
    group: Vec<Vec<usize>>,
    group_count: Vec<usize>,
    /// Helpful shared coordinates per qualified edge.
    useful: Vec<usize>,
    /// Sum over qualified edges of `max(0, L - useful)`.
    score: usize,
    secret_len: usize,
}

impl Supports {
    fn random(ctx: &Context, rng: &mut ChaCha8Rng) -> Self {
        let n = ctx.inst.node_count();
        let lz = ctx.params.noise_len;
        let coords: Vec<usize> = (0..lz).collect();
        let support = (0..n)
            .map(|_| coords.choose_multiple(rng, ctx.params.signal_len).copied().collect())
            .collect();
        let mut s = Supports {
            support,
            group: vec![vec![NONE; n]; lz],
            group_count: vec![0; lz],
            useful: vec![0; ctx.edges.len()],
            score: 0,
            secret_len: ctx.params.secret_len,
        };
        for j in 0..lz {
            s.regroup(ctx, j);
        }
        for k in 0..ctx.edges.len() {
            let (u, v) = ctx.edges[k];
            s.useful[k] = s.helpful_shared(u, v).len();
        }
        s.score = s.useful.iter().map(|&c| s.secret_len.saturating_sub(c)).sum();
        s
    }

    fn helpful_shared(&self, u: usize, v: usize) -> Vec<usize> {
        self.support[u]
            .intersection(&self.support[v])
            .copied()
            .filter(|&j| self.group[j][u] != self.group[j][v])
            .collect()
    }

    fn regroup(&mut self, ctx: &Context, j: usize) {
        let n = ctx.inst.node_count();
        let holds = |w: usize, s: &Self| s.support[w].contains(&j);
        let mut group = vec![NONE; n];
        let mut count = 0;
        for start in 0..n {
            if group[start] != NONE || !holds(start, self) {
                continue;
            }
            group[start] = count;
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                for &y in ctx.inst.unqualified_neighbors(x) {
                    if group[y] == NONE && holds(y, self) {
                        group[y] = count;
                        stack.push(y);
                    }
                }
            }
            count += 1;
        }
        self.group[j] = group;
        self.group_count[j] = count;
    }

    /// Moves node `w` from coordinate `out` to `inn`, updating only the edges
    /// that can be affected.
    fn swap(&mut self, ctx: &Context, w: usize, out: usize, inn: usize) {
        let touched = |s: &Self| -> Vec<usize> {
            let mut ks: Vec<usize> = (0..ctx.inst.node_count())
                .filter(|&x| s.support[x].contains(&out) || s.support[x].contains(&inn))
                .flat_map(|x| ctx.incident[x].iter().copied())
                .collect();
            ks.sort_unstable();
            ks.dedup();
            ks
        };
        let mut ks = touched(self);
        self.support[w].remove(&out);
        self.support[w].insert(inn);
        self.regroup(ctx, out);
        self.regroup(ctx, inn);
        ks.extend(touched(self));
        ks.sort_unstable();
        ks.dedup();
        for k in ks {
            let (u, v) = ctx.edges[k];
            let fresh = self.helpful_shared(u, v).len();
            let l = self.secret_len;
            self.score = self.score - l.saturating_sub(self.useful[k]) + l.saturating_sub(fresh);
            self.useful[k] = fresh;
        }
    }
}
