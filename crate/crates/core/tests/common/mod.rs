#![allow(dead_code)]

use std::collections::HashSet;

use cds_core::graph::{random_instance, CdsInstance, Edge, RandomShape};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random bipartite instance with arbitrary qualified structure, or `None`
/// when the draw cannot be normalised.
pub fn general_instance(seed: u64, a: u32, b: u32, q_density: f64, u_density: f64) -> Option<CdsInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = Vec::new();
    let mut u = Vec::new();
    let mut free = Vec::new();
    for x in 1..=a {
        for y in 1..=b {
            let r: f64 = rng.gen();
            if r < q_density {
                q.push(Edge::new(x, y));
            } else if r < q_density + u_density {
                u.push(Edge::new(x, y));
            } else {
                free.push(Edge::new(x, y));
            }
        }
    }
    let has_u = |u: &[Edge], x: Option<u32>, y: Option<u32>| {
        u.iter().any(|e| Some(e.x) == x || Some(e.y) == y)
    };
    for x in 1..=a {
        if !has_u(&u, Some(x), None) {
            let pick = free.iter().position(|e| e.x == x)?;
            u.push(free.remove(pick));
        }
    }
    for y in 1..=b {
        if !has_u(&u, None, Some(y)) {
            let pick = free.iter().position(|e| e.y == y)?;
            u.push(free.remove(pick));
        }
    }
    CdsInstance::new(format!("general-{seed}"), a, b, q, u).ok()
}

/// Small general instances plus path and cycle instances.
pub fn corpus() -> Vec<CdsInstance> {
    let mut out = Vec::new();
    let mut seed = 0;
    while out.len() < 40 {
        let (a, b) = (3 + (seed % 3) as u32, 3 + ((seed / 3) % 3) as u32);
        if let Some(i) = general_instance(seed, a, b, 0.35, 0.4) {
            if i.qualified().len() <= 12 {
                out.push(i);
            }
        }
        seed += 1;
    }
    for s in 0..20u64 {
        let n = 3 + (s % 4) as u32;
        out.push(random_instance(s, n, n, RandomShape::Cycle, 0.3).unwrap());
        out.push(random_instance(s, n + 1, n, RandomShape::Path, 0.3).unwrap());
    }
    out
}

/// rho by brute force over node sets: every simple unqualified path (any
/// endpoints) against every connected subset of qualified edges.
pub fn brute_force_rho(inst: &CdsInstance) -> Option<usize> {
    let n = inst.node_count();
    assert!(n <= 32 && inst.qualified().len() <= 16);
    let mut paths: HashSet<u32> = HashSet::new();
    fn extend(inst: &CdsInstance, v: usize, mask: u32, paths: &mut HashSet<u32>) {
        if mask.count_ones() >= 2 {
            paths.insert(mask);
        }
        for &w in inst.unqualified_neighbors(v) {
            if mask & (1 << w) == 0 {
                extend(inst, w, mask | (1 << w), paths);
            }
        }
    }
    for v in 0..n {
        extend(inst, v, 1 << v, &mut paths);
    }
    let q: Vec<(usize, usize)> = inst.qualified().iter().map(|&e| inst.edge_index(e)).collect();
    let mut best: Option<usize> = None;
    for subset in 1u32..(1 << q.len()) {
        let size = subset.count_ones() as usize;
        if best.is_some_and(|b| size >= b) {
            continue;
        }
        let edges: Vec<(usize, usize)> = (0..q.len()).filter(|i| subset & (1 << i) != 0).map(|i| q[i]).collect();
        // Grow one edge's node set until stable; connected iff every edge is absorbed.
        let mut covered = (1u32 << edges[0].0) | (1 << edges[0].1);
        let mut used = 1;
        let mut changed = true;
        let mut taken = vec![false; edges.len()];
        taken[0] = true;
        while changed {
            changed = false;
            for (i, &(x, y)) in edges.iter().enumerate() {
                if !taken[i] && covered & ((1 << x) | (1 << y)) != 0 {
                    taken[i] = true;
                    covered |= (1 << x) | (1 << y);
                    used += 1;
                    changed = true;
                }
            }
        }
        if used != edges.len() {
            continue;
        }
        let hit = paths.iter().any(|&p| {
            p & !covered == 0 && edges.iter().any(|&(x, y)| p & (1 << x) != 0 && p & (1 << y) != 0)
        });
        if hit {
            best = Some(size);
        }
    }
    best
}

/// Places `b` beside `a` with no edges between them.
pub fn disjoint_union(a: &CdsInstance, b: &CdsInstance) -> CdsInstance {
    let (da, db) = (a.a_count(), a.b_count());
    let shift = |e: &Edge| Edge::new(e.x + da, e.y + db);
    CdsInstance::new(
        format!("{}+{}", a.name(), b.name()),
        da + b.a_count(),
        db + b.b_count(),
        a.qualified().iter().copied().chain(b.qualified().iter().map(shift)),
        a.unqualified().iter().copied().chain(b.unqualified().iter().map(shift)),
    )
    .unwrap()
}

/// Seeded path and cycle instances (at most 14 nodes per component) with
/// finite rho that the construction accepts. Every fifth entry joins two
/// components.
pub fn synth_corpus(count: usize) -> Vec<CdsInstance> {
    use cds_core::graph::{qualified_components, rho, Rho, Shape};
    let accept = |i: &CdsInstance| match rho(i).value {
        Rho::Infinite => false,
        Rho::Finite(r) => qualified_components(i)
            .iter()
            .all(|c| c.shape != Shape::Cycle || c.nodes.len() as u64 >= r),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let draw = |rng: &mut ChaCha8Rng, seed: u64| -> CdsInstance {
        loop {
            let shape = if rng.gen_bool(0.5) { RandomShape::Path } else { RandomShape::Cycle };
            let a = rng.gen_range(3..=7u32);
            let b = match shape {
                RandomShape::Cycle => a,
                RandomShape::Path => a - rng.gen_range(0..=1u32),
            };
            let density = rng.gen_range(0.15..0.6);
            if let Ok(i) = random_instance(seed ^ rng.gen::<u64>(), a, b, shape, density) {
                if accept(&i) {
                    return i;
                }
            }
        }
    };
    (0..count as u64)
        .map(|s| {
            let first = draw(&mut rng, s);
            if s % 5 == 4 {
                let second = random_instance(rng.gen(), 3, 3, RandomShape::Path, 0.3).unwrap();
                let u = disjoint_union(&first, &second);
                assert!(accept(&u));
                u
            } else {
                first
            }
        })
        .collect()
}
