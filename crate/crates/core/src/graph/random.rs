use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CdsInstance, Edge};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomShape {
    Path,
    Cycle,
}

/// A random instance whose qualified edges form one Hamiltonian path or cycle.
///
/// Unqualified edges are sampled independently among the remaining pairs,
/// then nodes left without one are repaired, pairing two such nodes with a
/// single edge whenever possible.
pub fn random_instance(
    seed: u64,
    a_count: u32,
    b_count: u32,
    shape: RandomShape,
    density: f64,
) -> Result<CdsInstance> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::Generate(format!("density {density} outside [0, 1]")));
    }
    let ok = match shape {
        RandomShape::Path => a_count.abs_diff(b_count) <= 1 && a_count + b_count >= 2,
        RandomShape::Cycle => a_count == b_count && a_count >= 2,
    };
    if !ok {
        return Err(Error::Generate(format!(
            "{a_count} A-nodes and {b_count} B-nodes cannot form a qualified {}",
            if shape == RandomShape::Path { "path" } else { "cycle" }
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a: Vec<u32> = (1..=a_count).collect();
    let mut b: Vec<u32> = (1..=b_count).collect();
    a.shuffle(&mut rng);
    b.shuffle(&mut rng);

    // Interleave, starting with the larger side.
    let mut qualified = Vec::new();
    let a_first = a_count > b_count || (a_count == b_count && rng.gen_bool(0.5));
    let n = (a_count + b_count) as usize;
    let at = |k: usize| -> (bool, u32) {
        let is_a = (k % 2 == 0) == a_first;
        (is_a, if is_a { a[k / 2] } else { b[k / 2] })
    };
    let join = |k: usize, l: usize| -> Edge {
        match (at(k), at(l)) {
            ((true, x), (false, y)) | ((false, y), (true, x)) => Edge::new(x, y),
            _ => unreachable!("interleaving alternates sides"),
        }
    };
    for k in 0..n - 1 {
        qualified.push(join(k, k + 1));
    }
    if shape == RandomShape::Cycle {
        qualified.push(join(n - 1, 0));
    }
    qualified.sort_unstable();

    let mut unqualified = Vec::new();
    let mut has_u = vec![false; n];
    let a_len = a_count as usize;
    let idx = |e: &Edge| ((e.x - 1) as usize, a_len + (e.y - 1) as usize);
    for x in 1..=a_count {
        for y in 1..=b_count {
            let e = Edge::new(x, y);
            if qualified.binary_search(&e).is_err() && rng.gen_bool(density) {
                unqualified.push(e);
                let (i, j) = idx(&e);
                has_u[i] = true;
                has_u[j] = true;
            }
        }
    }
    for i in 0..n {
        if has_u[i] {
            continue;
        }
        let options: Vec<Edge> = if i < a_len {
            (1..=b_count).map(|y| Edge::new(i as u32 + 1, y)).collect()
        } else {
            (1..=a_count).map(|x| Edge::new(x, (i - a_len) as u32 + 1)).collect()
        };
        let free: Vec<Edge> = options
            .into_iter()
            .filter(|e| qualified.binary_search(e).is_err() && !unqualified.contains(e))
            .collect();
        let lonely: Vec<Edge> = free
            .iter()
            .copied()
            .filter(|e| {
                let (p, q) = idx(e);
                !has_u[if p == i { q } else { p }]
            })
            .collect();
        let pick = lonely.choose(&mut rng).or_else(|| free.choose(&mut rng)).copied();
        let Some(e) = pick else {
            return Err(Error::Generate(format!(
                "node {} has no pair left for an unqualified edge",
                if i < a_len { format!("A{}", i + 1) } else { format!("B{}", i - a_len + 1) }
            )));
        };
        let (p, q) = idx(&e);
        has_u[p] = true;
        has_u[q] = true;
        unqualified.push(e);
    }
    let name = format!(
        "random-{}-{a_count}x{b_count}-seed{seed}",
        if shape == RandomShape::Path { "path" } else { "cycle" }
    );
    CdsInstance::new(name, a_count, b_count, qualified, unqualified)
}
