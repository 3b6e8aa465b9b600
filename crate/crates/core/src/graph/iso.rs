use super::{CdsInstance, Edge, EdgeKind};

/// Whether `a` and `b` differ only by renaming nodes within each side, or by
/// additionally exchanging the roles of the two sides. Edge colours must match.
pub fn isomorphic(a: &CdsInstance, b: &CdsInstance) -> bool {
    let ma = kinds(a);
    let mb = kinds(b);
    same_up_to_permutation(&ma, &mb) || same_up_to_permutation(&ma, &transpose(&mb))
}

/// `m[x][y]`: 0 for no edge, 1 qualified, 2 unqualified.
fn kinds(inst: &CdsInstance) -> Vec<Vec<u8>> {
    (1..=inst.a_count())
        .map(|x| {
            (1..=inst.b_count())
                .map(|y| match inst.edge_kind(Edge::new(x, y)) {
                    None => 0,
                    Some(EdgeKind::Qualified) => 1,
                    Some(EdgeKind::Unqualified) => 2,
                })
                .collect()
        })
        .collect()
}

fn transpose(m: &[Vec<u8>]) -> Vec<Vec<u8>> {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols).map(|j| m.iter().map(|r| r[j]).collect()).collect()
}

fn row_profile(row: &[u8]) -> [usize; 3] {
    let mut c = [0; 3];
    for &k in row {
        c[k as usize] += 1;
    }
    c
}

fn same_up_to_permutation(a: &[Vec<u8>], b: &[Vec<u8>]) -> bool {
    if a.len() != b.len() || a.first().map(Vec::len) != b.first().map(Vec::len) {
        return false;
    }
    let profiles = |m: &[Vec<u8>]| {
        let mut p: Vec<[usize; 3]> = m.iter().map(|r| row_profile(r)).collect();
        p.sort_unstable();
        p
    };
    if profiles(a) != profiles(b) || profiles(&transpose(a)) != profiles(&transpose(b)) {
        return false;
    }
    let mut used = vec![false; b.len()];
    let mut order = Vec::with_capacity(a.len());
    extend(a, b, &mut used, &mut order)
}

/// Maps rows of `a` to rows of `b` one at a time, keeping the multiset of
/// partial columns equal so that some column bijection can still exist.
fn extend(a: &[Vec<u8>], b: &[Vec<u8>], used: &mut [bool], order: &mut Vec<usize>) -> bool {
    let k = order.len();
    if k == a.len() {
        return true;
    }
    for cand in 0..b.len() {
        if used[cand] || row_profile(&a[k]) != row_profile(&b[cand]) {
            continue;
        }
        order.push(cand);
        if partial_columns_match(a, b, order) {
            used[cand] = true;
            if extend(a, b, used, order) {
                return true;
            }
            used[cand] = false;
        }
        order.pop();
    }
    false
}

fn partial_columns_match(a: &[Vec<u8>], b: &[Vec<u8>], order: &[usize]) -> bool {
    let cols = a[0].len();
    let column = |m: &[Vec<u8>], rows: &mut dyn Iterator<Item = usize>, j: usize| -> Vec<u8> {
        rows.map(|i| m[i][j]).collect()
    };
    let mut ca: Vec<Vec<u8>> = (0..cols).map(|j| column(a, &mut (0..order.len()), j)).collect();
    let mut cb: Vec<Vec<u8>> = (0..cols).map(|j| column(b, &mut order.iter().copied(), j)).collect();
    ca.sort_unstable();
    cb.sort_unstable();
    ca == cb
}
