//! One PASS/FAIL line per acceptance criterion.
//!
//! Criteria listed in `KNOWN_UNMET` are expected to fail and are reported as
//! such; the target exits non-zero if any other criterion fails or if a
//! known-unmet one starts passing (so the list stays honest).

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use cds_core::bounds::linear_converse_bound;
use cds_core::catalog::{builtin_instance, builtin_pair};
use cds_core::ff::{cauchy_matrix, FieldMatrix, PrimeField};
use cds_core::graph::{
    internal_qualified_edge_candidates, min_connected_edge_cover, qualified_components, rho, CdsInstance, Edge,
    NodeId, Rho, Shape,
};
use cds_core::rational::Rate;
use cds_core::scheme::{entropic_oracle_edge, verify_linear, LinearScheme, OracleOutcome, Precoder, DEFAULT_ORACLE_BUDGET};
use cds_core::search::{random_scheme_search, SearchParams};
use cds_core::synth::{synthesize, synthesize_detailed, Payload};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The fig8 scheme cannot be checked by the entropic oracle: every edge needs
/// at least 13^16 states.
const KNOWN_UNMET: &[u32] = &[5];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 8] = [
        (1, "rho values and witnesses", c1_rho),
        (2, "converse bounds", c2_bounds),
        (3, "path/cycle synthesis pipeline", c3_pipeline),
        (4, "verifier equivalence", c4_equivalence),
        (5, "fixture schemes", c5_fixtures),
        (6, "search respects the converse bound", c6_search),
        (7, "Cauchy submatrices", c7_cauchy),
        (8, "structural synthesis claims", c8_structure),
    ];
    let mut unexpected = Vec::new();
    for (id, name, run) in criteria {
        let t = Instant::now();
        let o = run();
        let secs = t.elapsed().as_secs_f64();
        let known = KNOWN_UNMET.contains(&id);
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let note = if known && !o.pass { " [known unmet]" } else { "" };
        println!("criterion {id} ({name}): {tag}{note} - {} [{secs:.2}s]", o.detail);
        if o.pass == known {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}

fn c1_rho() -> Outcome {
    let t = Instant::now();
    let mut problems = Vec::new();
    let mut parts = Vec::new();
    for (name, want) in [("fig2", 5), ("fig5", 6), ("fig8", 5)] {
        let inst = builtin_instance(name).unwrap();
        let r = rho(&inst);
        let ok_witness = r.witness.as_ref().is_some_and(|w| w.check(&inst).is_ok() && w.size as u64 == want);
        if r.value != Rho::Finite(want) || !ok_witness || !r.exact {
            problems.push(format!("{name}: rho {} (want {want})", r.value));
        }
        parts.push(format!("{name}={}", r.value));
    }

    let fig5 = builtin_instance("fig5").unwrap();
    let comps = qualified_components(&fig5);
    let side = |v: NodeId| if comps[0].nodes.contains(&v) { 0 } else { 1 };
    let mut best = [usize::MAX; 2];
    for c in internal_qualified_edge_candidates(&fig5, fig5.node_count()) {
        if let Some(w) = min_connected_edge_cover(&fig5, c.edge, &c.path).witness {
            w.check(&fig5).unwrap();
            let s = side(c.edge.a());
            best[s] = best[s].min(w.size);
        }
    }
    if best != [6, 7] {
        problems.push(format!("fig5 per-component minima {best:?}, want [6, 7]"));
    }
    parts.push(format!("fig5 left {} / right {}", best[0], best[1]));

    let elapsed = t.elapsed();
    if elapsed > Duration::from_secs(10) {
        problems.push(format!("took {elapsed:?}"));
    }
    report(problems, parts.join(", "))
}

fn c2_bounds() -> Outcome {
    let mut problems = Vec::new();
    let mut parts = Vec::new();
    for (name, want) in [("fig2", Rate::new(2, 5)), ("fig5", Rate::new(5, 12)), ("fig8", Rate::new(2, 5)), ("fig9", Rate::new(2, 5))] {
        let b = linear_converse_bound(&builtin_instance(name).unwrap()).bound;
        if b != want {
            problems.push(format!("{name}: {b}"));
        }
        parts.push(format!("{name}={b}"));
    }
    let flat = CdsInstance::new(
        "no-internal-edge",
        3,
        3,
        [Edge::new(1, 1), Edge::new(2, 2), Edge::new(1, 2)],
        [Edge::new(2, 1), Edge::new(1, 3), Edge::new(3, 2), Edge::new(3, 3), Edge::new(2, 3), Edge::new(3, 1)],
    )
    .unwrap();
    let b = linear_converse_bound(&flat);
    if b.bound != Rate::new(1, 2) || b.witness.is_some() {
        problems.push(format!("rho-infinite instance: {}", b.bound));
    }
    parts.push(format!("rho-infinite={}", b.bound));
    report(problems, parts.join(", "))
}

fn c3_pipeline() -> Outcome {
    let t = Instant::now();
    let mut problems = Vec::new();
    let fig5 = builtin_instance("fig5").unwrap();
    match synthesize(&fig5) {
        Ok(s) if s.rate() == Rate::new(5, 12) && verify_linear(&fig5, &s).unwrap().overall => {}
        Ok(s) => problems.push(format!("fig5: rate {} or verification failed", s.rate())),
        Err(e) => problems.push(format!("fig5: {e}")),
    }
    let corpus = common::synth_corpus(200);
    let (mut edges, mut checked, mut oracle_fail) = (0, 0, 0);
    for inst in &corpus {
        let r = rho(inst).value.finite().unwrap();
        let s = match synthesize(inst) {
            Ok(s) => s,
            Err(e) => {
                problems.push(format!("{}: {e}", inst.name()));
                continue;
            }
        };
        if s.rate() != Rate::converse(r) || !verify_linear(inst, &s).unwrap().overall {
            problems.push(format!("{}: not verified at {}", inst.name(), Rate::converse(r)));
        }
        for (_, e) in inst.edges() {
            edges += 1;
            let o = entropic_oracle_edge(inst, &s, e, DEFAULT_ORACLE_BUDGET).unwrap();
            checked += o.checked() as usize;
            oracle_fail += o.failed() as usize;
        }
    }
    if oracle_fail > 0 {
        problems.push(format!("{oracle_fail} oracle failures"));
    }
    if t.elapsed() > Duration::from_secs(300) {
        problems.push(format!("took {:?}", t.elapsed()));
    }
    let vacuous = if checked == 0 { " (oracle clause vacuous: every edge exceeds the budget)" } else { "" };
    let max_nodes = corpus
        .iter()
        .flat_map(|i| qualified_components(i).into_iter().map(|c| c.nodes.len()))
        .max()
        .unwrap_or(0);
    report(
        problems,
        format!(
            "fig5 at 5/12 and {} random instances (components up to {max_nodes} nodes) verified; oracle within the {DEFAULT_ORACLE_BUDGET}-state budget on {checked} of {edges} edges, {oracle_fail} failures{vacuous}",
            corpus.len()
        ),
    )
}

/// A scheme whose oracle cost fits the budget on every edge, with its instance.
struct Case {
    label: String,
    inst: CdsInstance,
    scheme: LinearScheme,
}

fn full_row_rank(s: &LinearScheme) -> bool {
    s.nodes().values().all(|pc| pc.h.rank() == pc.h.rows())
}

/// Adds 1 to a random entry of a random precoder, keeping every `H_v` full rank.
fn perturb(s: &LinearScheme, rng: &mut ChaCha8Rng) -> LinearScheme {
    let p = s.field().modulus();
    loop {
        let mut t = s.clone();
        let nodes: Vec<NodeId> = t.nodes().keys().copied().collect();
        let v = nodes[rng.gen_range(0..nodes.len())];
        let pc = t.precoder_mut(v).unwrap();
        let m = if rng.gen_bool(0.7) { &mut pc.f } else { &mut pc.h };
        let (i, j) = (rng.gen_range(0..m.rows()), rng.gen_range(0..m.cols()));
        m.set(i, j, (m.get(i, j) + 1) % p);
        if full_row_rank(&t) {
            return t;
        }
    }
}

fn random_full_rank(field: PrimeField, rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> FieldMatrix {
    loop {
        let data = (0..rows * cols).map(|_| rng.gen_range(0..field.modulus())).collect();
        let m = FieldMatrix::new(field, rows, cols, data).unwrap();
        if m.rank() == rows {
            return m;
        }
    }
}

fn random_scheme(inst: &CdsInstance, p: u64, l: usize, n: usize, lz: usize, rng: &mut ChaCha8Rng) -> LinearScheme {
    let field = PrimeField::new(p).unwrap();
    let nodes: BTreeMap<NodeId, Precoder> = inst
        .nodes()
        .map(|v| {
            let data = (0..n * l).map(|_| rng.gen_range(0..p)).collect();
            let f = FieldMatrix::new(field, n, l, data).unwrap();
            (v, Precoder { f, h: random_full_rank(field, n, lz, rng) })
        })
        .collect();
    LinearScheme::new(field, l, lz, n, nodes).unwrap()
}

fn equivalence_corpus() -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut cases = Vec::new();
    let mut push = |label: String, inst: &CdsInstance, scheme: LinearScheme| {
        cases.push(Case { label, inst: inst.clone(), scheme });
    };
    for name in ["fig2-rate-2-5", "fig9-rate-3-8", "broken-leaky", "broken-undecodable"] {
        let (inst, s) = builtin_pair(name).unwrap();
        push(name.to_string(), &inst, s.clone());
        if name.starts_with("fig") {
            for k in 0..8 {
                push(format!("{name}~{k}"), &inst, perturb(&s, &mut rng));
            }
        }
    }
    // Searched schemes on small instances, each with two perturbations.
    let small: Vec<CdsInstance> = common::corpus().into_iter().filter(|i| i.node_count() <= 10).collect();
    let mut found = 0;
    for (k, inst) in small.iter().enumerate() {
        if found >= 12 {
            break;
        }
        let params = SearchParams::new(2, 1, 2, 4, k as u64, 20_000);
        if let Some(s) = random_scheme_search(inst, &params).unwrap().scheme {
            found += 1;
            push(format!("{}/search", inst.name()), inst, s.clone());
            for j in 0..2 {
                push(format!("{}/search~{j}", inst.name()), inst, perturb(&s, &mut rng));
            }
        }
    }
    // Uniformly random schemes, nearly all infeasible.
    for (k, inst) in small.iter().take(12).enumerate() {
        let p = if k % 2 == 0 { 2 } else { 3 };
        push(format!("{}/random", inst.name()), inst, random_scheme(inst, p, 1, 2, 3, &mut rng));
    }
    cases
}

fn c4_equivalence() -> Outcome {
    let cases = equivalence_corpus();
    let mut problems = Vec::new();
    let (mut pos, mut neg) = (0, 0);
    for c in &cases {
        assert!(full_row_rank(&c.scheme));
        let linear = verify_linear(&c.inst, &c.scheme).unwrap().overall;
        let mut entropic = true;
        for (_, e) in c.inst.edges() {
            match entropic_oracle_edge(&c.inst, &c.scheme, e, DEFAULT_ORACLE_BUDGET).unwrap() {
                OracleOutcome::NotChecked { states_needed, .. } => {
                    problems.push(format!("{}: {e} needs {states_needed} states", c.label));
                }
                o => entropic &= o.passed(),
            }
        }
        if linear != entropic {
            problems.push(format!("{}: linear {linear}, entropic {entropic}", c.label));
        }
        if linear {
            pos += 1;
        } else {
            neg += 1;
        }
    }
    if cases.len() < 50 || pos < 10 || neg < 10 {
        problems.push(format!("corpus too small: {} schemes, {pos} feasible, {neg} infeasible", cases.len()));
    }
    report(problems, format!("{} schemes ({pos} feasible, {neg} infeasible), verdicts agree on all", cases.len()))
}

fn c5_fixtures() -> Outcome {
    let mut problems = Vec::new();
    let mut parts = Vec::new();
    for (name, l, n, p, rate) in [("fig2-rate-2-5", 4, 5, 3, Rate::new(2, 5)), ("fig8-rate-7-18", 7, 9, 13, Rate::new(7, 18))] {
        let (inst, s) = builtin_pair(name).unwrap();
        if (s.secret_len(), s.signal_len(), s.field().modulus()) != (l, n, p) || s.rate() != rate {
            problems.push(format!("{name}: wrong parameters"));
        }
        let linear = verify_linear(&inst, &s).unwrap().overall;
        let (mut passed, mut failed, mut unchecked, mut total) = (0, 0, 0, 0);
        for (_, e) in inst.edges() {
            total += 1;
            match entropic_oracle_edge(&inst, &s, e, DEFAULT_ORACLE_BUDGET).unwrap() {
                o if o.passed() => passed += 1,
                o if o.failed() => failed += 1,
                _ => unchecked += 1,
            }
        }
        if !linear {
            problems.push(format!("{name}: verify_linear fails"));
        }
        if passed != total {
            problems.push(format!("{name}: oracle passed {passed}/{total} edges ({failed} failed, {unchecked} over budget)"));
        }
        parts.push(format!("{name} rate {}, linear {}, oracle {passed}/{total}", s.rate(), if linear { "pass" } else { "fail" }));
    }
    report(problems, parts.join("; "))
}

fn c6_search() -> Outcome {
    let mut problems = Vec::new();
    let mut instances: Vec<CdsInstance> = ["fig2", "fig5", "fig8", "fig9"].iter().map(|n| builtin_instance(n).unwrap()).collect();
    instances.extend(common::corpus().into_iter().filter(|i| rho(i).value.finite().is_some()).take(16));
    let (mut runs, mut returned) = (0, 0);
    for (k, inst) in instances.iter().enumerate() {
        let r = rho(inst).value.finite().unwrap() as usize;
        let bound = Rate::converse(r as u64);
        for (l, n) in [(r, r + 1), (r, r)] {
            assert!(Rate::of_scheme(l, n) > bound);
            let mut params = SearchParams::new(5, l, n, 2 * n, k as u64, 100_000);
            params.parallel = true;
            runs += 1;
            if let Some(s) = random_scheme_search(inst, &params).unwrap().scheme {
                returned += 1;
                let ok = verify_linear(inst, &s).unwrap().overall;
                problems.push(format!("{}: scheme at {} above {bound} (verifies: {ok})", inst.name(), s.rate()));
            }
        }
        // At or below the bound anything returned must verify.
        let params = SearchParams::new(5, r - 1, r, 2 * r, k as u64, 20_000);
        if let Some(s) = random_scheme_search(inst, &params).unwrap().scheme {
            returned += 1;
            if !verify_linear(inst, &s).unwrap().overall {
                problems.push(format!("{}: unverified scheme returned", inst.name()));
            }
        }
    }
    report(
        problems,
        format!("{runs} searches above the bound on {} instances returned none; {returned} schemes returned at the bound, all verified", instances.len()),
    )
}

/// Determinant by permutation expansion, independent of the elimination code.
fn leibniz(m: &[Vec<u64>], p: u64) -> u64 {
    let k = m.len();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut total = 0u64;
    fn permutations(perm: &mut Vec<usize>, i: usize, out: &mut Vec<Vec<usize>>) {
        if i == perm.len() {
            out.push(perm.clone());
            return;
        }
        for j in i..perm.len() {
            perm.swap(i, j);
            permutations(perm, i + 1, out);
            perm.swap(i, j);
        }
    }
    let mut all = Vec::new();
    permutations(&mut perm, 0, &mut all);
    for sigma in all {
        let inversions = (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).filter(|&(a, b)| sigma[a] > sigma[b]).count();
        let term = (0..k).fold(1u64, |acc, i| acc * m[i][sigma[i]] % p);
        total = if inversions % 2 == 0 { (total + term) % p } else { (total + p - term) % p };
    }
    total
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect())
        .collect()
}

fn c7_cauchy() -> Outcome {
    let t = Instant::now();
    let mut problems = Vec::new();
    let mut checked = 0u64;
    let mut skipped = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for p in [11u64, 13, 17] {
        let field = PrimeField::new(p).unwrap();
        for rows in 1..=5 {
            for cols in 1..=7 {
                if (rows + cols) as u64 > p {
                    // Needs more distinct parameters than the field has elements.
                    skipped.push(format!("{rows}x{cols} over F_{p}"));
                    continue;
                }
                // Consecutive parameters, then a random distinct draw.
                let mut params: Vec<Vec<u64>> = vec![(0..(rows + cols) as u64).collect()];
                let mut pool: Vec<u64> = (0..p).collect();
                for i in 0..rows + cols {
                    let j = rng.gen_range(i..pool.len());
                    pool.swap(i, j);
                }
                params.push(pool[..rows + cols].to_vec());
                for v in params {
                    let (xs, ys) = v.split_at(rows);
                    let c = cauchy_matrix(xs, ys, field).unwrap();
                    for (i, &x) in xs.iter().enumerate() {
                        for (j, &y) in ys.iter().enumerate() {
                            if c.get(i, j) * ((x + p - y) % p) % p != 1 {
                                problems.push(format!("p={p}: entry ({i},{j}) is not 1/(x-y)"));
                            }
                        }
                    }
                    for k in 1..=rows.min(cols).min(4) {
                        for r in subsets(rows, k) {
                            for s in subsets(cols, k) {
                                let sub: Vec<Vec<u64>> = r.iter().map(|&i| s.iter().map(|&j| c.get(i, j)).collect()).collect();
                                checked += 1;
                                if leibniz(&sub, p) == 0 {
                                    problems.push(format!("p={p} {rows}x{cols}: singular {k}x{k} at {r:?},{s:?}"));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    if t.elapsed() > Duration::from_secs(30) {
        problems.push(format!("took {:?}", t.elapsed()));
    }
    let mut summary = format!("{checked} square submatrices over p in {{11, 13, 17}}, all nonsingular");
    if !skipped.is_empty() {
        summary += &format!("; {} impossible (fewer than rows+cols field elements)", skipped.join(", "));
    }
    report(problems, summary)
}

fn c8_structure() -> Outcome {
    let mut problems = Vec::new();
    let mut corpus = vec![builtin_instance("fig5").unwrap()];
    corpus.extend(common::synth_corpus(200));
    let (mut symbols, mut edges) = (0, 0);
    for inst in &corpus {
        let d = synthesize_detailed(inst).unwrap();
        let r = d.rho as usize;
        for (layout, table) in &d.components {
            for j in layout.indices() {
                symbols += 1;
                if layout.holders(j).len() > r {
                    problems.push(format!("{}: noise {j} at {} nodes", inst.name(), layout.holders(j).len()));
                }
            }
            let t = &layout.traversal;
            let mut pairs: Vec<(NodeId, NodeId)> = t.windows(2).map(|w| (w[0], w[1])).collect();
            if layout.shape == Shape::Cycle {
                pairs.push((t[t.len() - 1], t[0]));
            }
            for (v, u) in pairs {
                edges += 1;
                debug_assert!(Edge::between(v, u).is_some_and(|e| inst.qualified().contains(&e)));
                let (wv, wu) = (layout.window(v).unwrap(), layout.window(u).unwrap());
                let shared: Vec<usize> = wv.iter().copied().filter(|j| wu.contains(j)).collect();
                if shared.len() != r - 1 {
                    problems.push(format!("{}: {v}-{u} shares {} symbols", inst.name(), shared.len()));
                }
                for j in shared {
                    let same = table.coefficient(j, v) == table.coefficient(j, u);
                    if same || table.entries[&j].payload == Payload::None {
                        problems.push(format!("{}: {v}-{u} symbol {j} not separated", inst.name()));
                    }
                }
            }
        }
    }
    report(problems, format!("{} instances, {symbols} noise symbols, {edges} qualified edges", corpus.len()))
}

fn report(problems: Vec<String>, summary: String) -> Outcome {
    if problems.is_empty() {
        outcome(true, summary)
    } else {
        let shown: Vec<&str> = problems.iter().take(4).map(String::as_str).collect();
        outcome(false, format!("{summary}; {}", shown.join("; ")))
    }
}
