//! Monte Carlo smoke test: sample `(S, Z)`, run Carol's linear decoder on
//! qualified edges and tabulate what she can see on unqualified ones.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::LinearScheme;
use crate::error::Result;
use crate::ff::{rowspace_intersection, FieldMatrix};
use crate::graph::{CdsInstance, Edge, EdgeKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QualifiedStats {
    pub edge: Edge,
    pub trials: u64,
    pub successes: u64,
}

impl QualifiedStats {
    pub fn all_decoded(&self) -> bool {
        self.successes == self.trials
    }
}

/// Counts of the first secret symbol, grouped by the noise-free combination
/// `P_v X_v - P_u X_u` Carol can form from the two signals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnqualifiedStats {
    pub edge: Edge,
    pub trials: u64,
    /// Keyed by the observed combination; each row has `p` counts.
    pub first_symbol_counts: BTreeMap<String, Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimulationReport {
    pub seed: u64,
    pub trials: u64,
    pub qualified: Vec<QualifiedStats>,
    pub unqualified: Vec<UnqualifiedStats>,
}

struct EdgeView {
    edge: Edge,
    kind: EdgeKind,
    proj_a: FieldMatrix,
    proj_b: FieldMatrix,
    decoder: FieldMatrix,
}

pub fn simulate(inst: &CdsInstance, scheme: &LinearScheme, seed: u64, trials: u64) -> Result<SimulationReport> {
    scheme.check_shape(inst)?;
    let mut report = SimulationReport {
        seed,
        trials,
        qualified: Vec::new(),
        unqualified: Vec::new(),
    };
    if trials == 0 {
        return Ok(report);
    }
    let field = scheme.field();
    let p = field.modulus();
    let mut views = Vec::new();
    for (kind, e) in inst.edges() {
        let pa = &scheme.nodes()[&e.a()];
        let pb = &scheme.nodes()[&e.b()];
        let meet = rowspace_intersection(&pa.h, &pb.h)?;
        let decoder = meet.proj_a.mul(&pa.f)?.sub(&meet.proj_b.mul(&pb.f)?)?;
        views.push(EdgeView {
            edge: e,
            kind,
            proj_a: meet.proj_a,
            proj_b: meet.proj_b,
            decoder,
        });
    }
    let mut successes = vec![0u64; views.len()];
    let mut tables: Vec<BTreeMap<String, Vec<u64>>> = vec![BTreeMap::new(); views.len()];

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let s: Vec<u64> = (0..scheme.secret_len()).map(|_| rng.gen_range(0..p)).collect();
        let z: Vec<u64> = (0..scheme.noise_len()).map(|_| rng.gen_range(0..p)).collect();
        for (k, view) in views.iter().enumerate() {
            let xa = scheme.signal(view.edge.a(), &s, &z).expect("shape checked");
            let xb = scheme.signal(view.edge.b(), &s, &z).expect("shape checked");
            let ya = view.proj_a.apply(&xa);
            let yb = view.proj_b.apply(&xb);
            let t: Vec<u64> = ya.iter().zip(&yb).map(|(&a, &b)| field.sub(a, b)).collect();
            match view.kind {
                EdgeKind::Qualified => {
                    if view.decoder.solve(&t).as_deref() == Some(&s[..]) {
                        successes[k] += 1;
                    }
                }
                EdgeKind::Unqualified => {
                    let row = tables[k].entry(format!("{t:?}")).or_insert_with(|| vec![0; p as usize]);
                    if let Some(&s0) = s.first() {
                        row[s0 as usize] += 1;
                    }
                }
            }
        }
    }
    for ((view, ok), table) in views.iter().zip(successes).zip(tables) {
        match view.kind {
            EdgeKind::Qualified => report.qualified.push(QualifiedStats {
                edge: view.edge,
                trials,
                successes: ok,
            }),
            EdgeKind::Unqualified => report.unqualified.push(UnqualifiedStats {
                edge: view.edge,
                trials,
                first_symbol_counts: table,
            }),
        }
    }
    Ok(report)
}
