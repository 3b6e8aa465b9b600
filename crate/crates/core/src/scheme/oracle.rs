//! Exhaustive check of decodability and perfect secrecy on a single edge.
//!
//! Enumerates every secret and every assignment of the noise coordinates the
//! two signals actually depend on, and tabulates the resulting signal pairs.
//! Noise coordinates outside the support of both `H` matrices do not affect
//! either signal, so leaving them out changes every count by the same factor.

use std::hash::Hash;

use rustc_hash::FxHashMap;
use serde::Serialize;

use super::LinearScheme;
use crate::error::{Error, Result};
use crate::graph::{CdsInstance, Edge, EdgeKind};

pub const DEFAULT_ORACLE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum OracleOutcome {
    Pass {
        states: u64,
    },
    /// Qualified edge: one signal pair arises from two different secrets.
    Ambiguous {
        states: u64,
        signal: Vec<u64>,
        secret_a: Vec<u64>,
        secret_b: Vec<u64>,
    },
    /// Unqualified edge: a signal pair is more or less likely under `secret`
    /// than under the all-zero secret.
    Leak {
        states: u64,
        signal: Vec<u64>,
        secret: Vec<u64>,
        count: u64,
        zero_secret_count: u64,
    },
    /// `p^(L+m)` exceeds the budget; nothing was enumerated.
    NotChecked {
        /// Saturates at `u64::MAX`.
        states_needed: u64,
        budget: u64,
    },
}

impl OracleOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, OracleOutcome::Pass { .. })
    }

    pub fn failed(&self) -> bool {
        matches!(self, OracleOutcome::Ambiguous { .. } | OracleOutcome::Leak { .. })
    }

    pub fn checked(&self) -> bool {
        !matches!(self, OracleOutcome::NotChecked { .. })
    }
}

impl std::fmt::Display for OracleOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OracleOutcome::Pass { states } => write!(f, "pass ({states} states)"),
            OracleOutcome::Ambiguous {
                signal,
                secret_a,
                secret_b,
                ..
            } => write!(f, "fail: signals {signal:?} arise from secrets {secret_a:?} and {secret_b:?}"),
            OracleOutcome::Leak {
                signal,
                secret,
                count,
                zero_secret_count,
                ..
            } => write!(
                f,
                "fail: signals {signal:?} occur {count} times under secret {secret:?} but {zero_secret_count} times under the zero secret"
            ),
            OracleOutcome::NotChecked { states_needed, budget } => {
                write!(f, "not checked ({states_needed} states exceed budget {budget})")
            }
        }
    }
}

trait SignalKey: Hash + Eq + Clone {
    fn pack(sig: &[u64], p: u64) -> Self;
    fn unpack(&self, p: u64, len: usize) -> Vec<u64>;
}

impl SignalKey for u128 {
    fn pack(sig: &[u64], p: u64) -> Self {
        sig.iter().fold(0u128, |acc, &x| acc * p as u128 + x as u128)
    }

    fn unpack(&self, p: u64, len: usize) -> Vec<u64> {
        let mut k = *self;
        let mut out = vec![0; len];
        for slot in out.iter_mut().rev() {
            *slot = (k % p as u128) as u64;
            k /= p as u128;
        }
        out
    }
}

impl SignalKey for Vec<u64> {
    fn pack(sig: &[u64], _: u64) -> Self {
        sig.to_vec()
    }

    fn unpack(&self, _: u64, _: usize) -> Vec<u64> {
        self.clone()
    }
}

pub fn entropic_oracle_edge(
    inst: &CdsInstance,
    scheme: &LinearScheme,
    edge: Edge,
    budget: u64,
) -> Result<OracleOutcome> {
    scheme.check_shape(inst)?;
    let kind = inst
        .edge_kind(edge)
        .ok_or_else(|| Error::Validation(format!("{edge} is not an edge of {}", inst.name())))?;
    let pv = &scheme.nodes()[&edge.a()];
    let pu = &scheme.nodes()[&edge.b()];
    let n = scheme.signal_len();
    let p = scheme.field().modulus();

    let stacked_col = |m: &crate::ff::FieldMatrix, m2: &crate::ff::FieldMatrix, c: usize| -> Vec<u64> {
        (0..n).map(|i| m.get(i, c)).chain((0..n).map(|i| m2.get(i, c))).collect()
    };
    let secret_cols: Vec<Vec<u64>> = (0..scheme.secret_len())
        .map(|c| stacked_col(&pv.f, &pu.f, c))
        .collect();
    let noise_cols: Vec<Vec<u64>> = (0..scheme.noise_len())
        .map(|c| stacked_col(&pv.h, &pu.h, c))
        .filter(|col| col.iter().any(|&x| x != 0))
        .collect();

    let digits = (secret_cols.len() + noise_cols.len()) as u32;
    let states = (p as u128).checked_pow(digits).unwrap_or(u128::MAX);
    if states > budget as u128 {
        return Ok(OracleOutcome::NotChecked {
            states_needed: u64::try_from(states).unwrap_or(u64::MAX),
            budget,
        });
    }
    let fits_u128 = (p as u128).checked_pow(2 * n as u32).is_some();
    let job = Job {
        p,
        secret_cols: &secret_cols,
        noise_cols: &noise_cols,
        states: states as u64,
        len: 2 * n,
    };
    Ok(match (kind, fits_u128) {
        (EdgeKind::Qualified, true) => job.qualified::<u128>(),
        (EdgeKind::Qualified, false) => job.qualified::<Vec<u64>>(),
        (EdgeKind::Unqualified, true) => job.unqualified::<u128>(),
        (EdgeKind::Unqualified, false) => job.unqualified::<Vec<u64>>(),
    })
}

struct Job<'a> {
    p: u64,
    secret_cols: &'a [Vec<u64>],
    noise_cols: &'a [Vec<u64>],
    states: u64,
    len: usize,
}

/// Advances a base-`p` odometer, adding the column of every digit that moves
/// (a wrap from `p-1` to `0` is also `+1 mod p`). Returns false after the last state.
fn step(digits: &mut [u64], cols: &[Vec<u64>], acc: &mut [u64], p: u64) -> bool {
    for k in (0..digits.len()).rev() {
        for (a, &c) in acc.iter_mut().zip(&cols[k]) {
            let t = *a + c;
            *a = if t >= p { t - p } else { t };
        }
        digits[k] += 1;
        if digits[k] < p {
            return true;
        }
        digits[k] = 0;
    }
    false
}

impl Job<'_> {
    /// Calls `visit(secret_digits, histogram)` once per secret with the
    /// distribution of signals over all noise values.
    fn for_each_secret<K: SignalKey>(&self, mut visit: impl FnMut(&[u64], FxHashMap<K, u64>) -> bool) {
        let p = self.p;
        let mut s = vec![0u64; self.secret_cols.len()];
        let mut base = vec![0u64; self.len];
        loop {
            let mut hist: FxHashMap<K, u64> = FxHashMap::default();
            let mut z = vec![0u64; self.noise_cols.len()];
            let mut sig = base.clone();
            loop {
                *hist.entry(K::pack(&sig, p)).or_insert(0) += 1;
                if !step(&mut z, self.noise_cols, &mut sig, p) {
                    break;
                }
            }
            if !visit(&s, hist) {
                return;
            }
            if !step(&mut s, self.secret_cols, &mut base, p) {
                return;
            }
        }
    }

    fn qualified<K: SignalKey>(&self) -> OracleOutcome {
        // Signal -> ordinal of the secret that produced it (odometer order).
        let mut owner: FxHashMap<K, u64> = FxHashMap::default();
        let mut ordinal = 0u64;
        let mut bad = None;
        self.for_each_secret::<K>(|s, hist| {
            for key in hist.into_keys() {
                if let Some(&prev) = owner.get(&key) {
                    bad = Some((key, prev, s.to_vec()));
                    return false;
                }
                owner.insert(key, ordinal);
            }
            ordinal += 1;
            true
        });
        match bad {
            None => OracleOutcome::Pass { states: self.states },
            Some((key, a, b)) => OracleOutcome::Ambiguous {
                states: self.states,
                signal: key.unpack(self.p, self.len),
                secret_a: u128::from(a).unpack(self.p, self.secret_cols.len()),
                secret_b: b,
            },
        }
    }

    fn unqualified<K: SignalKey>(&self) -> OracleOutcome {
        let mut reference: Option<FxHashMap<K, u64>> = None;
        let mut bad = None;
        self.for_each_secret::<K>(|s, hist| {
            let Some(r) = &reference else {
                reference = Some(hist);
                return true;
            };
            let diff = hist
                .iter()
                .find(|(k, c)| r.get(*k) != Some(*c))
                .map(|(k, &c)| (k.clone(), c, r.get(k).copied().unwrap_or(0)))
                .or_else(|| {
                    r.iter()
                        .find(|(k, _)| !hist.contains_key(*k))
                        .map(|(k, &c)| (k.clone(), 0, c))
                });
            match diff {
                None => true,
                Some((key, count, zero)) => {
                    bad = Some((key, s.to_vec(), count, zero));
                    false
                }
            }
        });
        match bad {
            None => OracleOutcome::Pass { states: self.states },
            Some((key, secret, count, zero_secret_count)) => OracleOutcome::Leak {
                states: self.states,
                signal: key.unpack(self.p, self.len),
                secret,
                count,
                zero_secret_count,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(q: bool) -> CdsInstance {
        let (qs, us) = if q {
            (vec![Edge::new(1, 1)], vec![Edge::new(1, 2), Edge::new(2, 1)])
        } else {
            (vec![], vec![Edge::new(1, 1), Edge::new(2, 2)])
        };
        CdsInstance::new("pair", 2, 2, qs, us).unwrap()
    }

    fn scheme(p: u64, lz: usize, a1: (&str, &str), b1: (&str, &str)) -> LinearScheme {
        let node = |(f, h): (&str, &str)| format!(r#"{{"F":{f},"H":{h}}}"#);
        let filler = node(("[[0]]", &format!("[[{}]]", vec!["1"; lz].join(","))));
        let text = format!(
            r#"{{"p":{p},"L":1,"Lz":{lz},"N":1,"nodes":{{"A1":{},"B1":{},"A2":{filler},"B2":{filler}}}}}"#,
            node(a1),
            node(b1)
        );
        LinearScheme::from_json(&text).unwrap()
    }

    #[test]
    fn leak_over_f2() {
        // A1 = s + z1, B1 = z1. z2 is never referenced, so 2^2 states suffice.
        let s = scheme(2, 2, ("[[1]]", "[[1,0]]"), ("[[0]]", "[[1,0]]"));
        let out = entropic_oracle_edge(&pair(false), &s, Edge::new(1, 1), 1000).unwrap();
        match out {
            OracleOutcome::Leak { states, count, zero_secret_count, .. } => {
                assert_eq!(states, 4);
                assert_ne!(count, zero_secret_count);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn leak_needs_all_eight_states() {
        // A1 = s + z1 + z2, B1 = z1 + z2: the difference reveals s; 2^3 states.
        let s = scheme(2, 2, ("[[1]]", "[[1,1]]"), ("[[0]]", "[[1,1]]"));
        let out = entropic_oracle_edge(&pair(false), &s, Edge::new(1, 1), 1000).unwrap();
        assert!(matches!(out, OracleOutcome::Leak { states: 8, .. }), "{out:?}");
    }

    #[test]
    fn hidden_secret_passes() {
        // A1 = s + z1, B1 = z2: independent of s.
        let s = scheme(3, 2, ("[[1]]", "[[1,0]]"), ("[[0]]", "[[0,1]]"));
        let out = entropic_oracle_edge(&pair(false), &s, Edge::new(1, 1), 1000).unwrap();
        assert_eq!(out, OracleOutcome::Pass { states: 27 });
    }

    #[test]
    fn qualified_decoding() {
        let good = scheme(3, 1, ("[[1]]", "[[1]]"), ("[[0]]", "[[1]]"));
        assert!(entropic_oracle_edge(&pair(true), &good, Edge::new(1, 1), 1000).unwrap().passed());
        let bad = scheme(3, 2, ("[[1]]", "[[1,0]]"), ("[[0]]", "[[0,1]]"));
        let out = entropic_oracle_edge(&pair(true), &bad, Edge::new(1, 1), 1000).unwrap();
        assert!(matches!(out, OracleOutcome::Ambiguous { .. }), "{out:?}");
    }

    #[test]
    fn budget_is_explicit() {
        let s = scheme(3, 2, ("[[1]]", "[[1,0]]"), ("[[0]]", "[[0,1]]"));
        let out = entropic_oracle_edge(&pair(false), &s, Edge::new(1, 1), 26).unwrap();
        assert_eq!(out, OracleOutcome::NotChecked { states_needed: 27, budget: 26 });
        assert!(!out.passed() && !out.failed());
    }
}
