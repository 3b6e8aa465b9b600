//! The converse bound from rho and a capacity verdict per instance.

use std::fmt;

use serde::Serialize;

use crate::catalog;
use crate::graph::{isomorphic, qualified_components, rho, CdsInstance, CoverWitness, Rho, Shape};
use crate::rational::Rate;
use crate::scheme::verify_linear;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConverseBound {
    pub bound: Rate,
    pub rho: Rho,
    pub witness: Option<CoverWitness>,
}

/// `(rho-1)/(2 rho)` with its witness; exactly `1/2` when rho is infinite.
pub fn linear_converse_bound(inst: &CdsInstance) -> ConverseBound {
    let r = rho(inst);
    let bound = match r.value {
        Rho::Finite(v) => Rate::converse(v),
        Rho::Infinite => Rate::new(1, 2),
    };
    ConverseBound {
        bound,
        rho: r.value,
        witness: r.witness,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Exact {
        value: Rate,
        reason: String,
    },
    BoundedAbove {
        value: Rate,
        /// Best verified catalog rate, when one exists.
        achieved: Option<Rate>,
        /// Set when a known scheme sits strictly below the bound and nothing closes the gap.
        open: bool,
        reason: String,
    },
}

impl Verdict {
    pub fn value(&self) -> Rate {
        match self {
            Verdict::Exact { value, .. } | Verdict::BoundedAbove { value, .. } => *value,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Exact { value, reason } => write!(f, "exact {value} ({reason})"),
            Verdict::BoundedAbove {
                value,
                achieved,
                open,
                reason,
            } => {
                write!(f, "at most {value}")?;
                if let Some(a) = achieved {
                    write!(f, ", at least {a}")?;
                }
                if *open {
                    f.write_str(", open")?;
                }
                write!(f, " ({reason})")
            }
        }
    }
}

/// Known capacities that the general bound does not reach.
const SPECIAL: &[(&str, u64, u64)] = &[("fig8", 7, 18)];

pub fn classify_linear_capacity(inst: &CdsInstance) -> Verdict {
    let cb = linear_converse_bound(inst);
    let Rho::Finite(r) = cb.rho else {
        return Verdict::Exact {
            value: cb.bound,
            reason: "no internal qualified edge, so rate 1/2 is achievable".into(),
        };
    };
    if qualified_components(inst)
        .iter()
        .all(|c| matches!(c.shape, Shape::Path | Shape::Cycle))
    {
        return Verdict::Exact {
            value: cb.bound,
            reason: format!("every qualified component is a path or cycle and rho = {r}"),
        };
    }
    for &(name, num, den) in SPECIAL {
        if let Ok(known) = catalog::builtin_instance(name) {
            if isomorphic(inst, &known) {
                return Verdict::Exact {
                    value: Rate::new(num, den),
                    reason: format!("isomorphic to catalog instance {name}"),
                };
            }
        }
    }
    // Best verified catalog scheme on an isomorphic instance.
    let mut best: Option<(Rate, &str)> = None;
    for e in catalog::entries() {
        if e.instance.is_none() {
            continue;
        }
        let Ok((known, scheme)) = catalog::builtin_pair(e.name) else {
            continue;
        };
        if !isomorphic(inst, &known) || best.is_some_and(|(b, _)| b >= scheme.rate()) {
            continue;
        }
        if verify_linear(&known, &scheme).is_ok_and(|rep| rep.overall) {
            best = Some((scheme.rate(), e.name));
        }
    }
    match best {
        Some((rate, name)) if rate == cb.bound => Verdict::Exact {
            value: rate,
            reason: format!("catalog scheme {name} meets the rho bound (rho = {r})"),
        },
        Some((rate, name)) => Verdict::BoundedAbove {
            value: cb.bound,
            achieved: Some(rate),
            open: true,
            reason: format!("rho = {r}; catalog scheme {name} reaches {rate} and no converse closes the gap"),
        },
        None => Verdict::BoundedAbove {
            value: cb.bound,
            achieved: None,
            open: false,
            reason: format!("rho = {r}; no matching scheme known"),
        },
    }
}
