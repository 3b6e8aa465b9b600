//! Vector linear CDS schemes: node `v` sends `F_v S + H_v Z`.

mod oracle;
mod simulate;
mod verify;

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::ff::{FieldMatrix, PrimeField};
use crate::graph::{CdsInstance, NodeId};
use crate::rational::Rate;

pub use oracle::{entropic_oracle_edge, OracleOutcome, DEFAULT_ORACLE_BUDGET};
pub use simulate::{simulate, QualifiedStats, SimulationReport, UnqualifiedStats};
pub use verify::{verify_linear, CheckKind, CheckRecord, VerificationReport};

/// Precoders of one node: `F` is `N x L`, `H` is `N x L_Z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Precoder {
    pub f: FieldMatrix,
    pub h: FieldMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearScheme {
    field: PrimeField,
    secret_len: usize,
    noise_len: usize,
    signal_len: usize,
    nodes: BTreeMap<NodeId, Precoder>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemeFile {
    p: u64,
    #[serde(rename = "L")]
    secret_len: usize,
    #[serde(rename = "Lz")]
    noise_len: usize,
    #[serde(rename = "N")]
    signal_len: usize,
    nodes: BTreeMap<NodeId, NodeFile>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeFile {
    #[serde(rename = "F")]
    f: Vec<Vec<u64>>,
    #[serde(rename = "H")]
    h: Vec<Vec<u64>>,
}

impl LinearScheme {
    /// Checks every precoder against the declared shapes and field.
    pub fn new(
        field: PrimeField,
        secret_len: usize,
        noise_len: usize,
        signal_len: usize,
        nodes: BTreeMap<NodeId, Precoder>,
    ) -> Result<Self> {
        if signal_len == 0 {
            return Err(Error::Scheme("N must be positive".into()));
        }
        for (v, pre) in &nodes {
            for (name, m, cols) in [("F", &pre.f, secret_len), ("H", &pre.h, noise_len)] {
                if m.field() != field {
                    return Err(Error::FieldMismatch(m.field().modulus(), field.modulus()));
                }
                if m.rows() != signal_len || m.cols() != cols {
                    return Err(Error::Scheme(format!(
                        "{name}_{v} is {}x{}, expected {signal_len}x{cols}",
                        m.rows(),
                        m.cols()
                    )));
                }
            }
        }
        Ok(LinearScheme {
            field,
            secret_len,
            noise_len,
            signal_len,
            nodes,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SchemeFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("scheme file: {e}")))?;
        let field = PrimeField::new(file.p)?;
        let mut nodes = BTreeMap::new();
        for (v, nf) in file.nodes {
            let f = FieldMatrix::from_rows_with_cols(field, &nf.f, file.secret_len)
                .map_err(|e| Error::Scheme(format!("F_{v}: {e}")))?;
            let h = FieldMatrix::from_rows_with_cols(field, &nf.h, file.noise_len)
                .map_err(|e| Error::Scheme(format!("H_{v}: {e}")))?;
            nodes.insert(v, Precoder { f, h });
        }
        LinearScheme::new(field, file.secret_len, file.noise_len, file.signal_len, nodes)
    }

    /// Canonical serialisation: nodes in id order, one matrix row per line.
    pub fn to_json(&self) -> String {
        let matrix = |m: &FieldMatrix| {
            if m.rows() == 0 {
                return "[]".to_string();
            }
            let rows: Vec<String> = (0..m.rows())
                .map(|i| {
                    let r: Vec<String> = m.row(i).iter().map(u64::to_string).collect();
                    format!("[{}]", r.join(","))
                })
                .collect();
            format!("[\n        {}\n      ]", rows.join(",\n        "))
        };
        let nodes: Vec<String> = self
            .nodes
            .iter()
            .map(|(v, pre)| {
                format!(
                    "    \"{v}\": {{\n      \"F\": {},\n      \"H\": {}\n    }}",
                    matrix(&pre.f),
                    matrix(&pre.h)
                )
            })
            .collect();
        format!(
            "{{\n  \"p\": {},\n  \"L\": {},\n  \"Lz\": {},\n  \"N\": {},\n  \"nodes\": {{\n{}\n  }}\n}}\n",
            self.field.modulus(),
            self.secret_len,
            self.noise_len,
            self.signal_len,
            nodes.join(",\n")
        )
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    /// `L`.
    pub fn secret_len(&self) -> usize {
        self.secret_len
    }

    /// `L_Z`.
    pub fn noise_len(&self) -> usize {
        self.noise_len
    }

    /// `N`.
    pub fn signal_len(&self) -> usize {
        self.signal_len
    }

    pub fn nodes(&self) -> &BTreeMap<NodeId, Precoder> {
        &self.nodes
    }

    pub fn precoder(&self, v: NodeId) -> Option<&Precoder> {
        self.nodes.get(&v)
    }

    pub fn precoder_mut(&mut self, v: NodeId) -> Option<&mut Precoder> {
        self.nodes.get_mut(&v)
    }

    pub fn rate(&self) -> Rate {
        Rate::of_scheme(self.secret_len, self.signal_len)
    }

    /// The scheme must cover exactly the nodes of `inst`.
    pub fn check_shape(&self, inst: &CdsInstance) -> Result<()> {
        for v in inst.nodes() {
            if !self.nodes.contains_key(&v) {
                return Err(Error::Scheme(format!("no precoders for node {v}")));
            }
        }
        if let Some(v) = self.nodes.keys().find(|v| inst.index(**v).is_none()) {
            return Err(Error::Scheme(format!(
                "precoders for {v}, which is not a node of {}",
                inst.name()
            )));
        }
        Ok(())
    }

    /// Signal of node `v` for secret `s` and noise `z`.
    pub fn signal(&self, v: NodeId, s: &[u64], z: &[u64]) -> Option<Vec<u64>> {
        let pre = self.nodes.get(&v)?;
        let a = pre.f.apply(s);
        let b = pre.h.apply(z);
        Some(a.iter().zip(&b).map(|(&x, &y)| self.field.add(x, y)).collect())
    }
}
