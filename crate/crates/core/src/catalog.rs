//! Built-in instances and schemes, stored under `data/` with a provenance note each.

use crate::error::{Error, Result};
use crate::graph::CdsInstance;
use crate::scheme::LinearScheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryKind {
    Instance,
    Scheme,
}

#[derive(Debug, Clone, Copy)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub kind: EntryKind,
    /// For schemes, the instance they are built for.
    pub instance: Option<&'static str>,
    pub json: &'static str,
    pub provenance: &'static str,
}

macro_rules! instance {
    ($name:literal) => {
        CatalogEntry {
            name: $name,
            kind: EntryKind::Instance,
            instance: None,
            json: include_str!(concat!("../data/instances/", $name, ".json")),
            provenance: include_str!(concat!("../data/instances/", $name, ".provenance.md")),
        }
    };
}

macro_rules! scheme {
    ($name:literal, $inst:literal) => {
        CatalogEntry {
            name: $name,
            kind: EntryKind::Scheme,
            instance: Some($inst),
            json: include_str!(concat!("../data/schemes/", $name, ".json")),
            provenance: include_str!(concat!("../data/schemes/", $name, ".provenance.md")),
        }
    };
}

static ENTRIES: &[CatalogEntry] = &[
    instance!("fig2"),
    instance!("fig5"),
    instance!("fig8"),
    instance!("fig9"),
    scheme!("fig2-rate-2-5", "fig2"),
    scheme!("fig5-synth", "fig5"),
    scheme!("fig8-rate-7-18", "fig8"),
    scheme!("fig9-rate-3-8", "fig9"),
    scheme!("broken-leaky", "fig5"),
    scheme!("broken-undecodable", "fig5"),
];

pub fn entries() -> &'static [CatalogEntry] {
    ENTRIES
}

pub fn entry(name: &str) -> Result<&'static CatalogEntry> {
    ENTRIES
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownFixture(name.to_string()))
}

pub fn builtin_instance(name: &str) -> Result<CdsInstance> {
    match entry(name)? {
        e if e.kind == EntryKind::Instance => CdsInstance::from_json(e.json),
        _ => Err(Error::UnknownFixture(format!("{name} is a scheme, not an instance"))),
    }
}

pub fn builtin_scheme(name: &str) -> Result<LinearScheme> {
    match entry(name)? {
        e if e.kind == EntryKind::Scheme => LinearScheme::from_json(e.json),
        _ => Err(Error::UnknownFixture(format!("{name} is an instance, not a scheme"))),
    }
}

/// A built-in scheme together with the built-in instance it targets.
pub fn builtin_pair(scheme: &str) -> Result<(CdsInstance, LinearScheme)> {
    let e = entry(scheme)?;
    let inst = e
        .instance
        .ok_or_else(|| Error::UnknownFixture(format!("{scheme} is an instance, not a scheme")))?;
    Ok((builtin_instance(inst)?, builtin_scheme(scheme)?))
}
