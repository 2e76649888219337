//! The example corpus shipped with the library.

use crate::complex::{build_complex, FilteredComplex, RawComplex};
use crate::error::{Error, Result};
use crate::perversity::{EquivalenceDeclaration, PerversityFile};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BuiltinKind {
    Complex,
    Perversity,
    Equivalence,
}

#[derive(Clone, Copy, Debug)]
pub struct Builtin {
    pub name: &'static str,
    pub kind: BuiltinKind,
    pub text: &'static str,
}

macro_rules! entry {
    ($name:literal, $kind:ident) => {
        Builtin {
            name: $name,
            kind: BuiltinKind::$kind,
            text: include_str!(concat!("../data/", $name, ".json")),
        }
    };
}

pub const BUILTINS: &[Builtin] = &[
    entry!("circle3", Complex),
    entry!("pointed-circle", Complex),
    entry!("pointed-sphere", Complex),
    entry!("trivial-sphere", Complex),
    entry!("torus", Complex),
    entry!("pinched-torus", Complex),
    entry!("cone-circle", Complex),
    entry!("cone-torus", Complex),
    entry!("susp-torus", Complex),
    entry!("susp-torus-sd", Complex),
    entry!("susp-torus-sd-pt", Complex),
    entry!("apex0", Perversity),
    entry!("apex1", Perversity),
    entry!("apex2", Perversity),
    entry!("pt_neg1", Perversity),
    entry!("gm-middle", Perversity),
    entry!("jump2", Perversity),
    entry!("pt-reg", Equivalence),
];

/// Refinement pairs among the builtin complexes, as (fine, coarse).
pub const REFINEMENT_PAIRS: &[(&str, &str)] = &[
    ("pointed-sphere", "trivial-sphere"),
    ("susp-torus-sd-pt", "susp-torus-sd"),
];

pub fn find(name: &str) -> Result<&'static Builtin> {
    BUILTINS
        .iter()
        .find(|b| b.name == name)
        .ok_or_else(|| Error::UnknownBuiltin(name.to_string()))
}

pub fn names(kind: BuiltinKind) -> impl Iterator<Item = &'static str> {
    BUILTINS.iter().filter(move |b| b.kind == kind).map(|b| b.name)
}

fn parse<T: serde::de::DeserializeOwned>(b: &Builtin) -> Result<T> {
    serde_json::from_str(b.text).map_err(|e| Error::Internal(format!("builtin `{}`: {e}", b.name)))
}

fn of_kind(name: &str, kind: BuiltinKind) -> Result<&'static Builtin> {
    let b = find(name)?;
    if b.kind != kind {
        return Err(Error::UnknownBuiltin(format!("{name} is not a {kind:?}")));
    }
    Ok(b)
}

pub fn raw_complex(name: &str) -> Result<RawComplex> {
    parse(of_kind(name, BuiltinKind::Complex)?)
}

pub fn complex(name: &str) -> Result<FilteredComplex> {
    build_complex(&raw_complex(name)?)
}

pub fn perversity(name: &str) -> Result<PerversityFile> {
    parse(of_kind(name, BuiltinKind::Perversity)?)
}

pub fn equivalence(name: &str) -> Result<EquivalenceDeclaration> {
    parse(of_kind(name, BuiltinKind::Equivalence)?)
}
