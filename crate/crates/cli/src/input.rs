//! Loading inputs and classifying failures into exit codes.

use std::fmt;
use std::path::Path;

use perverse::builtin;
use perverse::perversity::{EquivalenceDeclaration, Perversity, PerversityFile};
use perverse::{build_complex, Error, FilteredComplex, RawComplex};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub kind: String,
    pub message: String,
}

impl Failure {
    pub fn parse(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            kind: "Parse".into(),
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            kind: "Usage".into(),
            message: message.into(),
        }
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Body<'a> {
            kind: &'a str,
            code: i32,
            message: &'a str,
        }
        #[derive(Serialize)]
        struct Wrapper<'a> {
            error: Body<'a>,
        }
        serde_json::to_string(&Wrapper {
            error: Body {
                kind: &self.kind,
                code: self.code,
                message: &self.message,
            },
        })
        .expect("error body serializes")
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

fn exit_code(e: &Error) -> i32 {
    use Error::*;
    match e {
        DuplicateVertex(_)
        | LevelOutOfRange { .. }
        | EmptyTopLevel(_)
        | DanglingVertexRef(_)
        | UnknownSimplex(_)
        | EmptyInput
        | DimMismatch(..)
        | MTooSmall(_)
        | NotARefinement(_)
        | SimplexSetMismatch(_)
        | NotSimplicial(_)
        | StratumSplit { .. }
        | CodimViolation { .. }
        | IncompleteVertexMap(_)
        | NotFullSubcomplex(_) => 3,
        MissingCodim(_)
        | UnknownStratum(_)
        | MissingValue(_)
        | NonzeroOnRegular(_)
        | ComplexMismatch { .. }
        | SourceValueConflict { .. }
        | UnknownStratumInEquiv(_)
        | NotAdmissible(_)
        | DualityInequalityViolated(_)
        | NotAdmissibleInput(_)
        | RingMismatch(_)
        | NotPrime(_)
        | UnknownBuiltin(_) => 4,
        InconsistentComplex(_) | ShapeMismatch(_) | Internal(_) => 5,
    }
}

/// Variant name, as printed by `Debug` up to its payload.
fn kind_of(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string()
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: exit_code(&e),
            kind: kind_of(&e),
            message: e.to_string(),
        }
    }
}

pub type CliResult<T> = Result<T, Failure>;

/// Text of a file, or of a builtin when the argument reads `builtin:NAME`.
fn read(arg: &str) -> CliResult<String> {
    if let Some(name) = arg.strip_prefix("builtin:") {
        return Ok(builtin::find(name)?.text.to_string());
    }
    std::fs::read_to_string(Path::new(arg)).map_err(|e| Failure::parse(format!("{arg}: {e}")))
}

fn parse<T: DeserializeOwned>(arg: &str) -> CliResult<T> {
    serde_json::from_str(&read(arg)?).map_err(|e| Failure::parse(format!("{arg}: {e}")))
}

pub fn complex(arg: &str) -> CliResult<FilteredComplex> {
    let raw: RawComplex = parse(arg)?;
    Ok(build_complex(&raw)?)
}

/// The perversity in `arg` on `x`, or 0̄ without one.
pub fn perversity(x: &FilteredComplex, arg: Option<&str>) -> CliResult<(PerversityFile, Perversity)> {
    match arg {
        Some(arg) => {
            let file: PerversityFile = parse(arg)?;
            let p = file.resolve(x)?;
            Ok((file, p))
        }
        None => {
            let p = Perversity::zero(x);
            Ok((PerversityFile::from_perversity(&p), p))
        }
    }
}

pub fn equivalence(arg: Option<&str>) -> CliResult<EquivalenceDeclaration> {
    match arg {
        Some(arg) => parse(arg),
        None => Ok(EquivalenceDeclaration::default()),
    }
}
