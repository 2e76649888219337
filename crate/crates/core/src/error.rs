use thiserror::Error;

/// Errors raised while building complexes, perversities and chain data.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("vertex `{id}` has level {level}, outside 0..={formal_dim}")]
    LevelOutOfRange {
        id: String,
        level: i64,
        formal_dim: usize,
    },
    #[error("no simplex reaches the top level {0}")]
    EmptyTopLevel(usize),
    #[error("simplex references unknown vertex `{0}`")]
    DanglingVertexRef(String),
    #[error("unknown simplex {0}")]
    UnknownSimplex(String),
    #[error("empty input")]
    EmptyInput,
    #[error("formal dimensions differ: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("circle needs at least 3 vertices, got {0}")]
    MTooSmall(usize),

    #[error("classical perversity has no value for codimension {0}")]
    MissingCodim(usize),
    #[error("unknown stratum `{0}`")]
    UnknownStratum(String),
    #[error("perversity has no value for singular stratum `{0}`")]
    MissingValue(String),
    #[error("perversity must vanish on regular stratum `{0}`")]
    NonzeroOnRegular(String),
    #[error("perversity is defined on `{found}`, expected `{expected}`")]
    ComplexMismatch { expected: String, found: String },
    #[error("sources of stratum `{target}` carry different values: {detail}")]
    SourceValueConflict { target: String, detail: String },
    #[error("not a refinement: {0}")]
    NotARefinement(String),
    #[error("simplex sets differ: {0}")]
    SimplexSetMismatch(String),
    #[error("unknown stratum `{0}` in equivalence declaration")]
    UnknownStratumInEquiv(String),

    #[error("vertex map is not simplicial: {0}")]
    NotSimplicial(String),
    #[error("stratum `{source_stratum}` meets several target strata: {targets}")]
    StratumSplit { source_stratum: String, targets: String },
    #[error("stratum `{source_stratum}` (codim {source_codim}) lands in `{target}` (codim {target_codim})")]
    CodimViolation {
        source_stratum: String,
        source_codim: usize,
        target: String,
        target_codim: usize,
    },
    #[error("vertex map misses vertex `{0}`")]
    IncompleteVertexMap(String),

    #[error("simplex {0} is not admissible")]
    NotAdmissible(String),
    #[error("admissibility not preserved: f*Dq > Dp on stratum `{0}`")]
    DualityInequalityViolated(String),
    #[error("input chain is not an intersection chain: {0}")]
    NotAdmissibleInput(String),
    #[error("subcomplex is not full: {0}")]
    NotFullSubcomplex(String),

    #[error("boundary of boundary is nonzero in degree {0}")]
    InconsistentComplex(usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("coefficient ring mismatch: {0}")]
    RingMismatch(String),
    #[error("invalid modulus {0}: expected a prime")]
    NotPrime(u64),
    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),
    #[error("internal: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
