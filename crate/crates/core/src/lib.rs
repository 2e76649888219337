//! Intersection homology and tame intersection homology of finite filtered
//! simplicial complexes with general perversities.

pub mod builtin;
pub mod chains;
pub mod complex;
pub mod constructors;
pub mod error;
pub mod homology;
pub mod invariance;
pub mod linalg;
pub mod perversity;

pub use complex::{
    build_complex, check_normal, check_pseudomanifold, check_stratified_map, compute_strata,
    DecompositionView, ExtDim, FilteredComplex, RawComplex, RawVertex, Simplex,
    StratifiedMapDescriptor, Stratum, StratumId, StratumSet,
};
pub use error::{Error, Result};
