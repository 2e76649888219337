//! Perverse degrees, admissibility and chain complex presentations.

mod degree;
mod presentation;
mod pushforward;

pub use degree::{
    admissibility, boundary_split, funest_report, grandes_strates, is_admissible, perverse_degree,
    singular_admissible_outside_large, Chain, FunestReport, LargeStrata, PerverseDegree,
};
pub use presentation::{
    build_complex_variant, build_intersection_complex, build_relative_complex,
    build_supported_complex, build_tame_complex,
    Cell, ChainComplexPresentation, Degree, Kind, Ring, Variant,
};
pub(crate) use presentation::{full_support, reduce};
pub use pushforward::pushforward_chain;
