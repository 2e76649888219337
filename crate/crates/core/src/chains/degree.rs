use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::complex::{ExtDim, FilteredComplex, Simplex, StratumId};
use crate::error::{Error, Result};
use crate::perversity::Perversity;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PerverseDegree {
    pub simplex: Vec<String>,
    /// `‖σ‖_i` for `i = 0..=n`.
    pub by_index: Vec<ExtDim>,
    pub by_stratum: BTreeMap<StratumId, ExtDim>,
}

pub fn perverse_degree(x: &FilteredComplex, s: &Simplex) -> Result<PerverseDegree> {
    if !x.contains(s) {
        return Err(Error::UnknownSimplex(x.display(s)));
    }
    let n = x.formal_dim();
    let by_index = (0..=n)
        .map(|i| ExtDim::of_count(x.face_below(s, n - i).len()))
        .collect();
    let mut by_stratum: BTreeMap<StratumId, ExtDim> = x
        .strata()
        .iter()
        .map(|st| (st.id.clone(), ExtDim::NegInf))
        .collect();
    for (st, face) in x.strata_met(s) {
        by_stratum.insert(x.strata().get(st).id.clone(), ExtDim::of_count(face.len()));
    }
    Ok(PerverseDegree {
        simplex: x.simplex_ids(s),
        by_index,
        by_stratum,
    })
}

/// Admissibility against perversity values indexed by stratum.
pub(crate) fn admissible_with(x: &FilteredComplex, s: &Simplex, pv: &[i64]) -> bool {
    let dim = s.dim();
    x.strata_met(s).into_iter().all(|(st, face)| {
        let stratum = x.strata().get(st);
        stratum.regular || face.dim() <= dim - stratum.codim as i64 + pv[st]
    })
}

pub fn is_admissible(x: &FilteredComplex, s: &Simplex, p: &Perversity) -> Result<bool> {
    if !x.contains(s) {
        return Err(Error::UnknownSimplex(x.display(s)));
    }
    Ok(admissible_with(x, s, &p.on(x)?))
}

/// Admissibility flags for every simplex, by dimension and index.
pub fn admissibility(x: &FilteredComplex, p: &Perversity) -> Result<Vec<Vec<bool>>> {
    let pv = p.on(x)?;
    Ok(table(x, &pv))
}

pub(crate) fn table(x: &FilteredComplex, pv: &[i64]) -> Vec<Vec<bool>> {
    (0..=x.dim().max(0) as usize)
        .map(|k| x.cells(k).iter().map(|s| admissible_with(x, s, pv)).collect())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FunestReport {
    pub simplex: Vec<String>,
    pub funest_face: Option<Vec<String>>,
    pub guilty_stratum: Option<StratumId>,
    pub defect: usize,
}

pub fn funest_report(x: &FilteredComplex, s: &Simplex, p: &Perversity) -> Result<FunestReport> {
    let pv = p.on(x)?;
    if !x.contains(s) {
        return Err(Error::UnknownSimplex(x.display(s)));
    }
    if !admissible_with(x, s, &pv) {
        return Err(Error::NotAdmissible(x.display(s)));
    }
    let dim = s.dim();
    // Faces cut out by lower levels are nested, so the first hit is minimal.
    let hit = x.strata_met(s).into_iter().find(|(st, face)| {
        let stratum = x.strata().get(*st);
        face != s && face.dim() == dim - stratum.codim as i64 + pv[*st]
    });
    Ok(match hit {
        Some((st, face)) => {
            let stratum = x.strata().get(st);
            FunestReport {
                simplex: x.simplex_ids(s),
                funest_face: Some(x.simplex_ids(&face)),
                guilty_stratum: Some(stratum.id.clone()),
                defect: stratum.codim,
            }
        }
        None => FunestReport {
            simplex: x.simplex_ids(s),
            funest_face: None,
            guilty_stratum: None,
            defect: 0,
        },
    })
}

/// Signed faces of a simplex.
pub type Chain = Vec<(i64, Simplex)>;

/// `∂σ = ∂_reg σ + ∂_sing σ`.
pub fn boundary_split(x: &FilteredComplex, s: &Simplex) -> Result<(Chain, Chain)> {
    if !x.contains(s) {
        return Err(Error::UnknownSimplex(x.display(s)));
    }
    Ok(s.boundary().partition(|(_, f)| x.is_regular_simplex(f)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LargeStrata {
    pub strata: Vec<StratumId>,
    #[serde(skip)]
    pub simplices: BTreeSet<Simplex>,
    pub maximal: Vec<Vec<String>>,
}

/// Union of the closures of singular strata with `p̄(S) > t̄(S)`.
pub fn grandes_strates(x: &FilteredComplex, p: &Perversity) -> Result<LargeStrata> {
    let pv = p.on(x)?;
    let mut strata = Vec::new();
    let mut simplices = BTreeSet::new();
    for (i, st) in x.strata().iter().enumerate() {
        if st.regular || pv[i] <= st.codim as i64 - 2 {
            continue;
        }
        strata.push(st.id.clone());
        for s in &st.simplices {
            simplices.extend(s.faces());
        }
    }
    let maximal = simplices
        .iter()
        .filter(|s| !simplices.iter().any(|t| t.len() > s.len() && s.is_face_of(t)))
        .map(|s| x.simplex_ids(s))
        .collect();
    Ok(LargeStrata {
        strata,
        simplices,
        maximal,
    })
}

/// Admissible singular simplices that escape the large strata. Always empty
/// in theory; exposed as a diagnostic.
pub fn singular_admissible_outside_large(x: &FilteredComplex, p: &Perversity) -> Result<Vec<Simplex>> {
    let pv = p.on(x)?;
    let large = grandes_strates(x, p)?;
    Ok(x.all_simplices()
        .filter(|s| !x.is_regular_simplex(s) && admissible_with(x, s, &pv))
        .filter(|s| !large.simplices.contains(*s))
        .cloned()
        .collect())
}
