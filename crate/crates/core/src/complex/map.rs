use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{FilteredComplex, Simplex, StratumId, VertexIdx};
use crate::error::{Error, Result};

/// A vertex map between filtered complexes, to be checked as a stratified map.
#[derive(Clone, Debug)]
pub struct StratifiedMapDescriptor<'a> {
    pub source: &'a FilteredComplex,
    pub target: &'a FilteredComplex,
    pub vertex_map: BTreeMap<String, String>,
}

impl<'a> StratifiedMapDescriptor<'a> {
    pub fn new(
        source: &'a FilteredComplex,
        target: &'a FilteredComplex,
        vertex_map: BTreeMap<String, String>,
    ) -> Self {
        StratifiedMapDescriptor {
            source,
            target,
            vertex_map,
        }
    }

    /// Map sending each vertex to the target vertex with the same id.
    pub fn identity(source: &'a FilteredComplex, target: &'a FilteredComplex) -> Self {
        let vertex_map = source
            .vertex_ids()
            .iter()
            .map(|id| (id.clone(), id.clone()))
            .collect();
        Self::new(source, target, vertex_map)
    }

    fn vertex_image(&self, v: VertexIdx) -> Result<VertexIdx> {
        let id = self.source.vertex_id(v);
        let t = self
            .vertex_map
            .get(id)
            .ok_or_else(|| Error::IncompleteVertexMap(id.to_string()))?;
        self.target
            .vertex_index(t)
            .ok_or_else(|| Error::NotSimplicial(format!("`{id}` maps to unknown vertex `{t}`")))
    }

    /// Image of a source simplex, with repeated vertices collapsed.
    pub fn image(&self, s: &Simplex) -> Result<Simplex> {
        let verts = s
            .vertices()
            .iter()
            .map(|&v| self.vertex_image(v))
            .collect::<Result<Vec<_>>>()?;
        let t = Simplex::new(verts);
        if self.target.contains(&t) {
            Ok(t)
        } else {
            Err(Error::NotSimplicial(format!(
                "{} maps to {}, not a simplex of `{}`",
                self.source.display(s),
                self.target.display(&t),
                self.target.name()
            )))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StratifiedMapReport {
    /// `S ↦ S^f` on stratum indices.
    #[serde(skip)]
    pub stratum_index_map: Vec<usize>,
    pub stratum_map: BTreeMap<StratumId, StratumId>,
    /// Whether `S ⪯ S'` implies `S^f ⪯ S'^f`.
    pub monotone: bool,
}

pub fn check_stratified_map(f: &StratifiedMapDescriptor<'_>) -> Result<StratifiedMapReport> {
    let (src, tgt) = (f.source, f.target);
    for id in src.vertex_ids() {
        if !f.vertex_map.contains_key(id) {
            return Err(Error::IncompleteVertexMap(id.clone()));
        }
    }
    let mut images: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); src.strata().len()];
    for s in src.all_simplices() {
        let t = f.image(s)?;
        let st = src.stratum_of(s).expect("stratum");
        images[st].insert(tgt.stratum_of(&t).expect("stratum"));
    }
    let mut index_map = Vec::with_capacity(images.len());
    for (i, set) in images.iter().enumerate() {
        let source = src.strata().get(i);
        if set.len() != 1 {
            let targets: Vec<String> = set
                .iter()
                .map(|&t| tgt.strata().get(t).id.to_string())
                .collect();
            return Err(Error::StratumSplit {
                source_stratum: source.id.to_string(),
                targets: targets.join(", "),
            });
        }
        let t = *set.iter().next().unwrap();
        let target = tgt.strata().get(t);
        if target.codim > source.codim {
            return Err(Error::CodimViolation {
                source_stratum: source.id.to_string(),
                source_codim: source.codim,
                target: target.id.to_string(),
                target_codim: target.codim,
            });
        }
        index_map.push(t);
    }
    let n = index_map.len();
    let monotone = (0..n).all(|a| {
        (0..n).all(|b| !src.strata().le(a, b) || tgt.strata().le(index_map[a], index_map[b]))
    });
    let stratum_map = index_map
        .iter()
        .enumerate()
        .map(|(i, &t)| (src.strata().get(i).id.clone(), tgt.strata().get(t).id.clone()))
        .collect();
    Ok(StratifiedMapReport {
        stratum_index_map: index_map,
        stratum_map,
        monotone,
    })
}

/// Stratum correspondence of a refinement: the identity map from `fine` to
/// `coarse`, with the source flags of the fine strata.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coarsening {
    /// Coarse stratum containing each fine stratum.
    pub stratum_map: Vec<usize>,
    /// A fine stratum is a source when it has the dimension of its image.
    pub is_source: Vec<bool>,
}

pub fn coarsening(fine: &FilteredComplex, coarse: &FilteredComplex) -> Result<Coarsening> {
    if fine.formal_dim() != coarse.formal_dim() {
        return Err(Error::SimplexSetMismatch(format!(
            "formal dimensions {} and {}",
            fine.formal_dim(),
            coarse.formal_dim()
        )));
    }
    if fine.vertex_ids() != coarse.vertex_ids() {
        return Err(Error::SimplexSetMismatch("vertex sets differ".into()));
    }
    // Vertex indices agree since ids are sorted identically.
    let same = (0..=fine.dim().max(0) as usize).all(|k| fine.cells(k) == coarse.cells(k))
        && fine.dim() == coarse.dim();
    if !same {
        return Err(Error::SimplexSetMismatch("simplices differ".into()));
    }
    let report = check_stratified_map(&StratifiedMapDescriptor::identity(fine, coarse))
        .map_err(|e| Error::NotARefinement(e.to_string()))?;
    let is_source = report
        .stratum_index_map
        .iter()
        .enumerate()
        .map(|(s, &t)| fine.strata().get(s).level == coarse.strata().get(t).level)
        .collect();
    Ok(Coarsening {
        stratum_map: report.stratum_index_map,
        is_source,
    })
}
