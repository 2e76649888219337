//! Finite filtered simplicial complexes.
//!
//! The filtration is carried by the vertices: every vertex has a level in
//! `0..=formal_dim` and `K_i` is the full subcomplex spanned by the vertices of
//! level at most `i`. A simplex therefore meets each `K_i` in a single face and
//! is a filtered simplex without further conditions.

mod checks;
mod map;
mod strata;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use checks::{check_normal, check_pseudomanifold, NormalReport, PseudomanifoldReport};
pub use map::{
    check_stratified_map, coarsening, Coarsening, StratifiedMapDescriptor, StratifiedMapReport,
};
pub use strata::{compute_strata, Stratum, StratumId, StratumSet};

pub type VertexIdx = u32;

/// A simplex as a sorted list of vertex indices. Index order is the
/// lexicographic order of vertex ids, which fixes orientations globally.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(Vec<VertexIdx>);

impl Simplex {
    pub fn new(mut vertices: Vec<VertexIdx>) -> Self {
        vertices.sort_unstable();
        vertices.dedup();
        Simplex(vertices)
    }

    pub fn vertex(v: VertexIdx) -> Self {
        Simplex(vec![v])
    }

    pub fn vertices(&self) -> &[VertexIdx] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Dimension; the empty simplex has dimension -1.
    pub fn dim(&self) -> i64 {
        self.0.len() as i64 - 1
    }

    pub fn contains(&self, v: VertexIdx) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.0.iter().all(|v| other.contains(*v))
    }

    /// Codimension-one faces with their boundary signs `(-1)^i`.
    pub fn boundary(&self) -> impl Iterator<Item = (i64, Simplex)> + '_ {
        let n = if self.0.len() > 1 { self.0.len() } else { 0 };
        (0..n).map(move |i| {
            let mut face = self.0.clone();
            face.remove(i);
            (if i % 2 == 0 { 1 } else { -1 }, Simplex(face))
        })
    }

    /// All nonempty faces, including the simplex itself.
    pub fn faces(&self) -> Vec<Simplex> {
        let n = self.0.len();
        let mut out = Vec::with_capacity((1usize << n) - 1);
        for mask in 1u64..(1u64 << n) {
            out.push(Simplex(
                (0..n)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| self.0[i])
                    .collect(),
            ));
        }
        out
    }

    pub fn join(&self, other: &Simplex) -> Simplex {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Simplex::new(v)
    }
}

impl From<Vec<VertexIdx>> for Simplex {
    fn from(v: Vec<VertexIdx>) -> Self {
        Simplex::new(v)
    }
}

/// Dimension extended by an explicit `-∞` for empty parts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtDim {
    NegInf,
    Finite(i64),
}

impl ExtDim {
    /// Dimension of a join of `count` vertices.
    pub fn of_count(count: usize) -> Self {
        if count == 0 {
            ExtDim::NegInf
        } else {
            ExtDim::Finite(count as i64 - 1)
        }
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            ExtDim::NegInf => None,
            ExtDim::Finite(d) => Some(d),
        }
    }
}

impl fmt::Display for ExtDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtDim::NegInf => write!(f, "-inf"),
            ExtDim::Finite(d) => write!(f, "{d}"),
        }
    }
}

impl Serialize for ExtDim {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtDim::NegInf => s.serialize_str("-inf"),
            ExtDim::Finite(d) => s.serialize_i64(*d),
        }
    }
}

/// On-disk form of a filtered complex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawComplex {
    pub name: String,
    pub formal_dim: usize,
    pub vertices: Vec<RawVertex>,
    /// Maximal simplices (any generating set is accepted).
    pub simplices: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex_order: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawVertex {
    pub id: String,
    pub level: i64,
}

/// The σ-decomposition of a simplex into its parts by vertex level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionView {
    pub simplex: Vec<String>,
    pub parts: Vec<Vec<String>>,
    pub part_dims: Vec<ExtDim>,
}

#[derive(Clone, Debug)]
pub struct FilteredComplex {
    name: String,
    formal_dim: usize,
    ids: Vec<String>,
    id_index: HashMap<String, VertexIdx>,
    levels: Vec<usize>,
    vertex_order: Option<Vec<String>>,
    cells: Vec<Vec<Simplex>>,
    lookup: HashMap<Simplex, usize>,
    strata: StratumSet,
}

impl PartialEq for FilteredComplex {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.formal_dim == other.formal_dim
            && self.ids == other.ids
            && self.levels == other.levels
            && self.cells == other.cells
            && self.vertex_order == other.vertex_order
    }
}

/// Validates a parsed complex and closes it under faces.
pub fn build_complex(raw: &RawComplex) -> Result<FilteredComplex> {
    FilteredComplex::from_raw(raw, true)
}

impl FilteredComplex {
    /// Builds from a raw description. With `require_top` the top level must
    /// be reached by some simplex; subspaces with induced filtrations skip it.
    pub fn from_raw(raw: &RawComplex, require_top: bool) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut entries = Vec::with_capacity(raw.vertices.len());
        for v in &raw.vertices {
            if !seen.insert(v.id.clone()) {
                return Err(Error::DuplicateVertex(v.id.clone()));
            }
            if v.level < 0 || v.level as usize > raw.formal_dim {
                return Err(Error::LevelOutOfRange {
                    id: v.id.clone(),
                    level: v.level,
                    formal_dim: raw.formal_dim,
                });
            }
            entries.push((v.id.clone(), v.level as usize));
        }
        entries.sort();
        let id_index: HashMap<String, VertexIdx> = entries
            .iter()
            .enumerate()
            .map(|(i, (id, _))| (id.clone(), i as VertexIdx))
            .collect();
        let mut generators = Vec::with_capacity(raw.simplices.len());
        for s in &raw.simplices {
            let mut verts = Vec::with_capacity(s.len());
            for id in s {
                let idx = id_index
                    .get(id)
                    .ok_or_else(|| Error::DanglingVertexRef(id.clone()))?;
                verts.push(*idx);
            }
            generators.push(Simplex::new(verts));
        }
        if let Some(order) = &raw.vertex_order {
            for id in order {
                if !id_index.contains_key(id) {
                    return Err(Error::DanglingVertexRef(id.clone()));
                }
            }
        }
        let (ids, levels): (Vec<_>, Vec<_>) = entries.into_iter().unzip();
        Self::assemble(
            raw.name.clone(),
            raw.formal_dim,
            ids,
            levels,
            generators,
            raw.vertex_order.clone(),
            require_top,
        )
    }

    /// Assembles from sorted vertex ids, their levels and generating simplices.
    pub(crate) fn assemble(
        name: String,
        formal_dim: usize,
        ids: Vec<String>,
        levels: Vec<usize>,
        generators: Vec<Simplex>,
        vertex_order: Option<Vec<String>>,
        require_top: bool,
    ) -> Result<Self> {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        let id_index = ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), i as VertexIdx))
            .collect();
        let mut all: BTreeSet<Simplex> = BTreeSet::new();
        for v in 0..ids.len() {
            all.insert(Simplex::vertex(v as VertexIdx));
        }
        for g in generators {
            if g.is_empty() || all.contains(&g) {
                continue;
            }
            for f in g.faces() {
                all.insert(f);
            }
        }
        let top = all.iter().map(|s| s.len()).max().unwrap_or(0);
        let mut cells: Vec<Vec<Simplex>> = vec![Vec::new(); top];
        for s in all {
            cells[s.len() - 1].push(s);
        }
        let mut lookup = HashMap::new();
        for dim_cells in &cells {
            for (i, s) in dim_cells.iter().enumerate() {
                lookup.insert(s.clone(), i);
            }
        }
        if require_top {
            let reached = levels.iter().any(|&l| l == formal_dim);
            if !reached {
                return Err(Error::EmptyTopLevel(formal_dim));
            }
        }
        let mut x = FilteredComplex {
            name,
            formal_dim,
            ids,
            id_index,
            levels,
            vertex_order,
            cells,
            lookup,
            strata: StratumSet::default(),
        };
        x.strata = strata::compute(&x);
        Ok(x)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn formal_dim(&self) -> usize {
        self.formal_dim
    }

    /// Largest dimension of a simplex, or -1 when empty.
    pub fn dim(&self) -> i64 {
        self.cells.len() as i64 - 1
    }

    pub fn num_vertices(&self) -> usize {
        self.ids.len()
    }

    pub fn vertex_id(&self, v: VertexIdx) -> &str {
        &self.ids[v as usize]
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.ids
    }

    pub fn vertex_index(&self, id: &str) -> Option<VertexIdx> {
        self.id_index.get(id).copied()
    }

    pub fn level(&self, v: VertexIdx) -> usize {
        self.levels[v as usize]
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn vertex_order(&self) -> Option<&[String]> {
        self.vertex_order.as_deref()
    }

    /// Total vertex order used by staircase products: the recorded order if
    /// any, otherwise index order.
    pub fn staircase_order(&self) -> Vec<VertexIdx> {
        match &self.vertex_order {
            Some(order) => {
                let mut out: Vec<VertexIdx> =
                    order.iter().filter_map(|id| self.vertex_index(id)).collect();
                let listed: BTreeSet<VertexIdx> = out.iter().copied().collect();
                out.extend((0..self.ids.len() as VertexIdx).filter(|v| !listed.contains(v)));
                out
            }
            None => (0..self.ids.len() as VertexIdx).collect(),
        }
    }

    /// Level of a simplex: the largest vertex level.
    pub fn simplex_level(&self, s: &Simplex) -> usize {
        s.vertices().iter().map(|&v| self.level(v)).max().unwrap_or(0)
    }

    /// A simplex is regular when it has a vertex on the top level.
    pub fn is_regular_simplex(&self, s: &Simplex) -> bool {
        s.vertices().iter().any(|&v| self.level(v) == self.formal_dim)
    }

    /// Simplices of dimension `k`, sorted.
    pub fn cells(&self, k: usize) -> &[Simplex] {
        self.cells.get(k).map(|c| c.as_slice()).unwrap_or(&[])
    }

    pub fn num_simplices(&self) -> usize {
        self.cells.iter().map(|c| c.len()).sum()
    }

    pub fn all_simplices(&self) -> impl Iterator<Item = &Simplex> {
        self.cells.iter().flatten()
    }

    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.lookup.get(s).copied()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.lookup.contains_key(s)
    }

    pub fn strata(&self) -> &StratumSet {
        &self.strata
    }

    pub fn display(&self, s: &Simplex) -> String {
        let names: Vec<&str> = s.vertices().iter().map(|&v| self.vertex_id(v)).collect();
        format!("{{{}}}", names.join(","))
    }

    pub fn simplex_ids(&self, s: &Simplex) -> Vec<String> {
        s.vertices().iter().map(|&v| self.ids[v as usize].clone()).collect()
    }

    /// Looks up a simplex given by vertex ids.
    pub fn simplex(&self, ids: &[&str]) -> Result<Simplex> {
        let mut verts = Vec::with_capacity(ids.len());
        for id in ids {
            verts.push(
                self.vertex_index(id)
                    .ok_or_else(|| Error::UnknownSimplex(format!("{{{}}}", ids.join(","))))?,
            );
        }
        let s = Simplex::new(verts);
        if self.contains(&s) {
            Ok(s)
        } else {
            Err(Error::UnknownSimplex(format!("{{{}}}", ids.join(","))))
        }
    }

    pub fn maximal_simplices(&self) -> Vec<Simplex> {
        let mut covered: BTreeSet<&Simplex> = BTreeSet::new();
        let mut out = Vec::new();
        for k in (0..self.cells.len()).rev() {
            for s in &self.cells[k] {
                if !covered.contains(s) {
                    out.push(s.clone());
                }
            }
            if k > 0 {
                for s in &self.cells[k] {
                    for (_, f) in s.boundary() {
                        if let Some(i) = self.lookup.get(&f) {
                            covered.insert(&self.cells[k - 1][*i]);
                        }
                    }
                }
            }
        }
        out.sort();
        out
    }

    pub fn to_raw(&self) -> RawComplex {
        RawComplex {
            name: self.name.clone(),
            formal_dim: self.formal_dim,
            vertices: self
                .ids
                .iter()
                .zip(&self.levels)
                .map(|(id, &l)| RawVertex {
                    id: id.clone(),
                    level: l as i64,
                })
                .collect(),
            simplices: self
                .maximal_simplices()
                .iter()
                .map(|s| self.simplex_ids(s))
                .collect(),
            vertex_order: self.vertex_order.clone(),
        }
    }

    /// Same simplices, new vertex levels (given by id).
    pub fn with_levels(&self, name: &str, levels: &HashMap<String, usize>) -> Result<Self> {
        let mut raw = self.to_raw();
        raw.name = name.to_string();
        for v in &mut raw.vertices {
            if let Some(&l) = levels.get(&v.id) {
                v.level = l as i64;
            }
        }
        build_complex(&raw)
    }

    /// Full subcomplex on the given vertices, with the induced filtration.
    pub fn full_subcomplex(&self, name: &str, vertices: &BTreeSet<VertexIdx>) -> Self {
        let gens = self
            .all_simplices()
            .filter(|s| s.vertices().iter().all(|v| vertices.contains(v)))
            .cloned()
            .collect();
        self.subcomplex_from(name, gens)
    }

    /// Smallest subcomplex containing the given simplices.
    pub fn closure(&self, name: &str, simplices: &[Simplex]) -> Self {
        self.subcomplex_from(name, simplices.to_vec())
    }

    /// Closed star of a vertex.
    pub fn closed_star(&self, name: &str, v: VertexIdx) -> Self {
        let gens: Vec<Simplex> = self.all_simplices().filter(|s| s.contains(v)).cloned().collect();
        self.subcomplex_from(name, gens)
    }

    fn subcomplex_from(&self, name: &str, gens: Vec<Simplex>) -> Self {
        let used: BTreeSet<VertexIdx> = gens.iter().flat_map(|s| s.vertices().iter().copied()).collect();
        let remap: HashMap<VertexIdx, VertexIdx> = used
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i as VertexIdx))
            .collect();
        let ids = used.iter().map(|&v| self.ids[v as usize].clone()).collect();
        let levels = used.iter().map(|&v| self.levels[v as usize]).collect();
        let gens = gens
            .into_iter()
            .map(|s| Simplex::new(s.vertices().iter().map(|v| remap[v]).collect()))
            .collect();
        let order = self.vertex_order.as_ref().map(|o| {
            o.iter()
                .filter(|id| self.id_index.get(*id).is_some_and(|v| used.contains(v)))
                .cloned()
                .collect()
        });
        Self::assemble(name.to_string(), self.formal_dim, ids, levels, gens, order, false)
            .expect("subcomplex of a valid complex")
    }

    /// Translates a simplex of `other` (matched by vertex ids) into `self`.
    pub fn translate(&self, other: &FilteredComplex, s: &Simplex) -> Option<Simplex> {
        let mut verts = Vec::with_capacity(s.len());
        for &v in s.vertices() {
            verts.push(self.vertex_index(other.vertex_id(v))?);
        }
        let t = Simplex::new(verts);
        self.contains(&t).then_some(t)
    }

    /// Vertex subset of `s` at levels `<= i`: the face `σ^{-1} X_i`.
    pub fn face_below(&self, s: &Simplex, i: usize) -> Simplex {
        Simplex(
            s.vertices()
                .iter()
                .copied()
                .filter(|&v| self.level(v) <= i)
                .collect(),
        )
    }

    pub fn decompose(&self, s: &Simplex) -> Result<DecompositionView> {
        if !self.contains(s) {
            return Err(Error::UnknownSimplex(self.display(s)));
        }
        let n = self.formal_dim;
        let mut parts = vec![Vec::new(); n + 1];
        for &v in s.vertices() {
            parts[self.level(v)].push(self.vertex_id(v).to_string());
        }
        let mut running = 0;
        let part_dims = parts
            .iter()
            .map(|p| {
                running += p.len();
                ExtDim::of_count(running)
            })
            .collect();
        Ok(DecompositionView {
            simplex: self.simplex_ids(s),
            parts,
            part_dims,
        })
    }

    /// Simplicial link of `s`: simplices disjoint from `s` whose join with it
    /// is in the complex.
    pub fn link(&self, s: &Simplex) -> Vec<Simplex> {
        self.all_simplices()
            .filter(|t| s.is_face_of(t) && t.len() > s.len())
            .map(|t| {
                Simplex(
                    t.vertices()
                        .iter()
                        .copied()
                        .filter(|v| !s.contains(*v))
                        .collect(),
                )
            })
            .collect()
    }
}
