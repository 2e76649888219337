use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{FilteredComplex, Simplex};

/// Stratum identifier of the form `S{level}.{index}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StratumId(pub String);

impl StratumId {
    pub fn new(level: usize, index: usize) -> Self {
        StratumId(format!("S{level}.{index}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for StratumId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for StratumId {
    fn from(s: &str) -> Self {
        StratumId(s.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    pub id: StratumId,
    pub level: usize,
    pub codim: usize,
    pub regular: bool,
    pub simplices: Vec<Simplex>,
}

/// Strata of a filtered complex with their closure order and depths.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StratumSet {
    strata: Vec<Stratum>,
    /// `up[s]`: strata `t` with `s ⪯ t`, reflexive and transitive.
    up: Vec<BTreeSet<usize>>,
    depth: Vec<usize>,
    membership: Vec<Vec<usize>>,
    by_id: BTreeMap<StratumId, usize>,
}

impl StratumSet {
    pub fn len(&self) -> usize {
        self.strata.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strata.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Stratum> {
        self.strata.iter()
    }

    pub fn get(&self, i: usize) -> &Stratum {
        &self.strata[i]
    }

    pub fn index(&self, id: &StratumId) -> Option<usize> {
        self.by_id.get(id).copied()
    }

    pub fn by_id(&self, id: &StratumId) -> Option<&Stratum> {
        self.index(id).map(|i| &self.strata[i])
    }

    pub fn depth(&self, i: usize) -> usize {
        self.depth[i]
    }

    /// `a ⪯ b`.
    pub fn le(&self, a: usize, b: usize) -> bool {
        self.up[a].contains(&b)
    }

    /// Strict covering relations `a ≺ b` with nothing in between.
    pub fn hasse_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.len() {
            for &b in &self.up[a] {
                if a == b {
                    continue;
                }
                let between = self.up[a]
                    .iter()
                    .any(|&c| c != a && c != b && self.le(c, b));
                if !between {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Stratum containing the open simplex `k`-cell number `i`.
    pub fn of_cell(&self, k: usize, i: usize) -> usize {
        self.membership[k][i]
    }

    pub fn singular(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| !self.strata[i].regular)
    }
}

pub(super) fn compute(x: &FilteredComplex) -> StratumSet {
    let total = x.num_simplices();
    let mut offset = Vec::with_capacity(x.cells.len());
    let mut acc = 0;
    for c in &x.cells {
        offset.push(acc);
        acc += c.len();
    }
    let mut uf = UnionFind::new(total);
    for (k, cells) in x.cells.iter().enumerate().skip(1) {
        for (i, s) in cells.iter().enumerate() {
            let lvl = x.simplex_level(s);
            for (_, f) in s.boundary() {
                if x.simplex_level(&f) == lvl {
                    let j = x.lookup[&f];
                    uf.union(offset[k] + i, offset[k - 1] + j);
                }
            }
        }
    }
    // Components keyed by (level, least member simplex).
    let mut comps: BTreeMap<usize, (usize, Simplex)> = BTreeMap::new();
    for (k, cells) in x.cells.iter().enumerate() {
        for (i, s) in cells.iter().enumerate() {
            let root = uf.find(offset[k] + i);
            let lvl = x.simplex_level(s);
            comps
                .entry(root)
                .and_modify(|e| {
                    if *s < e.1 {
                        e.1 = s.clone()
                    }
                })
                .or_insert((lvl, s.clone()));
        }
    }
    let mut keyed: Vec<(usize, Simplex, usize)> =
        comps.into_iter().map(|(root, (l, s))| (l, s, root)).collect();
    keyed.sort();
    let mut root_to_stratum = BTreeMap::new();
    let mut strata = Vec::with_capacity(keyed.len());
    let mut per_level: BTreeMap<usize, usize> = BTreeMap::new();
    for (lvl, _, root) in &keyed {
        let idx = per_level.entry(*lvl).or_insert(0);
        root_to_stratum.insert(*root, strata.len());
        strata.push(Stratum {
            id: StratumId::new(*lvl, *idx),
            level: *lvl,
            codim: x.formal_dim - lvl,
            regular: *lvl == x.formal_dim,
            simplices: Vec::new(),
        });
        *idx += 1;
    }
    let mut membership = Vec::with_capacity(x.cells.len());
    for (k, cells) in x.cells.iter().enumerate() {
        let mut m = Vec::with_capacity(cells.len());
        for (i, s) in cells.iter().enumerate() {
            let st = root_to_stratum[&uf.find(offset[k] + i)];
            strata[st].simplices.push(s.clone());
            m.push(st);
        }
        membership.push(m);
    }
    for s in &mut strata {
        s.simplices.sort();
    }

    let n = strata.len();
    let mut direct: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for (k, cells) in x.cells.iter().enumerate().skip(1) {
        for (i, s) in cells.iter().enumerate() {
            let top = membership[k][i];
            for (_, f) in s.boundary() {
                let low = membership[k - 1][x.lookup[&f]];
                if low != top {
                    direct[low].insert(top);
                }
            }
        }
    }
    // Related distinct strata have strictly increasing levels, so processing
    // by decreasing level closes the relation in one pass.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(strata[i].level));
    let mut up: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut depth = vec![0usize; n];
    for &s in &order {
        let mut set = BTreeSet::from([s]);
        let mut d = 0;
        for &t in &direct[s] {
            set.extend(up[t].iter().copied());
            d = d.max(depth[t] + 1);
        }
        up[s] = set;
        depth[s] = d;
    }
    let by_id = strata
        .iter()
        .enumerate()
        .map(|(i, s)| (s.id.clone(), i))
        .collect();
    StratumSet {
        strata,
        up,
        depth,
        membership,
        by_id,
    }
}

/// Recomputes the strata of `x` from scratch.
pub fn compute_strata(x: &FilteredComplex) -> StratumSet {
    compute(x)
}

impl FilteredComplex {
    /// Stratum of the open simplex `s`.
    pub fn stratum_of(&self, s: &Simplex) -> Option<usize> {
        let k = s.len().checked_sub(1)?;
        let i = self.index_of(s)?;
        Some(self.strata.of_cell(k, i))
    }

    /// Strata met by `s`, one per vertex level, as `(stratum, face σ^{-1}X_level)`.
    pub fn strata_met(&self, s: &Simplex) -> Vec<(usize, Simplex)> {
        let mut levels: Vec<usize> = s.vertices().iter().map(|&v| self.level(v)).collect();
        levels.sort_unstable();
        levels.dedup();
        levels
            .into_iter()
            .map(|l| {
                let face = self.face_below(s, l);
                let st = self.stratum_of(&face).expect("face of a simplex is a simplex");
                (st, face)
            })
            .collect()
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::complex::tests::raw;
    use crate::complex::*;

    fn octahedron(top_level: i64) -> RawComplex {
        let mut r = raw(
            "pointed-sphere",
            2,
            &[("n", top_level), ("s", 2), ("e1", 2), ("e2", 2), ("e3", 2), ("e4", 2)],
            &[],
        );
        for pole in ["n", "s"] {
            for (a, b) in [("e1", "e2"), ("e2", "e3"), ("e3", "e4"), ("e1", "e4")] {
                r.simplices.push(vec![pole.into(), a.into(), b.into()]);
            }
        }
        r
    }

    #[test]
    fn pointed_sphere_strata() {
        let x = build_complex(&octahedron(0)).unwrap();
        let st = x.strata();
        assert_eq!(st.len(), 2);
        let pt = st.get(0);
        assert_eq!(pt.id.as_str(), "S0.0");
        assert_eq!(pt.codim, 2);
        assert!(!pt.regular);
        assert_eq!(pt.simplices.len(), 1);
        let reg = st.get(1);
        assert_eq!(reg.id.as_str(), "S2.0");
        assert!(reg.regular);
        assert!(st.le(0, 1) && !st.le(1, 0));
        assert_eq!(st.depth(0), 1);
        assert_eq!(st.depth(1), 0);
    }

    #[test]
    fn disjoint_circles_are_incomparable() {
        let x = build_complex(&raw(
            "two",
            1,
            &[("a", 1), ("b", 1), ("c", 1), ("d", 1), ("e", 1), ("f", 1)],
            &[&["a", "b"], &["b", "c"], &["a", "c"], &["d", "e"], &["e", "f"], &["d", "f"]],
        ))
        .unwrap();
        let st = x.strata();
        assert_eq!(st.len(), 2);
        assert!(st.iter().all(|s| s.regular));
        assert!(!st.le(0, 1) && !st.le(1, 0));
        assert_eq!(st.get(0).id.as_str(), "S1.0");
        assert_eq!(st.get(1).id.as_str(), "S1.1");
    }

    #[test]
    fn each_simplex_meets_one_stratum_per_level() {
        let x = build_complex(&octahedron(0)).unwrap();
        for s in x.all_simplices() {
            let met = x.strata_met(s);
            let mut levels: Vec<_> = met.iter().map(|(st, _)| x.strata().get(*st).level).collect();
            let len = levels.len();
            levels.dedup();
            assert_eq!(levels.len(), len);
        }
    }
}
