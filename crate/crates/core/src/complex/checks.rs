//! Advisory PL checks. Nothing downstream depends on them.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::{FilteredComplex, Simplex, VertexIdx};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PseudomanifoldReport {
    pub is_pm: bool,
    /// Simplices that are not faces of a top-dimensional simplex.
    pub not_dense: Vec<String>,
    /// Regular codimension-one simplices not bounding exactly two top simplices.
    pub bad_pairing: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalReport {
    pub is_normal: bool,
    pub witnesses: Vec<String>,
}

pub fn check_pseudomanifold(x: &FilteredComplex) -> PseudomanifoldReport {
    let n = x.formal_dim();
    let tops = x.cells(n);
    let mut in_top: BTreeSet<&Simplex> = BTreeSet::new();
    let mut cofaces: HashMap<&Simplex, usize> = HashMap::new();
    for t in tops {
        for f in t.faces() {
            if let Some(i) = x.index_of(&f) {
                in_top.insert(&x.cells(f.len() - 1)[i]);
            }
        }
        if n > 0 {
            for (_, f) in t.boundary() {
                let i = x.index_of(&f).expect("face");
                *cofaces.entry(&x.cells(n - 1)[i]).or_default() += 1;
            }
        }
    }
    let not_dense: Vec<String> = x
        .all_simplices()
        .filter(|s| !in_top.contains(s))
        .map(|s| x.display(s))
        .collect();
    let bad_pairing: Vec<String> = if n == 0 {
        Vec::new()
    } else {
        x.cells(n - 1)
            .iter()
            .filter(|s| x.simplex_level(s) == n)
            .filter(|s| cofaces.get(s).copied().unwrap_or(0) != 2)
            .map(|s| x.display(s))
            .collect()
    };
    PseudomanifoldReport {
        is_pm: not_dense.is_empty() && bad_pairing.is_empty(),
        not_dense,
        bad_pairing,
    }
}

/// Every simplex of dimension at most `n - 2` must have a connected link.
pub fn check_normal(x: &FilteredComplex) -> NormalReport {
    let n = x.formal_dim() as i64;
    let mut witnesses = Vec::new();
    for s in x.all_simplices() {
        if s.dim() > n - 2 {
            continue;
        }
        if link_components(&x.link(s)) != 1 {
            witnesses.push(x.display(s));
        }
    }
    NormalReport {
        is_normal: witnesses.is_empty(),
        witnesses,
    }
}

/// Number of connected components of a complex given by its simplices.
pub(crate) fn link_components(simplices: &[Simplex]) -> usize {
    let verts: BTreeSet<VertexIdx> = simplices
        .iter()
        .flat_map(|s| s.vertices().iter().copied())
        .collect();
    let index: HashMap<VertexIdx, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut parent: Vec<usize> = (0..verts.len()).collect();
    fn find(p: &mut [usize], mut a: usize) -> usize {
        while p[a] != a {
            p[a] = p[p[a]];
            a = p[a];
        }
        a
    }
    for s in simplices {
        let vs = s.vertices();
        for w in vs.windows(2) {
            let (a, b) = (find(&mut parent, index[&w[0]]), find(&mut parent, index[&w[1]]));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    (0..verts.len()).filter(|&i| find(&mut parent, i) == i).count()
}

#[cfg(test)]
mod tests {
    use crate::complex::tests::raw;
    use crate::complex::*;

    fn wedge(level: i64) -> FilteredComplex {
        build_complex(&raw(
            "wedge",
            1,
            &[("o", level), ("a", 1), ("b", 1), ("c", 1), ("d", 1)],
            &[&["o", "a"], &["a", "b"], &["o", "b"], &["o", "c"], &["c", "d"], &["o", "d"]],
        ))
        .unwrap()
    }

    #[test]
    fn wedge_of_circles() {
        let r = check_pseudomanifold(&wedge(0));
        assert!(r.is_pm, "{r:?}");
        let r = check_pseudomanifold(&wedge(1));
        assert!(!r.is_pm);
        assert_eq!(r.bad_pairing, vec!["{o}"]);
        assert!(r.not_dense.is_empty());
    }

    #[test]
    fn free_edge() {
        let x = build_complex(&raw("t", 2, &[("a", 2), ("b", 2), ("c", 2)], &[&["a", "b", "c"]])).unwrap();
        let r = check_pseudomanifold(&x);
        assert!(!r.is_pm);
        assert_eq!(r.bad_pairing.len(), 3);
        assert!(r.bad_pairing.contains(&"{a,b}".to_string()));
    }

    #[test]
    fn dangling_edge_is_not_dense() {
        let x = build_complex(&raw(
            "t",
            2,
            &[("a", 2), ("b", 2), ("c", 2), ("d", 2)],
            &[&["a", "b", "c"], &["c", "d"]],
        ))
        .unwrap();
        let r = check_pseudomanifold(&x);
        assert!(r.not_dense.contains(&"{c,d}".to_string()));
        assert!(r.not_dense.contains(&"{d}".to_string()));
    }

    #[test]
    fn circle_is_normal() {
        let x = build_complex(&raw(
            "c",
            1,
            &[("a", 1), ("b", 1), ("c", 1)],
            &[&["a", "b"], &["b", "c"], &["a", "c"]],
        ))
        .unwrap();
        assert!(check_normal(&x).is_normal);
    }
}
