//! Independent oracles for integration tests: ordinary (relative) simplicial
//! homology from maximal simplices, with its own dense integer reduction.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use perverse::chains::Ring;
use perverse::homology::HomologyGroup;
use perverse::FilteredComplex;

/// Faces by dimension, each face a sorted list of vertex ids.
pub struct Faces {
    pub by_dim: Vec<Vec<Vec<String>>>,
}

impl Faces {
    pub fn of(x: &FilteredComplex) -> Self {
        Self::from_maximal(&x.to_raw().simplices)
    }

    pub fn from_maximal(maximal: &[Vec<String>]) -> Self {
        let mut all: BTreeSet<Vec<String>> = BTreeSet::new();
        for m in maximal {
            let mut m = m.clone();
            m.sort();
            let n = m.len();
            for mask in 1u32..(1 << n) {
                all.insert((0..n).filter(|i| mask >> i & 1 == 1).map(|i| m[i].clone()).collect());
            }
        }
        let top = all.iter().map(Vec::len).max().unwrap_or(0);
        let mut by_dim = vec![Vec::new(); top];
        for f in all {
            by_dim[f.len() - 1].push(f);
        }
        Faces { by_dim }
    }

    /// Faces whose vertices all pass `keep`.
    pub fn restrict(&self, keep: impl Fn(&str) -> bool) -> Self {
        let mut by_dim: Vec<Vec<Vec<String>>> = self
            .by_dim
            .iter()
            .map(|fs| fs.iter().filter(|f| f.iter().all(|v| keep(v))).cloned().collect())
            .collect();
        while by_dim.last().is_some_and(Vec::is_empty) {
            by_dim.pop();
        }
        Faces { by_dim }
    }
}

/// Boundary matrix from dimension `k` to `k - 1`, keeping only faces that
/// are not in `killed` (the quotient by a subcomplex).
fn boundary(faces: &Faces, k: usize, killed: &dyn Fn(&[String]) -> bool) -> Vec<Vec<i128>> {
    let rows: Vec<&Vec<String>> = faces.by_dim[k - 1].iter().filter(|f| !killed(f)).collect();
    let index: BTreeMap<&Vec<String>, usize> = rows.iter().enumerate().map(|(i, f)| (*f, i)).collect();
    let cols: Vec<&Vec<String>> = faces.by_dim[k].iter().filter(|f| !killed(f)).collect();
    let mut m = vec![vec![0i128; cols.len()]; rows.len()];
    for (j, f) in cols.iter().enumerate() {
        for i in 0..f.len() {
            let mut g = (*f).clone();
            g.remove(i);
            if let Some(&r) = index.get(&g) {
                m[r][j] += if i % 2 == 0 { 1 } else { -1 };
            }
        }
    }
    m
}

/// Nonzero diagonal of a Smith form over Z (or rank-many ones over F_p).
pub fn diagonal(mut m: Vec<Vec<i128>>, modulus: Option<i128>) -> Vec<i128> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let norm = |x: i128| match modulus {
        Some(p) => x.rem_euclid(p),
        None => x,
    };
    for r in m.iter_mut() {
        for x in r.iter_mut() {
            *x = norm(*x);
        }
    }
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // Pivot of least absolute value in the remaining block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if m[i][j] != 0 && best.is_none_or(|(a, b)| m[i][j].abs() < m[a][b].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        m.swap(t, pi);
        for r in m.iter_mut() {
            r.swap(t, pj);
        }
        if let Some(p) = modulus {
            let inv = mod_inverse(m[t][t], p);
            for j in t..cols {
                m[t][j] = norm(m[t][j] * inv);
            }
        }
        let mut clean = true;
        for i in t + 1..rows {
            let q = if modulus.is_some() { m[i][t] } else { m[i][t].div_euclid(m[t][t]) };
            if q != 0 {
                for j in t..cols {
                    m[i][j] = norm(m[i][j] - q * m[t][j]);
                }
            }
            clean &= m[i][t] == 0;
        }
        for j in t + 1..cols {
            let q = if modulus.is_some() { m[t][j] } else { m[t][j].div_euclid(m[t][t]) };
            if q != 0 {
                for i in t..rows {
                    m[i][j] = norm(m[i][j] - q * m[i][t]);
                }
            }
            clean &= m[t][j] == 0;
        }
        if !clean {
            continue;
        }
        if modulus.is_none() {
            // The pivot must divide the rest of the block.
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| m[i][j] % m[t][t] != 0));
            if let Some(i) = bad {
                for j in t..cols {
                    m[t][j] += m[i][j];
                }
                continue;
            }
        }
        out.push(m[t][t].abs());
        t += 1;
    }
    out
}

fn mod_inverse(a: i128, p: i128) -> i128 {
    let (mut e, mut base, mut acc) = (p - 2, a.rem_euclid(p), 1i128);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

/// Ordinary homology of the faces modulo those spanned by `sub` vertices.
pub fn relative_homology(faces: &Faces, sub: &dyn Fn(&str) -> bool, ring: Ring) -> Vec<HomologyGroup> {
    let killed = |f: &[String]| f.iter().all(|v| sub(v));
    let n = faces.by_dim.len();
    let modulus = match ring {
        Ring::Fp(p) => Some(p as i128),
        _ => None,
    };
    let sizes: Vec<usize> = (0..n).map(|k| faces.by_dim[k].iter().filter(|f| !killed(f)).count()).collect();
    // diags[k] is the Smith diagonal of the boundary out of degree k.
    let diags: Vec<Vec<i128>> = (0..=n)
        .map(|k| if k == 0 || k == n { Vec::new() } else { diagonal(boundary(faces, k, &killed), modulus) })
        .collect();
    (0..n)
        .map(|k| HomologyGroup {
            ring,
            free_rank: sizes[k] - diags[k].len() - diags[k + 1].len(),
            torsion: match ring {
                Ring::Z => diags[k + 1].iter().filter(|&&d| d > 1).map(|&d| d as u64).collect(),
                _ => Vec::new(),
            },
        })
        .collect()
}

pub fn ordinary_homology(faces: &Faces, ring: Ring) -> Vec<HomologyGroup> {
    relative_homology(faces, &|_| false, ring)
}

/// Sorted invariant factors, so that oracle torsion compares with the library.
pub fn normalized(mut g: Vec<HomologyGroup>) -> Vec<HomologyGroup> {
    for h in &mut g {
        h.torsion.sort_unstable();
    }
    g
}

/// Pads both lists with zero groups to a common length and compares.
pub fn same_groups(a: &[HomologyGroup], b: &[HomologyGroup]) -> bool {
    let n = a.len().max(b.len());
    let zero = |g: &[HomologyGroup]| HomologyGroup::zero(g.first().map_or(Ring::Z, |h| h.ring));
    (0..n).all(|k| {
        let x = a.get(k).cloned().unwrap_or_else(|| zero(a));
        let y = b.get(k).cloned().unwrap_or_else(|| zero(b));
        x == y
    })
}

pub fn show(g: &[HomologyGroup]) -> String {
    let parts: Vec<String> = g.iter().map(|h| h.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// Prints the verdict line for one criterion and fails the test on FAIL.
/// Written to the raw stdout handle so the line survives output capture.
pub fn report(criterion: usize, title: &str, failures: &[String], detail: &str) {
    use std::io::Write;
    let line = if failures.is_empty() {
        format!("criterion {criterion:>2} PASS: {title} [{detail}]")
    } else {
        format!("criterion {criterion:>2} FAIL: {title} [{} failures; first: {}]", failures.len(), failures[0])
    };
    let _ = writeln!(std::io::stdout().lock(), "{line}");
    if !failures.is_empty() {
        panic!("criterion {criterion} failed: {failures:#?}");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_of_known_matrices() {
        assert_eq!(diagonal(vec![vec![2, 4], vec![6, 8]], None), vec![2, 4]);
        assert_eq!(diagonal(vec![vec![2, 0], vec![0, 3]], None), vec![1, 6]);
        assert_eq!(diagonal(vec![vec![2, 0], vec![0, 3]], Some(2)), vec![1]);
    }
}
