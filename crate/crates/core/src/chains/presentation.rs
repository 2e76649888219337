use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::degree::table;
use crate::complex::{FilteredComplex, Simplex, VertexIdx};
use crate::error::{Error, Result};
use crate::linalg::{int_kernel, modp_kernel, PrimeField, SparseCol, SparseMatrix};
use crate::perversity::Perversity;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ring {
    Z,
    Q,
    Fp(u64),
}

impl Ring {
    /// Checks that an `Fp` modulus is prime.
    pub fn validated(self) -> Result<Self> {
        if let Ring::Fp(p) = self {
            PrimeField::new(p)?;
        }
        Ok(self)
    }

    pub fn modulus(self) -> Option<u64> {
        match self {
            Ring::Fp(p) => Some(p),
            _ => None,
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Z => f.write_str("Z"),
            Ring::Q => f.write_str("Q"),
            Ring::Fp(p) => write!(f, "F{p}"),
        }
    }
}

impl std::str::FromStr for Ring {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "z" => Ok(Ring::Z),
            "q" => Ok(Ring::Q),
            other => {
                let p = other
                    .strip_prefix('f')
                    .and_then(|p| p.parse::<u64>().ok())
                    .ok_or_else(|| Error::RingMismatch(format!("unknown ring `{s}`")))?;
                Ring::Fp(p).validated()
            }
        }
    }
}

impl Serialize for Ring {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Intersection,
    Tame,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Absolute,
    /// Mapping cone of the inclusion of a subcomplex.
    Relative,
}

/// One ambient coordinate: a simplex, possibly from the shifted copy of the
/// subcomplex in a mapping cone.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cell {
    pub simplex: Simplex,
    pub shifted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Degree {
    pub ambient: Vec<Cell>,
    /// Basis of the chain module, as vectors over the ambient cells.
    pub basis: Vec<SparseCol>,
    /// Ambient differential into the previous degree's ambient cells.
    pub differential: SparseMatrix,
    /// `differential · basis`.
    pub images: SparseMatrix,
}

/// A chain complex given by bases inside free ambient modules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplexPresentation {
    pub ring: Ring,
    pub variant: Variant,
    pub kind: Kind,
    pub degrees: Vec<Degree>,
}

impl ChainComplexPresentation {
    pub fn rank(&self, k: usize) -> usize {
        self.degrees.get(k).map_or(0, |d| d.basis.len())
    }

    pub fn top_degree(&self) -> usize {
        self.degrees.len().saturating_sub(1)
    }

    /// `d_{k-1} ∘ d_k = 0` on the presented bases, and the images stay in the
    /// ambient module.
    pub fn check_dd(&self) -> Result<()> {
        for k in 1..self.degrees.len() {
            let prev = &self.degrees[k - 1];
            for col in &self.degrees[k].images.cols {
                let dd = prev.differential.apply(col).ok_or(Error::InconsistentComplex(k))?;
                if dd.iter().any(|&(_, v)| reduce(self.ring, v) != 0) {
                    return Err(Error::InconsistentComplex(k));
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn reduce(ring: Ring, v: i64) -> i64 {
    match ring {
        Ring::Fp(p) => v.rem_euclid(p as i64),
        _ => v,
    }
}

fn reduce_col(ring: Ring, col: SparseCol) -> SparseCol {
    col.into_iter()
        .map(|(i, v)| (i, reduce(ring, v)))
        .filter(|&(_, v)| v != 0)
        .collect()
}

/// Intersection chains: admissible chains whose boundary is admissible.
pub fn build_intersection_complex(
    x: &FilteredComplex,
    p: &Perversity,
    ring: Ring,
) -> Result<ChainComplexPresentation> {
    let pv = p.on(x)?;
    let degrees = absolute(x, &pv, ring.validated()?, Variant::Intersection, None)?;
    finish(ring, Variant::Intersection, Kind::Absolute, degrees)
}

/// Tame intersection chains: admissible regular chains, with singular faces
/// dropped from the boundary.
pub fn build_tame_complex(
    x: &FilteredComplex,
    p: &Perversity,
    ring: Ring,
) -> Result<ChainComplexPresentation> {
    let pv = p.on(x)?;
    let degrees = absolute(x, &pv, ring.validated()?, Variant::Tame, None)?;
    finish(ring, Variant::Tame, Kind::Absolute, degrees)
}

pub fn build_complex_variant(
    x: &FilteredComplex,
    p: &Perversity,
    ring: Ring,
    variant: Variant,
) -> Result<ChainComplexPresentation> {
    match variant {
        Variant::Intersection => build_intersection_complex(x, p, ring),
        Variant::Tame => build_tame_complex(x, p, ring),
    }
}

/// Chains of `x` supported on the given vertices, which should span a full
/// subcomplex.
pub fn build_supported_complex(
    x: &FilteredComplex,
    support: &BTreeSet<VertexIdx>,
    p: &Perversity,
    ring: Ring,
    variant: Variant,
) -> Result<ChainComplexPresentation> {
    let ring = ring.validated()?;
    let pv = p.on(x)?;
    let degrees = absolute(x, &pv, ring, variant, Some(support))?;
    finish(ring, variant, Kind::Absolute, degrees)
}

/// Relative chains of `(x, l)` as the mapping cone of `C(l) → C(x)`, where
/// `C(l)` consists of the chains of `x` supported in `l`. `l` must be a full
/// subcomplex of `x`, matched by vertex ids.
pub fn build_relative_complex(
    x: &FilteredComplex,
    l: &FilteredComplex,
    p: &Perversity,
    ring: Ring,
    variant: Variant,
) -> Result<ChainComplexPresentation> {
    let ring = ring.validated()?;
    let pv = p.on(x)?;
    let support = full_support(x, l)?;
    let big = absolute(x, &pv, ring, variant, None)?;
    let small = absolute(x, &pv, ring, variant, Some(&support))?;
    let mut degrees = Vec::with_capacity(big.len() + 1);
    let top = big.len();
    for k in 0..=top {
        let xk = big.get(k);
        let lk = k.checked_sub(1).and_then(|j| small.get(j));
        let x_amb = xk.map_or(0, |d| d.ambient.len());
        let mut ambient: Vec<Cell> = xk.map(|d| d.ambient.clone()).unwrap_or_default();
        if let Some(lk) = lk {
            ambient.extend(lk.ambient.iter().map(|c| Cell {
                simplex: c.simplex.clone(),
                shifted: true,
            }));
        }
        let mut basis: Vec<SparseCol> = xk.map(|d| d.basis.clone()).unwrap_or_default();
        if let Some(lk) = lk {
            basis.extend(
                lk.basis
                    .iter()
                    .map(|v| v.iter().map(|&(i, c)| (i + x_amb as u32, c)).collect()),
            );
        }
        // Differential into degree k-1: (x, y) ↦ (∂x + ι y, -∂y).
        let prev_x_amb = k.checked_sub(1).and_then(|j| big.get(j)).map_or(0, |d| d.ambient.len());
        let rows = prev_x_amb + k.checked_sub(2).and_then(|j| small.get(j)).map_or(0, |d| d.ambient.len());
        let mut cols: Vec<SparseCol> = Vec::with_capacity(ambient.len());
        if let Some(xk) = xk {
            cols.extend(xk.differential.cols.iter().cloned());
        }
        if let Some(lk) = lk {
            let big_prev = &big[k - 1];
            let index: BTreeMap<&Simplex, u32> = big_prev
                .ambient
                .iter()
                .enumerate()
                .map(|(i, c)| (&c.simplex, i as u32))
                .collect();
            for (j, c) in lk.ambient.iter().enumerate() {
                let mut col = vec![(index[&c.simplex], 1i64)];
                col.extend(
                    lk.differential.cols[j]
                        .iter()
                        .map(|&(i, v)| (i + prev_x_amb as u32, -v)),
                );
                cols.push(col);
            }
        }
        let differential = SparseMatrix::new(rows, cols);
        degrees.push(assemble_degree(ring, ambient, basis, differential, k)?);
    }
    finish(ring, variant, Kind::Relative, degrees)
}

/// Vertex set of `l` inside `x`, after checking that `l` is full.
pub(crate) fn full_support(x: &FilteredComplex, l: &FilteredComplex) -> Result<BTreeSet<VertexIdx>> {
    let mut verts = BTreeSet::new();
    for id in l.vertex_ids() {
        let v = x
            .vertex_index(id)
            .ok_or_else(|| Error::NotFullSubcomplex(format!("vertex `{id}` not in `{}`", x.name())))?;
        if x.level(v) != l.level(l.vertex_index(id).unwrap()) {
            return Err(Error::NotFullSubcomplex(format!("vertex `{id}` has a different level")));
        }
        verts.insert(v);
    }
    for s in l.all_simplices() {
        if x.translate(l, s).is_none() {
            return Err(Error::NotFullSubcomplex(format!("{} is not a simplex of `{}`", l.display(s), x.name())));
        }
    }
    for s in x.all_simplices() {
        if s.vertices().iter().all(|v| verts.contains(v)) && l.translate(x, s).is_none() {
            return Err(Error::NotFullSubcomplex(format!(
                "{} spans vertices of `{}` but is missing from it",
                x.display(s),
                l.name()
            )));
        }
    }
    Ok(verts)
}

fn finish(
    ring: Ring,
    variant: Variant,
    kind: Kind,
    degrees: Vec<Degree>,
) -> Result<ChainComplexPresentation> {
    let p = ChainComplexPresentation {
        ring,
        variant,
        kind,
        degrees,
    };
    p.check_dd()?;
    Ok(p)
}

/// Degrees of an absolute complex, optionally restricted to simplices on the
/// given vertices.
fn absolute(
    x: &FilteredComplex,
    pv: &[i64],
    ring: Ring,
    variant: Variant,
    support: Option<&BTreeSet<VertexIdx>>,
) -> Result<Vec<Degree>> {
    let adm = table(x, pv);
    let tame = variant == Variant::Tame;
    let in_support =
        |s: &Simplex| support.is_none_or(|v| s.vertices().iter().all(|u| v.contains(u)));
    let top = x.dim().max(0) as usize;
    // Ambient position of each simplex, per dimension.
    let mut position: Vec<Vec<Option<u32>>> = Vec::with_capacity(top + 1);
    let mut ambients: Vec<Vec<Cell>> = Vec::with_capacity(top + 1);
    for k in 0..=top {
        let mut pos = vec![None; x.cells(k).len()];
        let mut amb = Vec::new();
        for (i, s) in x.cells(k).iter().enumerate() {
            if adm[k][i] && in_support(s) && (!tame || x.is_regular_simplex(s)) {
                pos[i] = Some(amb.len() as u32);
                amb.push(Cell {
                    simplex: s.clone(),
                    shifted: false,
                });
            }
        }
        position.push(pos);
        ambients.push(amb);
    }
    let mut degrees = Vec::with_capacity(top + 1);
    for k in 0..=top {
        let amb = std::mem::take(&mut ambients[k]);
        let rows = if k == 0 { 0 } else { position[k - 1].iter().filter(|p| p.is_some()).count() };
        let mut diff_cols = Vec::with_capacity(amb.len());
        // Constraint rows: faces that must carry zero coefficient.
        let mut constraint_rows: BTreeMap<usize, u32> = BTreeMap::new();
        let mut constraint_cols: Vec<SparseCol> = Vec::with_capacity(amb.len());
        for c in &amb {
            let mut d = Vec::new();
            let mut m = Vec::new();
            if k > 0 {
                for (sign, f) in c.simplex.boundary() {
                    if tame && !x.is_regular_simplex(&f) {
                        continue;
                    }
                    let fi = x.index_of(&f).expect("face");
                    match position[k - 1][fi] {
                        Some(j) => d.push((j, sign)),
                        None => {
                            let next = constraint_rows.len() as u32;
                            let r = *constraint_rows.entry(fi).or_insert(next);
                            m.push((r, sign));
                        }
                    }
                }
            }
            d.sort_unstable();
            m.sort_unstable();
            diff_cols.push(d);
            constraint_cols.push(m);
        }
        let constraints = SparseMatrix::new(constraint_rows.len(), constraint_cols);
        let basis = kernel_by_blocks(&constraints, ring)?;
        let differential = SparseMatrix::new(rows, diff_cols);
        // Residual on the constrained faces must vanish.
        for v in &basis {
            let r = constraints.apply(v).ok_or(Error::InconsistentComplex(k))?;
            if r.iter().any(|&(_, c)| reduce(ring, c) != 0) {
                return Err(Error::InconsistentComplex(k));
            }
        }
        degrees.push(assemble_degree(ring, amb, basis, differential, k)?);
    }
    Ok(degrees)
}

fn assemble_degree(
    ring: Ring,
    ambient: Vec<Cell>,
    basis: Vec<SparseCol>,
    differential: SparseMatrix,
    k: usize,
) -> Result<Degree> {
    let images = basis
        .iter()
        .map(|v| {
            differential
                .apply(v)
                .map(|c| reduce_col(ring, c))
                .ok_or(Error::InconsistentComplex(k))
        })
        .collect::<Result<Vec<_>>>()?;
    let images = SparseMatrix::new(differential.rows, images);
    Ok(Degree {
        ambient,
        basis,
        differential,
        images,
    })
}

/// Kernel of a constraint matrix. Unconstrained columns give unit vectors;
/// the others are grouped into blocks that share constraint rows.
fn kernel_by_blocks(m: &SparseMatrix, ring: Ring) -> Result<Vec<SparseCol>> {
    let n = m.ncols();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut a: usize) -> usize {
        while p[a] != a {
            p[a] = p[p[a]];
            a = p[a];
        }
        a
    }
    let mut row_owner: Vec<Option<usize>> = vec![None; m.rows];
    for (j, col) in m.cols.iter().enumerate() {
        for &(r, _) in col {
            match row_owner[r as usize] {
                None => row_owner[r as usize] = Some(j),
                Some(o) => {
                    let (a, b) = (find(&mut parent, o), find(&mut parent, j));
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for j in 0..n {
        if !m.cols[j].is_empty() {
            let root = find(&mut parent, j);
            blocks.entry(root).or_default().push(j);
        }
    }
    let mut out: Vec<SparseCol> = (0..n)
        .filter(|&j| m.cols[j].is_empty())
        .map(|j| vec![(j as u32, 1)])
        .collect();
    for cols in blocks.values() {
        let mut rows: BTreeSet<u32> = BTreeSet::new();
        for &j in cols {
            rows.extend(m.cols[j].iter().map(|(r, _)| *r));
        }
        let rmap: BTreeMap<u32, u32> = rows.iter().enumerate().map(|(i, &r)| (r, i as u32)).collect();
        let local = SparseMatrix::new(
            rows.len(),
            cols.iter()
                .map(|&j| m.cols[j].iter().map(|&(r, v)| (rmap[&r], v)).collect())
                .collect(),
        );
        let ker = match ring {
            Ring::Fp(p) => modp_kernel(p, &local),
            Ring::Z | Ring::Q => int_kernel(&local)
                .ok_or_else(|| Error::Internal("kernel coefficient exceeds 64 bits".into()))?,
        };
        for v in ker {
            let mut g: SparseCol = v.into_iter().map(|(i, c)| (cols[i as usize] as u32, c)).collect();
            g.sort_unstable();
            out.push(g);
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_complex;
    use crate::complex::tests::raw;

    fn cone_circle() -> FilteredComplex {
        build_complex(&raw(
            "cone",
            2,
            &[("w", 0), ("a", 2), ("b", 2), ("c", 2)],
            &[&["w", "a", "b"], &["w", "b", "c"], &["w", "a", "c"]],
        ))
        .unwrap()
    }

    #[test]
    fn regular_circle_is_ordinary() {
        let x = build_complex(&raw(
            "c",
            1,
            &[("a", 1), ("b", 1), ("c", 1)],
            &[&["a", "b"], &["b", "c"], &["a", "c"]],
        ))
        .unwrap();
        let p = build_intersection_complex(&x, &Perversity::zero(&x), Ring::Z).unwrap();
        assert_eq!((p.rank(0), p.rank(1)), (3, 3));
    }

    #[test]
    fn cone_with_negative_apex_value() {
        let x = cone_circle();
        let p = build_intersection_complex(&x, &Perversity::constant(&x, -1), Ring::Z).unwrap();
        // Nothing touching w is admissible.
        assert_eq!((p.rank(0), p.rank(1), p.rank(2)), (3, 3, 0));
        let p = build_intersection_complex(&x, &Perversity::constant(&x, 2), Ring::Z).unwrap();
        assert_eq!((p.rank(0), p.rank(1), p.rank(2)), (4, 6, 3));
    }

    #[test]
    fn apex_zero_keeps_cycles_through_the_cone() {
        let x = cone_circle();
        let p = build_intersection_complex(&x, &Perversity::zero(&x), Ring::Z).unwrap();
        // Edges {w,*} are not admissible; triangles are, but only combinations
        // whose boundary avoids those edges survive: the full disc.
        assert_eq!((p.rank(0), p.rank(1), p.rank(2)), (3, 3, 1));
        let f2 = build_intersection_complex(&x, &Perversity::zero(&x), Ring::Fp(2)).unwrap();
        assert_eq!(f2.rank(2), 1);
    }

    #[test]
    fn tame_and_relative_shapes() {
        let x = cone_circle();
        let p = Perversity::constant(&x, 2);
        let t = build_tame_complex(&x, &p, Ring::Z).unwrap();
        assert_eq!((t.rank(0), t.rank(1), t.rank(2)), (3, 6, 3));
        let base: BTreeSet<VertexIdx> = ["a", "b", "c"].iter().map(|v| x.vertex_index(v).unwrap()).collect();
        let l = x.full_subcomplex("base", &base);
        let r = build_relative_complex(&x, &l, &p, Ring::Z, Variant::Tame).unwrap();
        assert_eq!(r.degrees.len(), 4);
        assert_eq!(r.rank(1), 6 + 3);
        let bad = x.closure("bad", &[x.simplex(&["a", "b"]).unwrap(), x.simplex(&["c"]).unwrap()]);
        assert!(matches!(
            build_relative_complex(&x, &bad, &p, Ring::Z, Variant::Intersection),
            Err(Error::NotFullSubcomplex(_))
        ));
    }

    #[test]
    fn rings_parse() {
        assert_eq!("z".parse::<Ring>().unwrap(), Ring::Z);
        assert_eq!("F2".parse::<Ring>().unwrap(), Ring::Fp(2));
        assert_eq!("f4".parse::<Ring>(), Err(Error::NotPrime(4)));
        assert!("r".parse::<Ring>().is_err());
    }
}
