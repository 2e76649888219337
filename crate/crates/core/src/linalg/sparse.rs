//! Sparse elimination with unit pivots.
//!
//! Columns are reduced by unimodular column operations around unit pivots
//! chosen Markowitz-style. What remains has no unit entry and is handed to the
//! dense Smith normal form.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};
use std::fmt::Debug;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::snf::{invariant_factors, smith_normal_form, IntMatrix};

/// Sparse column: `(row, value)` sorted by row, no zero values.
pub type SparseCol = Vec<(u32, i64)>;

/// A sparse integer matrix stored by columns.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: Vec<SparseCol>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: Vec<SparseCol>) -> Self {
        debug_assert!(cols.iter().all(|c| c.windows(2).all(|w| w[0].0 < w[1].0)));
        SparseMatrix { rows, cols }
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }

    pub fn to_dense(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.rows, self.cols.len());
        for (j, c) in self.cols.iter().enumerate() {
            for &(i, x) in c {
                m[(i as usize, j)] = BigInt::from(x);
            }
        }
        m
    }

    /// Product `self · x` for a sparse vector `x`, or `None` on overflow.
    pub fn apply(&self, x: &SparseCol) -> Option<SparseCol> {
        let mut acc: std::collections::BTreeMap<u32, i64> = Default::default();
        for &(j, c) in x {
            for &(i, a) in &self.cols[j as usize] {
                let e = acc.entry(i).or_insert(0);
                *e = e.checked_add(a.checked_mul(c)?)?;
            }
        }
        Some(acc.into_iter().filter(|&(_, v)| v != 0).collect())
    }
}

/// Coefficient arithmetic for the eliminator.
pub(crate) trait Coeffs {
    type E: Clone + PartialEq + Debug;
    fn from_i64(&self, x: i64) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn is_unit(&self, a: &Self::E) -> bool;
    /// `a · u⁻¹` for a unit `u`.
    fn div_unit(&self, a: &Self::E, u: &Self::E) -> Self::E;
    /// `a - f·b`, `None` on overflow.
    fn sub_mul(&self, a: &Self::E, f: &Self::E, b: &Self::E) -> Option<Self::E>;
    /// `-f·b`, `None` on overflow.
    fn neg_mul(&self, f: &Self::E, b: &Self::E) -> Option<Self::E>;
}

pub(crate) struct Int64;
pub(crate) struct BigZ;
pub(crate) struct ModP(pub u64);

impl Coeffs for Int64 {
    type E = i64;
    fn from_i64(&self, x: i64) -> i64 {
        x
    }
    fn is_zero(&self, a: &i64) -> bool {
        *a == 0
    }
    fn is_unit(&self, a: &i64) -> bool {
        *a == 1 || *a == -1
    }
    fn div_unit(&self, a: &i64, u: &i64) -> i64 {
        a * u
    }
    fn sub_mul(&self, a: &i64, f: &i64, b: &i64) -> Option<i64> {
        a.checked_sub(f.checked_mul(*b)?)
    }
    fn neg_mul(&self, f: &i64, b: &i64) -> Option<i64> {
        f.checked_mul(*b)?.checked_neg()
    }
}

impl Coeffs for BigZ {
    type E = BigInt;
    fn from_i64(&self, x: i64) -> BigInt {
        BigInt::from(x)
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn is_unit(&self, a: &BigInt) -> bool {
        a.abs().is_one()
    }
    fn div_unit(&self, a: &BigInt, u: &BigInt) -> BigInt {
        a * u
    }
    fn sub_mul(&self, a: &BigInt, f: &BigInt, b: &BigInt) -> Option<BigInt> {
        Some(a - f * b)
    }
    fn neg_mul(&self, f: &BigInt, b: &BigInt) -> Option<BigInt> {
        Some(-(f * b))
    }
}

impl ModP {
    fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.0 as u128) as u64
    }

    pub(crate) fn inv(&self, a: u64) -> u64 {
        // Fermat: a^(p-2).
        let (mut base, mut e, mut acc) = (a % self.0, self.0 - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

impl Coeffs for ModP {
    type E = u64;
    fn from_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.0 as i64) as u64
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn is_unit(&self, a: &u64) -> bool {
        *a != 0
    }
    fn div_unit(&self, a: &u64, u: &u64) -> u64 {
        self.mul(*a, self.inv(*u))
    }
    fn sub_mul(&self, a: &u64, f: &u64, b: &u64) -> Option<u64> {
        let fb = self.mul(*f, *b);
        Some((*a + self.0 - fb) % self.0)
    }
    fn neg_mul(&self, f: &u64, b: &u64) -> Option<u64> {
        Some((self.0 - self.mul(*f, *b)) % self.0)
    }
}

#[derive(Debug)]
pub(crate) struct Overflow;

pub(crate) struct Eliminator<'r, R: Coeffs> {
    ring: &'r R,
    cols: Vec<Vec<(u32, R::E)>>,
    rows: Vec<BTreeSet<u32>>,
    active: Vec<bool>,
    v: Option<Vec<Vec<(u32, R::E)>>>,
    pub pivots: usize,
}

impl<'r, R: Coeffs> Eliminator<'r, R> {
    pub fn new(ring: &'r R, m: &SparseMatrix, track: bool) -> Self {
        let mut rows = vec![BTreeSet::new(); m.rows];
        let mut cols = Vec::with_capacity(m.cols.len());
        for (j, c) in m.cols.iter().enumerate() {
            let col: Vec<(u32, R::E)> = c
                .iter()
                .map(|&(i, x)| (i, ring.from_i64(x)))
                .filter(|(_, x)| !ring.is_zero(x))
                .collect();
            for (i, _) in &col {
                rows[*i as usize].insert(j as u32);
            }
            cols.push(col);
        }
        let v = track.then(|| {
            (0..m.cols.len())
                .map(|j| vec![(j as u32, ring.from_i64(1))])
                .collect()
        });
        Eliminator {
            ring,
            active: vec![true; cols.len()],
            cols,
            rows,
            v,
            pivots: 0,
        }
    }

    pub fn run(&mut self) -> Result<(), Overflow> {
        let mut heap: BinaryHeap<Reverse<(usize, u32)>> = self
            .cols
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_empty())
            .map(|(j, c)| Reverse((c.len(), j as u32)))
            .collect();
        while let Some(Reverse((len, c))) = heap.pop() {
            let ci = c as usize;
            if !self.active[ci] || self.cols[ci].len() != len || len == 0 {
                continue;
            }
            let pivot = self.cols[ci]
                .iter()
                .filter(|(_, x)| self.ring.is_unit(x))
                .min_by_key(|(r, _)| (self.rows[*r as usize].len(), *r))
                .cloned();
            let Some((r, u)) = pivot else { continue };
            let others: Vec<u32> = self.rows[r as usize]
                .iter()
                .copied()
                .filter(|&c2| c2 != c)
                .collect();
            let pcol = self.cols[ci].clone();
            let pv = self.v.as_ref().map(|v| v[ci].clone());
            for c2 in others {
                let c2i = c2 as usize;
                let pos = self.cols[c2i]
                    .binary_search_by_key(&r, |(i, _)| *i)
                    .expect("row index consistent");
                let f = self.ring.div_unit(&self.cols[c2i][pos].1, &u);
                let old = std::mem::take(&mut self.cols[c2i]);
                let (new, added, removed) = axpy(self.ring, &old, &f, &pcol)?;
                for i in added {
                    self.rows[i as usize].insert(c2);
                }
                for i in removed {
                    self.rows[i as usize].remove(&c2);
                }
                self.cols[c2i] = new;
                if let (Some(v), Some(pv)) = (self.v.as_mut(), pv.as_ref()) {
                    let old = std::mem::take(&mut v[c2i]);
                    v[c2i] = axpy(self.ring, &old, &f, pv)?.0;
                }
                heap.push(Reverse((self.cols[c2i].len(), c2)));
            }
            for (i, _) in &pcol {
                self.rows[*i as usize].remove(&c);
            }
            debug_assert!(self.rows[r as usize].is_empty());
            self.cols[ci].clear();
            self.active[ci] = false;
            self.pivots += 1;
        }
        Ok(())
    }

    /// Active rows and columns left without a unit pivot.
    pub fn leftover(&self) -> (Vec<u32>, Vec<u32>) {
        let rows: Vec<u32> = (0..self.rows.len() as u32)
            .filter(|&i| !self.rows[i as usize].is_empty())
            .collect();
        let cols: Vec<u32> = (0..self.cols.len() as u32)
            .filter(|&j| self.active[j as usize])
            .collect();
        (rows, cols)
    }

    pub fn col(&self, j: u32) -> &[(u32, R::E)] {
        &self.cols[j as usize]
    }

    pub fn v_col(&self, j: u32) -> &[(u32, R::E)] {
        &self.v.as_ref().expect("transforms tracked")[j as usize]
    }
}

type Axpy<E> = (Vec<(u32, E)>, Vec<u32>, Vec<u32>);

/// `a - f·b` on sparse columns, with the rows that appeared and vanished.
fn axpy<R: Coeffs>(
    ring: &R,
    a: &[(u32, R::E)],
    f: &R::E,
    b: &[(u32, R::E)],
) -> Result<Axpy<R::E>, Overflow> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut added, mut removed) = (Vec::new(), Vec::new());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ra = a.get(i).map(|x| x.0).unwrap_or(u32::MAX);
        let rb = b.get(j).map(|x| x.0).unwrap_or(u32::MAX);
        if ra < rb {
            out.push(a[i].clone());
            i += 1;
        } else if rb < ra {
            let x = ring.neg_mul(f, &b[j].1).ok_or(Overflow)?;
            if !ring.is_zero(&x) {
                out.push((rb, x));
                added.push(rb);
            }
            j += 1;
        } else {
            let x = ring.sub_mul(&a[i].1, f, &b[j].1).ok_or(Overflow)?;
            if ring.is_zero(&x) {
                removed.push(ra);
            } else {
                out.push((ra, x));
            }
            i += 1;
            j += 1;
        }
    }
    Ok((out, added, removed))
}

/// Rank and invariant factors of an integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntInvariants {
    pub rank: usize,
    /// Invariant factors greater than one, in divisibility order.
    pub torsion: Vec<BigInt>,
}

pub fn int_invariants(m: &SparseMatrix) -> IntInvariants {
    match invariants_with(&Int64, m) {
        Some(r) => r,
        None => invariants_with(&BigZ, m).expect("big integers do not overflow"),
    }
}

fn invariants_with<R: Coeffs>(ring: &R, m: &SparseMatrix) -> Option<IntInvariants>
where
    R::E: ToBig,
{
    let mut e = Eliminator::new(ring, m, false);
    e.run().ok()?;
    let (rows, cols) = e.leftover();
    let dense = leftover_dense(&e, &rows, &cols);
    let diag = invariant_factors(&dense);
    Some(IntInvariants {
        rank: e.pivots + diag.iter().filter(|d| !d.is_zero()).count(),
        torsion: diag.into_iter().filter(|d| *d > BigInt::one()).collect(),
    })
}

pub(crate) trait ToBig {
    fn to_big(&self) -> BigInt;
}

impl ToBig for i64 {
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl ToBig for BigInt {
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

fn leftover_dense<R: Coeffs>(e: &Eliminator<'_, R>, rows: &[u32], cols: &[u32]) -> IntMatrix
where
    R::E: ToBig,
{
    let mut dense = IntMatrix::zeros(rows.len(), cols.len());
    for (j, &c) in cols.iter().enumerate() {
        for (i, x) in e.col(c) {
            let ri = rows.binary_search(i).expect("active row");
            dense[(ri, j)] = x.to_big();
        }
    }
    dense
}

/// Saturated kernel basis of an integer matrix. `None` if some basis
/// coefficient does not fit in an `i64`.
pub fn int_kernel(m: &SparseMatrix) -> Option<Vec<SparseCol>> {
    match kernel_with(&Int64, m) {
        Some(k) => k,
        None => kernel_with(&BigZ, m).expect("big integers do not overflow"),
    }
}

fn kernel_with<R: Coeffs>(ring: &R, m: &SparseMatrix) -> Option<Option<Vec<SparseCol>>>
where
    R::E: ToBig,
{
    let mut e = Eliminator::new(ring, m, true);
    e.run().ok()?;
    let (rows, cols) = e.leftover();
    let mut out = Vec::new();
    let (zero_cols, live): (Vec<u32>, Vec<u32>) = cols.iter().partition(|&&c| e.col(c).is_empty());
    for c in zero_cols {
        let v: Option<SparseCol> = e.v_col(c).iter().map(|(i, x)| Some((*i, x.to_big().to_i64()?))).collect();
        match v {
            Some(v) => out.push(v),
            None => return Some(None),
        }
    }
    if !live.is_empty() {
        let dense = leftover_dense(&e, &rows, &live);
        let snf = smith_normal_form(&dense);
        for j in snf.rank()..live.len() {
            let mut acc: std::collections::BTreeMap<u32, BigInt> = Default::default();
            for (t, &c) in live.iter().enumerate() {
                let k = &snf.right[(t, j)];
                if k.is_zero() {
                    continue;
                }
                for (i, x) in e.v_col(c) {
                    *acc.entry(*i).or_default() += k * x.to_big();
                }
            }
            let v: Option<SparseCol> = acc
                .into_iter()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| Some((i, x.to_i64()?)))
                .collect();
            match v {
                Some(v) => out.push(v),
                None => return Some(None),
            }
        }
    }
    Some(Some(out))
}

/// Rank of an integer matrix reduced mod `p`.
pub fn modp_rank(p: u64, m: &SparseMatrix) -> usize {
    let ring = ModP(p);
    let mut e = Eliminator::new(&ring, m, false);
    e.run().expect("no overflow mod p");
    e.pivots
}

/// Kernel basis mod `p`, with entries in `0..p`.
pub fn modp_kernel(p: u64, m: &SparseMatrix) -> Vec<SparseCol> {
    let ring = ModP(p);
    let mut e = Eliminator::new(&ring, m, true);
    e.run().expect("no overflow mod p");
    let (_, cols) = e.leftover();
    cols.iter()
        .map(|&c| {
            debug_assert!(e.col(c).is_empty());
            e.v_col(c).iter().map(|&(i, x)| (i, x as i64)).collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::snf::smith_normal_form;

    fn sparse(rows: &[Vec<i64>], ncols: usize) -> SparseMatrix {
        let cols = (0..ncols)
            .map(|j| {
                rows.iter()
                    .enumerate()
                    .filter(|(_, r)| r[j] != 0)
                    .map(|(i, r)| (i as u32, r[j]))
                    .collect()
            })
            .collect();
        SparseMatrix::new(rows.len(), cols)
    }

    #[test]
    fn matches_dense_snf() {
        let rows = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        let m = sparse(&rows, 3);
        let inv = int_invariants(&m);
        let snf = smith_normal_form(&m.to_dense());
        assert_eq!(inv.rank, snf.rank());
        assert_eq!(inv.torsion, snf.torsion());
        assert_eq!(inv.torsion, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
    }

    #[test]
    fn kernel_of_boundary() {
        // Boundary of a triangle: three edges into three vertices.
        let rows = vec![vec![-1, -1, 0], vec![1, 0, -1], vec![0, 1, 1]];
        let m = sparse(&rows, 3);
        let k = int_kernel(&m).unwrap();
        assert_eq!(k.len(), 1);
        assert_eq!(m.apply(&k[0]).unwrap(), vec![]);
        assert!(k[0].iter().all(|&(_, x)| x.abs() == 1));
    }

    #[test]
    fn saturated_kernel_through_dense_leftover() {
        let m = sparse(&[vec![2, 4, 6]], 3);
        let k = int_kernel(&m).unwrap();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.apply(v).unwrap().is_empty());
        }
        let k = int_kernel(&sparse(&[vec![2]], 1)).unwrap();
        assert!(k.is_empty());
    }

    #[test]
    fn mod_p() {
        let m = sparse(&[vec![2, 0], vec![0, 3]], 2);
        assert_eq!(modp_rank(2, &m), 1);
        assert_eq!(modp_rank(3, &m), 1);
        assert_eq!(modp_rank(5, &m), 2);
        let k = modp_kernel(2, &m);
        assert_eq!(k, vec![vec![(0, 1)]]);
    }

    #[test]
    fn overflow_falls_back_to_big_integers() {
        let big = i64::MAX / 2;
        let rows = vec![vec![1, big, 0], vec![1, -big, big], vec![0, big, big]];
        let m = sparse(&rows, 3);
        let snf = smith_normal_form(&m.to_dense());
        let inv = int_invariants(&m);
        assert_eq!(inv.rank, snf.rank());
        assert_eq!(inv.torsion, snf.torsion());
    }
}
