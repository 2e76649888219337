//! Dense linear algebra over F_p and Q.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub trait Field: Clone + Debug {
    type E: Clone + PartialEq + Debug;
    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn from_i64(&self, x: i64) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    fn inv(&self, a: &Self::E) -> Self::E;
    /// Zero for the rationals.
    fn characteristic(&self) -> u64;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField(u64);

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) && p < (1 << 32) {
            Ok(PrimeField(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn modulus(&self) -> u64 {
        self.0
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Field for PrimeField {
    type E = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.0 as i64) as u64
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.0
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.0 - b) % self.0
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.0
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.0 - a) % self.0
    }
    fn inv(&self, a: &u64) -> u64 {
        super::sparse::ModP(self.0).inv(*a)
    }
    fn characteristic(&self) -> u64 {
        self.0
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type E = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, x: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(x))
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        a.recip()
    }
    fn characteristic(&self) -> u64 {
        0
    }
}

/// Dense matrix over a field, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<F: Field> {
    pub field: F,
    rows: usize,
    cols: usize,
    data: Vec<F::E>,
}

impl<F: Field> Mat<F> {
    pub fn zeros(field: &F, rows: usize, cols: usize) -> Self {
        Mat {
            field: field.clone(),
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &F, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    /// Builds from column vectors of length `rows`.
    pub fn from_cols(field: &F, rows: usize, cols: &[Vec<F::E>]) -> Self {
        let mut m = Self::zeros(field, rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    /// Builds from sparse integer columns.
    pub fn from_sparse(field: &F, rows: usize, cols: &[Vec<(u32, i64)>]) -> Self {
        let mut m = Self::zeros(field, rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for &(i, x) in c {
                m.set(i as usize, j, field.from_i64(x));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F::E {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: F::E) {
        self.data[i * self.cols + j] = x;
    }

    pub fn column(&self, j: usize) -> Vec<F::E> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| self.field.is_zero(x))
    }

    pub fn mul(&self, other: &Mat<F>) -> Result<Mat<F>> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Mat::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !f.is_zero(b) {
                        let v = f.add(out.get(i, j), &f.mul(a, b));
                        out.set(i, j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Columns of `self` followed by columns of `other`.
    pub fn hstack(&self, other: &Mat<F>) -> Mat<F> {
        assert_eq!(self.rows, other.rows);
        let mut out = Mat::zeros(&self.field, self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    /// Selects the given columns.
    pub fn select_cols(&self, cols: &[usize]) -> Mat<F> {
        let mut out = Mat::zeros(&self.field, self.rows, cols.len());
        for i in 0..self.rows {
            for (t, &j) in cols.iter().enumerate() {
                out.set(i, t, self.get(i, j).clone());
            }
        }
        out
    }

    /// Selects the given rows.
    pub fn select_rows(&self, rows: &[usize]) -> Mat<F> {
        let mut out = Mat::zeros(&self.field, rows.len(), self.cols);
        for (t, &i) in rows.iter().enumerate() {
            for j in 0..self.cols {
                out.set(t, j, self.get(i, j).clone());
            }
        }
        out
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Mat<F>, Vec<usize>) {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !f.is_zero(m.get(i, c))) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = f.inv(m.get(r, c));
            for j in c..m.cols {
                let v = f.mul(m.get(r, j), &inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let k = m.get(i, c).clone();
                if f.is_zero(&k) {
                    continue;
                }
                for j in c..m.cols {
                    let v = f.sub(m.get(i, j), &f.mul(&k, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space, one column per free variable.
    pub fn kernel(&self) -> Mat<F> {
        let f = &self.field;
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Mat::zeros(f, self.cols, free.len());
        for (t, &fc) in free.iter().enumerate() {
            out.set(fc, t, f.one());
            for (row, &pc) in pivots.iter().enumerate() {
                out.set(pc, t, f.neg(r.get(row, fc)));
            }
        }
        out
    }

    /// Some solution `x` of `self · x = b` for each column `b`, if all exist.
    pub fn solve(&self, b: &Mat<F>) -> Option<Mat<F>> {
        assert_eq!(self.rows, b.rows);
        let f = &self.field;
        let aug = self.hstack(b);
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = Mat::zeros(f, self.cols, b.cols);
        for (row, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.set(pc, j, r.get(row, self.cols + j).clone());
            }
        }
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        assert!(PrimeField::new(2).is_ok());
        assert_eq!(PrimeField::new(4), Err(Error::NotPrime(4)));
        assert_eq!(PrimeField::new(1), Err(Error::NotPrime(1)));
    }

    #[test]
    fn rank_depends_on_field() {
        let cols = vec![vec![(0, 2)], vec![(1, 3)]];
        let f2 = PrimeField::new(2).unwrap();
        assert_eq!(Mat::from_sparse(&f2, 2, &cols).rank(), 1);
        assert_eq!(Mat::from_sparse(&Rationals, 2, &cols).rank(), 2);
    }

    #[test]
    fn kernel_and_solve() {
        let q = Rationals;
        let a = Mat::from_sparse(&q, 2, &[vec![(0, 1), (1, 2)], vec![(0, 2), (1, 4)], vec![(1, 1)]]);
        let k = a.kernel();
        assert_eq!(k.cols(), 1);
        assert!(a.mul(&k).unwrap().is_zero());
        let b = Mat::from_sparse(&q, 2, &[vec![(0, 3), (1, 7)]]);
        let x = a.solve(&b).unwrap();
        assert_eq!(a.mul(&x).unwrap(), b);
        let a = Mat::from_sparse(&q, 2, &[vec![(0, 1), (1, 1)]]);
        let b = Mat::from_sparse(&q, 2, &[vec![(0, 1)]]);
        assert!(a.solve(&b).is_none());
    }
}
