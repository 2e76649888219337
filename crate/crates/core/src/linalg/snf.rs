use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Dense integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds from rows of machine integers. All rows must have length `cols`.
    pub fn from_rows(rows: &[Vec<i64>], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix");
            for (j, &x) in r.iter().enumerate() {
                m[(i, j)] = BigInt::from(x);
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

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * a[(n - 1, n - 1)].clone()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row[dst] += f * row[src]`
    fn add_row(&mut self, dst: usize, src: usize, f: &BigInt) {
        for j in 0..self.cols {
            let v = &self[(src, j)] * f;
            if !v.is_zero() {
                self[(dst, j)] += v;
            }
        }
    }

    /// `col[dst] += f * col[src]`
    fn add_col(&mut self, dst: usize, src: usize, f: &BigInt) {
        for i in 0..self.rows {
            let v = &self[(i, src)] * f;
            if !v.is_zero() {
                self[(i, dst)] += v;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -std::mem::take(&mut self[(i, j)]);
            self[(i, j)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

/// `U · A · V = D` with `D` diagonal, nonnegative and `d_1 | d_2 | ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    /// `min(rows, cols)` entries; zeros trail the nonzero ones.
    pub diagonal: Vec<BigInt>,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

impl SnfResult {
    pub fn rank(&self) -> usize {
        self.diagonal.iter().filter(|d| !d.is_zero()).count()
    }

    /// Diagonal entries greater than one.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.diagonal
            .iter()
            .filter(|d| **d > BigInt::one())
            .cloned()
            .collect()
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SnfResult {
    snf(a, true)
}

/// Invariant factors only, skipping the transforms.
pub fn invariant_factors(a: &IntMatrix) -> Vec<BigInt> {
    snf(a, false).diagonal
}

fn snf(a: &IntMatrix, transforms: bool) -> SnfResult {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let (mut u, mut v) = if transforms {
        (IntMatrix::identity(m), IntMatrix::identity(n))
    } else {
        (IntMatrix::zeros(0, 0), IntMatrix::zeros(0, 0))
    };
    let steps = m.min(n);
    for t in 0..steps {
        loop {
            // Smallest nonzero entry of the trailing block.
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let x = &d[(i, j)];
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < d[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(d, u, v, steps);
            };
            d.swap_rows(t, pi);
            d.swap_cols(t, pj);
            if transforms {
                u.swap_rows(t, pi);
                v.swap_cols(t, pj);
            }
            let p = d[(t, t)].clone();
            let mut dirty = false;
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = -d[(i, t)].div_floor(&p);
                d.add_row(i, t, &q);
                if transforms {
                    u.add_row(i, t, &q);
                }
                dirty |= !d[(i, t)].is_zero();
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = -d[(t, j)].div_floor(&p);
                d.add_col(j, t, &q);
                if transforms {
                    v.add_col(j, t, &q);
                }
                dirty |= !d[(t, j)].is_zero();
            }
            if dirty {
                continue;
            }
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d[(i, j)].is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    let one = BigInt::one();
                    d.add_row(t, i, &one);
                    if transforms {
                        u.add_row(t, i, &one);
                    }
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            if transforms {
                u.negate_row(t);
            }
        }
    }
    finish(d, u, v, steps)
}

fn finish(d: IntMatrix, u: IntMatrix, v: IntMatrix, steps: usize) -> SnfResult {
    SnfResult {
        diagonal: (0..steps).map(|i| d[(i, i)].clone()).collect(),
        left: u,
        right: v,
    }
}

/// Basis of the kernel of `a` as a saturated sublattice of `Z^cols`.
pub fn integer_kernel_basis(a: &IntMatrix) -> Vec<Vec<BigInt>> {
    let r = smith_normal_form(a);
    let rank = r.rank();
    (rank..a.cols).map(|j| r.right.column(j)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(a: &IntMatrix, r: &SnfResult) -> IntMatrix {
        let mut d = IntMatrix::zeros(a.rows(), a.cols());
        for (i, x) in r.diagonal.iter().enumerate() {
            d[(i, i)] = x.clone();
        }
        d
    }

    #[test]
    fn identity_and_zero() {
        let i = IntMatrix::identity(2);
        let r = smith_normal_form(&i);
        assert_eq!(r.diagonal, vec![BigInt::one(), BigInt::one()]);
        assert_eq!(r.left, IntMatrix::identity(2));
        assert_eq!(r.right, IntMatrix::identity(2));
        let z = IntMatrix::zeros(2, 3);
        assert!(smith_normal_form(&z).diagonal.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn hand_example() {
        let a = IntMatrix::from_rows(&[vec![2, 4], vec![-2, -4]], 2);
        let r = smith_normal_form(&a);
        assert_eq!(r.diagonal, vec![BigInt::from(2), BigInt::zero()]);
        assert_eq!(r.left.mul(&a).mul(&r.right), diag(&a, &r));
    }

    #[test]
    fn divisibility_is_restored() {
        let a = IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]], 2);
        let r = smith_normal_form(&a);
        assert_eq!(r.diagonal, vec![BigInt::from(1), BigInt::from(6)]);
        assert_eq!(r.left.mul(&a).mul(&r.right), diag(&a, &r));
        assert_eq!(r.left.determinant().abs(), BigInt::one());
        assert_eq!(r.right.determinant().abs(), BigInt::one());
    }

    #[test]
    fn kernels() {
        let k = integer_kernel_basis(&IntMatrix::from_rows(&[vec![1, 1]], 2));
        assert_eq!(k.len(), 1);
        assert_eq!(&k[0][0] + &k[0][1], BigInt::zero());
        assert_eq!(k[0][0].abs(), BigInt::one());
        assert!(integer_kernel_basis(&IntMatrix::from_rows(&[vec![2]], 1)).is_empty());
        let a = IntMatrix::from_rows(&[vec![1, 2, 3], vec![0, 0, 0]], 3);
        let k = integer_kernel_basis(&a);
        assert_eq!(k.len(), 2);
        for v in &k {
            let s = &v[0] + BigInt::from(2) * &v[1] + BigInt::from(3) * &v[2];
            assert!(s.is_zero());
        }
    }

    #[test]
    fn determinant_small() {
        let a = IntMatrix::from_rows(&[vec![0, 2, 1], vec![1, 0, 0], vec![3, 1, 1]], 3);
        assert_eq!(a.determinant(), BigInt::from(-1));
    }
}
