use std::fmt;

use super::{Derivation, Field, Poly, Ring};

/// Dense row-major matrix over a commutative ring.
#[derive(Clone, PartialEq)]
pub struct Mat<R> {
    rows: usize,
    cols: usize,
    data: Vec<R>,
}

impl<R: Ring> Mat<R> {
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> R) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<R>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| R::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { R::one() } else { R::zero() })
    }

    pub fn scalar(n: usize, c: &R) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { c.clone() } else { R::zero() })
    }

    pub fn diag(d: &[R]) -> Self {
        Self::from_fn(d.len(), d.len(), |i, j| {
            if i == j {
                d[i].clone()
            } else {
                R::zero()
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: R) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[R] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(self.rows)
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Mat<S> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map<S: Ring, E>(&self, f: impl Fn(&R) -> Result<S, E>) -> Result<Mat<S>, E> {
        Ok(Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<Result<_, _>>()?,
        })
    }

    fn zip(&self, rhs: &Self, f: impl Fn(&R, &R) -> R) -> Self {
        assert!(
            self.rows == rhs.rows && self.cols == rhs.cols,
            "matrix shape mismatch"
        );
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.zip(rhs, |a, b| a.add(b))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.zip(rhs, |a, b| a.sub(b))
    }

    pub fn neg(&self) -> Self {
        self.map(|a| a.neg())
    }

    pub fn scale(&self, c: &R) -> Self {
        self.map(|a| a.mul(c))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        Self::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = R::zero();
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                acc = acc.add(&a.mul(rhs.get(k, j)));
            }
            acc
        })
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn trace(&self) -> R {
        (0..self.rows.min(self.cols)).fold(R::zero(), |acc, i| acc.add(self.get(i, i)))
    }

    /// Division-free determinant by cofactor expansion (intended for the
    /// small sizes used here, N ≤ 4).
    pub fn det(&self) -> R {
        assert!(self.is_square(), "determinant of non-square matrix");
        let idx: Vec<usize> = (0..self.rows).collect();
        self.det_minor(0, &idx)
    }

    fn det_minor(&self, row: usize, cols: &[usize]) -> R {
        match cols.len() {
            0 => R::one(),
            1 => self.get(row, cols[0]).clone(),
            2 => self
                .get(row, cols[0])
                .mul(self.get(row + 1, cols[1]))
                .sub(&self.get(row, cols[1]).mul(self.get(row + 1, cols[0]))),
            _ => {
                let mut acc = R::zero();
                for (k, &c) in cols.iter().enumerate() {
                    let a = self.get(row, c);
                    if a.is_zero() {
                        continue;
                    }
                    let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                    let term = a.mul(&self.det_minor(row + 1, &rest));
                    acc = if k % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
                }
                acc
            }
        }
    }

    /// `det(T·I - self)` as a polynomial in `T`.
    pub fn charpoly(&self) -> Poly<R> {
        let t = Poly::<R>::x();
        let m = Mat::<Poly<R>>::from_fn(self.rows, self.cols, |i, j| {
            let e = Poly::constant(self.get(i, j).clone()).neg();
            if i == j {
                e.add(&t)
            } else {
                e
            }
        });
        m.det()
    }

    pub fn fmt_with(&self, f: impl Fn(&R) -> String) -> String {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                let r: Vec<String> = (0..self.cols).map(|j| f(self.get(i, j))).collect();
                format!("[{}]", r.join(", "))
            })
            .collect();
        format!("[{}]", rows.join(", "))
    }
}

impl<R: Field> Mat<R> {
    /// Gauss-Jordan inverse; `None` if singular.
    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square(), "inverse of non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let piv = (col..n).find(|&r| !a.get(r, col).is_zero())?;
            if piv != col {
                a.swap_rows(piv, col);
                inv.swap_rows(piv, col);
            }
            let pinv = a.get(col, col).inv()?;
            a.scale_row(col, &pinv);
            inv.scale_row(col, &pinv);
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.get(r, col).clone();
                if f.is_zero() {
                    continue;
                }
                a.axpy_row(r, col, &f);
                inv.axpy_row(r, col, &f);
            }
        }
        Some(inv)
    }

    /// Solves `self · x = b` for a column vector `b`; `None` if singular.
    pub fn solve(&self, b: &[R]) -> Option<Vec<R>> {
        let n = self.rows;
        assert!(self.is_square() && b.len() == n, "solve shape mismatch");
        let mut a = Self::from_fn(n, n + 1, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else {
                b[i].clone()
            }
        });
        for col in 0..n {
            let piv = (col..n).find(|&r| !a.get(r, col).is_zero())?;
            if piv != col {
                a.swap_rows(piv, col);
            }
            let pinv = a.get(col, col).inv()?;
            a.scale_row(col, &pinv);
            for r in 0..n {
                if r != col {
                    let f = a.get(r, col).clone();
                    if !f.is_zero() {
                        a.axpy_row(r, col, &f);
                    }
                }
            }
        }
        Some((0..n).map(|i| a.get(i, n).clone()).collect())
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn scale_row(&mut self, i: usize, f: &R) {
        for c in 0..self.cols {
            let v = self.get(i, c).mul(f);
            self.set(i, c, v);
        }
    }

    /// row_r -= f · row_src
    fn axpy_row(&mut self, r: usize, src: usize, f: &R) {
        for c in 0..self.cols {
            let s = self.get(src, c);
            if s.is_zero() {
                continue;
            }
            let v = self.get(r, c).sub(&f.mul(s));
            self.set(r, c, v);
        }
    }
}

impl<R: Derivation> Mat<R> {
    pub fn derive(&self) -> Self {
        self.map(|a| a.derive())
    }
}

impl<R: fmt::Debug> fmt::Debug for Mat<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[R]> = self.data.chunks(self.cols.max(1)).collect();
        f.debug_list().entries(rows).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::super::{rat, BigRat};
    use super::*;

    fn m(r: &[&[i64]]) -> Mat<BigRat> {
        Mat::from_rows(r.iter().map(|row| row.iter().map(|&x| rat(x, 1)).collect()).collect())
    }

    #[test]
    fn det_and_inverse() {
        let a = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(a.det(), rat(18, 1));
        assert!(a.mul(&a.inverse().unwrap()).is_identity());
        assert!(m(&[&[1, 2], &[2, 4]]).inverse().is_none());
        let x = a.solve(&[rat(1, 1), rat(2, 1), rat(3, 1)]).unwrap();
        let col = Mat::from_rows(x.into_iter().map(|v| vec![v]).collect());
        assert_eq!(a.mul(&col), m(&[&[1], &[2], &[3]]));
    }

    #[test]
    fn charpoly_cayley_hamilton() {
        let a = m(&[&[1, 2], &[3, 4]]);
        let cp = a.charpoly();
        assert_eq!(cp.coeffs(), &[rat(-2, 1), rat(-5, 1), rat(1, 1)]);
        let ev = a.mul(&a).sub(&a.scale(&rat(5, 1))).sub(&Mat::scalar(2, &rat(2, 1)));
        assert!(ev.is_zero());
    }
}
