//! Truncated power series in the Kähler variable `z`.
//!
//! A series of order `D` keeps `c_0..c_D`; binary operations require equal
//! orders and never extend them.

use crate::algebra::{Field, Mat, Ring};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("matrix dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("constant term is not invertible")]
    NotInvertible,
    #[error("constant term violates the precondition of {0}")]
    ConstantTerm(&'static str),
    #[error("power substitution needs p >= 1, got {0}")]
    BadPower(i64),
    #[error("1 - q^{0} is not invertible")]
    Resonance(usize),
}

/// Scalar series `c_0 + c_1 z + ... + c_D z^D`.
#[derive(Clone, PartialEq, Debug)]
pub struct TruncSeries<R> {
    coeffs: Vec<R>,
}

impl<R: Ring> TruncSeries<R> {
    /// Order is `coeffs.len() - 1`; panics on an empty vector.
    pub fn new(coeffs: Vec<R>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least c_0");
        TruncSeries { coeffs }
    }

    /// Pads or truncates `coeffs` to order `d`.
    pub fn with_order(mut coeffs: Vec<R>, d: usize) -> Self {
        coeffs.resize(d + 1, R::zero());
        TruncSeries { coeffs }
    }

    pub fn zero(d: usize) -> Self {
        Self::with_order(vec![], d)
    }

    pub fn one(d: usize) -> Self {
        Self::with_order(vec![R::one()], d)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &R {
        &self.coeffs[i]
    }

    pub fn truncate(&self, d: usize) -> Self {
        Self::with_order(self.coeffs.clone(), d)
    }

    fn check(&self, rhs: &Self) -> Result<(), SeriesError> {
        if self.order() != rhs.order() {
            return Err(SeriesError::OrderMismatch(self.order(), rhs.order()));
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, SeriesError> {
        self.check(rhs)?;
        Ok(Self::new(
            self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a.add(b)).collect(),
        ))
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, SeriesError> {
        self.check(rhs)?;
        Ok(Self::new(
            self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a.sub(b)).collect(),
        ))
    }

    pub fn scale(&self, c: &R) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, rhs: &Self) -> Result<Self, SeriesError> {
        self.check(rhs)?;
        let d = self.order();
        let mut out = vec![R::zero(); d + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs[..=d - i].iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Ok(Self::new(out))
    }

    /// `z -> z^p`, truncated at the same order.
    pub fn substitute_power(&self, p: i64) -> Result<Self, SeriesError> {
        if p <= 0 {
            return Err(SeriesError::BadPower(p));
        }
        let p = p as usize;
        let d = self.order();
        let mut out = vec![R::zero(); d + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            if k * p > d {
                break;
            }
            out[k * p] = c.clone();
        }
        Ok(Self::new(out))
    }

    pub fn eval(&self, z: &R) -> R {
        self.coeffs
            .iter()
            .rev()
            .fold(R::zero(), |acc, c| acc.mul(z).add(c))
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> TruncSeries<S> {
        TruncSeries::new(self.coeffs.iter().map(f).collect())
    }
}

impl<R: Field> TruncSeries<R> {
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        let c0inv = self.coeffs[0].inv().ok_or(SeriesError::NotInvertible)?;
        let d = self.order();
        let mut out = vec![c0inv.clone()];
        for k in 1..=d {
            let mut s = R::zero();
            for i in 1..=k {
                s = s.add(&self.coeffs[i].mul(&out[k - i]));
            }
            out.push(s.mul(&c0inv).neg());
        }
        Ok(Self::new(out))
    }

    /// Needs `c_0 = 1` and characteristic zero (or larger than the order).
    pub fn log(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_one() {
            return Err(SeriesError::ConstantTerm("log"));
        }
        let d = self.order();
        let mut b = vec![R::zero(); d + 1];
        for n in 1..=d {
            let mut s = self.coeffs[n].scale_int(n as i64);
            for k in 1..n {
                s = s.sub(&b[k].scale_int(k as i64).mul(&self.coeffs[n - k]));
            }
            b[n] = s.div(&R::from_int(n as i64)).ok_or(SeriesError::NotInvertible)?;
        }
        Ok(Self::new(b))
    }

    /// Needs `c_0 = 0`.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::ConstantTerm("exp"));
        }
        let d = self.order();
        let mut e = vec![R::one()];
        for n in 1..=d {
            let mut s = R::zero();
            for k in 1..=n {
                s = s.add(&self.coeffs[k].scale_int(k as i64).mul(&e[n - k]));
            }
            e.push(s.div(&R::from_int(n as i64)).ok_or(SeriesError::NotInvertible)?);
        }
        Ok(Self::new(e))
    }
}

/// Series for `φ(x·z; q) = Π_{i≥0} (1 - x z q^i)` from the functional
/// equation `φ(z) = (1 - z) φ(qz)`.
pub fn pochhammer_series<R: Field>(q: &R, x_scale: &R, d: usize) -> Result<TruncSeries<R>, SeriesError> {
    let mut c = vec![R::one()];
    let mut qpow = R::one(); // q^{n-1}
    let mut qn = q.clone(); // q^n
    for n in 1..=d {
        let denom = R::one().sub(&qn);
        let step = qpow.neg().mul(x_scale).div(&denom).ok_or(SeriesError::Resonance(n))?;
        c.push(c[n - 1].mul(&step));
        qpow = qpow.mul(q);
        qn = qn.mul(q);
    }
    Ok(TruncSeries::new(c))
}

/// Matrix-valued series with `N×N` coefficients.
#[derive(Clone, PartialEq, Debug)]
pub struct TruncMatSeries<R> {
    dim: usize,
    coeffs: Vec<Mat<R>>,
}

impl<R: Ring> TruncMatSeries<R> {
    pub fn new(coeffs: Vec<Mat<R>>) -> Result<Self, SeriesError> {
        let dim = coeffs.first().ok_or(SeriesError::ConstantTerm("construction"))?.rows();
        for c in &coeffs {
            if c.rows() != dim || c.cols() != dim {
                return Err(SeriesError::DimensionMismatch(dim, c.rows()));
            }
        }
        Ok(TruncMatSeries { dim, coeffs })
    }

    pub fn zero(n: usize, d: usize) -> Self {
        TruncMatSeries {
            dim: n,
            coeffs: vec![Mat::zeros(n, n); d + 1],
        }
    }

    pub fn identity(n: usize, d: usize) -> Self {
        let mut s = Self::zero(n, d);
        s.coeffs[0] = Mat::identity(n);
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Mat<R>] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Mat<R> {
        &self.coeffs[i]
    }

    pub fn truncate(&self, d: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.resize(d + 1, Mat::zeros(self.dim, self.dim));
        TruncMatSeries {
            dim: self.dim,
            coeffs: c,
        }
    }

    fn check(&self, rhs: &Self) -> Result<(), SeriesError> {
        if self.order() != rhs.order() {
            return Err(SeriesError::OrderMismatch(self.order(), rhs.order()));
        }
        if self.dim != rhs.dim {
            return Err(SeriesError::DimensionMismatch(self.dim, rhs.dim));
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, SeriesError> {
        self.check(rhs)?;
        Self::new(self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a.add(b)).collect())
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, SeriesError> {
        self.check(rhs)?;
        Self::new(self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a.sub(b)).collect())
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, SeriesError> {
        self.check(rhs)?;
        let d = self.order();
        let mut out = vec![Mat::zeros(self.dim, self.dim); d + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs[..=d - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = out[i + j].add(&a.mul(b));
                }
            }
        }
        Self::new(out)
    }

    /// Left multiplication by a constant matrix.
    pub fn lmul_const(&self, m: &Mat<R>) -> Self {
        TruncMatSeries {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|c| m.mul(c)).collect(),
        }
    }

    /// Right multiplication by a constant matrix.
    pub fn rmul_const(&self, m: &Mat<R>) -> Self {
        TruncMatSeries {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|c| c.mul(m)).collect(),
        }
    }

    pub fn substitute_power(&self, p: i64) -> Result<Self, SeriesError> {
        if p <= 0 {
            return Err(SeriesError::BadPower(p));
        }
        let p = p as usize;
        let d = self.order();
        let mut out = vec![Mat::zeros(self.dim, self.dim); d + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            if k * p > d {
                break;
            }
            out[k * p] = c.clone();
        }
        Self::new(out)
    }

    pub fn eval(&self, z: &R) -> Mat<R> {
        self.coeffs
            .iter()
            .rev()
            .fold(Mat::zeros(self.dim, self.dim), |acc, c| acc.scale(z).add(c))
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> TruncMatSeries<S> {
        TruncMatSeries {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|c| c.map(&f)).collect(),
        }
    }

    pub fn try_map<S: Ring, E>(&self, f: impl Fn(&R) -> Result<S, E>) -> Result<TruncMatSeries<S>, E> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.try_map(&f))
            .collect::<Result<Vec<_>, E>>()?;
        Ok(TruncMatSeries { dim: self.dim, coeffs })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

impl<R: Field> TruncMatSeries<R> {
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        let c0inv = self.coeffs[0].inverse().ok_or(SeriesError::NotInvertible)?;
        let d = self.order();
        let mut out = vec![c0inv.clone()];
        for k in 1..=d {
            let mut s = Mat::zeros(self.dim, self.dim);
            for i in 1..=k {
                if !self.coeffs[i].is_zero() {
                    s = s.add(&self.coeffs[i].mul(&out[k - i]));
                }
            }
            out.push(c0inv.mul(&s).neg());
        }
        Self::new(out)
    }
}
