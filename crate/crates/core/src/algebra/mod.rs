//! Exact arithmetic towers.
//!
//! Everything here is built on two small traits, [`Ring`] and [`Field`], which
//! are implemented for big rationals, prime fields, cyclotomic numbers,
//! polynomials, rational functions, dual numbers and `Complex64`. Generic code
//! elsewhere in the crate (series, matrices, difference operators) is written
//! against these traits only.

mod complex;
mod cyclo;
mod dual;
mod fp;
mod matrix;
mod piadic;
mod poly;
mod rational;
mod ratfun;

use std::fmt;

pub use cyclo::{cyclotomic_poly, is_prime, Cyclo};
pub use dual::Dual;
pub use fp::Fp;
pub use matrix::Mat;
pub use piadic::PiAdicMat;
pub use poly::Poly;
pub use rational::{padic_valuation, rat, BigRat};
pub use ratfun::RatFun;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// A commutative ring with identity (matrices implement the same operations
/// inherently but are not commutative, so they do not implement this trait).
pub trait Ring: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
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

    fn scale_int(&self, n: i64) -> Self {
        self.mul(&Self::from_int(n))
    }
}

pub trait Field: Ring {
    /// Multiplicative inverse; `None` for zero (or any non-unit the
    /// representation can detect).
    fn inv(&self) -> Option<Self>;

    fn div(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|r| self.mul(&r))
    }

    /// Signed integer power; negative exponents go through [`Field::inv`].
    fn powi(&self, e: i64) -> Option<Self> {
        if e >= 0 {
            Some(self.pow(e as u64))
        } else {
            self.inv().map(|r| r.pow(e.unsigned_abs()))
        }
    }
}

/// A ring equipped with a derivation `d/dz` (constants are killed).
pub trait Derivation: Ring {
    fn derive(&self) -> Self;
}

/// Binomial coefficient as a ring element, built by Pascal's rule so that it
/// is valid in any characteristic.
pub fn binomial<R: Ring>(n: usize, k: usize) -> R {
    if k > n {
        return R::zero();
    }
    let mut row = vec![R::one()];
    for i in 1..=n {
        let mut next = Vec::with_capacity(i + 1);
        next.push(R::one());
        for j in 1..i {
            next.push(row[j - 1].add(&row[j]));
        }
        next.push(R::one());
        row = next;
    }
    row.swap_remove(k)
}
