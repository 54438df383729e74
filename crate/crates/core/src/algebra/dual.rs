use std::fmt;

use super::{Field, Ring};

/// Dual number `re + eps·ε` with `ε² = 0`; differentiates rational
/// expressions exactly to first order.
#[derive(Clone, PartialEq)]
pub struct Dual<R> {
    pub re: R,
    pub eps: R,
}

impl<R: Ring> Dual<R> {
    pub fn new(re: R, eps: R) -> Self {
        Dual { re, eps }
    }

    pub fn constant(re: R) -> Self {
        Dual { re, eps: R::zero() }
    }
}

impl<R: Field> Ring for Dual<R> {
    fn zero() -> Self {
        Self::constant(R::zero())
    }
    fn one() -> Self {
        Self::constant(R::one())
    }
    fn from_int(n: i64) -> Self {
        Self::constant(R::from_int(n))
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.eps.is_zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        Dual::new(self.re.add(&rhs.re), self.eps.add(&rhs.eps))
    }
    fn sub(&self, rhs: &Self) -> Self {
        Dual::new(self.re.sub(&rhs.re), self.eps.sub(&rhs.eps))
    }
    fn mul(&self, rhs: &Self) -> Self {
        Dual::new(
            self.re.mul(&rhs.re),
            self.re.mul(&rhs.eps).add(&self.eps.mul(&rhs.re)),
        )
    }
    fn neg(&self) -> Self {
        Dual::new(self.re.neg(), self.eps.neg())
    }
}

/// Only elements with invertible real part are units; `inv` returns `None`
/// otherwise even though `Dual` is not a field.
impl<R: Field> Field for Dual<R> {
    fn inv(&self) -> Option<Self> {
        let r = self.re.inv()?;
        let e = self.eps.mul(&r).mul(&r).neg();
        Some(Dual::new(r, e))
    }
}

impl<R: Field> fmt::Debug for Dual<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} + ({:?})ε", self.re, self.eps)
    }
}
