use std::fmt;

use super::rational::{modpow, reduce_mod_p};
use super::{BigRat, Field, Ring};

/// Element of the prime field `F_P`, value kept in `[0, P)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp<const P: u64>(u64);

impl<const P: u64> Fp<P> {
    pub fn new(v: i64) -> Self {
        Fp(v.rem_euclid(P as i64) as u64)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    /// Reduction of a `P`-integral rational; `None` if `P` divides the
    /// denominator.
    pub fn from_rational(r: &BigRat) -> Option<Self> {
        reduce_mod_p(r, P).map(Fp)
    }
}

impl<const P: u64> fmt::Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> fmt::Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> Ring for Fp<P> {
    fn zero() -> Self {
        Fp(0)
    }
    fn one() -> Self {
        Fp(1 % P)
    }
    fn from_int(n: i64) -> Self {
        Fp::new(n)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn add(&self, rhs: &Self) -> Self {
        Fp(((self.0 as u128 + rhs.0 as u128) % P as u128) as u64)
    }
    fn sub(&self, rhs: &Self) -> Self {
        Fp(((self.0 as u128 + P as u128 - rhs.0 as u128) % P as u128) as u64)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Fp(((self.0 as u128 * rhs.0 as u128) % P as u128) as u64)
    }
    fn neg(&self) -> Self {
        Fp((P - self.0) % P)
    }
}

impl<const P: u64> Field for Fp<P> {
    fn inv(&self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            Some(Fp(modpow(self.0, P - 2, P)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_fermat() {
        for v in 1..7 {
            let x = Fp::<7>::new(v);
            assert!(x.mul(&x.inv().unwrap()).is_one());
            assert_eq!(x.pow(7), x);
        }
        assert_eq!(Fp::<5>::new(-1).value(), 4);
        assert!(Fp::<3>::zero().inv().is_none());
    }
}
