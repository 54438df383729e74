use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Field, Ring};

/// Arbitrary-precision rational, always stored reduced with a positive
/// denominator.
pub type BigRat = BigRational;

/// Shorthand constructor `num/den`.
pub fn rat(num: i64, den: i64) -> BigRat {
    BigRat::new(BigInt::from(num), BigInt::from(den))
}

impl Ring for BigRat {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_int(n: i64) -> Self {
        BigRat::from_integer(BigInt::from(n))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
}

impl Field for BigRat {
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}

fn int_valuation(n: &BigInt, p: &BigInt) -> i64 {
    let mut v = 0;
    let mut m = n.abs();
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// Exponent of the prime `p` in `r`. Returns `None` for `r = 0`
/// (infinite valuation).
pub fn padic_valuation(r: &BigRat, p: u64) -> Option<i64> {
    if Zero::is_zero(r) {
        return None;
    }
    let pb = BigInt::from(p);
    Some(int_valuation(r.numer(), &pb) - int_valuation(r.denom(), &pb))
}

/// Image of a `p`-integral rational in `Z/pZ`, or `None` when `p` divides the
/// reduced denominator.
pub(crate) fn reduce_mod_p(r: &BigRat, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let den = r.denom().mod_floor(&pb);
    if den.is_zero() {
        return None;
    }
    let num = r.numer().mod_floor(&pb).to_u64()?;
    let den = den.to_u64()?;
    let inv = modpow(den, p - 2, p);
    Some((num as u128 * inv as u128 % p as u128) as u64)
}

pub(crate) fn modpow(b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc: u128 = 1 % m as u128;
    let mut base = (b % m) as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m as u128;
        }
        base = base * base % m as u128;
        e >>= 1;
    }
    acc as u64
}

pub(crate) fn to_f64(r: &BigRat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuations() {
        assert_eq!(padic_valuation(&rat(18, 1), 3), Some(2));
        assert_eq!(padic_valuation(&rat(3, 8), 2), Some(-3));
        assert_eq!(padic_valuation(&rat(1, 1), 7), Some(0));
        assert_eq!(padic_valuation(&rat(0, 1), 5), None);
        assert_eq!(padic_valuation(&rat(-50, 7), 5), Some(2));
    }

    #[test]
    fn reduction() {
        assert_eq!(reduce_mod_p(&rat(1, 2), 3), Some(2));
        assert_eq!(reduce_mod_p(&rat(-1, 1), 5), Some(4));
        assert_eq!(reduce_mod_p(&rat(1, 3), 3), None);
    }
}
