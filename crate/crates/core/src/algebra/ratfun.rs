use std::fmt;

use super::{Derivation, Field, Poly, Ring};

/// Reduced quotient `num/den` of polynomials over a field. `den` is monic and
/// coprime to `num`; zero is stored as `0/1`.
#[derive(Clone, PartialEq)]
pub struct RatFun<R> {
    num: Poly<R>,
    den: Poly<R>,
}

impl<R: Field> RatFun<R> {
    /// Builds and normalizes `num/den`; `None` if `den` is zero.
    pub fn new(num: Poly<R>, den: Poly<R>) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        if num.is_zero() {
            return Some(Self::zero());
        }
        let g = Poly::gcd(&num, &den);
        let (mut n, mut d) = if g.is_one() {
            (num, den)
        } else {
            (
                num.exact_div(&g).expect("gcd divides"),
                den.exact_div(&g).expect("gcd divides"),
            )
        };
        let l = d.lead().expect("nonzero").clone();
        if !l.is_one() {
            let li = l.inv().expect("nonzero lead");
            n = n.scale(&li);
            d = d.scale(&li);
        }
        Some(RatFun { num: n, den: d })
    }

    pub fn from_poly(p: Poly<R>) -> Self {
        RatFun {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn constant(c: R) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    /// The variable itself.
    pub fn var() -> Self {
        Self::from_poly(Poly::x())
    }

    pub fn num(&self) -> &Poly<R> {
        &self.num
    }

    pub fn den(&self) -> &Poly<R> {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// Value at a point; `None` at a pole.
    pub fn eval(&self, x: &R) -> Option<R> {
        self.num.eval(x).div(&self.den.eval(x))
    }

    /// `f(x) -> f(x^k)`. Reducedness is preserved (roots of the images are
    /// `k`-th roots of the original, distinct for coprime inputs).
    pub fn substitute_power(&self, k: usize) -> Self {
        RatFun {
            num: self.num.substitute_power(k),
            den: self.den.substitute_power(k),
        }
    }

    /// `f(x) -> f(c x)`.
    pub fn scale_var(&self, c: &R) -> Self {
        Self::new(self.num.scale_var(c), self.den.scale_var(c)).expect("c nonzero")
    }

    /// Applies a field homomorphism to the coefficients; `None` if the image
    /// denominator vanishes.
    pub fn map_coeffs<S: Field>(&self, f: impl Fn(&R) -> S) -> Option<RatFun<S>> {
        RatFun::new(self.num.map(&f), self.den.map(&f))
    }

    pub fn fmt_var(&self, var: &str) -> String
    where
        R: fmt::Display,
    {
        if self.den.is_one() {
            self.num.fmt_var(var)
        } else {
            format!("({})/({})", self.num.fmt_var(var), self.den.fmt_var(var))
        }
    }

    fn exact(p: &Poly<R>, d: &Poly<R>) -> Poly<R> {
        if d.is_one() {
            p.clone()
        } else {
            p.exact_div(d).expect("exact division")
        }
    }
}

impl<R: Field> Ring for RatFun<R> {
    fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }
    fn one() -> Self {
        Self::from_poly(Poly::one())
    }
    fn from_int(n: i64) -> Self {
        Self::constant(R::from_int(n))
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let g = Poly::gcd(&self.den, &rhs.den);
        if g.is_one() {
            let num = self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den));
            return RatFun {
                num,
                den: self.den.mul(&rhs.den),
            };
        }
        let b1 = Self::exact(&self.den, &g);
        let d1 = Self::exact(&rhs.den, &g);
        let t = self.num.mul(&d1).add(&rhs.num.mul(&b1));
        if t.is_zero() {
            return Self::zero();
        }
        let g2 = Poly::gcd(&t, &g);
        RatFun {
            num: Self::exact(&t, &g2),
            den: b1.mul(&Self::exact(&rhs.den, &g2)),
        }
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }
    fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let g1 = Poly::gcd(&self.num, &rhs.den);
        let g2 = Poly::gcd(&rhs.num, &self.den);
        RatFun {
            num: Self::exact(&self.num, &g1).mul(&Self::exact(&rhs.num, &g2)),
            den: Self::exact(&self.den, &g2).mul(&Self::exact(&rhs.den, &g1)),
        }
    }
    fn neg(&self) -> Self {
        RatFun {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl<R: Field> Field for RatFun<R> {
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Self::new(self.den.clone(), self.num.clone())
    }
}

impl<R: Field> Derivation for RatFun<R> {
    fn derive(&self) -> Self {
        let n = self
            .num
            .derivative()
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative()));
        Self::new(n, self.den.mul(&self.den)).expect("nonzero denominator")
    }
}

impl<R: Field> fmt::Debug for RatFun<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?})/({:?})", self.num, self.den)
    }
}
