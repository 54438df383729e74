use std::fmt;

use super::{Derivation, Field, Ring};

/// Dense univariate polynomial; `coeffs[i]` multiplies `x^i`. The highest
/// stored coefficient is nonzero, the zero polynomial is the empty vector.
#[derive(Clone, PartialEq)]
pub struct Poly<R> {
    coeffs: Vec<R>,
}

impl<R: Ring> Poly<R> {
    pub fn from_coeffs(mut coeffs: Vec<R>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: R) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The variable `x`.
    pub fn x() -> Self {
        Self::monomial(R::one(), 1)
    }

    pub fn monomial(c: R, k: usize) -> Self {
        let mut v = vec![R::zero(); k + 1];
        v[k] = c;
        Self::from_coeffs(v)
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<R> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> R {
        self.coeffs.get(i).cloned().unwrap_or_else(R::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&R> {
        self.coeffs.last()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn eval(&self, x: &R) -> R {
        self.coeffs
            .iter()
            .rev()
            .fold(R::zero(), |acc, c| acc.mul(x).add(c))
    }

    pub fn scale(&self, c: &R) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    /// Derivative with respect to the polynomial's own variable.
    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.scale_int(i as i64))
                .collect(),
        )
    }

    /// `p(x) -> p(x^k)`.
    pub fn substitute_power(&self, k: usize) -> Self {
        assert!(k >= 1, "substitute_power needs k >= 1");
        if self.coeffs.is_empty() {
            return self.clone();
        }
        let mut v = vec![R::zero(); (self.coeffs.len() - 1) * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[i * k] = c.clone();
        }
        Self::from_coeffs(v)
    }

    /// `p(x) -> p(c x)`.
    pub fn scale_var(&self, c: &R) -> Self {
        let mut pw = R::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(a.mul(&pw));
            pw = pw.mul(c);
        }
        Self::from_coeffs(out)
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Poly<S> {
        Poly::from_coeffs(self.coeffs.iter().map(f).collect())
    }

    pub fn try_map<S: Ring>(&self, f: impl Fn(&R) -> Option<S>) -> Option<Poly<S>> {
        let v: Option<Vec<S>> = self.coeffs.iter().map(f).collect();
        v.map(Poly::from_coeffs)
    }

    /// Composition `self(other(x))`.
    pub fn compose(&self, other: &Self) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, c| acc.mul(other).add(&Self::constant(c.clone())))
    }

    pub fn fmt_var(&self, var: &str) -> String
    where
        R: fmt::Display,
    {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let cs = format!("{c}");
            let t = match i {
                0 => cs,
                _ => {
                    let mono = if i == 1 {
                        var.to_string()
                    } else {
                        format!("{var}^{i}")
                    };
                    if c.is_one() {
                        mono
                    } else {
                        format!("({cs})*{mono}")
                    }
                }
            };
            terms.push(t);
        }
        terms.join(" + ")
    }
}

impl<R: Field> Poly<R> {
    /// Euclidean division; `None` when dividing by zero.
    pub fn div_rem(&self, d: &Self) -> Option<(Self, Self)> {
        let dd = d.degree()?;
        let lead_inv = d.lead()?.inv()?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Some((Self::zero(), self.clone()));
        }
        let mut quot = vec![R::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = rem[i + dd].mul(&lead_inv);
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[i + j] = rem[i + j].sub(&c.mul(dc));
                }
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        Some((Self::from_coeffs(quot), Self::from_coeffs(rem)))
    }

    pub fn rem(&self, d: &Self) -> Option<Self> {
        self.div_rem(d).map(|(_, r)| r)
    }

    /// Exact quotient; `None` if `d` does not divide `self`.
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(d)?;
        r.is_zero().then_some(q)
    }

    pub fn monic(&self) -> Self {
        match self.lead() {
            None => self.clone(),
            Some(l) if l.is_one() => self.clone(),
            Some(l) => self.scale(&l.inv().expect("nonzero leading coefficient")),
        }
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(a: &Self, b: &Self) -> Self {
        let mut x = a.monic();
        let mut y = b.monic();
        while !y.is_zero() {
            let r = x.rem(&y).expect("nonzero divisor");
            x = y;
            y = r.monic();
        }
        x
    }

    /// Extended Euclid: returns `(g, s, t)` with `s*a + t*b = g`, `g` monic.
    pub fn ext_gcd(a: &Self, b: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1).expect("nonzero divisor");
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        match r0.lead().cloned() {
            None => (r0, s0, t0),
            Some(l) => {
                let li = l.inv().expect("nonzero lead");
                (r0.scale(&li), s0.scale(&li), t0.scale(&li))
            }
        }
    }
}

impl<R: Ring> Ring for Poly<R> {
    fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }
    fn one() -> Self {
        Self::constant(R::one())
    }
    fn from_int(n: i64) -> Self {
        Self::constant(R::from_int(n))
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::from_coeffs((0..n).map(|i| self.coeff(i).add(&rhs.coeff(i))).collect())
    }
    fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::from_coeffs((0..n).map(|i| self.coeff(i).sub(&rhs.coeff(i))).collect())
    }
    fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut v = vec![R::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                v[i + j] = v[i + j].add(&a.mul(b));
            }
        }
        Self::from_coeffs(v)
    }
    fn neg(&self) -> Self {
        Poly {
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }
}

/// Coefficientwise derivation: a polynomial in an auxiliary variable (the
/// pencil parameter `s`) whose coefficients carry the derivation `d/dz`.
impl<R: Derivation> Derivation for Poly<R> {
    fn derive(&self) -> Self {
        self.map(|c| c.derive())
    }
}

impl<R: Ring> fmt::Debug for Poly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{rat, BigRat};
    use super::*;

    fn p(c: &[i64]) -> Poly<BigRat> {
        Poly::from_coeffs(c.iter().map(|&x| rat(x, 1)).collect())
    }

    #[test]
    fn gcd_examples() {
        // gcd(q^2-1, q-1) = q-1
        assert_eq!(Poly::gcd(&p(&[-1, 0, 1]), &p(&[-1, 1])), p(&[-1, 1]));
        // distinct cyclotomics
        assert_eq!(Poly::gcd(&p(&[1, 1]), &p(&[1, 1, 1])), p(&[1]));
        // gcd(q^4-1, q^6-1) = q^2-1
        assert_eq!(
            Poly::gcd(&p(&[-1, 0, 0, 0, 1]), &p(&[-1, 0, 0, 0, 0, 0, 1])),
            p(&[-1, 0, 1])
        );
        assert!(Poly::<BigRat>::gcd(&Poly::zero(), &Poly::zero()).is_zero());
    }

    #[test]
    fn division_roundtrip() {
        let a = p(&[3, -2, 0, 5, 1]);
        let d = p(&[1, 2, 3]);
        let (q, r) = a.div_rem(&d).unwrap();
        assert_eq!(q.mul(&d).add(&r), a);
        assert!(r.degree().unwrap_or(0) < 2);
    }

    #[test]
    fn ext_gcd_bezout() {
        let a = p(&[2, 0, 1, 1]);
        let b = p(&[-1, 3, 1]);
        let (g, s, t) = Poly::ext_gcd(&a, &b);
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
    }

    #[test]
    fn power_substitution_and_derivative() {
        assert_eq!(p(&[1, 1]).substitute_power(3), p(&[1, 0, 0, 1]));
        assert_eq!(p(&[5, 3, 2]).derivative(), p(&[3, 4]));
        assert_eq!(p(&[1, 2]).compose(&p(&[0, 0, 1])), p(&[1, 0, 2]));
    }
}
