use std::fmt;

use num_complex::Complex64;

use super::rational::to_f64;
use super::{padic_valuation, AlgebraError, BigRat, Field, Fp, Poly, Ring};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// `1 + q + ... + q^{p-1}`, the minimal polynomial of a primitive `p`-th root
/// of unity.
pub fn cyclotomic_poly(p: u64) -> Result<Poly<BigRat>, AlgebraError> {
    if !is_prime(p) {
        return Err(AlgebraError::NotPrime(p));
    }
    Ok(Poly::from_coeffs(vec![BigRat::one(); p as usize]))
}

/// Element of `Q(ζ_P)` stored as its residue mod `Φ_P` in the power basis
/// `1, ζ, ..., ζ^{P-2}`. `P` must be prime.
#[derive(Clone, PartialEq)]
pub struct Cyclo<const P: u64> {
    rep: Vec<BigRat>,
}

impl<const P: u64> Cyclo<P> {
    const DIM: usize = (P - 1) as usize;

    /// Reduces arbitrary coefficients `c_i ζ^i` (any length) mod `Φ_P`.
    pub fn from_coeffs(coeffs: &[BigRat]) -> Self {
        assert!(is_prime(P), "Cyclo needs a prime modulus");
        let p = P as usize;
        let mut folded = vec![BigRat::zero(); p];
        for (i, c) in coeffs.iter().enumerate() {
            let j = i % p;
            folded[j] = folded[j].add(c);
        }
        let top = folded.pop().expect("p >= 2");
        Cyclo {
            rep: folded.into_iter().map(|c| c.sub(&top)).collect(),
        }
    }

    pub fn from_poly(q: &Poly<BigRat>) -> Self {
        Self::from_coeffs(q.coeffs())
    }

    pub fn from_rat(r: BigRat) -> Self {
        let mut rep = vec![BigRat::zero(); Self::DIM];
        rep[0] = r;
        Cyclo { rep }
    }

    /// `ζ_P^k` for any integer `k`.
    pub fn zeta_pow(k: i64) -> Self {
        let e = k.rem_euclid(P as i64) as usize;
        let mut c = vec![BigRat::zero(); e + 1];
        c[e] = BigRat::one();
        Self::from_coeffs(&c)
    }

    pub fn zeta() -> Self {
        Self::zeta_pow(1)
    }

    /// The uniformizer `λ = ζ_P - 1`.
    pub fn lambda() -> Self {
        Self::zeta().sub(&Self::one())
    }

    pub fn coeffs(&self) -> &[BigRat] {
        &self.rep
    }

    pub fn to_poly(&self) -> Poly<BigRat> {
        Poly::from_coeffs(self.rep.clone())
    }

    /// Complex value under `ζ ↦ exp(2πi·k/P)`; `k` must be prime to `P`.
    pub fn to_complex_embedding(&self, k: u64) -> Complex64 {
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / P as f64);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut pw = Complex64::new(1.0, 0.0);
        for c in &self.rep {
            acc += pw * to_f64(c);
            pw *= w;
        }
        acc
    }

    pub fn to_complex(&self) -> Complex64 {
        self.to_complex_embedding(1)
    }

    /// Image under `ζ ↦ 1` composed with reduction mod `P`; `None` if some
    /// coefficient has negative `P`-adic valuation (not in `Z_(P)[ζ]`).
    pub fn reduce_mod_lambda(&self) -> Option<Fp<P>> {
        self.rep.iter().try_fold(Fp::<P>::zero(), |acc, c| {
            Fp::<P>::from_rational(c).map(|x| acc.add(&x))
        })
    }

    /// Valuation normalized by `v(λ) = 1` (so `v(P) = P - 1`); `None` for zero.
    pub fn lambda_valuation(&self) -> Option<i64> {
        let e = self
            .rep
            .iter()
            .filter_map(|c| padic_valuation(c, P))
            .min()?;
        let scale = BigRat::from_int(P as i64).powi(-e).expect("P nonzero");
        let mut y = Self {
            rep: self.rep.iter().map(|c| c.mul(&scale)).collect(),
        };
        let mut v = e * (P as i64 - 1);
        let lam_inv = Self::lambda().inv().expect("λ is a unit of Q(ζ)");
        // y is P-integral and not divisible by P, so at most P-2 steps
        while y.reduce_mod_lambda().expect("integral").is_zero() {
            y = y.mul(&lam_inv);
            v += 1;
        }
        Some(v)
    }

    /// Galois action `ζ ↦ ζ^k`.
    pub fn galois(&self, k: u64) -> Self {
        let p = P as usize;
        let mut c = vec![BigRat::zero(); p];
        for (i, a) in self.rep.iter().enumerate() {
            let j = (i * k as usize) % p;
            c[j] = c[j].add(a);
        }
        Self::from_coeffs(&c)
    }
}

impl<const P: u64> Ring for Cyclo<P> {
    fn zero() -> Self {
        Cyclo {
            rep: vec![BigRat::zero(); Self::DIM],
        }
    }
    fn one() -> Self {
        Self::from_rat(BigRat::one())
    }
    fn from_int(n: i64) -> Self {
        Self::from_rat(BigRat::from_int(n))
    }
    fn is_zero(&self) -> bool {
        self.rep.iter().all(|c| c.is_zero())
    }
    fn add(&self, rhs: &Self) -> Self {
        Cyclo {
            rep: self.rep.iter().zip(&rhs.rep).map(|(a, b)| a.add(b)).collect(),
        }
    }
    fn sub(&self, rhs: &Self) -> Self {
        Cyclo {
            rep: self.rep.iter().zip(&rhs.rep).map(|(a, b)| a.sub(b)).collect(),
        }
    }
    fn mul(&self, rhs: &Self) -> Self {
        let mut prod = vec![BigRat::zero(); 2 * Self::DIM - 1];
        for (i, a) in self.rep.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.rep.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] = prod[i + j].add(&a.mul(b));
                }
            }
        }
        Self::from_coeffs(&prod)
    }
    fn neg(&self) -> Self {
        Cyclo {
            rep: self.rep.iter().map(|c| c.neg()).collect(),
        }
    }
}

impl<const P: u64> Field for Cyclo<P> {
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let phi = cyclotomic_poly(P).expect("prime modulus");
        let (g, s, _) = Poly::ext_gcd(&self.to_poly(), &phi);
        // Φ_P is irreducible, so a nonzero residue is coprime to it
        debug_assert!(g.is_one());
        Some(Self::from_poly(&s))
    }
}

impl<const P: u64> fmt::Debug for Cyclo<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<const P: u64> fmt::Display for Cyclo<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_poly().fmt_var(&format!("ζ{P}")))
    }
}

#[cfg(test)]
mod tests {
    use super::super::rat;
    use super::*;

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(cyclotomic_poly(2).unwrap().coeffs().len(), 2);
        assert_eq!(cyclotomic_poly(5).unwrap().degree(), Some(4));
        assert!(matches!(cyclotomic_poly(6), Err(AlgebraError::NotPrime(6))));
        assert!(cyclotomic_poly(1).is_err());
    }

    fn roots_of_unity<const P: u64>() {
        let z = Cyclo::<P>::zeta();
        assert!(z.pow(P).is_one());
        let mut s = Cyclo::<P>::zero();
        for k in 0..P {
            s = s.add(&z.pow(k));
        }
        assert!(s.is_zero());
    }

    #[test]
    fn roots_of_unity_relations() {
        roots_of_unity::<2>();
        roots_of_unity::<3>();
        roots_of_unity::<5>();
        roots_of_unity::<7>();
        roots_of_unity::<11>();
    }

    #[test]
    fn inversion_examples() {
        let z = Cyclo::<3>::zeta();
        assert_eq!(z.inv().unwrap(), z.pow(2));
        assert_eq!(z.pow(2), Cyclo::from_coeffs(&[rat(-1, 1), rat(-1, 1)]));
        assert_eq!(Cyclo::<3>::from_int(2).inv().unwrap(), Cyclo::from_rat(rat(1, 2)));
        let x = Cyclo::<5>::one().add(&Cyclo::zeta());
        assert!(x.mul(&x.inv().unwrap()).is_one());
        assert!(Cyclo::<5>::zero().inv().is_none());
    }

    #[test]
    fn lambda_valuation_examples() {
        assert_eq!(Cyclo::<5>::lambda().lambda_valuation(), Some(1));
        assert_eq!(Cyclo::<5>::from_int(5).lambda_valuation(), Some(4));
        assert_eq!(Cyclo::<7>::from_int(7).lambda_valuation(), Some(6));
        assert_eq!(Cyclo::<3>::one().lambda_valuation(), Some(0));
        assert_eq!(Cyclo::<3>::zero().lambda_valuation(), None);
        assert_eq!(Cyclo::<3>::from_rat(rat(1, 9)).lambda_valuation(), Some(-4));
        // 5 = unit·λ^4, checked by explicit repeated division
        let mut x = Cyclo::<5>::from_int(5);
        let li = Cyclo::<5>::lambda().inv().unwrap();
        for _ in 0..4 {
            x = x.mul(&li);
        }
        assert!(!x.reduce_mod_lambda().unwrap().is_zero());
    }

    #[test]
    fn complex_embedding() {
        let z = Cyclo::<3>::zeta();
        let c = z.to_complex();
        assert!((c - Complex64::new(-0.5, 3f64.sqrt() / 2.0)).norm() < 1e-14);
        assert!((z.galois(2).to_complex() - c.conj()).norm() < 1e-14);
    }
}
