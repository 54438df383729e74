use super::{padic_valuation, AlgebraError, BigRat, Mat, Ring};

/// Matrices over `Q[π]/(π^{p-1} + p)`, stored as digits `C_0..C_{p-2}` with
/// value `Σ C_k π^k`.
#[derive(Clone, PartialEq, Debug)]
pub struct PiAdicMat {
    p: u64,
    digits: Vec<Mat<BigRat>>,
}

impl PiAdicMat {
    /// Reduces an arbitrary-length digit list with `π^{p-1} = -p`.
    pub fn from_digits(p: u64, digits: Vec<Mat<BigRat>>) -> Result<Self, AlgebraError> {
        if !super::is_prime(p) {
            return Err(AlgebraError::NotPrime(p));
        }
        let n = digits
            .first()
            .map(|m| m.rows())
            .ok_or_else(|| AlgebraError::Dimension("no digits".into()))?;
        if digits.iter().any(|m| m.rows() != n || m.cols() != n) {
            return Err(AlgebraError::Dimension("non-uniform digit shapes".into()));
        }
        let width = (p - 1) as usize;
        let mut out = vec![Mat::zeros(n, n); width];
        let minus_p = BigRat::from_int(-(p as i64));
        for (k, d) in digits.into_iter().enumerate() {
            let factor = Ring::pow(&minus_p, (k / width) as u64);
            out[k % width] = out[k % width].add(&d.scale(&factor));
        }
        Ok(PiAdicMat { p, digits: out })
    }

    /// `c·π^k` times the identity.
    pub fn scalar_pi_power(p: u64, n: usize, c: &BigRat, k: usize) -> Result<Self, AlgebraError> {
        let mut d = vec![Mat::zeros(n, n); k + 1];
        d[k] = Mat::scalar(n, c);
        Self::from_digits(p, d)
    }

    /// `C_0 + π C_1 + π² C_2 + ...` from unreduced matrices.
    pub fn polynomial_in_pi(p: u64, terms: &[Mat<BigRat>]) -> Result<Self, AlgebraError> {
        Self::from_digits(p, terms.to_vec())
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.digits[0].rows()
    }

    pub fn digits(&self) -> &[Mat<BigRat>] {
        &self.digits
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.check(rhs);
        PiAdicMat {
            p: self.p,
            digits: self.digits.iter().zip(&rhs.digits).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.check(rhs);
        PiAdicMat {
            p: self.p,
            digits: self.digits.iter().zip(&rhs.digits).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        self.check(rhs);
        let n = self.dim();
        let w = self.digits.len();
        let mut raw = vec![Mat::zeros(n, n); 2 * w - 1];
        for (i, a) in self.digits.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.digits.iter().enumerate() {
                raw[i + j] = raw[i + j].add(&a.mul(b));
            }
        }
        Self::from_digits(self.p, raw).expect("shapes already validated")
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::scalar_pi_power(self.p, self.dim(), &BigRat::one(), 0)
            .expect("prime already validated");
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

    pub fn is_zero(&self) -> bool {
        self.digits.iter().all(|d| d.is_zero())
    }

    /// Minimal π-valuation over all entries: an entry `c` of digit `k`
    /// contributes `k + (p-1)·v_p(c)`. `None` for the zero matrix. Also
    /// returns the (digit, row, col) attaining it.
    pub fn pi_valuation(&self) -> Option<(i64, (usize, usize, usize))> {
        let mut best: Option<(i64, (usize, usize, usize))> = None;
        let n = self.dim();
        for (k, d) in self.digits.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    if let Some(v) = padic_valuation(d.get(i, j), self.p) {
                        let tot = k as i64 + (self.p as i64 - 1) * v;
                        if best.is_none_or(|(b, _)| tot < b) {
                            best = Some((tot, (k, i, j)));
                        }
                    }
                }
            }
        }
        best
    }

    fn check(&self, rhs: &Self) {
        assert!(
            self.p == rhs.p && self.dim() == rhs.dim(),
            "PiAdicMat prime or dimension mismatch"
        );
    }
}

#[cfg(test)]
mod tests {
    use super::super::rat;
    use super::*;

    #[test]
    fn pi_relation() {
        for p in [2u64, 3, 5, 7] {
            let pi = PiAdicMat::scalar_pi_power(p, 2, &rat(1, 1), 1).unwrap();
            let lhs = pi.pow(p - 1);
            let minus_p = PiAdicMat::scalar_pi_power(p, 2, &rat(-(p as i64), 1), 0).unwrap();
            assert!(lhs.sub(&minus_p).is_zero());
            assert_eq!(pi.pi_valuation().unwrap().0, 1);
            assert_eq!(minus_p.pi_valuation().unwrap().0, p as i64 - 1);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(PiAdicMat::from_digits(4, vec![Mat::identity(2)]).is_err());
        assert!(PiAdicMat::from_digits(3, vec![Mat::identity(2), Mat::identity(3)]).is_err());
    }
}
