use serde::{Deserialize, Serialize};

use super::{ModelKind, QdeModel};
use crate::algebra::{BigRat, Dual, Field, Mat, RatFun, Ring};

type Qz = RatFun<BigRat>;

/// Normalization of `h` when comparing against the Chern-class matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HConvention {
    /// `ħ = e^{εh}`
    H,
    /// `ħ² = e^{εh}`, i.e. `h` doubled
    TwoH,
}

impl HConvention {
    pub fn factor(self) -> i64 {
        match self {
            HConvention::H => 1,
            HConvention::TwoH => 2,
        }
    }
}

/// First-order term `C(z)` of `M(z, q = 1+ε)` with `a_i = 1 + ε u_i`,
/// `ħ = 1 + ε h`. `C` is linear in `(u1, u2, h)`, stored by its partial
/// derivatives; `dq` is the response to `q` alone (zero for these models).
#[derive(Debug, Clone, PartialEq)]
pub struct CohomologicalLimit {
    pub du1: Mat<Qz>,
    pub du2: Mat<Qz>,
    pub dh: Mat<Qz>,
    pub dq: Mat<Qz>,
}

impl CohomologicalLimit {
    /// `C(z)` at concrete `(u1, u2, h)`.
    pub fn evaluate(&self, u1: &BigRat, u2: &BigRat, h: &BigRat) -> Mat<Qz> {
        let c = |x: &BigRat| Qz::constant(x.clone());
        self.du1
            .scale(&c(u1))
            .add(&self.du2.scale(&c(u2)))
            .add(&self.dh.scale(&c(h)))
    }

    /// Conventions under which `C(z)` equals [`connection_matrix`] entrywise
    /// as a linear form in `(u1, u2, h)`.
    pub fn matching_conventions(&self) -> Vec<HConvention> {
        let one = BigRat::one();
        let zero = BigRat::zero();
        let a_u1 = connection_matrix::<BigRat>(&one, &zero, &zero);
        let a_u2 = connection_matrix::<BigRat>(&zero, &one, &zero);
        let a_h = connection_matrix::<BigRat>(&zero, &zero, &one);
        [HConvention::H, HConvention::TwoH]
            .into_iter()
            .filter(|c| {
                let k = Qz::from_int(c.factor());
                self.du1 == a_u1 && self.du2 == a_u2 && self.dh == a_h.scale(&k) && self.dq.is_zero()
            })
            .collect()
    }
}

/// The `T*P¹` connection matrix in Chern-class normalization:
/// `[[u1 − hz/(z−1), −hz/(z−1)], [−h/(z−1), u2 − hz/(z−1)]]`.
pub fn connection_matrix<F: Field>(u1: &F, u2: &F, h: &F) -> Mat<RatFun<F>> {
    let z = RatFun::<F>::var();
    let zm1 = z.sub(&RatFun::one());
    let c = |x: &F| RatFun::constant(x.clone());
    let hz = c(h).mul(&z).div(&zm1).expect("z − 1 nonzero");
    let h1 = c(h).div(&zm1).expect("z − 1 nonzero");
    Mat::from_rows(vec![
        vec![c(u1).sub(&hz), hz.neg()],
        vec![h1.neg(), c(u2).sub(&hz)],
    ])
}

/// Exact first-order expansion of the `T*P¹` operator around
/// `a = ħ = q = 1`, one direction at a time with dual numbers.
pub fn cohomological_limit() -> CohomologicalLimit {
    let dir = |k: usize| -> Mat<Qz> {
        let d = |i: usize| {
            let e = if i == k { Qz::one() } else { Qz::zero() };
            Dual::new(Qz::one(), e)
        };
        let model = QdeModel::new_unchecked(ModelKind::Tpp1, d(0), d(1), d(2));
        let z = Dual::constant(Qz::var());
        model
            .matrix_at(&z, &d(3))
            .expect("z − 1 invertible in Q(z)")
            .map(|x| x.eps.clone())
    };
    CohomologicalLimit {
        du1: dir(0),
        du2: dir(1),
        dh: dir(2),
        dq: dir(3),
    }
}
