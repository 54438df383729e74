//! Quantum difference operators for `T*P¹` (2×2) and `T*P⁰` (scalar), the
//! order-by-order fundamental solution, iterated products and the `q → 1`
//! limit.
//!
//! The `q`-dependence of the `T*P¹` operator is restored as
//! `M(z, q) = 𝐌(z q)` where `𝐌` is the stable-basis matrix; for `T*P⁰`,
//! `M = (1 - z)/(1 - ħz)` carries no `q`.

mod limit;
mod product;

use serde::{Deserialize, Serialize};

use crate::algebra::{BigRat, Field, Mat, Poly, RatFun, Ring};
use crate::series::{SeriesError, TruncMatSeries, TruncSeries};

pub use limit::{cohomological_limit, connection_matrix, CohomologicalLimit, HConvention};
pub use product::{
    characteristic_residual, characteristic_residual_cleared, iterated_product, iterated_product_at,
    iterated_product_cleared, iterated_product_qde_order, ProductOrder,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QdeError {
    #[error("degenerate parameters: {0}")]
    Degenerate(&'static str),
    #[error("matrix entry ({0},{1}) has a pole at z = 0")]
    PoleAtZero(usize, usize),
    #[error("Sylvester system singular at degree {0}")]
    Singular(usize),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Tpp0,
    Tpp1,
}

/// Model parameters over a coefficient field `F`. For `Tpp0` only `ħ` is
/// used.
#[derive(Debug, Clone, PartialEq)]
pub struct QdeModel<F> {
    pub kind: ModelKind,
    pub a1: F,
    pub a2: F,
    pub hbar: F,
}

impl<F: Field> QdeModel<F> {
    /// Validated constructor: `a1 ≠ a2` (for `Tpp1`), all parameters nonzero,
    /// `ħ ≠ ±1`.
    pub fn new(kind: ModelKind, a1: F, a2: F, hbar: F) -> Result<Self, QdeError> {
        if hbar.is_zero() || a1.is_zero() || a2.is_zero() {
            return Err(QdeError::Degenerate("zero parameter"));
        }
        if hbar.is_one() || hbar.neg().is_one() {
            return Err(QdeError::Degenerate("ħ = ±1"));
        }
        if kind == ModelKind::Tpp1 && a1 == a2 {
            return Err(QdeError::Degenerate("a1 = a2"));
        }
        Ok(Self::new_unchecked(kind, a1, a2, hbar))
    }

    /// No validation; used for boundary cases such as `ħ = 1`.
    pub fn new_unchecked(kind: ModelKind, a1: F, a2: F, hbar: F) -> Self {
        QdeModel { kind, a1, a2, hbar }
    }

    pub fn tpp0(hbar: F) -> Result<Self, QdeError> {
        Self::new(ModelKind::Tpp0, F::one(), F::from_int(2), hbar)
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            ModelKind::Tpp0 => 1,
            ModelKind::Tpp1 => 2,
        }
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> QdeModel<G> {
        QdeModel {
            kind: self.kind,
            a1: f(&self.a1),
            a2: f(&self.a2),
            hbar: f(&self.hbar),
        }
    }

    /// Parameters raised to the `p`-th power.
    pub fn powered(&self, p: u64) -> Self {
        self.map(|x| x.pow(p))
    }

    /// Entries of `M(z, q)` as (numerator, denominator) polynomials in `z`.
    pub fn entry_polys(&self, q: &F) -> Vec<Vec<(Poly<F>, Poly<F>)>> {
        let h = &self.hbar;
        match self.kind {
            ModelKind::Tpp0 => vec![vec![(
                Poly::from_coeffs(vec![F::one(), F::from_int(-1)]),
                Poly::from_coeffs(vec![F::one(), h.neg()]),
            )]],
            ModelKind::Tpp1 => {
                let hinv = h.inv().expect("ħ nonzero");
                let d = hinv.sub(h);
                let den = Poly::from_coeffs(vec![F::from_int(-1), h.mul(h).mul(q)]);
                let diag = |a: &F| Poly::from_coeffs(vec![a.neg(), a.mul(q)]);
                vec![
                    vec![
                        (diag(&self.a1), den.clone()),
                        (Poly::from_coeffs(vec![F::zero(), self.a2.mul(&d).mul(q)]), den.clone()),
                    ],
                    vec![
                        (Poly::constant(self.a1.mul(&d)), den.clone()),
                        (diag(&self.a2), den),
                    ],
                ]
            }
        }
    }

    /// `M(z, q)` as a matrix of rational functions in `z`.
    pub fn matrix_z(&self, q: &F) -> Mat<RatFun<F>> {
        let e = self.entry_polys(q);
        let n = self.dim();
        Mat::from_fn(n, n, |i, j| {
            let (num, den) = &e[i][j];
            RatFun::new(num.clone(), den.clone()).expect("nonzero denominator")
        })
    }

    /// `M(z, q) = N(z) / d(z)` over the least common denominator `d` of the
    /// entries.
    pub fn cleared_matrix(&self, q: &F) -> (Mat<Poly<F>>, Poly<F>) {
        let e = self.entry_polys(q);
        let n = self.dim();
        let den = e.iter().flatten().fold(Poly::constant(F::one()), |acc, (_, d)| {
            let g = Poly::gcd(&acc, d);
            acc.mul(&d.exact_div(&g).expect("gcd divides"))
        });
        let num = Mat::from_fn(n, n, |i, j| {
            let (p, d) = &e[i][j];
            p.mul(&den.exact_div(d).expect("lcm is a multiple"))
        });
        (num, den)
    }

    /// `M(z, q)` at a point; `None` at a pole.
    pub fn matrix_at(&self, z: &F, q: &F) -> Option<Mat<F>> {
        let e = self.entry_polys(q);
        let n = self.dim();
        let mut m = Mat::zeros(n, n);
        for (i, row) in e.iter().enumerate() {
            for (j, (num, den)) in row.iter().enumerate() {
                m.set(i, j, num.eval(z).div(&den.eval(z))?);
            }
        }
        Some(m)
    }

    /// The classical term `L = M(0, q)`.
    pub fn classical(&self) -> Mat<F> {
        self.matrix_at(&F::zero(), &F::one()).expect("no pole at z = 0")
    }

    /// Taylor coefficients of `M(z, q)` in `z` up to order `d`.
    pub fn expand(&self, q: &F, d: usize) -> Result<TruncMatSeries<F>, QdeError> {
        let e = self.entry_polys(q);
        let n = self.dim();
        let mut coeffs = vec![Mat::zeros(n, n); d + 1];
        for (i, row) in e.iter().enumerate() {
            for (j, (num, den)) in row.iter().enumerate() {
                let ns = TruncSeries::with_order(num.coeffs().to_vec(), d);
                let ds = TruncSeries::with_order(den.coeffs().to_vec(), d);
                let inv = ds.inverse().map_err(|_| QdeError::PoleAtZero(i, j))?;
                let s = ns.mul(&inv)?;
                for (k, c) in s.coeffs().iter().enumerate() {
                    coeffs[k].set(i, j, c.clone());
                }
            }
        }
        Ok(TruncMatSeries::new(coeffs)?)
    }
}

impl QdeModel<BigRat> {
    /// The same model with parameters viewed as constants in `Q(q)`.
    pub fn over_q(&self) -> QdeModel<RatFun<BigRat>> {
        self.map(|x| RatFun::constant(x.clone()))
    }
}

/// `Ψ = Σ Ψ_d z^d` with `Ψ_0 = 1`, solving `Ψ(qz) L = M(z) Ψ(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalSolution<F> {
    pub psi: TruncMatSeries<F>,
    pub q: F,
}

/// Solves the Sylvester recursion `q^d Ψ_d L − L Ψ_d = Σ_{k≥1} M_k Ψ_{d−k}`
/// for `d = 1..=order`.
pub fn solve_fundamental<F: Field>(
    model: &QdeModel<F>,
    q: &F,
    order: usize,
) -> Result<FundamentalSolution<F>, QdeError> {
    let m = model.expand(q, order)?;
    let l = m.coeff(0).clone();
    let n = model.dim();
    let mut psi = vec![Mat::identity(n)];
    let mut qd = F::one();
    for d in 1..=order {
        qd = qd.mul(q);
        let mut rhs = Mat::zeros(n, n);
        for k in 1..=d {
            if !m.coeff(k).is_zero() {
                rhs = rhs.add(&m.coeff(k).mul(&psi[d - k]));
            }
        }
        psi.push(solve_sylvester(&l, &qd, &rhs).ok_or(QdeError::Singular(d))?);
    }
    Ok(FundamentalSolution {
        psi: TruncMatSeries::new(psi)?,
        q: q.clone(),
    })
}

/// Solves `c·X·L − L·X = R` by vectorization.
fn solve_sylvester<F: Field>(l: &Mat<F>, c: &F, r: &Mat<F>) -> Option<Mat<F>> {
    let n = l.rows();
    let idx = |i: usize, j: usize| i * n + j;
    let mut sys = Mat::<F>::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            let row = idx(i, j);
            for k in 0..n {
                // c · X_ik L_kj
                let v = sys.get(row, idx(i, k)).add(&c.mul(l.get(k, j)));
                sys.set(row, idx(i, k), v);
                // − L_ik X_kj
                let v = sys.get(row, idx(k, j)).sub(l.get(i, k));
                sys.set(row, idx(k, j), v);
            }
        }
    }
    let b: Vec<F> = r.entries().to_vec();
    let x = sys.solve(&b)?;
    Some(Mat::from_fn(n, n, |i, j| x[idx(i, j)].clone()))
}

impl<F: Field> FundamentalSolution<F> {
    /// `Ψ(qz)·L − M(z)·Ψ(z)` truncated at the solution order.
    pub fn residual(&self, model: &QdeModel<F>) -> Result<TruncMatSeries<F>, QdeError> {
        let d = self.psi.order();
        let m = model.expand(&self.q, d)?;
        let l = m.coeff(0).clone();
        let mut qk = F::one();
        let mut shifted = Vec::with_capacity(d + 1);
        for c in self.psi.coeffs() {
            shifted.push(c.scale(&qk).mul(&l));
            qk = qk.mul(&self.q);
        }
        let lhs = TruncMatSeries::new(shifted)?;
        Ok(lhs.sub(&m.mul(&self.psi)?)?)
    }
}

/// Two-by-two eigenvalues of `M(z)` from the quadratic relation
/// `(X − a1)(X − a2) = z ħ² (X − a1 ħ⁻²)(X − a2 ħ⁻²)` (numeric).
pub fn quadratic_relation_roots(
    z: num_complex::Complex64,
    a1: num_complex::Complex64,
    a2: num_complex::Complex64,
    hbar: num_complex::Complex64,
) -> [num_complex::Complex64; 2] {
    let h2 = hbar * hbar;
    // (1 − zħ²) X² − ((a1 + a2) − z(a1 + a2)) X + a1 a2 (1 − z ħ⁻²) = 0
    let a = 1.0 - z * h2;
    let b = -(a1 + a2) * (1.0 - z);
    let c = a1 * a2 * (1.0 - z / h2);
    crate::numeric::quadratic_roots(a, b, c)
}
