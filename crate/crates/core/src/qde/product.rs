use serde::{Deserialize, Serialize};

use super::QdeModel;
use crate::algebra::{Field, Mat, Poly, RatFun, Ring};

/// Factor order of the `p`-fold shifted product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProductOrder {
    /// `M(z) M(zq) ⋯ M(zq^{p−1})`
    Ascending,
    /// `M(zq^{p−1}) ⋯ M(zq) M(z)`, the order produced by iterating
    /// `Ψ(qz) L = M(z) Ψ(z)`.
    Qde,
}

fn factors<F: Field>(model: &QdeModel<F>, p: u64, q: &F) -> Vec<Mat<RatFun<F>>> {
    let base = model.matrix_z(q);
    let mut shift = F::one();
    let mut out = Vec::with_capacity(p as usize);
    for _ in 0..p {
        out.push(base.map(|f| f.scale_var(&shift)));
        shift = shift.mul(q);
    }
    out
}

/// `M(z, q) M(zq, q) ⋯ M(zq^{p−1}, q)` as rational functions of `z`.
pub fn iterated_product<F: Field>(model: &QdeModel<F>, p: u64, q: &F) -> Mat<RatFun<F>> {
    let f = factors(model, p, q);
    f.iter()
        .skip(1)
        .fold(f[0].clone(), |acc, m| acc.mul(m))
}

/// `M(zq^{p−1}, q) ⋯ M(zq, q) M(z, q)`.
pub fn iterated_product_qde_order<F: Field>(model: &QdeModel<F>, p: u64, q: &F) -> Mat<RatFun<F>> {
    let f = factors(model, p, q);
    f.iter()
        .rev()
        .skip(1)
        .fold(f[p as usize - 1].clone(), |acc, m| acc.mul(m))
}

/// The ascending-order product as `(N, d)` with product `= N(z) / d(z)`;
/// polynomial arithmetic only, no normalization.
pub fn iterated_product_cleared<F: Field>(model: &QdeModel<F>, p: u64, q: &F) -> (Mat<Poly<F>>, Poly<F>) {
    let (num, den) = model.cleared_matrix(q);
    let mut shift = F::one();
    let mut acc_num = Mat::identity(model.dim());
    let mut acc_den = Poly::constant(F::one());
    for _ in 0..p {
        acc_num = acc_num.mul(&num.map(|e| e.scale_var(&shift)));
        acc_den = acc_den.mul(&den.scale_var(&shift));
        shift = shift.mul(q);
    }
    (acc_num, acc_den)
}

/// The iterated product evaluated at a point `z`; `None` at a pole.
pub fn iterated_product_at<F: Field>(
    model: &QdeModel<F>,
    z: &F,
    q: &F,
    p: u64,
    order: ProductOrder,
) -> Option<Mat<F>> {
    let mut zs = z.clone();
    let mut mats = Vec::with_capacity(p as usize);
    for _ in 0..p {
        mats.push(model.matrix_at(&zs, q)?);
        zs = zs.mul(q);
    }
    if order == ProductOrder::Qde {
        mats.reverse();
    }
    let first = mats[0].clone();
    Some(mats.iter().skip(1).fold(first, |acc, m| acc.mul(m)))
}

/// `(X − a1^p)(X − a2^p) − z^p ħ^{2p} (X − a1^p ħ^{−2p})(X − a2^p ħ^{−2p})`.
pub fn characteristic_residual<R: Field>(
    x: &Mat<R>,
    a1: &R,
    a2: &R,
    hbar: &R,
    z: &R,
    p: u64,
) -> Mat<R> {
    let n = x.rows();
    let a1p = a1.pow(p);
    let a2p = a2.pow(p);
    let h2p = hbar.pow(2 * p);
    let h2p_inv = h2p.inv().expect("ħ nonzero");
    let shift = |c: &R| x.sub(&Mat::scalar(n, c));
    let lhs = shift(&a1p).mul(&shift(&a2p));
    let rhs = shift(&a1p.mul(&h2p_inv))
        .mul(&shift(&a2p.mul(&h2p_inv)))
        .scale(&z.pow(p).mul(&h2p));
    lhs.sub(&rhs)
}

/// `d² ·` [`characteristic_residual`] for `X = N / d`, as a polynomial matrix
/// in `z`; zero exactly when the residual of `X` is.
pub fn characteristic_residual_cleared<F: Field>(
    num: &Mat<Poly<F>>,
    den: &Poly<F>,
    a1: &F,
    a2: &F,
    hbar: &F,
    p: u64,
) -> Mat<Poly<F>> {
    let n = num.rows();
    let c = |x: F| Poly::constant(x);
    let h2p = hbar.pow(2 * p);
    let h2p_inv = h2p.inv().expect("ħ nonzero");
    let (a1p, a2p) = (a1.pow(p), a2.pow(p));
    let shift = |a: F| num.sub(&Mat::scalar(n, &den.mul(&c(a))));
    let lhs = shift(a1p.clone()).mul(&shift(a2p.clone()));
    let zp = Poly::monomial(h2p, p as usize);
    let rhs = shift(a1p.mul(&h2p_inv)).mul(&shift(a2p.mul(&h2p_inv))).scale(&zp);
    lhs.sub(&rhs)
}
