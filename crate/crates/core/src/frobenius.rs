//! The Frobenius intertwiner `F = Ψ(z, a, q) Ψ(z^p, a^p, q^{p²})^{-1}`, the
//! exact certificate that its coefficients have no pole at `Φ_p(q) = 0`, its
//! value at `q = ζ_p`, the conjugation identity and the `T*P⁰` closed form.
//!
//! The powered solution is conjugated by the unipotent lower-triangular `S`
//! with `S L(a^p) S⁻¹ = L(a)^p` before inversion (frame alignment). Without it
//! the stable-basis classical terms disagree and the cancellation fails.

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::algebra::{cyclotomic_poly, AlgebraError, BigRat, Cyclo, Field, Mat, Poly, RatFun, Ring};
use crate::qde::{iterated_product_qde_order, solve_fundamental, ModelKind, QdeError, QdeModel};
use crate::series::{SeriesError, TruncMatSeries, TruncSeries};

type Qq = RatFun<BigRat>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FrobeniusError {
    #[error(transparent)]
    Qde(#[from] QdeError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("frame alignment undefined: a1^p = a2^p")]
    Alignment,
    #[error("denominator of entry ({i},{j}) at z^{degree} vanishes at ζ_p")]
    DivisionFailure { degree: usize, i: usize, j: usize },
}

/// Which power of `q` replaces `q` in the powered solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QPower {
    PSquared,
    P,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntertwinerOptions {
    pub align: bool,
    pub q_power: QPower,
}

impl Default for IntertwinerOptions {
    fn default() -> Self {
        IntertwinerOptions {
            align: true,
            q_power: QPower::PSquared,
        }
    }
}

/// `F` over `ℚ(q)` together with the unpowered solution it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct RawIntertwiner {
    pub f: TruncMatSeries<Qq>,
    pub psi: TruncMatSeries<Qq>,
    /// `Ψ(z^p, a^p, q^{p²})` after alignment, in `z`.
    pub powered: TruncMatSeries<Qq>,
    pub alignment: Mat<BigRat>,
    pub p: u64,
    pub order: usize,
    pub kind: ModelKind,
    pub options: IntertwinerOptions,
}

/// `S = [[1, 0], [t, 1]]` with `S L(a^p) S⁻¹ = L(a)^p`; identity for `T*P⁰`.
pub fn alignment_matrix(model: &QdeModel<BigRat>, p: u64) -> Result<Mat<BigRat>, FrobeniusError> {
    if model.kind == ModelKind::Tpp0 {
        return Ok(Mat::identity(1));
    }
    let lp = model.classical().pow(p);
    let l_pow = model.powered(p).classical();
    let gap = lp.get(0, 0).sub(lp.get(1, 1));
    let t = lp.get(1, 0).sub(l_pow.get(1, 0)).div(&gap).ok_or(FrobeniusError::Alignment)?;
    Ok(Mat::from_rows(vec![
        vec![BigRat::one(), BigRat::zero()],
        vec![t, BigRat::one()],
    ]))
}

fn conjugate<F: Field>(s: &Mat<F>, x: &TruncMatSeries<F>) -> TruncMatSeries<F> {
    let sinv = s.inverse().expect("unipotent");
    x.lmul_const(s).rmul_const(&sinv)
}

pub fn compute_intertwiner(
    model: &QdeModel<BigRat>,
    p: u64,
    order: usize,
    options: IntertwinerOptions,
) -> Result<RawIntertwiner, FrobeniusError> {
    let q = Qq::var();
    let n = model.dim();
    let psi = solve_fundamental(&model.over_q(), &q, order)?.psi;
    let inner = solve_fundamental(&model.powered(p).over_q(), &q, order / p as usize)?.psi;
    let e = match options.q_power {
        QPower::PSquared => p * p,
        QPower::P => p,
    } as usize;
    let mut inner = inner.map(|r| r.substitute_power(e));
    let alignment = if options.align {
        alignment_matrix(model, p)?
    } else {
        Mat::identity(n)
    };
    if options.align {
        inner = conjugate(&alignment.map(|c| Qq::constant(c.clone())), &inner);
    }
    let mut coeffs = vec![Mat::zeros(n, n); order + 1];
    for (k, c) in inner.coeffs().iter().enumerate() {
        coeffs[k * p as usize] = c.clone();
    }
    let powered = TruncMatSeries::new(coeffs)?;
    let f = psi.mul(&powered.inverse()?)?;
    Ok(RawIntertwiner {
        f,
        psi,
        powered,
        alignment,
        p,
        order,
        kind: model.kind,
        options,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryCertificate {
    pub degree: usize,
    pub i: usize,
    pub j: usize,
    pub denominator: String,
    pub coprime: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoleCertificate {
    pub p: u64,
    pub entries: Vec<EntryCertificate>,
    /// First `(degree, i, j)` where `Ψ` itself has a `Φ_p`-divisible
    /// denominator.
    pub positive_control: Option<(usize, usize, usize)>,
}

impl PoleCertificate {
    pub fn violations(&self) -> Vec<(usize, usize, usize)> {
        self.entries
            .iter()
            .filter(|e| !e.coprime)
            .map(|e| (e.degree, e.i, e.j))
            .collect()
    }

    /// All denominators coprime to `Φ_p` and the control fired (or `p < 2`).
    pub fn passed(&self) -> bool {
        self.violations().is_empty() && (self.p < 2 || self.positive_control.is_some())
    }
}

fn divisible_by(den: &Poly<BigRat>, phi: &Poly<BigRat>) -> bool {
    !Poly::gcd(den, phi).is_constant()
}

/// Checks `gcd(den, Φ_p) = 1` for every entry of every coefficient of `F`.
/// Violations are reported in the certificate,
/// not as an `Err`. `p = 1` passes trivially.
pub fn pole_certificate(raw: &RawIntertwiner) -> Result<PoleCertificate, FrobeniusError> {
    let p = raw.p;
    if p < 2 {
        return Ok(PoleCertificate {
            p,
            entries: vec![],
            positive_control: None,
        });
    }
    let phi = cyclotomic_poly(p)?;
    let n = raw.f.dim();
    let mut entries = Vec::new();
    for (d, c) in raw.f.coeffs().iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                let den = c.get(i, j).den();
                entries.push(EntryCertificate {
                    degree: d,
                    i,
                    j,
                    denominator: den.fmt_var("q"),
                    coprime: !divisible_by(den, &phi),
                });
            }
        }
    }
    let positive_control = raw.psi.coeffs().iter().enumerate().find_map(|(d, c)| {
        (0..n * n).find_map(|k| divisible_by(c.get(k / n, k % n).den(), &phi).then_some((d, k / n, k % n)))
    });
    Ok(PoleCertificate {
        p,
        entries,
        positive_control,
    })
}

fn at_zeta<const P: u64>(r: &Qq) -> Option<Cyclo<P>> {
    Cyclo::<P>::from_poly(r.num()).div(&Cyclo::<P>::from_poly(r.den()))
}

/// Maps every coefficient into `ℚ(ζ_P)`.
pub fn reduce_at_zeta<const P: u64>(raw: &RawIntertwiner) -> Result<TruncMatSeries<Cyclo<P>>, FrobeniusError> {
    let n = raw.f.dim();
    let mut out = Vec::with_capacity(raw.order + 1);
    for (degree, c) in raw.f.coeffs().iter().enumerate() {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let v = at_zeta::<P>(c.get(i, j)).ok_or(FrobeniusError::DivisionFailure { degree, i, j })?;
                m.set(i, j, v);
            }
        }
        out.push(m);
    }
    Ok(TruncMatSeries::new(out)?)
}

fn eval_complex(r: &Qq, q: Complex64) -> Complex64 {
    let f = |p: &Poly<BigRat>| {
        p.coeffs()
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * q + c.to_f64().unwrap_or(f64::NAN))
    };
    f(r.num()) / f(r.den())
}

/// Max entrywise distance, relative to `max(1, |reduced|)`, between `F`
/// evaluated at `q = ζ_P (1 − offset)` and the complex image of the reduced
/// coefficients.
pub fn numeric_limit_distance<const P: u64>(
    raw: &RawIntertwiner,
    reduced: &TruncMatSeries<Cyclo<P>>,
    offset: f64,
) -> f64 {
    let q = Cyclo::<P>::zeta().to_complex() * (1.0 - offset);
    let mut worst: f64 = 0.0;
    for (c, r) in raw.f.coeffs().iter().zip(reduced.coeffs()) {
        for (a, b) in c.entries().iter().zip(r.entries()) {
            let exact = b.to_complex();
            worst = worst.max((eval_complex(a, q) - exact).norm() / exact.norm().max(1.0));
        }
    }
    worst
}

/// Taylor expansion to order `d` of a matrix of rational functions of `z`.
pub fn expand_ratfun_matrix<F: Field>(m: &Mat<RatFun<F>>, d: usize) -> Result<TruncMatSeries<F>, SeriesError> {
    let n = m.rows();
    let mut coeffs = vec![Mat::zeros(n, n); d + 1];
    for i in 0..n {
        for j in 0..n {
            let e = m.get(i, j);
            let num = TruncSeries::with_order(e.num().coeffs().to_vec(), d);
            let den = TruncSeries::with_order(e.den().coeffs().to_vec(), d);
            let s = num.mul(&den.inverse()?)?;
            for (k, c) in s.coeffs().iter().enumerate() {
                coeffs[k].set(i, j, c.clone());
            }
        }
    }
    TruncMatSeries::new(coeffs)
}

/// `R(z) = F(z)·S 𝓜(z^p, a^p, ħ^p) S⁻¹ − 𝓜_ζ(z)·F(z)` to order `d` over
/// `ℚ(ζ_P)`, where `𝓜` is the operator at `q = 1` and
/// `𝓜_ζ = M(zζ^{P−1}) ⋯ M(z)` at `q = ζ_P`.
pub fn conjugation_check<const P: u64>(
    model: &QdeModel<BigRat>,
    d: usize,
) -> Result<TruncMatSeries<Cyclo<P>>, FrobeniusError> {
    let raw = compute_intertwiner(model, P, d, IntertwinerOptions::default())?;
    let f = reduce_at_zeta::<P>(&raw)?;
    let lift = |x: &BigRat| Cyclo::<P>::from_rat(x.clone());
    let powered = model.powered(P).map(lift);
    let m_pow = powered.expand(&Cyclo::one(), d / P as usize)?;
    let mut coeffs = vec![Mat::zeros(model.dim(), model.dim()); d + 1];
    for (k, c) in m_pow.coeffs().iter().enumerate() {
        coeffs[k * P as usize] = c.clone();
    }
    let m_pow = conjugate(&raw.alignment.map(lift), &TruncMatSeries::new(coeffs)?);
    let zeta = Cyclo::<P>::zeta();
    let prod = iterated_product_qde_order(&model.map(lift), P, &zeta);
    let m_zeta = expand_ratfun_matrix(&prod, d)?;
    Ok(f.mul(&m_pow)?.sub(&m_zeta.mul(&f)?)?)
}

/// `Π_{m ≤ d, P∤m} exp((ħ^m − 1) z^m / (m (ζ_P^m − 1)))` over `ℚ(ζ_P)`.
pub fn tpp0_closed_form<const P: u64>(hbar: &BigRat, d: usize) -> Result<TruncSeries<Cyclo<P>>, FrobeniusError> {
    let mut expo = vec![Cyclo::<P>::zero(); d + 1];
    for (m, slot) in expo.iter_mut().enumerate().skip(1) {
        if m as u64 % P == 0 {
            continue;
        }
        let num = Cyclo::from_rat(Ring::pow(hbar, m as u64).sub(&BigRat::one()));
        let den = Cyclo::<P>::zeta_pow(m as i64).sub(&Cyclo::one()).scale_int(m as i64);
        *slot = num.div(&den).expect("ζ^m ≠ 1 for P ∤ m");
    }
    Ok(TruncSeries::new(expo).exp()?)
}

/// The exact limit of `Ψ(z, ħ, q) Ψ(z^P, ħ^P, q^{P²})^{-1}` at `q = ζ_P`:
/// the product above times `((1 − ħ^P z^P)/(1 − z^P))^{(P−1)/(2P)}`. The
/// extra factor is the finite remainder of the `P | m` terms,
/// `1/(P(v − 1)) − 1/(v^P − 1) → (P − 1)/(2P)` as `v = q^{Pm} → 1`.
pub fn tpp0_exact_limit<const P: u64>(hbar: &BigRat, d: usize) -> Result<TruncSeries<Cyclo<P>>, FrobeniusError> {
    let mut expo = vec![Cyclo::<P>::zero(); d + 1];
    let p = P as i64;
    for m in 1..=(d / P as usize) {
        let c = Ring::pow(hbar, P * m as u64)
            .sub(&BigRat::one())
            .mul(&crate::algebra::rat(p - 1, 2 * p * m as i64));
        expo[m * P as usize] = Cyclo::from_rat(c);
    }
    let remainder = TruncSeries::new(expo).exp()?;
    Ok(tpp0_closed_form::<P>(hbar, d)?.mul(&remainder)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn tpp1(a1: i64, a2: i64, h: i64) -> QdeModel<BigRat> {
        QdeModel::new(ModelKind::Tpp1, rat(a1, 1), rat(a2, 1), rat(h, 1)).unwrap()
    }

    #[test]
    fn constant_term_and_first_coefficient() {
        let m = QdeModel::tpp0(rat(5, 1)).unwrap();
        let raw = compute_intertwiner(&m, 2, 4, IntertwinerOptions::default()).unwrap();
        assert!(raw.f.coeff(0).is_identity());
        // untouched by the powered factor: (ħ − 1)/(q − 1)
        let q = Qq::var();
        let expected = Qq::constant(rat(4, 1)).div(&q.sub(&Qq::one())).unwrap();
        assert_eq!(raw.f.coeff(1).get(0, 0), &expected);
        // associativity oracle: F·Ψ(z^p) = Ψ
        assert_eq!(raw.f.mul(&raw.powered).unwrap(), raw.psi);
    }

    #[test]
    fn tpp0_certificate_and_reduction() {
        let m = QdeModel::tpp0(rat(5, 1)).unwrap();
        let raw = compute_intertwiner(&m, 2, 4, IntertwinerOptions::default()).unwrap();
        let cert = pole_certificate(&raw).unwrap();
        assert!(cert.passed(), "{cert:?}");
        assert_eq!(cert.positive_control.map(|c| c.0), Some(2));
        let red = reduce_at_zeta::<2>(&raw).unwrap();
        assert!(red.coeff(0).is_identity());
        // (ħ − 1)/(ζ_2 − 1) = −2
        assert_eq!(red.coeff(1).get(0, 0), &Cyclo::from_rat(rat(-2, 1)));
        assert!(numeric_limit_distance(&raw, &red, 1e-6) < 1e-4);
    }

    #[test]
    fn p1_edge_is_trivial() {
        let raw = compute_intertwiner(&tpp1(2, 3, 5), 1, 2, IntertwinerOptions::default()).unwrap();
        assert!(pole_certificate(&raw).unwrap().passed());
        assert!(raw.f.sub(&TruncMatSeries::identity(2, 2)).unwrap().is_zero());
    }

    #[test]
    fn tpp1_p2_alignment_matters() {
        let m = tpp1(2, 3, 5);
        let raw = compute_intertwiner(&m, 2, 4, IntertwinerOptions::default()).unwrap();
        assert!(pole_certificate(&raw).unwrap().passed());
        let unaligned = IntertwinerOptions {
            align: false,
            ..Default::default()
        };
        let raw = compute_intertwiner(&m, 2, 4, unaligned).unwrap();
        assert!(!pole_certificate(&raw).unwrap().violations().is_empty());
    }

    #[test]
    fn conjugation_identity_p2() {
        let r = conjugation_check::<2>(&tpp1(2, 3, 5), 4).unwrap();
        assert!(r.is_zero());
        let r = conjugation_check::<2>(&QdeModel::new(ModelKind::Tpp1, rat(1, 2), rat(7, 3), rat(2, 3)).unwrap(), 4)
            .unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn conjugation_identity_hbar_one() {
        let m = QdeModel::new_unchecked(ModelKind::Tpp1, rat(2, 1), rat(3, 1), rat(1, 1));
        let raw = compute_intertwiner(&m, 2, 4, IntertwinerOptions::default()).unwrap();
        assert!(raw.f.sub(&TruncMatSeries::identity(2, 4)).unwrap().is_zero());
        assert!(conjugation_check::<2>(&m, 4).unwrap().is_zero());
    }

    #[test]
    fn closed_form_examples() {
        let h = rat(5, 1);
        let cf = tpp0_closed_form::<2>(&h, 2).unwrap();
        // ((ħ−1)/(ζ_2−1))²/2 = (ħ−1)²/8
        assert_eq!(cf.coeff(2), &Cyclo::from_rat(rat(16, 8)));
        let one = tpp0_closed_form::<3>(&BigRat::one(), 6).unwrap();
        assert!(one.coeffs().iter().skip(1).all(|c| c.is_zero()));
        let m = QdeModel::tpp0(h.clone()).unwrap();
        let raw = compute_intertwiner(&m, 3, 6, IntertwinerOptions::default()).unwrap();
        let red = reduce_at_zeta::<3>(&raw).unwrap();
        let computed: Vec<Cyclo<3>> = red.coeffs().iter().map(|c| c.get(0, 0).clone()).collect();
        assert_eq!(computed, tpp0_exact_limit::<3>(&h, 6).unwrap().coeffs());
        // the product over P ∤ m alone first differs at z^P
        let product_form = tpp0_closed_form::<3>(&h, 6).unwrap();
        assert_eq!(computed[..3], product_form.coeffs()[..3]);
        assert_ne!(computed[3], product_form.coeffs()[3]);
    }

    #[test]
    fn exact_limit_remainder_at_p2() {
        // ħ = 5: product-form z² coefficient 2, remainder (ħ² − 1)/4 = 6
        let m = QdeModel::tpp0(rat(5, 1)).unwrap();
        let raw = compute_intertwiner(&m, 2, 4, IntertwinerOptions::default()).unwrap();
        let red = reduce_at_zeta::<2>(&raw).unwrap();
        assert_eq!(red.coeff(2).get(0, 0), &Cyclo::from_rat(rat(8, 1)));
        let exact = tpp0_exact_limit::<2>(&rat(5, 1), 4).unwrap();
        for d in 0..=4 {
            assert_eq!(red.coeff(d).get(0, 0), exact.coeff(d));
        }
    }
}
