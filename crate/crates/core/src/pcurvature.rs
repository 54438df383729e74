//! Differential operators over `𝔽_p(z)` with a pencil variable `s`,
//! p-curvature, the logarithmic-connection identity, Stirling rows, the
//! π-adic binomial lemma, the pencil spectrum comparison and the exploratory
//! root-of-unity reduction of the iterated product.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{
    binomial, rat, AlgebraError, BigRat, Cyclo, Derivation, Field, Fp, Mat, PiAdicMat, Poly, RatFun, Ring,
};
use crate::frobenius::expand_ratfun_matrix;
use crate::qde::{
    cohomological_limit, connection_matrix, iterated_product, iterated_product_qde_order, HConvention, ModelKind,
    QdeModel,
};
use crate::series::SeriesError;

/// `𝔽_p(z)`.
pub type Fz<const P: u64> = RatFun<Fp<P>>;
/// `𝔽_p(z)[s]`.
pub type Pencil<const P: u64> = Poly<Fz<P>>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PCurvatureError {
    #[error("∇^p has a nonzero ∂^{0} coefficient")]
    Structure(usize),
    #[error("∇^p has ∂^p coefficient different from the identity")]
    LeadingCoefficient,
    #[error("Stirling row {p}: a_({p},{k}) = {value} is not ≡ {expected} mod {p}")]
    Stirling { p: u64, k: usize, value: u128, expected: u64 },
    #[error("p = {0} not supported here")]
    Prime(u64),
    #[error("entry ({i},{j}) at z^{degree} has λ-valuation {valuation} < p")]
    LowValuation { degree: usize, i: usize, j: usize, valuation: i64 },
    #[error("entry ({0},{1}) has a pole at z = 0")]
    PoleAtZero(usize, usize),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Dispatches a runtime prime to a const-generic expression:
/// `with_prime!(p, P => expr)` evaluates `expr` with `const P: u64 = p` for
/// the supported primes `≤ 23` and yields `None` otherwise.
#[macro_export]
macro_rules! with_prime {
    ($p:expr, $P:ident => $body:expr) => {
        match $p {
            2 => { const $P: u64 = 2; Some($body) }
            3 => { const $P: u64 = 3; Some($body) }
            5 => { const $P: u64 = 5; Some($body) }
            7 => { const $P: u64 = 7; Some($body) }
            11 => { const $P: u64 = 11; Some($body) }
            13 => { const $P: u64 = 13; Some($body) }
            17 => { const $P: u64 = 17; Some($body) }
            19 => { const $P: u64 = 19; Some($body) }
            23 => { const $P: u64 = 23; Some($body) }
            _ => None,
        }
    };
}

/// `Σ_k M_k ∂^k` with coefficients on the left.
#[derive(Clone, PartialEq)]
pub struct DiffOp<R> {
    coeffs: Vec<Mat<R>>,
}

impl<R: Ring + Derivation> DiffOp<R> {
    /// Trailing zero coefficients are dropped (the zero operator keeps one).
    pub fn new(mut coeffs: Vec<Mat<R>>) -> Self {
        assert!(!coeffs.is_empty(), "operator needs a dimension");
        while coeffs.len() > 1 && coeffs.last().is_some_and(|m| m.is_zero()) {
            coeffs.pop();
        }
        DiffOp { coeffs }
    }

    pub fn identity(n: usize) -> Self {
        DiffOp { coeffs: vec![Mat::identity(n)] }
    }

    /// `∂ + A`.
    pub fn connection(a: &Mat<R>) -> Self {
        Self::new(vec![a.clone(), Mat::identity(a.rows())])
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].rows()
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Mat<R>] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Mat<R> {
        self.coeffs.get(k).cloned().unwrap_or_else(|| Mat::zeros(self.dim(), self.dim()))
    }

    /// `(Σ A_i ∂^i)(Σ B_j ∂^j) = Σ A_i C(i,l) B_j^{(l)} ∂^{i+j−l}`.
    pub fn compose(&self, rhs: &Self) -> Self {
        let n = self.dim();
        let mut out = vec![Mat::zeros(n, n); self.order() + rhs.order() + 1];
        let mut derivs: Vec<Vec<Mat<R>>> = rhs.coeffs.iter().map(|b| vec![b.clone()]).collect();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for l in 0..=i {
                let c = binomial::<R>(i, l);
                if c.is_zero() {
                    continue;
                }
                let ac = a.scale(&c);
                for (j, dj) in derivs.iter_mut().enumerate() {
                    while dj.len() <= l {
                        let next = dj.last().expect("nonempty").derive();
                        dj.push(next);
                    }
                    if dj[l].is_zero() {
                        continue;
                    }
                    let k = i + j - l;
                    out[k] = out[k].add(&ac.mul(&dj[l]));
                }
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: u64) -> Self {
        (0..e).fold(Self::identity(self.dim()), |acc, _| acc.compose(self))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..len).map(|k| self.coeff(k).sub(&rhs.coeff(k))).collect())
    }

    /// Left multiplication by a scalar function.
    pub fn scale_left(&self, f: &R) -> Self {
        Self::new(self.coeffs.iter().map(|m| m.scale(f)).collect())
    }
}

impl<R: fmt::Debug> fmt::Debug for DiffOp<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiffOp").field("coeffs", &self.coeffs).finish()
    }
}

/// A connection matrix `A` over `𝔽_P(z)`, used in the pencil `∂ + sA`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionData<const P: u64> {
    pub a: Mat<Fz<P>>,
}

fn lift<const P: u64>(m: &Mat<Fz<P>>) -> Mat<Pencil<P>> {
    m.map(|e| Poly::constant(e.clone()))
}

fn z_pencil<const P: u64>() -> Pencil<P> {
    Poly::constant(Fz::<P>::var())
}

impl<const P: u64> ConnectionData<P> {
    pub fn new(a: Mat<Fz<P>>) -> Self {
        ConnectionData { a }
    }

    /// The `T*P¹` pencil matrix `A = C/z` with `C` the connection matrix of
    /// parameters `(u1, u2, h)`.
    pub fn tpp1(u1: Fp<P>, u2: Fp<P>, h: Fp<P>) -> Self {
        let zinv = Fz::<P>::var().inv().expect("z nonzero");
        ConnectionData {
            a: connection_matrix(&u1, &u2, &h).map(|e| e.mul(&zinv)),
        }
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    /// `∂ + sA`.
    pub fn pencil_operator(&self) -> DiffOp<Pencil<P>> {
        let s = Poly::<Fz<P>>::x();
        DiffOp::connection(&lift(&self.a).scale(&s))
    }

    /// `z∂ + s z A`.
    pub fn log_operator(&self) -> DiffOp<Pencil<P>> {
        let s = Poly::<Fz<P>>::x();
        let z = z_pencil::<P>();
        let n = self.dim();
        DiffOp::new(vec![lift(&self.a).scale(&s.mul(&z)), Mat::scalar(n, &z)])
    }
}

/// `∇^p` for `∇ = ∂ + sA`, with the structure assertions (no `∂^k` for
/// `1 ≤ k < p`, identity at `∂^p`); returns the `∂^0` coefficient.
pub fn p_curvature<const P: u64>(conn: &ConnectionData<P>) -> Result<Mat<Pencil<P>>, PCurvatureError> {
    let op = conn.pencil_operator().pow(P);
    for k in 1..P as usize {
        if !op.coeff(k).is_zero() {
            return Err(PCurvatureError::Structure(k));
        }
    }
    if !op.coeff(P as usize).is_identity() {
        return Err(PCurvatureError::LeadingCoefficient);
    }
    Ok(op.coeff(0))
}

/// `C_1 = sA`, `C_{k+1} = C_k′ + sA C_k`; returns `C_p`. Independent of
/// operator composition.
pub fn p_curvature_recursive<const P: u64>(conn: &ConnectionData<P>) -> Mat<Pencil<P>> {
    let sa = lift(&conn.a).scale(&Poly::x());
    (1..P).fold(sa.clone(), |c, _| c.derive().add(&sa.mul(&c)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogIdentityReport {
    pub p: u64,
    pub passed: bool,
    /// First `(∂-order, row, col)` where the sides differ.
    pub mismatch: Option<(usize, usize, usize)>,
}

/// `(∇^L)^p − ∇^L = z^p ∇^p` coefficientwise in `∂`.
pub fn log_identity_check<const P: u64>(conn: &ConnectionData<P>) -> LogIdentityReport {
    let log = conn.log_operator();
    let lhs = log.pow(P).sub(&log);
    let rhs = conn.pencil_operator().pow(P).scale_left(&z_pencil::<P>().pow(P));
    let n = conn.dim();
    let len = lhs.order().max(rhs.order()) + 1;
    let mismatch = (0..len).find_map(|k| {
        let (l, r) = (lhs.coeff(k), rhs.coeff(k));
        (0..n * n).find_map(|e| (l.get(e / n, e % n) != r.get(e / n, e % n)).then_some((k, e / n, e % n)))
    });
    LogIdentityReport {
        p: P,
        passed: mismatch.is_none(),
        mismatch,
    }
}

/// Row `n` of the Stirling numbers of the second kind, `a_{n,1..n}`, by
/// `a_{n+1,k} = a_{n,k−1} + k a_{n,k}`.
pub fn stirling_numbers(n: usize) -> Vec<u128> {
    let mut row = vec![1u128];
    for m in 1..n {
        let mut next = vec![0u128; m + 1];
        for k in 1..=m + 1 {
            let left = if k >= 2 { row[k - 2] } else { 0 };
            let stay = if k <= m { k as u128 * row[k - 1] } else { 0 };
            next[k - 1] = left + stay;
        }
        row = next;
    }
    row
}

/// Row `p` with the assertions `a_{p,1} ≡ 1`, `a_{p,k} ≡ 0` for `1 < k < p`,
/// `a_{p,p} = 1`.
pub fn stirling_row(p: u64) -> Result<Vec<u128>, PCurvatureError> {
    if p < 2 {
        return Err(PCurvatureError::Prime(p));
    }
    let row = stirling_numbers(p as usize);
    for (i, &v) in row.iter().enumerate() {
        let k = i + 1;
        let expected = if k == 1 || k == p as usize { 1 } else { 0 };
        if (v % p as u128) as u64 != expected || (k == p as usize && v != 1) {
            return Err(PCurvatureError::Stirling { p, k, value: v, expected });
        }
    }
    Ok(row)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiLemmaReport {
    pub p: u64,
    /// π-valuation of `(1 + πα + π²β)^p − 1 − π^p(α^p − α)`; `None` if zero.
    pub valuation: Option<i64>,
    /// `(digit, row, col)` attaining the valuation.
    pub at: Option<(usize, usize, usize)>,
    pub passed: bool,
}

/// Checks `(1 + πα + π²β)^p = 1 + π^p(α^p − α) + O(π^{p+1})` exactly in
/// `ℚ[π]/(π^{p−1} + p)`. Requires `p ≥ 3`.
pub fn pi_lemma_check(p: u64, alpha: &Mat<BigRat>, beta: &Mat<BigRat>) -> Result<PiLemmaReport, PCurvatureError> {
    if p < 3 {
        return Err(PCurvatureError::Prime(p));
    }
    let n = alpha.rows();
    let x = PiAdicMat::polynomial_in_pi(p, &[Mat::identity(n), alpha.clone(), beta.clone()])?;
    let mut main = vec![Mat::zeros(n, n); p as usize + 1];
    main[0] = Mat::identity(n);
    main[p as usize] = alpha.pow(p).sub(alpha);
    let diff = x.pow(p).sub(&PiAdicMat::polynomial_in_pi(p, &main)?);
    let found = diff.pi_valuation();
    let valuation = found.map(|(v, _)| v);
    Ok(PiLemmaReport {
        p,
        valuation,
        at: found.map(|(_, at)| at),
        passed: valuation.is_none_or(|v| v > p as i64),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PencilReport {
    pub p: u64,
    pub u1: u64,
    pub u2: u64,
    pub h: u64,
    pub trace_equal: bool,
    pub charpoly_equal: bool,
    /// Both characteristic polynomials (in `T` over `𝔽_p(z)[s]`) on mismatch.
    pub mismatch: Option<(String, String)>,
}

fn fmt_pencil_poly<const P: u64>(c: &Poly<Pencil<P>>) -> String {
    let terms: Vec<String> = c
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(k, x)| {
            let inner: Vec<String> = x
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(_, y)| !y.is_zero())
                .map(|(j, y)| format!("({})*s^{j}", y.fmt_var("z")))
                .collect();
            format!("[{}]*T^{k}", inner.join(" + "))
        })
        .collect();
    terms.join(" + ")
}

/// Compares the characteristic polynomials of `z^p C_p(∂ + sA)` and
/// `(s^p − s) z^p A(z^p)` for the `T*P¹` pencil.
pub fn pencil_spectrum_check<const P: u64>(u1: Fp<P>, u2: Fp<P>, h: Fp<P>) -> Result<PencilReport, PCurvatureError> {
    let conn = ConnectionData::<P>::tpp1(u1, u2, h);
    let zp = z_pencil::<P>().pow(P);
    let lhs = p_curvature(&conn)?.scale(&zp);
    let s = Poly::<Fz<P>>::x();
    let twist = s.pow(P).sub(&s).mul(&zp);
    let rhs = lift(&conn.a.map(|e| e.substitute_power(P as usize))).scale(&twist);
    let mut report = PencilReport {
        p: P,
        u1: u1.value(),
        u2: u2.value(),
        h: h.value(),
        trace_equal: lhs.trace() == rhs.trace(),
        charpoly_equal: false,
        mismatch: None,
    };
    if report.trace_equal {
        let (cl, cr) = (lhs.charpoly(), rhs.charpoly());
        report.charpoly_equal = cl == cr;
        if !report.charpoly_equal {
            report.mismatch = Some((fmt_pencil_poly(&cl), fmt_pencil_poly(&cr)));
        }
    } else {
        report.mismatch = Some((fmt_pencil_poly(&lhs.charpoly()), fmt_pencil_poly(&rhs.charpoly())));
    }
    Ok(report)
}

/// Matrix digits in `𝔽_p` of a truncated `z`-series, indexed `[degree]`.
pub type DigitSeries<const P: u64> = Vec<Mat<Fp<P>>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantAgreement {
    pub h_convention: HConvention,
    pub s: i64,
    pub digits_agree: bool,
    pub charpoly_agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootReductionReport {
    pub p: u64,
    pub u1: i64,
    pub u2: i64,
    pub h: i64,
    pub dz: usize,
    /// `"agree"` when the primary variant matches digitwise, otherwise
    /// `"finding"`.
    pub status: String,
    /// The `h` convention of the computed cohomological limit, `s = 1`,
    /// ascending product order.
    pub primary: VariantAgreement,
    pub product_digits: Vec<Vec<Vec<u64>>>,
    pub pencil_digits: Vec<Vec<Vec<u64>>>,
    /// Agreement for each `(h convention, s = ±1)` against the ascending-order
    /// product.
    pub variants: Vec<VariantAgreement>,
    /// Same comparison against the reversed (difference-equation) order.
    pub qde_order_variants: Vec<VariantAgreement>,
    /// Whether `𝓜(z^p, a^p, ħ^p) − 1` vanishes to `λ`-order `p + 1`, the
    /// `(s^p − s)|_{s=1} = 0` case.
    pub powered_digit_vanishes: bool,
}

fn lambda_digits<const P: u64>(
    series: &crate::series::TruncMatSeries<Cyclo<P>>,
    subtract_identity: bool,
) -> Result<DigitSeries<P>, PCurvatureError> {
    let n = series.dim();
    let lam_p = Cyclo::<P>::lambda().pow(P).inv().expect("λ invertible");
    let mut out = Vec::with_capacity(series.order() + 1);
    for (degree, c) in series.coeffs().iter().enumerate() {
        let c = if degree == 0 && subtract_identity {
            c.sub(&Mat::identity(n))
        } else {
            c.clone()
        };
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let e = c.get(i, j);
                if let Some(v) = e.lambda_valuation() {
                    if v < P as i64 {
                        return Err(PCurvatureError::LowValuation { degree, i, j, valuation: v });
                    }
                    m.set(i, j, e.mul(&lam_p).reduce_mod_lambda().expect("integral after division"));
                }
            }
        }
        out.push(m);
    }
    Ok(out)
}

fn fz_series<const P: u64>(m: &Mat<Fz<P>>, dz: usize) -> Result<DigitSeries<P>, PCurvatureError> {
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if m.get(i, j).den().coeff(0).is_zero() {
                return Err(PCurvatureError::PoleAtZero(i, j));
            }
        }
    }
    Ok(expand_ratfun_matrix(m, dz)?.coeffs().to_vec())
}

fn series_charpoly<const P: u64>(s: &DigitSeries<P>) -> Vec<Vec<u64>> {
    let dz = s.len() - 1;
    let n = s[0].rows();
    let m = Mat::from_fn(n, n, |i, j| Poly::from_coeffs(s.iter().map(|c| c.get(i, j).clone()).collect()));
    m.charpoly()
        .coeffs()
        .iter()
        .map(|c| (0..=dz).map(|k| c.coeff(k).value()).collect())
        .collect()
}

fn digits_as_ints<const P: u64>(s: &DigitSeries<P>) -> Vec<Vec<Vec<u64>>> {
    s.iter()
        .map(|m| (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j).value()).collect()).collect())
        .collect()
}

/// Exploratory comparison, with `a_i = 1 + u_i λ`, `ħ = 1 + hλ`, `q = ζ_P`,
/// of the `λ^P` digit of the iterated product minus one against
/// `z^P C_P(∂ + sA)` for the pencil data. The primary variant uses the `h`
/// convention of [`cohomological_limit`] (the lift sends the operator to
/// `1 + λ C(u, 2h) + O(λ²)`); the other conventions and signs are reported
/// alongside. Disagreements are reported as findings together with a
/// characteristic-polynomial comparison mod `λ`.
pub fn root_reduction_check<const P: u64>(u1: i64, u2: i64, h: i64, dz: usize) -> Result<RootReductionReport, PCurvatureError> {
    if P > 3 {
        return Err(PCurvatureError::Prime(P));
    }
    let lam = Cyclo::<P>::lambda();
    let lift_int = |u: i64| Cyclo::<P>::one().add(&lam.mul(&Cyclo::from_rat(rat(u, 1))));
    let model = QdeModel::new_unchecked(ModelKind::Tpp1, lift_int(u1), lift_int(u2), lift_int(h));
    let zeta = Cyclo::<P>::zeta();
    let ascending = lambda_digits(&expand_ratfun_matrix(&iterated_product(&model, P, &zeta), dz)?, true)?;
    let reversed = lambda_digits(&expand_ratfun_matrix(&iterated_product_qde_order(&model, P, &zeta), dz)?, true)?;

    let zp = Fz::<P>::var().pow(P);
    let fp = |x: i64| Fp::<P>::new(x);
    let mut pencils = Vec::new();
    for conv in [HConvention::H, HConvention::TwoH] {
        let conn = ConnectionData::<P>::tpp1(fp(u1), fp(u2), fp(h * conv.factor()));
        let c = p_curvature(&conn)?;
        for s in [1i64, -1] {
            let at_s = c.map(|e| e.eval(&Fz::<P>::from_int(s)).mul(&zp));
            pencils.push((conv, s, fz_series(&at_s, dz)?));
        }
    }
    let compare = |prod: &DigitSeries<P>| -> Vec<VariantAgreement> {
        let cp = series_charpoly(prod);
        pencils
            .iter()
            .map(|(conv, s, pen)| VariantAgreement {
                h_convention: *conv,
                s: *s,
                digits_agree: pen == prod,
                charpoly_agree: series_charpoly(pen) == cp,
            })
            .collect()
    };
    let variants = compare(&ascending);
    let qde_order_variants = compare(&reversed);
    let conv = cohomological_limit()
        .matching_conventions()
        .first()
        .copied()
        .unwrap_or(HConvention::H);
    let primary_idx = variants
        .iter()
        .position(|v| v.h_convention == conv && v.s == 1)
        .expect("variant grid covers both conventions");
    let primary = variants[primary_idx].clone();

    let pow_model = model.powered(P);
    let pow_z = pow_model.matrix_z(&Cyclo::one()).map(|e| e.substitute_power(P as usize));
    let pow_digits = lambda_digits(&expand_ratfun_matrix(&pow_z, dz)?, true)?;
    let powered_digit_vanishes = pow_digits.iter().all(|m| m.is_zero());

    Ok(RootReductionReport {
        p: P,
        u1,
        u2,
        h,
        dz,
        status: if primary.digits_agree { "agree" } else { "finding" }.to_string(),
        primary,
        product_digits: digits_as_ints(&ascending),
        pencil_digits: digits_as_ints(&pencils[primary_idx].2),
        variants,
        qde_order_variants,
        powered_digit_vanishes,
    })
}

/// Parses a polynomial in `z` with integer coefficients reduced mod `P`,
/// e.g. `3*z^2 - z + 1`.
pub fn parse_poly<const P: u64>(src: &str) -> Result<Poly<Fp<P>>, String> {
    let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
    let s = s.trim_start_matches('(').trim_end_matches(')');
    if s.is_empty() {
        return Err("empty polynomial".into());
    }
    let mut coeffs: Vec<i64> = Vec::new();
    let mut rest = s;
    while !rest.is_empty() {
        let (sign, body) = match rest.as_bytes()[0] {
            b'-' => (-1, &rest[1..]),
            b'+' => (1, &rest[1..]),
            _ => (1, rest),
        };
        let end = body.find(['+', '-']).unwrap_or(body.len());
        let term = &body[..end];
        rest = &body[end..];
        let (coef, power) = match term.find('z') {
            None => (term.parse::<i64>().map_err(|e| format!("bad term `{term}`: {e}"))?, 0),
            Some(pos) => {
                let c = term[..pos].trim_end_matches('*');
                let c = if c.is_empty() { 1 } else { c.parse::<i64>().map_err(|e| format!("bad coefficient `{c}`: {e}"))? };
                let e = &term[pos + 1..];
                let e = if e.is_empty() {
                    1
                } else {
                    e.strip_prefix('^')
                        .ok_or_else(|| format!("bad exponent in `{term}`"))?
                        .parse::<usize>()
                        .map_err(|err| format!("bad exponent in `{term}`: {err}"))?
                };
                (c, e)
            }
        };
        if coeffs.len() <= power {
            coeffs.resize(power + 1, 0);
        }
        coeffs[power] += sign * coef;
    }
    Ok(Poly::from_coeffs(coeffs.into_iter().map(Fp::new).collect()))
}

/// Parses a connection matrix: one row per line, entries separated by `,`,
/// each entry `num` or `num/den` (polynomials in `z`); `#` starts a comment.
pub fn parse_matrix<const P: u64>(text: &str) -> Result<Mat<Fz<P>>, PCurvatureError> {
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| PCurvatureError::Parse { line: idx + 1, msg };
        let mut row = Vec::new();
        for entry in line.split(',') {
            let (num, den) = match entry.split_once('/') {
                Some((n, d)) => (n, d),
                None => (entry, "1"),
            };
            let num = parse_poly::<P>(num).map_err(err)?;
            let den = parse_poly::<P>(den).map_err(err)?;
            row.push(RatFun::new(num, den).ok_or_else(|| err("zero denominator mod p".into()))?);
        }
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(PCurvatureError::Parse {
            line: 0,
            msg: "matrix must be square and nonempty".into(),
        });
    }
    Ok(Mat::from_rows(rows))
}
