//! Dilogarithm, the Yang-Yang function of `T*Gr(k, n)` and the `q → 1`,
//! `q → ζ_p` asymptotics of the scalar `T*P⁰` vertex.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::algebra::{binomial, rat, BigRat, Ring};
use crate::numeric::{root_of_unity, C64};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VertexError {
    #[error("dilogarithm argument {0} lies on the branch cut [1, ∞)")]
    BranchCut(C64),
    #[error("monomial {index} evaluates to {value} on the branch cut")]
    MonomialOnCut { index: usize, value: C64 },
    #[error("finite difference for x_{0} crosses a branch cut")]
    BranchCrossing(usize),
    #[error("m-sum diverges or leaves the series regime: max(|z|, |ħz|) = {0}")]
    Divergent(f64),
    #[error("invalid input: {0}")]
    Invalid(&'static str),
}

const BERNOULLI_TERMS: usize = 80;

/// `B_n / (n+1)!` for `n < BERNOULLI_TERMS`, with `B_1 = -1/2`.
fn bernoulli_coeffs() -> &'static [f64] {
    static COEFFS: OnceLock<Vec<f64>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let mut b: Vec<BigRat> = vec![BigRat::one()];
        for n in 1..BERNOULLI_TERMS {
            // Σ_{k=0}^{n} C(n+1, k) B_k = 0
            let mut s = BigRat::zero();
            for (k, bk) in b.iter().enumerate() {
                s = s.add(&binomial::<BigRat>(n + 1, k).mul(bk));
            }
            b.push(s.neg().mul(&rat(1, n as i64 + 1)));
        }
        let mut fact = BigInt::from(1);
        b.iter()
            .enumerate()
            .map(|(n, bn)| {
                fact *= n + 1;
                (bn / BigRat::from_integer(fact.clone())).to_f64().unwrap_or(0.0)
            })
            .collect()
    })
}

/// Principal branch of `Li₂(w) = Σ w^m/m²`, continued off `[1, ∞)`.
pub fn dilog(w: C64) -> Result<C64, VertexError> {
    if w.im == 0.0 && w.re > 1.0 {
        return Err(VertexError::BranchCut(w));
    }
    Ok(dilog_unchecked(w))
}

fn dilog_unchecked(w: C64) -> C64 {
    let zeta2 = PI * PI / 6.0;
    if w == C64::new(1.0, 0.0) {
        return C64::new(zeta2, 0.0);
    }
    let r = w.norm();
    if r <= 0.5 {
        let mut sum = C64::new(0.0, 0.0);
        let mut pw = w;
        for m in 1..200 {
            let term = pw / (m * m) as f64;
            sum += term;
            if term.norm() < 1e-18 * sum.norm().max(1e-300) {
                break;
            }
            pw *= w;
        }
        return sum;
    }
    if r > 2.0 {
        let l = (-w).ln();
        return -zeta2 - 0.5 * l * l - dilog_unchecked(1.0 / w);
    }
    if w.re > 0.5 {
        return zeta2 - w.ln() * (1.0 - w).ln() - dilog_unchecked(1.0 - w);
    }
    // Bernoulli series in u = -log(1 - w); |u| < 2π in this region
    let u = -(1.0 - w).ln();
    let mut sum = C64::new(0.0, 0.0);
    let mut pw = u;
    for c in bernoulli_coeffs() {
        sum += pw * *c;
        pw *= u;
    }
    sum
}

/// Monomial `Π x_i^{e_i} Π a_j^{f_j} ħ^g`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialWeight {
    pub x: Vec<i32>,
    pub a: Vec<i32>,
    pub hbar: i32,
}

impl MonomialWeight {
    pub fn eval(&self, x: &[C64], a: &[C64], hbar: C64) -> C64 {
        let mut v = hbar.powi(self.hbar);
        for (xi, e) in x.iter().zip(&self.x) {
            v *= xi.powi(*e);
        }
        for (aj, f) in a.iter().zip(&self.a) {
            v *= aj.powi(*f);
        }
        v
    }

    pub fn depends_on_x(&self) -> bool {
        self.x.iter().any(|&e| e != 0)
    }
}

/// Quiver data of `T*Gr(k, n)` for the Yang-Yang function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YangYangData {
    pub k: usize,
    pub a: Vec<C64>,
    pub hbar: C64,
    pub z: C64,
    /// Multiplies the principal `ħ^{1/2}`; `+1` or `-1`.
    pub sqrt_sign: f64,
}

impl YangYangData {
    pub fn new(k: usize, a: Vec<C64>, hbar: C64, z: C64) -> Self {
        YangYangData {
            k,
            a,
            hbar,
            z,
            sqrt_sign: 1.0,
        }
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// `P = Σ_{i,j} x_i/a_j − Σ_{i,j} x_i/x_j` as signed monomials.
    pub fn polarization(&self) -> Vec<(i32, MonomialWeight)> {
        let (k, n) = (self.k, self.n());
        let mut out = Vec::with_capacity(k * n + k * k);
        for i in 0..k {
            for j in 0..n {
                let mut x = vec![0; k];
                let mut a = vec![0; n];
                x[i] = 1;
                a[j] = -1;
                out.push((1, MonomialWeight { x, a, hbar: 0 }));
            }
        }
        for i in 0..k {
            for j in 0..k {
                let mut x = vec![0; k];
                x[i] += 1;
                x[j] -= 1;
                out.push((-1, MonomialWeight { x, a: vec![0; n], hbar: 0 }));
            }
        }
        out
    }

    /// Exponent of `Π x_i` in `det P` (computed from the weights; equals
    /// `n` for the Grassmannian).
    pub fn det_exponent(&self) -> i32 {
        self.polarization()
            .iter()
            .map(|(s, w)| s * w.x.first().copied().unwrap_or(0))
            .sum()
    }

    /// `z_# = z (−ħ^{1/2})^{−n}`.
    pub fn shifted_z(&self) -> C64 {
        let root = -self.hbar.sqrt() * self.sqrt_sign;
        self.z * root.powi(-self.det_exponent())
    }
}

/// `Y(x) = Σ_{w∈P} (Li₂(w) − Li₂(ħw)) + log(z_#) log(Π x_i)`.
pub fn yang_yang(x: &[C64], data: &YangYangData) -> Result<C64, VertexError> {
    if x.len() != data.k {
        return Err(VertexError::Invalid("root vector length differs from k"));
    }
    let mut y = C64::new(0.0, 0.0);
    for (idx, (sign, w)) in data.polarization().iter().enumerate() {
        let v = w.eval(x, &data.a, C64::new(1.0, 0.0));
        let hv = v * data.hbar;
        let l1 = dilog(v).map_err(|_| VertexError::MonomialOnCut { index: idx, value: v })?;
        let l2 = dilog(hv).map_err(|_| VertexError::MonomialOnCut { index: idx, value: hv })?;
        y += (l1 - l2) * *sign as f64;
    }
    let prod: C64 = x.iter().product();
    Ok(y + data.shifted_z().ln() * prod.ln())
}

/// `max_m |exp(x_m ∂Y/∂x_m) − 1|` by central differences in `log x_m`.
/// Returns `Ok(None)` (skipped) when an `x`-dependent monomial sits at the
/// logarithmic singularity `w = 1` or `ħw = 1`.
pub fn gradient_check(x: &[C64], data: &YangYangData, h_step: f64) -> Result<Option<f64>, VertexError> {
    let pol = data.polarization();
    for (_, w) in pol.iter().filter(|(_, w)| w.depends_on_x()) {
        let v = w.eval(x, &data.a, C64::new(1.0, 0.0));
        if (v - 1.0).norm() < 1e-14 || (v * data.hbar - 1.0).norm() < 1e-14 {
            return Ok(None);
        }
    }
    let mut worst: f64 = 0.0;
    for m in 0..x.len() {
        // scaling x_m by a positive real keeps every argument on its ray, so
        // a crossing can only happen along the real axis through 1
        for (_, w) in pol.iter().filter(|(_, w)| w.x[m] != 0) {
            for base in [w.eval(x, &data.a, C64::new(1.0, 0.0)), w.eval(x, &data.a, data.hbar)] {
                let lo = base * (-(w.x[m] as f64) * h_step).exp();
                let hi = base * ((w.x[m] as f64) * h_step).exp();
                if base.im == 0.0 && (lo.re - 1.0) * (hi.re - 1.0) <= 0.0 {
                    return Err(VertexError::BranchCrossing(m));
                }
            }
        }
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[m] *= h_step.exp();
        xm[m] *= (-h_step).exp();
        let d = (yang_yang(&xp, data)? - yang_yang(&xm, data)?) / (2.0 * h_step);
        worst = worst.max((d.exp() - 1.0).norm());
    }
    Ok(Some(worst))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticCase {
    pub name: String,
    pub q: C64,
    pub value: C64,
    pub target: C64,
    pub rel_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsReport {
    pub epsilon: f64,
    pub p: u64,
    pub cases: Vec<AsymptoticCase>,
}

const M_TERMS: u32 = 200;

/// `log Ψ` for `Ψ = φ(ħz)/φ(z)`: `Σ_{m≤200} (z^m − (ħz)^m)/(m(1 − q^m))`.
pub fn scalar_log_vertex(hbar: C64, z: C64, q: C64) -> C64 {
    let hz = hbar * z;
    (1..=M_TERMS)
        .map(|m| (z.powu(m) - hz.powu(m)) / (m as f64 * (1.0 - q.powu(m))))
        .sum()
}

fn rel_err(v: C64, t: C64) -> f64 {
    let d = (v - t).norm();
    if d == 0.0 {
        0.0
    } else {
        d / t.norm().max(1e-300)
    }
}

/// The three asymptotic comparisons for the scalar vertex:
/// (i) `(1−q) log Ψ` at `q = 1−ε` against `Li₂(z) − Li₂(ħz)`;
/// (ii) `(1−q^p) p log Ψ` at `q = ζ_p(1−ε)` against `Li₂(z^p) − Li₂(ħ^p z^p)`;
/// (iii) the same scaling of `log Ψ(z^p, ħ^p, q^{p²})` against the same target.
pub fn scalar_vertex_asymptotics(hbar: C64, z: C64, p: u64, eps: f64) -> Result<AsymptoticsReport, VertexError> {
    let radius = z.norm().max((hbar * z).norm());
    if radius > 0.3 {
        return Err(VertexError::Divergent(radius));
    }
    if p < 2 {
        return Err(VertexError::Invalid("p must be at least 2"));
    }
    let one = C64::new(1.0, 0.0);
    let q1 = one * (1.0 - eps);
    let v1 = (1.0 - q1) * scalar_log_vertex(hbar, z, q1);
    let t1 = dilog(z)? - dilog(hbar * z)?;

    let pu = p as u32;
    let qz = root_of_unity(p, 1) * (1.0 - eps);
    let scale = (1.0 - qz.powu(pu)) * p as f64;
    let v2 = scale * scalar_log_vertex(hbar, z, qz);
    let (zp, hp) = (z.powu(pu), hbar.powu(pu));
    let t2 = dilog(zp)? - dilog(hp * zp)?;
    let v3 = scale * scalar_log_vertex(hp, zp, qz.powu(pu * pu));

    let case = |name: &str, q: C64, value: C64, target: C64| AsymptoticCase {
        name: name.to_string(),
        q,
        value,
        target,
        rel_err: rel_err(value, target),
    };
    Ok(AsymptoticsReport {
        epsilon: eps,
        p,
        cases: vec![
            case("q->1", q1, v1, t1),
            case("q->zeta_p", qz, v2, t2),
            case("powered q^(p^2)", qz, v3, t2),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::pochhammer_series;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn series_oracle(w: C64, terms: u32) -> C64 {
        (1..=terms).map(|m| w.powu(m) / (m * m) as f64).sum()
    }

    #[test]
    fn dilog_special_values() {
        assert_eq!(dilog(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert!((dilog(c(1.0, 0.0)).unwrap().re - PI * PI / 6.0).abs() < 1e-15);
        let landen = PI * PI / 12.0 - 0.5 * 2f64.ln().powi(2);
        assert!((dilog(c(0.5, 0.0)).unwrap() - landen).norm() < 1e-14);
        assert!((series_oracle(c(0.5, 0.0), 60) - landen).norm() < 1e-14);
        assert!((dilog(c(-1.0, 0.0)).unwrap().re + PI * PI / 12.0).abs() < 1e-13);
        assert!(matches!(dilog(c(3.0, 0.0)), Err(VertexError::BranchCut(_))));
    }

    #[test]
    fn dilog_regions_agree_with_series() {
        // points inside the unit disc where the plain series still converges
        for w in [c(0.7, 0.3), c(-0.8, 0.1), c(0.1, -0.9), c(-0.6, -0.6), c(0.55, 0.0)] {
            let s = series_oracle(w, 4000);
            assert!((dilog(w).unwrap() - s).norm() < 1e-10, "{w}");
        }
    }

    #[test]
    fn dilog_inversion_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let w = C64::from_polar(3.0, rng.gen_range(-3.1..3.1));
            let l = (-w).ln();
            let r = dilog(w).unwrap() + dilog(1.0 / w).unwrap() + PI * PI / 6.0 + 0.5 * l * l;
            assert!(r.norm() < 1e-10);
        }
    }

    #[test]
    fn yang_yang_small_cases() {
        let a = c(1.3, 0.2);
        let h = c(0.6, 0.1);
        let data = YangYangData::new(1, vec![a], h, c(0.1, 0.0));
        assert_eq!(data.det_exponent(), 1);
        let x = c(0.4, 0.3);
        let expected = dilog(x / a).unwrap() - dilog(h * x / a).unwrap() - dilog(c(1.0, 0.0)).unwrap()
            + dilog(h).unwrap()
            + data.shifted_z().ln() * x.ln();
        assert!((yang_yang(&[x], &data).unwrap() - expected).norm() < 1e-14);
        // ħ = 1 leaves only the logarithmic term
        let d1 = YangYangData::new(2, vec![c(1.1, 0.0), c(0.7, 0.4), c(2.0, 0.0)], c(1.0, 0.0), c(0.2, 0.1));
        assert_eq!(d1.det_exponent(), 3);
        let xs = [c(0.3, 0.2), c(0.5, -0.1)];
        let prod: C64 = xs.iter().product();
        let y = yang_yang(&xs, &d1).unwrap();
        assert!((y - d1.shifted_z().ln() * prod.ln()).norm() < 1e-13);
    }

    #[test]
    fn log_vertex_matches_pochhammer_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..5 {
            let hbar = C64::from_polar(rng.gen_range(0.5..1.5), rng.gen_range(0.0..6.0));
            let z = C64::from_polar(rng.gen_range(0.05..0.2), rng.gen_range(0.0..6.0));
            let q = C64::from_polar(rng.gen_range(0.3..0.7), rng.gen_range(0.0..6.0));
            let d = 60;
            let num = pochhammer_series(&q, &hbar, d).unwrap();
            let den = pochhammer_series(&q, &c(1.0, 0.0), d).unwrap();
            let ratio = num.mul(&den.inverse().unwrap()).unwrap();
            let log = ratio.log().unwrap().eval(&z);
            assert!((log - scalar_log_vertex(hbar, z, q)).norm() < 1e-10);
        }
    }

    #[test]
    fn asymptotics_examples() {
        let r = scalar_vertex_asymptotics(c(1.0, 0.0), c(0.2, 0.0), 2, 1e-3).unwrap();
        for case in &r.cases {
            assert!(case.value.norm() < 1e-12 && case.target.norm() < 1e-12);
        }
        let r = scalar_vertex_asymptotics(c(0.7, 0.0), c(0.2, 0.0), 2, 1e-3).unwrap();
        assert!(r.cases.iter().all(|c| c.rel_err <= 2e-2), "{r:?}");
        assert!(matches!(
            scalar_vertex_asymptotics(c(0.7, 0.0), c(0.5, 0.0), 2, 1e-3),
            Err(VertexError::Divergent(_))
        ));
    }
}
