//! Bethe equations of `T*Gr(k, n)`: residuals, solvers (companion matrix for
//! `k = 1`, homotopy continuation in `z` for `k ≥ 2`), powered systems and the
//! comparison with the iterated-product spectrum at roots of unity.
//!
//! Component `m` of the system is
//! `Π_j (x_m − a_j)/(a_j − ħ x_m) · Π_{i≠m} (x_i − ħ x_m)/(ħ x_i − x_m) = z ħ^{−n/2}`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::numeric::{eigenvalues, match_multisets, poly_roots, rel_dist, root_of_unity, NumericError, C64};
use crate::qde::{iterated_product_at, ModelKind, ProductOrder, QdeModel};
use crate::vertex::YangYangData;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BetheError {
    #[error("invalid data: {0}")]
    Invalid(String),
    #[error("pole in factor of component {0}")]
    Pole(usize),
    #[error("path {path} failed at t = {t}: step underflow")]
    PathFailure { path: usize, t: f64 },
    #[error("roots {i} and {j} collide in solution {path}")]
    Collision { path: usize, i: usize, j: usize },
    #[error("expected {expected} solutions, found {found}")]
    WrongCount { expected: usize, found: usize },
    #[error("solution residual {0:e} above 1e-10")]
    Residual(f64),
    #[error("spectra differ: max relative distance {max_rel:e} above {tol:e}")]
    PairingFailure { max_rel: f64, tol: f64 },
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

pub const RESIDUAL_TOL: f64 = 1e-10;
const COLLISION_TOL: f64 = 1e-8;
const MIN_STEP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrassmannianData {
    pub k: usize,
    pub a: Vec<C64>,
    pub hbar: C64,
    pub z: C64,
    /// The branch of `ħ^{1/2}` used in the twist `z ħ^{−n/2}`.
    pub hbar_half: C64,
}

impl GrassmannianData {
    /// Validates `0 < k ≤ n`, distinct `a_j`, and `ħ` away from zero and from
    /// roots of unity of order ≤ 4. Uses the principal `ħ^{1/2}`.
    pub fn new(k: usize, a: Vec<C64>, hbar: C64, z: C64) -> Result<Self, BetheError> {
        let n = a.len();
        if k == 0 || k > n {
            return Err(BetheError::Invalid(format!("need 0 < k ≤ n, got k = {k}, n = {n}")));
        }
        for i in 0..n {
            for j in 0..i {
                if rel_dist(a[i], a[j]) < 1e-12 {
                    return Err(BetheError::Invalid(format!("a_{j} = a_{i}")));
                }
            }
        }
        if hbar.norm() < 1e-12 || (1..=4).any(|m| (hbar.powi(m) - 1.0).norm() < 1e-12) {
            return Err(BetheError::Invalid("ħ is zero or a root of unity of order ≤ 4".into()));
        }
        Ok(GrassmannianData {
            k,
            a,
            hbar,
            z,
            hbar_half: hbar.sqrt(),
        })
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// `z ħ^{−n/2}`.
    pub fn twist(&self) -> C64 {
        self.z * self.hbar_half.powi(-(self.n() as i32))
    }

    /// Every parameter raised to the `p`-th power; the `ħ^{1/2}` branch is
    /// powered along so the twist is the `p`-th power of the base twist.
    pub fn powered(&self, p: u32) -> Self {
        GrassmannianData {
            k: self.k,
            a: self.a.iter().map(|a| a.powu(p)).collect(),
            hbar: self.hbar.powu(p),
            z: self.z.powu(p),
            hbar_half: self.hbar_half.powu(p),
        }
    }

    pub fn with_z(&self, z: C64) -> Self {
        GrassmannianData { z, ..self.clone() }
    }

    /// Yang-Yang data with the matching `ħ^{1/2}` sign.
    pub fn yang_yang(&self) -> YangYangData {
        let mut d = YangYangData::new(self.k, self.a.clone(), self.hbar, self.z);
        if (self.hbar_half + self.hbar.sqrt()).norm() < (self.hbar_half - self.hbar.sqrt()).norm() {
            d.sqrt_sign = -1.0;
        }
        d
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetheSolution {
    pub roots: Vec<C64>,
    pub residual_norm: f64,
    /// Index of the homotopy path (the `k`-subset in lexicographic order).
    pub path_id: Option<usize>,
    pub eigenvalue: C64,
}

impl BetheSolution {
    fn new(roots: Vec<C64>, data: &GrassmannianData, path_id: Option<usize>) -> Result<Self, BetheError> {
        let r = bethe_residual(&roots, data)?;
        let residual_norm = r.iter().map(|c| c.norm()).fold(0.0, f64::max);
        Ok(BetheSolution {
            eigenvalue: roots.iter().product(),
            roots,
            residual_norm,
            path_id,
        })
    }
}

pub fn bethe_residual(x: &[C64], data: &GrassmannianData) -> Result<Vec<C64>, BetheError> {
    if x.len() != data.k {
        return Err(BetheError::Invalid("root vector length differs from k".into()));
    }
    let h = data.hbar;
    let twist = data.twist();
    let mut out = Vec::with_capacity(x.len());
    for (m, &xm) in x.iter().enumerate() {
        let mut v = C64::new(1.0, 0.0);
        for &aj in &data.a {
            let den = aj - h * xm;
            if den.norm() == 0.0 {
                return Err(BetheError::Pole(m));
            }
            v *= (xm - aj) / den;
        }
        for (i, &xi) in x.iter().enumerate() {
            if i == m {
                continue;
            }
            let den = h * xi - xm;
            if den.norm() == 0.0 {
                return Err(BetheError::Pole(m));
            }
            v *= (xi - h * xm) / den;
        }
        out.push(v - twist);
    }
    Ok(out)
}

/// Residual of the system with every `x`, `a`, `ħ`, `z` raised to the `p`-th
/// power.
pub fn powered_residual(x: &[C64], data: &GrassmannianData, p: u32) -> Result<Vec<C64>, BetheError> {
    let xp: Vec<C64> = x.iter().map(|v| v.powu(p)).collect();
    bethe_residual(&xp, &data.powered(p))
}

/// `f = c0 + Σ coef_i x_i`.
#[derive(Debug, Clone)]
struct Linear {
    c0: C64,
    coef: Vec<(usize, C64)>,
}

impl Linear {
    fn eval(&self, x: &[C64]) -> C64 {
        self.coef.iter().fold(self.c0, |acc, (i, c)| acc + c * x[*i])
    }

    fn d(&self, v: usize) -> C64 {
        self.coef.iter().filter(|(i, _)| *i == v).map(|(_, c)| *c).sum()
    }
}

/// Cleared system `F_m = Π A − c Π B` with `c` the twist.
struct ClearedSystem {
    k: usize,
    num: Vec<Vec<Linear>>,
    den: Vec<Vec<Linear>>,
}

impl ClearedSystem {
    fn new(data: &GrassmannianData) -> Self {
        let (k, h) = (data.k, data.hbar);
        let one = C64::new(1.0, 0.0);
        let lin = |c0: C64, coef: Vec<(usize, C64)>| Linear { c0, coef };
        let mut num = Vec::with_capacity(k);
        let mut den = Vec::with_capacity(k);
        for m in 0..k {
            let mut a = Vec::new();
            let mut b = Vec::new();
            for &aj in &data.a {
                a.push(lin(-aj, vec![(m, one)]));
                b.push(lin(aj, vec![(m, -h)]));
            }
            for i in (0..k).filter(|&i| i != m) {
                a.push(lin(C64::new(0.0, 0.0), vec![(i, one), (m, -h)]));
                b.push(lin(C64::new(0.0, 0.0), vec![(i, h), (m, -one)]));
            }
            num.push(a);
            den.push(b);
        }
        ClearedSystem { k, num, den }
    }

    fn prod_and_grad(factors: &[Linear], x: &[C64]) -> (C64, Vec<C64>) {
        let vals: Vec<C64> = factors.iter().map(|f| f.eval(x)).collect();
        let value = vals.iter().product();
        let grad = (0..x.len())
            .map(|v| {
                (0..factors.len())
                    .map(|r| {
                        let dr = factors[r].d(v);
                        if dr.norm() == 0.0 {
                            return C64::new(0.0, 0.0);
                        }
                        let rest: C64 = vals.iter().enumerate().filter(|(s, _)| *s != r).map(|(_, f)| f).product();
                        dr * rest
                    })
                    .sum()
            })
            .collect();
        (value, grad)
    }

    /// Returns `F(x)`, `∂F/∂x`, and `Π B` (the coefficient of `−c`).
    fn eval(&self, x: &[C64], c: C64) -> (DVector<C64>, DMatrix<C64>, DVector<C64>) {
        let k = self.k;
        let mut f = DVector::zeros(k);
        let mut j = DMatrix::zeros(k, k);
        let mut dc = DVector::zeros(k);
        for m in 0..k {
            let (pa, ga) = Self::prod_and_grad(&self.num[m], x);
            let (pb, gb) = Self::prod_and_grad(&self.den[m], x);
            f[m] = pa - c * pb;
            dc[m] = pb;
            for v in 0..k {
                j[(m, v)] = ga[v] - c * gb[v];
            }
        }
        (f, j, dc)
    }

    fn newton(&self, x: &mut [C64], c: C64, iters: usize, tol: f64) -> bool {
        for _ in 0..iters {
            let (f, j, _) = self.eval(x, c);
            let Some(dx) = j.lu().solve(&f) else {
                return false;
            };
            let scale = x.iter().map(|v| v.norm()).fold(1.0, f64::max);
            for (xi, d) in x.iter_mut().zip(dx.iter()) {
                *xi -= d;
            }
            if dx.norm() <= tol * scale {
                return true;
            }
        }
        false
    }
}

/// Coefficients (low → high) of `Π_j (x − a_j) − c Π_j (a_j − ħ x)`.
pub fn cleared_polynomial_k1(data: &GrassmannianData) -> Vec<C64> {
    let n = data.n();
    let c = data.twist();
    let mut pa = vec![C64::new(1.0, 0.0)];
    let mut pb = vec![C64::new(1.0, 0.0)];
    for &aj in &data.a {
        pa = mul_linear(&pa, -aj, C64::new(1.0, 0.0));
        pb = mul_linear(&pb, aj, -data.hbar);
    }
    (0..=n).map(|i| pa[i] - c * pb[i]).collect()
}

fn mul_linear(p: &[C64], c0: C64, c1: C64) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); p.len() + 1];
    for (i, v) in p.iter().enumerate() {
        out[i] += v * c0;
        out[i + 1] += v * c1;
    }
    out
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Tracks one path `z(t) = t z` from the subset start point.
fn track(sys: &ClearedSystem, data: &GrassmannianData, start: &[usize], path: usize) -> Result<Vec<C64>, BetheError> {
    let c_target = data.twist();
    let mut x: Vec<C64> = start.iter().map(|&j| data.a[j]).collect();
    let mut t = 0.0;
    let mut dt: f64 = 0.05;
    while t < 1.0 {
        let step = dt.min(1.0 - t);
        // Euler predictor: J dx/dt = c' ΠB
        let (_, j, dc) = sys.eval(&x, c_target * t);
        let rhs = dc * c_target;
        let Some(dxdt) = j.lu().solve(&rhs) else {
            return Err(BetheError::PathFailure { path, t });
        };
        let mut trial: Vec<C64> = x.iter().zip(dxdt.iter()).map(|(xi, d)| xi + d * step).collect();
        let scale = x.iter().map(|v| v.norm()).fold(1.0, f64::max);
        let converged = sys.newton(&mut trial, c_target * (t + step), 6, 1e-12);
        let jump = trial.iter().zip(&x).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        if converged && jump < 0.25 * scale {
            x = trial;
            t += step;
            dt = (dt * 1.5).min(0.1);
        } else {
            dt *= 0.5;
            if dt < MIN_STEP {
                return Err(BetheError::PathFailure { path, t });
            }
        }
    }
    sys.newton(&mut x, c_target, 10, 1e-15);
    Ok(x)
}

fn check_collisions(x: &[C64], path: usize) -> Result<(), BetheError> {
    for i in 0..x.len() {
        for j in 0..i {
            if (x[i] - x[j]).norm() < COLLISION_TOL {
                return Err(BetheError::Collision { path, i: j, j: i });
            }
        }
    }
    Ok(())
}

/// All solutions; `n` of them for `k = 1` and `C(n, k)` otherwise, each with
/// residual at most `1e-10`.
pub fn solve_bethe(data: &GrassmannianData) -> Result<Vec<BetheSolution>, BetheError> {
    let n = data.n();
    let mut sols = Vec::new();
    if data.k == 1 {
        let coeffs = cleared_polynomial_k1(data);
        if coeffs[n].norm() < 1e-14 {
            return Err(BetheError::WrongCount { expected: n, found: n - 1 });
        }
        for r in poly_roots(&coeffs)? {
            sols.push(BetheSolution::new(vec![r], data, None)?);
        }
    } else {
        let sys = ClearedSystem::new(data);
        for (path, start) in subsets(n, data.k).iter().enumerate() {
            let x = track(&sys, data, start, path)?;
            check_collisions(&x, path)?;
            sols.push(BetheSolution::new(x, data, Some(path))?);
        }
    }
    let expected = if data.k == 1 { n } else { binom(n, data.k) };
    // distinct as unordered root sets
    let mut distinct = 0;
    for (i, s) in sols.iter().enumerate() {
        let dup = sols[..i].iter().any(|t| {
            match_multisets(&s.roots, &t.roots).is_some_and(|m| m.max_rel < COLLISION_TOL)
        });
        if !dup {
            distinct += 1;
        }
    }
    if distinct != expected {
        return Err(BetheError::WrongCount { expected, found: distinct });
    }
    if let Some(bad) = sols.iter().find(|s| s.residual_norm > RESIDUAL_TOL) {
        return Err(BetheError::Residual(bad.residual_norm));
    }
    Ok(sols)
}

/// The `T*P¹` difference-operator model matching `k = 1`, `n = 2` data:
/// its `ħ` is the chosen `ħ^{1/2}` of the Bethe data.
pub fn matching_qde_model(data: &GrassmannianData) -> Result<QdeModel<C64>, BetheError> {
    if data.k != 1 || data.n() != 2 {
        return Err(BetheError::Invalid("need k = 1, n = 2".into()));
    }
    QdeModel::new(ModelKind::Tpp1, data.a[0], data.a[1], data.hbar_half)
        .map_err(|e| BetheError::Invalid(e.to_string()))
}

/// Max relative distance between the Bethe eigenvalues and the eigenvalues
/// of `M(z)` at `q = 1`.
pub fn qde_spectrum_match(data: &GrassmannianData) -> Result<f64, BetheError> {
    let model = matching_qde_model(data)?;
    let m = model
        .matrix_at(&data.z, &C64::new(1.0, 0.0))
        .ok_or_else(|| BetheError::Invalid("z at a pole of M".into()))?;
    let ev = eigenvalues(&m)?;
    let lam: Vec<C64> = solve_bethe(data)?.iter().map(|s| s.eigenvalue).collect();
    Ok(match_multisets(&ev, &lam).expect("equal lengths").max_rel)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub p: u64,
    pub bethe: Vec<C64>,
    pub product: Vec<C64>,
    /// Pairing distance between the powered Bethe spectrum and the product
    /// spectrum at `ζ_p`.
    pub max_rel: f64,
    /// Distance between the product spectra at `ζ_p` and `ζ_p²` (`p ≥ 3`).
    pub root_independence: Option<f64>,
}

/// Compares `{λ_i(z^p, a^p, ħ^p)}` with the spectrum of the iterated product
/// at `ζ_p`; errors if the pairing exceeds `tol`.
pub fn spectrum_frobenius_check(data: &GrassmannianData, p: u64, tol: f64) -> Result<SpectrumReport, BetheError> {
    let model = matching_qde_model(data)?;
    let spectrum = |k: u64| -> Result<Vec<C64>, BetheError> {
        let prod = iterated_product_at(&model, &data.z, &root_of_unity(p, k), p, ProductOrder::Ascending)
            .ok_or_else(|| BetheError::Invalid("z at a pole of the product".into()))?;
        Ok(eigenvalues(&prod)?)
    };
    let product = spectrum(1)?;
    let bethe: Vec<C64> = solve_bethe(&data.powered(p as u32))?.iter().map(|s| s.eigenvalue).collect();
    let max_rel = match_multisets(&product, &bethe).expect("equal lengths").max_rel;
    let root_independence = if p >= 3 {
        Some(match_multisets(&product, &spectrum(2)?).expect("equal lengths").max_rel)
    } else {
        None
    };
    if max_rel > tol {
        return Err(BetheError::PairingFailure { max_rel, tol });
    }
    Ok(SpectrumReport {
        p,
        bethe,
        product,
        max_rel,
        root_independence,
    })
}
