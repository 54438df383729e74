//! Double-precision helpers: eigenvalues of small complex matrices,
//! polynomial roots and permutation-invariant multiset matching.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::algebra::Mat;

pub type C64 = Complex64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumericError {
    #[error("Schur iteration did not converge for a {0}×{0} matrix")]
    NoConvergence(usize),
    #[error("eigen solver supports N ≤ 8, got {0}")]
    TooLarge(usize),
}

/// Roots of `a x² + b x + c` (cancellation-safe form); `a ≠ 0`.
pub fn quadratic_roots(a: C64, b: C64, c: C64) -> [C64; 2] {
    let disc = (b * b - 4.0 * a * c).sqrt();
    // pick the sign that avoids cancellation in -b ± disc
    let s = if (b.conj() * disc).re >= 0.0 { -b - disc } else { -b + disc };
    if s.norm() == 0.0 {
        let r = -b / (2.0 * a);
        return [r, r];
    }
    [s / (2.0 * a), 2.0 * c / s]
}

/// Eigenvalues: closed form for `N ≤ 2`, complex Schur (QR) for `N ≤ 8`.
pub fn eigenvalues(m: &Mat<C64>) -> Result<Vec<C64>, NumericError> {
    let n = m.rows();
    match n {
        0 => Ok(vec![]),
        1 => Ok(vec![*m.get(0, 0)]),
        2 => {
            let tr = m.get(0, 0) + m.get(1, 1);
            let det = m.get(0, 0) * m.get(1, 1) - m.get(0, 1) * m.get(1, 0);
            Ok(quadratic_roots(C64::new(1.0, 0.0), -tr, det).to_vec())
        }
        3..=8 => eigenvalues_qr(m),
        _ => Err(NumericError::TooLarge(n)),
    }
}

/// General path through a complex Schur decomposition.
pub fn eigenvalues_qr(m: &Mat<C64>) -> Result<Vec<C64>, NumericError> {
    let n = m.rows();
    let dm = DMatrix::from_fn(n, n, |i, j| *m.get(i, j));
    let schur = nalgebra::linalg::Schur::try_new(dm, 1e-15, 10_000)
        .ok_or(NumericError::NoConvergence(n))?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

/// Roots of `Σ c_k x^k` (highest coefficient nonzero) via companion-matrix
/// eigenvalues followed by Newton polishing.
pub fn poly_roots(coeffs: &[C64]) -> Result<Vec<C64>, NumericError> {
    let deg = coeffs.len() - 1;
    let lead = coeffs[deg];
    let comp = Mat::from_fn(deg, deg, |i, j| {
        if i == 0 {
            -coeffs[deg - 1 - j] / lead
        } else if i == j + 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let raw = if deg <= 2 {
        eigenvalues(&comp)?
    } else {
        let dm = DMatrix::from_fn(deg, deg, |i, j| *comp.get(i, j));
        let schur = nalgebra::linalg::Schur::try_new(dm, 1e-15, 10_000)
            .ok_or(NumericError::NoConvergence(deg))?;
        let (_, t) = schur.unpack();
        (0..deg).map(|i| t[(i, i)]).collect()
    };
    Ok(raw.into_iter().map(|r| newton_polish(coeffs, r)).collect())
}

fn newton_polish(coeffs: &[C64], mut x: C64) -> C64 {
    for _ in 0..8 {
        let (mut f, mut df) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for c in coeffs.iter().rev() {
            df = df * x + f;
            f = f * x + c;
        }
        if df.norm() == 0.0 {
            break;
        }
        let step = f / df;
        x -= step;
        if step.norm() <= 1e-17 * x.norm().max(1.0) {
            break;
        }
    }
    x
}

/// `|x − y| / max(|x|, |y|)`, with 0 for two zeros.
pub fn rel_dist(x: C64, y: C64) -> f64 {
    let scale = x.norm().max(y.norm());
    if scale == 0.0 {
        0.0
    } else {
        (x - y).norm() / scale
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    /// Largest relative distance over matched pairs.
    pub max_rel: f64,
    /// `a[i]` is paired with `b[perm[i]]`.
    pub perm: Vec<usize>,
}

/// Bottleneck assignment between two multisets: minimizes the maximum
/// relative distance over all pairings. Exhaustive for up to 8 elements,
/// greedy on (Re, Im)-sorted inputs beyond that. `None` on length mismatch.
pub fn match_multisets(a: &[C64], b: &[C64]) -> Option<Matching> {
    if a.len() != b.len() {
        return None;
    }
    let n = a.len();
    if n > 8 {
        let sort = |v: &[C64]| {
            let mut idx: Vec<usize> = (0..v.len()).collect();
            idx.sort_by(|&i, &j| {
                v[i].re.total_cmp(&v[j].re).then(v[i].im.total_cmp(&v[j].im))
            });
            idx
        };
        let (ia, ib) = (sort(a), sort(b));
        let mut perm = vec![0; n];
        let mut max_rel: f64 = 0.0;
        for (x, y) in ia.into_iter().zip(ib) {
            perm[x] = y;
            max_rel = max_rel.max(rel_dist(a[x], b[y]));
        }
        return Some(Matching { max_rel, perm });
    }
    let mut best: Option<Matching> = None;
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let cost = perm
            .iter()
            .enumerate()
            .map(|(i, &j)| rel_dist(a[i], b[j]))
            .fold(0.0, f64::max);
        if best.as_ref().is_none_or(|m| cost < m.max_rel) {
            best = Some(Matching {
                max_rel: cost,
                perm: perm.clone(),
            });
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Principal `n`-th root of unity `exp(2πi k/n)`.
pub fn root_of_unity(n: u64, k: u64) -> C64 {
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn quadratic_and_poly_roots() {
        let r = quadratic_roots(c(1.0, 0.0), c(-3.0, 0.0), c(2.0, 0.0));
        let mut v = [r[0].re, r[1].re];
        v.sort_by(f64::total_cmp);
        assert!((v[0] - 1.0).abs() < 1e-15 && (v[1] - 2.0).abs() < 1e-15);
        // (x-1)(x-2)(x-3)(x+i)
        let roots = [c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(0.0, -1.0)];
        let mut coeffs = vec![c(1.0, 0.0)];
        for r in roots {
            let mut next = vec![c(0.0, 0.0); coeffs.len() + 1];
            for (i, a) in coeffs.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * r;
            }
            coeffs = next;
        }
        let found = poly_roots(&coeffs).unwrap();
        assert!(match_multisets(&roots, &found).unwrap().max_rel < 1e-13);
    }

    #[test]
    fn qr_matches_closed_form() {
        let m = Mat::from_rows(vec![
            vec![c(2.0, 1.0), c(0.5, 0.0), c(0.0, 0.0)],
            vec![c(1.0, 0.0), c(-1.0, 0.0), c(0.3, 0.2)],
            vec![c(0.0, 0.0), c(0.7, -0.1), c(0.5, 0.5)],
        ]);
        let ev = eigenvalues(&m).unwrap();
        let tr: C64 = ev.iter().sum();
        assert!((tr - c(1.5, 1.5)).norm() < 1e-12);
        let two = Mat::from_rows(vec![vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(3.0, 0.0), c(4.0, 0.0)]]);
        let a = eigenvalues(&two).unwrap();
        let b = eigenvalues_qr(&two).unwrap();
        assert!(match_multisets(&a, &b).unwrap().max_rel < 1e-13);
    }

    #[test]
    fn matching_is_permutation_invariant() {
        let a = [c(1.0, 0.0), c(2.0, 0.0), c(-1.0, 1.0)];
        let b = [c(-1.0, 1.0), c(1.0, 0.0), c(2.0, 1e-12)];
        let m = match_multisets(&a, &b).unwrap();
        assert_eq!(m.perm, vec![1, 2, 0]);
        assert!(m.max_rel < 1e-11);
        assert!(match_multisets(&a, &b[..2]).is_none());
    }
}
