//! Complex polynomial helpers: evaluation, expansion from roots and
//! companion-matrix root finding.
//!
//! Coefficient slices are in ascending order, `c[0] + c[1] z + ... + c[n] z^n`.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Horner evaluation of a real polynomial at a complex point.
pub fn eval_real(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

pub fn eval_complex(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn eval_with_derivative(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Ascending coefficients of `prod_i (z - r_i)`.
pub fn from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (k, &ck) in c.iter().enumerate() {
            next[k + 1] += ck;
            next[k] -= ck * r;
        }
        c = next;
    }
    c
}

/// Real parts of `coeffs`, together with the largest discarded imaginary part.
pub fn real_parts(coeffs: &[Complex64]) -> (Vec<f64>, f64) {
    let max_im = coeffs.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    (coeffs.iter().map(|c| c.re).collect(), max_im)
}

/// Deterministic root order: ascending real part, then imaginary part.
pub fn sort_roots(roots: &mut [Complex64]) {
    roots.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });
}

/// Roots of a real polynomial (ascending coefficients, nonzero leading term).
///
/// Eigenvalues of the companion matrix, polished by Newton steps. Clusters
/// that are numerically a single repeated root are merged onto their centre,
/// conjugate pairs are symmetrised, and the result is sorted by
/// `(re, im)`.
pub fn roots_real(coeffs: &[f64]) -> Vec<Complex64> {
    let mut coeffs = coeffs.to_vec();
    while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
        coeffs.pop();
    }
    let n = coeffs.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = coeffs[n];
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    if n == 1 {
        return vec![Complex64::new(-monic[0], 0.0)];
    }

    let mut companion = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        companion[(i, n - 1)] = -monic[i];
    }
    let mut roots: Vec<Complex64> = companion.complex_eigenvalues().iter().copied().collect();

    for r in roots.iter_mut() {
        *r = newton_polish(&monic, *r);
    }
    merge_repeated(&monic, &mut roots);
    symmetrise_conjugates(&mut roots);
    sort_roots(&mut roots);
    roots
}

fn newton_polish(coeffs: &[f64], mut z: Complex64) -> Complex64 {
    let (mut p, _) = eval_with_derivative(coeffs, z);
    for _ in 0..50 {
        let (_, dp) = eval_with_derivative(coeffs, z);
        if dp.norm() == 0.0 || p.norm() == 0.0 {
            break;
        }
        let candidate = z - p / dp;
        let (pc, _) = eval_with_derivative(coeffs, candidate);
        if !(pc.norm() < p.norm()) {
            break;
        }
        z = candidate;
        p = pc;
    }
    z
}

fn coefficient_scale(coeffs: &[f64], z: Complex64) -> f64 {
    let r = z.norm().max(1.0);
    coeffs.iter().enumerate().map(|(k, c)| c.abs() * r.powi(k as i32)).sum()
}

// A pair of computed roots that straddles an exact double root sits about
// sqrt(eps) apart; both the polynomial and its derivative vanish at the
// midpoint to rounding accuracy.
fn merge_repeated(coeffs: &[f64], roots: &mut [Complex64]) {
    let n = roots.len();
    for i in 0..n {
        for j in (i + 1)..n {
            let d = (roots[i] - roots[j]).norm();
            if d > 1e-5 * (1.0 + roots[i].norm()) || d == 0.0 {
                continue;
            }
            let mid = (roots[i] + roots[j]) * 0.5;
            let (p, dp) = eval_with_derivative(coeffs, mid);
            let scale = coefficient_scale(coeffs, mid);
            if p.norm() <= 1e-13 * scale && dp.norm() <= 1e-7 * scale {
                roots[i] = mid;
                roots[j] = mid;
            }
        }
    }
}

fn symmetrise_conjugates(roots: &mut [Complex64]) {
    let n = roots.len();
    let mut paired = vec![false; n];
    for i in 0..n {
        if paired[i] {
            continue;
        }
        let tol = 1e-10 * (1.0 + roots[i].norm());
        if roots[i].im.abs() <= tol {
            roots[i].im = 0.0;
            paired[i] = true;
            continue;
        }
        let target = roots[i].conj();
        let partner = (0..n).filter(|&j| j != i && !paired[j]).min_by(|&a, &b| {
            (roots[a] - target)
                .norm()
                .partial_cmp(&(roots[b] - target).norm())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        if let Some(j) = partner {
            if (roots[j] - target).norm() <= 1e-6 * (1.0 + roots[i].norm()) {
                let re = 0.5 * (roots[i].re + roots[j].re);
                let im = 0.5 * (roots[i].im.abs() + roots[j].im.abs());
                let sign = roots[i].im.signum();
                roots[i] = Complex64::new(re, sign * im);
                roots[j] = Complex64::new(re, -sign * im);
                paired[j] = true;
            }
        }
        paired[i] = true;
    }
}
