//! CARMA(p, q) model algebra.
//!
//! The autoregressive polynomial is `a(z) = z^p + a_1 z^{p-1} + ... + a_p`
//! and the moving-average polynomial is `b(z) = b_0 + b_1 z + ... + b_q z^q`
//! with `b_q = 1`. Every closed form in this module is a residue sum over
//! the (simple) zeros `lambda_r` of `a`, evaluated in complex arithmetic and
//! made real at the output boundary.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly;

/// Autoregressive roots closer than this are treated as repeated.
pub const MULTIPLE_ROOT_TOL: f64 = 1e-9;
/// Size of the perturbation applied by [`RootPolicy::Separate`].
pub const ROOT_SEPARATION: f64 = 1e-6;
const REALNESS_TOL: f64 = 1e-10;

/// What the constructor does with repeated autoregressive roots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RootPolicy {
    /// Keep the roots as found. Residue-based operations then fail with
    /// [`Error::NearMultipleRoots`].
    #[default]
    Keep,
    /// Split each cluster of coincident roots by multiples of
    /// [`ROOT_SEPARATION`]: real clusters along the imaginary axis as
    /// conjugate pairs, complex clusters along the real axis (mirrored in the
    /// conjugate cluster). The coefficients `a_i` are recomputed from the
    /// separated roots.
    Separate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CarmaModel {
    ar: Vec<f64>,
    ma: Vec<f64>,
    sigma2: f64,
    ar_roots: Vec<Complex64>,
    ma_roots: Vec<Complex64>,
}

impl CarmaModel {
    /// Builds a model from `a_1..a_p`, `b_0..b_q` and `Var(L_1)`.
    pub fn new(ar: &[f64], ma: &[f64], sigma2: f64) -> Result<Self> {
        Self::with_policy(ar, ma, sigma2, RootPolicy::Keep)
    }

    pub fn with_policy(ar: &[f64], ma: &[f64], sigma2: f64, policy: RootPolicy) -> Result<Self> {
        let p = ar.len();
        if p == 0 {
            return Err(Error::InvalidModel("autoregressive order p must be positive".into()));
        }
        if ma.is_empty() {
            return Err(Error::InvalidModel("b must hold b_0..b_q (at least one entry)".into()));
        }
        let q = ma.len() - 1;
        if q >= p {
            return Err(Error::InvalidModel(format!("need q < p, got p = {p}, q = {q}")));
        }
        if (ma[q] - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidModel(format!("b_q must equal 1, got {}", ma[q])));
        }
        if ar.iter().chain(ma).any(|c| !c.is_finite()) {
            return Err(Error::InvalidModel("coefficients must be finite".into()));
        }
        let ar_roots = poly::roots_real(&ascending_ar(ar));
        let ma_roots = poly::roots_real(ma);
        Self::assemble(ar_roots, ma_roots, sigma2, policy)
    }

    /// Builds a model from its autoregressive and moving-average zeros.
    /// Both sets must be closed under conjugation.
    pub fn from_roots(ar_roots: &[Complex64], ma_roots: &[Complex64], sigma2: f64) -> Result<Self> {
        Self::from_roots_with_policy(ar_roots, ma_roots, sigma2, RootPolicy::Keep)
    }

    pub fn from_roots_with_policy(
        ar_roots: &[Complex64],
        ma_roots: &[Complex64],
        sigma2: f64,
        policy: RootPolicy,
    ) -> Result<Self> {
        if ar_roots.is_empty() {
            return Err(Error::InvalidModel("autoregressive order p must be positive".into()));
        }
        if ma_roots.len() >= ar_roots.len() {
            return Err(Error::InvalidModel(format!(
                "need q < p, got p = {}, q = {}",
                ar_roots.len(),
                ma_roots.len()
            )));
        }
        let mut ar_roots = ar_roots.to_vec();
        let mut ma_roots = ma_roots.to_vec();
        poly::sort_roots(&mut ar_roots);
        poly::sort_roots(&mut ma_roots);
        Self::assemble(ar_roots, ma_roots, sigma2, policy)
    }

    fn assemble(
        mut ar_roots: Vec<Complex64>,
        ma_roots: Vec<Complex64>,
        sigma2: f64,
        policy: RootPolicy,
    ) -> Result<Self> {
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::InvalidModel(format!("sigma2 must be positive, got {sigma2}")));
        }
        if policy == RootPolicy::Separate {
            ar_roots = separate_clusters(&ar_roots);
            poly::sort_roots(&mut ar_roots);
        }
        if let Some(r) = ar_roots.iter().find(|r| !(r.re < 0.0)) {
            return Err(Error::InvalidModel(format!(
                "autoregressive zero {r} is not in the open left half-plane"
            )));
        }
        if let Some(r) = ma_roots.iter().find(|r| !(r.re < 0.0)) {
            return Err(Error::InvalidModel(format!(
                "moving-average zero {r} is not in the open left half-plane (minimum phase)"
            )));
        }
        for l in &ar_roots {
            for m in &ma_roots {
                if (l - m).norm() <= MULTIPLE_ROOT_TOL {
                    return Err(Error::InvalidModel(format!("a(z) and b(z) share the zero {l}")));
                }
            }
        }
        let (a_asc, im_a) = poly::real_parts(&poly::from_roots(&ar_roots));
        let (b_asc, im_b) = poly::real_parts(&poly::from_roots(&ma_roots));
        if im_a > 1e-8 * (1.0 + a_asc.iter().map(|c| c.abs()).fold(0.0, f64::max))
            || im_b > 1e-8 * (1.0 + b_asc.iter().map(|c| c.abs()).fold(0.0, f64::max))
        {
            return Err(Error::InvalidModel("roots are not closed under conjugation".into()));
        }
        let p = ar_roots.len();
        let ar: Vec<f64> = (1..=p).map(|i| a_asc[p - i]).collect();
        Ok(Self {
            ar,
            ma: b_asc,
            sigma2,
            ar_roots,
            ma_roots,
        })
    }

    /// Ornstein–Uhlenbeck process `dY = lambda Y dt + dL`, `lambda < 0`.
    pub fn ornstein_uhlenbeck(lambda: f64, sigma2: f64) -> Result<Self> {
        Self::new(&[-lambda], &[1.0], sigma2)
    }

    pub fn p(&self) -> usize {
        self.ar.len()
    }

    pub fn q(&self) -> usize {
        self.ma.len() - 1
    }

    /// `a_1..a_p`.
    pub fn ar(&self) -> &[f64] {
        &self.ar
    }

    /// `b_0..b_q`.
    pub fn ma(&self) -> &[f64] {
        &self.ma
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// Zeros of `a`, sorted by `(re, im)`.
    pub fn ar_roots(&self) -> &[Complex64] {
        &self.ar_roots
    }

    /// Zeros of `b`, sorted by `(re, im)`.
    pub fn ma_roots(&self) -> &[Complex64] {
        &self.ma_roots
    }

    pub fn a_poly(&self, z: Complex64) -> Complex64 {
        poly::eval_real(&ascending_ar(&self.ar), z)
    }

    pub fn b_poly(&self, z: Complex64) -> Complex64 {
        poly::eval_real(&self.ma, z)
    }

    /// Fails when two autoregressive roots are closer than [`MULTIPLE_ROOT_TOL`].
    pub fn check_distinct_roots(&self) -> Result<()> {
        let roots = &self.ar_roots;
        for i in 0..roots.len() {
            for j in (i + 1)..roots.len() {
                if (roots[i] - roots[j]).norm() < MULTIPLE_ROOT_TOL {
                    return Err(Error::NearMultipleRoots(i, j, MULTIPLE_ROOT_TOL));
                }
            }
        }
        Ok(())
    }

    /// `a'(lambda_r) = prod_{m != r} (lambda_r - lambda_m)`.
    fn a_prime_at_root(&self, r: usize) -> Complex64 {
        let lr = self.ar_roots[r];
        self.ar_roots
            .iter()
            .enumerate()
            .filter(|&(m, _)| m != r)
            .fold(Complex64::new(1.0, 0.0), |acc, (_, &lm)| acc * (lr - lm))
    }

    /// Kernel residues `b(lambda_r) / a'(lambda_r)`.
    pub fn kernel_residues(&self) -> Result<Vec<Complex64>> {
        self.check_distinct_roots()?;
        Ok((0..self.p())
            .map(|r| self.b_poly(self.ar_roots[r]) / self.a_prime_at_root(r))
            .collect())
    }

    /// `g(t) = sum_r b(lambda_r)/a'(lambda_r) e^{lambda_r t}` for `t > 0`, zero otherwise.
    pub fn kernel(&self, t: f64) -> Result<f64> {
        let residues = self.kernel_residues()?;
        if t <= 0.0 {
            return Ok(0.0);
        }
        Ok(realize(
            residues
                .iter()
                .zip(&self.ar_roots)
                .map(|(c, l)| c * (l * t).exp())
                .sum(),
        ))
    }

    /// `sigma^2 |b(i w)|^2 / (2 pi |a(i w)|^2)`.
    pub fn spectral_density(&self, omega: f64) -> f64 {
        let iw = Complex64::new(0.0, omega);
        self.sigma2 * self.b_poly(iw).norm_sqr() / (2.0 * PI * self.a_poly(iw).norm_sqr())
    }

    /// `gamma(h) = sigma^2 int_0^inf g(u) g(u + |h|) du` in closed form.
    pub fn autocovariance(&self, h: f64) -> Result<f64> {
        let c = self.kernel_residues()?;
        let h = h.abs();
        let mut acc = Complex64::new(0.0, 0.0);
        for (r, lr) in self.ar_roots.iter().enumerate() {
            let mut inner = Complex64::new(0.0, 0.0);
            for (s, ls) in self.ar_roots.iter().enumerate() {
                inner += c[s] / (-lr - ls);
            }
            acc += c[r] * inner * (lr * h).exp();
        }
        Ok(self.sigma2 * realize(acc))
    }

    /// `gamma(k delta)` for `k = 0..=max_lag`.
    pub fn sampled_autocovariance(&self, delta: f64, max_lag: usize) -> Result<Vec<f64>> {
        check_delta(delta)?;
        (0..=max_lag).map(|k| self.autocovariance(k as f64 * delta)).collect()
    }

    /// Spectral density of the sampled sequence `Y_{n delta}` on `[-pi, pi]`,
    /// as `-sigma^2/(2 pi)` times the sum of the left-half-plane residues of
    /// `b(z)b(-z)/(a(z)a(-z)) * sinh(delta z)/(cosh(delta z) - cos w)`.
    pub fn sampled_spectral_density(&self, delta: f64, omega: f64) -> Result<f64> {
        check_delta(delta)?;
        if !(omega.abs() <= PI) {
            return Err(Error::DomainError(format!("omega = {omega} outside [-pi, pi]")));
        }
        self.check_distinct_roots()?;
        let cos_w = omega.cos();
        let mut acc = Complex64::new(0.0, 0.0);
        for (r, &l) in self.ar_roots.iter().enumerate() {
            let residue = self.b_poly(l) * self.b_poly(-l) / (self.a_prime_at_root(r) * self.a_poly(-l));
            let x = l * delta;
            acc += residue * x.sinh() / (x.cosh() - cos_w);
        }
        Ok(-self.sigma2 / (2.0 * PI) * realize(acc))
    }

    /// Coefficients `c_1..c_p` of `phi(z) = prod_j (1 - e^{lambda_j delta} z) = 1 + c_1 z + ... + c_p z^p`.
    pub fn sampled_ar_polynomial(&self, delta: f64) -> Result<Vec<f64>> {
        check_delta(delta)?;
        // prod (1 - w z) = prod(-w) * prod (z - 1/w); expand in reversed form instead.
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for l in &self.ar_roots {
            let w = (l * delta).exp();
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (k, &ck) in c.iter().enumerate() {
                next[k] += ck;
                next[k + 1] -= ck * w;
            }
            c = next;
        }
        let (coeffs, max_im) = poly::real_parts(&c);
        debug_assert!(max_im < 1e-12, "imaginary residue {max_im}");
        Ok(coeffs[1..].to_vec())
    }
}

/// Ascending coefficients `[a_p, ..., a_1, 1]` of `a(z)`.
fn ascending_ar(ar: &[f64]) -> Vec<f64> {
    let mut c: Vec<f64> = ar.iter().rev().copied().collect();
    c.push(1.0);
    c
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(Error::DomainError(format!("delta must be positive, got {delta}")))
    }
}

/// Real part of a conjugate-symmetric sum; the imaginary residue must be
/// negligible.
pub(crate) fn realize(z: Complex64) -> f64 {
    debug_assert!(
        z.im.abs() <= REALNESS_TOL * (1.0 + z.re.abs()),
        "imaginary residue {} on {}",
        z.im,
        z.re
    );
    z.re
}

fn separate_clusters(roots: &[Complex64]) -> Vec<Complex64> {
    let n = roots.len();
    let mut cluster_of = vec![usize::MAX; n];
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if cluster_of[i] != usize::MAX {
            continue;
        }
        let id = clusters.len();
        let mut members = vec![i];
        cluster_of[i] = id;
        for j in (i + 1)..n {
            if cluster_of[j] == usize::MAX && (roots[i] - roots[j]).norm() < MULTIPLE_ROOT_TOL {
                cluster_of[j] = id;
                members.push(j);
            }
        }
        clusters.push(members);
    }
    let mut out = Vec::with_capacity(n);
    for members in clusters {
        let m = members.len();
        let centre = members.iter().map(|&i| roots[i]).sum::<Complex64>() / m as f64;
        if m == 1 {
            out.push(roots[members[0]]);
        } else if centre.im.abs() < MULTIPLE_ROOT_TOL {
            let re = centre.re;
            if m % 2 == 1 {
                out.push(Complex64::new(re, 0.0));
            }
            for k in 1..=(m / 2) {
                let d = k as f64 * ROOT_SEPARATION;
                out.push(Complex64::new(re, d));
                out.push(Complex64::new(re, -d));
            }
        } else {
            // The conjugate cluster receives the mirrored offsets.
            let sign = centre.im.signum();
            for k in 0..m {
                let offset = (k as f64 - (m as f64 - 1.0) / 2.0) * ROOT_SEPARATION;
                out.push(Complex64::new(centre.re + offset, sign * centre.im.abs()));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_invalid_models() {
        assert!(CarmaModel::new(&[], &[1.0], 1.0).is_err());
        assert!(CarmaModel::new(&[1.0], &[0.5, 1.0], 1.0).is_err(), "q >= p");
        assert!(CarmaModel::new(&[3.0, 2.0], &[0.5, 2.0], 1.0).is_err(), "b_q != 1");
        assert!(CarmaModel::new(&[-1.0], &[1.0], 1.0).is_err(), "non-causal");
        assert!(
            CarmaModel::new(&[3.0, 2.0], &[-0.5, 1.0], 1.0).is_err(),
            "non-minimum-phase"
        );
        assert!(
            CarmaModel::new(&[3.0, 2.0], &[1.0, 1.0], 1.0).is_err(),
            "common zero at -1"
        );
        assert!(CarmaModel::new(&[1.0], &[1.0], 0.0).is_err());
    }

    #[test]
    fn ou_kernel() {
        let m = CarmaModel::new(&[1.0], &[1.0], 1.0).unwrap();
        assert_relative_eq!(m.kernel(1.0).unwrap(), (-1.0f64).exp(), max_relative = 1e-15);
        assert_eq!(m.kernel(-0.5).unwrap(), 0.0);
        assert_eq!(m.kernel(0.0).unwrap(), 0.0);
    }

    #[test]
    fn nearly_repeated_roots_approach_gamma_kernel() {
        // a(z) = (z+1)^2 + 1e-6
        let m = CarmaModel::new(&[2.0, 1.0 + 1e-6], &[1.0], 1.0).unwrap();
        let t = 2.0;
        assert_abs_diff_eq!(m.kernel(t).unwrap(), t * (-t).exp(), epsilon = 1e-4);
    }

    #[test]
    fn repeated_roots_error_unless_separated() {
        let m = CarmaModel::new(&[2.0, 1.0], &[1.0], 1.0).unwrap();
        assert!(matches!(m.kernel(1.0), Err(Error::NearMultipleRoots(..))));
        assert!(matches!(m.autocovariance(0.0), Err(Error::NearMultipleRoots(..))));

        let s = CarmaModel::with_policy(&[2.0, 1.0], &[1.0], 1.0, RootPolicy::Separate).unwrap();
        assert_abs_diff_eq!(s.ar_roots()[1].im, ROOT_SEPARATION, epsilon = 1e-15);
        assert_abs_diff_eq!(s.kernel(2.0).unwrap(), 2.0 * (-2.0f64).exp(), epsilon = 1e-8);
    }

    #[test]
    fn separated_complex_cluster_stays_conjugate() {
        let l = c(-1.0, 2.0);
        let roots = [l, l, l.conj(), l.conj()];
        let m = CarmaModel::from_roots_with_policy(&roots, &[], 1.0, RootPolicy::Separate).unwrap();
        m.check_distinct_roots().unwrap();
        assert!(m.kernel(0.7).unwrap().is_finite());
    }

    #[test]
    fn ou_spectral_density() {
        let m = CarmaModel::new(&[1.0], &[1.0], 1.0).unwrap();
        assert_relative_eq!(m.spectral_density(0.0), 1.0 / (2.0 * PI), max_relative = 1e-15);
        assert_relative_eq!(m.spectral_density(1.0), 1.0 / (4.0 * PI), max_relative = 1e-15);
    }

    #[test]
    fn ou_autocovariance() {
        let m = CarmaModel::new(&[1.0], &[1.0], 1.0).unwrap();
        assert_relative_eq!(m.autocovariance(0.0).unwrap(), 0.5, max_relative = 1e-15);
        assert_relative_eq!(
            m.autocovariance(1.0).unwrap(),
            (-1.0f64).exp() / 2.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn ou_sampled_density_matches_ar1() {
        let m = CarmaModel::new(&[1.0], &[1.0], 1.0).unwrap();
        let delta: f64 = 0.25;
        let phi = (-delta).exp();
        let noise = (1.0 - phi * phi) / 2.0;
        for &w in &[0.0, 0.3, PI / 2.0, PI] {
            let ar1 = noise / (2.0 * PI * (1.0 - 2.0 * phi * w.cos() + phi * phi));
            assert_relative_eq!(m.sampled_spectral_density(delta, w).unwrap(), ar1, max_relative = 1e-13);
        }
        assert!(m.sampled_spectral_density(delta, 4.0).is_err());
    }

    #[test]
    fn sampled_ar_polynomial_examples() {
        let m = CarmaModel::new(&[1.0], &[1.0], 1.0).unwrap();
        let c1 = m.sampled_ar_polynomial(0.25).unwrap();
        assert_relative_eq!(c1[0], -(-0.25f64).exp(), max_relative = 1e-15);

        let m2 = CarmaModel::from_roots(&[c(-1.0, 0.0), c(-2.0, 0.0)], &[], 1.0).unwrap();
        let c2 = m2.sampled_ar_polynomial(0.5).unwrap();
        assert_relative_eq!(c2[0], -((-0.5f64).exp() + (-1.0f64).exp()), max_relative = 1e-15);
        assert_relative_eq!(c2[1], (-1.5f64).exp(), max_relative = 1e-15);
    }

    #[test]
    fn sampled_ar_polynomial_is_real_for_complex_roots() {
        let m = CarmaModel::from_roots(&[c(-0.5, 3.0), c(-0.5, -3.0), c(-1.0, 0.0)], &[c(-2.0, 0.0)], 1.0).unwrap();
        let coeffs = m.sampled_ar_polynomial(0.1).unwrap();
        assert_eq!(coeffs.len(), 3);
        // zeros of phi are e^{-lambda delta}, outside the unit circle
        let mut asc = vec![1.0];
        asc.extend(&coeffs);
        for z in poly::roots_real(&asc) {
            assert!(z.norm() > 1.0);
        }
    }

    #[test]
    fn coefficients_and_roots_agree() {
        let m = CarmaModel::new(&[3.0, 2.0], &[0.5, 1.0], 2.0).unwrap();
        assert_relative_eq!(m.ar_roots()[0].re, -2.0, max_relative = 1e-14);
        assert_relative_eq!(m.ar_roots()[1].re, -1.0, max_relative = 1e-14);
        assert_relative_eq!(m.ma_roots()[0].re, -0.5, max_relative = 1e-14);
        let back = CarmaModel::from_roots(m.ar_roots(), m.ma_roots(), 2.0).unwrap();
        assert_relative_eq!(back.ar()[0], 3.0, max_relative = 1e-14);
        assert_relative_eq!(back.ar()[1], 2.0, max_relative = 1e-14);
    }
}
