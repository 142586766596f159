//! Small-`delta` asymptotics of the Wold representation of a sampled CARMA
//! process, and the step-function kernel approximation built from it.
//!
//! The moving-average part of the sampled ARMA equations factorises, to
//! leading order, as `prod_i (1 + eta_i B) prod_k (1 - zeta_k B)` where
//! `eta_i = eta(xi_i)` comes from the zeros `xi_i` of the series coefficient
//! `alpha_{p-q-1}(x)` and `zeta_k = 1 + mu_k delta`. All evaluators here keep
//! the leading term only.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::carma::{realize, CarmaModel};
use crate::error::{Error, Result};
use crate::poly;

/// Largest supported series index `k`.
pub const MAX_ALPHA_ORDER: usize = 12;
const UNIT_BRANCH_TOL: f64 = 1e-12;

/// `alpha_k(x)`, the coefficient of `z^{2k+1}` in `sinh z / (cosh z - 1 + x)`,
/// written as `numerator(x) / x^{k+1}` with an exact rational numerator of
/// degree `k` and leading coefficient `1/(2k+1)!`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaPolynomial {
    pub k: usize,
    /// Ascending coefficients of the numerator.
    pub numerator: Vec<BigRational>,
    /// Zeros `xi_{k,i}` of the numerator, sorted by `(re, im)`.
    pub xi: Vec<Complex64>,
}

impl AlphaPolynomial {
    /// Numerator scaled by `(2k+1)!`, i.e. the monic `prod_i (x - xi_{k,i})`.
    pub fn monic_numerator(&self) -> Vec<BigRational> {
        let f = BigRational::from_integer(factorial(2 * self.k + 1));
        self.numerator.iter().map(|c| c * &f).collect()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let num: Vec<f64> = self.numerator.iter().map(to_f64).collect();
        let n = num.iter().rev().fold(0.0, |acc, c| acc * x + c);
        n / x.powi(self.k as i32 + 1)
    }

    /// `prod_i xi_{k,i}`, real for a real polynomial.
    pub fn root_product(&self) -> f64 {
        realize(self.xi.iter().fold(Complex64::new(1.0, 0.0), |acc, x| acc * x))
    }
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact numerators `P_0..P_kmax` from the series recursion
/// `P_k = x^k/(2k+1)! - sum_{j=1}^k P_{k-j} x^{j-1}/(2j)!`.
fn alpha_numerators(kmax: usize) -> Vec<Vec<BigRational>> {
    let inv_fact = |n: usize| BigRational::new(BigInt::one(), factorial(n));
    let mut out: Vec<Vec<BigRational>> = Vec::with_capacity(kmax + 1);
    for k in 0..=kmax {
        let mut p = vec![BigRational::zero(); k + 1];
        p[k] = inv_fact(2 * k + 1);
        for j in 1..=k {
            let w = inv_fact(2 * j);
            for (i, c) in out[k - j].iter().enumerate() {
                p[i + j - 1] -= c * &w;
            }
        }
        out.push(p);
    }
    out
}

/// `alpha_k` with its zeros. Fails for `k > MAX_ALPHA_ORDER`.
pub fn alpha_polynomial(k: usize) -> Result<AlphaPolynomial> {
    if k > MAX_ALPHA_ORDER {
        return Err(Error::OrderTooLarge(k, MAX_ALPHA_ORDER));
    }
    let numerator = alpha_numerators(k).pop().unwrap();
    let f = BigRational::from_integer(factorial(2 * k + 1));
    let monic: Vec<f64> = numerator.iter().map(|c| to_f64(&(c * &f))).collect();
    let xi = poly::roots_real(&monic);
    Ok(AlphaPolynomial { k, numerator, xi })
}

/// Both branches `xi - 1 +- sqrt((xi-1)^2 - 1)`; their product is 1.
pub fn eta_branches(xi: Complex64) -> (Complex64, Complex64) {
    let u = xi - 1.0;
    let s = (u * u - 1.0).sqrt();
    (u + s, u - s)
}

/// The branch of `eta(xi)` inside the unit disc.
pub fn eta_of_xi(xi: Complex64) -> Result<Complex64> {
    if xi.norm() == 0.0 {
        return Err(Error::DomainError("eta(xi) undefined at xi = 0".into()));
    }
    let (e1, e2) = eta_branches(xi);
    let (small, large) = if e1.norm() <= e2.norm() { (e1, e2) } else { (e2, e1) };
    if (small.norm() - 1.0).abs() <= UNIT_BRANCH_TOL && (large.norm() - 1.0).abs() <= UNIT_BRANCH_TOL {
        return Err(Error::UnitModulusBranch(xi.to_string()));
    }
    if !(small.norm() < 1.0) {
        return Err(Error::UnitModulusBranch(xi.to_string()));
    }
    Ok(small)
}

/// Leading-order factorisation of the moving-average part of the sampled process.
#[derive(Debug, Clone, PartialEq)]
pub struct MaFactorization {
    /// `eta(xi_i)`, `i = 1..p-q-1`.
    pub eta: Vec<Complex64>,
    /// `zeta_k = 1 + mu_k delta`, `k = 1..q`.
    pub zeta: Vec<Complex64>,
    pub sigma2_delta: f64,
}

impl MaFactorization {
    /// Real coefficients `1, c_1, ..., c_{p-1}` of `prod (1 + eta_i B) prod (1 - zeta_k B)`.
    pub fn ma_coefficients(&self) -> Vec<f64> {
        let mut c = vec![Complex64::new(1.0, 0.0)];
        let factors = self.eta.iter().copied().chain(self.zeta.iter().map(|z| -z));
        for f in factors {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (k, &ck) in c.iter().enumerate() {
                next[k] += ck;
                next[k + 1] += ck * f;
            }
            c = next;
        }
        let (coeffs, max_im) = poly::real_parts(&c);
        debug_assert!(max_im < 1e-10, "imaginary residue {max_im}");
        coeffs
    }
}

/// `eta(xi_i)` for the zeros of `alpha_{d-1}`, `d = p - q`.
pub fn eta_values(excess: usize) -> Result<Vec<Complex64>> {
    if excess == 0 {
        return Err(Error::DomainError("p - q must be positive".into()));
    }
    alpha_polynomial(excess - 1)?.xi.into_iter().map(eta_of_xi).collect()
}

fn factorial_f64(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(Error::DomainError(format!("delta must be positive, got {delta}")))
    }
}

pub fn ma_factorization(model: &CarmaModel, delta: f64) -> Result<MaFactorization> {
    check_delta(delta)?;
    let d = model.p() - model.q();
    let eta = eta_values(d)?;
    let zeta: Vec<Complex64> = model.ma_roots().iter().map(|mu| 1.0 + mu * delta).collect();
    let prod = eta.iter().chain(&zeta).fold(Complex64::new(1.0, 0.0), |acc, x| acc * x);
    let a1 = model.ar()[0];
    let sigma2_delta = delta.powi(2 * d as i32 - 1) * (-a1 * delta).exp() * model.sigma2()
        / (factorial_f64(2 * d - 1) * realize(prod));
    Ok(MaFactorization {
        eta,
        zeta,
        sigma2_delta,
    })
}

/// Leading term of the innovation variance of `Y^delta`.
pub fn asymptotic_sigma2_delta(model: &CarmaModel, delta: f64) -> Result<f64> {
    Ok(ma_factorization(model, delta)?.sigma2_delta)
}

/// Leading-order Wold coefficients `psi_0..psi_{j_max}` by partial fractions
/// over the autoregressive roots, rescaled so that `psi_0 = 1`.
pub fn asymptotic_psi(model: &CarmaModel, delta: f64, j_max: usize) -> Result<Vec<f64>> {
    model.check_distinct_roots()?;
    let fact = ma_factorization(model, delta)?;
    let roots = model.ar_roots();
    let weights: Vec<Complex64> = roots
        .iter()
        .enumerate()
        .map(|(r, &lr)| {
            let z = (-lr * delta).exp();
            let num = fact
                .eta
                .iter()
                .fold(Complex64::new(1.0, 0.0), |acc, e| acc * (1.0 + e * z))
                * fact
                    .zeta
                    .iter()
                    .fold(Complex64::new(1.0, 0.0), |acc, c| acc * (1.0 - c * z));
            let den = roots
                .iter()
                .enumerate()
                .filter(|&(m, _)| m != r)
                .fold(Complex64::new(1.0, 0.0), |acc, (_, &lm)| {
                    acc * (1.0 - ((lm - lr) * delta).exp())
                });
            num / den
        })
        .collect();
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::NearMultipleRoots(0, 1, crate::carma::MULTIPLE_ROOT_TOL));
    }
    let steps: Vec<Complex64> = roots.iter().map(|l| (l * delta).exp()).collect();
    let mut powers = vec![Complex64::new(1.0, 0.0); roots.len()];
    let mut psi = Vec::with_capacity(j_max + 1);
    for _ in 0..=j_max {
        let v: Complex64 = weights.iter().zip(&powers).map(|(w, p)| w * p).sum();
        psi.push(v.re);
        for (p, s) in powers.iter_mut().zip(&steps) {
            *p *= s;
        }
    }
    let psi0 = psi[0];
    Ok(psi.into_iter().map(|v| v / psi0).collect())
}

/// Wold coefficients and innovation variance of `Y^delta`, viewed as the
/// step function `g^delta(t) = (sigma_delta / sqrt(delta)) psi_{floor(t/delta)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct WoldApprox {
    pub delta: f64,
    pub psi: Vec<f64>,
    pub sigma2_delta: f64,
}

impl WoldApprox {
    pub fn new(delta: f64, psi: Vec<f64>, sigma2_delta: f64) -> Result<Self> {
        check_delta(delta)?;
        if psi.is_empty() || !(sigma2_delta > 0.0) {
            return Err(Error::DomainError("need psi_0 and a positive sigma2_delta".into()));
        }
        Ok(Self {
            delta,
            psi,
            sigma2_delta,
        })
    }

    /// `sigma_delta / sqrt(delta)`.
    pub fn scale(&self) -> f64 {
        (self.sigma2_delta / self.delta).sqrt()
    }

    /// Last time covered by the coefficients.
    pub fn horizon(&self) -> f64 {
        self.psi.len() as f64 * self.delta
    }

    /// `g^delta(t)`; zero for `t < 0`, `None` past the horizon.
    pub fn eval(&self, t: f64) -> Option<f64> {
        if t < 0.0 {
            return Some(0.0);
        }
        let j = (t / self.delta).floor() as usize;
        self.psi.get(j).map(|p| self.scale() * p)
    }
}

/// Leading-order `g^delta` on `[0, t_max]`.
pub fn wold_kernel_approx(model: &CarmaModel, delta: f64, t_max: f64) -> Result<WoldApprox> {
    check_delta(delta)?;
    if !(t_max > 0.0) {
        return Err(Error::DomainError(format!("t_max must be positive, got {t_max}")));
    }
    let j_max = (t_max / delta).ceil() as usize;
    let psi = asymptotic_psi(model, delta, j_max)?;
    let sigma2_delta = asymptotic_sigma2_delta(model, delta)?;
    WoldApprox::new(delta, psi, sigma2_delta)
}
