//! Sampling asymptotics for CMA processes whose spectral density is
//! regularly varying at infinity, `f_Y(w) = |w|^{-alpha} l(|w|)`.
//!
//! Aliasing folds every frequency `w + 2k pi` onto `w`; as `delta -> 0` the
//! folded sum reduces to the lattice sum
//! `sum_k |w + 2k pi|^{-alpha} = |w|^{-alpha} + (2 pi)^{-alpha} [zeta(alpha, 1 - w/2pi) + zeta(alpha, 1 + w/2pi)]`,
//! called the *bracket* below. `C_alpha` and `S_{p,alpha}` are integrals of
//! the bracket, and Kolmogorov's formula turns a spectral density into a
//! one-step prediction variance.

use std::cell::Cell;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use statrs::function::gamma::gamma;

use crate::carma::CarmaModel;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureConfig};

const TWO_PI: f64 = 2.0 * PI;

// B_2, B_4, ..., B_12
const BERNOULLI: [f64; 6] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
];
const EM_TERMS: usize = 12;

/// Parameters of the Hurwitz zeta function on the supported box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HurwitzParams {
    pub s: f64,
    pub r: f64,
}

impl HurwitzParams {
    pub fn new(s: f64, r: f64) -> Result<Self> {
        if !(s > 1.0 && s <= 64.0) {
            return Err(Error::DomainError(format!(
                "Hurwitz zeta needs 1 < s <= 64, got s = {s}"
            )));
        }
        if !(r > 0.0 && r <= 4.0) {
            return Err(Error::DomainError(format!(
                "Hurwitz zeta needs 0 < r <= 4, got r = {r}"
            )));
        }
        Ok(Self { s, r })
    }
}

/// `zeta(s, r) = sum_{k>=0} (r + k)^{-s}` for `1 < s <= 64`, `0 < r <= 4`.
pub fn hurwitz_zeta(s: f64, r: f64) -> Result<f64> {
    let p = HurwitzParams::new(s, r)?;
    Ok(hurwitz_zeta_em(p.s, p.r))
}

/// Euler–Maclaurin with 12 explicit terms and corrections through `B_12`.
/// Valid for any `s > 1`, `r > 0`.
pub(crate) fn hurwitz_zeta_em(s: f64, r: f64) -> f64 {
    let head: f64 = (0..EM_TERMS).map(|k| (r + k as f64).powf(-s)).sum();
    let a = r + EM_TERMS as f64;
    let mut tail = a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    // rising factorial s (s+1) ... (s+2j-2) / (2j)!
    let mut coeff = s / 2.0;
    let mut power = a.powf(-s - 1.0);
    for (j, b) in BERNOULLI.iter().enumerate() {
        tail += b * coeff * power;
        let m = 2.0 * j as f64 + 2.0;
        coeff *= (s + m - 1.0) * (s + m) / ((m + 1.0) * (m + 2.0));
        power /= a * a;
    }
    head + tail
}

fn check_bracket_args(alpha: f64, omega: f64) -> Result<()> {
    if !(alpha > 1.0 && alpha <= 64.0) {
        return Err(Error::DomainError(format!("need 1 < alpha <= 64, got {alpha}")));
    }
    if omega == 0.0 || !(omega.abs() <= PI) {
        return Err(Error::DomainError(format!(
            "omega must lie in [-pi, pi] \\ {{0}}, got {omega}"
        )));
    }
    Ok(())
}

/// `|w|^{-alpha} + (2 pi)^{-alpha} [zeta(alpha, 1 - w/2pi) + zeta(alpha, 1 + w/2pi)]`.
pub fn aliasing_bracket(alpha: f64, omega: f64) -> Result<f64> {
    check_bracket_args(alpha, omega)?;
    Ok(omega.abs().powf(-alpha) + zeta_pair(alpha, omega) * TWO_PI.powf(-alpha))
}

/// `log` of [`aliasing_bracket`], stable for tiny `|w|` and large `alpha`.
pub fn log_aliasing_bracket(alpha: f64, omega: f64) -> Result<f64> {
    check_bracket_args(alpha, omega)?;
    let w = omega.abs();
    Ok(-alpha * w.ln() + ((w / TWO_PI).powf(alpha) * zeta_pair(alpha, omega)).ln_1p())
}

fn zeta_pair(alpha: f64, omega: f64) -> f64 {
    let x = omega / TWO_PI;
    hurwitz_zeta_em(alpha, 1.0 - x) + hurwitz_zeta_em(alpha, 1.0 + x)
}

/// Truncated lattice sum `sum_{|k|<=k_max} |w + 2k pi|^{-alpha}` plus the
/// exact Hurwitz tail beyond `k_max`. Used as an independent check on the
/// bracket.
pub fn lattice_sum(alpha: f64, omega: f64, k_max: usize) -> f64 {
    let head: f64 = (-(k_max as i64)..=(k_max as i64))
        .map(|k| (omega + TWO_PI * k as f64).abs().powf(-alpha))
        .sum();
    let x = omega / TWO_PI;
    let k1 = k_max as f64 + 1.0;
    head + TWO_PI.powf(-alpha) * (hurwitz_zeta_em(alpha, k1 + x) + hurwitz_zeta_em(alpha, k1 - x))
}

type Density = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A spectral density `f_Y` with its index of regular variation at infinity.
#[derive(Clone)]
pub struct RegVaryingSpectrum {
    pub alpha: f64,
    /// `lim_{w->inf} l(w)` when known.
    pub ell_limit: Option<f64>,
    density: Density,
}

impl fmt::Debug for RegVaryingSpectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RegVaryingSpectrum")
            .field("alpha", &self.alpha)
            .field("ell_limit", &self.ell_limit)
            .finish_non_exhaustive()
    }
}

impl RegVaryingSpectrum {
    pub fn new(
        alpha: f64,
        ell_limit: Option<f64>,
        density: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(alpha > 1.0) {
            return Err(Error::DomainError(format!("index alpha must exceed 1, got {alpha}")));
        }
        Ok(Self {
            alpha,
            ell_limit,
            density: Arc::new(density),
        })
    }

    /// CARMA(p, q): `alpha = 2(p - q)`, `l -> sigma^2 / 2pi`.
    pub fn carma(model: &CarmaModel) -> Self {
        let m = model.clone();
        let alpha = 2.0 * (model.p() - model.q()) as f64;
        Self::new(alpha, Some(model.sigma2() / TWO_PI), move |w| m.spectral_density(w)).unwrap()
    }

    /// FICARMA(p, d, q): `alpha = 2(p + d - q)`.
    pub fn ficarma(model: &CarmaModel, d: f64) -> Result<Self> {
        check_memory(d)?;
        let m = model.clone();
        let alpha = 2.0 * ((model.p() - model.q()) as f64 + d);
        Self::new(alpha, Some(model.sigma2() / TWO_PI), move |w| {
            ficarma_density_unchecked(&m, d, w)
        })
    }

    /// Gamma kernel `t^{nu-1} e^{-lambda t}`: `alpha = 2 nu`, requires `nu > 1/2`.
    pub fn gamma_kernel(nu: f64, lambda: f64, sigma2: f64) -> Result<Self> {
        if !(nu > 0.5 && lambda > 0.0 && sigma2 > 0.0) {
            return Err(Error::DomainError(format!(
                "gamma kernel needs nu > 1/2, lambda > 0, sigma2 > 0 (got {nu}, {lambda}, {sigma2})"
            )));
        }
        let g2 = gamma(nu).powi(2);
        Self::new(2.0 * nu, Some(sigma2 * g2 / TWO_PI), move |w| {
            gamma_spectral_density(nu, lambda, sigma2, w)
        })
    }

    pub fn turbulence(model: TurbulenceSpectrum) -> Result<Self> {
        model.validate()?;
        let limit = match model {
            TurbulenceSpectrum::VonKarman { c, u_bar, .. } => c * u_bar.powf(-2.0 / 3.0),
            TurbulenceSpectrum::Kaimal { v, ell_bar } => 4.0 * v * ell_bar * (6.0 * ell_bar).powf(-5.0 / 3.0),
        };
        Self::new(5.0 / 3.0, Some(limit), move |w| model.density_unchecked(w))
    }

    pub fn density(&self, omega: f64) -> f64 {
        (self.density)(omega)
    }

    /// Slowly varying part `l(x) = f_Y(x) x^alpha`.
    pub fn ell(&self, x: f64) -> f64 {
        self.density(x) * x.powf(self.alpha)
    }
}

/// Leading-order spectral density of `Y^delta`:
/// `l(1/delta) delta^{alpha-1} * bracket(alpha, w)`.
pub fn asymptotic_sampled_density(spec: &RegVaryingSpectrum, delta: f64, omega: f64) -> Result<f64> {
    check_delta(delta)?;
    let bracket = aliasing_bracket(spec.alpha, omega)?;
    Ok(spec.ell(1.0 / delta) * delta.powf(spec.alpha - 1.0) * bracket)
}

/// `f_delta(w) = delta^{-1} sum_k f_Y((w + 2k pi)/delta)`, summed over
/// `|k| <= k_max`. Terms beyond `k_max` are added as a Hurwitz tail with the
/// slowly varying factor frozen at the truncation point.
pub fn sampled_spectral_density_aliasing(
    spec: &RegVaryingSpectrum,
    delta: f64,
    omega: f64,
    k_max: usize,
) -> Result<f64> {
    check_delta(delta)?;
    if !(omega.abs() <= PI) {
        return Err(Error::DomainError(format!("omega = {omega} outside [-pi, pi]")));
    }
    let mut head = 0.0;
    // Sum smallest terms first.
    for k in (1..=k_max).rev() {
        let k = k as f64;
        head += spec.density((omega + TWO_PI * k) / delta) + spec.density((omega - TWO_PI * k) / delta);
    }
    head += spec.density(omega / delta);
    let alpha = spec.alpha;
    let k1 = k_max as f64 + 1.0;
    let x = omega / TWO_PI;
    let ell_plus = spec.ell((omega + TWO_PI * k1).abs() / delta);
    let ell_minus = spec.ell((omega - TWO_PI * k1).abs() / delta);
    let scale = (delta / TWO_PI).powf(alpha);
    let tail = scale * (ell_plus * hurwitz_zeta_em(alpha, k1 + x) + ell_minus * hurwitz_zeta_em(alpha, k1 - x));
    Ok((head + tail) / delta)
}

/// `C_alpha = exp{(1/2pi) int_{-pi}^{pi} log bracket(alpha, w) dw}`.
///
/// Evenness reduces this to `(1/pi) int_0^pi`; the substitution `w = e^u`
/// flattens the logarithmic singularity at the origin, and the part below
/// `u = -40` is added in closed form from `log bracket ~ -alpha log w`.
pub fn c_alpha(alpha: f64) -> Result<f64> {
    if !(alpha > 1.0 && alpha <= 40.0) {
        return Err(Error::DomainError(format!(
            "C_alpha needs 1 < alpha <= 40, got {alpha}"
        )));
    }
    let u_min = -40.0f64;
    let cfg = QuadratureConfig {
        abs_tol: 1e-13,
        rel_tol: 1e-13,
        max_intervals: 4000,
    };
    let (body, _) = integrate(
        |u| {
            let w = u.exp();
            log_aliasing_bracket(alpha, w).unwrap_or(f64::NAN) * w
        },
        u_min,
        PI.ln(),
        &cfg,
    )?;
    let tail = -alpha * (u_min - 1.0) * u_min.exp();
    Ok(((body + tail) / PI).exp())
}

/// `S_{p,alpha} = int_{-pi}^{pi} (1 - cos w)^p bracket(alpha, w) dw` for
/// `1 < alpha < 2p + 1`.
pub fn s_p_alpha(p: u32, alpha: f64) -> Result<f64> {
    let pf = p as f64;
    if p == 0 || !(alpha > 1.0 && alpha < 2.0 * pf + 1.0) || alpha > 64.0 {
        return Err(Error::DomainError(format!(
            "S_(p,alpha) needs p >= 1 and 1 < alpha < 2p + 1, got p = {p}, alpha = {alpha}"
        )));
    }
    // Integrand ~ 2^{-p} w^{2p - alpha} near 0; after w = e^u it decays like e^{kappa u}.
    let kappa = 2.0 * pf - alpha + 1.0;
    let u_min = (-37.0 / kappa).max(-700.0);
    let cfg = QuadratureConfig {
        abs_tol: 1e-14,
        rel_tol: 1e-12,
        max_intervals: 4000,
    };
    let (body, _) = integrate(
        |u| {
            let w = u.exp();
            let half = (0.5 * w).sin();
            let log_cos_term = pf * (2.0 * half * half).ln();
            (log_cos_term + log_aliasing_bracket(alpha, w).unwrap_or(f64::NAN) + u).exp()
        },
        u_min,
        PI.ln(),
        &cfg,
    )?;
    let tail = 2f64.powf(-pf) * (kappa * u_min).exp() / kappa;
    Ok(2.0 * (body + tail))
}

/// Kolmogorov's formula: the one-step prediction variance
/// `2 pi exp{(1/2pi) int_{-pi}^{pi} log f(w) dw}` of a stationary sequence
/// with spectral density `f` on `[-pi, pi]`.
pub fn kolmogorov_sigma2<F: Fn(f64) -> f64>(f_delta: F, cfg: &QuadratureConfig) -> Result<f64> {
    let bad = Cell::new(None);
    let log_f = |w: f64| {
        let v = f_delta(w);
        if v > 0.0 && v.is_finite() {
            v.ln()
        } else {
            if bad.get().is_none() {
                bad.set(Some(w));
            }
            0.0
        }
    };
    let (left, _) = integrate(log_f, -PI, 0.0, cfg)?;
    let (right, _) = integrate(log_f, 0.0, PI, cfg)?;
    if let Some(w) = bad.get() {
        return Err(Error::NonPositiveDensity(w));
    }
    Ok(TWO_PI * ((left + right) / TWO_PI).exp())
}

/// Leading-order innovation variance `2 pi C_alpha l(1/delta) delta^{alpha-1}`.
pub fn wold_variance_asymptotics_rv(spec: &RegVaryingSpectrum, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok(TWO_PI * c_alpha(spec.alpha)? * spec.ell(1.0 / delta) * delta.powf(spec.alpha - 1.0))
}

fn check_memory(d: f64) -> Result<()> {
    if d > 0.0 && d < 0.5 {
        Ok(())
    } else {
        Err(Error::DomainError(format!(
            "fractional order d must lie in (0, 0.5), got {d}"
        )))
    }
}

fn ficarma_density_unchecked(model: &CarmaModel, d: f64, omega: f64) -> f64 {
    model.spectral_density(omega) * omega.abs().powf(-2.0 * d)
}

/// `sigma^2/(2 pi) |w|^{-2d} |b(iw)/a(iw)|^2`, `0 < d < 1/2`, `w != 0`.
pub fn ficarma_spectral_density(model: &CarmaModel, d: f64, omega: f64) -> Result<f64> {
    check_memory(d)?;
    if omega == 0.0 || !omega.is_finite() {
        return Err(Error::DomainError("FICARMA density is singular at omega = 0".into()));
    }
    Ok(ficarma_density_unchecked(model, d, omega))
}

/// `sigma^2 Gamma(nu)^2 / (2 pi (lambda^2 + w^2)^nu)`.
pub fn gamma_spectral_density(nu: f64, lambda: f64, sigma2: f64, omega: f64) -> f64 {
    sigma2 * gamma(nu).powi(2) / (TWO_PI * (lambda * lambda + omega * omega).powf(nu))
}

/// Two turbulence spectra, both regularly varying with index `-5/3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TurbulenceSpectrum {
    /// `C U^{-2/3} |w|^{-5/3} (w^2 / (w^2 + c_ell / ell_bar^2))^{17/6}`.
    VonKarman {
        c: f64,
        c_ell: f64,
        u_bar: f64,
        ell_bar: f64,
    },
    /// `4 v ell_bar / (1 + 6 ell_bar |w|)^{5/3}`, `v` the variance.
    Kaimal { v: f64, ell_bar: f64 },
}

impl TurbulenceSpectrum {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            TurbulenceSpectrum::VonKarman {
                c,
                c_ell,
                u_bar,
                ell_bar,
            } => c > 0.0 && c_ell > 0.0 && u_bar > 0.0 && ell_bar > 0.0,
            TurbulenceSpectrum::Kaimal { v, ell_bar } => v > 0.0 && ell_bar > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::DomainError(format!(
                "turbulence parameters must be positive: {self:?}"
            )))
        }
    }

    fn density_unchecked(&self, omega: f64) -> f64 {
        let w = omega.abs();
        match *self {
            TurbulenceSpectrum::VonKarman {
                c,
                c_ell,
                u_bar,
                ell_bar,
            } => {
                let w2 = w * w;
                c * u_bar.powf(-2.0 / 3.0)
                    * w.powf(-5.0 / 3.0)
                    * (w2 / (w2 + c_ell / (ell_bar * ell_bar))).powf(17.0 / 6.0)
            }
            TurbulenceSpectrum::Kaimal { v, ell_bar } => 4.0 * v * ell_bar / (1.0 + 6.0 * ell_bar * w).powf(5.0 / 3.0),
        }
    }

    /// Density at `omega`. The von Kármán form is defined off the origin only.
    pub fn density(&self, omega: f64) -> Result<f64> {
        self.validate()?;
        if !omega.is_finite() {
            return Err(Error::DomainError(format!("omega = {omega}")));
        }
        if omega == 0.0 && matches!(self, TurbulenceSpectrum::VonKarman { .. }) {
            return Err(Error::DomainError(
                "von Karman density is undefined at omega = 0".into(),
            ));
        }
        Ok(self.density_unchecked(omega))
    }
}

/// Convenience wrapper matching [`TurbulenceSpectrum::density`].
pub fn turbulence_spectra(model: &TurbulenceSpectrum, omega: f64) -> Result<f64> {
    model.density(omega)
}

/// Minimum number of frequencies the log-log regression accepts.
pub const TAIL_INDEX_MIN_POINTS: usize = 8;

/// Estimated index of regular variation: minus the least-squares slope of
/// `log f` against `log w` over the frequencies inside `band`.
pub fn tail_index_diagnostic(freqs: &[f64], values: &[f64], band: (f64, f64)) -> Result<f64> {
    if freqs.len() != values.len() {
        return Err(Error::DomainError("frequency and value arrays differ in length".into()));
    }
    let (lo, hi) = band;
    let points: Vec<(f64, f64)> = freqs
        .iter()
        .zip(values)
        .filter(|(w, _)| **w >= lo && **w <= hi && **w > 0.0)
        .map(|(w, v)| (*w, *v))
        .collect();
    if points.len() < TAIL_INDEX_MIN_POINTS {
        return Err(Error::InsufficientPoints {
            needed: TAIL_INDEX_MIN_POINTS,
            found: points.len(),
        });
    }
    if let Some((w, _)) = points.iter().find(|(_, v)| !(*v > 0.0)) {
        return Err(Error::NonPositiveDensity(*w));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|(w, _)| w.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, v)| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientPoints {
            needed: TAIL_INDEX_MIN_POINTS,
            found: 1,
        });
    }
    Ok(-sxy / sxx)
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(Error::DomainError(format!("delta must be positive, got {delta}")))
    }
}
