//! Nonparametric kernel estimators built on the innovations algorithm and on
//! a high-order Durbin–Levinson autoregression.

use log::warn;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Equally spaced observations `Y_{k delta}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSeries {
    pub delta: f64,
    pub values: Vec<f64>,
    pub mean_removed: bool,
}

impl SampledSeries {
    pub fn new(delta: f64, values: Vec<f64>) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidSeries(format!("delta must be positive, got {delta}")));
        }
        if values.len() < 2 {
            return Err(Error::InvalidSeries(format!(
                "need at least 2 observations, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries(format!("non-finite value at index {i}")));
        }
        Ok(Self {
            delta,
            values,
            mean_removed: false,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Copy with the sample mean subtracted.
    pub fn centered(&self) -> Self {
        let m = self.mean();
        Self {
            delta: self.delta,
            values: self.values.iter().map(|v| v - m).collect(),
            mean_removed: true,
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            delta: self.delta,
            values: self.values.iter().map(|v| v * c).collect(),
            mean_removed: self.mean_removed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcvfSource {
    /// Sample autocovariances of a series of length `n`.
    Sample {
        n: usize,
    },
    ExactModel,
}

/// Autocovariances `gamma(0), ..., gamma(h_max)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AcvfSequence {
    pub gamma: Vec<f64>,
    pub source: AcvfSource,
}

impl AcvfSequence {
    pub fn exact(gamma: Vec<f64>) -> Result<Self> {
        if gamma.is_empty() || !(gamma[0] > 0.0) {
            return Err(Error::NonPositiveV(0, gamma.first().copied().unwrap_or(f64::NAN)));
        }
        Ok(Self {
            gamma,
            source: AcvfSource::ExactModel,
        })
    }

    pub fn max_lag(&self) -> usize {
        self.gamma.len() - 1
    }

    pub fn sample_size(&self) -> Option<usize> {
        match self.source {
            AcvfSource::Sample { n } => Some(n),
            AcvfSource::ExactModel => None,
        }
    }
}

// Below this many lag-products the direct sum is used.
const DIRECT_ACVF_WORK: usize = 1 << 22;

/// Biased sample autocovariance `n^{-1} sum_{t} (Y_t - mean)(Y_{t+h} - mean)`.
pub fn sample_acvf(series: &SampledSeries, h_max: usize) -> Result<AcvfSequence> {
    let n = series.len();
    if h_max >= n {
        return Err(Error::LagTooLarge { lag: h_max, n });
    }
    let mean = series.mean();
    let y: Vec<f64> = series.values.iter().map(|v| v - mean).collect();
    let gamma = if n.saturating_mul(h_max + 1) <= DIRECT_ACVF_WORK {
        (0..=h_max)
            .map(|h| y[..n - h].iter().zip(&y[h..]).map(|(a, b)| a * b).sum::<f64>() / n as f64)
            .collect()
    } else {
        fft_acvf(&y, h_max)
    };
    Ok(AcvfSequence {
        gamma,
        source: AcvfSource::Sample { n },
    })
}

fn fft_acvf(y: &[f64], h_max: usize) -> Vec<f64> {
    let n = y.len();
    let size = (2 * n).next_power_of_two();
    let mut buf: Vec<Complex64> = y.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    buf.resize(size, Complex64::new(0.0, 0.0));
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(size).process(&mut buf);
    for z in buf.iter_mut() {
        *z = Complex64::new(z.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(size).process(&mut buf);
    let scale = 1.0 / (size as f64 * n as f64);
    buf[..=h_max].iter().map(|z| z.re * scale).collect()
}

/// Innovations coefficients `theta[k][j] = theta_{k,j}` (with `theta[k][0] = 1`)
/// and one-step prediction variances `v[0..=m]`.
#[derive(Debug, Clone, PartialEq)]
pub struct InnovationsFit {
    pub m: usize,
    pub theta: Vec<Vec<f64>>,
    pub v: Vec<f64>,
}

impl InnovationsFit {
    /// Row `theta_{m,0..=m}`.
    pub fn last_row(&self) -> &[f64] {
        &self.theta[self.m]
    }
}

pub fn innovations_algorithm(acvf: &AcvfSequence, m: usize) -> Result<InnovationsFit> {
    let g = &acvf.gamma;
    if m >= g.len() {
        return Err(Error::MRequired {
            m,
            available: g.len().saturating_sub(1),
        });
    }
    if !(g[0] > 0.0) {
        return Err(Error::NonPositiveV(0, g[0]));
    }
    let mut theta: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    let mut v = Vec::with_capacity(m + 1);
    theta.push(vec![1.0]);
    v.push(g[0]);
    for k in 1..=m {
        let mut row = vec![0.0; k + 1];
        row[0] = 1.0;
        for j in 0..k {
            // theta_{k,k-j}
            let mut s = g[k - j];
            let tj = &theta[j];
            for i in 0..j {
                s -= tj[j - i] * row[k - i] * v[i];
            }
            row[k - j] = s / v[j];
        }
        let vk = g[0] - (0..k).map(|j| row[k - j] * row[k - j] * v[j]).sum::<f64>();
        if !(vk > 0.0) {
            return Err(Error::NonPositiveV(k, vk));
        }
        theta.push(row);
        v.push(vk);
    }
    Ok(InnovationsFit { m, theta, v })
}

/// Order-`m` autoregression `phi_1..phi_m` with prediction variance `tau2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArFit {
    pub phi: Vec<f64>,
    pub tau2: f64,
}

/// Order in `1..=cap` minimising `n log tau_k^2 + 2k`.
pub fn aic_ar_order(acvf: &AcvfSequence, n: usize, cap: usize) -> Result<usize> {
    let g = &acvf.gamma;
    if cap >= g.len() {
        return Err(Error::MRequired {
            m: cap,
            available: g.len().saturating_sub(1),
        });
    }
    let mut phi: Vec<f64> = Vec::with_capacity(cap);
    let mut v = g[0];
    let nf = n as f64;
    let mut best = (f64::INFINITY, 1);
    for k in 1..=cap {
        let s: f64 = g[k] - phi.iter().enumerate().map(|(j, p)| p * g[k - 1 - j]).sum::<f64>();
        let kappa = s / v;
        for j in 0..(k - 1) / 2 + (k - 1) % 2 {
            let (a, b) = (phi[j], phi[k - 2 - j]);
            phi[j] = a - kappa * b;
            if j != k - 2 - j {
                phi[k - 2 - j] = b - kappa * a;
            }
        }
        phi.push(kappa);
        v *= 1.0 - kappa * kappa;
        if !(v > 0.0) {
            return Err(Error::NonPositiveV(k, v));
        }
        let aic = nf * v.ln() + 2.0 * k as f64;
        if aic < best.0 {
            best = (aic, k);
        }
    }
    Ok(best.1)
}

pub fn durbin_levinson(acvf: &AcvfSequence, m: usize) -> Result<ArFit> {
    let g = &acvf.gamma;
    if m >= g.len() {
        return Err(Error::MRequired {
            m,
            available: g.len().saturating_sub(1),
        });
    }
    if !(g[0] > 0.0) {
        return Err(Error::NonPositiveV(0, g[0]));
    }
    let mut phi: Vec<f64> = Vec::with_capacity(m);
    let mut v = g[0];
    for k in 1..=m {
        let s: f64 = g[k] - phi.iter().enumerate().map(|(j, p)| p * g[k - 1 - j]).sum::<f64>();
        let kappa = s / v;
        let prev = phi.clone();
        for j in 0..k - 1 {
            phi[j] = prev[j] - kappa * prev[k - 2 - j];
        }
        phi.push(kappa);
        v *= 1.0 - kappa * kappa;
        if !(v > 0.0) {
            return Err(Error::NonPositiveV(k, v));
        }
    }
    Ok(ArFit { phi, tau2: v })
}

/// Causality of `1 - phi_1 z - ... - phi_m z^m` by the step-down recursion:
/// every reflection coefficient must lie strictly inside `(-1, 1)`.
pub fn check_causal(phi: &[f64]) -> Result<()> {
    let mut a = phi.to_vec();
    for k in (1..=a.len()).rev() {
        let kappa = a[k - 1];
        if !(kappa.abs() < 1.0) {
            return Err(Error::NonCausalAR(k, kappa));
        }
        let denom = 1.0 - kappa * kappa;
        let prev: Vec<f64> = (0..k - 1).map(|j| (a[j] + kappa * a[k - 2 - j]) / denom).collect();
        a = prev;
    }
    Ok(())
}

/// Coefficients `beta_0..beta_{j_max}` of `1 / phi(z)`.
pub fn ar_to_ma(phi: &[f64], j_max: usize) -> Result<Vec<f64>> {
    check_causal(phi)?;
    let mut beta = vec![0.0; j_max + 1];
    beta[0] = 1.0;
    for j in 1..=j_max {
        beta[j] = (1..=j.min(phi.len())).map(|k| phi[k - 1] * beta[j - k]).sum();
    }
    Ok(beta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    Innovations,
    #[default]
    DurbinLevinson,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Innovations => "innovations",
            Method::DurbinLevinson => "durbin-levinson",
        }
    }
}

/// How `m` is chosen when not given explicitly. `N` is the number of kernel
/// grid points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MRule {
    /// `m = 3N`.
    #[default]
    ThreeN,
    /// `m = min(3N, floor(n^{1/3}))`.
    CubeRootCapped,
}

/// Autoregressive order of the Durbin–Levinson estimator when `m` is not
/// given explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArOrder {
    /// AIC over `1..=m`, `m` from the [`MRule`]; needs a known sample size
    /// and falls back to `m` otherwise.
    #[default]
    Aic,
    /// The `m` of the [`MRule`] itself.
    SameAsM,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateOptions {
    pub t_max: f64,
    pub method: Method,
    pub m: Option<usize>,
    pub m_rule: MRule,
    pub ar_order: ArOrder,
    /// Evaluation offset `h` in `[0, 1)`; estimates sit at `(j + h) delta`.
    pub offset_h: f64,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self {
            t_max: 8.0,
            method: Method::default(),
            m: None,
            m_rule: MRule::default(),
            ar_order: ArOrder::default(),
            offset_h: 0.5,
        }
    }
}

pub enum KernelInput<'a> {
    Series(&'a SampledSeries),
    Acvf { acvf: &'a AcvfSequence, delta: f64 },
}

/// `g_hat` on the grid `(j + h) delta`, `j = 0..N-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelEstimate {
    pub delta: f64,
    pub offset_h: f64,
    pub g_hat: Vec<f64>,
    /// Plug-in standard errors; `None` for exact-ACVF input.
    pub band: Option<Vec<f64>>,
    pub method: Method,
    pub m_used: usize,
    /// `v_m` (innovations) or `tau^2` (Durbin–Levinson).
    pub innovation_variance: f64,
    pub n: Option<usize>,
}

impl KernelEstimate {
    pub fn times(&self) -> Vec<f64> {
        (0..self.g_hat.len())
            .map(|j| (j as f64 + self.offset_h) * self.delta)
            .collect()
    }

    /// Step-function value at `t`: `g_hat[floor(t / delta)]`, zero for `t < 0`.
    pub fn eval_step(&self, t: f64) -> Option<f64> {
        if t < 0.0 {
            return Some(0.0);
        }
        self.g_hat.get((t / self.delta).floor() as usize).copied()
    }
}

pub fn grid_points(delta: f64, t_max: f64) -> usize {
    ((t_max / delta) - 1e-9).ceil().max(1.0) as usize
}

pub fn default_m(rule: MRule, n_points: usize, n: Option<usize>) -> usize {
    let three_n = 3 * n_points;
    match (rule, n) {
        (MRule::CubeRootCapped, Some(n)) => three_n.min((n as f64).cbrt().floor() as usize).max(1),
        _ => three_n,
    }
}

pub fn estimate_kernel(input: KernelInput<'_>, opts: &EstimateOptions) -> Result<KernelEstimate> {
    if !(opts.offset_h >= 0.0 && opts.offset_h < 1.0) {
        return Err(Error::DomainError(format!(
            "offset h must lie in [0, 1), got {}",
            opts.offset_h
        )));
    }
    if !(opts.t_max > 0.0) {
        return Err(Error::DomainError(format!(
            "t_max must be positive, got {}",
            opts.t_max
        )));
    }
    let delta = match &input {
        KernelInput::Series(s) => s.delta,
        KernelInput::Acvf { delta, .. } => *delta,
    };
    if !(delta > 0.0) {
        return Err(Error::DomainError(format!("delta must be positive, got {delta}")));
    }
    let n_points = grid_points(delta, opts.t_max);
    let (available, n) = match &input {
        KernelInput::Series(s) => (s.len() - 1, Some(s.len())),
        KernelInput::Acvf { acvf, .. } => (acvf.max_lag(), acvf.sample_size()),
    };
    let m = match opts.m {
        Some(m) => m,
        None => {
            let m = default_m(opts.m_rule, n_points, n);
            if let Some(n) = n {
                // with AIC the Durbin-Levinson order is chosen below m, so 3N is only a cap
                let order_is_m = opts.method == Method::Innovations || opts.ar_order == ArOrder::SameAsM;
                if order_is_m && (3 * n_points) as f64 > (n as f64).cbrt() && opts.m_rule == MRule::ThreeN {
                    warn!("m = 3N = {} exceeds n^(1/3) = {:.1}", 3 * n_points, (n as f64).cbrt());
                }
            }
            m
        }
    };
    if m == 0 || m > available {
        return Err(Error::MRequired { m, available });
    }
    if opts.method == Method::Innovations && n_points > m + 1 {
        return Err(Error::MRequired {
            m: n_points - 1,
            available: m,
        });
    }
    let owned;
    let acvf = match input {
        KernelInput::Series(s) => {
            owned = sample_acvf(s, m)?;
            &owned
        }
        KernelInput::Acvf { acvf, .. } => acvf,
    };
    let mut m_used = m;
    let (coeffs, var) = match opts.method {
        Method::Innovations => {
            let fit = innovations_algorithm(acvf, m)?;
            let row = fit.last_row()[..n_points].to_vec();
            (row, fit.v[m])
        }
        Method::DurbinLevinson => {
            let m = match (opts.m, opts.ar_order, n) {
                (None, ArOrder::Aic, Some(n)) => aic_ar_order(acvf, n, m)?,
                _ => m,
            };
            m_used = m;
            let fit = durbin_levinson(acvf, m)?;
            (ar_to_ma(&fit.phi, n_points - 1)?, fit.tau2)
        }
    };
    let scale = (var / delta).sqrt();
    let g_hat: Vec<f64> = coeffs.iter().map(|c| scale * c).collect();
    let band = n.map(|n| {
        let mut acc = 0.0;
        coeffs
            .iter()
            .map(|c| {
                let b = (acc * var / (n as f64 * delta)).sqrt();
                acc += c * c;
                b
            })
            .collect()
    });
    Ok(KernelEstimate {
        delta,
        offset_h: opts.offset_h,
        g_hat,
        band,
        method: opts.method,
        m_used,
        innovation_variance: var,
        n,
    })
}

/// Asymptotic standard errors `sqrt(int_0^t g^2(u) du / (n delta))` at the
/// estimate's grid points. Without `g_ref` the integral is taken over the
/// estimated step function; with it, by the trapezoid rule on 16 sub-cells.
pub fn clt_band(est: &KernelEstimate, g_ref: Option<&dyn Fn(f64) -> f64>) -> Result<Vec<f64>> {
    let n = est
        .n
        .ok_or_else(|| Error::DomainError("sample size unknown for an exact-ACVF estimate".into()))?;
    let nd = n as f64 * est.delta;
    let d = est.delta;
    let h = est.offset_h;
    let out = match g_ref {
        None => {
            let mut acc = 0.0;
            est.g_hat
                .iter()
                .map(|g| {
                    let b = ((acc + h * d * g * g) / nd).sqrt();
                    acc += d * g * g;
                    b
                })
                .collect()
        }
        Some(g) => {
            const SUB: usize = 16;
            let cell = |a: f64, b: f64| {
                let step = (b - a) / SUB as f64;
                let mut s = 0.5 * (g(a).powi(2) + g(b).powi(2));
                for i in 1..SUB {
                    s += g(a + i as f64 * step).powi(2);
                }
                s * step
            };
            let mut acc = 0.0;
            (0..est.g_hat.len())
                .map(|j| {
                    let left = j as f64 * d;
                    let t = left + h * d;
                    let b = if t > left {
                        ((acc + cell(left, t)) / nd).sqrt()
                    } else {
                        (acc / nd).sqrt()
                    };
                    acc += cell(left, left + d);
                    b
                })
                .collect()
        }
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn acvf(g: &[f64]) -> AcvfSequence {
        AcvfSequence::exact(g.to_vec()).unwrap()
    }

    #[test]
    fn sample_acvf_alternating() {
        let s = SampledSeries::new(1.0, vec![1.0, -1.0, 1.0, -1.0]).unwrap();
        let a = sample_acvf(&s, 1).unwrap();
        assert_abs_diff_eq!(a.gamma[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a.gamma[1], -0.75, epsilon = 1e-15);
        assert!(matches!(sample_acvf(&s, 4), Err(Error::LagTooLarge { .. })));
    }

    #[test]
    fn fft_acvf_matches_direct() {
        let y: Vec<f64> = (0..500).map(|i| ((i * 37 % 101) as f64).sin()).collect();
        let s = SampledSeries::new(0.1, y).unwrap();
        let direct = sample_acvf(&s, 40).unwrap();
        let c = s.centered();
        let fft = fft_acvf(&c.values, 40);
        for (a, b) in direct.gamma.iter().zip(&fft) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn innovations_ma1() {
        let a = acvf(&[1.25, 0.5, 0.0, 0.0]);
        let fit = innovations_algorithm(&a, 1).unwrap();
        assert_abs_diff_eq!(fit.theta[1][1], 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(fit.v[1], 1.05, epsilon = 1e-15);
        let mut g = vec![0.0; 60];
        g[0] = 1.25;
        g[1] = 0.5;
        let fit = innovations_algorithm(&acvf(&g), 50).unwrap();
        assert_abs_diff_eq!(fit.theta[50][1], 0.5, epsilon = 1e-6);
        assert_abs_diff_eq!(fit.v[50], 1.0, epsilon = 1e-6);
    }

    #[test]
    fn innovations_rejects_invalid() {
        assert!(matches!(
            innovations_algorithm(&acvf(&[1.0, 1.5]), 1),
            Err(Error::NonPositiveV(1, _))
        ));
    }

    #[test]
    fn durbin_levinson_ar1() {
        let g: Vec<f64> = (0..10).map(|h| 0.5f64.powi(h) / 0.75).collect();
        let fit = durbin_levinson(&acvf(&g), 1).unwrap();
        assert_abs_diff_eq!(fit.phi[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(fit.tau2, 1.0, epsilon = 1e-15);
        let fit = durbin_levinson(&acvf(&g), 5).unwrap();
        assert_abs_diff_eq!(fit.phi[0], 0.5, epsilon = 1e-12);
        for p in &fit.phi[1..] {
            assert_abs_diff_eq!(*p, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn ar_inversion() {
        let b = ar_to_ma(&[0.5], 5).unwrap();
        for (j, v) in b.iter().enumerate() {
            assert_abs_diff_eq!(*v, 0.5f64.powi(j as i32), epsilon = 1e-15);
        }
        assert!(matches!(ar_to_ma(&[1.2], 3), Err(Error::NonCausalAR(..))));
        let b = ar_to_ma(&[0.9, -0.2], 3).unwrap();
        assert_abs_diff_eq!(b[1], 0.9, epsilon = 1e-15);
        assert_abs_diff_eq!(b[2], 0.61, epsilon = 1e-15);
        assert_abs_diff_eq!(b[3], 0.369, epsilon = 1e-15);
    }

    #[test]
    fn causality_step_down() {
        // roots of 1 - 1.5z + 0.56z^2 are 1/0.7 and 1/0.8
        assert!(check_causal(&[1.5, -0.56]).is_ok());
        // 1 - 2.5z + z^2 has a root at 0.5
        assert!(check_causal(&[2.5, -1.0]).is_err());
        assert!(check_causal(&[]).is_ok());
    }

    #[test]
    fn white_noise_kernel() {
        let mut g = vec![0.0; 400];
        g[0] = 2.0;
        let a = acvf(&g);
        for method in [Method::Innovations, Method::DurbinLevinson] {
            let opts = EstimateOptions {
                t_max: 2.0,
                method,
                ..Default::default()
            };
            let est = estimate_kernel(KernelInput::Acvf { acvf: &a, delta: 0.5 }, &opts).unwrap();
            assert_eq!(est.g_hat.len(), 4);
            assert_abs_diff_eq!(est.g_hat[0], 2.0, epsilon = 1e-14);
            assert!(est.g_hat[1..].iter().all(|v| v.abs() < 1e-14));
            assert!(est.band.is_none());
        }
    }

    #[test]
    fn aic_picks_true_ar_order() {
        // AR(2) with phi = (0.5, 0.3): gamma from the Yule-Walker equations
        let (p1, p2) = (0.5, 0.3);
        let r1 = p1 / (1.0 - p2);
        let mut rho = vec![1.0, r1];
        for h in 2..40 {
            rho.push(p1 * rho[h - 1] + p2 * rho[h - 2]);
        }
        let a = acvf(&rho);
        assert_eq!(aic_ar_order(&a, 100_000, 30).unwrap(), 2);
        let fit = durbin_levinson(&a, 2).unwrap();
        assert_abs_diff_eq!(fit.phi[0], p1, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.phi[1], p2, epsilon = 1e-12);
    }

    #[test]
    fn m_rule_and_errors() {
        assert_eq!(grid_points(0.0625, 8.0), 128);
        assert_eq!(default_m(MRule::ThreeN, 128, Some(1000)), 384);
        assert_eq!(default_m(MRule::CubeRootCapped, 128, Some(1000)), 10);
        let a = acvf(&[1.0, 0.0, 0.0]);
        let r = estimate_kernel(KernelInput::Acvf { acvf: &a, delta: 0.1 }, &EstimateOptions::default());
        assert!(matches!(r, Err(Error::MRequired { .. })));
    }

    #[test]
    fn clt_band_white_noise() {
        let est = KernelEstimate {
            delta: 0.5,
            offset_h: 0.0,
            g_hat: vec![1.0, 1.0, 1.0],
            band: None,
            method: Method::Innovations,
            m_used: 3,
            innovation_variance: 0.5,
            n: Some(8),
        };
        let b = clt_band(&est, None).unwrap();
        assert_eq!(b[0], 0.0);
        assert_abs_diff_eq!(b[2], (1.0f64 / 4.0).sqrt(), epsilon = 1e-15);
        let r = clt_band(&est, Some(&|_t: f64| 1.0)).unwrap();
        for (x, y) in b.iter().zip(&r) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-14);
        }
    }
}
