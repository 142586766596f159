//! Periodogram, Welch estimates, kernel-derived spectra and the
//! second-order structure function.

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::carma::CarmaModel;
use crate::error::{Error, Result};
use crate::estimation::{KernelEstimate, SampledSeries};
use crate::simulation::GammaKernelModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralMethod {
    Welch,
    Periodogram,
    Model,
    KernelDerived,
}

impl SpectralMethod {
    pub fn name(&self) -> &'static str {
        match self {
            SpectralMethod::Welch => "welch",
            SpectralMethod::Periodogram => "periodogram",
            SpectralMethod::Model => "model",
            SpectralMethod::KernelDerived => "kernel-derived",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrequencyUnit {
    /// Radians per sample, `[0, pi]`; densities integrate to the variance over `[-pi, pi]`.
    RadiansPerSample,
    /// Radians per unit time.
    RadiansPerTime,
    /// Cycles per unit time.
    Hertz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    Hamming,
    Hann,
    Rectangular,
}

impl Window {
    pub fn weights(&self, m: usize) -> Vec<f64> {
        if m == 1 {
            return vec![1.0];
        }
        let d = (m - 1) as f64;
        (0..m)
            .map(|t| {
                let c = (2.0 * PI * t as f64 / d).cos();
                match self {
                    Window::Hamming => 0.54 - 0.46 * c,
                    Window::Hann => 0.5 - 0.5 * c,
                    Window::Rectangular => 1.0,
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelchConfig {
    pub segment_len: usize,
    pub overlap: f64,
    pub window: Window,
}

impl WelchConfig {
    pub fn new(segment_len: usize) -> Self {
        Self {
            segment_len,
            overlap: 0.5,
            window: Window::Hamming,
        }
    }

    pub fn step(&self) -> usize {
        ((self.segment_len as f64 * (1.0 - self.overlap)).floor() as usize).max(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    pub freqs: Vec<f64>,
    pub values: Vec<f64>,
    pub method: SpectralMethod,
    pub unit: FrequencyUnit,
    /// Sampling interval of the data the estimate came from.
    pub delta: f64,
    pub welch: Option<WelchConfig>,
    pub segments: usize,
}

impl SpectralFunction {
    /// Rescale a per-sample density to one in radians per unit time:
    /// `w -> w / delta`, `f -> delta f`.
    pub fn to_time_units(&self) -> Self {
        match self.unit {
            FrequencyUnit::RadiansPerSample => Self {
                freqs: self.freqs.iter().map(|w| w / self.delta).collect(),
                values: self.values.iter().map(|v| v * self.delta).collect(),
                unit: FrequencyUnit::RadiansPerTime,
                ..self.clone()
            },
            _ => self.clone(),
        }
    }

    /// Cycles per unit time, density scaled by `2 pi` so it integrates to the
    /// same total.
    pub fn to_hz(&self) -> Self {
        let base = self.to_time_units();
        match base.unit {
            FrequencyUnit::Hertz => base,
            _ => Self {
                freqs: base.freqs.iter().map(|w| w / (2.0 * PI)).collect(),
                values: base.values.iter().map(|v| v * 2.0 * PI).collect(),
                unit: FrequencyUnit::Hertz,
                ..base
            },
        }
    }

    /// Points whose frequency lies in `[lo, hi]`.
    pub fn band(&self, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
        self.freqs
            .iter()
            .zip(&self.values)
            .filter(|(w, _)| **w >= lo && **w <= hi)
            .map(|(w, v)| (*w, *v))
            .unzip()
    }
}

fn centered(series: &SampledSeries) -> Vec<f64> {
    let m = series.mean();
    series.values.iter().map(|v| v - m).collect()
}

/// `I(w_k) = |sum_t (Y_t - mean) e^{-i t w_k}|^2 / (2 pi n)` at
/// `w_k = 2 pi k / n`, `k = 1..=n/2`.
pub fn periodogram(series: &SampledSeries) -> SpectralFunction {
    let n = series.len();
    let mut buf: Vec<Complex64> = centered(series).into_iter().map(|v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let norm = 1.0 / (2.0 * PI * n as f64);
    let half = n / 2;
    SpectralFunction {
        freqs: (1..=half).map(|k| 2.0 * PI * k as f64 / n as f64).collect(),
        values: buf[1..=half].iter().map(|z| z.norm_sqr() * norm).collect(),
        method: SpectralMethod::Periodogram,
        unit: FrequencyUnit::RadiansPerSample,
        delta: series.delta,
        welch: None,
        segments: 1,
    }
}

/// `(2 pi / n) sum_{k=1}^{n-1} I(w_k)` recovered from the one-sided
/// periodogram; equals the biased sample variance.
pub fn periodogram_total_power(pg: &SpectralFunction, n: usize) -> f64 {
    let mut s: f64 = pg.values.iter().sum::<f64>() * 2.0;
    if n.is_multiple_of(2) {
        s -= pg.values.last().copied().unwrap_or(0.0);
    }
    2.0 * PI * s / n as f64
}

/// Averaged modified periodograms of overlapping, windowed segments. The
/// global mean is removed first; each segment periodogram is normalised by
/// `2 pi sum w_t^2`.
pub fn welch(series: &SampledSeries, cfg: &WelchConfig) -> Result<SpectralFunction> {
    let n = series.len();
    let m = cfg.segment_len;
    if m < 2 || m > n {
        return Err(Error::SegmentTooLong { segment: m, n });
    }
    if !(cfg.overlap >= 0.0 && cfg.overlap <= 0.95) {
        return Err(Error::DomainError(format!(
            "overlap must lie in [0, 0.95], got {}",
            cfg.overlap
        )));
    }
    let y = centered(series);
    let w = cfg.window.weights(m);
    let power: f64 = w.iter().map(|v| v * v).sum();
    let step = cfg.step();
    let starts: Vec<usize> = (0..).map(|i| i * step).take_while(|s| s + m <= n).collect();
    let fft = FftPlanner::new().plan_fft_forward(m);
    let half = m / 2;
    let spectra: Vec<Vec<f64>> = starts
        .par_iter()
        .map(|&s| {
            let mut buf: Vec<Complex64> = y[s..s + m]
                .iter()
                .zip(&w)
                .map(|(v, wt)| Complex64::new(v * wt, 0.0))
                .collect();
            fft.process(&mut buf);
            buf[1..=half].iter().map(|z| z.norm_sqr()).collect()
        })
        .collect();
    let mut acc = vec![0.0; half];
    for s in &spectra {
        for (a, v) in acc.iter_mut().zip(s) {
            *a += v;
        }
    }
    let norm = 1.0 / (2.0 * PI * power * starts.len() as f64);
    Ok(SpectralFunction {
        freqs: (1..=half).map(|k| 2.0 * PI * k as f64 / m as f64).collect(),
        values: acc.into_iter().map(|v| v * norm).collect(),
        method: SpectralMethod::Welch,
        unit: FrequencyUnit::RadiansPerSample,
        delta: series.delta,
        welch: Some(*cfg),
        segments: starts.len(),
    })
}

/// `(1/2pi) |sum_j g_j e^{i w (j + h) delta} delta|^2` at the given angular
/// frequencies (per unit time).
pub fn spectrum_from_kernel_at(est: &KernelEstimate, freqs: &[f64]) -> SpectralFunction {
    let d = est.delta;
    let values = freqs
        .iter()
        .map(|&w| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, g) in est.g_hat.iter().enumerate() {
                acc += Complex64::from_polar(*g, w * (j as f64 + est.offset_h) * d);
            }
            (acc * d).norm_sqr() / (2.0 * PI)
        })
        .collect();
    SpectralFunction {
        freqs: freqs.to_vec(),
        values,
        method: SpectralMethod::KernelDerived,
        unit: FrequencyUnit::RadiansPerTime,
        delta: d,
        welch: None,
        segments: 0,
    }
}

/// Kernel-derived spectrum on the FFT grid `2 pi k / (n_fft delta)`,
/// `k = 1..=n_fft/2`, zero-padding the estimate to `n_fft` points.
pub fn spectrum_from_kernel(est: &KernelEstimate, n_fft: usize) -> Result<SpectralFunction> {
    if n_fft < est.g_hat.len() || n_fft < 2 {
        return Err(Error::DomainError(format!(
            "FFT length {n_fft} shorter than the kernel grid ({})",
            est.g_hat.len()
        )));
    }
    let d = est.delta;
    let mut buf: Vec<Complex64> = est.g_hat.iter().map(|g| Complex64::new(*g, 0.0)).collect();
    buf.resize(n_fft, Complex64::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(n_fft).process(&mut buf);
    let half = n_fft / 2;
    Ok(SpectralFunction {
        freqs: (1..=half).map(|k| 2.0 * PI * k as f64 / (n_fft as f64 * d)).collect(),
        values: buf[1..=half]
            .iter()
            .map(|z| z.norm_sqr() * d * d / (2.0 * PI))
            .collect(),
        method: SpectralMethod::KernelDerived,
        unit: FrequencyUnit::RadiansPerTime,
        delta: d,
        welch: None,
        segments: 0,
    })
}

pub enum StructureSource<'a> {
    Series(&'a SampledSeries),
    Gamma(&'a GammaKernelModel),
    Carma(&'a CarmaModel),
}

/// `S_2(delta) = E[(Y_delta - Y_0)^2]`. For a series, `delta` is rounded to
/// the nearest multiple of the sampling interval and the mean squared
/// difference at that lag is returned.
pub fn structure_function(source: StructureSource<'_>, delta: f64) -> Result<f64> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::DomainError(format!("lag must be nonnegative, got {delta}")));
    }
    if delta == 0.0 {
        return Ok(0.0);
    }
    match source {
        StructureSource::Gamma(m) => m.structure_function(delta),
        StructureSource::Carma(m) => Ok(2.0 * (m.autocovariance(0.0)? - m.autocovariance(delta)?)),
        StructureSource::Series(s) => {
            let k = (delta / s.delta).round() as usize;
            let n = s.len();
            if k == 0 || k >= n {
                return Err(Error::LagTooLarge { lag: k, n });
            }
            let v = &s.values;
            Ok((0..n - k).map(|t| (v[t + k] - v[t]).powi(2)).sum::<f64>() / (n - k) as f64)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmallLagRegime {
    Rough,
    Critical,
    Smooth,
}

/// Leading small-lag term of `S_2(delta) / (2 gamma_Y(0))` for the gamma
/// kernel, and which regime applies.
pub fn structure_function_leading(model: &GammaKernelModel, delta: f64) -> (SmallLagRegime, f64) {
    use statrs::function::gamma::gamma;
    let nu = model.nu;
    let x = model.lambda * delta;
    if (nu - 1.5).abs() < 1e-12 {
        (SmallLagRegime::Critical, 0.5 * x * x * delta.ln().abs())
    } else if nu < 1.5 {
        let c = 2f64.powf(1.0 - 2.0 * nu) * gamma(1.5 - nu) / gamma(nu + 0.5);
        (SmallLagRegime::Rough, c * x.powf(2.0 * nu - 1.0))
    } else {
        (SmallLagRegime::Smooth, x * x / (4.0 * (nu - 1.5)))
    }
}
