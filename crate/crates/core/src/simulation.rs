//! Sample-path generators: circulant embedding for Gaussian CMA processes
//! with a known autocovariance, and state-space recursions for CARMA models.

use log::warn;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use statrs::function::gamma::gamma;

use crate::carma::CarmaModel;
use crate::error::{Error, Result};
use crate::estimation::SampledSeries;
use crate::quadrature::gauss_kronrod_15;

/// Kernel `g(t) = t^{nu-1} e^{-lambda t}` on `t > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaKernelModel {
    pub nu: f64,
    pub lambda: f64,
    pub sigma2: f64,
}

impl GammaKernelModel {
    pub fn new(nu: f64, lambda: f64, sigma2: f64) -> Result<Self> {
        if !(nu > 0.5 && nu.is_finite()) {
            return Err(Error::InvalidModel(format!("gamma kernel needs nu > 1/2, got {nu}")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "gamma kernel needs lambda > 0, got {lambda}"
            )));
        }
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::InvalidModel(format!("sigma2 must be positive, got {sigma2}")));
        }
        Ok(Self { nu, lambda, sigma2 })
    }

    pub fn kernel(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            t.powf(self.nu - 1.0) * (-self.lambda * t).exp()
        }
    }

    /// `gamma_Y(0) = sigma^2 (2 lambda)^{1 - 2 nu} Gamma(2 nu - 1)`.
    pub fn variance(&self) -> f64 {
        self.sigma2 * (2.0 * self.lambda).powf(1.0 - 2.0 * self.nu) * gamma(2.0 * self.nu - 1.0)
    }

    /// Whittle–Matérn autocorrelation.
    pub fn autocorrelation(&self, h: f64) -> Result<f64> {
        let x = (self.lambda * h).abs();
        if x == 0.0 {
            return Ok(1.0);
        }
        let mu = self.nu - 0.5;
        if x > 740.0 {
            return Ok(0.0);
        }
        let k = bessel_k_scaled(mu, x)?;
        Ok(2f64.powf(1.5 - self.nu) / gamma(mu) * (mu * x.ln() - x).exp() * k)
    }

    pub fn acvf(&self, h: f64) -> Result<f64> {
        Ok(self.variance() * self.autocorrelation(h)?)
    }

    pub fn spectral_density(&self, omega: f64) -> f64 {
        crate::spectral_theory::gamma_spectral_density(self.nu, self.lambda, self.sigma2, omega)
    }

    /// `S_2(delta) = 2 gamma_Y(0) (1 - rho_Y(delta))`.
    pub fn structure_function(&self, delta: f64) -> Result<f64> {
        Ok(2.0 * self.variance() * (1.0 - self.autocorrelation(delta)?))
    }
}

/// `e^x K_nu(x)` from `int_0^inf exp(-x (cosh t - 1)) cosh(nu t) dt`.
///
/// The integrand extends to an even, analytic function of `t`, so the
/// trapezoid rule converges geometrically; the step is halved until two
/// successive sums agree to 1e-14.
pub fn bessel_k_scaled(nu: f64, x: f64) -> Result<f64> {
    let fail = || Error::BesselFailure { nu, x };
    if !(x > 0.0 && x.is_finite() && nu.abs() <= 20.0) {
        return Err(fail());
    }
    let a = nu.abs();
    let log_f = |t: f64| -x * (t.cosh() - 1.0) + a * t;
    let t_peak = (a / x).asinh();
    let peak = log_f(t_peak);
    // cut where the integrand has fallen by e^-50 relative to the peak
    let mut t_max = t_peak.max(1.0);
    while log_f(t_max) > peak - 50.0 {
        t_max *= 1.5;
        if t_max > 1e3 {
            return Err(fail());
        }
    }
    let f = |t: f64| (log_f(t) - peak).exp() * 0.5 * (1.0 + (-2.0 * a * t).exp());
    let mut n = 64usize;
    let mut h = t_max / n as f64;
    let mut sum = 0.5 * f(0.0) + (1..=n).map(|i| f(i as f64 * h)).sum::<f64>();
    let mut prev = sum * h;
    for _ in 0..16 {
        // add midpoints
        sum += (0..n).map(|i| f((i as f64 + 0.5) * h)).sum::<f64>();
        n *= 2;
        h *= 0.5;
        let cur = sum * h;
        if (cur - prev).abs() <= 1e-14 * cur.abs() {
            let v = cur * peak.exp();
            return if v.is_finite() && v > 0.0 { Ok(v) } else { Err(fail()) };
        }
        prev = cur;
    }
    Err(fail())
}

/// Modified Bessel function of the second kind, `|nu| <= 20`, `x > 0`.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    Ok(bessel_k_scaled(nu, x)? * (-x).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Driver {
    Gaussian,
    /// Compound Poisson with the given jump rate and centred normal jumps of
    /// variance `1 / rate`, so that `Var(L_1) = 1`.
    CompoundPoisson {
        rate: f64,
    },
}

pub const DEFAULT_REFINEMENT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationPlan {
    pub fine_delta: f64,
    pub out_delta: f64,
    pub n_out: usize,
    pub seed: u64,
    pub driver: Driver,
}

impl SimulationPlan {
    pub fn new(out_delta: f64, n_out: usize, seed: u64) -> Self {
        Self {
            fine_delta: out_delta / DEFAULT_REFINEMENT as f64,
            out_delta,
            n_out,
            seed,
            driver: Driver::Gaussian,
        }
    }

    pub fn with_refinement(mut self, factor: usize) -> Self {
        self.fine_delta = self.out_delta / factor as f64;
        self
    }

    pub fn with_driver(mut self, driver: Driver) -> Self {
        self.driver = driver;
        self
    }

    /// `out_delta / fine_delta`, validated to be a positive integer.
    pub fn refinement(&self) -> Result<usize> {
        self.validate()?;
        Ok((self.out_delta / self.fine_delta).round() as usize)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.out_delta > 0.0 && self.fine_delta > 0.0 && self.out_delta.is_finite()) {
            return Err(Error::InvalidPlan("grid spacings must be positive".into()));
        }
        if self.n_out == 0 {
            return Err(Error::InvalidPlan("n_out must be at least 1".into()));
        }
        let ratio = self.out_delta / self.fine_delta;
        if ratio.round() < 1.0 || (ratio - ratio.round()).abs() > 1e-9 * ratio {
            return Err(Error::InvalidPlan(format!(
                "out_delta / fine_delta = {ratio} is not a positive integer"
            )));
        }
        if let Driver::CompoundPoisson { rate } = self.driver {
            if !(rate > 0.0 && rate.is_finite()) {
                return Err(Error::InvalidPlan(format!("jump rate must be positive, got {rate}")));
            }
        }
        Ok(())
    }
}

/// Generator for `(seed, stream)`; streams are independent of each other and
/// of the order in which they are drawn.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn normal(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

const CLIP_TOL: f64 = 1e-8;
const EMBEDDING_DOUBLINGS: usize = 2;

/// Stationary Gaussian path with autocovariance `acvf` on the fine grid,
/// subsampled to `out_delta`. Draws from stream 0 of `plan.seed`.
pub fn simulate_gaussian_cma<F>(acvf: F, plan: &SimulationPlan) -> Result<SampledSeries>
where
    F: Fn(f64) -> Result<f64>,
{
    simulate_gaussian_cma_stream(acvf, plan, 0)
}

pub fn simulate_gaussian_cma_stream<F>(acvf: F, plan: &SimulationPlan, stream: u64) -> Result<SampledSeries>
where
    F: Fn(f64) -> Result<f64>,
{
    if plan.driver != Driver::Gaussian {
        return Err(Error::InvalidPlan("circulant embedding needs a Gaussian driver".into()));
    }
    let r = plan.refinement()?;
    let n_fine = (plan.n_out - 1) * r + 1;
    let fine = circulant_path(&acvf, plan.fine_delta, n_fine, &mut rng_for(plan.seed, stream))?;
    let values = fine.iter().step_by(r).copied().collect::<Vec<_>>();
    series(plan.out_delta, values)
}

fn series(delta: f64, values: Vec<f64>) -> Result<SampledSeries> {
    if values.len() >= 2 {
        SampledSeries::new(delta, values)
    } else {
        Ok(SampledSeries {
            delta,
            values,
            mean_removed: false,
        })
    }
}

fn circulant_path<F>(acvf: &F, delta: f64, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    let base = (2 * n.max(2) - 2).next_power_of_two();
    let mut planner = FftPlanner::new();
    let mut worst = 0.0;
    for attempt in 0..=EMBEDDING_DOUBLINGS {
        let m = base << attempt;
        let mut c = Vec::with_capacity(m);
        for k in 0..m {
            let lag = k.min(m - k);
            c.push(Complex64::new(acvf(lag as f64 * delta)?, 0.0));
        }
        planner.plan_fft_forward(m).process(&mut c);
        let max = c.iter().map(|z| z.re).fold(0.0, f64::max);
        let min = c.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        if min < -CLIP_TOL * max {
            worst = -min / max;
            continue;
        }
        if min < 0.0 {
            warn!("clipping circulant eigenvalues down to {min:e} (max {max:e})");
        }
        let scale = 1.0 / m as f64;
        let mut w: Vec<Complex64> = c
            .iter()
            .map(|z| {
                let s = (z.re.max(0.0) * scale).sqrt();
                Complex64::new(s * normal(rng), s * normal(rng))
            })
            .collect();
        planner.plan_fft_forward(m).process(&mut w);
        return Ok(w[..n].iter().map(|z| z.re).collect());
    }
    Err(Error::EmbeddingFailure { min: -worst, max: 1.0 })
}

/// Companion-form state space `dX = A X dt + e dL`, `Y = b' X`.
#[derive(Debug, Clone)]
pub struct StateSpace {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub sigma2: f64,
}

impl StateSpace {
    pub fn from_model(model: &CarmaModel) -> Self {
        let p = model.p();
        let mut a = DMatrix::zeros(p, p);
        for i in 0..p - 1 {
            a[(i, i + 1)] = 1.0;
        }
        for (j, aj) in model.ar().iter().enumerate() {
            a[(p - 1, p - 1 - j)] = -aj;
        }
        let mut b = DVector::zeros(p);
        for (j, bj) in model.ma().iter().enumerate() {
            b[j] = *bj;
        }
        Self {
            a,
            b,
            sigma2: model.sigma2(),
        }
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn transition(&self, h: f64) -> DMatrix<f64> {
        (&self.a * h).exp()
    }

    /// `sigma^2 int_0^h e^{Au} e e' e^{A'u} du` by composite Gauss–Kronrod.
    pub fn noise_covariance(&self, h: f64) -> DMatrix<f64> {
        let p = self.dim();
        let mut q = DMatrix::zeros(p, p);
        const PANELS: usize = 4;
        let w = h / PANELS as f64;
        for i in 0..p {
            for j in 0..=i {
                let mut total = 0.0;
                for k in 0..PANELS {
                    let (v, _) = gauss_kronrod_15(
                        &mut |u: f64| {
                            let m = (&self.a * u).exp();
                            m[(i, p - 1)] * m[(j, p - 1)]
                        },
                        k as f64 * w,
                        (k + 1) as f64 * w,
                    );
                    total += v;
                }
                q[(i, j)] = self.sigma2 * total;
                q[(j, i)] = q[(i, j)];
            }
        }
        q
    }

    /// Stationary covariance: solves `A S + S A' + sigma^2 e e' = 0`.
    pub fn stationary_covariance(&self) -> Result<DMatrix<f64>> {
        let p = self.dim();
        let id = DMatrix::<f64>::identity(p, p);
        let lhs = id.kronecker(&self.a) + self.a.kronecker(&id);
        let mut rhs = DVector::zeros(p * p);
        // column-major vec of -sigma^2 e e'
        rhs[p * p - 1] = -self.sigma2;
        let s = lhs
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::NonStationaryInit("singular Lyapunov system".into()))?;
        let s = DMatrix::from_column_slice(p, p, s.as_slice());
        let s = (&s + s.transpose()) * 0.5;
        Ok(s)
    }
}

/// Symmetric square root factor `L` with `L L' = S`, negative eigenvalues
/// clipped to zero.
fn psd_factor(s: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = s.clone().symmetric_eigen();
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| v.max(0.0).sqrt()));
    &eig.eigenvectors * d
}

fn draw(l: &DMatrix<f64>, rng: &mut impl Rng) -> DVector<f64> {
    let z = DVector::from_fn(l.ncols(), |_, _| normal(rng));
    l * z
}

/// CARMA path at `plan.out_delta`, started from the stationary law. A
/// Gaussian driver is discretised exactly; a compound-Poisson driver runs on
/// the fine grid and needs a refinement of at least 16.
pub fn simulate_carma_statespace(model: &CarmaModel, plan: &SimulationPlan) -> Result<SampledSeries> {
    simulate_carma_statespace_stream(model, plan, 0)
}

pub fn simulate_carma_statespace_stream(
    model: &CarmaModel,
    plan: &SimulationPlan,
    stream: u64,
) -> Result<SampledSeries> {
    let r = plan.refinement()?;
    let ss = StateSpace::from_model(model);
    let mut rng = rng_for(plan.seed, stream);
    let sigma = ss.stationary_covariance()?;
    let mut x = draw(&psd_factor(&sigma), &mut rng);
    let mut out = Vec::with_capacity(plan.n_out);
    out.push(ss.b.dot(&x));
    match plan.driver {
        Driver::Gaussian => {
            let f = ss.transition(plan.out_delta);
            let l = psd_factor(&ss.noise_covariance(plan.out_delta));
            for _ in 1..plan.n_out {
                x = &f * x + draw(&l, &mut rng);
                out.push(ss.b.dot(&x));
            }
        }
        Driver::CompoundPoisson { rate } => {
            if r < DEFAULT_REFINEMENT {
                return Err(Error::InvalidPlan(format!(
                    "compound-Poisson driver needs refinement >= {DEFAULT_REFINEMENT}, got {r}"
                )));
            }
            let dt = plan.fine_delta;
            let poisson = Poisson::new(rate * dt).map_err(|e| Error::InvalidPlan(e.to_string()))?;
            let jump_sd = (ss.sigma2 / rate).sqrt();
            let f = ss.transition(dt);
            let kick = ss.transition(0.5 * dt).column(ss.dim() - 1).into_owned();
            for _ in 1..plan.n_out {
                for _ in 0..r {
                    let count: f64 = poisson.sample(&mut rng);
                    let dl = if count > 0.0 {
                        jump_sd * count.sqrt() * normal(&mut rng)
                    } else {
                        0.0
                    };
                    x = &f * x + &kick * dl;
                }
                out.push(ss.b.dot(&x));
            }
        }
    }
    series(plan.out_delta, out)
}

/// Fine-grid scheme `X_{k+1} = e^{A dt} X_k + e^{A dt/2} e dL_k` driven by
/// given increments, started at zero, output every `every` steps.
pub fn carma_path_from_increments(model: &CarmaModel, dt: f64, increments: &[f64], every: usize) -> Vec<f64> {
    let ss = StateSpace::from_model(model);
    let f = ss.transition(dt);
    let kick = ss.transition(0.5 * dt).column(ss.dim() - 1).into_owned();
    let mut x = DVector::zeros(ss.dim());
    let mut out = vec![0.0];
    for (k, dl) in increments.iter().enumerate() {
        x = &f * x + &kick * *dl;
        if (k + 1) % every == 0 {
            out.push(ss.b.dot(&x));
        }
    }
    out
}

/// Unit-variance Gaussian increments `N(0, dt)` on stream `stream`.
pub fn brownian_increments(seed: u64, stream: u64, dt: f64, n: usize) -> Vec<f64> {
    let mut rng = rng_for(seed, stream);
    let sd = dt.sqrt();
    (0..n).map(|_| sd * normal(&mut rng)).collect()
}
