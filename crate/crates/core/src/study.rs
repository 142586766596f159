//! Monte Carlo harness for the sampling distribution of `g_hat(t)`.

use log::warn;
use rayon::prelude::*;

use crate::carma::CarmaModel;
use crate::error::{Error, Result};
use crate::estimation::{
    default_m, estimate_kernel, grid_points, ArOrder, EstimateOptions, KernelInput, MRule, Method,
};
use crate::simulation::{simulate_carma_statespace_stream, SimulationPlan};

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "CMA_KERNEL_THREADS";

#[derive(Debug, Clone)]
pub struct McConfig {
    pub model: CarmaModel,
    pub delta: f64,
    pub n: usize,
    pub replications: usize,
    pub seed: u64,
    pub t_eval: f64,
    pub method: Method,
    pub m: Option<usize>,
    pub m_rule: MRule,
    pub offset_h: f64,
    pub threads: Option<usize>,
}

impl McConfig {
    pub fn new(model: CarmaModel, delta: f64, n: usize, replications: usize, seed: u64) -> Self {
        Self {
            model,
            delta,
            n,
            replications,
            seed,
            t_eval: 1.0,
            method: Method::Innovations,
            m: None,
            m_rule: MRule::ThreeN,
            offset_h: 0.5,
            threads: None,
        }
    }

    /// Grid index `floor(t / delta)` and its time `(j + h) delta`.
    pub fn grid_point(&self) -> (usize, f64) {
        let j = (self.t_eval / self.delta + 1e-9).floor() as usize;
        (j, (j as f64 + self.offset_h) * self.delta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McReplication {
    pub index: usize,
    pub g_hat: f64,
    /// `sqrt(n delta) (g_hat - sigma g)` at the grid time.
    pub scaled_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSummary {
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
    /// `int_0^t sigma^2 g^2(u) du` at the grid time.
    pub limit_variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub jarque_bera: f64,
    pub jarque_bera_p: f64,
}

#[derive(Debug, Clone)]
pub struct McStudy {
    pub t_grid: f64,
    pub g_true: f64,
    pub replications: Vec<McReplication>,
    /// `None` when fewer than two replications were run.
    pub summary: Option<McSummary>,
}

pub fn worker_threads(requested: Option<usize>) -> usize {
    let cap = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|v| *v > 0);
    let avail = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let n = requested.unwrap_or(avail);
    cap.map_or(n, |c| n.min(c)).max(1)
}

pub fn run_clt_study(cfg: &McConfig) -> Result<McStudy> {
    if cfg.replications == 0 {
        return Err(Error::InvalidPlan("at least one replication is required".into()));
    }
    let (j, t_grid) = cfg.grid_point();
    let sigma = cfg.model.sigma2().sqrt();
    let g_true = sigma * cfg.model.kernel(t_grid)?;
    let t_max = (j + 1) as f64 * cfg.delta;
    // resolved once here so the m-rule warning is not repeated per replication
    let m = match (cfg.m, cfg.method) {
        (None, Method::Innovations) => {
            let n_points = grid_points(cfg.delta, t_max);
            let m = default_m(cfg.m_rule, n_points, Some(cfg.n));
            if cfg.m_rule == MRule::ThreeN && m as f64 > (cfg.n as f64).cbrt() {
                warn!("m = 3N = {m} exceeds n^(1/3) = {:.1}", (cfg.n as f64).cbrt());
            }
            Some(m)
        }
        (m, _) => m,
    };
    let opts = EstimateOptions {
        t_max,
        method: cfg.method,
        m,
        m_rule: cfg.m_rule,
        ar_order: ArOrder::default(),
        offset_h: cfg.offset_h,
    };
    let plan = SimulationPlan::new(cfg.delta, cfg.n, cfg.seed).with_refinement(1);
    let root = (cfg.n as f64 * cfg.delta).sqrt();
    let one = |i: usize| -> Result<McReplication> {
        let s = simulate_carma_statespace_stream(&cfg.model, &plan, i as u64)?;
        let est = estimate_kernel(KernelInput::Series(&s), &opts)?;
        let g_hat = est.g_hat[j];
        Ok(McReplication {
            index: i,
            g_hat,
            scaled_error: root * (g_hat - g_true),
        })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_threads(cfg.threads))
        .build()
        .map_err(|e| Error::InvalidPlan(e.to_string()))?;
    let reps: Vec<McReplication> = pool.install(|| {
        (0..cfg.replications)
            .into_par_iter()
            .map(one)
            .collect::<Result<Vec<_>>>()
    })?;
    let limit_variance = cfg.model.sigma2() * kernel_l2(&cfg.model, t_grid)?;
    let errs: Vec<f64> = reps.iter().map(|r| r.scaled_error).collect();
    Ok(McStudy {
        t_grid,
        g_true,
        summary: summarize(&errs, limit_variance),
        replications: reps,
    })
}

/// `int_0^t g(u)^2 du` from the residue form of the kernel.
pub fn kernel_l2(model: &CarmaModel, t: f64) -> Result<f64> {
    let c = model.kernel_residues()?;
    let l = model.ar_roots();
    let mut acc = num_complex::Complex64::new(0.0, 0.0);
    for r in 0..c.len() {
        for s in 0..c.len() {
            let sum = l[r] + l[s];
            acc += c[r] * c[s] * ((sum * t).exp() - 1.0) / sum;
        }
    }
    Ok(crate::carma::realize(acc))
}

pub fn summarize(x: &[f64], limit_variance: f64) -> Option<McSummary> {
    let n = x.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mean = x.iter().sum::<f64>() / nf;
    let m2 = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / nf;
    let m3 = x.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / nf;
    let m4 = x.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / nf;
    let variance = m2 * nf / (nf - 1.0);
    let skewness = m3 / m2.powf(1.5);
    let excess_kurtosis = m4 / (m2 * m2) - 3.0;
    let jarque_bera = nf / 6.0 * (skewness * skewness + 0.25 * excess_kurtosis * excess_kurtosis);
    Some(McSummary {
        mean,
        variance,
        std_error: (variance / nf).sqrt(),
        limit_variance,
        skewness,
        excess_kurtosis,
        jarque_bera,
        // chi-square with two degrees of freedom
        jarque_bera_p: (-0.5 * jarque_bera).exp(),
    })
}
