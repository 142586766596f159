use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use cma_kernel::estimation::{
    default_m, estimate_kernel, grid_points, sample_acvf, AcvfSequence, EstimateOptions, KernelEstimate, KernelInput,
    MRule, SampledSeries,
};
use cma_kernel::quadrature::QuadratureConfig;
use cma_kernel::simulation::{
    simulate_carma_statespace, simulate_gaussian_cma, Driver, GammaKernelModel, SimulationPlan,
};
use cma_kernel::spectral_empirical::{periodogram, spectrum_from_kernel_at, welch, WelchConfig};
use cma_kernel::spectral_theory::{c_alpha, kolmogorov_sigma2, s_p_alpha, tail_index_diagnostic};
use cma_kernel::study::{run_clt_study, McConfig};
use cma_kernel::wold::{alpha_polynomial, asymptotic_sigma2_delta, eta_of_xi};
use cma_kernel::CarmaModel;

use crate::args::*;
use crate::error::CliError;
use crate::io::{fmt, read_series, sidecar_path, write_json, write_series, Sidecar, Table};

const MAX_WELCH_SEGMENT: usize = 1 << 22;

enum Model {
    Carma(CarmaModel),
    Gamma(GammaKernelModel),
}

impl Model {
    fn build(a: &ModelArgs) -> Result<Self, CliError> {
        Ok(match a.kind {
            ModelKind::Ou => Model::Carma(CarmaModel::ornstein_uhlenbeck(a.lambda.unwrap_or(-1.0), a.sigma2)?),
            ModelKind::Carma => {
                if a.ar.is_empty() {
                    return Err(CliError::Usage("--model carma needs --ar".into()));
                }
                let ma = if a.ma.is_empty() { vec![1.0] } else { a.ma.clone() };
                Model::Carma(CarmaModel::new(&a.ar, &ma, a.sigma2)?)
            }
            ModelKind::Gamma => Model::Gamma(GammaKernelModel::new(a.nu, a.lambda.unwrap_or(1.0), a.sigma2)?),
        })
    }

    fn carma(self, what: &str) -> Result<CarmaModel, CliError> {
        match self {
            Model::Carma(m) => Ok(m),
            Model::Gamma(_) => Err(CliError::Usage(format!("{what} needs a CARMA model (ou or carma)"))),
        }
    }

    fn exact_acvf(&self, delta: f64, max_lag: usize) -> Result<Vec<f64>, CliError> {
        Ok(match self {
            Model::Carma(m) => m.sampled_autocovariance(delta, max_lag)?,
            Model::Gamma(g) => (0..=max_lag)
                .map(|k| g.acvf(k as f64 * delta))
                .collect::<Result<_, _>>()?,
        })
    }
}

pub fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Simulate(a) => simulate(&a),
        Command::Estimate(a) => estimate(&a),
        Command::Asymptotics { table } => asymptotics(&table),
        Command::Spectrum(a) => spectrum(&a),
        Command::McStudy(a) => mc_study(&a),
    }
}

fn model_json(a: &ModelArgs) -> Value {
    serde_json::to_value(a).unwrap_or(Value::Null)
}

fn simulate(a: &SimulateArgs) -> Result<(), CliError> {
    let model = Model::build(&a.model)?;
    let series = match (model, a.driver) {
        (Model::Gamma(g), DriverArg::Gaussian) => {
            let plan = SimulationPlan::new(a.delta, a.n, a.seed).with_refinement(a.refinement.unwrap_or(1));
            simulate_gaussian_cma(|h| g.acvf(h), &plan)?
        }
        (Model::Gamma(_), DriverArg::Poisson) => {
            return Err(CliError::Usage("the gamma simulator is Gaussian only".into()));
        }
        (Model::Carma(m), DriverArg::Gaussian) => {
            let plan = SimulationPlan::new(a.delta, a.n, a.seed).with_refinement(a.refinement.unwrap_or(1));
            simulate_carma_statespace(&m, &plan)?
        }
        (Model::Carma(m), DriverArg::Poisson) => {
            let plan = SimulationPlan::new(a.delta, a.n, a.seed)
                .with_refinement(a.refinement.unwrap_or(16))
                .with_driver(Driver::CompoundPoisson { rate: a.rate });
            simulate_carma_statespace(&m, &plan)?
        }
    };
    let meta = Sidecar {
        delta: a.delta,
        n: series.len(),
        format: String::new(),
        seed: Some(a.seed),
        model: Some(model_json(&a.model)),
    };
    match &a.out {
        Some(p) => write_series(p, &series, meta),
        None => {
            let mut t = Table::new(&["t", "value"]);
            for (i, v) in series.values.iter().enumerate() {
                t.push(vec![fmt(i as f64 * a.delta), fmt(*v)]);
            }
            t.emit(None)
        }
    }
}

fn options(method: MethodArg, m: Option<usize>, tmax: f64, h: f64) -> EstimateOptions {
    EstimateOptions {
        t_max: tmax,
        method: method.into(),
        m,
        offset_h: h,
        ..EstimateOptions::default()
    }
}

fn kernel_table(est: &KernelEstimate) -> Table {
    let mut t = Table::new(&["t", "g_hat", "band"]);
    for (j, (tj, g)) in est.times().iter().zip(&est.g_hat).enumerate() {
        let b = est.band.as_ref().map_or(String::new(), |b| fmt(b[j]));
        t.push(vec![fmt(*tj), fmt(*g), b]);
    }
    t
}

fn kernel_summary(est: &KernelEstimate) -> Value {
    json!({
        "method": est.method.name(),
        "m": est.m_used,
        "delta": est.delta,
        "offset_h": est.offset_h,
        "points": est.g_hat.len(),
        "n": est.n,
        "innovation_variance": est.innovation_variance,
    })
}

fn input_series(input: &Option<std::path::PathBuf>, delta: Option<f64>) -> Result<SampledSeries, CliError> {
    let p = input
        .as_ref()
        .ok_or_else(|| CliError::Usage("--input is required".into()))?;
    read_series(p, delta)
}

fn estimate(a: &EstimateArgs) -> Result<(), CliError> {
    let opts = options(a.method, a.m, a.tmax, a.h);
    let est = if a.from_exact_acvf {
        let delta = a
            .delta
            .ok_or_else(|| CliError::Usage("--from-exact-acvf needs --delta".into()))?;
        if delta.is_nan() || delta <= 0.0 {
            return Err(CliError::Usage(format!("--delta must be positive, got {delta}")));
        }
        let model = Model::build(&a.model)?;
        let m =
            a.m.unwrap_or_else(|| default_m(MRule::ThreeN, grid_points(delta, a.tmax), None));
        let acvf = AcvfSequence::exact(model.exact_acvf(delta, m)?)?;
        estimate_kernel(KernelInput::Acvf { acvf: &acvf, delta }, &opts)?
    } else {
        let s = input_series(&a.input, a.delta)?;
        estimate_kernel(KernelInput::Series(&s), &opts)?
    };
    kernel_table(&est).emit(a.out.as_deref())?;
    let summary = kernel_summary(&est);
    match (&a.summary, &a.out) {
        (Some(p), _) => write_json(p, &summary),
        (None, Some(out)) => write_json(&sidecar_path(out), &summary),
        (None, None) => {
            eprintln!("{summary}");
            Ok(())
        }
    }
}

fn alpha_grid(g: &GridArgs) -> Result<Vec<f64>, CliError> {
    match g.points {
        0 => Err(CliError::Usage("--points must be at least 1".into())),
        1 => Ok(vec![g.from]),
        k => Ok((0..k)
            .map(|i| g.from + (g.to - g.from) * i as f64 / (k - 1) as f64)
            .collect()),
    }
}

fn asymptotics(t: &AsymptoticsTable) -> Result<(), CliError> {
    match t {
        AsymptoticsTable::CAlpha(g) => {
            let mut out = Table::new(&["alpha", "c_alpha"]);
            for al in alpha_grid(g)? {
                out.push(vec![fmt(al), fmt(c_alpha(al)?)]);
            }
            out.emit(g.out.as_deref())
        }
        AsymptoticsTable::SPAlpha(a) => {
            let mut out = Table::new(&["p", "alpha", "s_p_alpha"]);
            for al in alpha_grid(&a.grid)? {
                out.push(vec![a.p.to_string(), fmt(al), fmt(s_p_alpha(a.p, al)?)]);
            }
            out.emit(a.grid.out.as_deref())
        }
        AsymptoticsTable::Sigma2(a) => {
            let model = Model::build(&a.model)?.carma("sigma2")?;
            if a.k_from > a.k_to || a.k_to > 30 {
                return Err(CliError::Usage("need k_from <= k_to <= 30".into()));
            }
            let cfg = QuadratureConfig {
                abs_tol: 1e-14,
                rel_tol: 1e-12,
                max_intervals: 4000,
            };
            let mut out = Table::new(&["delta", "asymptotic", "kolmogorov", "ratio"]);
            for k in a.k_from..=a.k_to {
                let d = 0.5f64.powi(k as i32);
                let asym = asymptotic_sigma2_delta(&model, d)?;
                let exact = kolmogorov_sigma2(|w| model.sampled_spectral_density(d, w).unwrap_or(f64::NAN), &cfg)?;
                out.push(vec![fmt(d), fmt(asym), fmt(exact), fmt(asym / exact)]);
            }
            out.emit(a.out.as_deref())
        }
        AsymptoticsTable::Xi(a) => {
            if a.pq == 0 {
                return Err(cma_kernel::Error::DomainError("p - q must be positive".into()).into());
            }
            let poly = alpha_polynomial(a.pq - 1)?;
            let mut out = Table::new(&["i", "xi_re", "xi_im", "eta_re", "eta_im"]);
            for (i, xi) in poly.xi.iter().enumerate() {
                let eta = eta_of_xi(*xi)?;
                out.push(vec![
                    (i + 1).to_string(),
                    fmt(xi.re),
                    fmt(xi.im),
                    fmt(eta.re),
                    fmt(eta.im),
                ]);
            }
            out.emit(a.out.as_deref())
        }
    }
}

fn default_segment(n: usize) -> usize {
    if n >= MAX_WELCH_SEGMENT {
        return MAX_WELCH_SEGMENT;
    }
    let target = (n / 16).max(2);
    1 << (usize::BITS - 1 - target.leading_zeros())
}

fn spectrum(a: &SpectrumArgs) -> Result<(), CliError> {
    let s = input_series(&a.input, a.delta)?;
    let n = s.len();
    let delta = s.delta;
    fs::create_dir_all(&a.out_dir).map_err(|e| CliError::Io(format!("{}: {e}", a.out_dir.display())))?;
    let dir: &Path = &a.out_dir;

    let lags = grid_points(delta, a.tmax).min(n.saturating_sub(1));
    let acvf = sample_acvf(&s, lags)?;
    let mut acf = Table::new(&["lag", "t", "acf"]);
    for (k, g) in acvf.gamma.iter().enumerate() {
        acf.push(vec![k.to_string(), fmt(k as f64 * delta), fmt(g / acvf.gamma[0])]);
    }
    acf.emit(Some(&dir.join("acf.csv")))?;

    let cfg = WelchConfig {
        overlap: a.overlap,
        ..WelchConfig::new(a.segment.unwrap_or_else(|| default_segment(n)))
    };
    let w = welch(&s, &cfg)?.to_hz();
    let pg = periodogram(&s).to_hz();
    let mut freqs = Vec::new();
    let mut values = Vec::new();
    let mut emp = Table::new(&["freq_hz", "density", "source"]);
    for (f, v) in pg.freqs.iter().zip(&pg.values).filter(|(f, _)| **f <= a.splice_hz) {
        emp.push(vec![fmt(*f), fmt(*v), "periodogram".into()]);
        freqs.push(*f);
        values.push(*v);
    }
    for (f, v) in w.freqs.iter().zip(&w.values).filter(|(f, _)| **f > a.splice_hz) {
        emp.push(vec![fmt(*f), fmt(*v), "welch".into()]);
        freqs.push(*f);
        values.push(*v);
    }
    emp.emit(Some(&dir.join("spectrum_empirical.csv")))?;

    let est = estimate_kernel(KernelInput::Series(&s), &options(a.method, a.m, a.tmax, a.h))?;
    kernel_table(&est).emit(Some(&dir.join("kernel.csv")))?;

    let omegas: Vec<f64> = freqs.iter().map(|f| 2.0 * std::f64::consts::PI * f).collect();
    let ks = spectrum_from_kernel_at(&est, &omegas).to_hz();
    let mut kt = Table::new(&["freq_hz", "density"]);
    for (f, v) in ks.freqs.iter().zip(&ks.values) {
        kt.push(vec![fmt(*f), fmt(*v)]);
    }
    kt.emit(Some(&dir.join("spectrum_kernel.csv")))?;

    let nyquist = 0.5 / delta;
    let band = (
        a.tail_lo.unwrap_or(nyquist / 100.0),
        a.tail_hi.unwrap_or(nyquist / 10.0),
    );
    // A failed diagnostic is reported, not fatal: the plot data is still useful.
    let tail = |f: &[f64], v: &[f64]| match tail_index_diagnostic(f, v, band) {
        Ok(x) => json!(x),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let summary = json!({
        "n": n,
        "delta": delta,
        "welch": { "segment": cfg.segment_len, "overlap": cfg.overlap, "window": "hamming", "segments": w.segments },
        "splice_hz": a.splice_hz,
        "tail_band_hz": [band.0, band.1],
        "tail_index_empirical": tail(&freqs, &values),
        "tail_index_kernel": tail(&ks.freqs, &ks.values),
        "kernel": kernel_summary(&est),
    });
    write_json(&dir.join("spectrum.json"), &summary)
}

fn mc_study(a: &McStudyArgs) -> Result<(), CliError> {
    let model = Model::build(&a.model)?.carma("mc-study")?;
    let mut cfg = McConfig::new(model, a.delta, a.n, a.replications, a.seed);
    cfg.t_eval = a.t;
    cfg.method = a.method.into();
    cfg.m = a.m;
    cfg.offset_h = a.h;
    cfg.threads = a.threads;
    let study = run_clt_study(&cfg)?;
    let mut t = Table::new(&["replication", "g_hat", "scaled_error"]);
    for r in &study.replications {
        t.push(vec![r.index.to_string(), fmt(r.g_hat), fmt(r.scaled_error)]);
    }
    t.emit(a.out.as_deref())?;
    let summary = json!({
        "t_grid": study.t_grid,
        "g_true": study.g_true,
        "replications": study.replications.len(),
        "summary": study.summary.map(|s| json!({
            "mean": s.mean,
            "variance": s.variance,
            "std_error": s.std_error,
            "limit_variance": s.limit_variance,
            "skewness": s.skewness,
            "excess_kurtosis": s.excess_kurtosis,
            "jarque_bera": s.jarque_bera,
            "jarque_bera_p": s.jarque_bera_p,
        })),
    });
    match (&a.summary, &a.out) {
        (Some(p), _) => write_json(p, &summary),
        (None, Some(out)) => write_json(&sidecar_path(out), &summary),
        (None, None) => {
            eprintln!("{summary}");
            Ok(())
        }
    }
}
