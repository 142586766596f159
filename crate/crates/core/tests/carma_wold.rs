use approx::assert_relative_eq;
use num_complex::Complex64;
use proptest::prelude::*;

use cma_kernel::estimation::{innovations_algorithm, AcvfSequence};
use cma_kernel::quadrature::{integrate, QuadratureConfig};
use cma_kernel::spectral_theory::kolmogorov_sigma2;
use cma_kernel::wold::{
    alpha_polynomial, asymptotic_psi, asymptotic_sigma2_delta, eta_branches, eta_of_xi, eta_values, ma_factorization,
    wold_kernel_approx,
};
use cma_kernel::{CarmaModel, Error};

/// Distinct negative real roots built from positive gaps.
fn real_roots(gaps: &[f64]) -> Vec<Complex64> {
    let mut x = 0.0;
    gaps.iter()
        .map(|g| {
            x -= g;
            Complex64::new(x, 0.0)
        })
        .collect()
}

fn model_strategy() -> impl Strategy<Value = CarmaModel> {
    (
        prop::collection::vec(0.3f64..2.0, 1..=3),
        prop::bool::ANY,
        -1.5f64..-0.2,
    )
        .prop_map(|(gaps, with_ma, mu)| {
            let ar = real_roots(&gaps);
            let ma = if with_ma && ar.len() > 1 {
                vec![Complex64::new(mu, 0.0)]
            } else {
                vec![]
            };
            CarmaModel::from_roots(&ar, &ma, 1.0).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn acvf_is_even(m in model_strategy(), h in 0.0f64..5.0) {
        let a = m.autocovariance(h).unwrap();
        let b = m.autocovariance(-h).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn spectral_density_is_even_and_positive(m in model_strategy(), w in 0.01f64..50.0) {
        let f = m.spectral_density(w);
        prop_assert!(f > 0.0);
        prop_assert_eq!(f, m.spectral_density(-w));
    }

    #[test]
    fn variance_equals_kernel_energy(m in model_strategy()) {
        let cfg = QuadratureConfig::default();
        let (e, _) = integrate(|t: f64| m.kernel(t).unwrap().powi(2), 0.0, 60.0, &cfg).unwrap();
        let v = m.autocovariance(0.0).unwrap();
        prop_assert!((e - v).abs() <= 1e-8 * v.max(1.0), "{} vs {}", e, v);
    }

    #[test]
    fn sampled_density_integrates_to_variance(m in model_strategy(), k in 2u32..6) {
        let d = 0.5f64.powi(k as i32);
        let cfg = QuadratureConfig::default();
        let (tot, _) = integrate(
            |w: f64| m.sampled_spectral_density(d, w).unwrap(),
            -std::f64::consts::PI,
            std::f64::consts::PI,
            &cfg,
        )
        .unwrap();
        let v = m.autocovariance(0.0).unwrap();
        prop_assert!((tot - v).abs() <= 1e-7 * v, "{} vs {}", tot, v);
    }

    #[test]
    fn eta_branches_are_reciprocal(re in -20.0f64..20.0, im in -20.0f64..20.0) {
        prop_assume!(re.hypot(im) > 1e-3);
        let (a, b) = eta_branches(Complex64::new(re, im));
        prop_assert!(((a * b) - 1.0).norm() < 1e-9);
    }

    #[test]
    fn ma_coefficients_are_real_polynomial(m in model_strategy(), k in 3u32..8) {
        let d = 0.5f64.powi(k as i32);
        let f = ma_factorization(&m, d).unwrap();
        let c = f.ma_coefficients();
        prop_assert_eq!(c.len(), m.p());
        prop_assert_eq!(c[0], 1.0);
        prop_assert!(f.sigma2_delta > 0.0);
    }
}

#[test]
fn alpha_numerators_have_expected_degree_and_product() {
    for k in 0..=8 {
        let a = alpha_polynomial(k).unwrap();
        assert_eq!(a.numerator.len(), k + 1);
        assert_eq!(a.xi.len(), k);
        let expected: f64 = (1..=2 * k + 1).map(|i| i as f64).product::<f64>() / 2f64.powi(k as i32);
        assert_relative_eq!(a.root_product(), expected, max_relative = 1e-9);
    }
    assert!(matches!(alpha_polynomial(40), Err(Error::OrderTooLarge(40, _))));
}

#[test]
fn alpha_polynomial_matches_series_coefficients() {
    // sinh z / (cosh z - 1 + x) at small z, compared against sum_k alpha_k(x) z^{2k+1}
    let x = 1.7;
    let z = 0.05f64;
    let direct = z.sinh() / (z.cosh() - 1.0 + x);
    let series: f64 = (0..8)
        .map(|k| alpha_polynomial(k).unwrap().eval(x) * z.powi(2 * k as i32 + 1))
        .sum();
    assert_relative_eq!(direct, series, max_relative = 1e-13);
}

#[test]
fn eta_values_lie_in_unit_disc() {
    for d in 1..=7 {
        let etas = eta_values(d).unwrap();
        assert_eq!(etas.len(), d - 1);
        for e in etas {
            assert!(e.norm() < 1.0, "{e}");
        }
    }
    assert!(eta_values(0).is_err());
    assert!(eta_of_xi(Complex64::new(0.0, 0.0)).is_err());
}

#[test]
fn ou_wold_coefficients_are_exact() {
    let m = CarmaModel::ornstein_uhlenbeck(-0.7, 2.0).unwrap();
    let d = 0.1;
    let psi = asymptotic_psi(&m, d, 30).unwrap();
    for (j, p) in psi.iter().enumerate() {
        assert_relative_eq!(*p, (-0.7 * j as f64 * d).exp(), max_relative = 1e-12);
    }
    // CAR(1) sampled exactly is AR(1): sigma^2 (1 - e^{2 lambda delta}) / (-2 lambda)
    let exact = 2.0 * (1.0 - (-1.4 * d).exp()) / 1.4;
    assert_relative_eq!(asymptotic_sigma2_delta(&m, d).unwrap(), exact, max_relative = 0.02);
}

#[test]
fn wold_approx_converges_to_kernel() {
    let m = CarmaModel::new(&[6.0, 11.0, 6.0], &[0.5, 1.0], 1.0).unwrap();
    let mut prev = f64::INFINITY;
    for k in 4..=8 {
        let d = 0.5f64.powi(k);
        let w = wold_kernel_approx(&m, d, 4.0).unwrap();
        let gap = (0..400)
            .map(|i| {
                let t = 0.01 * i as f64;
                (w.eval(t).unwrap() - m.kernel(t).unwrap()).abs()
            })
            .fold(0.0, f64::max);
        assert!(gap < prev, "gap {gap} at delta {d}");
        prev = gap;
    }
    assert!(prev < 0.05);
}

#[test]
fn innovations_variance_approaches_kolmogorov() {
    let m = CarmaModel::new(&[3.0, 2.0], &[1.0], 1.0).unwrap();
    let d = 0.25;
    let acvf = AcvfSequence::exact(m.sampled_autocovariance(d, 200).unwrap()).unwrap();
    let fit = innovations_algorithm(&acvf, 200).unwrap();
    let cfg = QuadratureConfig::default();
    let kol = kolmogorov_sigma2(|w| m.sampled_spectral_density(d, w).unwrap(), &cfg).unwrap();
    assert_relative_eq!(fit.v[200], kol, max_relative = 1e-6);
    // v_k is nonincreasing
    assert!(fit.v.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
}

#[test]
fn bad_models_are_rejected() {
    assert!(matches!(
        CarmaModel::new(&[-1.0], &[1.0], 1.0),
        Err(Error::InvalidModel(_))
    ));
    assert!(CarmaModel::new(&[1.0], &[1.0, 1.0], 1.0).is_err());
    assert!(CarmaModel::new(&[1.0], &[1.0], -1.0).is_err());
}
