//! Distributional checks of the samplers and estimators against oracles
//! (uniform measure, kernel intensities, exact integrals).

mod common;

use std::f64::consts::PI;

use rayon::prelude::*;
use sphere_dpp::estimators::{
    builtin_integrand, estimate, estimate_reweighted, exact_integral_oracle, Integrand,
};
use sphere_dpp::harness::{derive_seed, run_variance_study, ExperimentConfig};
use sphere_dpp::matrix_models::spherical_ensemble;
use sphere_dpp::orthopoly::DegreeSet;
use sphere_dpp::quadrature::gauss_legendre;
use sphere_dpp::samplers::{
    sample_arcsine_2d, sample_iid_uniform, sample_spherical, sample_spiral, JacobiSampler, Method,
    SpiralConfig,
};
use sphere_dpp::sphere::{
    apply_rotation, inverse_stereographic, random_rotation, uniform_cap_fraction, SpherePoint,
};

const SIGNIFICANCE: f64 = 1e-3;

fn par_map<T: Send>(
    reps: usize,
    seed: u64,
    f: impl Fn(&mut rand_chacha::ChaCha8Rng) -> T + Sync,
) -> Vec<T> {
    (0..reps)
        .into_par_iter()
        .map(|i| {
            f(&mut common::rng(
                seed.wrapping_mul(1_000_003).wrapping_add(i as u64),
            ))
        })
        .collect()
}

#[test]
fn one_point_spherical_ensemble_is_uniform() {
    let z: Vec<f64> = par_map(100_000, 1, |rng| {
        let zeta = spherical_ensemble(1, rng).unwrap();
        inverse_stereographic(&zeta[0]).z
    });
    let p = common::ks_pvalue(&z, common::uniform_cdf(-1.0, 1.0));
    assert!(p > SIGNIFICANCE, "KS p-value {p}");
}

#[test]
fn one_point_legendre_ensemble_is_uniform() {
    let sampler = JacobiSampler::new(1).unwrap();
    let x: Vec<f64> = par_map(100_000, 2, |rng| {
        sampler.sample(rng).unwrap().square_coords().unwrap()[0][0]
    });
    let p = common::ks_pvalue(&x, common::uniform_cdf(-1.0, 1.0));
    assert!(p > SIGNIFICANCE, "KS p-value {p}");
}

#[test]
fn haar_rotation_moves_a_point_uniformly() {
    let p = SpherePoint::new(0.3, -0.2, 0.9);
    let z: Vec<f64> = par_map(100_000, 3, |rng| {
        apply_rotation(&random_rotation(rng), &p).z
    });
    let pv = common::ks_pvalue(&z, common::uniform_cdf(-1.0, 1.0));
    assert!(pv > SIGNIFICANCE, "KS p-value {pv}");
}

#[test]
fn iid_points_fill_hemispheres_evenly() {
    let s = sample_iid_uniform(100_000, &mut common::rng(4)).unwrap();
    let hits: Vec<f64> = s
        .points()
        .iter()
        .map(|p| if p.z >= 0.0 { 1.0 } else { 0.0 })
        .collect();
    let (ok, msg) = common::within_se(&hits, 0.5, 4.0);
    assert!(ok, "{msg}");
}

#[test]
fn arcsine_proposal_matches_its_density() {
    let mut rng = common::rng(5);
    let draws: Vec<f64> = (0..50_000)
        .flat_map(|_| sample_arcsine_2d(&mut rng))
        .collect();
    let below: Vec<f64> = draws
        .iter()
        .map(|&x| if x <= 0.0 { 1.0 } else { 0.0 })
        .collect();
    let (ok, msg) = common::within_se(&below, 0.5, 4.0);
    assert!(ok, "CDF at 0: {msg}");
    let (ok, msg) = common::within_se(&draws, 0.0, 4.0);
    assert!(ok, "mean: {msg}");

    // F(x) = 1 − arccos(x)/π on 20 equal bins of (−1, 1)
    let bins = 20;
    let cdf = |x: f64| 1.0 - x.clamp(-1.0, 1.0).acos() / PI;
    let mut counts = vec![0u64; bins];
    for &x in &draws {
        counts[(((x + 1.0) / 2.0 * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let expected: Vec<f64> = (0..bins)
        .map(|i| {
            let a = -1.0 + 2.0 * i as f64 / bins as f64;
            let b = -1.0 + 2.0 * (i + 1) as f64 / bins as f64;
            draws.len() as f64 * (cdf(b) - cdf(a))
        })
        .collect();
    let p = common::chi2_pvalue(&counts, &expected);
    assert!(p > SIGNIFICANCE, "χ² p-value {p}");
}

#[test]
fn rotated_spiral_is_uniform_on_average() {
    let cfg = SpiralConfig::default();
    let fractions: Vec<f64> = par_map(1000, 6, |rng| {
        let s = sample_spiral(50, &cfg, rng).unwrap();
        s.points().iter().filter(|p| p.z >= 0.0).count() as f64 / 50.0
    });
    let (ok, msg) = common::within_se(&fractions, 0.5, 4.0);
    assert!(ok, "{msg}");
}

#[test]
fn spherical_ensemble_is_rotation_invariant_with_uniform_intensity() {
    let n = 64;
    let samples: Vec<Vec<SpherePoint>> = par_map(400, 7, |rng| {
        sample_spherical(n, rng).unwrap().points().to_vec()
    });
    let per_sample = |f: &dyn Fn(&SpherePoint) -> f64| -> Vec<f64> {
        samples
            .iter()
            .map(|s| s.iter().map(f).sum::<f64>() / n as f64)
            .collect()
    };
    for (name, coord) in [("x", 0usize), ("y", 1), ("z", 2)] {
        let (ok, msg) = common::within_se(&per_sample(&|p| p.to_array()[coord]), 0.0, 4.0);
        assert!(ok, "mean {name}: {msg}");
    }
    for z0 in [-0.5, 0.0, 0.5] {
        let frac = per_sample(&|p| if p.z >= z0 { 1.0 } else { 0.0 });
        let (ok, msg) = common::within_se(&frac, uniform_cap_fraction(z0), 4.0);
        assert!(ok, "cap z ≥ {z0}: {msg}");
    }
}

/// Probability of each cell of an 8×8 grid under `K_N(x,x)/N dx`.
fn intensity_cell_masses(ds: &DegreeSet, bins: usize) -> Vec<f64> {
    let gl = gauss_legendre(8);
    let h = 2.0 / bins as f64;
    let n = ds.len() as f64;
    let mut masses = Vec::with_capacity(bins * bins);
    for i in 0..bins {
        for j in 0..bins {
            let (a, b) = (-1.0 + i as f64 * h, -1.0 + j as f64 * h);
            let mut total = 0.0;
            for &(u, wu) in &gl {
                for &(v, wv) in &gl {
                    let x = [a + 0.5 * h * (u + 1.0), b + 0.5 * h * (v + 1.0)];
                    total += wu * wv * 0.25 * h * h * ds.kernel_diag(x);
                }
            }
            masses.push(total / n);
        }
    }
    masses
}

#[test]
fn legendre_ensemble_intensity_matches_kernel() {
    let n = 4;
    let bins = 8;
    let sampler = JacobiSampler::new(n).unwrap();
    let masses = intensity_cell_masses(sampler.degrees(), bins);
    assert!((masses.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    let points: Vec<[f64; 2]> = par_map(20_000, 8, |rng| {
        sampler
            .sample(rng)
            .unwrap()
            .square_coords()
            .unwrap()
            .to_vec()
    })
    .into_iter()
    .flatten()
    .collect();
    let cell = |x: f64| (((x + 1.0) / 2.0 * bins as f64) as usize).min(bins - 1);
    let mut counts = vec![0u64; bins * bins];
    for x in &points {
        counts[cell(x[0]) * bins + cell(x[1])] += 1;
    }
    let expected: Vec<f64> = masses.iter().map(|m| m * points.len() as f64).collect();
    let p = common::chi2_pvalue(&counts, &expected);
    assert!(p > SIGNIFICANCE, "χ² p-value {p}");
}

fn estimates(method: Method, n: usize, f: &Integrand, reps: usize, master: u64) -> Vec<f64> {
    let jacobi = (method == Method::Jacobi).then(|| JacobiSampler::new(n).unwrap());
    let spiral = SpiralConfig::default();
    (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = common::rng(derive_seed(master, method, n, rep));
            let s = match &jacobi {
                Some(j) => j.sample(&mut rng).unwrap(),
                None => sphere_dpp::samplers::draw(method, n, &spiral, &mut rng).unwrap(),
            };
            estimate(&s, f).unwrap().value
        })
        .collect()
}

#[test]
fn estimators_are_unbiased() {
    for method in [Method::Iid, Method::Spherical, Method::Jacobi] {
        for name in ["f1", "f2"] {
            let f = builtin_integrand(name).unwrap();
            let exact = f.exact().unwrap().value;
            let values = estimates(method, 64, &f, 2000, 9);
            let (ok, msg) = common::within_se(&values, exact, 4.0);
            assert!(ok, "{method}/{name}: {msg}");
        }
    }
}

#[test]
fn legendre_weights_integrate_constants_on_average() {
    let one = builtin_integrand("const1").unwrap();
    let values = estimates(Method::Jacobi, 16, &one, 2000, 10);
    let (ok, msg) = common::within_se(&values, 1.0, 4.0);
    assert!(ok, "{msg}");
}

#[test]
fn iid_variance_matches_the_textbook_formula() {
    let f1 = builtin_integrand("f1").unwrap();
    let f1_sq = Integrand::new("f1^2", |p| sphere_dpp::estimators::f1(p).powi(2));
    let mean = exact_integral_oracle(&f1).unwrap();
    let var_f = exact_integral_oracle(&f1_sq).unwrap() - mean * mean;
    let cfg = ExperimentConfig {
        methods: vec![Method::Iid],
        n_list: vec![100],
        reps: 2000,
        integrand: "f1".into(),
        master_seed: 12,
        ..ExperimentConfig::default()
    };
    let out = run_variance_study(&cfg).unwrap();
    let observed = out.summary.rows[0].variance;
    let predicted = var_f / 100.0;
    assert!(
        (observed / predicted - 1.0).abs() <= 0.10,
        "observed {observed:.4e}, predicted {predicted:.4e}"
    );
}

#[test]
fn reweighted_spherical_estimator_is_unbiased() {
    let f1 = builtin_integrand("f1").unwrap();
    let psi = |p: &SpherePoint| 0.5 * p.z;
    let target = exact_integral_oracle(&Integrand::new("f1·e^-ψ", move |p| {
        sphere_dpp::estimators::f1(p) * (-psi(p)).exp()
    }))
    .unwrap();
    let values: Vec<f64> = par_map(2000, 13, |rng| {
        let s = sample_spherical(64, rng).unwrap();
        estimate_reweighted(&s, &f1, psi).unwrap()
    });
    let (ok, msg) = common::within_se(&values, target, 4.0);
    assert!(ok, "{msg}");
}
