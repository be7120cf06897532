//! Statistical helpers shared by the integration tests.
#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sample mean and standard error of the mean.
pub fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// `|mean − target| ≤ k · SE`, with the numbers for a failure message.
pub fn within_se(values: &[f64], target: f64, k: f64) -> (bool, String) {
    let (mean, se) = mean_se(values);
    let ok = (mean - target).abs() <= k * se;
    (
        ok,
        format!("mean {mean:.6e}, target {target:.6e}, SE {se:.3e}"),
    )
}

/// Asymptotic Kolmogorov–Smirnov p-value of `samples` against the CDF `cdf`.
pub fn ks_pvalue(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0f64, f64::max);
    let sqrt_n = n.sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    kolmogorov_q(lambda)
}

/// `Q(λ) = 2 Σ_{j≥1} (−1)^{j−1} exp(−2 j² λ²)`.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=200 {
        let j = j as f64;
        let term = (-2.0 * j * j * lambda * lambda).exp();
        sum += if j as u64 % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

pub fn uniform_cdf(a: f64, b: f64) -> impl Fn(f64) -> f64 {
    move |x| ((x - a) / (b - a)).clamp(0.0, 1.0)
}

/// Pearson χ² p-value of observed counts against expected counts.
pub fn chi2_pvalue(observed: &[u64], expected: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected.len());
    let stat: f64 = observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum();
    let df = (observed.len() - 1) as f64;
    ChiSquared::new(df).unwrap().sf(stat)
}

/// `E[x^a y^b z^c]` under the uniform probability measure on the sphere:
/// zero if any exponent is odd, else `(a−1)!!(b−1)!!(c−1)!!/(a+b+c+1)!!`.
pub fn sphere_monomial_moment(a: u32, b: u32, c: u32) -> f64 {
    if a % 2 == 1 || b % 2 == 1 || c % 2 == 1 {
        return 0.0;
    }
    let dfact = |n: i64| (1..=n).rev().step_by(2).map(|k| k as f64).product::<f64>();
    dfact(a as i64 - 1) * dfact(b as i64 - 1) * dfact(c as i64 - 1) / dfact((a + b + c) as i64 + 1)
}

#[test]
fn helper_self_checks() {
    assert_eq!(sphere_monomial_moment(0, 0, 2), 1.0 / 3.0);
    assert!((sphere_monomial_moment(2, 2, 0) - 1.0 / 15.0).abs() < 1e-16);
    assert!((sphere_monomial_moment(0, 0, 4) - 1.0 / 5.0).abs() < 1e-16);
    assert!((kolmogorov_q(1.3581) - 0.05).abs() < 1e-3);
    let grid: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
    assert!(ks_pvalue(&grid, uniform_cdf(0.0, 1.0)) > 0.99);
    assert!(chi2_pvalue(&[100, 100], &[100.0, 100.0]) > 0.99);
}
