//! Node-set generators on the sphere.
//!
//! Each generator returns a [`WeightedSample`] whose weights already encode
//! the estimator `Σ wᵢ f(pᵢ) ≈ ∫ f dvol`: `1/N` for the i.i.d., spiral and
//! spherical-ensemble nodes (the Bergman kernel diagonal is the constant
//! `N`), and `1/(4 K_N(xᵢ, xᵢ))` for the Legendre ensemble.

mod jacobi;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::distr::Open01;
use rand::Rng;

use crate::bergman::BergmanKernel;
use crate::error::{Error, Result};
use crate::matrix_models::spherical_ensemble;
use crate::sphere::{
    apply_rotation, inverse_stereographic, random_rotation, SpherePoint, StereoCoord,
};

pub use jacobi::{sample_jacobi_dpp, JacobiChain, JacobiSampler, PROPOSAL_BUDGET};

/// Node-set generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Iid,
    Spiral,
    Spherical,
    Jacobi,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Iid,
        Method::Spiral,
        Method::Spherical,
        Method::Jacobi,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Method::Iid => "iid",
            Method::Spiral => "spiral",
            Method::Spherical => "spherical",
            Method::Jacobi => "jacobi",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.tag() == s)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown method `{s}` (expected iid, spiral, spherical or jacobi)"
                ))
            })
    }
}

/// Spiral constant `C` in `φᵢ = C √N θᵢ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpiralConfig {
    c: f64,
}

impl SpiralConfig {
    pub const DEFAULT_C: f64 = 3.6;

    pub fn new(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "spiral constant must be positive, got {c}"
            )));
        }
        Ok(SpiralConfig { c })
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

impl Default for SpiralConfig {
    fn default() -> Self {
        SpiralConfig { c: Self::DEFAULT_C }
    }
}

/// Quadrature nodes with their weights and provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSample {
    points: Vec<SpherePoint>,
    weights: Vec<f64>,
    method: Method,
    seed: Option<u64>,
    chart: Option<Vec<StereoCoord>>,
    square: Option<Vec<[f64; 2]>>,
}

impl WeightedSample {
    pub fn new(method: Method, points: Vec<SpherePoint>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidSample("empty node set".into()));
        }
        if points.len() != weights.len() {
            return Err(Error::InvalidSample(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidSample(format!(
                "weight {w} is not positive and finite"
            )));
        }
        if method != Method::Jacobi {
            let equal = 1.0 / points.len() as f64;
            if weights.iter().any(|&w| w != equal) {
                return Err(Error::InvalidSample(format!(
                    "{method} samples must carry equal weights 1/N"
                )));
            }
        }
        Ok(WeightedSample {
            points,
            weights,
            method,
            seed: None,
            chart: None,
            square: None,
        })
    }

    fn equal_weights(method: Method, points: Vec<SpherePoint>) -> Result<Self> {
        let w = 1.0 / points.len() as f64;
        let weights = vec![w; points.len()];
        WeightedSample::new(method, points, weights)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub(crate) fn with_chart(mut self, chart: Vec<StereoCoord>) -> Self {
        debug_assert_eq!(chart.len(), self.points.len());
        self.chart = Some(chart);
        self
    }

    pub(crate) fn with_square(mut self, square: Vec<[f64; 2]>) -> Self {
        debug_assert_eq!(square.len(), self.points.len());
        self.square = Some(square);
        self
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Stereographic coordinates, for spherical-ensemble samples.
    pub fn chart_coords(&self) -> Option<&[StereoCoord]> {
        self.chart.as_deref()
    }

    /// Points of `[-1,1]²`, for Legendre-ensemble samples.
    pub fn square_coords(&self) -> Option<&[[f64; 2]]> {
        self.square.as_deref()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SpherePoint, f64)> {
        self.points.iter().zip(self.weights.iter().copied())
    }
}

/// `N` independent uniform points: `z ~ U[-1,1]`, azimuth `~ U[0, 2π)`.
pub fn sample_iid_uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<WeightedSample> {
    require_positive(n)?;
    let points = (0..n)
        .map(|_| {
            let z: f64 = rng.random_range(-1.0..=1.0);
            let phi: f64 = rng.random_range(0.0..2.0 * PI);
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let (s, c) = phi.sin_cos();
            SpherePoint::new(rho * c, rho * s, z)
        })
        .collect();
    WeightedSample::equal_weights(Method::Iid, points)
}

/// Generalized spiral points: `zᵢ = 1 − (2i−1)/N`, `θᵢ = arccos zᵢ`,
/// `φᵢ = C √N θᵢ mod 2π`, `i = 1..=N`.
pub fn spiral_points(n: usize, cfg: &SpiralConfig) -> Vec<SpherePoint> {
    let nf = n as f64;
    let turn = cfg.c() * nf.sqrt();
    (1..=n)
        .map(|i| {
            let z = 1.0 - (2 * i - 1) as f64 / nf;
            let theta = z.acos();
            let phi = (turn * theta).rem_euclid(2.0 * PI);
            SpherePoint::from_spherical(theta, phi)
        })
        .collect()
}

/// Spiral points moved by one Haar-random rotation shared by all nodes.
pub fn sample_spiral<R: Rng + ?Sized>(
    n: usize,
    cfg: &SpiralConfig,
    rng: &mut R,
) -> Result<WeightedSample> {
    require_positive(n)?;
    let rot = random_rotation(rng);
    let points = spiral_points(n, cfg)
        .iter()
        .map(|p| apply_rotation(&rot, p))
        .collect();
    WeightedSample::equal_weights(Method::Spiral, points)
}

/// Spherical ensemble with `N` points mapped to the sphere; weights are the
/// inverse kernel diagonal `1/B(ζ, ζ) = 1/N`.
pub fn sample_spherical<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<WeightedSample> {
    require_positive(n)?;
    let chart = spherical_ensemble(n, rng)?;
    let kernel = BergmanKernel::for_points(n);
    let points: Vec<SpherePoint> = chart.iter().map(inverse_stereographic).collect();
    let weights = chart.iter().map(|z| 1.0 / kernel.diag(z)).collect();
    Ok(WeightedSample::new(Method::Spherical, points, weights)?.with_chart(chart))
}

/// Product arcsine draw on `(-1,1)²`: `cos(πU)` per axis.
pub fn sample_arcsine_2d<R: Rng + ?Sized>(rng: &mut R) -> [f64; 2] {
    let u: f64 = rng.sample(Open01);
    let v: f64 = rng.sample(Open01);
    [(PI * u).cos(), (PI * v).cos()]
}

/// Density of [`sample_arcsine_2d`] w.r.t. Lebesgue measure on the square.
pub fn arcsine_density_2d(x: [f64; 2]) -> f64 {
    1.0 / (PI * PI * ((1.0 - x[0]) * (1.0 + x[0])).sqrt() * ((1.0 - x[1]) * (1.0 + x[1])).sqrt())
}

/// Draws one sample of `n` nodes from `method`.
pub fn draw<R: Rng + ?Sized>(
    method: Method,
    n: usize,
    spiral: &SpiralConfig,
    rng: &mut R,
) -> Result<WeightedSample> {
    match method {
        Method::Iid => sample_iid_uniform(n, rng),
        Method::Spiral => sample_spiral(n, spiral, rng),
        Method::Spherical => sample_spherical(n, rng),
        Method::Jacobi => sample_jacobi_dpp(n, rng),
    }
}

fn require_positive(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "sample size must be at least 1".into(),
        ));
    }
    Ok(())
}
