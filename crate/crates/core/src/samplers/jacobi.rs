//! Exact sampling of the Legendre projection DPP on `[-1,1]²`.
//!
//! The chain rule for a rank-`N` projection kernel `K_N(x,y) = φ(x)·φ(y)`:
//! given `j` accepted points whose feature vectors span an orthonormal set
//! `e_1..e_j`, the next point has Lebesgue density
//!
//! ```text
//! (K_N(x,x) − Σ_{i≤j} ⟨e_i, φ(x)⟩²) / (N − j).
//! ```
//!
//! Each conditional is drawn by rejection from the product arcsine law. Its
//! density cancels the `1/√(1−x²)` growth of the Christoffel function, so a
//! single constant `C₀ ≥ sup K_N(x,x) / (N q(x))` calibrated on a grid bounds
//! every step as `C₀ N / (N − j)`.

use std::f64::consts::PI;

use rand::Rng;

use super::{arcsine_density_2d, sample_arcsine_2d, Method, WeightedSample};
use crate::error::{Error, Result};
use crate::orthopoly::{is_perfect_square, DegreeSet, FeatureScratch};
use crate::sphere::square_to_sphere;

/// Cap on the total number of proposals spent on one sample.
pub const PROPOSAL_BUDGET: u64 = 10_000_000;

const ENVELOPE_GRID: usize = 401;
const ENVELOPE_SAFETY: f64 = 1.1;
const CLAMP_TOLERANCE: f64 = 1e-12;

/// Sampler for one `N = m²`; the envelope constant is computed once and
/// shared by every draw.
#[derive(Debug, Clone)]
pub struct JacobiSampler {
    degrees: DegreeSet,
    envelope: f64,
}

/// Raw output of the chain, including the orthonormalized feature basis.
#[derive(Debug, Clone)]
pub struct JacobiChain {
    pub points: Vec<[f64; 2]>,
    /// `K_N(xᵢ, xᵢ)` at each accepted point.
    pub kernel_diag: Vec<f64>,
    pub proposals: u64,
    basis: Vec<f64>,
    n: usize,
}

impl JacobiChain {
    /// Largest entry of `|E Eᵀ − I|` for the orthonormalized basis.
    pub fn basis_gram_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            let ei = &self.basis[i * n..(i + 1) * n];
            for j in 0..=i {
                let ej = &self.basis[j * n..(j + 1) * n];
                let dot: f64 = ei.iter().zip(ej).map(|(a, b)| a * b).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

impl JacobiSampler {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || !is_perfect_square(n) {
            return Err(Error::NotPerfectSquare { n });
        }
        let degrees = DegreeSet::new(n)?;
        let envelope = ENVELOPE_SAFETY * envelope_ratio_max(&degrees);
        Ok(JacobiSampler { degrees, envelope })
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn degrees(&self) -> &DegreeSet {
        &self.degrees
    }

    /// `C₀`, the envelope constant of the first chain step.
    pub fn envelope_constant(&self) -> f64 {
        self.envelope
    }

    /// One draw; the sphere nodes are `Φ(xᵢ)` with weights `1/(4 K_N(xᵢ, xᵢ))`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<WeightedSample> {
        let chain = self.run_chain(rng)?;
        let points = chain
            .points
            .iter()
            .map(|x| square_to_sphere(x[0], x[1]))
            .collect();
        let weights = chain.kernel_diag.iter().map(|k| 1.0 / (4.0 * k)).collect();
        Ok(WeightedSample::new(Method::Jacobi, points, weights)?.with_square(chain.points))
    }

    pub fn run_chain<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<JacobiChain> {
        let n = self.degrees.len();
        let mut scratch = FeatureScratch::new(&self.degrees);
        let mut phi = vec![0.0; n];
        let mut basis: Vec<f64> = Vec::with_capacity(n * n);
        let mut points = Vec::with_capacity(n);
        let mut kernel_diag = Vec::with_capacity(n);
        let mut proposals = 0u64;

        for step in 0..n {
            let remaining = (n - step) as f64;
            let bound = self.envelope * n as f64 / remaining;
            loop {
                proposals += 1;
                if proposals > PROPOSAL_BUDGET {
                    return Err(Error::RejectionBudget {
                        budget: PROPOSAL_BUDGET,
                        step,
                    });
                }
                let x = sample_arcsine_2d(rng);
                let q = arcsine_density_2d(x);
                self.degrees.feature_vector_into(x, &mut scratch, &mut phi);
                let k: f64 = phi.iter().map(|v| v * v).sum();
                let projected: f64 = basis
                    .chunks_exact(n)
                    .map(|e| {
                        let c: f64 = e.iter().zip(&phi).map(|(a, b)| a * b).sum();
                        c * c
                    })
                    .sum();
                let mut residual = k - projected;
                if residual < 0.0 {
                    if residual < -CLAMP_TOLERANCE * k.max(1.0) {
                        return Err(Error::InvalidSample(format!(
                            "negative conditional density {residual} at step {step}"
                        )));
                    }
                    residual = 0.0;
                }
                let target = residual / remaining;
                let cap = bound * q;
                if target > cap {
                    return Err(Error::EnvelopeViolation {
                        step,
                        point: x,
                        ratio: target / cap,
                    });
                }
                let u: f64 = rng.random();
                if u * cap < target {
                    append_orthonormal(&mut basis, &mut phi, n);
                    points.push(x);
                    kernel_diag.push(k);
                    break;
                }
            }
        }
        Ok(JacobiChain {
            points,
            kernel_diag,
            proposals,
            basis,
            n,
        })
    }
}

/// Two passes of modified Gram–Schmidt against the rows of `basis`, then
/// appends the normalized residual of `v`.
fn append_orthonormal(basis: &mut Vec<f64>, v: &mut [f64], n: usize) {
    for _ in 0..2 {
        for e in basis.chunks_exact(n) {
            let c: f64 = e.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
            for (vi, ei) in v.iter_mut().zip(e) {
                *vi -= c * ei;
            }
        }
    }
    let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    basis.extend(v.iter().map(|a| a / norm));
}

/// `max K_N(x,x) / (N q(x))` over a tensor grid of Chebyshev points, which
/// is uniform in the arcsine angle and resolves the boundary layer.
fn envelope_ratio_max(degrees: &DegreeSet) -> f64 {
    let n = degrees.len() as f64;
    let axis: Vec<f64> = (0..ENVELOPE_GRID)
        .map(|i| (PI * (i as f64 + 0.5) / ENVELOPE_GRID as f64).cos())
        .collect();
    let mut scratch = FeatureScratch::new(degrees);
    let mut phi = vec![0.0; degrees.len()];
    let mut best = 0.0f64;
    for &u in &axis {
        for &v in &axis {
            degrees.feature_vector_into([u, v], &mut scratch, &mut phi);
            let k: f64 = phi.iter().map(|a| a * a).sum();
            best = best.max(k / (n * arcsine_density_2d([u, v])));
        }
    }
    best
}

/// Draws one Legendre-ensemble sample of size `n` (a perfect square).
pub fn sample_jacobi_dpp<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<WeightedSample> {
    JacobiSampler::new(n)?.sample(rng)
}
