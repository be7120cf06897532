//! Deterministic product quadrature rules used as integration oracles.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

use crate::sphere::SpherePoint;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let n = NonZeroUsize::new(n).expect("quadrature rule needs at least one node");
    GaussLegendre::new(n).as_node_weight_pairs().to_vec()
}

/// Product rule for the normalized uniform measure on `S²`: Gauss–Legendre in
/// `z` (Archimedes makes `z` uniform on `[-1,1]`) and the trapezoid rule in
/// azimuth.
#[derive(Debug, Clone)]
pub struct SphereRule {
    nodes: Vec<(SpherePoint, f64)>,
}

impl SphereRule {
    pub fn new(n_z: usize, n_azimuth: usize) -> Self {
        assert!(n_azimuth > 0);
        let gl = gauss_legendre(n_z);
        let mut nodes = Vec::with_capacity(n_z * n_azimuth);
        let dphi = 2.0 * PI / n_azimuth as f64;
        for &(z, w) in &gl {
            let rho = (1.0 - z * z).sqrt();
            for j in 0..n_azimuth {
                let (s, c) = (j as f64 * dphi).sin_cos();
                let p = SpherePoint::new(rho * c, rho * s, z);
                nodes.push((p, 0.5 * w / n_azimuth as f64));
            }
        }
        SphereRule { nodes }
    }

    pub fn nodes(&self) -> &[(SpherePoint, f64)] {
        &self.nodes
    }

    pub fn integrate<F: FnMut(&SpherePoint) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().map(|(p, w)| w * f(p)).sum()
    }
}

/// Tensor Gauss–Legendre rule on `[-1,1]²` against Lebesgue measure.
pub fn square_rule(n: usize) -> Vec<([f64; 2], f64)> {
    let gl = gauss_legendre(n);
    let mut out = Vec::with_capacity(n * n);
    for &(u, wu) in &gl {
        for &(v, wv) in &gl {
            out.push(([u, v], wu * wv));
        }
    }
    out
}
