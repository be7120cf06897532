//! Bergman kernel of the space of holomorphic sections of `L^k` over the
//! Riemann sphere, with the weight `φ(ζ) = log(1 + |ζ|²)` and the uniform
//! probability measure.
//!
//! In the south-centred chart an orthonormal basis is
//! `s_ℓ(ζ) = √(k+1) √C(k,ℓ) ζ^ℓ`, `0 ≤ ℓ ≤ k`, and the kernel reads
//!
//! ```text
//! B(ζ, ξ) = (k+1) (1 + ζ ξ̄)^k / ((1 + |ζ|²)^{k/2} (1 + |ξ|²)^{k/2}),
//! ```
//!
//! so `B(ζ, ζ) = k + 1` everywhere. Every magnitude here is evaluated in the
//! log domain; `(1 + ζξ̄)^k` is never formed.

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use crate::sphere::StereoCoord;

/// `log(1 + |ζ|²)` without overflowing for huge `|ζ|`.
pub(crate) fn log1p_abs2(zeta: &StereoCoord) -> f64 {
    let r = zeta.abs();
    if r > 1e100 {
        2.0 * r.ln() + (1.0 / r).powi(2).ln_1p()
    } else {
        (r * r).ln_1p()
    }
}

/// `log C(k, ℓ)` through log-gamma.
pub fn ln_binomial(k: u32, l: u32) -> f64 {
    assert!(l <= k);
    if l == 0 || l == k {
        return 0.0;
    }
    ln_gamma(k as f64 + 1.0) - ln_gamma(l as f64 + 1.0) - ln_gamma((k - l) as f64 + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BergmanKernel {
    k: u32,
}

impl BergmanKernel {
    pub fn new(k: u32) -> Self {
        BergmanKernel { k }
    }

    /// Kernel whose DPP has `n ≥ 1` points (`k = n − 1`).
    pub fn for_points(n: usize) -> Self {
        assert!(n >= 1);
        BergmanKernel::new((n - 1) as u32)
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    /// Dimension `N_k = k + 1` of the section space.
    pub fn dim(&self) -> usize {
        self.k as usize + 1
    }

    /// `log |B(ζ, ξ)|²`. Returns `-∞` when `1 + ζξ̄ = 0` (antipodal points)
    /// for `k ≥ 1`.
    pub fn log_abs2(&self, zeta: &StereoCoord, xi: &StereoCoord) -> f64 {
        let k = self.k as f64;
        let base = 2.0 * (k + 1.0).ln();
        if self.k == 0 {
            return base;
        }
        let w = Complex64::new(1.0, 0.0) + zeta.as_complex() * xi.as_complex().conj();
        if w.re == 0.0 && w.im == 0.0 {
            return f64::NEG_INFINITY;
        }
        let log_w = w.re.hypot(w.im).ln();
        base + k * (2.0 * log_w - log1p_abs2(zeta) - log1p_abs2(xi))
    }

    /// `B(ζ, ξ)` as a complex number; modulus from the log domain, phase
    /// `k · arg(1 + ζξ̄)`.
    pub fn value(&self, zeta: &StereoCoord, xi: &StereoCoord) -> Complex64 {
        let log_abs2 = self.log_abs2(zeta, xi);
        if log_abs2 == f64::NEG_INFINITY {
            return Complex64::new(0.0, 0.0);
        }
        let w = Complex64::new(1.0, 0.0) + zeta.as_complex() * xi.as_complex().conj();
        Complex64::from_polar((0.5 * log_abs2).exp(), self.k as f64 * w.arg())
    }

    /// `B(ζ, ζ)`, which is the constant `k + 1`.
    pub fn diag(&self, _zeta: &StereoCoord) -> f64 {
        self.k as f64 + 1.0
    }

    /// Weighted section `s_ℓ(ζ) (1 + |ζ|²)^{-k/2}`.
    pub fn weighted_harmonic(&self, l: u32, zeta: &StereoCoord) -> Complex64 {
        assert!(l <= self.k, "harmonic index {l} exceeds degree {}", self.k);
        let k = self.k as f64;
        let r = zeta.abs();
        if r == 0.0 {
            return if l == 0 {
                Complex64::new((k + 1.0).sqrt(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        let log_mod = 0.5 * (k + 1.0).ln() + 0.5 * ln_binomial(self.k, l) + l as f64 * r.ln()
            - 0.5 * k * log1p_abs2(zeta);
        let phase = l as f64 * zeta.im.atan2(zeta.re);
        Complex64::from_polar(log_mod.exp(), phase)
    }
}
