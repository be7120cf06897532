//! Weighted quadrature estimators and integrands.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::SphereRule;
use crate::samplers::{Method, WeightedSample};
use crate::sphere::SpherePoint;

type EvalFn = dyn Fn(&SpherePoint) -> Result<f64> + Send + Sync;

/// Known value of `∫ f dvol` together with where it comes from.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactIntegral {
    pub value: f64,
    pub note: &'static str,
}

/// A real function on the sphere.
#[derive(Clone)]
pub struct Integrand {
    name: String,
    eval: Arc<EvalFn>,
    exact: Option<ExactIntegral>,
}

impl fmt::Debug for Integrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Integrand")
            .field("name", &self.name)
            .field("exact", &self.exact)
            .finish_non_exhaustive()
    }
}

impl Integrand {
    /// Wraps an infallible function.
    pub fn new<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(&SpherePoint) -> f64 + Send + Sync + 'static,
    {
        Integrand::fallible(name, move |p| Ok(f(p)))
    }

    /// Wraps a function that may fail to evaluate (e.g. a parsed expression
    /// taking the log of a negative number).
    pub fn fallible<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(&SpherePoint) -> Result<f64> + Send + Sync + 'static,
    {
        Integrand {
            name: name.into(),
            eval: Arc::new(f),
            exact: None,
        }
    }

    pub fn with_exact(mut self, value: f64, note: &'static str) -> Self {
        self.exact = Some(ExactIntegral { value, note });
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn exact(&self) -> Option<&ExactIntegral> {
        self.exact.as_ref()
    }

    pub fn eval(&self, p: &SpherePoint) -> Result<f64> {
        let v = (self.eval)(p)?;
        if !v.is_finite() {
            return Err(Error::Evaluation(format!(
                "{} is not finite at ({}, {}, {})",
                self.name, p.x, p.y, p.z
            )));
        }
        Ok(v)
    }
}

/// `f₁(x,y,z) = z² 1_{z≥0}`.
pub fn f1(p: &SpherePoint) -> f64 {
    if p.z >= 0.0 {
        p.z * p.z
    } else {
        0.0
    }
}

/// `f₂(x,y,z) = |x|^{3/2} y z 1_{z≥0}`.
pub fn f2(p: &SpherePoint) -> f64 {
    if p.z >= 0.0 {
        p.x.abs().powf(1.5) * p.y * p.z
    } else {
        0.0
    }
}

pub const BUILTIN_NAMES: [&str; 4] = ["f1", "f2", "const1", "coord_z"];

/// Bundled integrands with their exact integrals against the uniform
/// probability measure.
pub fn builtin_integrand(name: &str) -> Result<Integrand> {
    let f = match name {
        // z is uniform on [-1,1] under dvol, so ∫f₁ = ½∫₀¹ t² dt
        "f1" => Integrand::new("f1", f1).with_exact(1.0 / 6.0, "hat-box: (1/2)∫_0^1 t^2 dt"),
        "f2" => Integrand::new("f2", f2).with_exact(0.0, "odd in y"),
        "const1" => Integrand::new("const1", |_| 1.0).with_exact(1.0, "probability measure"),
        "coord_z" => Integrand::new("coord_z", |p| p.z).with_exact(0.0, "odd in z"),
        other => return Err(Error::UnknownIntegrand(other.to_string())),
    };
    Ok(f)
}

/// One estimate `Σ wᵢ f(pᵢ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub method: Method,
    pub integrand: String,
    pub n: usize,
    pub seed: Option<u64>,
}

pub fn estimate(sample: &WeightedSample, f: &Integrand) -> Result<Estimate> {
    let mut value = 0.0;
    for (p, w) in sample.iter() {
        value += w * f.eval(p)?;
    }
    Ok(Estimate {
        value,
        method: sample.method(),
        integrand: f.name().to_string(),
        n: sample.len(),
        seed: sample.seed(),
    })
}

/// Estimate of `∫ f e^{-ψ} dvol` from the same nodes, with every weight
/// multiplied by `e^{-ψ(pᵢ)}`.
///
/// For the spherical ensemble this is the estimator built from the kernel of
/// the reweighted measure `e^{-ψ} dvol`, whose diagonal is `N e^{ψ}`.
pub fn estimate_reweighted<P>(sample: &WeightedSample, f: &Integrand, psi: P) -> Result<f64>
where
    P: Fn(&SpherePoint) -> f64,
{
    let mut value = 0.0;
    for (p, w) in sample.iter() {
        value += w * (-psi(p)).exp() * f.eval(p)?;
    }
    Ok(value)
}

pub const ORACLE_Z_NODES: usize = 512;
pub const ORACLE_AZIMUTH_NODES: usize = 1024;

/// Deterministic product quadrature of `f` against the uniform probability
/// measure (Gauss–Legendre in `z`, trapezoid in azimuth).
pub fn exact_integral_oracle(f: &Integrand) -> Result<f64> {
    let rule = SphereRule::new(ORACLE_Z_NODES, ORACLE_AZIMUTH_NODES);
    let mut total = 0.0;
    for (p, w) in rule.nodes() {
        total += w * f.eval(p)?;
    }
    Ok(total)
}
