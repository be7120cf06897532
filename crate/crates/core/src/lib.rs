//! Monte Carlo quadrature on the unit sphere with determinantal point processes.
//!
//! Four node-set generators are provided and compared through weighted
//! estimators of `∫_{S²} f dvol`, where `dvol` is the normalized uniform
//! measure:
//!
//! * i.i.d. uniform points,
//! * randomized generalized spiral points,
//! * the spherical ensemble (eigenvalues of `A B⁻¹` for complex Ginibre
//!   matrices), which is the DPP whose kernel is the Bergman kernel of the
//!   `k`-th power of the tautological bundle with the Fubini–Study weight,
//! * a tensor Legendre projection DPP on `[-1,1]²` pushed onto the sphere by
//!   the cylindrical equal-area map.
//!
//! The [`harness`] module runs repetition studies and fits log–log variance
//! slopes; [`cli`] wraps everything in a command-line tool.

pub mod bergman;
pub mod cli;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod matrix_models;
pub mod orthopoly;
pub mod quadrature;
pub mod samplers;
pub mod sphere;

pub use error::{Error, Result};
pub use estimators::{builtin_integrand, estimate, Estimate, Integrand};
pub use samplers::{Method, SpiralConfig, WeightedSample};
pub use sphere::{Rotation3, SpherePoint, StereoCoord};
