//! Points, charts and rotations on the unit sphere `S² ⊂ R³`.
//!
//! The complex chart used throughout is the stereographic projection from the
//! north pole, centred at the south pole: `ζ = (x + iy) / (1 − z)`. The north
//! pole has no coordinate in this chart and is reported as
//! [`Error::ChartFailure`].

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Below this value of `1 − z` a point is treated as the north pole.
pub const NORTH_POLE_TOLERANCE: f64 = 1e-14;

/// A point of the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SpherePoint {
    /// Projects a nonzero vector of R³ radially onto the sphere.
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        let norm = x.hypot(y).hypot(z);
        assert!(
            norm > 0.0 && norm.is_finite(),
            "cannot normalize ({x}, {y}, {z})"
        );
        SpherePoint {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        }
    }

    /// Colatitude `theta ∈ [0, π]` measured from the north pole, azimuth `phi`.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        SpherePoint::new(st * cp, st * sp, ct)
    }

    pub fn north_pole() -> Self {
        SpherePoint {
            x: 0.0,
            y: 0.0,
            z: 1.0,
        }
    }

    pub fn south_pole() -> Self {
        SpherePoint {
            x: 0.0,
            y: 0.0,
            z: -1.0,
        }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, other: &SpherePoint) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y).hypot(self.z)
    }

    /// Great-circle distance.
    pub fn angle_to(&self, other: &SpherePoint) -> f64 {
        // atan2 form stays accurate for nearly equal and nearly antipodal points
        let cross = [
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        ];
        let sin = cross[0].hypot(cross[1]).hypot(cross[2]);
        sin.atan2(self.dot(other))
    }
}

/// Coordinate `ζ` in the chart of the sphere minus the north pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StereoCoord {
    pub re: f64,
    pub im: f64,
}

impl StereoCoord {
    pub fn new(re: f64, im: f64) -> Self {
        StereoCoord { re, im }
    }

    pub fn as_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl From<Complex64> for StereoCoord {
    fn from(c: Complex64) -> Self {
        StereoCoord { re: c.re, im: c.im }
    }
}

/// `ζ = (x + iy) / (1 − z)`.
///
/// On the northern hemisphere the equivalent form `(1 + z)(x + iy) / (x² + y²)`
/// is used, which avoids the cancellation in `1 − z`.
pub fn stereographic_south(p: &SpherePoint) -> Result<StereoCoord> {
    let one_minus_z = 1.0 - p.z;
    if one_minus_z < NORTH_POLE_TOLERANCE {
        return Err(Error::ChartFailure(p.to_array()));
    }
    if p.z <= 0.0 {
        return Ok(StereoCoord::new(p.x / one_minus_z, p.y / one_minus_z));
    }
    let rho2 = p.x * p.x + p.y * p.y;
    if rho2 == 0.0 {
        return Err(Error::ChartFailure(p.to_array()));
    }
    let scale = (1.0 + p.z) / rho2;
    Ok(StereoCoord::new(p.x * scale, p.y * scale))
}

/// Inverse of [`stereographic_south`]: `(2Re ζ, 2Im ζ, |ζ|² − 1) / (1 + |ζ|²)`.
///
/// For `|ζ| ≥ 1` the quotient is rewritten in terms of `|ζ|` and `1/|ζ|` so
/// that no `|ζ|²` product is formed; eigenvalues from the spherical ensemble
/// routinely exceed `1e8` in modulus.
pub fn inverse_stereographic(zeta: &StereoCoord) -> SpherePoint {
    debug_assert!(zeta.is_finite());
    let r = zeta.abs();
    if r <= 1.0 {
        let r2 = r * r;
        let denom = 1.0 + r2;
        return SpherePoint::new(
            2.0 * zeta.re / denom,
            2.0 * zeta.im / denom,
            (r2 - 1.0) / denom,
        );
    }
    let inv = 1.0 / r;
    // 2ζ/(1+r²) = 2 (ζ/r) / (r + 1/r)
    let s = r + inv;
    let x = 2.0 * (zeta.re * inv) / s;
    let y = 2.0 * (zeta.im * inv) / s;
    let z = (r - inv) / s;
    SpherePoint::new(x, y, z)
}

/// Cylindrical equal-area map `[-1,1]² → S²`:
/// `(u, v) ↦ (√(1−u²) cos(π(v+1)), √(1−u²) sin(π(v+1)), u)`.
///
/// The pushforward of `¼·Lebesgue` on the square is the uniform probability
/// measure on the sphere.
pub fn square_to_sphere(u: f64, v: f64) -> SpherePoint {
    debug_assert!((-1.0..=1.0).contains(&u) && (-1.0..=1.0).contains(&v));
    let rho = (1.0 - u * u).max(0.0).sqrt();
    let (s, c) = (PI * (v + 1.0)).sin_cos();
    SpherePoint::new(rho * c, rho * s, u)
}

/// Uniform measure of the cap `{p : p.z ≥ z0}` (Archimedes).
pub fn uniform_cap_fraction(z0: f64) -> f64 {
    debug_assert!((-1.0..=1.0).contains(&z0));
    (1.0 - z0) / 2.0
}

/// A proper rotation of R³, stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation3 {
    m: [[f64; 3]; 3],
}

impl Rotation3 {
    pub fn identity() -> Self {
        Rotation3 {
            m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    /// Rotation matrix of the unit quaternion `w + xi + yj + zk`. The
    /// quaternion is normalized first.
    pub fn from_quaternion(w: f64, x: f64, y: f64, z: f64) -> Self {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        assert!(n > 0.0, "zero quaternion");
        let (w, x, y, z) = (w / n, x / n, y / n, z / n);
        Rotation3 {
            m: [
                [
                    1.0 - 2.0 * (y * y + z * z),
                    2.0 * (x * y - w * z),
                    2.0 * (x * z + w * y),
                ],
                [
                    2.0 * (x * y + w * z),
                    1.0 - 2.0 * (x * x + z * z),
                    2.0 * (y * z - w * x),
                ],
                [
                    2.0 * (x * z - w * y),
                    2.0 * (y * z + w * x),
                    1.0 - 2.0 * (x * x + y * y),
                ],
            ],
        }
    }

    /// Rotation by `angle` about the unit vector `axis`.
    pub fn about_axis(axis: [f64; 3], angle: f64) -> Self {
        let (s, c) = (angle / 2.0).sin_cos();
        let n = axis[0].hypot(axis[1]).hypot(axis[2]);
        Rotation3::from_quaternion(c, s * axis[0] / n, s * axis[1] / n, s * axis[2] / n)
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        self.m
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Largest entry of `|RᵀR − I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        let m = &self.m;
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| m[k][i] * m[k][j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// Haar-distributed rotation, from a uniformly distributed unit quaternion
/// built out of four standard normals.
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> Rotation3 {
    loop {
        let q: [f64; 4] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let n2: f64 = q.iter().map(|c| c * c).sum();
        if n2 > 1e-300 {
            return Rotation3::from_quaternion(q[0], q[1], q[2], q[3]);
        }
    }
}

/// `R p`, renormalized to unit length.
pub fn apply_rotation(rot: &Rotation3, p: &SpherePoint) -> SpherePoint {
    let m = &rot.m;
    let v = [p.x, p.y, p.z];
    let out: [f64; 3] = std::array::from_fn(|i| m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2]);
    SpherePoint::new(out[0], out[1], out[2])
}
