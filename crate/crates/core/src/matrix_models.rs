//! Complex Ginibre matrices and the spherical ensemble.
//!
//! The spherical ensemble with `n` points is the law of the eigenvalues of
//! `A B⁻¹` for independent `n × n` complex Ginibre matrices `A`, `B`. Its
//! joint density in the south-centred chart is proportional to
//! `Π_{i<j} |ζ_i − ζ_j|² Π_i (1 + |ζ_i|²)^{-(n+1)}`, the Bergman DPP of degree
//! `k = n − 1`.

use std::f64::consts::FRAC_1_SQRT_2;

use faer::diag::Diag;
use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self, ComputeEigenvectors};
use faer::linalg::lu::partial_pivoting::{factor, solve};
use faer::{c64, Mat, MatRef, Par};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::sphere::StereoCoord;

/// Resampling budget for a singular `B` or an eigensolver failure.
pub const MAX_ATTEMPTS: usize = 8;

/// Relative pivot size below which `B` is treated as singular.
pub const SINGULAR_PIVOT_RATIO: f64 = 1e-12;

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        ComplexMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("matrix must be square".into()));
        }
        let data: Vec<Complex64> = rows.iter().flatten().copied().collect();
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument(
                "matrix entries must be finite".into(),
            ));
        }
        Ok(ComplexMatrix { n, data })
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = ComplexMatrix::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn scaled(&self, c: f64) -> Self {
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    fn to_faer(&self) -> Mat<c64> {
        Mat::from_fn(self.n, self.n, |i, j| self[(i, j)])
    }

    fn to_faer_transposed(&self) -> Mat<c64> {
        Mat::from_fn(self.n, self.n, |i, j| self[(j, i)])
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// Eigenvalues of a general complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub values: Vec<Complex64>,
    pub converged: bool,
}

/// `n × n` matrix of i.i.d. standard complex normals: real and imaginary
/// parts independent `N(0, 1/2)`, so `E|z|² = 1`.
pub fn sample_ginibre<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    assert!(n >= 1);
    let data = (0..n * n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
        })
        .collect();
    ComplexMatrix { n, data }
}

fn eigenvalues_faer(m: MatRef<'_, c64>) -> SpectrumResult {
    let n = m.nrows();
    let par = Par::Seq;
    let mut s = Diag::<c64>::zeros(n);
    let mut buf = MemBuffer::new(evd::evd_scratch::<c64>(
        n,
        ComputeEigenvectors::No,
        ComputeEigenvectors::No,
        par,
        Default::default(),
    ));
    let outcome = evd::evd_cplx(
        m,
        s.as_mut(),
        None,
        None,
        par,
        MemStack::new(&mut buf),
        Default::default(),
    );
    match outcome {
        Ok(()) => {
            let values: Vec<Complex64> = s.column_vector().iter().copied().collect();
            let converged = values.iter().all(|z| z.re.is_finite() && z.im.is_finite());
            SpectrumResult { values, converged }
        }
        Err(_) => SpectrumResult {
            values: Vec::new(),
            converged: false,
        },
    }
}

/// All eigenvalues of `m` with multiplicity (Hessenberg–Schur QR, sequential).
pub fn eigenvalues_general(m: &ComplexMatrix) -> SpectrumResult {
    eigenvalues_faer(m.to_faer().as_ref())
}

/// Eigenvalues of `A B⁻¹`, or `None` if `B` is numerically singular or the
/// eigensolver fails.
///
/// `X = A B⁻¹` is never formed through an inverse: `Bᵀ Xᵀ = Aᵀ` is solved
/// with the LU factors of `B`, and `Xᵀ` (same spectrum as `X`) is handed to
/// the eigensolver.
pub fn quotient_eigenvalues(a: &ComplexMatrix, b: &ComplexMatrix) -> Option<Vec<Complex64>> {
    let n = b.dim();
    assert_eq!(a.dim(), n);
    let par = Par::Seq;

    let mut lu = b.to_faer();
    let mut perm = vec![0usize; n];
    let mut perm_inv = vec![0usize; n];
    let mut buf = MemBuffer::new(
        factor::lu_in_place_scratch::<usize, c64>(n, n, par, Default::default()).or(
            solve::solve_transpose_in_place_scratch::<usize, c64>(n, n, par),
        ),
    );
    let (_, row_perm) = factor::lu_in_place(
        lu.as_mut(),
        &mut perm,
        &mut perm_inv,
        par,
        MemStack::new(&mut buf),
        Default::default(),
    );

    let threshold = SINGULAR_PIVOT_RATIO * b.frobenius_norm();
    let min_pivot = (0..n)
        .map(|i| lu[(i, i)].norm())
        .fold(f64::INFINITY, f64::min);
    if min_pivot.is_nan() || min_pivot < threshold {
        return None;
    }

    let mut xt = a.to_faer_transposed();
    solve::solve_transpose_in_place(
        lu.as_ref(),
        lu.as_ref(),
        row_perm,
        xt.as_mut(),
        par,
        MemStack::new(&mut buf),
    );

    let spectrum = eigenvalues_faer(xt.as_ref());
    (spectrum.converged && spectrum.values.len() == n).then_some(spectrum.values)
}

/// One draw of the `n`-point spherical ensemble in the south-centred chart.
pub fn spherical_ensemble<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<StereoCoord>> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "spherical ensemble needs n >= 1".into(),
        ));
    }
    for _ in 0..MAX_ATTEMPTS {
        let a = sample_ginibre(n, rng);
        let b = sample_ginibre(n, rng);
        if let Some(values) = quotient_eigenvalues(&a, &b) {
            if values.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                return Ok(values.into_iter().map(StereoCoord::from).collect());
            }
        }
    }
    Err(Error::RetriesExhausted {
        attempts: MAX_ATTEMPTS,
    })
}
