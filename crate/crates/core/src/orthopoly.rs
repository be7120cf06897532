//! Orthonormal Legendre polynomials on `[-1, 1]` and the tensor projection
//! kernel they span on the square `[-1, 1]²`.

use crate::error::{Error, Result};

/// Orthonormal Legendre polynomial `p_n = √((2n+1)/2) P_n` (Lebesgue measure
/// on `[-1, 1]`), via the three-term recurrence.
pub fn legendre_orthonormal(n: usize, x: f64) -> f64 {
    let mut buf = vec![0.0; n + 1];
    legendre_orthonormal_all(x, &mut buf);
    buf[n]
}

/// Fills `out[j] = p_j(x)` for `j < out.len()` in a single recurrence pass.
pub fn legendre_orthonormal_all(x: f64, out: &mut [f64]) {
    let len = out.len();
    if len == 0 {
        return;
    }
    // P_{j+1} = ((2j+1) x P_j − j P_{j−1}) / (j+1)
    let mut prev = 0.0;
    let mut cur = 1.0;
    for (j, slot) in out.iter_mut().enumerate() {
        *slot = cur * ((2 * j + 1) as f64 / 2.0).sqrt();
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0) * x * cur - jf * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
}

pub fn is_perfect_square(n: usize) -> bool {
    let m = integer_sqrt(n);
    m * m == n
}

pub(crate) fn integer_sqrt(n: usize) -> usize {
    let mut m = (n as f64).sqrt() as usize;
    while m * m > n {
        m -= 1;
    }
    while (m + 1) * (m + 1) <= n {
        m += 1;
    }
    m
}

/// Ordered bivariate degrees `(a, b)`: graded by `max(a, b)`, lexicographic
/// within a grade. The first `m²` entries are exactly `{0,…,m−1}²`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSet {
    pairs: Vec<(usize, usize)>,
    max_degree: usize,
}

impl DegreeSet {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("degree set needs N >= 1".into()));
        }
        // grade g in lexicographic order: (0,g), …, (g−1,g), (g,0), …, (g,g)
        let pairs: Vec<(usize, usize)> = (0..)
            .flat_map(|g| {
                (0..g)
                    .map(move |a| (a, g))
                    .chain((0..=g).map(move |b| (g, b)))
            })
            .take(n)
            .collect();
        let max_degree = pairs.iter().map(|&(a, b)| a.max(b)).max().unwrap_or(0);
        Ok(DegreeSet { pairs, max_degree })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// `φ_α(x) = p_a(x₁) p_b(x₂)` for every `(a, b)` in order.
    pub fn feature_vector(&self, x: [f64; 2]) -> Vec<f64> {
        let mut scratch = FeatureScratch::new(self);
        let mut out = vec![0.0; self.len()];
        self.feature_vector_into(x, &mut scratch, &mut out);
        out
    }

    /// Allocation-free variant of [`DegreeSet::feature_vector`].
    pub fn feature_vector_into(&self, x: [f64; 2], scratch: &mut FeatureScratch, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.len());
        legendre_orthonormal_all(x[0], &mut scratch.first);
        legendre_orthonormal_all(x[1], &mut scratch.second);
        for (slot, &(a, b)) in out.iter_mut().zip(&self.pairs) {
            *slot = scratch.first[a] * scratch.second[b];
        }
    }

    /// `K_N(x, x) = Σ_α φ_α(x)²`.
    pub fn kernel_diag(&self, x: [f64; 2]) -> f64 {
        self.feature_vector(x).iter().map(|v| v * v).sum()
    }
}

/// Per-axis recurrence buffers for [`DegreeSet::feature_vector_into`].
#[derive(Debug, Clone)]
pub struct FeatureScratch {
    first: Vec<f64>,
    second: Vec<f64>,
}

impl FeatureScratch {
    pub fn new(ds: &DegreeSet) -> Self {
        FeatureScratch {
            first: vec![0.0; ds.max_degree + 1],
            second: vec![0.0; ds.max_degree + 1],
        }
    }
}

pub fn make_degree_set(n: usize) -> Result<DegreeSet> {
    DegreeSet::new(n)
}

pub fn feature_vector(ds: &DegreeSet, x: [f64; 2]) -> Vec<f64> {
    ds.feature_vector(x)
}

pub fn kernel_diag_2d(ds: &DegreeSet, x: [f64; 2]) -> f64 {
    ds.kernel_diag(x)
}
