//! Small dense complex matrices.
//!
//! A [`ComplexMatrix`] is the value type for Jacobians `f'(z)`: entry `(i, j)`
//! holds `∂f_i/∂z_j`. Matrices are immutable once built, so every operation
//! here is a pure function of its inputs.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Error, Result};

/// A complex number. Constructors in this crate reject non-finite components.
pub type ComplexScalar = Complex64;

const POWER_TOLERANCE: f64 = 1e-12;
const POWER_MAX_ITERATIONS: usize = 10_000;
const RESTART_SEED: u64 = 0x5eed_0f_b10c;

/// Euclidean norm of a vector in `ℂⁿ`.
pub fn vector_norm(v: &[ComplexScalar]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn is_finite(c: ComplexScalar) -> bool {
    c.re.is_finite() && c.im.is_finite()
}

/// Square complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    entries: Vec<ComplexScalar>,
}

impl ComplexMatrix {
    /// Builds an `n × n` matrix from row-major entries.
    pub fn new(n: usize, entries: Vec<ComplexScalar>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("matrix dimension must be at least 1".into()));
        }
        if entries.len() != n * n {
            return Err(Error::InvalidParameter(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|c| !is_finite(*c)) {
            return Err(Error::InvalidParameter(format!(
                "matrix entry ({}, {}) is not finite",
                pos / n,
                pos % n
            )));
        }
        Ok(Self { n, entries })
    }

    pub fn from_rows(rows: &[Vec<ComplexScalar>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter("matrix rows must all have length n".into()));
        }
        Self::new(n, rows.concat())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![ComplexScalar::new(1.0, 0.0); n])
            .expect("identity requires n >= 1")
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "matrix dimension must be at least 1");
        Self {
            n,
            entries: vec![ComplexScalar::new(0.0, 0.0); n * n],
        }
    }

    pub fn from_diagonal(diag: &[ComplexScalar]) -> Result<Self> {
        let n = diag.len();
        let mut entries = vec![ComplexScalar::new(0.0, 0.0); n * n];
        for (i, d) in diag.iter().enumerate() {
            entries[i * n + i] = *d;
        }
        Self::new(n, entries)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        let diag: Vec<_> = diag.iter().map(|&d| ComplexScalar::new(d, 0.0)).collect();
        Self::from_diagonal(&diag)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> ComplexScalar {
        self.entries[row * self.n + col]
    }

    /// Row-major view of the entries.
    pub fn entries(&self) -> &[ComplexScalar] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    pub fn mul_vec(&self, v: &[ComplexScalar]) -> Vec<ComplexScalar> {
        assert_eq!(v.len(), self.n, "vector length must match matrix dimension");
        self.entries
            .chunks_exact(self.n)
            .map(|row| row.iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.n != other.n {
            return Err(Error::InvalidParameter(format!(
                "cannot multiply {0}x{0} by {1}x{1}",
                self.n, other.n
            )));
        }
        let n = self.n;
        let mut out = vec![ComplexScalar::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                for j in 0..n {
                    out[i * n + j] += a * other.get(k, j);
                }
            }
        }
        ComplexMatrix::new(n, out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        let n = self.n;
        let mut out = vec![ComplexScalar::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                out[j * n + i] = self.get(i, j).conj();
            }
        }
        ComplexMatrix { n, entries: out }
    }

    pub fn scale(&self, c: ComplexScalar) -> ComplexMatrix {
        ComplexMatrix {
            n: self.n,
            entries: self.entries.iter().map(|e| e * c).collect(),
        }
    }

    /// Operator norm `max_{|θ|=1} |Aθ|`, i.e. the largest singular value.
    ///
    /// Runs power iteration on `AᴴA` from a fixed start vector and from one
    /// pseudo-random restart, and keeps the larger Rayleigh quotient.
    pub fn operator_norm(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let gram = self.adjoint().matmul(self).expect("same dimension");
        let n = self.n;
        let fixed: Vec<ComplexScalar> = (0..n)
            .map(|k| ComplexScalar::new(1.0, 0.25 * k as f64))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(RESTART_SEED);
        let random: Vec<ComplexScalar> = (0..n)
            .map(|_| ComplexScalar::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let top = power_iterate(&gram, fixed).max(power_iterate(&gram, random));
        top.max(0.0).sqrt()
    }

    /// Determinant by LU factorization with partial pivoting.
    pub fn determinant(&self) -> ComplexScalar {
        match Lu::factor(self) {
            Some(lu) => lu.determinant(),
            None => ComplexScalar::new(0.0, 0.0),
        }
    }

    /// Lower bound `|det A| / |A|^{n-1}` on `|Aθ|` over unit vectors `θ`.
    ///
    /// Since `|det A|` is the product of the singular values, the bound never
    /// exceeds the smallest singular value; unitary matrices attain it.
    pub fn min_stretch_lower_bound(&self) -> Result<f64> {
        let norm = self.operator_norm();
        if norm == 0.0 {
            return Err(domain(
                "min_stretch_lower_bound",
                "the matrix has zero operator norm",
            ));
        }
        Ok(self.determinant().norm() / norm.powi(self.n as i32 - 1))
    }

    /// Solves `A x = b`; `None` when `A` is numerically singular.
    pub fn solve(&self, b: &[ComplexScalar]) -> Option<Vec<ComplexScalar>> {
        assert_eq!(b.len(), self.n, "right-hand side length must match matrix dimension");
        Lu::factor(self).map(|lu| lu.solve(b))
    }
}

fn power_iterate(gram: &ComplexMatrix, start: Vec<ComplexScalar>) -> f64 {
    let norm = vector_norm(&start);
    if norm == 0.0 {
        return 0.0;
    }
    let mut v: Vec<_> = start.into_iter().map(|c| c / norm).collect();
    let mut previous = f64::NEG_INFINITY;
    let mut quotient = 0.0;
    for _ in 0..POWER_MAX_ITERATIONS {
        let w = gram.mul_vec(&v);
        quotient = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum::<f64>();
        let w_norm = vector_norm(&w);
        if w_norm == 0.0 {
            return 0.0;
        }
        if (quotient - previous).abs() <= POWER_TOLERANCE * quotient.abs() {
            break;
        }
        previous = quotient;
        v = w.into_iter().map(|c| c / w_norm).collect();
    }
    quotient
}

struct Lu {
    n: usize,
    lu: Vec<ComplexScalar>,
    perm: Vec<usize>,
    swaps: usize,
}

impl Lu {
    fn factor(a: &ComplexMatrix) -> Option<Lu> {
        let n = a.n;
        let mut lu = a.entries.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let pivot_row = (k..n)
                .max_by(|&i, &j| lu[i * n + k].norm().total_cmp(&lu[j * n + k].norm()))
                .expect("non-empty range");
            if lu[pivot_row * n + k].norm() == 0.0 {
                return None;
            }
            if pivot_row != k {
                for j in 0..n {
                    lu.swap(k * n + j, pivot_row * n + j);
                }
                perm.swap(k, pivot_row);
                swaps += 1;
            }
            let pivot = lu[k * n + k];
            for i in (k + 1)..n {
                let factor = lu[i * n + k] / pivot;
                lu[i * n + k] = factor;
                for j in (k + 1)..n {
                    let upper = lu[k * n + j];
                    lu[i * n + j] -= factor * upper;
                }
            }
        }
        Some(Lu { n, lu, perm, swaps })
    }

    fn determinant(&self) -> ComplexScalar {
        let diag: ComplexScalar = (0..self.n).map(|i| self.lu[i * self.n + i]).product();
        if self.swaps % 2 == 0 {
            diag
        } else {
            -diag
        }
    }

    fn solve(&self, b: &[ComplexScalar]) -> Vec<ComplexScalar> {
        let n = self.n;
        let mut x: Vec<_> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[i * n + j];
                let xj = x[j];
                x[i] -= l * xj;
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let u = self.lu[i * n + j];
                let xj = x[j];
                x[i] -= u * xj;
            }
            x[i] /= self.lu[i * n + i];
        }
        x
    }
}
