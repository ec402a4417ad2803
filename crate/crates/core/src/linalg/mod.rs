//! Dense real matrices and symmetric quadratic forms.

mod dense;
mod jacobi;

pub(crate) use dense::{cholesky, cholesky_inverse, solve_spd};
pub use jacobi::symmetric_eigenvalues;

use std::fmt;

use crate::error::{Error, Result};

/// Relative asymmetry tolerated (and then removed) when building a [`QuadraticForm`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Square real matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "matrix dimension must be positive".into(),
            ));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "matrix entries must be finite".into(),
            ));
        }
        Ok(SquareMatrix { dim, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: r.len(),
            });
        }
        Self::new(dim, rows.concat())
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    pub fn zeros(dim: usize) -> Self {
        SquareMatrix {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, v) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = *v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t.data[j * n + i] = self.data[i * n + j];
            }
        }
        t
    }

    pub fn scaled(&self, factor: f64) -> Self {
        SquareMatrix {
            dim: self.dim,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn matmul(&self, other: &SquareMatrix) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        Ok(SquareMatrix {
            dim: self.dim,
            data: dense::matmul(&self.data, &other.data, self.dim),
        })
    }

    /// Matrix-vector product `A x`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim, x.len())?;
        Ok(self
            .data
            .chunks(self.dim)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        let gram = QuadraticForm::identity(self.dim)
            .pullback(self)
            .expect("dimensions agree");
        gram.max_eigenvalue().max(0.0).sqrt()
    }

    /// Largest eigenvalue modulus, from a real Schur decomposition.
    pub fn spectral_radius(&self) -> f64 {
        let m = nalgebra::DMatrix::from_row_slice(self.dim, self.dim, &self.data);
        m.complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.chunks(self.dim)).finish()
    }
}

/// Symmetric matrix `Q` standing for the quadratic function `x ↦ xᵀQx`.
#[derive(Clone, PartialEq)]
pub struct QuadraticForm {
    dim: usize,
    data: Vec<f64>,
}

impl QuadraticForm {
    /// Builds a form from row-major entries. Asymmetry up to
    /// [`SYMMETRY_TOLERANCE`] relative to the largest entry is averaged away;
    /// anything larger is an error.
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        let m = SquareMatrix::new(dim, data)?;
        Self::from_matrix(&m)
    }

    pub fn from_matrix(m: &SquareMatrix) -> Result<Self> {
        let n = m.dim;
        let scale = m.data.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        let mut data = m.data.clone();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (data[i * n + j], data[j * n + i]);
                worst = worst.max((a - b).abs());
                let avg = 0.5 * (a + b);
                data[i * n + j] = avg;
                data[j * n + i] = avg;
            }
        }
        if worst > SYMMETRY_TOLERANCE * scale {
            return Err(Error::NotSymmetric(worst));
        }
        Ok(QuadraticForm { dim: n, data })
    }

    pub(crate) fn from_symmetric_unchecked(dim: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        QuadraticForm { dim, data }
    }

    pub fn identity(dim: usize) -> Self {
        QuadraticForm {
            dim,
            data: SquareMatrix::identity(dim).data,
        }
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        QuadraticForm {
            dim: diag.len(),
            data: SquareMatrix::diagonal(diag).data,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }

    pub fn to_matrix(&self) -> SquareMatrix {
        SquareMatrix {
            dim: self.dim,
            data: self.data.clone(),
        }
    }

    /// `xᵀ Q x`
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            acc += x[i] * row.iter().zip(x).map(|(q, v)| q * v).sum::<f64>();
        }
        Ok(acc)
    }

    /// `Aᵀ Q A`, symmetrized exactly.
    pub fn pullback(&self, a: &SquareMatrix) -> Result<QuadraticForm> {
        check_dim(self.dim, a.dim)?;
        let n = self.dim;
        let qa = dense::matmul(&self.data, &a.data, n);
        let at = a.transpose();
        let mut data = dense::matmul(&at.data, &qa, n);
        dense::symmetrize(&mut data, n);
        Ok(QuadraticForm { dim: n, data })
    }

    /// `Σ wᵢ Qᵢ`
    pub fn combination<'a>(
        dim: usize,
        terms: impl IntoIterator<Item = (f64, &'a QuadraticForm)>,
    ) -> Result<QuadraticForm> {
        let mut data = vec![0.0; dim * dim];
        for (w, q) in terms {
            check_dim(dim, q.dim)?;
            for (acc, v) in data.iter_mut().zip(&q.data) {
                *acc += w * v;
            }
        }
        Ok(QuadraticForm { dim, data })
    }

    pub fn scaled(&self, factor: f64) -> QuadraticForm {
        QuadraticForm {
            dim: self.dim,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        symmetric_eigenvalues(self)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues().last().expect("dim >= 1")
    }

    /// Minimum eigenvalue is at least `-slack`.
    pub fn is_psd(&self, slack: f64) -> Result<bool> {
        if !(slack >= 0.0) {
            return Err(Error::InvalidArgument("slack must be nonnegative".into()));
        }
        Ok(self.min_eigenvalue() >= -slack)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl fmt::Debug for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.chunks(self.dim)).finish()
    }
}

pub fn eval_form(q: &QuadraticForm, x: &[f64]) -> Result<f64> {
    q.eval(x)
}

pub fn pullback(q: &QuadraticForm, a: &SquareMatrix) -> Result<QuadraticForm> {
    q.pullback(a)
}

pub fn is_psd(q: &QuadraticForm, slack: f64) -> Result<bool> {
    q.is_psd(slack)
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
