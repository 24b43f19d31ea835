use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::matops::{self, CMatrix};

/// Linear map on `d×d` matrices stored as a `d²×d²` matrix acting on
/// column-stacked vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    pub dim: usize,
    pub mat: CMatrix,
}

impl Superoperator {
    pub fn from_matrix(dim: usize, mat: CMatrix) -> Self {
        debug_assert_eq!(mat.shape(), (dim * dim, dim * dim));
        Self { dim, mat }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_matrix(dim, matops::identity(dim * dim))
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_matrix(dim, CMatrix::zeros(dim * dim, dim * dim))
    }

    /// Matrix of a linear map given by its action, read off on matrix units.
    pub fn from_map(dim: usize, f: impl Fn(&CMatrix) -> CMatrix) -> Self {
        let n = dim * dim;
        let mut mat = CMatrix::zeros(n, n);
        for j in 0..dim {
            for i in 0..dim {
                let col = j * dim + i;
                let image = f(&matops::unit(dim, i, j));
                mat.set_column(col, &matops::vec(&image));
            }
        }
        Self::from_matrix(dim, mat)
    }

    /// `X ↦ A X B`.
    pub fn sandwich(a: &CMatrix, b: &CMatrix) -> Self {
        Self::from_matrix(a.nrows(), matops::kron(&b.transpose(), a))
    }

    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        matops::unvec(&(&self.mat * matops::vec(x)), self.dim)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Superoperator) -> Self {
        Self::from_matrix(self.dim, &self.mat * &other.mat)
    }

    /// Dual for the pairing `(X, ρ) ↦ Tr[X* ρ]`.
    pub fn hs_dual(&self) -> Self {
        Self::from_matrix(self.dim, self.mat.adjoint())
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::from_matrix(self.dim, &self.mat * C64::new(c, 0.0))
    }

    pub fn sub(&self, other: &Superoperator) -> Self {
        Self::from_matrix(self.dim, &self.mat - &other.mat)
    }

    /// `exp(t S)` by Padé scaling and squaring.
    pub fn exp(&self, t: f64) -> Result<Self> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::RejectedInput(format!("time must be finite and nonnegative, got {t}")));
        }
        if t == 0.0 {
            return Ok(Self::identity(self.dim));
        }
        Ok(Self::from_matrix(self.dim, (&self.mat * C64::new(t, 0.0)).exp()))
    }

    /// Choi matrix `Σ_ij |i⟩⟨j| ⊗ S(|i⟩⟨j|)`.
    pub fn choi(&self) -> CMatrix {
        let d = self.dim;
        let mut out = CMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                let image = self.apply(&matops::unit(d, i, j));
                out.view_mut((i * d, j * d), (d, d)).copy_from(&image);
            }
        }
        out
    }

    pub fn frob(&self) -> f64 {
        matops::frob(&self.mat)
    }
}
