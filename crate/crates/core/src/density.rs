use std::ops::Deref;

use crate::error::{Error, Result};
use crate::tensor::{hermitian_eig, ComplexMatrix, C64};

/// Tolerance on Hermiticity, unit trace and the smallest eigenvalue.
pub const DENSITY_TOL: f64 = 1e-10;

/// A Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let violation = m.hermiticity_violation();
        if violation > DENSITY_TOL {
            return Err(Error::NotHermitian { violation });
        }
        let tr = m.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > DENSITY_TOL {
            return Err(Error::NotDensityMatrix(format!("trace is {tr}")));
        }
        let min = hermitian_eig(&m)?
            .eigenvalues
            .last()
            .copied()
            .unwrap_or(0.0);
        if min < -DENSITY_TOL {
            return Err(Error::NotDensityMatrix(format!(
                "smallest eigenvalue is {min:e}"
            )));
        }
        Ok(Self(m))
    }

    /// Wraps a matrix produced by a trace-preserving, positivity-preserving
    /// construction without re-checking it.
    pub(crate) fn new_unchecked(m: ComplexMatrix) -> Self {
        Self(m)
    }

    /// `|v><v|` for a unit vector `v`.
    pub fn pure(v: &[C64]) -> Result<Self> {
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > DENSITY_TOL {
            return Err(Error::NotDensityMatrix(format!(
                "state vector has norm^2 {norm}"
            )));
        }
        Ok(Self(ComplexMatrix::outer(v)))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    /// Convex combination `w * self + (1 - w) * other`.
    pub fn mix(&self, other: &Self, w: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::OutOfRange {
                name: "mixing weight",
                value: w,
            });
        }
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(Self(&self.0.scale(w) + &other.0.scale(1.0 - w)))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(hermitian_eig(&self.0)?
            .eigenvalues
            .last()
            .copied()
            .unwrap_or(0.0))
    }
}

impl Deref for DensityMatrix {
    type Target = ComplexMatrix;

    fn deref(&self) -> &ComplexMatrix {
        &self.0
    }
}
