use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::operator::{ensure_same, hermiticity_defect};
use super::{HilbertSpace, Operator, QuantumError};

pub const NORM_TOL: f64 = 1e-10;
pub const DENSITY_HERMITIAN_TOL: f64 = 1e-10;
pub const DENSITY_TRACE_TOL: f64 = 1e-8;
pub const DENSITY_POSITIVITY_TOL: f64 = 1e-8;

/// Normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: HilbertSpace,
    amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn new(space: HilbertSpace, amplitudes: DVector<C64>) -> Result<Self, QuantumError> {
        if amplitudes.len() != space.dim() {
            return Err(QuantumError::DimensionMismatch {
                expected: space.dim(),
                found: amplitudes.len(),
            });
        }
        let norm_sq = amplitudes.norm_squared();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(QuantumError::NotNormalized { norm_sq });
        }
        Ok(Self { space, amplitudes })
    }

    /// Normalizes `amplitudes`; fails only on a zero vector.
    pub fn normalized(space: HilbertSpace, amplitudes: DVector<C64>) -> Result<Self, QuantumError> {
        let n = amplitudes.norm();
        if n == 0.0 {
            return Err(QuantumError::NotNormalized { norm_sq: 0.0 });
        }
        Self::new(space, amplitudes.unscale(n))
    }

    pub(crate) fn from_amplitudes_unchecked(space: HilbertSpace, amplitudes: DVector<C64>) -> Self {
        Self { space, amplitudes }
    }

    pub fn basis(space: &HilbertSpace, index: usize) -> Self {
        let mut a = DVector::zeros(space.dim());
        a[index] = C64::new(1.0, 0.0);
        Self {
            space: space.clone(),
            amplitudes: a,
        }
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64, QuantumError> {
        ensure_same(&self.space, &other.space)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn overlap_sq(&self, other: &StateVector) -> Result<f64, QuantumError> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn tensor(&self, other: &StateVector) -> StateVector {
        StateVector {
            space: self.space.tensor(&other.space),
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }

    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }
}

/// Mixed state. Construction validates Hermiticity, unit trace and
/// positivity.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    space: HilbertSpace,
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn new(space: HilbertSpace, matrix: DMatrix<C64>) -> Result<Self, QuantumError> {
        let rho = Self::from_matrix_unchecked(space, matrix)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Shape-checked only.
    pub fn from_matrix_unchecked(space: HilbertSpace, matrix: DMatrix<C64>) -> Result<Self, QuantumError> {
        let d = space.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(QuantumError::DimensionMismatch {
                expected: d,
                found: matrix.nrows(),
            });
        }
        Ok(Self { space, matrix })
    }

    pub fn pure(psi: &StateVector) -> Self {
        Self {
            space: psi.space.clone(),
            matrix: psi.amplitudes() * psi.amplitudes().adjoint(),
        }
    }

    pub fn maximally_mixed(space: &HilbertSpace) -> Self {
        let d = space.dim();
        Self {
            space: space.clone(),
            matrix: DMatrix::identity(d, d).unscale(d as f64),
        }
    }

    pub fn validate(&self) -> Result<(), QuantumError> {
        let h = hermiticity_defect(&self.matrix);
        if h > DENSITY_HERMITIAN_TOL {
            return Err(QuantumError::InvalidDensityMatrix(format!(
                "Hermiticity defect {h:e}"
            )));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > DENSITY_TRACE_TOL {
            return Err(QuantumError::InvalidDensityMatrix(format!("trace {tr}")));
        }
        let min = self.min_eigenvalue();
        if min < -DENSITY_POSITIVITY_TOL {
            return Err(QuantumError::InvalidDensityMatrix(format!(
                "minimum eigenvalue {min:e}"
            )));
        }
        Ok(())
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_hermitian_eigenvalue(&self.matrix)
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    /// `Tr(ρ A)`.
    pub fn expectation(&self, op: &Operator) -> Result<C64, QuantumError> {
        ensure_same(&self.space, op.space())?;
        Ok((&self.matrix * op.matrix()).trace())
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            space: self.space.tensor(&other.space),
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        super::operator::max_abs_diff(&self.matrix, &other.matrix)
    }
}

pub(crate) fn min_hermitian_eigenvalue(m: &DMatrix<C64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    // symmetrize first so round-off asymmetry does not bias the solver
    let sym = (m + m.adjoint()).scale(0.5);
    sym.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}
