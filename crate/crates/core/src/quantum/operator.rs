use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::{HilbertSpace, QuantumError, StateVector};

/// Hermiticity tolerance for anything used as a Hamiltonian.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Unitarity tolerance for propagators.
pub const UNITARY_TOL: f64 = 1e-10;

/// Dense complex operator over a labeled space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: HilbertSpace,
    matrix: DMatrix<C64>,
}

impl Operator {
    pub fn new(space: HilbertSpace, matrix: DMatrix<C64>) -> Result<Self, QuantumError> {
        let d = space.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(QuantumError::DimensionMismatch {
                expected: d,
                found: if matrix.nrows() != d {
                    matrix.nrows()
                } else {
                    matrix.ncols()
                },
            });
        }
        Ok(Self { space, matrix })
    }

    pub fn zeros(space: &HilbertSpace) -> Self {
        let d = space.dim();
        Self {
            space: space.clone(),
            matrix: DMatrix::zeros(d, d),
        }
    }

    pub fn identity(space: &HilbertSpace) -> Self {
        let d = space.dim();
        Self {
            space: space.clone(),
            matrix: DMatrix::identity(d, d),
        }
    }

    pub fn from_fn(space: &HilbertSpace, f: impl FnMut(usize, usize) -> C64) -> Self {
        let d = space.dim();
        Self {
            space: space.clone(),
            matrix: DMatrix::from_fn(d, d, f),
        }
    }

    /// `|row⟩⟨col|` in the flat basis.
    pub fn transition(space: &HilbertSpace, row: usize, col: usize) -> Self {
        let mut op = Self::zeros(space);
        op.matrix[(row, col)] = C64::new(1.0, 0.0);
        op
    }

    /// `|ket⟩⟨bra|`.
    pub fn outer(ket: &StateVector, bra: &StateVector) -> Result<Self, QuantumError> {
        ensure_same(ket.space(), bra.space())?;
        Ok(Self {
            space: ket.space().clone(),
            matrix: ket.amplitudes() * bra.amplitudes().adjoint(),
        })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn matrix_mut(&mut self) -> &mut DMatrix<C64> {
        &mut self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    pub fn dagger(&self) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            space: self.space.clone(),
            matrix: &self.matrix * factor,
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn add(&self, other: &Operator) -> Result<Self, QuantumError> {
        ensure_same(&self.space, &other.space)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn sub(&self, other: &Operator) -> Result<Self, QuantumError> {
        ensure_same(&self.space, &other.space)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix - &other.matrix,
        })
    }

    pub fn add_assign_scaled(&mut self, other: &Operator, factor: C64) -> Result<(), QuantumError> {
        ensure_same(&self.space, &other.space)?;
        self.matrix += &other.matrix * factor;
        Ok(())
    }

    pub fn mul(&self, other: &Operator) -> Result<Self, QuantumError> {
        ensure_same(&self.space, &other.space)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn commutator(&self, other: &Operator) -> Result<Self, QuantumError> {
        Ok(self.mul(other)?.sub(&other.mul(self)?)?)
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector, QuantumError> {
        ensure_same(&self.space, psi.space())?;
        Ok(StateVector::from_amplitudes_unchecked(
            self.space.clone(),
            &self.matrix * psi.amplitudes(),
        ))
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Largest element-wise modulus.
    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        max_abs_diff(&self.matrix, &other.matrix)
    }

    /// `max |H - H†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.matrix)
    }

    /// `max |U†U - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let d = self.dim();
        let prod = self.matrix.adjoint() * &self.matrix;
        max_abs_diff(&prod, &DMatrix::identity(d, d))
    }

    pub fn ensure_hermitian(&self) -> Result<(), QuantumError> {
        let defect = self.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(QuantumError::NotHermitian { defect });
        }
        Ok(())
    }

    /// Kronecker product; the result space lists `self`'s factors first.
    pub fn tensor(&self, other: &Operator) -> Operator {
        tensor_product(self, other)
    }

    /// Restriction to the listed basis indices (rows and columns).
    pub fn restrict(&self, indices: &[usize], space: HilbertSpace) -> Result<Operator, QuantumError> {
        if space.dim() != indices.len() {
            return Err(QuantumError::DimensionMismatch {
                expected: space.dim(),
                found: indices.len(),
            });
        }
        let m = DMatrix::from_fn(indices.len(), indices.len(), |r, c| {
            self.matrix[(indices[r], indices[c])]
        });
        Operator::new(space, m)
    }

    /// Largest absolute row sum, an upper bound on the spectral radius.
    pub fn row_sum_norm(&self) -> f64 {
        self.matrix
            .row_iter()
            .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Kronecker product of two operators. Factor lists concatenate in order.
pub fn tensor_product(a: &Operator, b: &Operator) -> Operator {
    Operator {
        space: a.space.tensor(&b.space),
        matrix: a.matrix.kronecker(&b.matrix),
    }
}

/// Tensor product of a list of operators, left to right.
pub fn tensor_all(ops: &[&Operator]) -> Operator {
    let (first, rest) = ops.split_first().expect("at least one operator");
    rest.iter().fold((*first).clone(), |acc, op| tensor_product(&acc, op))
}

pub(crate) fn ensure_same(a: &HilbertSpace, b: &HilbertSpace) -> Result<(), QuantumError> {
    if a.dim() != b.dim() {
        return Err(QuantumError::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    if a != b {
        return Err(QuantumError::SpaceMismatch);
    }
    Ok(())
}

pub(crate) fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub(crate) fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for r in 0..n {
        for c in r..n {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sigma_x() -> Operator {
        let s = HilbertSpace::qudit(2);
        Operator::new(
            s,
            DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
        )
        .unwrap()
    }

    #[test]
    fn identity_tensor_identity() {
        let i2 = Operator::identity(&HilbertSpace::qudit(2));
        let i3 = Operator::identity(&HilbertSpace::qudit(3));
        let i6 = tensor_product(&i2, &i3);
        assert_eq!(i6.space().factor_dims(), vec![2, 3]);
        assert_eq!(i6.max_abs_diff(&Operator::identity(i6.space())), 0.0);
    }

    #[test]
    fn sigma_x_on_first_factor() {
        let op = tensor_product(&sigma_x(), &Operator::identity(&HilbertSpace::qudit(2)));
        let psi = StateVector::basis(op.space(), 0);
        let out = op.apply(&psi).unwrap();
        // |00> -> |10>, flat index 2
        assert!((out.amplitudes()[2] - c(1., 0.)).norm() < 1e-15);
        assert!(out.amplitudes()[0].norm() < 1e-15);
    }

    #[test]
    fn mismatched_dimensions_rejected() {
        let s = HilbertSpace::qudit(3);
        assert!(matches!(
            Operator::new(s, DMatrix::zeros(2, 2)),
            Err(QuantumError::DimensionMismatch { .. })
        ));
        let a = sigma_x();
        let b = Operator::identity(&HilbertSpace::qudit(3));
        assert!(a.mul(&b).is_err());
    }

    #[test]
    fn hermiticity_check() {
        let mut op = sigma_x();
        assert!(op.ensure_hermitian().is_ok());
        op.matrix_mut()[(0, 1)] = c(1.0, 0.1);
        match op.ensure_hermitian() {
            Err(QuantumError::NotHermitian { defect }) => assert!((defect - 0.1).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }
}
