use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::{Operator, QuantumError};

/// `exp(-i h t)` from the Hermitian eigendecomposition `h = V Λ V†`.
pub fn propagator(h: &Operator, t: f64) -> Result<Operator, QuantumError> {
    h.ensure_hermitian()?;
    let eig = hermitian_eigen(h.matrix());
    let phases = eig
        .values
        .iter()
        .map(|&lambda| C64::from_polar(1.0, -lambda * t));
    let v = &eig.vectors;
    let mut scaled = v.clone();
    for (mut col, ph) in scaled.column_iter_mut().zip(phases) {
        col *= ph;
    }
    Operator::new(h.space().clone(), scaled * v.adjoint())
}

pub(crate) struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

pub(crate) fn hermitian_eigen(m: &DMatrix<C64>) -> HermitianEigen {
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    HermitianEigen {
        values: eig.eigenvalues.iter().copied().collect(),
        vectors: eig.eigenvectors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::HilbertSpace;

    #[test]
    fn zero_hamiltonian_gives_identity() {
        let s = HilbertSpace::qudit(4);
        let u = propagator(&Operator::zeros(&s), 3.7).unwrap();
        assert!(u.max_abs_diff(&Operator::identity(&s)) < 1e-15);
    }

    #[test]
    fn resonant_rabi_transfer() {
        let s = HilbertSpace::qudit(2);
        let omega = 2.3;
        let h = Operator::transition(&s, 0, 1)
            .add(&Operator::transition(&s, 1, 0))
            .unwrap()
            .scale_real(omega);
        for &t in &[0.1, 0.5, 1.3] {
            let u = propagator(&h, t).unwrap();
            assert!((u.get(1, 0).norm_sqr() - (omega * t).sin().powi(2)).abs() < 1e-13);
            assert!(u.unitarity_defect() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let s = HilbertSpace::qudit(2);
        let err = propagator(&Operator::transition(&s, 0, 1), 1.0).unwrap_err();
        assert!(matches!(err, QuantumError::NotHermitian { defect } if defect == 1.0));
    }
}
