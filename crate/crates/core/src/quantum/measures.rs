use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::operator::ensure_same;
use super::{DensityMatrix, HilbertSpace, Operator, QuantumError, StateVector};

/// Imaginary part of `⟨ψ|ρ|ψ⟩` tolerated before the result is rejected.
pub const FIDELITY_IMAG_TOL: f64 = 1e-10;

/// Reduced state on the factors listed in `keep` (any order, no repeats).
/// The kept factors stay in their original relative order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix, QuantumError> {
    let space = rho.space();
    let nf = space.num_factors();
    if keep.is_empty() {
        return Err(QuantumError::InvalidSpace("keep set is empty".into()));
    }
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    if kept.windows(2).any(|w| w[0] == w[1]) || kept.iter().any(|&k| k >= nf) {
        return Err(QuantumError::InvalidSpace(format!(
            "invalid factor set {keep:?} for {nf} factors"
        )));
    }
    let reduced_space = space.subspace(&kept)?;
    let dims = space.factor_dims();
    let traced: Vec<usize> = (0..nf).filter(|k| !kept.contains(k)).collect();
    let d_keep = reduced_space.dim();
    let d_trace: usize = traced.iter().map(|&k| dims[k]).product();

    // full index of (kept multi-index a, traced multi-index e)
    let full_index = |a: usize, e: usize| -> usize {
        let mut digits = vec![0usize; nf];
        let mut rem = a;
        for &k in kept.iter().rev() {
            digits[k] = rem % dims[k];
            rem /= dims[k];
        }
        let mut rem = e;
        for &k in traced.iter().rev() {
            digits[k] = rem % dims[k];
            rem /= dims[k];
        }
        digits.iter().zip(&dims).fold(0, |acc, (&d, &n)| acc * n + d)
    };
    let table: Vec<Vec<usize>> = (0..d_keep)
        .map(|a| (0..d_trace).map(|e| full_index(a, e)).collect())
        .collect();

    let m = rho.matrix();
    let out = DMatrix::from_fn(d_keep, d_keep, |a, b| {
        table[a]
            .iter()
            .zip(&table[b])
            .map(|(&i, &j)| m[(i, j)])
            .sum::<C64>()
    });
    DensityMatrix::from_matrix_unchecked(reduced_space, out)
}

/// `⟨target|ρ|target⟩`.
pub fn state_fidelity(rho: &DensityMatrix, target: &StateVector) -> Result<f64, QuantumError> {
    ensure_same(rho.space(), target.space())?;
    let v = target.amplitudes();
    let f = v.dotc(&(rho.matrix() * v));
    if f.im.abs() > FIDELITY_IMAG_TOL {
        return Err(QuantumError::InvalidDensityMatrix(format!(
            "fidelity has imaginary part {:e}",
            f.im
        )));
    }
    Ok(f.re.clamp(0.0, 1.0))
}

/// `min_φ ‖a − e^{iφ} b‖_F`, the distance between two operators up to a
/// global phase.
pub fn phase_invariant_distance(a: &Operator, b: &Operator) -> Result<f64, QuantumError> {
    ensure_same(a.space(), b.space())?;
    let (ma, mb) = (a.matrix(), b.matrix());
    let overlap = mb.dotc(ma).norm();
    let d2 = ma.norm_squared() + mb.norm_squared() - 2.0 * overlap;
    Ok(d2.max(0.0).sqrt())
}

/// Subspace spanned by the listed basis states of `space`, labelled with
/// their composite basis labels.
pub fn basis_subspace(space: &HilbertSpace, indices: &[usize]) -> HilbertSpace {
    HilbertSpace::single(
        &indices
            .iter()
            .map(|&i| space.basis_label(i))
            .collect::<Vec<_>>(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn bell_state_reduces_to_maximally_mixed() {
        let q = HilbertSpace::qudit(2);
        let s = q.tensor(&q);
        let h = 0.5f64.sqrt();
        let bell = StateVector::new(s, DVector::from_vec(vec![c(h), c(0.), c(0.), c(h)])).unwrap();
        let red = partial_trace(&DensityMatrix::pure(&bell), &[1]).unwrap();
        assert!(red.max_abs_diff(&DensityMatrix::maximally_mixed(&q)) < 1e-15);
    }

    #[test]
    fn rejects_bad_keep_sets() {
        let q = HilbertSpace::qudit(2);
        let rho = DensityMatrix::maximally_mixed(&q.tensor(&q));
        assert!(partial_trace(&rho, &[]).is_err());
        assert!(partial_trace(&rho, &[2]).is_err());
        assert!(partial_trace(&rho, &[0, 0]).is_err());
    }

    #[test]
    fn global_phase_is_ignored() {
        let q = HilbertSpace::qudit(2);
        let u = Operator::transition(&q, 0, 1).add(&Operator::transition(&q, 1, 0)).unwrap();
        let v = u.scale(C64::from_polar(1.0, 0.7));
        assert!(phase_invariant_distance(&u, &v).unwrap() < 1e-15);
        let w = Operator::identity(&q);
        assert!((phase_invariant_distance(&u, &w).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn mixed_state_fidelity() {
        let q = HilbertSpace::qudit(2);
        let plus = StateVector::normalized(q.clone(), DVector::from_vec(vec![c(1.), c(1.)])).unwrap();
        let f = state_fidelity(&DensityMatrix::maximally_mixed(&q), &plus).unwrap();
        assert!((f - 0.5).abs() < 1e-15);
        let zero = StateVector::basis(&q, 0);
        let one = StateVector::basis(&q, 1);
        assert_eq!(state_fidelity(&DensityMatrix::pure(&zero), &one).unwrap(), 0.0);
    }
}
