//! Numerical substrate: labelled Hilbert spaces, dense operators, states,
//! closed-form and integrated propagation, and a Lindblad solver.

mod hamiltonian;
mod lindblad;
mod measures;
mod ode;
mod operator;
mod propagate;
mod schrodinger;
mod space;
mod state;

pub use hamiltonian::{PhasedHamiltonian, PhasedTerm};
pub use lindblad::{
    evolve_lindblad, evolve_lindblad_observed, CollapseChannel, LindbladDiagnostics,
    LindbladEvolution, HERMITICITY_TOL, POSITIVITY_TOL, TRACE_TOL,
};
pub use measures::{
    basis_subspace, partial_trace, phase_invariant_distance, state_fidelity, FIDELITY_IMAG_TOL,
};
pub use ode::{IntegratorConfig, IntegratorStats, Method};
pub use operator::{tensor_all, tensor_product, Operator, HERMITIAN_TOL, UNITARY_TOL};
pub use propagate::propagator;
pub use schrodinger::{evolve_observed, evolve_time_dependent, Evolution, NORM_DRIFT_TOL};
pub use space::HilbertSpace;
pub use state::{
    DensityMatrix, StateVector, DENSITY_HERMITIAN_TOL, DENSITY_POSITIVITY_TOL, DENSITY_TRACE_TOL,
    NORM_TOL,
};


pub type C64 = num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuantumError {
    #[error("invalid Hilbert space: {0}")]
    InvalidSpace(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operands live on different Hilbert spaces")]
    SpaceMismatch,
    #[error("operator is not Hermitian (max |H - H†| = {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("state is not normalized (|ψ|² = {norm_sq})")]
    NotNormalized { norm_sq: f64 },
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),
    #[error("invalid collapse channel: {0}")]
    InvalidChannel(String),
    #[error("invalid integrator settings: {0}")]
    InvalidIntegrator(String),
    #[error("step size underflow at t = {t} μs (h = {step:e})")]
    StepSizeUnderflow { t: f64, step: f64 },
    #[error("norm drift {drift:e} at t = {t} μs")]
    NormDrift { t: f64, drift: f64 },
    #[error("trace drift {error:e} at t = {t} μs")]
    TraceDrift { t: f64, error: f64 },
    #[error("positivity lost at t = {t} μs (min eigenvalue {min_eigenvalue:e}); reduce the step size")]
    PositivityViolation { t: f64, min_eigenvalue: f64 },
}

impl QuantumError {
    /// True for failures of the numerical integration rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            QuantumError::StepSizeUnderflow { .. }
                | QuantumError::NormDrift { .. }
                | QuantumError::TraceDrift { .. }
                | QuantumError::PositivityViolation { .. }
        )
    }
}
