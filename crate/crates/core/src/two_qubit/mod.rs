//! Cavity-mediated two-qubit holonomic gate between two superatoms.
//!
//! Each superatom carries levels `(0̄, 1̄, p̄, r̄, q̄)`. Off-resonant lasers
//! drive `0̄ ↔ p̄` and `1̄ ↔ q̄`; a shared cavity couples `p̄ ↔ r̄` and
//! `r̄ ↔ q̄`. Eliminating `p̄`, `q̄` and the photon leaves a resonant
//! exchange `|0̄1̄⟩, |1̄0̄⟩ ↔ |r̄r̄⟩` that generates the gate.

mod conditions;
mod effective;
mod hamiltonian;
mod params;
mod simulate;

pub use conditions::{validate_conditions, Condition, ConditionReport, DEFAULT_THRESHOLD};
pub use effective::{
    computational_space, effective_couplings, effective_hamiltonian, effective_propagator,
    effective_space, two_qubit_gate, verify_holonomy_two_qubit, verify_holonomy_two_qubit_over,
    EffectiveCouplings, EFFECTIVE_LEVELS,
};
pub use hamiltonian::{
    build_full_hamiltonian, build_reduced_hamiltonian, full_hamiltonian, full_index, full_space,
    pair_space, reduced_hamiltonian, second_order_shifts, stark_compensation, stark_shifts,
    superatom_space, L0, L1, LP, LQ, LR,
};
pub use params::{StarkMode, TwoQubitParams, RESONANCE_TOL};
pub use simulate::{
    basis_state, decay_channels, embed_effective, embed_initial, simulate_noisy,
    simulate_noisy_with, simulate_real, simulate_real_with, RunOptions, TwoQubitRun,
    TRUNCATION_TOL,
};
