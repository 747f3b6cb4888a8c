use nalgebra::DVector;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::effective::{
    computational_space, effective_couplings, effective_propagator, effective_space,
    EffectiveCouplings, EFFECTIVE_LEVELS,
};
use super::hamiltonian::{full_hamiltonian, full_index, full_space, pair_space, Factors, LP, LQ, LR, L0, L1};
use super::params::TwoQubitParams;
use crate::error::{Error, Result};
use crate::quantum::{
    evolve_lindblad_observed, evolve_observed, partial_trace, state_fidelity, CollapseChannel,
    DensityMatrix, IntegratorConfig, LindbladDiagnostics, StateVector,
};
use crate::trace::FidelityTrace;

/// Largest tolerated population in the top Fock level.
pub const TRUNCATION_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    /// End time in μs; `None` runs to the gate period `τ`.
    pub horizon: Option<f64>,
    pub truncation_tol: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            horizon: None,
            truncation_tol: TRUNCATION_TOL,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TwoQubitRun {
    pub trace: FidelityTrace,
    pub couplings: EffectiveCouplings,
    /// Largest top-Fock-level population over the recorded samples.
    pub max_top_population: f64,
    pub lindblad: Option<LindbladDiagnostics>,
}

/// The six collective decay channels `Σ_j |x̄⟩_j⟨ȳ|` for `x ∈ {0, 1}`,
/// `y ∈ {p, q, r}`, each at rate `gamma`.
pub fn decay_channels(n_max: usize, gamma: f64) -> Result<Vec<CollapseChannel>> {
    let f = Factors::new(n_max);
    let id = f.cav_identity();
    let mut out = Vec::new();
    for from in [LP, LQ, LR] {
        for to in [L0, L1] {
            let op = f.atom_op(0, to, from, &id).add(&f.atom_op(1, to, from, &id))?;
            out.push(CollapseChannel::new(op, gamma)?);
        }
    }
    Ok(out)
}

/// `|initial⟩ ⊗ |0_cav⟩`.
pub fn embed_initial(initial: &StateVector, n_max: usize) -> Result<StateVector> {
    if initial.space() != &computational_space() {
        return Err(Error::InvalidParameter(
            "initial state must live in the two-qubit computational space".into(),
        ));
    }
    let space = full_space(n_max);
    let mut a = DVector::zeros(space.dim());
    for l1 in [L0, L1] {
        for l2 in [L0, L1] {
            a[full_index(n_max, l1, l2, 0)] = initial.amplitudes()[l1 * 2 + l2];
        }
    }
    Ok(StateVector::new(space, a)?)
}

/// Effective-model state lifted into superatom 1 ⊗ superatom 2.
pub fn embed_effective(psi: &StateVector) -> StateVector {
    let space = pair_space();
    let mut a = DVector::zeros(space.dim());
    for (k, &(l1, l2)) in EFFECTIVE_LEVELS.iter().enumerate() {
        a[l1 * 5 + l2] = psi.amplitudes()[k];
    }
    StateVector::normalized(space, a).expect("unit effective state")
}

fn effective_initial(initial: &StateVector) -> StateVector {
    let mut a = DVector::zeros(5);
    a.rows_mut(0, 4).copy_from(initial.amplitudes());
    StateVector::normalized(effective_space(), a).expect("unit computational state")
}

struct Observables {
    fidelity: f64,
    populations: Vec<f64>,
    photon_mean: f64,
    top: f64,
}

fn population_labels() -> Vec<String> {
    effective_space().factor_labels()[0].clone()
}

fn observe_density(rho: &DensityMatrix, reference: &StateVector, n_max: usize) -> Result<Observables> {
    let reduced = partial_trace(rho, &[0, 1])?;
    let fidelity = state_fidelity(&reduced, reference)?;
    let pops = rho.populations();
    Ok(summarize(fidelity, &pops, n_max))
}

fn summarize(fidelity: f64, pops: &[f64], n_max: usize) -> Observables {
    let nd = n_max + 1;
    let populations = EFFECTIVE_LEVELS
        .iter()
        .map(|&(l1, l2)| (0..nd).map(|n| pops[full_index(n_max, l1, l2, n)]).sum())
        .collect();
    let mut photon_mean = 0.0;
    let mut top = 0.0;
    for (i, p) in pops.iter().enumerate() {
        let n = i % nd;
        photon_mean += n as f64 * p;
        if n == n_max {
            top += p;
        }
    }
    Observables {
        fidelity,
        populations,
        photon_mean,
        top,
    }
}

fn observe_pure(psi: &StateVector, reference: &StateVector, n_max: usize) -> Observables {
    let nd = n_max + 1;
    let a = psi.amplitudes();
    let r = reference.amplitudes();
    let mut fidelity = 0.0;
    for n in 0..nd {
        let mut overlap = C64::new(0.0, 0.0);
        for (k, rk) in r.iter().enumerate() {
            if *rk != C64::new(0.0, 0.0) {
                overlap += rk.conj() * a[k * nd + n];
            }
        }
        fidelity += overlap.norm_sqr();
    }
    let pops: Vec<f64> = a.iter().map(|z| z.norm_sqr()).collect();
    summarize(fidelity.min(1.0), &pops, n_max)
}

fn prepare(
    params: &TwoQubitParams,
    initial: &StateVector,
    opts: &RunOptions,
) -> Result<(EffectiveCouplings, StateVector, StateVector, f64)> {
    let couplings = effective_couplings(params)?;
    let psi0 = embed_initial(initial, params.n_max)?;
    let eff0 = effective_initial(initial);
    let t_final = opts.horizon.unwrap_or(couplings.tau);
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidParameter(format!("invalid horizon {t_final}")));
    }
    Ok((couplings, psi0, eff0, t_final))
}

fn reference_at(c: &EffectiveCouplings, eff0: &StateVector, t: f64) -> Result<StateVector> {
    Ok(embed_effective(&effective_propagator(c, t).apply(eff0)?))
}

fn finish(
    mut trace: FidelityTrace,
    rows: Vec<(f64, Observables)>,
    tol: f64,
    n_max: usize,
) -> Result<(FidelityTrace, f64)> {
    let mut max_top = 0.0f64;
    for (t, o) in rows {
        max_top = max_top.max(o.top);
        trace.push(t, o.fidelity, o.populations, Some(o.photon_mean));
    }
    if max_top > tol {
        return Err(Error::Truncation {
            population: max_top,
            n_max,
        });
    }
    Ok((trace, max_top))
}

/// Closed-system run of the full cavity Hamiltonian from
/// `|initial⟩ ⊗ |0_cav⟩`, scored against the effective evolution.
pub fn simulate_real(params: &TwoQubitParams, initial: &StateVector, cfg: &IntegratorConfig) -> Result<TwoQubitRun> {
    simulate_real_with(params, initial, cfg, &RunOptions::default())
}

pub fn simulate_real_with(
    params: &TwoQubitParams,
    initial: &StateVector,
    cfg: &IntegratorConfig,
    opts: &RunOptions,
) -> Result<TwoQubitRun> {
    let (couplings, psi0, eff0, t_final) = prepare(params, initial, opts)?;
    let h = full_hamiltonian(params)?;
    let n_max = params.n_max;
    let evo = evolve_observed(&h, &psi0, t_final, cfg, |t, psi| {
        let reference = reference_at(&couplings, &eff0, t)?;
        Ok::<_, Error>((t, observe_pure(psi, &reference, n_max)))
    })?;
    let rows = evo.samples.into_iter().collect::<Result<Vec<_>>>()?;
    let mut trace = FidelityTrace::new(couplings.tau, population_labels(), true);
    trace.stats = evo.stats;
    let (trace, max_top_population) = finish(trace, rows, opts.truncation_tol, n_max)?;
    Ok(TwoQubitRun {
        trace,
        couplings,
        max_top_population,
        lindblad: None,
    })
}

/// Lindblad run with the six collective decay channels at rate `gamma`.
pub fn simulate_noisy(
    params: &TwoQubitParams,
    initial: &StateVector,
    gamma: f64,
    cfg: &IntegratorConfig,
) -> Result<TwoQubitRun> {
    simulate_noisy_with(params, initial, gamma, cfg, &RunOptions::default())
}

pub fn simulate_noisy_with(
    params: &TwoQubitParams,
    initial: &StateVector,
    gamma: f64,
    cfg: &IntegratorConfig,
    opts: &RunOptions,
) -> Result<TwoQubitRun> {
    let (couplings, psi0, eff0, t_final) = prepare(params, initial, opts)?;
    let h = full_hamiltonian(params)?;
    let n_max = params.n_max;
    let channels = decay_channels(n_max, gamma)?;
    let rho0 = DensityMatrix::pure(&psi0);
    let evo = evolve_lindblad_observed(&h, &rho0, &channels, t_final, cfg, |t, rho| {
        let reference = reference_at(&couplings, &eff0, t)?;
        Ok::<_, Error>((t, observe_density(rho, &reference, n_max)?))
    })?;
    let rows = evo.samples.into_iter().collect::<Result<Vec<_>>>()?;
    let mut trace = FidelityTrace::new(couplings.tau, population_labels(), true);
    trace.stats = evo.stats;
    let (trace, max_top_population) = finish(trace, rows, opts.truncation_tol, n_max)?;
    Ok(TwoQubitRun {
        trace,
        couplings,
        max_top_population,
        lindblad: Some(evo.diagnostics),
    })
}

/// `|0̄1̄⟩` in the computational space.
pub fn basis_state(l1: usize, l2: usize) -> StateVector {
    StateVector::basis(&computational_space(), l1 * 2 + l2)
}
