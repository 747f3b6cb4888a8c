use nalgebra::DVector;
use num_complex::Complex64 as C64;

use super::hamiltonian::CompiledHamiltonian;
use super::ode::{integrate, IntegratorConfig, IntegratorStats, Sampler};
use super::operator::ensure_same;
use super::{PhasedHamiltonian, QuantumError, StateVector};

/// Largest tolerated `| ‖ψ(T)‖² - 1 |` at the end of a closed-system run.
pub const NORM_DRIFT_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct Evolution<T> {
    pub samples: Vec<T>,
    pub final_state: StateVector,
    pub final_time: f64,
    pub norm_drift: f64,
    pub stats: IntegratorStats,
}

/// Integrates `i dψ/dt = H(t) ψ` from `t = 0` to `t_final`, recording
/// `(t, ψ(t))` every `record_stride` steps.
pub fn evolve_time_dependent(
    h: &PhasedHamiltonian,
    psi0: &StateVector,
    t_final: f64,
    cfg: &IntegratorConfig,
) -> Result<Evolution<(f64, StateVector)>, QuantumError> {
    evolve_observed(h, psi0, t_final, cfg, |t, psi| (t, psi.clone()))
}

/// As [`evolve_time_dependent`], mapping each recorded state through
/// `observe` instead of storing it.
pub fn evolve_observed<T>(
    h: &PhasedHamiltonian,
    psi0: &StateVector,
    t_final: f64,
    cfg: &IntegratorConfig,
    mut observe: impl FnMut(f64, &StateVector) -> T,
) -> Result<Evolution<T>, QuantumError> {
    cfg.validate()?;
    ensure_same(h.space(), psi0.space())?;
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(QuantumError::InvalidIntegrator(format!(
            "t_final must be finite and non-negative, got {t_final}"
        )));
    }
    let compiled = h.compile();
    let max_step = cfg.resolve_max_step(h.characteristic_frequency(), t_final);
    let space = psi0.space().clone();
    let mut y: Vec<C64> = psi0.amplitudes().iter().copied().collect();

    let mut sampler = Sampler::new(cfg.record_stride);
    let mut phases = Vec::new();
    let rhs = |t: f64, psi: &[C64], out: &mut [C64]| {
        schrodinger_rhs(&compiled, &mut phases, t, psi, out);
    };
    let mut last_t = 0.0;
    let stats = integrate(
        &mut y,
        0.0,
        t_final,
        cfg.method,
        max_step,
        cfg.rel_tol,
        cfg.abs_tol,
        rhs,
        |step, t, psi| {
            last_t = t;
            if sampler.wants(step) {
                let state = to_state(&space, psi);
                sampler.push(step, observe(t, &state));
            }
            Ok(())
        },
    )?;
    let final_raw: DVector<C64> = DVector::from_column_slice(&y);
    let norm_drift = (final_raw.norm_squared() - 1.0).abs();
    if norm_drift > NORM_DRIFT_TOL {
        return Err(QuantumError::NormDrift {
            t: last_t,
            drift: norm_drift,
        });
    }
    let final_state = to_state(&space, &y);
    let samples = sampler.finish(stats.accepted_steps, || observe(last_t, &final_state));
    Ok(Evolution {
        samples,
        final_state,
        final_time: last_t,
        norm_drift,
        stats,
    })
}

fn to_state(space: &super::HilbertSpace, psi: &[C64]) -> StateVector {
    let v = DVector::from_column_slice(psi);
    let n = v.norm();
    StateVector::from_amplitudes_unchecked(space.clone(), if n > 0.0 { v.unscale(n) } else { v })
}

pub(crate) fn schrodinger_rhs(
    h: &CompiledHamiltonian,
    phases: &mut Vec<C64>,
    t: f64,
    psi: &[C64],
    out: &mut [C64],
) {
    h.phases(t, phases);
    out.iter_mut().for_each(|o| *o = C64::new(0.0, 0.0));
    for e in &h.entries {
        out[e.row] += e.eval(phases) * psi[e.col];
    }
    // -i H ψ
    for o in out.iter_mut() {
        *o = C64::new(o.im, -o.re);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{propagator, HilbertSpace, Operator};

    #[test]
    fn constant_hamiltonian_matches_propagator() {
        let s = HilbertSpace::qudit(3);
        let h = Operator::from_fn(&s, |r, c| {
            let x = (r * 3 + c) as f64;
            if r == c {
                C64::new(0.3 * x, 0.0)
            } else if r < c {
                C64::new(0.1 * x, 0.05 * x)
            } else {
                C64::new(0.1 * (c * 3 + r) as f64, -0.05 * (c * 3 + r) as f64)
            }
        });
        let psi0 = StateVector::basis(&s, 0);
        let ph = PhasedHamiltonian::constant(h.clone()).unwrap();
        let evo = evolve_time_dependent(&ph, &psi0, 4.0, &IntegratorConfig::default()).unwrap();
        let exact = propagator(&h, 4.0).unwrap().apply(&psi0).unwrap();
        let diff = (evo.final_state.amplitudes() - exact.amplitudes()).camax();
        assert!(diff < 1e-8, "diff {diff}");
    }

    #[test]
    fn record_stride_sample_count() {
        let s = HilbertSpace::qudit(2);
        let h = Operator::transition(&s, 0, 1)
            .add(&Operator::transition(&s, 1, 0))
            .unwrap();
        let cfg = IntegratorConfig {
            method: crate::quantum::Method::Rk4,
            max_step: Some(0.01),
            record_stride: 7,
            ..Default::default()
        };
        let evo = evolve_time_dependent(&PhasedHamiltonian::constant(h).unwrap(), &StateVector::basis(&s, 0), 1.0, &cfg)
            .unwrap();
        assert_eq!(evo.stats.accepted_steps, 100);
        assert_eq!(evo.samples.len(), 100 / 7 + 1);
        assert_eq!(evo.samples.last().unwrap().0, 1.0);
    }
}
