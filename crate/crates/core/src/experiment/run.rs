use std::f64::consts::PI;

use serde::Serialize;

use super::config::{ExperimentConfig, ExperimentKind, OneQubitParams, PrepareParams, TwoQubitConfig, VerifyParams};
use crate::error::{Error, Result};
use crate::one_qubit::{simulate_decay_until, verify_holonomy, HolonomyReport, OneQubitPulse};
use crate::parallel::Execution;
use crate::quantum::{IntegratorStats, LindbladDiagnostics};
use crate::superatom::{build_collective_state, collective_rabi, prepare_sequence, CollectiveLabel};
use crate::trace::FidelityTrace;
use crate::two_qubit::{
    effective_couplings, simulate_noisy_with, simulate_real_with, validate_conditions,
    verify_holonomy_two_qubit, ConditionReport, EffectiveCouplings, RunOptions,
};
use crate::units::{mhz, to_mhz};

/// Process exit classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitStatus {
    Success,
    InvalidConfig,
    Precondition,
    Numerical,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::InvalidConfig => 1,
            ExitStatus::Precondition => 2,
            ExitStatus::Numerical => 3,
        }
    }

    pub fn of(err: &Error) -> Self {
        if err.is_numerical() {
            ExitStatus::Numerical
        } else if matches!(err, Error::Precondition(_)) {
            ExitStatus::Precondition
        } else {
            ExitStatus::InvalidConfig
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PulseSummary {
    pub omega_mhz: f64,
    pub theta: f64,
    pub phi: f64,
    pub detuning_mhz: f64,
    pub omega0_mhz: f64,
    pub omega1_mhz: f64,
    pub tau_us: f64,
}

impl PulseSummary {
    fn new(p: &OneQubitPulse) -> Self {
        Self {
            omega_mhz: to_mhz(p.omega),
            theta: p.theta,
            phi: p.phi,
            detuning_mhz: to_mhz(p.detuning()),
            omega0_mhz: to_mhz(p.omega0()),
            omega1_mhz: to_mhz(p.omega1()),
            tau_us: p.duration(),
        }
    }
}

/// Effective two-qubit quantities in MHz and μs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivedSummary {
    /// `[re, im]`.
    pub omega01_mhz: [f64; 2],
    pub omega10_mhz: [f64; 2],
    pub omega_prime_mhz: f64,
    pub alpha: f64,
    pub tau_us: f64,
}

impl DerivedSummary {
    fn new(c: &EffectiveCouplings) -> Self {
        Self {
            omega01_mhz: [to_mhz(c.omega01.re), to_mhz(c.omega01.im)],
            omega10_mhz: [to_mhz(c.omega10.re), to_mhz(c.omega10.im)],
            omega_prime_mhz: to_mhz(c.omega_prime),
            alpha: c.alpha,
            tau_us: c.tau,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreparationSummary {
    pub n_atoms: usize,
    pub target: CollectiveLabel,
    pub overlap: f64,
    pub infidelity: f64,
    pub excitation_time_us: f64,
    pub transfer_time_us: f64,
    /// Collective over single-atom Rabi frequency.
    pub enhancement: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSummary {
    pub pulses: usize,
    pub alphas: usize,
    pub max_cyclic_defect: f64,
    pub max_parallel_transport_defect: f64,
    pub all_holonomic: bool,
}

/// JSON summary of one run. Absent sections are omitted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub experiment: ExperimentKind,
    pub name: String,
    pub status: ExitStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_fidelity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_fidelity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_time_us: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_mhz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pulse: Option<PulseSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holonomy: Option<HolonomyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holonomy_two_qubit: Option<HolonomyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify_grid: Option<GridSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conditions: Option<ConditionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derived: Option<DerivedSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preparation: Option<PreparationSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integrator: Option<IntegratorStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lindblad: Option<LindbladDiagnostics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub photon_mean_final: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_top_population: Option<f64>,
    pub trace_rows: usize,
    pub config: ExperimentConfig,
}

impl Summary {
    fn new(cfg: &ExperimentConfig) -> Self {
        Self {
            experiment: cfg.experiment,
            name: cfg.label().to_owned(),
            status: ExitStatus::Success,
            message: None,
            final_fidelity: None,
            min_fidelity: None,
            final_time_us: None,
            gamma_mhz: None,
            pulse: None,
            holonomy: None,
            holonomy_two_qubit: None,
            verify_grid: None,
            conditions: None,
            derived: None,
            preparation: None,
            integrator: None,
            lindblad: None,
            photon_mean_final: None,
            max_top_population: None,
            trace_rows: 0,
            config: cfg.clone(),
        }
    }

    fn absorb_trace(&mut self, trace: &FidelityTrace) {
        self.final_fidelity = trace.final_fidelity();
        self.min_fidelity = trace.min_fidelity();
        self.final_time_us = trace.final_row().map(|r| r.t_us);
        self.photon_mean_final = trace.final_row().and_then(|r| r.photon_mean);
        self.trace_rows = trace.rows.len();
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub summary: Summary,
    pub trace: Option<FidelityTrace>,
}

impl RunReport {
    pub fn status(&self) -> ExitStatus {
        self.summary.status
    }
}

/// Validates `cfg` and runs it in memory.
pub fn execute(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.validate()?;
    let mut summary = Summary::new(cfg);
    let p = &cfg.parameters;
    let trace = match cfg.experiment {
        ExperimentKind::Prepare => Some(run_prepare(p.prepare.as_ref().expect("validated"), &mut summary)?),
        ExperimentKind::OneQubit => Some(run_one_qubit(cfg, p.one_qubit.as_ref().expect("validated"), &mut summary)?),
        ExperimentKind::TwoQubit => Some(run_two_qubit(cfg, p.two_qubit.as_ref().expect("validated"), &mut summary)?),
        ExperimentKind::Verify => {
            run_verify(cfg, &mut summary)?;
            None
        }
        ExperimentKind::Validate => {
            run_validate(p.two_qubit.as_ref().expect("validated"), &mut summary)?;
            None
        }
    };
    if let Some(t) = &trace {
        t.check().map_err(|m| Error::Quantum(crate::quantum::QuantumError::InvalidDensityMatrix(m)))?;
        summary.absorb_trace(t);
    }
    Ok(RunReport { summary, trace })
}

fn run_prepare(pp: &PrepareParams, summary: &mut Summary) -> Result<FidelityTrace> {
    let basis = pp.basis()?;
    let omega = mhz(pp.omega_mhz);
    let prep = prepare_sequence(&basis, pp.target, omega)?;
    let g = build_collective_state(&basis, CollectiveLabel::G);
    let r = build_collective_state(&basis, CollectiveLabel::R);
    let target = build_collective_state(&basis, pp.target);
    let mut labels = vec![CollectiveLabel::G.to_string(), CollectiveLabel::R.to_string()];
    if pp.target != CollectiveLabel::R {
        labels.push(pp.target.to_string());
    }
    let total = prep.excitation_time + prep.transfer_time;
    let mut trace = FidelityTrace::new(total, labels, false);
    let mut stages = vec![(0.0, g.clone()), (prep.excitation_time, prep.after_excitation.clone())];
    if pp.target != CollectiveLabel::R {
        stages.push((total, prep.final_state.clone()));
    }
    for (t, psi) in &stages {
        let mut pops = vec![g.overlap_sq(psi)?, r.overlap_sq(psi)?];
        if pp.target != CollectiveLabel::R {
            pops.push(target.overlap_sq(psi)?);
        }
        trace.push(*t, target.overlap_sq(psi)?, pops, None);
    }
    summary.preparation = Some(PreparationSummary {
        n_atoms: pp.n_atoms,
        target: pp.target,
        overlap: prep.overlap,
        infidelity: 1.0 - prep.overlap,
        excitation_time_us: prep.excitation_time,
        transfer_time_us: prep.transfer_time,
        enhancement: collective_rabi(pp.n_atoms, omega) / omega,
    });
    Ok(trace)
}

fn run_one_qubit(cfg: &ExperimentConfig, q: &OneQubitParams, summary: &mut Summary) -> Result<FidelityTrace> {
    let pulse = q.pulse()?;
    let initial = q.initial_state()?;
    let t_final = q.horizon_tau.unwrap_or(1.0) * pulse.duration();
    let gamma = cfg.decay.gamma();
    let trace = simulate_decay_until(&pulse, &initial, gamma, t_final, &cfg.integrator)?;
    summary.pulse = Some(PulseSummary::new(&pulse));
    summary.holonomy = Some(verify_holonomy(&pulse, q.verify_samples)?);
    summary.integrator = Some(trace.stats.clone());
    summary.gamma_mhz = Some(to_mhz(gamma));
    Ok(trace)
}

fn run_two_qubit(cfg: &ExperimentConfig, tq: &TwoQubitConfig, summary: &mut Summary) -> Result<FidelityTrace> {
    let params = tq.to_params()?;
    summary.conditions = Some(validate_conditions(&params, tq.condition_threshold));
    let couplings = effective_couplings(&params)?;
    summary.derived = Some(DerivedSummary::new(&couplings));
    summary.holonomy_two_qubit = Some(verify_holonomy_two_qubit(&couplings, tq.verify_samples)?);
    let opts = RunOptions {
        horizon: Some(tq.horizon_tau.unwrap_or(1.0) * couplings.tau),
        truncation_tol: tq.truncation_tol,
    };
    let initial = tq.initial.state();
    let run = if cfg.decay.enabled {
        simulate_noisy_with(&params, &initial, cfg.decay.gamma(), &cfg.integrator, &opts)?
    } else {
        simulate_real_with(&params, &initial, &cfg.integrator, &opts)?
    };
    summary.gamma_mhz = Some(to_mhz(cfg.decay.gamma()));
    summary.integrator = Some(run.trace.stats.clone());
    summary.lindblad = run.lindblad;
    summary.max_top_population = Some(run.max_top_population);
    Ok(run.trace)
}

fn run_validate(tq: &TwoQubitConfig, summary: &mut Summary) -> Result<()> {
    let params = tq.to_params()?;
    let report = validate_conditions(&params, tq.condition_threshold);
    match effective_couplings(&params) {
        Ok(c) => summary.derived = Some(DerivedSummary::new(&c)),
        Err(e @ Error::Precondition(_)) => {
            summary.status = ExitStatus::Precondition;
            summary.message = Some(e.to_string());
        }
        Err(e) => return Err(e),
    }
    if summary.status == ExitStatus::Success {
        let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        if !failed.is_empty() {
            summary.message = Some(format!("soft conditions below threshold: {}", failed.join(", ")));
        }
    }
    summary.conditions = Some(report);
    Ok(())
}

impl VerifyParams {
    /// 20 pulses on a 5 × 4 `(θ, φ)` grid and 10 values of `α`.
    pub fn standard() -> Self {
        Self {
            omega_mhz: 5.0,
            theta: (0..5).map(|k| -1.2 + 0.6 * k as f64).collect(),
            phi: (0..4).map(|k| PI * k as f64 / 2.0 + 0.3).collect(),
            omega_prime_mhz: 0.0659,
            alpha: (0..10).map(|k| PI * k as f64 / 9.0).collect(),
            samples: 201,
            execution: Execution::default(),
        }
    }
}

/// Largest defects over a `(θ, φ)` grid of pulses and over `α`.
pub fn holonomy_grid(v: &VerifyParams) -> Result<GridSummary> {
    let pairs: Vec<(f64, f64)> = v
        .theta
        .iter()
        .flat_map(|&t| v.phi.iter().map(move |&p| (t, p)))
        .collect();
    let omega = mhz(v.omega_mhz);
    let one = v.execution.try_map(&pairs, |&(t, p)| {
        verify_holonomy(&OneQubitPulse::new(omega, t, p)?, v.samples)
    })?;
    let two = v.execution.try_map(&v.alpha, |&a| {
        verify_holonomy_two_qubit(&EffectiveCouplings::from_alpha(mhz(v.omega_prime_mhz), a), v.samples)
    })?;
    let all: Vec<&HolonomyReport> = one.iter().chain(&two).collect();
    Ok(GridSummary {
        pulses: one.len(),
        alphas: two.len(),
        max_cyclic_defect: all.iter().map(|r| r.cyclic_defect).fold(0.0, f64::max),
        max_parallel_transport_defect: all.iter().map(|r| r.parallel_transport_defect).fold(0.0, f64::max),
        all_holonomic: all.iter().all(|r| r.is_holonomic()),
    })
}

fn run_verify(cfg: &ExperimentConfig, summary: &mut Summary) -> Result<()> {
    let p = &cfg.parameters;
    if let Some(q) = &p.one_qubit {
        let pulse = q.pulse()?;
        summary.pulse = Some(PulseSummary::new(&pulse));
        summary.holonomy = Some(verify_holonomy(&pulse, q.verify_samples)?);
    }
    if let Some(tq) = &p.two_qubit {
        let params = tq.to_params()?;
        let c = effective_couplings(&params)?;
        summary.derived = Some(DerivedSummary::new(&c));
        summary.holonomy_two_qubit = Some(verify_holonomy_two_qubit(&c, tq.verify_samples)?);
    }
    if let Some(v) = &p.verify {
        summary.verify_grid = Some(holonomy_grid(v)?);
    }
    Ok(())
}
