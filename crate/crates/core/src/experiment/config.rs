use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::one_qubit::{qubit_space, OneQubitPulse};
use crate::parallel::Execution;
use crate::quantum::{IntegratorConfig, StateVector};
use crate::superatom::{CollectiveLabel, MicroBasis};
use crate::two_qubit::{basis_state, StarkMode, TwoQubitParams, DEFAULT_THRESHOLD, RESONANCE_TOL, TRUNCATION_TOL};
use crate::units::{mhz, to_mhz};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Prepare,
    OneQubit,
    TwoQubit,
    Verify,
    Validate,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Prepare => "prepare",
            ExperimentKind::OneQubit => "one_qubit",
            ExperimentKind::TwoQubit => "two_qubit",
            ExperimentKind::Verify => "verify",
            ExperimentKind::Validate => "validate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// Label used for default output file names.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Marks configs built from the unamended published parameter values.
    #[serde(default)]
    pub paper_literal: bool,
    #[serde(default)]
    pub parameters: Parameters,
    #[serde(default)]
    pub decay: DecayConfig,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prepare: Option<PrepareParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub one_qubit: Option<OneQubitParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_qubit: Option<TwoQubitConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrepareParams {
    pub n_atoms: usize,
    pub omega_mhz: f64,
    pub target: CollectiveLabel,
}

/// A square pulse, given either as `(omega_mhz, sin_theta | theta, phi)` or
/// as `(detuning_mhz, omega0_mhz, omega1_mhz)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OneQubitParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_mhz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sin_theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detuning_mhz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega0_mhz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega1_mhz: Option<f64>,
    #[serde(default = "default_qubit_initial")]
    pub initial: CollectiveLabel,
    /// Run length in units of `τ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon_tau: Option<f64>,
    #[serde(default = "default_samples")]
    pub verify_samples: usize,
}

impl Default for OneQubitParams {
    fn default() -> Self {
        Self {
            omega_mhz: None,
            theta: None,
            sin_theta: None,
            phi: None,
            detuning_mhz: None,
            omega0_mhz: None,
            omega1_mhz: None,
            initial: default_qubit_initial(),
            horizon_tau: None,
            verify_samples: default_samples(),
        }
    }
}

fn default_qubit_initial() -> CollectiveLabel {
    CollectiveLabel::Zero
}

fn default_samples() -> usize {
    201
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TwoQubitBasis {
    #[serde(rename = "0bar0bar")]
    ZeroZero,
    #[serde(rename = "0bar1bar")]
    ZeroOne,
    #[serde(rename = "1bar0bar")]
    OneZero,
    #[serde(rename = "1bar1bar")]
    OneOne,
}

impl TwoQubitBasis {
    pub fn state(self) -> StateVector {
        match self {
            TwoQubitBasis::ZeroZero => basis_state(0, 0),
            TwoQubitBasis::ZeroOne => basis_state(0, 1),
            TwoQubitBasis::OneZero => basis_state(1, 0),
            TwoQubitBasis::OneOne => basis_state(1, 1),
        }
    }
}

/// Two-superatom cavity parameters in MHz. Rabi amplitudes are
/// `omega*_mhz · e^{i omega*_phase}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoQubitConfig {
    pub g_p_mhz: f64,
    pub g_q_mhz: f64,
    pub delta_p_mhz: f64,
    pub delta_q_mhz: f64,
    pub big_delta0_mhz: [f64; 2],
    pub big_delta1_mhz: [f64; 2],
    pub omega0_mhz: [f64; 2],
    pub omega1_mhz: [f64; 2],
    #[serde(default)]
    pub omega0_phase: [f64; 2],
    #[serde(default)]
    pub omega1_phase: [f64; 2],
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default)]
    pub stark_mode: StarkMode,
    #[serde(default = "default_resonance_tol")]
    pub resonance_tol_mhz: f64,
    #[serde(default = "default_two_initial")]
    pub initial: TwoQubitBasis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon_tau: Option<f64>,
    #[serde(default = "default_threshold")]
    pub condition_threshold: f64,
    #[serde(default = "default_truncation")]
    pub truncation_tol: f64,
    #[serde(default = "default_samples")]
    pub verify_samples: usize,
}

fn default_n_max() -> usize {
    3
}

fn default_resonance_tol() -> f64 {
    to_mhz(RESONANCE_TOL)
}

fn default_two_initial() -> TwoQubitBasis {
    TwoQubitBasis::ZeroOne
}

fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}

fn default_truncation() -> f64 {
    TRUNCATION_TOL
}

impl TwoQubitConfig {
    pub fn from_params(p: &TwoQubitParams) -> Self {
        let m = |x: f64| to_mhz(x);
        Self {
            g_p_mhz: m(p.g_p),
            g_q_mhz: m(p.g_q),
            delta_p_mhz: m(p.delta_p),
            delta_q_mhz: m(p.delta_q),
            big_delta0_mhz: p.big_delta0.map(m),
            big_delta1_mhz: p.big_delta1.map(m),
            omega0_mhz: p.omega0.map(|z| m(z.norm())),
            omega1_mhz: p.omega1.map(|z| m(z.norm())),
            omega0_phase: p.omega0.map(|z| z.arg()),
            omega1_phase: p.omega1.map(|z| z.arg()),
            n_max: p.n_max,
            stark_mode: p.stark_mode,
            resonance_tol_mhz: m(p.resonance_tol),
            initial: default_two_initial(),
            horizon_tau: None,
            condition_threshold: DEFAULT_THRESHOLD,
            truncation_tol: TRUNCATION_TOL,
            verify_samples: default_samples(),
        }
    }

    pub fn to_params(&self) -> Result<TwoQubitParams> {
        let c = |a: [f64; 2], ph: [f64; 2]| [0, 1].map(|j| C64::from_polar(mhz(a[j]), ph[j]));
        let p = TwoQubitParams {
            g_p: mhz(self.g_p_mhz),
            g_q: mhz(self.g_q_mhz),
            delta_p: mhz(self.delta_p_mhz),
            delta_q: mhz(self.delta_q_mhz),
            big_delta0: self.big_delta0_mhz.map(mhz),
            big_delta1: self.big_delta1_mhz.map(mhz),
            omega0: c(self.omega0_mhz, self.omega0_phase),
            omega1: c(self.omega1_mhz, self.omega1_phase),
            n_max: self.n_max,
            stark_mode: self.stark_mode,
            resonance_tol: mhz(self.resonance_tol_mhz),
        };
        p.validate()?;
        if self.omega0_mhz.iter().chain(&self.omega1_mhz).any(|&a| a < 0.0) {
            return Err(Error::InvalidParameter("Rabi amplitudes must be non-negative".into()));
        }
        if !(self.condition_threshold >= 1.0) {
            return Err(Error::InvalidParameter("condition_threshold must be at least 1".into()));
        }
        if !(self.truncation_tol > 0.0) {
            return Err(Error::InvalidParameter("truncation_tol must be positive".into()));
        }
        check_horizon(self.horizon_tau)?;
        check_samples(self.verify_samples)?;
        Ok(p)
    }
}

/// Grid for the holonomy suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyParams {
    pub omega_mhz: f64,
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    pub omega_prime_mhz: f64,
    pub alpha: Vec<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub execution: Execution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayConfig {
    #[serde(default)]
    pub enabled: bool,
    /// Rate per channel as the coefficient of 2π, i.e. `1/τ_c` with `τ_c` in μs.
    #[serde(default = "default_gamma")]
    pub gamma_mhz: f64,
}

fn default_gamma() -> f64 {
    1.0 / 300.0
}

impl Default for DecayConfig {
    fn default() -> Self {
        Self {
            enabled: false,
            gamma_mhz: default_gamma(),
        }
    }
}

impl DecayConfig {
    /// Rate in rad/μs, zero when disabled.
    pub fn gamma(&self) -> f64 {
        if self.enabled {
            mhz(self.gamma_mhz)
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary_path: Option<PathBuf>,
}

/// Environment variable naming the directory relative output paths resolve against.
pub const OUTPUT_DIR_ENV: &str = "SIM_OUTPUT_DIR";

fn check_horizon(h: Option<f64>) -> Result<()> {
    match h {
        Some(h) if !(h > 0.0 && h.is_finite()) => {
            Err(Error::InvalidParameter(format!("horizon_tau must be positive, got {h}")))
        }
        _ => Ok(()),
    }
}

fn check_samples(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter("verify_samples must be at least 2".into()));
    }
    Ok(())
}

impl OneQubitParams {
    pub fn pulse(&self) -> Result<OneQubitPulse> {
        let angles = [self.omega_mhz, self.theta, self.sin_theta, self.phi];
        let fields = [self.detuning_mhz, self.omega0_mhz, self.omega1_mhz];
        let any_angles = angles.iter().any(Option::is_some);
        let any_fields = fields.iter().any(Option::is_some);
        match (any_angles, any_fields) {
            (true, true) => Err(Error::Config(
                "give the pulse either as angles or as fields, not both".into(),
            )),
            (false, true) => match fields {
                [Some(d), Some(o0), Some(o1)] => OneQubitPulse::from_fields(mhz(d), mhz(o0), mhz(o1)),
                _ => Err(Error::Config(
                    "detuning_mhz, omega0_mhz and omega1_mhz are all required".into(),
                )),
            },
            (true, false) => {
                let (Some(omega), Some(phi)) = (self.omega_mhz, self.phi) else {
                    return Err(Error::Config("omega_mhz and phi are required".into()));
                };
                match (self.theta, self.sin_theta) {
                    (Some(t), None) => OneQubitPulse::new(mhz(omega), t, phi),
                    (None, Some(s)) => OneQubitPulse::from_sin_theta(mhz(omega), s, phi),
                    _ => Err(Error::Config("give exactly one of theta and sin_theta".into())),
                }
            }
            (false, false) => Err(Error::Config("one_qubit pulse is empty".into())),
        }
    }

    pub fn initial_state(&self) -> Result<StateVector> {
        let index = match self.initial {
            CollectiveLabel::Zero => 0,
            CollectiveLabel::One => 1,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "one-qubit initial state must be 0bar or 1bar, got {other}"
                )))
            }
        };
        Ok(StateVector::basis(&qubit_space(), index))
    }

    fn validate(&self) -> Result<()> {
        self.pulse()?;
        self.initial_state()?;
        check_horizon(self.horizon_tau)?;
        check_samples(self.verify_samples)
    }
}

impl PrepareParams {
    pub fn basis(&self) -> Result<MicroBasis> {
        MicroBasis::new(self.n_atoms)
    }

    fn validate(&self) -> Result<()> {
        self.basis()?;
        if !(self.omega_mhz > 0.0 && self.omega_mhz.is_finite()) {
            return Err(Error::InvalidParameter("omega_mhz must be positive".into()));
        }
        if !matches!(self.target, CollectiveLabel::Zero | CollectiveLabel::One | CollectiveLabel::R) {
            return Err(Error::InvalidParameter(format!(
                "preparation target must be 0bar, 1bar or rbar, got {}",
                self.target
            )));
        }
        Ok(())
    }
}

impl VerifyParams {
    fn validate(&self) -> Result<()> {
        if !(self.omega_mhz > 0.0 && self.omega_prime_mhz > 0.0) {
            return Err(Error::InvalidParameter("verify rates must be positive".into()));
        }
        if self.theta.is_empty() || self.phi.is_empty() || self.alpha.is_empty() {
            return Err(Error::InvalidParameter("verify grid axes must be non-empty".into()));
        }
        if !self.theta.iter().chain(&self.phi).chain(&self.alpha).all(|x| x.is_finite()) {
            return Err(Error::InvalidParameter("verify grid must be finite".into()));
        }
        check_samples(self.samples)
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Checks every section the experiment needs against its module's
    /// invariants. Runs no simulation.
    pub fn validate(&self) -> Result<()> {
        self.integrator.validate()?;
        if !(self.decay.gamma_mhz >= 0.0 && self.decay.gamma_mhz.is_finite()) {
            return Err(Error::InvalidParameter("gamma_mhz must be non-negative".into()));
        }
        let p = &self.parameters;
        let missing = |s: &str| Error::Config(format!("experiment {} needs [parameters.{s}]", self.experiment.as_str()));
        match self.experiment {
            ExperimentKind::Prepare => p.prepare.as_ref().ok_or_else(|| missing("prepare"))?.validate()?,
            ExperimentKind::OneQubit => p.one_qubit.as_ref().ok_or_else(|| missing("one_qubit"))?.validate()?,
            ExperimentKind::TwoQubit | ExperimentKind::Validate => {
                p.two_qubit.as_ref().ok_or_else(|| missing("two_qubit"))?.to_params()?;
            }
            ExperimentKind::Verify => {
                if p.one_qubit.is_none() && p.two_qubit.is_none() && p.verify.is_none() {
                    return Err(Error::Config(
                        "verify needs at least one of [parameters.one_qubit], [parameters.two_qubit], [parameters.verify]"
                            .into(),
                    ));
                }
            }
        }
        if self.experiment == ExperimentKind::Verify {
            if let Some(q) = &p.one_qubit {
                q.validate()?;
            }
            if let Some(t) = &p.two_qubit {
                t.to_params()?;
            }
            if let Some(v) = &p.verify {
                v.validate()?;
            }
        }
        Ok(())
    }

    pub fn label(&self) -> &str {
        self.name.as_deref().unwrap_or(self.experiment.as_str())
    }

    /// Output paths, with relative or missing entries placed under `dir`.
    pub fn resolve_outputs(&self, dir: &Path) -> (PathBuf, PathBuf) {
        let place = |p: &Option<PathBuf>, default: String| match p {
            Some(p) if p.is_absolute() => p.clone(),
            Some(p) => dir.join(p),
            None => dir.join(default),
        };
        (
            place(&self.output.trace_path, format!("{}_trace.csv", self.label())),
            place(&self.output.summary_path, format!("{}_summary.json", self.label())),
        )
    }
}

/// `SIM_OUTPUT_DIR` if set, else the working directory.
pub fn default_output_dir() -> PathBuf {
    std::env::var_os(OUTPUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}
