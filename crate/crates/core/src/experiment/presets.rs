use std::f64::consts::PI;

use super::config::{
    DecayConfig, ExperimentConfig, ExperimentKind, OneQubitParams, OutputConfig, Parameters,
    PrepareParams, TwoQubitConfig,
};
use crate::error::{Error, Result};
use crate::quantum::IntegratorConfig;
use crate::superatom::{CollectiveLabel, DEFAULT_ATOMS};
use crate::two_qubit::{TwoQubitParams, RESONANCE_TOL};
use crate::units::to_mhz;

pub const PRESET_NAMES: [&str; 5] = ["fig4", "fig5a", "fig5b", "fig5c", "prepare_demo"];

/// Superatom lifetime behind the decay presets, μs.
pub const LIFETIME_US: f64 = 300.0;

/// Step factor of the two-qubit presets.
pub const FIG5_STEP_FACTOR: f64 = 0.2;

/// Named configuration with the amended parameter values.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    build(name, false)
}

/// As [`preset`] with the parameter values exactly as published.
pub fn preset_literal(name: &str) -> Result<ExperimentConfig> {
    build(name, true)
}

fn outputs(name: &str) -> OutputConfig {
    OutputConfig {
        trace_path: Some(format!("{name}_trace.csv").into()),
        summary_path: Some(format!("{name}_summary.json").into()),
    }
}

fn decay(enabled: bool) -> DecayConfig {
    DecayConfig {
        enabled,
        gamma_mhz: 1.0 / LIFETIME_US,
    }
}

fn fig4(literal: bool) -> OneQubitParams {
    let field = if literal { 1.25 * 3f64.sqrt() } else { 1.25 * 6f64.sqrt() };
    OneQubitParams {
        detuning_mhz: Some(-5.0),
        omega0_mhz: Some(field),
        omega1_mhz: Some(field),
        ..Default::default()
    }
}

fn fig5(scale: f64, literal: bool) -> TwoQubitConfig {
    let k = |xs: [f64; 2]| xs.map(|x| x * scale);
    let last = if literal { 110.0 * PI } else { 110.0 };
    TwoQubitConfig {
        g_p_mhz: 10.0 * scale,
        g_q_mhz: 10.0 * scale,
        delta_p_mhz: 200.0 * scale,
        delta_q_mhz: 100.0 * scale,
        big_delta0_mhz: k([210.0, 220.0]),
        big_delta1_mhz: k([120.0, last]),
        omega0_mhz: k([10.0, 14.6888]),
        omega1_mhz: k([14.5, 10.0]),
        resonance_tol_mhz: to_mhz(RESONANCE_TOL) * scale,
        ..TwoQubitConfig::from_params(&TwoQubitParams::reference())
    }
}

fn build(name: &str, literal: bool) -> Result<ExperimentConfig> {
    let mut parameters = Parameters::default();
    let mut integrator = IntegratorConfig::default();
    let (experiment, decay) = match name {
        "fig4" => {
            parameters.one_qubit = Some(fig4(literal));
            (ExperimentKind::OneQubit, decay(true))
        }
        "fig5a" | "fig5b" | "fig5c" => {
            let scale = if name == "fig5c" { 5.0 } else { 1.0 };
            parameters.two_qubit = Some(fig5(scale, literal));
            integrator.step_factor = FIG5_STEP_FACTOR;
            integrator.record_stride = 500;
            (ExperimentKind::TwoQubit, decay(name != "fig5a"))
        }
        "prepare_demo" => {
            parameters.prepare = Some(PrepareParams {
                n_atoms: DEFAULT_ATOMS,
                omega_mhz: 1.0,
                target: CollectiveLabel::Zero,
            });
            (ExperimentKind::Prepare, decay(false))
        }
        other => {
            return Err(Error::Config(format!(
                "unknown preset {other:?}; expected one of {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(ExperimentConfig {
        experiment,
        name: Some(name.to_owned()),
        paper_literal: literal,
        parameters,
        decay,
        integrator,
        output: outputs(name),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_validates() {
        for name in PRESET_NAMES {
            preset(name).unwrap().validate().unwrap();
        }
        assert!(preset("fig9").is_err());
    }

    #[test]
    fn fig5c_is_five_times_fig5b() {
        let b = preset("fig5b").unwrap().parameters.two_qubit.unwrap();
        let c = preset("fig5c").unwrap().parameters.two_qubit.unwrap();
        assert!((c.g_p_mhz - 5.0 * b.g_p_mhz).abs() < 1e-12);
        assert!((c.big_delta1_mhz[1] - 5.0 * b.big_delta1_mhz[1]).abs() < 1e-10);
        assert_eq!(preset("fig5c").unwrap().decay, preset("fig5b").unwrap().decay);
    }

    #[test]
    fn literal_fig5_breaks_resonance() {
        let cfg = preset_literal("fig5a").unwrap();
        assert!(cfg.paper_literal);
        let p = cfg.parameters.two_qubit.unwrap().to_params().unwrap();
        assert!(p.check_resonance().is_err());
    }
}
