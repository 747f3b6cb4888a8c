use std::fs;

use holonomy::experiment::{
    self, execute, preset, preset_literal, summary_json, DecayConfig, ExitStatus, ExperimentConfig, ExperimentKind,
    OutputConfig, Parameters, VerifyParams,
};
use holonomy::quantum::IntegratorConfig;
use holonomy::Execution;

#[test]
fn repeated_runs_are_byte_identical() {
    let cfg = preset("fig4").unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (_, ea) = experiment::run(&cfg, a.path()).unwrap();
    let (_, eb) = experiment::run(&cfg, b.path()).unwrap();
    let read = |p: &std::path::Path| fs::read(p).unwrap();
    assert_eq!(read(ea.trace.as_ref().unwrap()), read(eb.trace.as_ref().unwrap()));
    assert_eq!(read(&ea.summary), read(&eb.summary));
}

#[test]
fn fig4_outputs() {
    let cfg = preset("fig4").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (report, emitted) = experiment::run(&cfg, dir.path()).unwrap();
    assert_eq!(report.status(), ExitStatus::Success);
    let csv = fs::read_to_string(emitted.trace.as_ref().unwrap()).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t_us,t_over_tau,fidelity,pop_0bar,pop_1bar,pop_rbar");
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    let steps = report.trace.as_ref().unwrap().stats.accepted_steps;
    assert_eq!(rows.len(), steps / cfg.integrator.record_stride + 1);
    assert_eq!(rows[0][0], 0.0);
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0]));
    for r in &rows {
        assert!((0.0..=1.0 + 1e-9).contains(&r[2]));
        assert!(r[3..].iter().sum::<f64>() <= 1.0 + 1e-6);
    }
    let last = rows.last().unwrap();
    assert!((last[1] - 1.0).abs() < 1e-12);

    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&emitted.summary).unwrap()).unwrap();
    assert_eq!(json["name"], "fig4");
    assert_eq!(json["trace_rows"], rows.len());
    let embedded: ExperimentConfig = serde_json::from_value(json["config"].clone()).unwrap();
    assert_eq!(embedded, cfg);
}

#[test]
fn csv_rows_follow_stride() {
    for stride in [1, 7, 50] {
        let mut cfg = preset("fig4").unwrap();
        cfg.integrator.record_stride = stride;
        let report = execute(&cfg).unwrap();
        let t = report.trace.unwrap();
        assert_eq!(t.rows.len(), t.stats.accepted_steps / stride + 1, "stride {stride}");
    }
}

#[test]
fn broken_resonance_is_a_precondition_failure() {
    let mut cfg = preset("fig5a").unwrap();
    cfg.parameters.two_qubit.as_mut().unwrap().big_delta1_mhz[1] = 110.5;
    let err = execute(&cfg).unwrap_err();
    assert_eq!(ExitStatus::of(&err).code(), 2, "{err}");

    cfg.experiment = ExperimentKind::Validate;
    let report = execute(&cfg).unwrap();
    assert_eq!(report.status().code(), 2);
    assert!(!report.summary.conditions.unwrap().resonance_ok);
}

#[test]
fn literal_fig5_values_cannot_run() {
    let cfg = preset_literal("fig5a").unwrap();
    assert!(cfg.paper_literal);
    let err = execute(&cfg).unwrap_err();
    assert_eq!(ExitStatus::of(&err), ExitStatus::Precondition);
}

#[test]
fn literal_fig4_runs_with_other_pulse() {
    let amended = execute(&preset("fig4").unwrap()).unwrap();
    let literal = execute(&preset_literal("fig4").unwrap()).unwrap();
    let (a, b) = (amended.summary.pulse.unwrap(), literal.summary.pulse.unwrap());
    assert!((a.tau_us - 0.1).abs() < 1e-12);
    assert!((b.tau_us - a.tau_us).abs() > 1e-3);
}

#[test]
fn bad_integrator_is_a_config_error() {
    let mut cfg = preset("fig4").unwrap();
    cfg.integrator.record_stride = 0;
    let err = execute(&cfg).unwrap_err();
    assert_eq!(ExitStatus::of(&err).code(), 1);
    let err = ExperimentConfig::from_toml("experiment = \"one_qubit\"\nbogus = 3\n").unwrap_err();
    assert_eq!(ExitStatus::of(&err).code(), 1);
}

fn verify_config(execution: Execution) -> ExperimentConfig {
    ExperimentConfig {
        experiment: ExperimentKind::Verify,
        name: Some("grid".into()),
        paper_literal: false,
        parameters: Parameters {
            verify: Some(VerifyParams { execution, ..VerifyParams::standard() }),
            ..Default::default()
        },
        decay: DecayConfig::default(),
        integrator: IntegratorConfig::default(),
        output: OutputConfig::default(),
    }
}

#[test]
fn verify_grid_is_holonomic_on_both_paths() {
    let par = execute(&verify_config(Execution::Parallel)).unwrap();
    let seq = execute(&verify_config(Execution::Sequential)).unwrap();
    let g = par.summary.verify_grid.as_ref().unwrap();
    assert_eq!((g.pulses, g.alphas), (20, 10));
    assert!(g.all_holonomic);
    assert!(g.max_cyclic_defect < 1e-12 && g.max_parallel_transport_defect < 1e-12);
    assert_eq!(par.summary.verify_grid, seq.summary.verify_grid);
}

#[test]
fn prepare_demo_reaches_target() {
    let report = execute(&preset("prepare_demo").unwrap()).unwrap();
    let p = report.summary.preparation.as_ref().unwrap();
    assert_eq!(p.n_atoms, 100);
    assert!(p.infidelity < 1e-8);
    assert!((p.enhancement - 10.0).abs() < 1e-10);
    assert_eq!(report.trace.unwrap().rows.len(), 3);
}

#[test]
fn summary_keys_are_sorted() {
    let report = execute(&preset("fig4").unwrap()).unwrap();
    let text = summary_json(&report.summary).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let keys: Vec<&String> = value.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    let pos = |k: &str| text.find(&format!("\"{k}\"")).unwrap();
    assert!(pos("config") < pos("experiment") && pos("experiment") < pos("trace_rows"));
}
