use serde::{Deserialize, Serialize};

use super::params::TwoQubitParams;

pub const DEFAULT_THRESHOLD: f64 = 10.0;
// keeps exact ratios such as 100/10 from failing on round-off
const RATIO_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    /// Left-hand magnitude over right-hand magnitude. Infinite when the
    /// right-hand side vanishes.
    pub ratio: f64,
    pub pass: bool,
}

/// Strong inequalities behind the effective model, as ratios, with the
/// resonance equalities alongside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub threshold: f64,
    pub conditions: Vec<Condition>,
    /// `(Δ¹₀−δ_p) − (Δ²₁−δ_q)` and `(Δ¹₁−δ_q) − (Δ²₀−δ_p)`, rad/μs.
    pub resonance_mismatch: [f64; 2],
    pub resonance_ok: bool,
}

impl ConditionReport {
    pub fn all_pass(&self) -> bool {
        self.conditions.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Condition> {
        self.conditions.iter().filter(|c| !c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs == 0.0 {
        f64::INFINITY
    } else {
        lhs.abs() / rhs.abs()
    }
}

/// Evaluates every inequality ratio; each passes when `ratio ≥ threshold`.
pub fn validate_conditions(params: &TwoQubitParams, threshold: f64) -> ConditionReport {
    let p = params;
    let mut list: Vec<(String, f64)> = vec![
        ("resonance_01_over_a1".into(), ratio(p.d0(0), p.reduced_a(0).norm())),
        ("resonance_01_over_b2".into(), ratio(p.d0(0), p.reduced_b(1).norm())),
        ("resonance_10_over_b1".into(), ratio(p.d1(0), p.reduced_b(0).norm())),
        ("resonance_10_over_a2".into(), ratio(p.d1(0), p.reduced_a(1).norm())),
    ];
    for j in 0..2 {
        list.push((format!("laser_0p_{}", j + 1), ratio(p.big_delta0[j], p.omega0[j].norm())));
        list.push((format!("laser_1q_{}", j + 1), ratio(p.big_delta1[j], p.omega1[j].norm())));
    }
    list.push(("cavity_p".into(), ratio(p.delta_p, p.g_p)));
    list.push(("cavity_q".into(), ratio(p.delta_q, p.g_q)));
    list.push((
        "cavity_split".into(),
        ratio(p.delta_p - p.delta_q, p.g_p.abs().max(p.g_q.abs())),
    ));
    ConditionReport {
        threshold,
        conditions: list
            .into_iter()
            .map(|(name, ratio)| Condition {
                pass: ratio >= threshold * (1.0 - RATIO_SLACK),
                name,
                ratio,
            })
            .collect(),
        resonance_mismatch: p.resonance_mismatch(),
        resonance_ok: p.check_resonance().is_ok(),
    }
}
