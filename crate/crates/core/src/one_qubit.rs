//! Single-loop holonomic gates on one superatom.
//!
//! A square pulse drives `|0̄⟩ ↔ |r̄⟩` and `|1̄⟩ ↔ |r̄⟩` with a common
//! detuning. After `τ = π/Ω` the computational subspace returns to itself
//! and the acquired transformation is purely geometric.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{
    evolve_lindblad_observed, state_fidelity, CollapseChannel, DensityMatrix, HilbertSpace,
    IntegratorConfig, Operator, PhasedHamiltonian, StateVector,
};
use crate::superatom::{effective_space, CollectiveLabel};
use crate::trace::FidelityTrace;
use crate::units::mhz;

/// Upper bound on the holonomy defects for a passing verdict.
pub const HOLONOMY_TOL: f64 = 1e-12;

/// Square-pulse parameters `(Ω, θ, φ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneQubitPulse {
    /// rad/μs.
    pub omega: f64,
    pub theta: f64,
    pub phi: f64,
}

impl OneQubitPulse {
    pub fn new(omega: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParameter(format!("Ω must be positive, got {omega}")));
        }
        if !(theta.is_finite() && phi.is_finite()) {
            return Err(Error::InvalidParameter("θ and φ must be finite".into()));
        }
        Ok(Self { omega, theta, phi })
    }

    pub fn from_sin_theta(omega: f64, sin_theta: f64, phi: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&sin_theta) {
            return Err(Error::InvalidParameter(format!("sin θ = {sin_theta} outside [-1, 1]")));
        }
        Self::new(omega, sin_theta.asin(), phi)
    }

    /// Recovers `(Ω, θ, φ)` from a detuning and two non-negative Rabi
    /// amplitudes.
    pub fn from_fields(delta: f64, omega0: f64, omega1: f64) -> Result<Self> {
        if omega0 < 0.0 || omega1 < 0.0 {
            return Err(Error::InvalidParameter("Rabi amplitudes must be non-negative".into()));
        }
        let omega = (delta * delta / 4.0 + omega0 * omega0 + omega1 * omega1).sqrt();
        if omega == 0.0 {
            return Err(Error::InvalidParameter("all pulse fields vanish".into()));
        }
        let sin_theta = (delta / (2.0 * omega)).clamp(-1.0, 1.0);
        Self::from_sin_theta(omega, sin_theta, 2.0 * omega1.atan2(omega0))
    }

    /// `Δ = 2Ω sin θ`.
    pub fn detuning(&self) -> f64 {
        2.0 * self.omega * self.theta.sin()
    }

    /// `Ω₀ = Ω cos θ cos(φ/2)`.
    pub fn omega0(&self) -> f64 {
        self.omega * self.theta.cos() * (self.phi / 2.0).cos()
    }

    /// `Ω₁ = Ω cos θ sin(φ/2)`.
    pub fn omega1(&self) -> f64 {
        self.omega * self.theta.cos() * (self.phi / 2.0).sin()
    }

    /// `τ = π/Ω`.
    pub fn duration(&self) -> f64 {
        PI / self.omega
    }
}

pub fn qubit_space() -> HilbertSpace {
    effective_space(&[CollectiveLabel::Zero, CollectiveLabel::One, CollectiveLabel::R])
        .expect("fixed level set")
}

pub fn computational_space() -> HilbertSpace {
    effective_space(&[CollectiveLabel::Zero, CollectiveLabel::One]).expect("fixed level set")
}

/// `H = Δ|r̄⟩⟨r̄| + Ω₀|r̄⟩⟨0̄| + Ω₁|r̄⟩⟨1̄| + h.c.` on `(0bar, 1bar, rbar)`.
pub fn build_hamiltonian(p: &OneQubitPulse) -> Operator {
    let s = qubit_space();
    let mut h = Operator::zeros(&s);
    let m = h.matrix_mut();
    m[(2, 2)] = C64::new(p.detuning(), 0.0);
    m[(2, 0)] = C64::new(p.omega0(), 0.0);
    m[(0, 2)] = C64::new(p.omega0(), 0.0);
    m[(2, 1)] = C64::new(p.omega1(), 0.0);
    m[(1, 2)] = C64::new(p.omega1(), 0.0);
    h
}

/// Closed-form `exp(-iHt)` with `φ_t = Ωt`.
pub fn analytic_propagator(p: &OneQubitPulse, t: f64) -> Operator {
    let pt = p.omega * t;
    let (st, ct) = p.theta.sin_cos();
    let (sh, ch) = (p.phi / 2.0).sin_cos();
    let i = C64::i();
    let global = C64::from_polar(1.0, -pt * st);
    let bright = (C64::new(pt.cos(), 0.0) + i * (pt.sin() * st)) * global;
    let rr = (C64::new(pt.cos(), 0.0) - i * (pt.sin() * st)) * global;
    let leak = -i * (pt.sin() * ct) * global;
    let one = C64::new(1.0, 0.0);
    let mut u = Operator::zeros(&qubit_space());
    let m = u.matrix_mut();
    m[(0, 0)] = one * (sh * sh) + bright * (ch * ch);
    m[(0, 1)] = (bright - one) * (sh * ch);
    m[(1, 0)] = m[(0, 1)];
    m[(1, 1)] = one * (ch * ch) + bright * (sh * sh);
    m[(0, 2)] = leak * ch;
    m[(2, 0)] = leak * ch;
    m[(1, 2)] = leak * sh;
    m[(2, 1)] = leak * sh;
    m[(2, 2)] = rr;
    u
}

/// `e^{-iγ/2} e^{-iγ/2 n·σ}` with `γ = π(1 + sin θ)`, `n = (sin φ, cos φ)`
/// and `σ = (σx, σz)`, on `(0bar, 1bar)`.
pub fn holonomic_gate(theta: f64, phi: f64) -> Operator {
    let half = PI / 2.0 * (1.0 + theta.sin());
    let (nx, nz) = phi.sin_cos();
    let (s, c) = half.sin_cos();
    let i = C64::i();
    let g = C64::from_polar(1.0, -half);
    let mut u = Operator::zeros(&computational_space());
    let m = u.matrix_mut();
    m[(0, 0)] = g * (C64::new(c, 0.0) - i * (s * nz));
    m[(1, 1)] = g * (C64::new(c, 0.0) + i * (s * nz));
    m[(0, 1)] = g * (-i * (s * nx));
    m[(1, 0)] = m[(0, 1)];
    u
}

/// Rotation axis in the x–z plane of the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RotationAxis {
    X,
    Z,
    /// `(n_x, n_z)`, normalised on use.
    Vector { x: f64, z: f64 },
}

impl RotationAxis {
    fn components(self) -> Result<(f64, f64)> {
        match self {
            RotationAxis::X => Ok((1.0, 0.0)),
            RotationAxis::Z => Ok((0.0, 1.0)),
            RotationAxis::Vector { x, z } => {
                let n = x.hypot(z);
                if !(n > 0.0 && n.is_finite()) {
                    return Err(Error::InvalidParameter("rotation axis has zero length".into()));
                }
                Ok((x / n, z / n))
            }
        }
    }
}

/// Pulse realising `exp(-iβ n·σ/2)` up to global phase.
pub fn solve_pulse_for_rotation(axis: RotationAxis, beta: f64, omega: Option<f64>) -> Result<OneQubitPulse> {
    if !(beta > 0.0 && beta <= 2.0 * PI) {
        return Err(Error::InvalidParameter(format!(
            "rotation angle {beta} outside the reachable range (0, 2π]"
        )));
    }
    let (nx, nz) = axis.components()?;
    let sin_theta = (beta / PI - 1.0).clamp(-1.0, 1.0);
    OneQubitPulse::from_sin_theta(omega.unwrap_or(mhz(5.0)), sin_theta, nx.atan2(nz))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolonomyReport {
    pub cyclic_defect: f64,
    pub parallel_transport_defect: f64,
    pub cyclic: bool,
    pub parallel_transport: bool,
}

impl HolonomyReport {
    pub(crate) fn from_defects(cyclic_defect: f64, parallel_transport_defect: f64) -> Self {
        Self {
            cyclic_defect,
            parallel_transport_defect,
            cyclic: cyclic_defect < HOLONOMY_TOL,
            parallel_transport: parallel_transport_defect < HOLONOMY_TOL,
        }
    }

    pub fn is_holonomic(&self) -> bool {
        self.cyclic && self.parallel_transport
    }
}

/// Leakage out of the computational subspace at `τ` and the largest
/// `|⟨i(t)|H|l(t)⟩|` over `samples` evenly spaced times in `[0, τ]`.
pub fn verify_holonomy(p: &OneQubitPulse, samples: usize) -> Result<HolonomyReport> {
    verify_holonomy_over(p, p.duration(), samples)
}

/// As [`verify_holonomy`] with an arbitrary evolution time in place of `τ`.
pub fn verify_holonomy_over(p: &OneQubitPulse, period: f64, samples: usize) -> Result<HolonomyReport> {
    if samples < 2 {
        return Err(Error::InvalidParameter("need at least two samples".into()));
    }
    let u = analytic_propagator(p, period);
    let cyclic = (0..2).map(|k| u.get(2, k).norm()).fold(0.0, f64::max);
    let h = build_hamiltonian(p);
    let mut transport = 0.0f64;
    for k in 0..samples {
        let t = period * k as f64 / (samples - 1) as f64;
        let u = analytic_propagator(p, t);
        let m = u.matrix().adjoint() * h.matrix() * u.matrix();
        for i in 0..2 {
            for l in 0..2 {
                transport = transport.max(m[(i, l)].norm());
            }
        }
    }
    Ok(HolonomyReport::from_defects(cyclic, transport))
}

/// Lindblad run of the square pulse with `|0̄⟩⟨r̄|` and `|1̄⟩⟨r̄|` decay at
/// rate `gamma` each, up to `τ`.
pub fn simulate_decay(
    p: &OneQubitPulse,
    initial: &StateVector,
    gamma: f64,
    cfg: &IntegratorConfig,
) -> Result<FidelityTrace> {
    simulate_decay_until(p, initial, gamma, p.duration(), cfg)
}

pub fn simulate_decay_until(
    p: &OneQubitPulse,
    initial: &StateVector,
    gamma: f64,
    t_final: f64,
    cfg: &IntegratorConfig,
) -> Result<FidelityTrace> {
    let space = qubit_space();
    if initial.space() != &space {
        return Err(Error::InvalidParameter(
            "initial state must live in the (0bar, 1bar, rbar) space".into(),
        ));
    }
    let h = PhasedHamiltonian::constant(build_hamiltonian(p))?;
    let channels = [
        CollapseChannel::new(Operator::transition(&space, 0, 2), gamma)?,
        CollapseChannel::new(Operator::transition(&space, 1, 2), gamma)?,
    ];
    let labels = space.factor_labels()[0].clone();
    let rho0 = DensityMatrix::pure(initial);
    let evo = evolve_lindblad_observed(&h, &rho0, &channels, t_final, cfg, |t, rho| {
        let target = analytic_propagator(p, t).apply(initial)?;
        Ok::<_, Error>((t, state_fidelity(rho, &target)?, rho.populations()))
    })?;
    let mut trace = FidelityTrace::new(p.duration(), labels, false);
    for sample in evo.samples {
        let (t, f, pops) = sample?;
        trace.push(t, f, pops, None);
    }
    trace.stats = evo.stats;
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn theta_zero_hamiltonian() {
        let p = OneQubitPulse::new(2.0, 0.0, 0.0).unwrap();
        let h = build_hamiltonian(&p);
        assert_eq!(h.get(2, 0), C64::new(2.0, 0.0));
        assert_eq!(h.get(2, 1).norm(), 0.0);
        assert_eq!(h.get(2, 2).norm(), 0.0);
        assert_eq!(h.get(0, 1).norm(), 0.0);
    }

    #[test]
    fn fig4_pulse_fields() {
        let p = OneQubitPulse::from_sin_theta(mhz(5.0), -0.5, FRAC_PI_2).unwrap();
        assert!((p.detuning() - mhz(-5.0)).abs() < 1e-12);
        let expected = mhz(1.25 * 6f64.sqrt());
        assert!((p.omega0() - expected).abs() < 1e-12);
        assert!((p.omega1() - expected).abs() < 1e-12);
        assert!((p.duration() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn field_round_trip() {
        let p = OneQubitPulse::new(3.0, -0.4, 1.1).unwrap();
        let q = OneQubitPulse::from_fields(p.detuning(), p.omega0(), p.omega1()).unwrap();
        assert!((p.omega - q.omega).abs() < 1e-12);
        assert!((p.theta - q.theta).abs() < 1e-12);
        assert!((p.phi - q.phi).abs() < 1e-12);
    }

    #[test]
    fn propagator_identity_at_zero() {
        let p = OneQubitPulse::new(1.3, 0.2, 0.9).unwrap();
        let u = analytic_propagator(&p, 0.0);
        assert!(u.max_abs_diff(&Operator::identity(&qubit_space())) < 1e-15);
    }

    #[test]
    fn z_gate_at_origin() {
        let u = holonomic_gate(0.0, 0.0);
        assert!((u.get(0, 0) + 1.0).norm() < 1e-15);
        assert!((u.get(1, 1) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn solver_rejects_out_of_range() {
        assert!(solve_pulse_for_rotation(RotationAxis::X, 3.0 * PI, None).is_err());
        assert!(solve_pulse_for_rotation(RotationAxis::X, 0.0, None).is_err());
        let p = solve_pulse_for_rotation(RotationAxis::Z, PI, None).unwrap();
        assert!(p.theta.abs() < 1e-15 && p.phi == 0.0);
    }

    #[test]
    fn half_period_leaks() {
        let p = OneQubitPulse::new(1.0, 0.0, 0.0).unwrap();
        let r = verify_holonomy_over(&p, p.duration() / 2.0, 5).unwrap();
        assert!(r.cyclic_defect > 0.1);
        assert!(!r.is_holonomic());
        assert!(verify_holonomy(&p, 1).is_err());
    }
}
