use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::hamiltonian::{LR, L0, L1};
use super::params::TwoQubitParams;
use crate::error::{Error, Result};
use crate::one_qubit::{computational_space as qubit_computational, HolonomyReport};
use crate::quantum::{HilbertSpace, Operator};

/// `(0̄0̄, 0̄1̄, 1̄0̄, 1̄1̄, r̄r̄)`.
pub fn effective_space() -> HilbertSpace {
    HilbertSpace::single(&[
        "0bar0bar",
        "0bar1bar",
        "1bar0bar",
        "1bar1bar",
        "rbarrbar",
    ])
}

/// Two-qubit computational space, factorised per superatom.
pub fn computational_space() -> HilbertSpace {
    let q = qubit_computational();
    q.tensor(&q)
}

/// Level pairs of the [`effective_space`] basis.
pub const EFFECTIVE_LEVELS: [(usize, usize); 5] = [(L0, L0), (L0, L1), (L1, L0), (L1, L1), (LR, LR)];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveCouplings {
    /// `|0̄1̄⟩ → |r̄r̄⟩`, rad/μs.
    pub omega01: C64,
    /// `|1̄0̄⟩ → |r̄r̄⟩`, rad/μs.
    pub omega10: C64,
    pub omega_prime: f64,
    pub alpha: f64,
    /// `π/Ω′`, μs.
    pub tau: f64,
}

impl EffectiveCouplings {
    pub fn new(omega01: C64, omega10: C64) -> Self {
        let omega_prime = (omega01.norm_sqr() + omega10.norm_sqr()).sqrt();
        Self {
            omega01,
            omega10,
            omega_prime,
            alpha: 2.0 * omega10.norm().atan2(omega01.norm()),
            tau: PI / omega_prime,
        }
    }

    /// Real couplings `Ω′cos(α/2)`, `Ω′sin(α/2)`.
    pub fn from_alpha(omega_prime: f64, alpha: f64) -> Self {
        let (s, c) = (alpha / 2.0).sin_cos();
        Self::new(C64::new(omega_prime * c, 0.0), C64::new(omega_prime * s, 0.0))
    }

    /// `γ_t = Ω′ t`.
    pub fn gamma_at(&self, t: f64) -> f64 {
        self.omega_prime * t
    }
}

/// Couplings obtained after adiabatic elimination of the cavity and of
/// `p̄`, `q̄`: `Ω₀₁ = A₁B₂/(Δ¹₀−δ_p)` and `Ω₁₀ = A₂B₁/(Δ¹₁−δ_q)`.
pub fn effective_couplings(params: &TwoQubitParams) -> Result<EffectiveCouplings> {
    params.validate()?;
    params.check_resonance()?;
    let omega01 = params.reduced_a(0) * params.reduced_b(1) / params.d0(0);
    let omega10 = params.reduced_a(1) * params.reduced_b(0) / params.d1(0);
    let c = EffectiveCouplings::new(omega01, omega10);
    if c.omega_prime == 0.0 {
        return Err(Error::Precondition("both effective couplings vanish".into()));
    }
    Ok(c)
}

/// `Ω₀₁|r̄r̄⟩⟨0̄1̄| + Ω₁₀|r̄r̄⟩⟨1̄0̄| + h.c.` on [`effective_space`].
pub fn effective_hamiltonian(c: &EffectiveCouplings) -> Operator {
    let mut h = Operator::zeros(&effective_space());
    let m = h.matrix_mut();
    m[(4, 1)] = c.omega01;
    m[(4, 2)] = c.omega10;
    m[(1, 4)] = c.omega01.conj();
    m[(2, 4)] = c.omega10.conj();
    h
}

/// Closed-form `exp(-i H_eff t)`. With the bright state
/// `|b⟩ = (Ω₀₁*|0̄1̄⟩ + Ω₁₀*|1̄0̄⟩)/Ω′` it reads
/// `1 − (1 − cos γ_t)(|b⟩⟨b| + |r̄r̄⟩⟨r̄r̄|) − i sin γ_t (|r̄r̄⟩⟨b| + h.c.)`.
pub fn effective_propagator(c: &EffectiveCouplings, t: f64) -> Operator {
    let mut u = Operator::identity(&effective_space());
    let g = c.gamma_at(t);
    let (s, co) = g.sin_cos();
    let b = [c.omega01.conj() / c.omega_prime, c.omega10.conj() / c.omega_prime];
    let m = u.matrix_mut();
    for (x, bx) in [1usize, 2].into_iter().zip(b) {
        for (y, by) in [1usize, 2].into_iter().zip(b) {
            m[(x, y)] -= bx * by.conj() * (1.0 - co);
        }
        m[(4, x)] = -C64::i() * s * bx.conj();
        m[(x, 4)] = -C64::i() * s * bx;
    }
    m[(4, 4)] = C64::new(co, 0.0);
    u
}

/// Gate on the computational subspace: identity on `|0̄0̄⟩`, `|1̄1̄⟩` and
/// `[[−cos α, −sin α], [−sin α, cos α]]` on `{|0̄1̄⟩, |1̄0̄⟩}`.
pub fn two_qubit_gate(alpha: f64) -> Operator {
    let mut u = Operator::identity(&computational_space());
    let (s, c) = alpha.sin_cos();
    let m = u.matrix_mut();
    m[(1, 1)] = C64::new(-c, 0.0);
    m[(1, 2)] = C64::new(-s, 0.0);
    m[(2, 1)] = C64::new(-s, 0.0);
    m[(2, 2)] = C64::new(c, 0.0);
    u
}

/// Cyclic and parallel-transport defects of the effective evolution over `[0, τ]`.
pub fn verify_holonomy_two_qubit(c: &EffectiveCouplings, samples: usize) -> Result<HolonomyReport> {
    verify_holonomy_two_qubit_over(c, c.tau, samples)
}

pub fn verify_holonomy_two_qubit_over(c: &EffectiveCouplings, period: f64, samples: usize) -> Result<HolonomyReport> {
    if samples < 2 {
        return Err(Error::InvalidParameter("need at least two samples".into()));
    }
    let u = effective_propagator(c, period);
    let cyclic = (0..4).map(|k| u.get(4, k).norm()).fold(0.0, f64::max);
    let h = effective_hamiltonian(c);
    let mut transport = 0.0f64;
    for k in 0..samples {
        let t = period * k as f64 / (samples - 1) as f64;
        let u = effective_propagator(c, t);
        let m = u.matrix().adjoint() * h.matrix() * u.matrix();
        for i in 0..4 {
            for l in 0..4 {
                transport = transport.max(m[(i, l)].norm());
            }
        }
    }
    Ok(HolonomyReport::from_defects(cyclic, transport))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{mhz, to_mhz};
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn reference_couplings() {
        let c = effective_couplings(&TwoQubitParams::reference()).unwrap();
        assert!((to_mhz(c.omega01.re) - 0.04659).abs() < 1e-5);
        assert!((to_mhz(c.omega10.re) - 0.04659).abs() < 1e-5);
        assert!((to_mhz(c.omega_prime) - 0.0659).abs() < 1e-4);
        assert!((c.tau - 7.59).abs() < 0.01);
        assert!((c.alpha - FRAC_PI_2).abs() < 1e-3);
    }

    #[test]
    fn vanishing_drive_gives_alpha_pi() {
        let mut p = TwoQubitParams::reference();
        p.omega1[1] = C64::new(0.0, 0.0);
        let c = effective_couplings(&p).unwrap();
        assert_eq!(c.omega01.norm(), 0.0);
        assert!((c.alpha - PI).abs() < 1e-15);
    }

    #[test]
    fn gate_at_alpha_zero() {
        let u = two_qubit_gate(0.0);
        let d: Vec<f64> = (0..4).map(|i| u.get(i, i).re).collect();
        assert_eq!(d, vec![1.0, -1.0, 1.0, 1.0]);
    }

    #[test]
    fn period_gives_block_gate() {
        let c = EffectiveCouplings::from_alpha(mhz(0.07), FRAC_PI_2);
        let u = effective_propagator(&c, c.tau);
        assert!((u.get(1, 2).re + 1.0).abs() < 1e-12);
        assert!((u.get(4, 4).re + 1.0).abs() < 1e-12);
        assert!(u.get(1, 1).norm() < 1e-12);
    }
}
