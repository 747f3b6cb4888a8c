use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::mhz;

/// Which Stark shifts are removed from the full Hamiltonian.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StarkMode {
    /// No compensation.
    None,
    /// Laser and cavity shifts of the reduced Hamiltonian.
    Eq12,
    /// As `Eq12`, plus the shifts the reduced atom-laser couplings induce in turn.
    #[default]
    Eq12PlusSecondOrder,
}

/// Default tolerance on the two resonance equalities, rad/μs.
pub const RESONANCE_TOL: f64 = 1e-6;

/// Two superatoms coupled through one cavity mode. Index `j` of the
/// arrays is superatom `j + 1`. All frequencies in rad/μs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitParams {
    pub g_p: f64,
    pub g_q: f64,
    pub delta_p: f64,
    pub delta_q: f64,
    /// `Δ^j_0`, detuning of the `0 ↔ p` drive.
    pub big_delta0: [f64; 2],
    /// `Δ^j_1`, detuning magnitude of the `1 ↔ q` drive.
    pub big_delta1: [f64; 2],
    pub omega0: [C64; 2],
    pub omega1: [C64; 2],
    pub n_max: usize,
    pub stark_mode: StarkMode,
    pub resonance_tol: f64,
}

impl TwoQubitParams {
    /// Reference working point: `g = Ω¹₀ = Ω²₁ = 2π×10`, `Ω¹₁ = 2π×14.5`,
    /// `Ω²₀ = 2π×14.6888`, `δ_p = 2δ_q = 2π×200`, and
    /// `Δ¹₀, Δ²₀, Δ¹₁, Δ²₁ = 2π×(210, 220, 120, 110)`.
    pub fn reference() -> Self {
        let r = |x: f64| C64::new(mhz(x), 0.0);
        Self {
            g_p: mhz(10.0),
            g_q: mhz(10.0),
            delta_p: mhz(200.0),
            delta_q: mhz(100.0),
            big_delta0: [mhz(210.0), mhz(220.0)],
            big_delta1: [mhz(120.0), mhz(110.0)],
            omega0: [r(10.0), r(14.6888)],
            omega1: [r(14.5), r(10.0)],
            n_max: 3,
            stark_mode: StarkMode::default(),
            resonance_tol: RESONANCE_TOL,
        }
    }

    /// Every coupling and detuning multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            g_p: self.g_p * k,
            g_q: self.g_q * k,
            delta_p: self.delta_p * k,
            delta_q: self.delta_q * k,
            big_delta0: self.big_delta0.map(|x| x * k),
            big_delta1: self.big_delta1.map(|x| x * k),
            omega0: self.omega0.map(|x| x * k),
            omega1: self.omega1.map(|x| x * k),
            resonance_tol: self.resonance_tol * k.abs().max(1.0),
            ..*self
        }
    }

    pub fn with_lasers_off(&self) -> Self {
        let z = C64::new(0.0, 0.0);
        Self {
            omega0: [z; 2],
            omega1: [z; 2],
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let reals = [self.g_p, self.g_q, self.delta_p, self.delta_q]
            .into_iter()
            .chain(self.big_delta0)
            .chain(self.big_delta1);
        let cplx = self.omega0.iter().chain(&self.omega1).flat_map(|z| [z.re, z.im]);
        if !reals.chain(cplx).all(f64::is_finite) {
            return Err(Error::InvalidParameter("couplings and detunings must be finite".into()));
        }
        if self.n_max < 1 {
            return Err(Error::InvalidParameter("n_max must be at least 1".into()));
        }
        let dets = [self.delta_p, self.delta_q]
            .into_iter()
            .chain(self.big_delta0)
            .chain(self.big_delta1);
        if dets.into_iter().any(|d| d == 0.0) {
            return Err(Error::InvalidParameter("detunings must be non-zero".into()));
        }
        if !(self.resonance_tol >= 0.0) {
            return Err(Error::InvalidParameter("resonance_tol must be non-negative".into()));
        }
        Ok(())
    }

    /// `Δ^j_0 − δ_p`.
    pub fn d0(&self, j: usize) -> f64 {
        self.big_delta0[j] - self.delta_p
    }

    /// `Δ^j_1 − δ_q`.
    pub fn d1(&self, j: usize) -> f64 {
        self.big_delta1[j] - self.delta_q
    }

    /// Reduced `0 → r` coupling `A_j = (g_p Ω^j_0 / 2)(1/Δ^j_0 + 1/δ_p)`.
    pub fn reduced_a(&self, j: usize) -> C64 {
        self.omega0[j] * (self.g_p / 2.0 * (1.0 / self.big_delta0[j] + 1.0 / self.delta_p))
    }

    /// Reduced `1 → r` coupling `B_j = (g_q Ω^j_1 / 2)(1/Δ^j_1 + 1/δ_q)`.
    pub fn reduced_b(&self, j: usize) -> C64 {
        self.omega1[j] * (self.g_q / 2.0 * (1.0 / self.big_delta1[j] + 1.0 / self.delta_q))
    }

    /// Mismatches of the two resonance equalities,
    /// `(Δ¹₀−δ_p) − (Δ²₁−δ_q)` and `(Δ¹₁−δ_q) − (Δ²₀−δ_p)`.
    pub fn resonance_mismatch(&self) -> [f64; 2] {
        [self.d0(0) - self.d1(1), self.d1(0) - self.d0(1)]
    }

    /// Fails unless both resonance equalities hold within `resonance_tol`
    /// with a positive common value.
    pub fn check_resonance(&self) -> Result<()> {
        let [m01, m10] = self.resonance_mismatch();
        if m01.abs() > self.resonance_tol {
            return Err(Error::Precondition(format!(
                "Δ¹₀−δ_p = {} differs from Δ²₁−δ_q = {} rad/μs",
                self.d0(0),
                self.d1(1)
            )));
        }
        if m10.abs() > self.resonance_tol {
            return Err(Error::Precondition(format!(
                "Δ¹₁−δ_q = {} differs from Δ²₀−δ_p = {} rad/μs",
                self.d1(0),
                self.d0(1)
            )));
        }
        if !(self.d0(0) > 0.0 && self.d1(0) > 0.0) {
            return Err(Error::Precondition(
                "resonant two-photon detunings must be positive".into(),
            ));
        }
        Ok(())
    }
}
