//! Collective states of a blockaded atomic ensemble.
//!
//! With perfect blockade at most one atom leaves `g`, so the reachable
//! sector is spanned by `|ḡ⟩` and the `5N` states with atom `k` in one of
//! `0, 1, p, r, q`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{propagator, HilbertSpace, Operator, StateVector, C64};

pub const DEFAULT_ATOMS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CollectiveLabel {
    #[serde(rename = "gbar")]
    G,
    #[serde(rename = "0bar")]
    Zero,
    #[serde(rename = "1bar")]
    One,
    #[serde(rename = "pbar")]
    P,
    #[serde(rename = "rbar")]
    R,
    #[serde(rename = "qbar")]
    Q,
}

impl CollectiveLabel {
    pub const ALL: [CollectiveLabel; 6] = [
        CollectiveLabel::G,
        CollectiveLabel::Zero,
        CollectiveLabel::One,
        CollectiveLabel::P,
        CollectiveLabel::R,
        CollectiveLabel::Q,
    ];

    /// Order of the excited levels inside the microscopic basis and the
    /// effective spaces.
    pub const EXCITED: [CollectiveLabel; 5] = [
        CollectiveLabel::Zero,
        CollectiveLabel::One,
        CollectiveLabel::P,
        CollectiveLabel::R,
        CollectiveLabel::Q,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CollectiveLabel::G => "gbar",
            CollectiveLabel::Zero => "0bar",
            CollectiveLabel::One => "1bar",
            CollectiveLabel::P => "pbar",
            CollectiveLabel::R => "rbar",
            CollectiveLabel::Q => "qbar",
        }
    }

    fn atom_level(self) -> Option<usize> {
        Self::EXCITED.iter().position(|&l| l == self)
    }
}

impl fmt::Display for CollectiveLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CollectiveLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown collective level `{s}`")))
    }
}

/// Single-excitation sector of `N` atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MicroBasis {
    n_atoms: usize,
    space: HilbertSpace,
}

impl MicroBasis {
    pub fn new(n_atoms: usize) -> Result<Self> {
        if n_atoms == 0 {
            return Err(Error::InvalidParameter("an ensemble needs at least one atom".into()));
        }
        let mut labels = vec!["g".to_owned()];
        for k in 1..=n_atoms {
            for l in ["0", "1", "p", "r", "q"] {
                labels.push(format!("{l}_{k}"));
            }
        }
        Ok(Self {
            n_atoms,
            space: HilbertSpace::single(&labels),
        })
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn dim(&self) -> usize {
        1 + 5 * self.n_atoms
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn ground_index(&self) -> usize {
        0
    }

    /// Index of the state with atom `atom` (0-based) in `level`, all others in `g`.
    pub fn excited_index(&self, atom: usize, level: CollectiveLabel) -> Option<usize> {
        let l = level.atom_level()?;
        (atom < self.n_atoms).then(|| 1 + 5 * atom + l)
    }
}

pub fn build_collective_state(basis: &MicroBasis, label: CollectiveLabel) -> StateVector {
    if label == CollectiveLabel::G {
        return StateVector::basis(basis.space(), basis.ground_index());
    }
    let amp = C64::new(1.0 / (basis.n_atoms() as f64).sqrt(), 0.0);
    let mut a = DVector::zeros(basis.dim());
    for k in 0..basis.n_atoms() {
        a[basis.excited_index(k, label).unwrap()] = amp;
    }
    StateVector::normalized(basis.space().clone(), a).expect("non-empty superposition")
}

/// `|ḡ⟩ ↔ |r̄⟩` coupling for single-atom Rabi frequency `omega`.
pub fn collective_rabi(n_atoms: usize, omega: f64) -> f64 {
    (n_atoms as f64).sqrt() * omega
}

/// `Ω Σ_k (|r_k⟩⟨ḡ| + h.c.)` restricted to the blockaded sector.
pub fn ground_rydberg_drive(basis: &MicroBasis, omega: f64) -> Operator {
    let mut h = Operator::zeros(basis.space());
    for k in 0..basis.n_atoms() {
        let r = basis.excited_index(k, CollectiveLabel::R).unwrap();
        h.matrix_mut()[(r, 0)] = C64::new(omega, 0.0);
        h.matrix_mut()[(0, r)] = C64::new(omega, 0.0);
    }
    h
}

/// `Ω Σ_k (|x_k⟩⟨r_k| + h.c.)` for a ground level `x`.
pub fn rydberg_ground_drive(basis: &MicroBasis, level: CollectiveLabel, omega: f64) -> Result<Operator> {
    if !matches!(level, CollectiveLabel::Zero | CollectiveLabel::One) {
        return Err(Error::InvalidParameter(format!(
            "de-excitation target must be 0bar or 1bar, got {level}"
        )));
    }
    let mut h = Operator::zeros(basis.space());
    for k in 0..basis.n_atoms() {
        let r = basis.excited_index(k, CollectiveLabel::R).unwrap();
        let x = basis.excited_index(k, level).unwrap();
        h.matrix_mut()[(x, r)] = C64::new(omega, 0.0);
        h.matrix_mut()[(r, x)] = C64::new(omega, 0.0);
    }
    Ok(h)
}

#[derive(Debug, Clone)]
pub struct Preparation {
    pub after_excitation: StateVector,
    pub final_state: StateVector,
    pub excitation_time: f64,
    pub transfer_time: f64,
    /// `|⟨target|ψ⟩|²` for the final state.
    pub overlap: f64,
}

/// Two square π pulses from `|ḡ⟩`: the collective `g → r` pulse of length
/// `π/(2√N Ω)`, then for `0bar`/`1bar` the single-atom `r → x` pulse of
/// length `π/(2Ω)`.
pub fn prepare_sequence(basis: &MicroBasis, target: CollectiveLabel, omega: f64) -> Result<Preparation> {
    if !matches!(target, CollectiveLabel::Zero | CollectiveLabel::One | CollectiveLabel::R) {
        return Err(Error::InvalidParameter(format!(
            "{target} is not a preparation target"
        )));
    }
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidParameter(format!("Rabi frequency must be positive, got {omega}")));
    }
    let g = build_collective_state(basis, CollectiveLabel::G);
    let t1 = FRAC_PI_2 / collective_rabi(basis.n_atoms(), omega);
    let after = propagator(&ground_rydberg_drive(basis, omega), t1)?.apply(&g)?;
    let (final_state, t2) = if target == CollectiveLabel::R {
        (after.clone(), 0.0)
    } else {
        let t2 = FRAC_PI_2 / omega;
        let u = propagator(&rydberg_ground_drive(basis, target, omega)?, t2)?;
        (u.apply(&after)?, t2)
    };
    let overlap = build_collective_state(basis, target).overlap_sq(&final_state)?;
    Ok(Preparation {
        after_excitation: after,
        final_state,
        excitation_time: t1,
        transfer_time: t2,
        overlap,
    })
}

pub fn prepare_collective(basis: &MicroBasis, target: CollectiveLabel, omega: f64) -> Result<StateVector> {
    prepare_sequence(basis, target, omega).map(|p| p.final_state)
}

/// Effective superatom space on `levels`, ordered `(0bar, 1bar, pbar, rbar, qbar)`.
pub fn effective_space(levels: &[CollectiveLabel]) -> Result<HilbertSpace> {
    if levels.contains(&CollectiveLabel::G) {
        return Err(Error::InvalidParameter(
            "gbar is not part of the effective superatom space".into(),
        ));
    }
    if !(levels.contains(&CollectiveLabel::Zero) && levels.contains(&CollectiveLabel::One)) {
        return Err(Error::InvalidParameter(
            "effective space must contain 0bar and 1bar".into(),
        ));
    }
    let ordered: Vec<&str> = CollectiveLabel::EXCITED
        .iter()
        .filter(|l| levels.contains(l))
        .map(|l| l.as_str())
        .collect();
    Ok(HilbertSpace::single(&ordered))
}
