use num_complex::Complex64 as C64;

use super::params::{StarkMode, TwoQubitParams};
use crate::error::Result;
use crate::quantum::{tensor_all, HilbertSpace, Operator, PhasedHamiltonian};
use crate::superatom::{effective_space, CollectiveLabel};

/// Level indices inside one superatom factor.
pub const L0: usize = 0;
pub const L1: usize = 1;
pub const LP: usize = 2;
pub const LR: usize = 3;
pub const LQ: usize = 4;

pub fn superatom_space() -> HilbertSpace {
    effective_space(&CollectiveLabel::EXCITED).expect("full level set")
}

/// Superatom 1 ⊗ superatom 2.
pub fn pair_space() -> HilbertSpace {
    superatom_space().tensor(&superatom_space())
}

/// Superatom 1 ⊗ superatom 2 ⊗ cavity `n0..n{n_max}`.
pub fn full_space(n_max: usize) -> HilbertSpace {
    pair_space().tensor(&HilbertSpace::fock(n_max))
}

/// Index of `|l1, l2, n⟩` in [`full_space`].
pub fn full_index(n_max: usize, l1: usize, l2: usize, n: usize) -> usize {
    (l1 * 5 + l2) * (n_max + 1) + n
}

pub(crate) struct Factors {
    pub space: HilbertSpace,
    atom: HilbertSpace,
    fock: HilbertSpace,
}

impl Factors {
    pub fn new(n_max: usize) -> Self {
        Self {
            space: full_space(n_max),
            atom: superatom_space(),
            fock: HilbertSpace::fock(n_max),
        }
    }

    fn n_max(&self) -> usize {
        self.fock.dim() - 1
    }

    /// `|row⟩_j⟨col|` on superatom `j` times `cavity` on the mode.
    pub fn atom_op(&self, j: usize, row: usize, col: usize, cavity: &Operator) -> Operator {
        let local = Operator::transition(&self.atom, row, col);
        let id = Operator::identity(&self.atom);
        if j == 0 {
            tensor_all(&[&local, &id, cavity])
        } else {
            tensor_all(&[&id, &local, cavity])
        }
    }

    pub fn cav_identity(&self) -> Operator {
        Operator::identity(&self.fock)
    }

    pub fn annihilation(&self) -> Operator {
        let mut a = Operator::zeros(&self.fock);
        for n in 1..=self.n_max() {
            a.matrix_mut()[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
        }
        a
    }

    pub fn number(&self) -> Operator {
        let mut a = Operator::zeros(&self.fock);
        for n in 0..=self.n_max() {
            a.matrix_mut()[(n, n)] = C64::new(n as f64, 0.0);
        }
        a
    }

    /// Two-atom operator `|a1 a2⟩⟨b1 b2| ⊗ I`.
    pub fn pair_op(&self, a: (usize, usize), b: (usize, usize)) -> Operator {
        let x = Operator::transition(&self.atom, a.0, b.0);
        let y = Operator::transition(&self.atom, a.1, b.1);
        tensor_all(&[&x, &y, &self.cav_identity()])
    }
}

/// The rotating-frame Hamiltonian with explicit laser and cavity phases,
/// minus the Stark compensation selected by `stark_mode`.
pub fn full_hamiltonian(params: &TwoQubitParams) -> Result<PhasedHamiltonian> {
    params.validate()?;
    let f = Factors::new(params.n_max);
    let mut h = PhasedHamiltonian::zero(&f.space);
    let id = f.cav_identity();
    let a = f.annihilation();
    let ad = a.dagger();
    for j in 0..2 {
        h.add_term(params.big_delta0[j], f.atom_op(j, LP, L0, &id).scale(params.omega0[j]))?;
        h.add_term(-params.big_delta1[j], f.atom_op(j, LQ, L1, &id).scale(params.omega1[j]))?;
        h.add_term(params.delta_p, f.atom_op(j, LP, LR, &a).scale_real(params.g_p))?;
        h.add_term(-params.delta_q, f.atom_op(j, LQ, LR, &ad).scale_real(params.g_q))?;
    }
    let shift = stark_compensation(params);
    h.add_static(&shift.scale_real(-1.0))?;
    Ok(h)
}

/// [`full_hamiltonian`] evaluated at `t`.
pub fn build_full_hamiltonian(params: &TwoQubitParams, t: f64) -> Result<Operator> {
    Ok(full_hamiltonian(params)?.at(t))
}

/// Diagonal Stark shifts of the reduced Hamiltonian (laser and cavity).
pub fn stark_shifts(params: &TwoQubitParams) -> Operator {
    let f = Factors::new(params.n_max);
    let id = f.cav_identity();
    let n = f.number();
    let n1 = n.add(&id).unwrap();
    let mut s = Operator::zeros(&f.space);
    let gp = params.g_p * params.g_p / params.delta_p;
    let gq = params.g_q * params.g_q / params.delta_q;
    for j in 0..2 {
        let w0 = params.omega0[j].norm_sqr() / params.big_delta0[j];
        let w1 = params.omega1[j].norm_sqr() / params.big_delta1[j];
        let terms = [
            (LP, &id, w0),
            (L0, &id, -w0),
            (L1, &id, w1),
            (LQ, &id, -w1),
            (LP, &n1, gp),
            (LR, &n, -gp),
            (LR, &n1, gq),
            (LQ, &n, -gq),
        ];
        for (level, cav, w) in terms {
            s.add_assign_scaled(&f.atom_op(j, level, level, cav), C64::new(w, 0.0))
                .unwrap();
        }
    }
    s
}

/// Shifts induced by the reduced atom-laser couplings themselves:
/// `|A_j|²/(Δ^j_0−δ_p) (n P_r − (n+1) P_0) + |B_j|²/(Δ^j_1−δ_q) (n P_1 − (n+1) P_r)`.
pub fn second_order_shifts(params: &TwoQubitParams) -> Operator {
    let f = Factors::new(params.n_max);
    let id = f.cav_identity();
    let n = f.number();
    let n1 = n.add(&id).unwrap();
    let mut s = Operator::zeros(&f.space);
    for j in 0..2 {
        let wa = params.reduced_a(j).norm_sqr() / params.d0(j);
        let wb = params.reduced_b(j).norm_sqr() / params.d1(j);
        let terms = [(LR, &n, wa), (L0, &n1, -wa), (L1, &n, wb), (LR, &n1, -wb)];
        for (level, cav, w) in terms {
            s.add_assign_scaled(&f.atom_op(j, level, level, cav), C64::new(w, 0.0))
                .unwrap();
        }
    }
    s
}

/// The shift operator removed from the Hamiltonian for `params.stark_mode`.
pub fn stark_compensation(params: &TwoQubitParams) -> Operator {
    match params.stark_mode {
        StarkMode::None => Operator::zeros(&full_space(params.n_max)),
        StarkMode::Eq12 => stark_shifts(params),
        StarkMode::Eq12PlusSecondOrder => stark_shifts(params)
            .add(&second_order_shifts(params))
            .unwrap(),
    }
}

/// Second-order reduction: reduced `0 → r` and `1 → r` couplings with
/// photon emission/absorption, the two-atom cavity exchange, and the Stark
/// shifts. No compensation is applied.
pub fn reduced_hamiltonian(params: &TwoQubitParams) -> Result<PhasedHamiltonian> {
    params.validate()?;
    let f = Factors::new(params.n_max);
    let a = f.annihilation();
    let ad = a.dagger();
    let mut h = PhasedHamiltonian::zero(&f.space);
    for j in 0..2 {
        h.add_term(params.d0(j), f.atom_op(j, LR, L0, &ad).scale(-params.reduced_a(j)))?;
        h.add_term(-params.d1(j), f.atom_op(j, LR, L1, &a).scale(params.reduced_b(j)))?;
    }
    let gp = params.g_p * params.g_p / params.delta_p;
    let gq = params.g_q * params.g_q / params.delta_q;
    let mut exchange = f.pair_op((LP, LR), (LR, LP)).scale_real(gp);
    exchange.add_assign_scaled(&f.pair_op((LR, LP), (LP, LR)), C64::new(gp, 0.0))?;
    exchange.add_assign_scaled(&f.pair_op((LQ, LR), (LR, LQ)), C64::new(gq, 0.0))?;
    exchange.add_assign_scaled(&f.pair_op((LR, LQ), (LQ, LR)), C64::new(gq, 0.0))?;
    h.add_static(&exchange)?;
    h.add_static(&stark_shifts(params))?;
    Ok(h)
}

pub fn build_reduced_hamiltonian(params: &TwoQubitParams, t: f64) -> Result<Operator> {
    Ok(reduced_hamiltonian(params)?.at(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::mhz;

    #[test]
    fn cavity_matrix_element() {
        let p = TwoQubitParams::reference();
        let t = 0.013;
        let h = build_full_hamiltonian(&p, t).unwrap();
        for n in 1..=p.n_max {
            let row = full_index(p.n_max, LP, L0, n - 1);
            let col = full_index(p.n_max, LR, L0, n);
            let expected = C64::from_polar(p.g_p * (n as f64).sqrt(), p.delta_p * t);
            assert!((h.get(row, col) - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn lasers_off_leaves_cavity_terms() {
        let mut p = TwoQubitParams::reference().with_lasers_off();
        p.stark_mode = StarkMode::None;
        let h = build_full_hamiltonian(&p, 0.0).unwrap();
        let row = full_index(p.n_max, LP, L0, 0);
        let col = full_index(p.n_max, L0, L0, 0);
        assert_eq!(h.get(row, col).norm(), 0.0);
        assert!(h.max_abs() > 0.0);
        assert!(h.hermiticity_defect() < 1e-15);
    }

    #[test]
    fn reduced_coupling_magnitude() {
        let p = TwoQubitParams::reference();
        let h = build_reduced_hamiltonian(&p, 0.0).unwrap();
        let row = full_index(p.n_max, LR, L1, 1);
        let col = full_index(p.n_max, L0, L1, 0);
        assert!((h.get(row, col).norm() - mhz(0.4881)).abs() < mhz(1e-4));
    }
}
