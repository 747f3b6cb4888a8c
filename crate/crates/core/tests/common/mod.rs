//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use holonomy::quantum::{CollapseChannel, Operator};
use holonomy::two_qubit::{full_hamiltonian, full_index, TwoQubitParams};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C;

/// `exp(A)` by scaling and squaring with a truncated Taylor series.
pub fn expm(a: &DMatrix<C>) -> DMatrix<C> {
    let norm: f64 = a.iter().map(|z| z.norm()).sum::<f64>().max(1e-300);
    let s = (norm.log2().ceil() as i32 + 1).max(0);
    let scaled = a.scale(1.0 / 2f64.powi(s));
    let n = a.nrows();
    let mut term = DMatrix::<C>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..=30 {
        term = &term * &scaled / C::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// `exp(-iHt)`.
pub fn expm_unitary(h: &DMatrix<C>, t: f64) -> DMatrix<C> {
    expm(&h.map(|z| z * C::new(0.0, -t)))
}

/// Per-basis energies `E` of a static frame in which the rotating-frame
/// two-qubit Hamiltonian reads `e^{iEt} V e^{-iEt}`.
pub fn static_frame_energies(p: &TwoQubitParams) -> Vec<f64> {
    let level = |j: usize| {
        let ep = p.big_delta0[j];
        let er = ep - p.delta_p;
        let eq = er - p.delta_q;
        [0.0, eq + p.big_delta1[j], ep, er, eq]
    };
    let (a, b) = (level(0), level(1));
    let nd = p.n_max + 1;
    let mut e = vec![0.0; 25 * nd];
    for l1 in 0..5 {
        for l2 in 0..5 {
            for n in 0..nd {
                e[full_index(p.n_max, l1, l2, n)] = a[l1] + b[l2];
            }
        }
    }
    e
}

/// Closed-system two-qubit state at `t` by exact exponentiation in the
/// static frame, mapped back to the rotating frame.
pub fn static_frame_state(p: &TwoQubitParams, psi0: &DVector<C>, t: f64) -> DVector<C> {
    let e = static_frame_energies(p);
    let mut hs = full_hamiltonian(p).unwrap().at(0.0).into_matrix();
    for (k, ek) in e.iter().enumerate() {
        hs[(k, k)] += ek;
    }
    let mut psi = expm_unitary(&hs, t) * psi0;
    for (k, ek) in e.iter().enumerate() {
        psi[k] *= C::from_polar(1.0, ek * t);
    }
    psi
}

/// Dense master-equation RHS for a constant Hamiltonian.
pub fn lindblad_rhs(h: &DMatrix<C>, ls: &[(DMatrix<C>, f64)], rho: &DMatrix<C>) -> DMatrix<C> {
    let mi = C::new(0.0, -1.0);
    let mut d = (h * rho - rho * h) * mi;
    for (l, g) in ls {
        let ld = l.adjoint();
        let ldl = &ld * l;
        d += (l * rho * &ld - (&ldl * rho + rho * &ldl) * C::new(0.5, 0.0)) * C::new(*g, 0.0);
    }
    d
}

/// Fixed-step RK4 on the dense master equation.
pub fn dense_lindblad(h: &Operator, channels: &[CollapseChannel], rho0: &DMatrix<C>, t: f64, steps: usize) -> DMatrix<C> {
    let hm = h.matrix().clone();
    let ls: Vec<(DMatrix<C>, f64)> = channels.iter().map(|c| (c.operator().matrix().clone(), c.rate())).collect();
    let dt = t / steps as f64;
    let half = C::new(dt / 2.0, 0.0);
    let full = C::new(dt, 0.0);
    let mut rho = rho0.clone();
    for _ in 0..steps {
        let k1 = lindblad_rhs(&hm, &ls, &rho);
        let k2 = lindblad_rhs(&hm, &ls, &(&rho + &k1 * half));
        let k3 = lindblad_rhs(&hm, &ls, &(&rho + &k2 * half));
        let k4 = lindblad_rhs(&hm, &ls, &(&rho + &k3 * full));
        rho += (k1 + k2 * C::new(2.0, 0.0) + k3 * C::new(2.0, 0.0) + k4) * C::new(dt / 6.0, 0.0);
    }
    rho
}

pub fn max_diff(a: &DMatrix<C>, b: &DMatrix<C>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
