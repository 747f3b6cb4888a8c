use num_complex::Complex64 as C64;

use super::operator::ensure_same;
use super::{HilbertSpace, Operator, QuantumError};

/// One rotating-frame term `e^{iωt} X + h.c.`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasedTerm {
    pub frequency: f64,
    pub operator: Operator,
}

/// Time-dependent Hamiltonian `H(t) = H_s + Σ_k (e^{iω_k t} X_k + h.c.)`.
///
/// Hermitian at every `t` by construction once `H_s` is Hermitian. A
/// constant Hamiltonian is the case with no terms.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasedHamiltonian {
    static_part: Operator,
    terms: Vec<PhasedTerm>,
}

impl PhasedHamiltonian {
    pub fn constant(h: Operator) -> Result<Self, QuantumError> {
        h.ensure_hermitian()?;
        Ok(Self {
            static_part: h,
            terms: Vec::new(),
        })
    }

    pub fn zero(space: &HilbertSpace) -> Self {
        Self {
            static_part: Operator::zeros(space),
            terms: Vec::new(),
        }
    }

    /// Adds `e^{iωt} X + h.c.`.
    pub fn add_term(&mut self, frequency: f64, operator: Operator) -> Result<(), QuantumError> {
        ensure_same(self.space(), operator.space())?;
        self.terms.push(PhasedTerm {
            frequency,
            operator,
        });
        Ok(())
    }

    /// Adds a Hermitian time-independent piece.
    pub fn add_static(&mut self, h: &Operator) -> Result<(), QuantumError> {
        h.ensure_hermitian()?;
        self.static_part = self.static_part.add(h)?;
        Ok(())
    }

    pub fn space(&self) -> &HilbertSpace {
        self.static_part.space()
    }

    pub fn dim(&self) -> usize {
        self.static_part.dim()
    }

    pub fn static_part(&self) -> &Operator {
        &self.static_part
    }

    pub fn terms(&self) -> &[PhasedTerm] {
        &self.terms
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|t| t.frequency == 0.0)
    }

    /// Largest |ω_k|, 0 for a constant Hamiltonian.
    pub fn max_frequency(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.frequency.abs())
            .fold(0.0, f64::max)
    }

    /// Upper bound on the spectral radius of `H(t)` for every `t`.
    pub fn norm_bound(&self) -> f64 {
        self.static_part.row_sum_norm()
            + self
                .terms
                .iter()
                .map(|t| t.operator.row_sum_norm() + t.operator.dagger().row_sum_norm())
                .sum::<f64>()
    }

    /// Fastest rate in the problem: phase frequencies or the coupling scale,
    /// whichever is larger.
    pub fn characteristic_frequency(&self) -> f64 {
        self.max_frequency().max(self.norm_bound())
    }

    pub fn at(&self, t: f64) -> Operator {
        let mut h = self.static_part.clone();
        for term in &self.terms {
            let phase = C64::from_polar(1.0, term.frequency * t);
            let x = term.operator.matrix();
            let m = h.matrix_mut();
            *m += x * phase;
            *m += x.adjoint() * phase.conj();
        }
        h
    }

    pub(crate) fn compile(&self) -> CompiledHamiltonian {
        let mut entries = Vec::new();
        let s = self.static_part.matrix();
        for c in 0..s.ncols() {
            for r in 0..s.nrows() {
                let v = s[(r, c)];
                if v != C64::new(0.0, 0.0) {
                    entries.push(HEntry {
                        row: r,
                        col: c,
                        source: Source::Static,
                        value: v,
                    });
                }
            }
        }
        for (k, term) in self.terms.iter().enumerate() {
            let x = term.operator.matrix();
            for c in 0..x.ncols() {
                for r in 0..x.nrows() {
                    let v = x[(r, c)];
                    if v != C64::new(0.0, 0.0) {
                        entries.push(HEntry {
                            row: r,
                            col: c,
                            source: Source::Direct(k),
                            value: v,
                        });
                        entries.push(HEntry {
                            row: c,
                            col: r,
                            source: Source::Adjoint(k),
                            value: v.conj(),
                        });
                    }
                }
            }
        }
        CompiledHamiltonian {
            dim: self.dim(),
            frequencies: self.terms.iter().map(|t| t.frequency).collect(),
            entries,
        }
    }
}

impl TryFrom<Operator> for PhasedHamiltonian {
    type Error = QuantumError;

    fn try_from(h: Operator) -> Result<Self, Self::Error> {
        PhasedHamiltonian::constant(h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Source {
    Static,
    Direct(usize),
    Adjoint(usize),
}

/// Non-zero matrix element of `H(t)` with its time dependence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct HEntry {
    pub row: usize,
    pub col: usize,
    pub source: Source,
    pub value: C64,
}

impl HEntry {
    #[inline]
    pub fn eval(&self, phases: &[C64]) -> C64 {
        match self.source {
            Source::Static => self.value,
            Source::Direct(k) => self.value * phases[k],
            Source::Adjoint(k) => self.value * phases[k].conj(),
        }
    }
}

/// Coordinate form of a [`PhasedHamiltonian`] evaluated on the fly by the
/// integrators.
#[derive(Debug, Clone)]
pub(crate) struct CompiledHamiltonian {
    pub dim: usize,
    pub frequencies: Vec<f64>,
    pub entries: Vec<HEntry>,
}

impl CompiledHamiltonian {
    pub fn phases(&self, t: f64, out: &mut Vec<C64>) {
        out.clear();
        out.extend(self.frequencies.iter().map(|w| C64::from_polar(1.0, w * t)));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluated_hamiltonian_is_hermitian() {
        let s = HilbertSpace::qudit(3);
        let mut h = PhasedHamiltonian::zero(&s);
        h.add_term(2.0, Operator::transition(&s, 2, 0).scale(C64::new(0.3, 0.7)))
            .unwrap();
        h.add_term(-5.0, Operator::transition(&s, 1, 2).scale_real(1.1))
            .unwrap();
        for &t in &[0.0, 0.13, 1.7] {
            assert!(h.at(t).hermiticity_defect() < 1e-15);
        }
        assert_eq!(h.max_frequency(), 5.0);
    }

    #[test]
    fn compiled_entries_reproduce_dense() {
        let s = HilbertSpace::qudit(3);
        let mut h = PhasedHamiltonian::constant(
            Operator::transition(&s, 1, 1).scale_real(0.5),
        )
        .unwrap();
        h.add_term(3.0, Operator::transition(&s, 0, 2).scale(C64::new(0.2, -0.4)))
            .unwrap();
        let compiled = h.compile();
        let t = 0.77;
        let mut ph = Vec::new();
        compiled.phases(t, &mut ph);
        let mut dense = Operator::zeros(&s);
        for e in &compiled.entries {
            dense.matrix_mut()[(e.row, e.col)] += e.eval(&ph);
        }
        assert!(dense.max_abs_diff(&h.at(t)) < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian_static_part() {
        let s = HilbertSpace::qudit(2);
        assert!(PhasedHamiltonian::constant(Operator::transition(&s, 0, 1)).is_err());
    }
}
