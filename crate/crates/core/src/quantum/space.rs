use serde::{Deserialize, Serialize};

use super::QuantumError;

/// Labeled tensor-product Hilbert space.
///
/// Basis states are ordered lexicographically over the factors, with the
/// last factor varying fastest (the Kronecker convention).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertSpace {
    factor_labels: Vec<Vec<String>>,
}

impl HilbertSpace {
    pub fn new(factor_labels: Vec<Vec<String>>) -> Result<Self, QuantumError> {
        if factor_labels.is_empty() {
            return Err(QuantumError::InvalidSpace(
                "a space needs at least one factor".into(),
            ));
        }
        if let Some(pos) = factor_labels.iter().position(|f| f.is_empty()) {
            return Err(QuantumError::InvalidSpace(format!(
                "factor {pos} has no levels"
            )));
        }
        Ok(Self { factor_labels })
    }

    /// A single factor with the given level names.
    pub fn single<S: AsRef<str>>(labels: &[S]) -> Self {
        Self::new(vec![labels.iter().map(|s| s.as_ref().to_owned()).collect()])
            .expect("non-empty label list")
    }

    /// A single factor of dimension `dim` labeled `0..dim`.
    pub fn qudit(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Self::new(vec![(0..dim).map(|i| i.to_string()).collect()]).unwrap()
    }

    /// Fock factor `n0 ..= n{n_max}`.
    pub fn fock(n_max: usize) -> Self {
        Self::new(vec![(0..=n_max).map(|n| format!("n{n}")).collect()]).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.factor_labels.iter().map(Vec::len).product()
    }

    pub fn factor_dims(&self) -> Vec<usize> {
        self.factor_labels.iter().map(Vec::len).collect()
    }

    pub fn factor_labels(&self) -> &[Vec<String>] {
        &self.factor_labels
    }

    pub fn num_factors(&self) -> usize {
        self.factor_labels.len()
    }

    /// Factor list of `self` followed by that of `other`.
    pub fn tensor(&self, other: &HilbertSpace) -> HilbertSpace {
        let mut labels = self.factor_labels.clone();
        labels.extend(other.factor_labels.iter().cloned());
        HilbertSpace {
            factor_labels: labels,
        }
    }

    /// Sub-space made of the listed factors, in the listed order.
    pub fn subspace(&self, keep: &[usize]) -> Result<HilbertSpace, QuantumError> {
        let labels = keep
            .iter()
            .map(|&k| {
                self.factor_labels.get(k).cloned().ok_or_else(|| {
                    QuantumError::InvalidSpace(format!(
                        "factor index {k} out of range for {} factors",
                        self.num_factors()
                    ))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        HilbertSpace::new(labels)
    }

    /// Flat basis index of a multi-index (one level index per factor).
    pub fn index_of(&self, levels: &[usize]) -> usize {
        debug_assert_eq!(levels.len(), self.num_factors());
        levels
            .iter()
            .zip(&self.factor_labels)
            .fold(0, |acc, (&l, f)| {
                debug_assert!(l < f.len());
                acc * f.len() + l
            })
    }

    pub fn multi_index(&self, mut index: usize) -> Vec<usize> {
        let mut levels = vec![0; self.num_factors()];
        for (slot, f) in levels.iter_mut().zip(&self.factor_labels).rev() {
            *slot = index % f.len();
            index /= f.len();
        }
        levels
    }

    /// Flat index of the basis state named by one label per factor.
    pub fn index_of_labels<S: AsRef<str>>(&self, labels: &[S]) -> Option<usize> {
        if labels.len() != self.num_factors() {
            return None;
        }
        let levels = labels
            .iter()
            .zip(&self.factor_labels)
            .map(|(l, f)| f.iter().position(|x| x == l.as_ref()))
            .collect::<Option<Vec<_>>>()?;
        Some(self.index_of(&levels))
    }

    /// Basis-state name, factor labels joined by `,`.
    pub fn basis_label(&self, index: usize) -> String {
        self.multi_index(index)
            .iter()
            .zip(&self.factor_labels)
            .map(|(&l, f)| f[l].as_str())
            .collect::<Vec<_>>()
            .join(",")
    }
}
