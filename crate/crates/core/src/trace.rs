use serde::{Deserialize, Serialize};

use crate::quantum::IntegratorStats;

/// One sample of a fidelity run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub t_us: f64,
    pub t_over_tau: f64,
    pub fidelity: f64,
    pub populations: Vec<f64>,
    pub photon_mean: Option<f64>,
}

/// Time series of fidelity and populations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityTrace {
    /// Gate period the time axis is normalised by, μs.
    pub tau: f64,
    /// One entry per population column, e.g. `0bar`.
    pub population_labels: Vec<String>,
    pub with_photon_mean: bool,
    pub rows: Vec<TraceRow>,
    pub stats: IntegratorStats,
}

impl FidelityTrace {
    pub fn new(tau: f64, population_labels: Vec<String>, with_photon_mean: bool) -> Self {
        Self {
            tau,
            population_labels,
            with_photon_mean,
            rows: Vec::new(),
            stats: IntegratorStats::default(),
        }
    }

    pub fn header(&self) -> Vec<String> {
        let mut h = vec!["t_us".to_owned(), "t_over_tau".to_owned(), "fidelity".to_owned()];
        h.extend(self.population_labels.iter().map(|l| format!("pop_{l}")));
        if self.with_photon_mean {
            h.push("photon_mean".to_owned());
        }
        h
    }

    pub fn push(&mut self, t_us: f64, fidelity: f64, populations: Vec<f64>, photon_mean: Option<f64>) {
        self.rows.push(TraceRow {
            t_us,
            t_over_tau: t_us / self.tau,
            fidelity,
            populations,
            photon_mean,
        });
    }

    pub fn final_row(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    pub fn final_fidelity(&self) -> Option<f64> {
        self.rows.last().map(|r| r.fidelity)
    }

    pub fn min_fidelity(&self) -> Option<f64> {
        self.rows.iter().map(|r| r.fidelity).reduce(f64::min)
    }

    /// Checks time ordering, the fidelity range and population sums.
    pub fn check(&self) -> Result<(), String> {
        for w in self.rows.windows(2) {
            if !(w[1].t_us > w[0].t_us) {
                return Err(format!("time not increasing at t = {}", w[1].t_us));
            }
        }
        for r in &self.rows {
            if !(r.fidelity >= 0.0 && r.fidelity <= 1.0 + 1e-9) {
                return Err(format!("fidelity {} out of range at t = {}", r.fidelity, r.t_us));
            }
            let total: f64 = r.populations.iter().sum();
            if total > 1.0 + 1e-6 {
                return Err(format!("populations sum to {total} at t = {}", r.t_us));
            }
            if r.populations.len() != self.population_labels.len()
                || r.photon_mean.is_some() != self.with_photon_mean
            {
                return Err(format!("row shape mismatch at t = {}", r.t_us));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let t = FidelityTrace::new(1.0, vec!["0bar".into(), "rbar".into()], true);
        assert_eq!(t.header(), ["t_us", "t_over_tau", "fidelity", "pop_0bar", "pop_rbar", "photon_mean"]);
    }

    #[test]
    fn check_rejects_unordered_time() {
        let mut t = FidelityTrace::new(2.0, vec![], false);
        t.push(0.0, 1.0, vec![], None);
        t.push(1.0, 0.9, vec![], None);
        assert!(t.check().is_ok());
        assert_eq!(t.rows[1].t_over_tau, 0.5);
        t.push(1.0, 0.9, vec![], None);
        assert!(t.check().is_err());
    }
}
