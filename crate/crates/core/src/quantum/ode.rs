//! Explicit Runge-Kutta drivers over flat complex state vectors.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::QuantumError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Classical fixed-step fourth order.
    Rk4,
    /// Dormand-Prince 5(4) with embedded error estimate.
    Adaptive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Step ceiling in μs. When absent it is `step_factor / f`, with `f` the
    /// fastest rate of the Hamiltonian in rad/μs.
    pub max_step: Option<f64>,
    pub step_factor: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Accepted steps between recorded samples.
    pub record_stride: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::Adaptive,
            max_step: None,
            step_factor: 0.02,
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            record_stride: 1,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<(), QuantumError> {
        let bad = |what: &str| Err(QuantumError::InvalidIntegrator(what.to_owned()));
        if let Some(h) = self.max_step {
            if !(h > 0.0 && h.is_finite()) {
                return bad("max_step must be positive");
            }
        }
        if !(self.step_factor > 0.0 && self.step_factor.is_finite()) {
            return bad("step_factor must be positive");
        }
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.record_stride == 0 {
            return bad("record_stride must be at least 1");
        }
        Ok(())
    }

    /// Step ceiling for a problem whose fastest rate is `rate` rad/μs over a
    /// horizon of `span` μs.
    pub fn resolve_max_step(&self, rate: f64, span: f64) -> f64 {
        let h = match self.max_step {
            Some(h) => h,
            None if rate > 0.0 => self.step_factor / rate,
            None => span,
        };
        if span > 0.0 {
            h.min(span)
        } else {
            h
        }
    }

    /// Same configuration with the step ceiling halved.
    pub fn halved(&self, rate: f64, span: f64) -> Self {
        Self {
            max_step: Some(0.5 * self.resolve_max_step(rate, span)),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IntegratorStats {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub rhs_evaluations: usize,
    pub smallest_step: f64,
    pub largest_step: f64,
    pub max_step: f64,
}

impl IntegratorStats {
    fn record_step(&mut self, h: f64) {
        self.accepted_steps += 1;
        if self.accepted_steps == 1 {
            self.smallest_step = h;
            self.largest_step = h;
        } else {
            self.smallest_step = self.smallest_step.min(h);
            self.largest_step = self.largest_step.max(h);
        }
    }
}

/// Keeps every `stride`-th step and always the terminal one. The terminal
/// sample replaces the last stride multiple when the step count is not a
/// multiple of `stride`, so the sample count is `floor(steps/stride) + 1`.
#[derive(Debug)]
pub(crate) struct Sampler<T> {
    stride: usize,
    samples: Vec<(usize, T)>,
}

impl<T> Sampler<T> {
    pub fn new(stride: usize) -> Self {
        Self {
            stride: stride.max(1),
            samples: Vec::new(),
        }
    }

    pub fn wants(&self, step: usize) -> bool {
        step % self.stride == 0
    }

    pub fn push(&mut self, step: usize, value: T) {
        self.samples.push((step, value));
    }

    pub fn finish(mut self, step: usize, terminal: impl FnOnce() -> T) -> Vec<T> {
        match self.samples.last() {
            Some((s, _)) if *s == step => {}
            Some(_) => {
                let n = self.samples.len();
                self.samples[n - 1] = (step, terminal());
            }
            None => self.samples.push((step, terminal())),
        }
        self.samples.into_iter().map(|(_, v)| v).collect()
    }
}

// Dormand-Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates `y' = f(t, y)` from `t0` to `t1` in place.
///
/// `on_step(k, t, y)` runs for the initial state (`k = 0`) and after each
/// accepted step. Returning an error aborts the integration.
pub(crate) fn integrate<F, O>(
    y: &mut [C64],
    t0: f64,
    t1: f64,
    method: Method,
    max_step: f64,
    rel_tol: f64,
    abs_tol: f64,
    mut rhs: F,
    mut on_step: O,
) -> Result<IntegratorStats, QuantumError>
where
    F: FnMut(f64, &[C64], &mut [C64]),
    O: FnMut(usize, f64, &[C64]) -> Result<(), QuantumError>,
{
    let mut stats = IntegratorStats {
        max_step,
        ..Default::default()
    };
    on_step(0, t0, y)?;
    let span = t1 - t0;
    if span <= 0.0 {
        return Ok(stats);
    }
    match method {
        Method::Rk4 => rk4(y, t0, t1, max_step, &mut rhs, &mut on_step, &mut stats)?,
        Method::Adaptive => dopri5(
            y, t0, t1, max_step, rel_tol, abs_tol, &mut rhs, &mut on_step, &mut stats,
        )?,
    }
    Ok(stats)
}

#[inline]
fn combine(out: &mut [C64], y: &[C64], h: f64, ks: &[(&[C64], f64)]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for (k, a) in ks {
            if *a != 0.0 {
                acc += k[i] * *a;
            }
        }
        *o = y[i] + acc * h;
    }
}

fn rk4<F, O>(
    y: &mut [C64],
    t0: f64,
    t1: f64,
    max_step: f64,
    rhs: &mut F,
    on_step: &mut O,
    stats: &mut IntegratorStats,
) -> Result<(), QuantumError>
where
    F: FnMut(f64, &[C64], &mut [C64]),
    O: FnMut(usize, f64, &[C64]) -> Result<(), QuantumError>,
{
    let n = y.len();
    let steps = ((t1 - t0) / max_step - 1e-9).ceil().max(1.0) as usize;
    let h = (t1 - t0) / steps as f64;
    let zero = C64::new(0.0, 0.0);
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (
        vec![zero; n],
        vec![zero; n],
        vec![zero; n],
        vec![zero; n],
        vec![zero; n],
    );
    for step in 1..=steps {
        let t = t0 + (step - 1) as f64 * h;
        rhs(t, y, &mut k1);
        combine(&mut tmp, y, h, &[(&k1, 0.5)]);
        rhs(t + 0.5 * h, &tmp, &mut k2);
        combine(&mut tmp, y, h, &[(&k2, 0.5)]);
        rhs(t + 0.5 * h, &tmp, &mut k3);
        combine(&mut tmp, y, h, &[(&k3, 1.0)]);
        rhs(t + h, &tmp, &mut k4);
        for i in 0..n {
            y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
        stats.rhs_evaluations += 4;
        stats.record_step(h);
        let t_now = if step == steps { t1 } else { t0 + step as f64 * h };
        on_step(step, t_now, y)?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn dopri5<F, O>(
    y: &mut [C64],
    t0: f64,
    t1: f64,
    max_step: f64,
    rel_tol: f64,
    abs_tol: f64,
    rhs: &mut F,
    on_step: &mut O,
    stats: &mut IntegratorStats,
) -> Result<(), QuantumError>
where
    F: FnMut(f64, &[C64], &mut [C64]),
    O: FnMut(usize, f64, &[C64]) -> Result<(), QuantumError>,
{
    let n = y.len();
    let zero = C64::new(0.0, 0.0);
    let mut k = vec![vec![zero; n]; 7];
    let mut tmp = vec![zero; n];
    let mut y_new = vec![zero; n];

    let span = t1 - t0;
    let mut h = max_step.min(span);
    let mut t = t0;
    let mut step = 0usize;
    let mut rejected_last = false;

    rhs(t, y, &mut k[0]);
    stats.rhs_evaluations += 1;

    loop {
        let remaining = t1 - t;
        if remaining <= span * 1e-14 {
            break;
        }
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        if h < span * 1e-14 || h < f64::EPSILON * t.abs().max(1.0) * 4.0 {
            return Err(QuantumError::StepSizeUnderflow { t, step: h });
        }

        {
            let (k1, rest) = k.split_at_mut(1);
            let k1 = &k1[0];
            combine(&mut tmp, y, h, &[(k1, A21)]);
            rhs(t + C2 * h, &tmp, &mut rest[0]);
            combine(&mut tmp, y, h, &[(k1, A31), (&rest[0], A32)]);
            rhs(t + C3 * h, &tmp, &mut rest[1]);
            combine(&mut tmp, y, h, &[(k1, A41), (&rest[0], A42), (&rest[1], A43)]);
            rhs(t + C4 * h, &tmp, &mut rest[2]);
            combine(
                &mut tmp,
                y,
                h,
                &[(k1, A51), (&rest[0], A52), (&rest[1], A53), (&rest[2], A54)],
            );
            rhs(t + C5 * h, &tmp, &mut rest[3]);
            combine(
                &mut tmp,
                y,
                h,
                &[
                    (k1, A61),
                    (&rest[0], A62),
                    (&rest[1], A63),
                    (&rest[2], A64),
                    (&rest[3], A65),
                ],
            );
            rhs(t + h, &tmp, &mut rest[4]);
            combine(
                &mut y_new,
                y,
                h,
                &[(k1, B1), (&rest[1], B3), (&rest[2], B4), (&rest[3], B5), (&rest[4], B6)],
            );
            rhs(t + h, &y_new, &mut rest[5]);
        }
        stats.rhs_evaluations += 6;

        let mut acc = 0.0;
        for i in 0..n {
            let e = (k[0][i] * E1
                + k[2][i] * E3
                + k[3][i] * E4
                + k[4][i] * E5
                + k[5][i] * E6
                + k[6][i] * E7)
                * h;
            let scale = abs_tol + rel_tol * y[i].norm().max(y_new[i].norm());
            let r = e.norm() / scale;
            acc += r * r;
        }
        let err = (acc / n.max(1) as f64).sqrt();
        let err = if err.is_finite() { err } else { f64::MAX };

        if err <= 1.0 {
            t = if last { t1 } else { t + h };
            y.copy_from_slice(&y_new);
            k.swap(0, 6);
            step += 1;
            stats.record_step(h);
            on_step(step, t, y)?;
            let grow = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            let grow = if rejected_last { grow.min(1.0) } else { grow };
            rejected_last = false;
            h = (h * grow).min(max_step);
            if last {
                break;
            }
        } else {
            stats.rejected_steps += 1;
            rejected_last = true;
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
        }
    }
    Ok(())
}
