//! Lindblad master equation
//! `dρ/dt = -i[H(t), ρ] + Σ_k γ_k (L_k ρ L_k† - ½{L_k† L_k, ρ})`.
//!
//! The integrator never touches the full `d × d` matrix. Basis states are
//! grouped into the connected components of the coupling graph of
//! `H(t)` and `Σ γ L†L`; the density matrix is carried as the set of
//! component-pair blocks reachable from `ρ(0)` under the jump operators.
//! For models with a conserved excitation number this is the usual
//! block-diagonal sector decomposition, found automatically.

use std::collections::{BTreeSet, HashMap, VecDeque};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::hamiltonian::{CompiledHamiltonian, Source};
use super::ode::{integrate, IntegratorConfig, IntegratorStats, Sampler};
use super::operator::ensure_same;
use super::state::min_hermitian_eigenvalue;
use super::{DensityMatrix, HilbertSpace, Operator, PhasedHamiltonian, QuantumError};

pub const TRACE_TOL: f64 = 1e-8;
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Minimum eigenvalue below which a run is aborted.
pub const POSITIVITY_TOL: f64 = 1e-6;

/// Jump operator with its rate (rad/μs).
#[derive(Debug, Clone, PartialEq)]
pub struct CollapseChannel {
    operator: Operator,
    rate: f64,
}

impl CollapseChannel {
    pub fn new(operator: Operator, rate: f64) -> Result<Self, QuantumError> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(QuantumError::InvalidChannel(format!(
                "rate must be finite and non-negative, got {rate}"
            )));
        }
        Ok(Self { operator, rate })
    }

    pub fn operator(&self) -> &Operator {
        &self.operator
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LindbladDiagnostics {
    pub max_trace_error: f64,
    pub max_hermiticity_defect: f64,
    pub min_eigenvalue: f64,
    /// Sizes of the coupled basis blocks the state was split into.
    pub block_dims: Vec<usize>,
    pub active_blocks: usize,
}

#[derive(Debug, Clone)]
pub struct LindbladEvolution<T> {
    pub samples: Vec<T>,
    pub final_state: DensityMatrix,
    pub final_time: f64,
    pub stats: IntegratorStats,
    pub diagnostics: LindbladDiagnostics,
}

/// Integrates the master equation from `t = 0` to `t_final`, recording
/// `(t, ρ(t))` every `record_stride` steps.
pub fn evolve_lindblad(
    h: &PhasedHamiltonian,
    rho0: &DensityMatrix,
    channels: &[CollapseChannel],
    t_final: f64,
    cfg: &IntegratorConfig,
) -> Result<LindbladEvolution<(f64, DensityMatrix)>, QuantumError> {
    evolve_lindblad_observed(h, rho0, channels, t_final, cfg, |t, rho| (t, rho.clone()))
}

/// As [`evolve_lindblad`], mapping each recorded state through `observe`.
///
/// Trace, Hermiticity and positivity are checked at every recorded sample.
pub fn evolve_lindblad_observed<T>(
    h: &PhasedHamiltonian,
    rho0: &DensityMatrix,
    channels: &[CollapseChannel],
    t_final: f64,
    cfg: &IntegratorConfig,
    mut observe: impl FnMut(f64, &DensityMatrix) -> T,
) -> Result<LindbladEvolution<T>, QuantumError> {
    cfg.validate()?;
    ensure_same(h.space(), rho0.space())?;
    for ch in channels {
        ensure_same(h.space(), ch.operator.space())?;
    }
    rho0.validate()?;
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(QuantumError::InvalidIntegrator(format!(
            "t_final must be finite and non-negative, got {t_final}"
        )));
    }

    let engine = BlockEngine::new(&h.compile(), channels, rho0.matrix());
    let rate = h
        .characteristic_frequency()
        .max(channels.iter().map(|c| c.rate * c.operator.row_sum_norm().powi(2)).sum());
    let max_step = cfg.resolve_max_step(rate, t_final);

    let mut y = engine.pack(rho0.matrix());
    let space = rho0.space().clone();
    let mut diag = LindbladDiagnostics {
        min_eigenvalue: f64::INFINITY,
        block_dims: engine.comps.iter().map(|c| c.len()).collect(),
        active_blocks: engine.pairs.len(),
        ..Default::default()
    };
    let mut sampler = Sampler::new(cfg.record_stride);
    let mut last_t = 0.0;
    let mut scratch = Scratch::default();

    let stats = integrate(
        &mut y,
        0.0,
        t_final,
        cfg.method,
        max_step,
        cfg.rel_tol,
        cfg.abs_tol,
        |t, rho, out| engine.rhs(t, rho, out, &mut scratch),
        |step, t, packed| {
            last_t = t;
            if sampler.wants(step) {
                let rho = engine.checked_state(&space, packed, t, &mut diag)?;
                sampler.push(step, observe(t, &rho));
            }
            Ok(())
        },
    )?;
    let final_time = last_t;
    let final_state = engine.checked_state(&space, &y, final_time, &mut diag)?;
    let samples = sampler.finish(stats.accepted_steps, || observe(final_time, &final_state));
    Ok(LindbladEvolution {
        samples,
        final_state,
        final_time,
        stats,
        diagnostics: diag,
    })
}

#[derive(Debug, Clone, Copy)]
struct LocalEntry {
    row: usize,
    col: usize,
    source: Source,
    value: C64,
}

#[derive(Debug, Clone)]
struct SparseMap {
    // (target-local row, source-local col, value)
    entries: Vec<(usize, usize, C64)>,
}

#[derive(Debug, Clone)]
struct Transfer {
    src: usize,
    dst: usize,
    rate: f64,
    left: usize,
    right: usize,
}

#[derive(Debug, Clone)]
struct Pair {
    left: usize,
    right: usize,
    offset: usize,
}

#[derive(Default)]
struct Scratch {
    phases: Vec<C64>,
    values: Vec<Vec<C64>>,
    tmp: Vec<C64>,
}

struct BlockEngine {
    dim: usize,
    comps: Vec<Vec<usize>>,
    comp_of: Vec<usize>,
    local_of: Vec<usize>,
    frequencies: Vec<f64>,
    heff: Vec<Vec<LocalEntry>>,
    maps: Vec<SparseMap>,
    pairs: Vec<Pair>,
    transfers: Vec<Transfer>,
    len: usize,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        parent[ra.max(rb)] = ra.min(rb);
    }
}

impl BlockEngine {
    fn new(h: &CompiledHamiltonian, channels: &[CollapseChannel], rho0: &DMatrix<C64>) -> Self {
        let d = h.dim;
        let zero = C64::new(0.0, 0.0);

        let jumps: Vec<(f64, Vec<(usize, usize, C64)>)> = channels
            .iter()
            .filter(|c| c.rate > 0.0)
            .map(|c| {
                let m = c.operator.matrix();
                let mut e = Vec::new();
                for col in 0..d {
                    for row in 0..d {
                        if m[(row, col)] != zero {
                            e.push((row, col, m[(row, col)]));
                        }
                    }
                }
                (c.rate, e)
            })
            .collect();

        // G = Σ γ L†L
        let mut g = DMatrix::<C64>::zeros(d, d);
        for ch in channels.iter().filter(|c| c.rate > 0.0) {
            let l = ch.operator.matrix();
            g += (l.adjoint() * l) * C64::new(ch.rate, 0.0);
        }

        let mut parent: Vec<usize> = (0..d).collect();
        for e in &h.entries {
            union(&mut parent, e.row, e.col);
        }
        for c in 0..d {
            for r in 0..d {
                if g[(r, c)] != zero {
                    union(&mut parent, r, c);
                }
            }
        }
        let mut root_to_comp = HashMap::new();
        let mut comps: Vec<Vec<usize>> = Vec::new();
        let mut comp_of = vec![0; d];
        let mut local_of = vec![0; d];
        for i in 0..d {
            let root = find(&mut parent, i);
            let id = *root_to_comp.entry(root).or_insert_with(|| {
                comps.push(Vec::new());
                comps.len() - 1
            });
            comp_of[i] = id;
            local_of[i] = comps[id].len();
            comps[id].push(i);
        }

        let mut heff: Vec<Vec<LocalEntry>> = vec![Vec::new(); comps.len()];
        for e in &h.entries {
            heff[comp_of[e.row]].push(LocalEntry {
                row: local_of[e.row],
                col: local_of[e.col],
                source: e.source,
                value: e.value,
            });
        }
        for c in 0..d {
            for r in 0..d {
                if g[(r, c)] != zero {
                    heff[comp_of[r]].push(LocalEntry {
                        row: local_of[r],
                        col: local_of[c],
                        source: Source::Static,
                        value: g[(r, c)] * C64::new(0.0, -0.5),
                    });
                }
            }
        }

        // jump maps per (channel, source component, target component)
        let mut map_index: HashMap<(usize, usize, usize), usize> = HashMap::new();
        let mut maps: Vec<SparseMap> = Vec::new();
        let mut targets: Vec<Vec<BTreeSet<(usize, usize)>>> =
            vec![vec![BTreeSet::new(); comps.len()]; jumps.len()];
        for (k, (_, entries)) in jumps.iter().enumerate() {
            for &(row, col, v) in entries {
                let (src, dst) = (comp_of[col], comp_of[row]);
                let idx = *map_index.entry((k, src, dst)).or_insert_with(|| {
                    maps.push(SparseMap {
                        entries: Vec::new(),
                    });
                    maps.len() - 1
                });
                maps[idx].entries.push((local_of[row], local_of[col], v));
                targets[k][src].insert((dst, idx));
            }
        }

        // active block pairs: closure of the support of ρ(0)
        let mut pair_index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut pairs: Vec<Pair> = Vec::new();
        let mut queue = VecDeque::new();
        let mut len = 0;
        let mut add_pair = |a: usize, b: usize, pairs: &mut Vec<Pair>, queue: &mut VecDeque<usize>| -> usize {
            *pair_index.entry((a, b)).or_insert_with(|| {
                pairs.push(Pair {
                    left: a,
                    right: b,
                    offset: len,
                });
                len += comps[a].len() * comps[b].len();
                queue.push_back(pairs.len() - 1);
                pairs.len() - 1
            })
        };
        for c in 0..d {
            for r in 0..d {
                if rho0[(r, c)] != zero {
                    add_pair(comp_of[r], comp_of[c], &mut pairs, &mut queue);
                }
            }
        }
        let mut transfers = Vec::new();
        while let Some(p) = queue.pop_front() {
            let (a, b) = (pairs[p].left, pairs[p].right);
            for (k, (rate, _)) in jumps.iter().enumerate() {
                let ta: Vec<_> = targets[k][a].iter().copied().collect();
                let tb: Vec<_> = targets[k][b].iter().copied().collect();
                for &(da, ma) in &ta {
                    for &(db, mb) in &tb {
                        let q = add_pair(da, db, &mut pairs, &mut queue);
                        transfers.push(Transfer {
                            src: p,
                            dst: q,
                            rate: *rate,
                            left: ma,
                            right: mb,
                        });
                    }
                }
            }
        }

        BlockEngine {
            dim: d,
            comps,
            comp_of,
            local_of,
            frequencies: h.frequencies.clone(),
            heff,
            maps,
            pairs,
            transfers,
            len,
        }
    }

    fn pack(&self, rho: &DMatrix<C64>) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.len];
        for p in &self.pairs {
            let (ra, rb) = (&self.comps[p.left], &self.comps[p.right]);
            let nb = rb.len();
            for (i, &gi) in ra.iter().enumerate() {
                for (j, &gj) in rb.iter().enumerate() {
                    y[p.offset + i * nb + j] = rho[(gi, gj)];
                }
            }
        }
        y
    }

    fn unpack(&self, y: &[C64]) -> DMatrix<C64> {
        let mut rho = DMatrix::zeros(self.dim, self.dim);
        for p in &self.pairs {
            let (ra, rb) = (&self.comps[p.left], &self.comps[p.right]);
            let nb = rb.len();
            for (i, &gi) in ra.iter().enumerate() {
                for (j, &gj) in rb.iter().enumerate() {
                    rho[(gi, gj)] = y[p.offset + i * nb + j];
                }
            }
        }
        rho
    }

    fn rhs(&self, t: f64, y: &[C64], out: &mut [C64], s: &mut Scratch) {
        s.phases.clear();
        s.phases
            .extend(self.frequencies.iter().map(|w| C64::from_polar(1.0, w * t)));
        s.values.resize(self.heff.len(), Vec::new());
        for (vals, entries) in s.values.iter_mut().zip(&self.heff) {
            vals.clear();
            vals.extend(entries.iter().map(|e| match e.source {
                Source::Static => e.value,
                Source::Direct(k) => e.value * s.phases[k],
                Source::Adjoint(k) => e.value * s.phases[k].conj(),
            }));
        }
        out.iter_mut().for_each(|o| *o = C64::new(0.0, 0.0));

        let minus_i = C64::new(0.0, -1.0);
        let plus_i = C64::new(0.0, 1.0);
        for p in &self.pairs {
            let nb = self.comps[p.right].len();
            let x = &y[p.offset..];
            let o = &mut out[p.offset..];
            // -i H_eff X
            for (e, &v) in self.heff[p.left].iter().zip(&s.values[p.left]) {
                let f = minus_i * v;
                let (dst, src) = (e.row * nb, e.col * nb);
                for j in 0..nb {
                    o[dst + j] += f * x[src + j];
                }
            }
            // +i X H_eff†
            let na = self.comps[p.left].len();
            for (e, &v) in self.heff[p.right].iter().zip(&s.values[p.right]) {
                let f = plus_i * v.conj();
                for i in 0..na {
                    o[i * nb + e.row] += f * x[i * nb + e.col];
                }
            }
        }
        // γ L X L†
        for tr in &self.transfers {
            let src = &self.pairs[tr.src];
            let dst = &self.pairs[tr.dst];
            let nb_src = self.comps[src.right].len();
            let na_dst = self.comps[dst.left].len();
            let nb_dst = self.comps[dst.right].len();
            let x = &y[src.offset..src.offset + self.comps[src.left].len() * nb_src];
            s.tmp.clear();
            s.tmp.resize(na_dst * nb_src, C64::new(0.0, 0.0));
            for &(r, c, v) in &self.maps[tr.left].entries {
                for j in 0..nb_src {
                    s.tmp[r * nb_src + j] += v * x[c * nb_src + j];
                }
            }
            let o = &mut out[dst.offset..dst.offset + na_dst * nb_dst];
            for &(r, c, v) in &self.maps[tr.right].entries {
                let f = v.conj() * tr.rate;
                for i in 0..na_dst {
                    o[i * nb_dst + r] += f * s.tmp[i * nb_src + c];
                }
            }
        }
    }

    fn checked_state(
        &self,
        space: &HilbertSpace,
        y: &[C64],
        t: f64,
        diag: &mut LindbladDiagnostics,
    ) -> Result<DensityMatrix, QuantumError> {
        let raw = self.unpack(y);
        let herm = super::operator::hermiticity_defect(&raw);
        let rho = (&raw + raw.adjoint()).scale(0.5);
        let trace_err = (rho.trace().re - 1.0).abs();
        diag.max_trace_error = diag.max_trace_error.max(trace_err);
        diag.max_hermiticity_defect = diag.max_hermiticity_defect.max(herm);
        if trace_err > TRACE_TOL {
            return Err(QuantumError::TraceDrift { t, error: trace_err });
        }
        let min = self.min_eigenvalue(&rho);
        diag.min_eigenvalue = diag.min_eigenvalue.min(min);
        if min < -POSITIVITY_TOL {
            return Err(QuantumError::PositivityViolation {
                t,
                min_eigenvalue: min,
            });
        }
        DensityMatrix::from_matrix_unchecked(space.clone(), rho)
    }

    /// Smallest eigenvalue, computed per group of components linked by
    /// active coherence blocks.
    fn min_eigenvalue(&self, rho: &DMatrix<C64>) -> f64 {
        let n = self.comps.len();
        let mut parent: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for p in &self.pairs {
            union(&mut parent, p.left, p.right);
            touched[p.left] = true;
            touched[p.right] = true;
        }
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for c in 0..n {
            if touched[c] {
                let r = find(&mut parent, c);
                groups.entry(r).or_default().extend(&self.comps[c]);
            }
        }
        let mut min = if groups.values().map(Vec::len).sum::<usize>() < self.dim {
            0.0
        } else {
            f64::INFINITY
        };
        for idx in groups.values() {
            let sub = DMatrix::from_fn(idx.len(), idx.len(), |r, c| rho[(idx[r], idx[c])]);
            min = min.min(min_hermitian_eigenvalue(&sub));
        }
        let _ = (&self.comp_of, &self.local_of);
        min
    }
}
