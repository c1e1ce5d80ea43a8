//! Optimal universal encoders.
//!
//! The search runs over pure-state ensembles. Each outer iteration solves the
//! leakage problem for the current encoding, forms the subgradient of `2^Q`
//! with respect to every state (the sum of optimal POVM elements assigned to
//! that label), takes a step of size `μ`, and projects each state back onto
//! the rank-one unit-trace matrices via its dominant eigenvector.

use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::leakage::{compute_leakage, compute_leakage_from, LeakageResult, SolverConfig};
use crate::operator::{eig_hermitian, DensityOperator, Ensemble, Hermitian, Povm, PureState};
use crate::random::{derive_seed, random_pure_state, task_rng};

/// Projection input whose eigenvalues are all below this is treated as zero.
pub const DEGENERATE_EIGENVALUE: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EncodingProblem {
    pub alphabet_size: usize,
    pub dim: usize,
}

impl EncodingProblem {
    pub fn new(alphabet_size: usize, dim: usize) -> Result<Self> {
        if alphabet_size == 0 || dim == 0 {
            return Err(Error::InvalidArgument("alphabet size and dimension must be at least 1".into()));
        }
        Ok(EncodingProblem { alphabet_size, dim })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerConfig {
    /// Constant ascent step `μ`.
    pub step_size: f64,
    pub iterations: usize,
    pub restarts: usize,
    pub seed: u64,
    pub solver: SolverConfig,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig { step_size: 0.1, iterations: 100, restarts: 100, seed: 0, solver: SolverConfig::default() }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.step_size <= 0.0 || !self.step_size.is_finite() {
            return Err(Error::InvalidArgument(format!("step size must be positive, got {}", self.step_size)));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("restarts must be at least 1".into()));
        }
        self.solver.validate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceSummary {
    pub iteration: usize,
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Clone, Debug)]
pub struct OptimizationRun {
    /// Leakage in bits per restart, entry `k` taken before the `k`-th step.
    pub traces: Vec<Vec<f64>>,
    pub best_run: usize,
    pub best_ensemble: Ensemble,
    pub best_leakage_bits: f64,
    pub summary: Vec<TraceSummary>,
    /// `(run, iteration)` pairs where the inner solver hit `max_iter`.
    pub nonconverged: Vec<(usize, usize)>,
}

/// `G^x = Σ_{y : x*(y) = x} F*_y` for every label.
pub fn subgradient(ens: &Ensemble, res: &LeakageResult) -> Vec<Hermitian> {
    let d = ens.dim();
    let mut g = vec![Hermitian::zeros(d); ens.len()];
    for (f, &x) in res.povm.elements().iter().zip(&res.assignment) {
        g[x] = g[x].add(f);
    }
    g
}

/// Rank-one unit-trace projection: `|v⟩⟨v|` for the eigenvector with the
/// largest `|λ|`.
pub fn project_rank_one(h: &Hermitian) -> DensityOperator {
    let eig = eig_hermitian(h);
    if eig.values[0].abs() < DEGENERATE_EIGENVALUE {
        return PureState::basis(h.dim(), 0).expect("dim >= 1").to_density();
    }
    let v = PureState::normalized(eig.vectors[0].clone()).expect("eigenvectors are unit vectors");
    v.to_density()
}

/// `ρ^x ← Π[ρ^x + μ G^x]` for every label.
pub fn ascent_step(ens: &Ensemble, res: &LeakageResult, step_size: f64) -> Result<Ensemble> {
    let g = subgradient(ens, res);
    let mut x = 0;
    ens.map_states(|rho| {
        let moved = rho.operator().add(&g[x].scale(step_size));
        x += 1;
        Ok(project_rank_one(&moved))
    })
}

/// Basis encoding `ρ^x = |τ(x)⟩⟨τ(x)|`; `τ` must be injective into `0..dim`.
pub fn basis_encoding<F>(alphabet_size: usize, dim: usize, tau: F) -> Result<Ensemble>
where
    F: Fn(usize) -> usize,
{
    if alphabet_size == 0 {
        return Err(Error::InvalidArgument("alphabet must be non-empty".into()));
    }
    if dim < alphabet_size {
        return Err(Error::InvalidArgument(format!(
            "no injective basis encoding of {alphabet_size} symbols into dimension {dim}"
        )));
    }
    let mut used = vec![false; dim];
    let mut states = Vec::with_capacity(alphabet_size);
    for x in 0..alphabet_size {
        let i = tau(x);
        if i >= dim || std::mem::replace(&mut used[i], true) {
            return Err(Error::InvalidArgument(format!("label map is not injective into 0..{dim} at {x}")));
        }
        states.push(PureState::basis(dim, i)?);
    }
    Ensemble::from_pure_states(&states)
}

fn random_encoding(p: EncodingProblem, seed: u64, run: usize) -> Result<Ensemble> {
    let mut rng = task_rng(seed, run as u64);
    let states = (0..p.alphabet_size)
        .map(|_| random_pure_state(p.dim, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    Ensemble::from_pure_states(&states)
}

struct RestartOutcome {
    trace: Vec<f64>,
    ensemble: Ensemble,
    nonconverged: Vec<usize>,
}

fn run_restart(mut ens: Ensemble, cfg: &OptimizerConfig, run: usize) -> Result<RestartOutcome> {
    let cold = SolverConfig { seed: derive_seed(cfg.solver.seed ^ cfg.seed, run as u64), ..cfg.solver.clone() };
    let mut trace = Vec::with_capacity(cfg.iterations + 1);
    let mut nonconverged = Vec::new();
    let mut warm: Option<Povm> = None;
    for k in 0..=cfg.iterations {
        // later iterations restart the inner solver from the previous optimum
        let res = match warm.take() {
            None => compute_leakage(&ens, &cold)?,
            Some(povm) => compute_leakage_from(&ens, &cfg.solver, povm)?,
        };
        trace.push(res.leakage_bits);
        if !res.converged {
            nonconverged.push(k);
        }
        if k == cfg.iterations {
            break;
        }
        ens = ascent_step(&ens, &res, cfg.step_size)?;
        warm = Some(res.povm);
    }
    Ok(RestartOutcome { trace, ensemble: ens, nonconverged })
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Per-iteration median, min and max across equally long traces.
pub fn summarize(traces: &[Vec<f64>]) -> Vec<TraceSummary> {
    let len = traces.iter().map(Vec::len).min().unwrap_or(0);
    (0..len)
        .map(|k| {
            let mut col: Vec<f64> = traces.iter().map(|t| t[k]).collect();
            col.sort_by(f64::total_cmp);
            TraceSummary { iteration: k, median: median(&col), min: col[0], max: col[col.len() - 1] }
        })
        .collect()
}

/// Projected subgradient ascent from the given starting encodings, one
/// restart per entry.
pub fn optimize_from(initial: Vec<Ensemble>, cfg: &OptimizerConfig) -> Result<OptimizationRun> {
    cfg.validate()?;
    if initial.is_empty() {
        return Err(Error::InvalidArgument("no starting encodings".into()));
    }
    let outcomes = initial
        .into_par_iter()
        .enumerate()
        .map(|(run, ens)| run_restart(ens, cfg, run))
        .collect::<Result<Vec<_>>>()?;

    let mut best_run = 0;
    for (i, o) in outcomes.iter().enumerate() {
        if o.trace.last() > outcomes[best_run].trace.last() {
            best_run = i;
        }
    }
    let nonconverged = outcomes
        .iter()
        .enumerate()
        .flat_map(|(r, o)| o.nonconverged.iter().map(move |&k| (r, k)))
        .collect();
    let traces: Vec<Vec<f64>> = outcomes.iter().map(|o| o.trace.clone()).collect();
    let summary = summarize(&traces);
    let best_leakage_bits = *traces[best_run].last().expect("non-empty trace");
    let best_ensemble = outcomes.into_iter().nth(best_run).expect("best run exists").ensemble;
    Ok(OptimizationRun { traces, best_run, best_ensemble, best_leakage_bits, summary, nonconverged })
}

/// Cold-started search from `cfg.restarts` Haar-random pure encodings.
pub fn optimize_encoding(p: EncodingProblem, cfg: &OptimizerConfig) -> Result<OptimizationRun> {
    cfg.validate()?;
    let initial = (0..cfg.restarts)
        .map(|r| random_encoding(p, cfg.seed, r))
        .collect::<Result<Vec<_>>>()?;
    optimize_from(initial, cfg)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub qubits: u32,
    pub dim: usize,
    pub leakage_bits: f64,
    /// Started from the basis encoding instead of random states.
    pub warm_started: bool,
}

/// Largest register the sweep will attempt.
pub const MAX_SWEEP_QUBITS: u32 = 8;

/// Best leakage per qubit count with `d = 2^n`. Where `d ≥ |X|` the search
/// starts from the basis encoding, which is already optimal there.
pub fn sweep_qubits(alphabet_size: usize, qubits: RangeInclusive<u32>, cfg: &OptimizerConfig) -> Result<Vec<SweepPoint>> {
    cfg.validate()?;
    if alphabet_size == 0 {
        return Err(Error::InvalidArgument("alphabet must be non-empty".into()));
    }
    if qubits.is_empty() || *qubits.start() == 0 || *qubits.end() > MAX_SWEEP_QUBITS {
        return Err(Error::InvalidArgument(format!(
            "qubit range must lie within 1..={MAX_SWEEP_QUBITS} and be non-empty"
        )));
    }
    qubits
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|n| {
            let dim = 1usize << n;
            let point_cfg = OptimizerConfig { seed: derive_seed(cfg.seed, u64::from(n)), ..cfg.clone() };
            let (run, warm_started) = if dim >= alphabet_size {
                let start = basis_encoding(alphabet_size, dim, |x| x)?;
                (optimize_from(vec![start], &point_cfg)?, true)
            } else {
                (optimize_encoding(EncodingProblem::new(alphabet_size, dim)?, &point_cfg)?, false)
            };
            Ok(SweepPoint { qubits: n, dim, leakage_bits: run.best_leakage_bits, warm_started })
        })
        .collect()
}
