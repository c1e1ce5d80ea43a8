//! Maximal quantum leakage of an ensemble.
//!
//! The leakage is `Q = log2 sup_F Σ_y max_x tr(ρ^x F_y)` with the supremum
//! over POVMs with `d²` outcomes. The solver alternates two steps:
//!
//! 1. assignment: `x*(y) = argmax_x tr(ρ^x F_y)` over the support of X;
//! 2. discrimination fixed point with `σ_y = ρ^{x*(y)}`:
//!    `F_y ← Λ^{-1/2} σ_y F_y σ_y Λ^{-1/2}`, `Λ = Σ_y σ_y F_y σ_y`.
//!
//! The kernel of `Λ` is spread uniformly over all outcomes so every iterate
//! is an exact POVM. A dual certificate `Y ⪰ ρ^x` bounds the optimum from
//! above once the iteration stops.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{
    c, inverse_sqrt_split, CMatrix, CVector, DensityOperator, Ensemble, Hermitian, Povm, PureState,
};
use crate::random::{random_pure_state, task_rng};

/// Size of the rank-one kick added to the uniform starting measurement.
pub const INIT_PERTURBATION: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Stop when the relative objective change falls below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Number of POVM outcomes; `None` means `d²`.
    pub outcome_count: Option<usize>,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { tol: 1e-10, max_iter: 5000, outcome_count: None, restarts: 5, seed: 0 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tol <= 0.0 || !self.tol.is_finite() {
            return Err(Error::InvalidArgument(format!("solver tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("solver max_iter must be at least 1".into()));
        }
        if self.outcome_count == Some(0) {
            return Err(Error::InvalidArgument("outcome_count must be at least 1".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("solver restarts must be at least 1".into()));
        }
        Ok(())
    }

    pub fn outcomes_for(&self, dim: usize) -> usize {
        self.outcome_count.unwrap_or(dim * dim)
    }
}

#[derive(Clone, Debug)]
pub struct LeakageResult {
    /// `Q(X→A)` in bits.
    pub leakage_bits: f64,
    /// `2^Q`, i.e. `Σ_y max_x tr(ρ^x F_y)` at the returned POVM.
    pub objective: f64,
    pub povm: Povm,
    /// `x*(y)` as alphabet indices.
    pub assignment: Vec<usize>,
    pub dual_upper_bound: f64,
    pub dual_upper_bound_bits: f64,
    /// Fixed-point steps taken by the winning restart.
    pub iterations: usize,
    pub converged: bool,
    /// Objective before the first step and after every step.
    pub objective_trace: Vec<f64>,
}

impl LeakageResult {
    pub fn gap_bits(&self) -> f64 {
        self.dual_upper_bound_bits - self.leakage_bits
    }
}

fn check_dims(povm: &Povm, ens: &Ensemble) -> Result<()> {
    if povm.dim() != ens.dim() {
        return Err(Error::DimensionMismatch { expected: ens.dim(), found: povm.dim() });
    }
    Ok(())
}

/// Best label per outcome and the resulting objective.
fn assign(povm: &Povm, ens: &Ensemble, support: &[usize]) -> (Vec<usize>, f64) {
    let states = ens.states();
    let mut total = 0.0;
    let assignment = povm
        .elements()
        .iter()
        .map(|f| {
            let mut best = support[0];
            let mut best_val = states[best].expect(f.matrix());
            for &x in &support[1..] {
                let v = states[x].expect(f.matrix());
                if v > best_val {
                    best = x;
                    best_val = v;
                }
            }
            total += best_val;
            best
        })
        .collect();
    (assignment, total)
}

/// `x*(y) ∈ argmax_x tr(ρ^x F_y)` over labels in the support, ties to the
/// smallest alphabet index.
pub fn assignment_update(povm: &Povm, ens: &Ensemble) -> Result<Vec<usize>> {
    check_dims(povm, ens)?;
    let support = ens.support_indices();
    if support.is_empty() {
        return Err(Error::InvalidArgument("empty alphabet".into()));
    }
    Ok(assign(povm, ens, &support).0)
}

/// `Σ_y max_x tr(ρ^x F_y)` for a fixed measurement.
pub fn povm_objective(povm: &Povm, ens: &Ensemble) -> Result<f64> {
    check_dims(povm, ens)?;
    Ok(assign(povm, ens, &ens.support_indices()).1)
}

/// One discrimination fixed-point update with `σ_y` the state assigned to
/// outcome `y`.
pub fn povm_fixed_point_step(povm: &Povm, sigma: &[&DensityOperator]) -> Result<Povm> {
    let n = povm.outcome_count();
    if sigma.len() != n {
        return Err(Error::InvalidArgument(format!("{} states for {n} outcomes", sigma.len())));
    }
    let d = povm.dim();
    if let Some(s) = sigma.iter().find(|s| s.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: s.dim() });
    }

    let pure: Option<Vec<&CVector>> = sigma.iter().map(|s| s.pure_vector()).collect();
    let elements = match pure {
        Some(vectors) => pure_step(povm, &vectors)?,
        None => mixed_step(povm, sigma)?,
    };
    Ok(Povm::unchecked(elements))
}

fn kernel_share(ker: &Hermitian, n: usize) -> Option<CMatrix> {
    (ker.trace() > 0.5).then(|| ker.matrix() * c(1.0 / n as f64))
}

fn mixed_step(povm: &Povm, sigma: &[&DensityOperator]) -> Result<Vec<Hermitian>> {
    let d = povm.dim();
    let n = povm.outcome_count();
    let sandwiched: Vec<CMatrix> = povm
        .elements()
        .iter()
        .zip(sigma)
        .map(|(f, s)| s.matrix() * f.matrix() * s.matrix())
        .collect();
    let lambda = Hermitian::symmetrized(sandwiched.iter().fold(CMatrix::zeros(d, d), |acc, m| acc + m));
    if lambda.trace() <= 0.0 || lambda.trace().is_nan() {
        return Err(Error::DegenerateEnsemble);
    }
    let (inv, ker) = inverse_sqrt_split(&lambda)?;
    let share = kernel_share(&ker, n);
    Ok(sandwiched
        .into_iter()
        .map(|m| {
            let mut next = inv.matrix() * m * inv.matrix();
            if let Some(k) = &share {
                next += k;
            }
            Hermitian::symmetrized(next)
        })
        .collect())
}

/// For `σ_y = |ψ_y⟩⟨ψ_y|`: `σ_y F_y σ_y = w_y |ψ_y⟩⟨ψ_y|` with `w_y = ⟨ψ_y|F_y|ψ_y⟩`.
fn pure_step(povm: &Povm, vectors: &[&CVector]) -> Result<Vec<Hermitian>> {
    let d = povm.dim();
    let n = povm.outcome_count();
    let weights: Vec<f64> = povm
        .elements()
        .iter()
        .zip(vectors)
        .map(|(f, v)| v.dotc(&(f.matrix() * *v)).re.max(0.0))
        .collect();
    let mut lambda = CMatrix::zeros(d, d);
    for (&w, v) in weights.iter().zip(vectors) {
        if w > 0.0 {
            lambda += (*v * v.adjoint()) * c(w);
        }
    }
    let lambda = Hermitian::symmetrized(lambda);
    if lambda.trace() <= 0.0 || lambda.trace().is_nan() {
        return Err(Error::DegenerateEnsemble);
    }
    let (inv, ker) = inverse_sqrt_split(&lambda)?;
    let share = kernel_share(&ker, n);
    Ok(weights
        .iter()
        .zip(vectors)
        .map(|(&w, v)| {
            let phi = inv.matrix() * *v;
            let mut next = (&phi * phi.adjoint()) * c(w);
            if let Some(k) = &share {
                next += k;
            }
            Hermitian::symmetrized(next)
        })
        .collect())
}

/// Uniform measurement `I/n` with a random rank-one kick of size
/// [`INIT_PERTURBATION`] on every element, renormalized to a POVM.
pub fn perturbed_uniform_povm<R: Rng + ?Sized>(dim: usize, outcomes: usize, rng: &mut R) -> Result<Povm> {
    let raw: Vec<Hermitian> = (0..outcomes)
        .map(|_| {
            let v = random_pure_state(dim, rng)?;
            Ok(Hermitian::identity(dim)
                .scale(1.0 / outcomes as f64)
                .add(&Hermitian::outer(v.amplitudes()).scale(INIT_PERTURBATION)))
        })
        .collect::<Result<_>>()?;
    normalize_to_povm(raw)
}

/// `G_y → S^{-1/2} G_y S^{-1/2}` with `S = Σ_y G_y`; `S` must be full rank.
pub fn normalize_to_povm(raw: Vec<Hermitian>) -> Result<Povm> {
    let d = raw.first().map(Hermitian::dim).ok_or_else(|| Error::InvalidArgument("no POVM elements".into()))?;
    let sum = raw.iter().fold(Hermitian::zeros(d), |acc, g| acc.add(g));
    let (inv, ker) = inverse_sqrt_split(&sum)?;
    if ker.trace() > 0.5 {
        return Err(Error::Numeric("POVM seed elements do not span the space".into()));
    }
    Ok(Povm::unchecked(raw.iter().map(|g| Hermitian::symmetrized(inv.matrix() * g.matrix() * inv.matrix())).collect()))
}

struct Run {
    povm: Povm,
    assignment: Vec<usize>,
    objective: f64,
    iterations: usize,
    converged: bool,
    trace: Vec<f64>,
}

fn iterate(ens: &Ensemble, cfg: &SolverConfig, init: Povm) -> Result<Run> {
    let support = ens.support_indices();
    let states = ens.states();
    let mut povm = init;
    let (mut assignment, mut objective) = assign(&povm, ens, &support);
    let mut trace = vec![objective];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iter {
        let sigma: Vec<&DensityOperator> = assignment.iter().map(|&x| &states[x]).collect();
        let next = povm_fixed_point_step(&povm, &sigma)?;
        let (next_assignment, next_objective) = assign(&next, ens, &support);
        iterations += 1;
        trace.push(next_objective);
        let change = (next_objective - objective).abs();
        povm = next;
        assignment = next_assignment;
        objective = next_objective;
        if change <= cfg.tol * objective.abs() {
            converged = true;
            break;
        }
    }
    Ok(Run { povm, assignment, objective, iterations, converged, trace })
}

fn finish(ens: &Ensemble, run: Run) -> Result<LeakageResult> {
    let dual = dual_certificate(&run.povm, ens, &run.assignment)?;
    Ok(LeakageResult {
        leakage_bits: run.objective.max(1.0).log2(),
        objective: run.objective,
        dual_upper_bound: dual,
        dual_upper_bound_bits: dual.max(1.0).log2(),
        povm: run.povm,
        assignment: run.assignment,
        iterations: run.iterations,
        converged: run.converged,
        objective_trace: run.trace,
    })
}

/// Dual gap (bits) above which another round of restarts is run.
pub const GAP_RETRY_BITS: f64 = 1e-4;

/// Cap on restart rounds, each of `cfg.restarts` starts.
pub const MAX_RESTART_ROUNDS: usize = 8;

/// Maximal quantum leakage with `cfg.restarts` independently seeded starts;
/// the restart with the largest objective wins (earliest on ties).
///
/// The fixed point can stall at a local optimum when `|X| > d`. If the dual
/// gap of the winner exceeds [`GAP_RETRY_BITS`], further rounds of fresh
/// starts are run, up to [`MAX_RESTART_ROUNDS`] rounds in total.
pub fn compute_leakage(ens: &Ensemble, cfg: &SolverConfig) -> Result<LeakageResult> {
    cfg.validate()?;
    let d = ens.dim();
    let outcomes = cfg.outcomes_for(d);
    let mut best: Option<LeakageResult> = None;
    for round in 0..MAX_RESTART_ROUNDS {
        let first = round * cfg.restarts;
        let runs = (first..first + cfg.restarts)
            .into_par_iter()
            .map(|r| {
                let mut rng = task_rng(cfg.seed, r as u64);
                let init = perturbed_uniform_povm(d, outcomes, &mut rng)?;
                iterate(ens, cfg, init)
            })
            .collect::<Result<Vec<_>>>()?;
        let winner = runs
            .into_iter()
            .reduce(|best, r| if r.objective > best.objective { r } else { best })
            .expect("at least one restart");
        if best.as_ref().is_none_or(|b| winner.objective > b.objective) {
            best = Some(finish(ens, winner)?);
        }
        let res = best.as_ref().expect("set above");
        if res.gap_bits() <= GAP_RETRY_BITS {
            break;
        }
    }
    Ok(best.expect("at least one round"))
}

/// Single solver run started from a given measurement.
pub fn compute_leakage_from(ens: &Ensemble, cfg: &SolverConfig, init: Povm) -> Result<LeakageResult> {
    cfg.validate()?;
    check_dims(&init, ens)?;
    let run = iterate(ens, cfg, init)?;
    finish(ens, run)
}

/// Upper bound on `sup_F Σ_y max_x tr(ρ^x F_y)`.
///
/// `Y₀ = (W + W†)/2` with `W = Σ_y σ_y F_y` is shifted by `δ I` until
/// `Y₀ + δ I ⪰ ρ^x` for every label in the support; then
/// `Σ_y max_x tr(ρ^x F_y) ≤ tr(Y₀) + d δ` for every POVM.
pub fn dual_certificate(povm: &Povm, ens: &Ensemble, assignment: &[usize]) -> Result<f64> {
    check_dims(povm, ens)?;
    if assignment.len() != povm.outcome_count() {
        return Err(Error::InvalidArgument("assignment length differs from outcome count".into()));
    }
    let d = ens.dim();
    let states = ens.states();
    let w = povm
        .elements()
        .iter()
        .zip(assignment)
        .fold(CMatrix::zeros(d, d), |acc, (f, &x)| acc + states[x].matrix() * f.matrix());
    let y0 = Hermitian::symmetrized(w);
    let delta = ens
        .support_indices()
        .into_iter()
        .map(|x| (-y0.sub(states[x].operator()).min_eigenvalue()).max(0.0))
        .fold(0.0, f64::max);
    Ok(y0.trace() + d as f64 * delta)
}

/// Closed form for two pure states: `log2(1 + √(1 − |⟨ψ0|ψ1⟩|²))`.
pub fn two_state_oracle(psi0: &PureState, psi1: &PureState) -> Result<f64> {
    if psi0.dim() != psi1.dim() {
        return Err(Error::DimensionMismatch { expected: psi0.dim(), found: psi1.dim() });
    }
    let overlap_sq = psi0.overlap(psi1).norm_sqr();
    Ok((1.0 + (1.0 - overlap_sq).max(0.0).sqrt()).log2())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeakageBounds {
    /// `min(log2|X|, 2 log2 d)`.
    pub dimension_bound_bits: f64,
    /// `min(log2|X|, log2 d)`.
    pub pure_cap_bits: f64,
}

/// A-priori caps on the leakage from alphabet size (support) and dimension.
pub fn leakage_bounds(ens: &Ensemble) -> LeakageBounds {
    let x = (ens.support_size() as f64).log2();
    let d = (ens.dim() as f64).log2();
    LeakageBounds { dimension_bound_bits: x.min(2.0 * d), pure_cap_bits: x.min(d) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{haar_unitary, random_pure_state, rng_from_seed};

    fn basis(d: usize, n: usize) -> Ensemble {
        Ensemble::from_pure_states(&(0..n).map(|i| PureState::basis(d, i).unwrap()).collect::<Vec<_>>()).unwrap()
    }

    fn pair_with_overlap(amp: f64) -> (PureState, PureState) {
        let a = PureState::basis(2, 0).unwrap();
        let b = PureState::normalized(CVector::from_vec(vec![c(amp), c((1.0 - amp * amp).sqrt())])).unwrap();
        (a, b)
    }

    #[test]
    fn assignment_examples() {
        let ens = basis(2, 2);
        assert_eq!(assignment_update(&Povm::computational_basis(2), &ens).unwrap(), vec![0, 1]);

        let single = basis(2, 1);
        assert_eq!(assignment_update(&Povm::computational_basis(2), &single).unwrap(), vec![0, 0]);

        let psi = random_pure_state(3, &mut rng_from_seed(5)).unwrap();
        let twins = Ensemble::from_pure_states(&[psi.clone(), psi]).unwrap();
        let povm = perturbed_uniform_povm(3, 9, &mut rng_from_seed(1)).unwrap();
        assert!(assignment_update(&povm, &twins).unwrap().iter().all(|&x| x == 0));

        assert!(assignment_update(&Povm::computational_basis(3), &ens).is_err());
    }

    #[test]
    fn assignment_respects_support() {
        let ens = basis(2, 2).with_support(vec![false, true]).unwrap();
        assert_eq!(assignment_update(&Povm::computational_basis(2), &ens).unwrap(), vec![1, 1]);
    }

    #[test]
    fn fixed_point_of_basis_measurement() {
        let ens = basis(3, 3);
        let povm = Povm::computational_basis(3);
        let sigma: Vec<_> = ens.states().iter().collect();
        let next = povm_fixed_point_step(&povm, &sigma).unwrap();
        for (a, b) in next.elements().iter().zip(povm.elements()) {
            assert!(a.sub(b).max_norm() < 1e-14);
        }
    }

    #[test]
    fn identical_states_keep_unit_objective() {
        let rho = DensityOperator::from_matrix(
            CMatrix::from_row_slice(2, 2, &[c(0.7), c(0.1), c(0.1), c(0.3)]),
        )
        .unwrap();
        let ens = Ensemble::from_states(vec![rho.clone(), rho.clone()]).unwrap();
        let povm = perturbed_uniform_povm(2, 4, &mut rng_from_seed(2)).unwrap();
        let sigma = vec![&rho; 4];
        let next = povm_fixed_point_step(&povm, &sigma).unwrap();
        assert!((povm_objective(&next, &ens).unwrap() - 1.0).abs() < 1e-12);
        assert!(next.validate(1e-8).is_ok());
    }

    #[test]
    fn first_step_increases_two_state_objective() {
        let (a, b) = pair_with_overlap(0.5f64.sqrt());
        let ens = Ensemble::from_pure_states(&[a, b]).unwrap();
        let povm = perturbed_uniform_povm(2, 4, &mut rng_from_seed(11)).unwrap();
        let before = povm_objective(&povm, &ens).unwrap();
        let asg = assignment_update(&povm, &ens).unwrap();
        let sigma: Vec<_> = asg.iter().map(|&x| &ens.states()[x]).collect();
        let after = povm_objective(&povm_fixed_point_step(&povm, &sigma).unwrap(), &ens).unwrap();
        assert!(after > before + 1e-3, "{before} -> {after}");
    }

    #[test]
    fn pure_and_mixed_paths_agree() {
        let mut rng = rng_from_seed(17);
        let states: Vec<_> = (0..3).map(|_| random_pure_state(3, &mut rng).unwrap()).collect();
        let pure: Vec<_> = states.iter().map(PureState::to_density).collect();
        let mixed: Vec<_> = pure.iter().map(|s| DensityOperator::new(s.operator().clone()).unwrap()).collect();
        let povm = perturbed_uniform_povm(3, 9, &mut rng).unwrap();
        let pick = |v: &Vec<DensityOperator>| -> Vec<DensityOperator> { (0..9).map(|y| v[y % 3].clone()).collect() };
        let (sp, sm) = (pick(&pure), pick(&mixed));
        let a = povm_fixed_point_step(&povm, &sp.iter().collect::<Vec<_>>()).unwrap();
        let b = povm_fixed_point_step(&povm, &sm.iter().collect::<Vec<_>>()).unwrap();
        for (x, y) in a.elements().iter().zip(b.elements()) {
            assert!(x.sub(y).max_norm() < 1e-12);
        }
    }

    #[test]
    fn identical_states_have_zero_leakage() {
        let psi = random_pure_state(3, &mut rng_from_seed(3)).unwrap();
        let ens = Ensemble::from_pure_states(&[psi.clone(), psi.clone(), psi]).unwrap();
        let r = compute_leakage(&ens, &SolverConfig::default()).unwrap();
        assert!(r.leakage_bits.abs() < 1e-12);
        assert!(r.converged);
    }

    #[test]
    fn basis_encoding_gives_log_alphabet() {
        let r = compute_leakage(&basis(4, 4), &SolverConfig::default()).unwrap();
        assert!((r.leakage_bits - 2.0).abs() < 1e-9, "{}", r.leakage_bits);
        assert!((r.dual_upper_bound - 4.0).abs() < 1e-9);
        assert!(r.povm.validate(1e-8).is_ok());
    }

    #[test]
    fn two_states_at_overlap_half_sqrt2() {
        let (a, b) = pair_with_overlap(0.5f64.sqrt());
        // log2(1 + sqrt(1/2))
        let oracle = two_state_oracle(&a, &b).unwrap();
        assert!((oracle - 0.771553).abs() < 1e-6);
        assert!((oracle - (1.0 + 0.5f64.sqrt()).log2()).abs() < 1e-15);
        let r = compute_leakage(&Ensemble::from_pure_states(&[a, b]).unwrap(), &SolverConfig::default()).unwrap();
        assert!((r.leakage_bits - oracle).abs() < 1e-6, "{}", r.leakage_bits);
        assert!((r.objective - 1.7071068).abs() < 1e-6);
        assert!(r.dual_upper_bound - r.objective <= 1e-6);
    }

    #[test]
    fn two_state_oracle_limits() {
        let zero = PureState::basis(2, 0).unwrap();
        let one = PureState::basis(2, 1).unwrap();
        assert_eq!(two_state_oracle(&zero, &one).unwrap(), 1.0);
        assert_eq!(two_state_oracle(&zero, &zero).unwrap(), 0.0);
        assert!(two_state_oracle(&zero, &PureState::basis(3, 0).unwrap()).is_err());
    }

    #[test]
    fn dual_certificate_examples() {
        let ens = basis(3, 3);
        let povm = Povm::computational_basis(3);
        let b = dual_certificate(&povm, &ens, &[0, 1, 2]).unwrap();
        assert!((b - 3.0).abs() < 1e-9);

        let psi = random_pure_state(2, &mut rng_from_seed(8)).unwrap();
        let single = Ensemble::from_pure_states(&[psi]).unwrap();
        let povm = perturbed_uniform_povm(2, 4, &mut rng_from_seed(9)).unwrap();
        let b = dual_certificate(&povm, &single, &[0; 4]).unwrap();
        assert!((b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bounds_examples() {
        let b = leakage_bounds(&basis(8, 8));
        assert_eq!((b.dimension_bound_bits, b.pure_cap_bits), (3.0, 3.0));
        let mut rng = rng_from_seed(1);
        let qubits: Vec<_> = (0..8).map(|_| random_pure_state(2, &mut rng).unwrap()).collect();
        let b = leakage_bounds(&Ensemble::from_pure_states(&qubits).unwrap());
        assert_eq!((b.dimension_bound_bits, b.pure_cap_bits), (2.0, 1.0));
        let b = leakage_bounds(&basis(5, 1));
        assert_eq!((b.dimension_bound_bits, b.pure_cap_bits), (0.0, 0.0));
    }

    #[test]
    fn zero_probability_labels_are_ignored() {
        let mut rng = rng_from_seed(21);
        let states: Vec<_> = (0..3).map(|_| random_pure_state(2, &mut rng).unwrap()).collect();
        let cfg = SolverConfig::default();
        let two = compute_leakage(&Ensemble::from_pure_states(&states[..2]).unwrap(), &cfg).unwrap();
        let three = Ensemble::from_pure_states(&states)
            .unwrap()
            .with_prior(&[0.5, 0.5, 0.0])
            .unwrap();
        let masked = compute_leakage(&three, &cfg).unwrap();
        assert!((two.leakage_bits - masked.leakage_bits).abs() < 1e-9);
        assert!(masked.assignment.iter().all(|&x| x < 2));
    }

    #[test]
    fn unitary_conjugation_preserves_leakage() {
        let mut rng = rng_from_seed(33);
        let states: Vec<_> = (0..3).map(|_| random_pure_state(3, &mut rng).unwrap().to_density()).collect();
        let ens = Ensemble::from_states(states).unwrap();
        let u = haar_unitary(3, &mut rng);
        let rotated = ens.map_states(|s| Ok(s.conjugate_by(&u))).unwrap();
        let cfg = SolverConfig::default();
        let a = compute_leakage(&ens, &cfg).unwrap().leakage_bits;
        let b = compute_leakage(&rotated, &cfg).unwrap().leakage_bits;
        assert!((a - b).abs() < 2e-4);
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig { tol: 0.0, ..Default::default() }.validate().is_err());
        assert!(SolverConfig { max_iter: 0, ..Default::default() }.validate().is_err());
        assert!(SolverConfig { restarts: 0, ..Default::default() }.validate().is_err());
        assert!(SolverConfig { outcome_count: Some(0), ..Default::default() }.validate().is_err());
        assert_eq!(SolverConfig::default().outcomes_for(3), 9);
    }
}
